//! The Heyting algebra of subobjects and the quantifier adjoints on a small
//! function, with the residuation laws spelled out.
//!
//! ```bash
//! cargo run -p fintopos --example heyting_and_adjoints
//! ```

use fintopos::finset::{
    exists_f, forall_f, inv_image, sub_implies, sub_join, sub_leq, sub_meet, FinMor, FinObj,
    HeytingStructure, Label, Subobj,
};

fn main() {
    let e = FinObj::numbered("e", 3);
    let h = HeytingStructure::new(e.clone());
    let x = Subobj::new(e.clone(), [Label::atom("e0"), Label::atom("e1")]).unwrap();
    let y = Subobj::new(e.clone(), [Label::atom("e1"), Label::atom("e2")]).unwrap();
    println!(
        "x = {:?}",
        x.subset().iter().map(|l| l.to_string()).collect::<Vec<_>>()
    );
    println!(
        "y = {:?}",
        y.subset().iter().map(|l| l.to_string()).collect::<Vec<_>>()
    );
    println!("x ∧ y has {} elements", sub_meet(&x, &y).unwrap().size());
    println!("x ∨ y has {} elements", sub_join(&x, &y).unwrap().size());
    println!("x ⇒ y has {} elements", sub_implies(&x, &y).unwrap().size());
    println!("⊤ has {}, ⊥ has {}", h.top.size(), h.bottom.size());

    // residuation, checked over every triple of subobjects
    let subs = h.all_subobjects();
    let mut checked = 0;
    for z in &subs {
        for x in &subs {
            for y in &subs {
                checked += 1;
                let lhs = sub_leq(&sub_meet(z, x).unwrap(), y).unwrap();
                let rhs = sub_leq(z, &sub_implies(x, y).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
    println!("residuation holds on all {checked} triples");

    // the adjoint triple along e0,e1 ↦ b0; e2 ↦ b1
    let b = FinObj::numbered("b", 2);
    let f = FinMor::from_fn(e.clone(), b, |l| {
        if *l == Label::atom("e2") {
            Label::atom("b1")
        } else {
            Label::atom("b0")
        }
    })
    .unwrap();
    let direct = exists_f(&f, &x).unwrap();
    let universal = forall_f(&f, &x).unwrap();
    println!(
        "∃_f(x) = {:?}",
        direct
            .subset()
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
    );
    println!(
        "∀_f(x) = {:?}",
        universal
            .subset()
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
    );
    let back = inv_image(&f, &direct).unwrap();
    assert!(sub_leq(&x, &back).unwrap(), "unit of the adjunction");
    println!("x ≤ f⁻¹(∃_f(x)) as the unit of ∃_f ⊣ f⁻¹");
}
