//! Coequalises two maps through the chain relation: prints the classes, the
//! quotient map, and the index at which the countable disjunction of chain
//! lengths stabilized.
//!
//! ```bash
//! cargo run -p fintopos --example coequalizer
//! ```

use std::collections::BTreeMap;

use fintopos::colimit::{coequalizer, VerifyOptions};
use fintopos::finset::{FinMor, FinObj, Label};
use fintopos::interp::Environment;
use fintopos::syntax::{Signature, Term, TypeExpr};

fn main() {
    let a_ty = TypeExpr::base("A");
    let b_ty = TypeExpr::base("B");
    let a = FinObj::numbered("a", 3);
    let b = FinObj::numbered("b", 4);
    // f walks forward, g lags one behind: the classes chain together
    let f = FinMor::from_fn(a.clone(), b.clone(), |l| match l {
        Label::Atom(s) => Label::atom(format!("b{}", &s[1..])),
        _ => unreachable!(),
    })
    .unwrap();
    let g = FinMor::from_fn(a.clone(), b.clone(), |l| match l {
        Label::Atom(s) => {
            let i: usize = s[1..].parse().unwrap();
            Label::atom(format!("b{}", i + 1))
        }
        _ => unreachable!(),
    })
    .unwrap();
    let sig = Signature::new()
        .with_base("A")
        .with_base("B")
        .with_function("f", a_ty.clone(), b_ty.clone())
        .with_function("g", a_ty.clone(), b_ty.clone());
    let env = Environment::new(
        sig.clone(),
        BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]),
        BTreeMap::from([("f".to_string(), f), ("g".to_string(), g)]),
        BTreeMap::new(),
    )
    .unwrap();
    let t0 = Term::app(&sig, "f", Term::var("x", a_ty.clone())).unwrap();
    let t1 = Term::app(&sig, "g", Term::var("x", a_ty)).unwrap();
    let result = coequalizer(&t0, &t1, &env, &VerifyOptions::default()).unwrap();
    println!(
        "coequaliser has {} class(es); chain family stabilized at index {}",
        result.object.size(),
        result.stabilization_index
    );
    for class in result.object.elements() {
        println!("    class {class}");
    }
    println!("\nquotient map:");
    for (k, v) in result.quotient_map.table() {
        println!("    {k} ↦ {v}");
    }
    println!("\nverification:");
    for item in &result.verification.items {
        println!("    {}: {}", item.name, item.detail);
    }
}
