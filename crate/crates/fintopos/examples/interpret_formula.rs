//! Interprets a few formulas over a hand-built finite-set environment and
//! prints the resulting subobjects.
//!
//! ```bash
//! cargo run -p fintopos --example interpret_formula
//! ```

use std::collections::BTreeMap;

use fintopos::finset::{FinObj, Label, Subobj};
use fintopos::interp::{interp_formula, Environment};
use fintopos::sequent::Context;
use fintopos::sexpr::math_formula;
use fintopos::syntax::{Formula, Signature, Term, TypeExpr};

fn main() {
    let a_ty = TypeExpr::base("A");
    let sig = Signature::new()
        .with_base("A")
        .with_relation("Even", a_ty.clone());
    let a = FinObj::numbered("n", 4);
    let even = Subobj::new(a.clone(), [Label::atom("n0"), Label::atom("n2")]).unwrap();
    let env = Environment::new(
        sig,
        BTreeMap::from([("A".to_string(), a)]),
        BTreeMap::new(),
        BTreeMap::from([("Even".to_string(), even)]),
    )
    .unwrap();

    let x = Term::var("x", a_ty.clone());
    let y = Term::var("y", a_ty.clone());
    let formulas = vec![
        Formula::Rel("Even".into(), x.clone()),
        Formula::or(
            Formula::Rel("Even".into(), x.clone()),
            Formula::eq(x.clone(), y.clone()).unwrap(),
        ),
        Formula::exists(
            "w",
            a_ty.clone(),
            Formula::and(
                Formula::Rel("Even".into(), Term::var("w", a_ty.clone())),
                Formula::eq(Term::var("w", a_ty.clone()), x.clone()).unwrap(),
            ),
        ),
        Formula::forall(
            "w",
            a_ty.clone(),
            Formula::implies(
                Formula::Rel("Even".into(), Term::var("w", a_ty.clone())),
                Formula::eq(Term::var("w", a_ty.clone()), x.clone()).unwrap(),
            ),
        ),
    ];
    let ctx = Context::new([("x".to_string(), a_ty.clone()), ("y".to_string(), a_ty)]).unwrap();
    for f in formulas {
        let sub = interp_formula(&ctx, &f, &env).unwrap();
        println!("⟦x,y . {}⟧", math_formula(&f));
        println!(
            "    {} of {} pairs: {}",
            sub.size(),
            sub.ambient.size(),
            sub.subset()
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
}
