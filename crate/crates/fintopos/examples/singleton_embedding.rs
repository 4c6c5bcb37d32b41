//! Embeds an object into its power object via singletons: the subobject
//! `⟦z : PU . ∃u, z = {u}⟧` is in bijection with U.
//!
//! ```bash
//! cargo run -p fintopos --example singleton_embedding
//! ```

use std::collections::BTreeMap;

use fintopos::finset::FinObj;
use fintopos::interp::{interp_formula, interp_term, Environment};
use fintopos::sequent::Context;
use fintopos::sexpr::math_formula;
use fintopos::syntax::{Formula, Signature, Term, TypeExpr};

fn main() {
    let sig = Signature::new().with_base("U");
    let u = FinObj::numbered("u", 4);
    let env = Environment::new(
        sig,
        BTreeMap::from([("U".to_string(), u.clone())]),
        BTreeMap::new(),
        BTreeMap::new(),
    )
    .unwrap();
    let u_ty = TypeExpr::base("U");
    let z_ty = TypeExpr::power(u_ty.clone());
    let formula = Formula::exists(
        "v",
        u_ty.clone(),
        Formula::eq(
            Term::var("z", z_ty.clone()),
            Term::singleton(Term::var("v", u_ty.clone())),
        )
        .unwrap(),
    );
    println!("formula: {}", math_formula(&formula));
    let ctx = Context::new([("z".to_string(), z_ty)]).unwrap();
    let sub = interp_formula(&ctx, &formula, &env).unwrap();
    println!(
        "subobject of PU picks {} of {} subset labels:",
        sub.size(),
        sub.ambient.size()
    );
    for l in sub.subset() {
        println!("    {l}");
    }
    // the embedding itself: u ↦ {u}
    let embed = interp_term(
        &Context::new([("v".to_string(), u_ty.clone())]).unwrap(),
        &Term::singleton(Term::var("v", u_ty)),
        &env,
    )
    .unwrap();
    for e in u.elements() {
        println!("{e} ↦ {}", embed.apply(e));
    }
}
