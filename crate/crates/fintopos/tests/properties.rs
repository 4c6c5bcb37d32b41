//! Property tests for the syntax kernel: α-equivalence is an equivalence
//! relation, substitution preserves types and free variables, and the
//! surface syntax round-trips.

use std::collections::BTreeSet;

use proptest::prelude::*;

use fintopos::sexpr::{self, FamilyRegistry, ParseCtx};
use fintopos::syntax::{
    alpha_eq_formula, canonicalize_formula, substitute_formula, Formula, Signature, Term, TypeExpr,
    VarDecl,
};

fn sig() -> Signature {
    Signature::new()
        .with_base("A")
        .with_function("f", TypeExpr::base("A"), TypeExpr::base("A"))
        .with_relation("P", TypeExpr::base("A"))
        .with_relation("Q", TypeExpr::base("A"))
}

fn ty_a() -> TypeExpr {
    TypeExpr::base("A")
}

/// Strategy for terms of type A over the scope x, y, z plus bound names.
fn term_strategy() -> impl Strategy<Value = Term> {
    let var = prop_oneof![
        Just(Term::var("x", ty_a())),
        Just(Term::var("y", ty_a())),
        Just(Term::var("z", ty_a())),
    ];
    var.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner
                .clone()
                .prop_map(|t| Term::app(&sig(), "f", t).expect("typed")),
            (inner.clone(), inner).prop_map(|(a, b)| Term::fst(Term::pair(a, b)).expect("product")),
        ]
    })
}

/// Strategy for formulas over variables of type A, with quantifiers over a
/// small pool of bound names so that capture cases arise.
fn formula_strategy() -> impl Strategy<Value = Formula> {
    let atom = prop_oneof![
        Just(Formula::Top),
        Just(Formula::Bot),
        term_strategy().prop_map(|t| Formula::Rel("P".into(), t)),
        term_strategy().prop_map(|t| Formula::Rel("Q".into(), t)),
        (term_strategy(), term_strategy()).prop_map(|(a, b)| Formula::eq(a, b).expect("same type")),
    ];
    atom.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Formula::and(p, q)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Formula::or(p, q)),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| Formula::implies(p, q)),
            (prop_oneof![Just("x"), Just("y"), Just("w")], inner.clone())
                .prop_map(|(v, p)| Formula::exists(v, ty_a(), p)),
            (prop_oneof![Just("x"), Just("y"), Just("w")], inner)
                .prop_map(|(v, p)| Formula::forall(v, ty_a(), p)),
        ]
    })
}

fn binding_strategy() -> impl Strategy<Value = Vec<(VarDecl, Term)>> {
    prop::collection::vec(
        (
            prop_oneof![Just("x"), Just("y"), Just("z")],
            term_strategy(),
        ),
        0..3,
    )
    .prop_map(|raw| {
        let mut seen = BTreeSet::new();
        raw.into_iter()
            .filter(|(n, _)| seen.insert(n.to_string()))
            .map(|(n, t)| ((n.to_string(), ty_a()), t))
            .collect()
    })
}

proptest! {
    #[test]
    fn alpha_eq_is_reflexive(f in formula_strategy()) {
        prop_assert!(alpha_eq_formula(&f, &f));
    }

    #[test]
    fn alpha_eq_symmetric_and_transitive_via_canonical_forms(
        f in formula_strategy(),
        g in formula_strategy()
    ) {
        // canonicalization makes α-equivalence literal equality, so
        // symmetry and transitivity reduce to equality of canonical forms
        let fc = canonicalize_formula(&f);
        let gc = canonicalize_formula(&g);
        prop_assert_eq!(alpha_eq_formula(&f, &g), fc == gc);
        // a canonical form is α-equivalent to its source
        prop_assert!(alpha_eq_formula(&f, &fc));
    }

    #[test]
    fn substitution_preserves_wellformedness(
        f in formula_strategy(),
        b in binding_strategy()
    ) {
        let out = substitute_formula(&f, &b).expect("typed bindings");
        prop_assert!(out.check(&sig()).is_ok());
    }

    #[test]
    fn substitution_tracks_free_variables(f in formula_strategy(), t in term_strategy()) {
        let x: VarDecl = ("x".to_string(), ty_a());
        let before = f.fv();
        let out = substitute_formula(&f, &[(x.clone(), t.clone())]).unwrap();
        if before.contains(&x) {
            let mut expected: BTreeSet<VarDecl> = before;
            expected.remove(&x);
            expected.extend(t.fv());
            prop_assert_eq!(out.fv(), expected);
        } else {
            prop_assert_eq!(out.fv(), before);
        }
    }

    #[test]
    fn substitution_respects_alpha_equivalence(
        f in formula_strategy(),
        b in binding_strategy()
    ) {
        // rename the bound variables of f, substitute both, compare
        let renamed = canonicalize_formula(&f);
        let s1 = substitute_formula(&f, &b).unwrap();
        let s2 = substitute_formula(&renamed, &b).unwrap();
        prop_assert!(alpha_eq_formula(&s1, &s2));
    }

    #[test]
    fn surface_syntax_round_trips(f in formula_strategy()) {
        let printed = f.to_string();
        let sig = sig();
        let families = FamilyRegistry::new();
        let ctx = ParseCtx { sig: &sig, families: &families };
        let sexps = sexpr::read_all(&printed).expect("printer emits readable syntax");
        let scope = [
            ("x".to_string(), ty_a()),
            ("y".to_string(), ty_a()),
            ("z".to_string(), ty_a()),
        ]
        .into();
        let reparsed = sexpr::parse_formula(&ctx, &scope, &sexps[0]).expect("reparses");
        prop_assert!(alpha_eq_formula(&f, &reparsed));
    }
}
