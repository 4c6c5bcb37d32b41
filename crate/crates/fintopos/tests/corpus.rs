//! Golden tests over the shipped corpus: every proof script checks, every
//! diagram's internal colimit agrees with the oracle, the environment file
//! interprets, and parsing round-trips through the printer.

use fintopos::colimit::{finite_colimit, oracle_colimit, VerifyOptions};
use fintopos::interp::{interp_formula, interp_term};
use fintopos::sequent::{Checker, DerivedRuleRegistry};
use fintopos::sexpr::{self, parse_document, FamilyRegistry, ParseCtx};
use fintopos::syntax::alpha_eq_formula;

fn corpus(name: &str) -> String {
    let path = format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("corpus file readable")
}

#[test]
fn lemma_proof_scripts_check_and_round_trip() {
    let doc = parse_document(&corpus("lemmas.proof")).unwrap();
    let sig = doc.signature.clone().unwrap();
    let registry = DerivedRuleRegistry::new();
    let checker = Checker::new(&sig, &registry);
    assert!(doc.proofs.len() >= 11);
    let families = FamilyRegistry::new();
    let pctx = ParseCtx {
        sig: &sig,
        families: &families,
    };
    for (name, tree) in &doc.proofs {
        checker
            .check_tree(tree)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        // print, reparse, compare node-by-node conclusions
        let printed = sexpr::print_proof(tree);
        let sexps = sexpr::read_all(&printed).unwrap();
        let reparsed = sexpr::parse_proof(&pctx, &sexps[0]).unwrap();
        assert_eq!(reparsed.node_count(), tree.node_count(), "{name}");
        assert!(reparsed.conclusion.matches(&tree.conclusion), "{name}");
    }
}

#[test]
fn diagram_corpus_matches_oracle() {
    let expectations = [
        ("pushout.diagram", 1usize),
        ("span.diagram", 3),
        ("coequalizer.diagram", 1),
        ("triangle.diagram", 2),
        ("discrete.diagram", 5),
    ];
    let opts = VerifyOptions {
        apex_cap: 2,
        ..VerifyOptions::default()
    };
    for (file, expected) in expectations {
        let doc = parse_document(&corpus(file)).unwrap();
        let (diag, env) = doc.diagram.unwrap();
        let (oracle_obj, _) = oracle_colimit(&diag, &env).unwrap();
        let result = finite_colimit(&diag, &env, &opts).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(result.object.size(), oracle_obj.size(), "{file}");
        assert_eq!(result.object.size(), expected, "{file}");
        assert!(result.verification.passed(), "{file}");
    }
}

#[test]
fn environment_corpus_interprets() {
    let doc = parse_document(&corpus("evens.sexp")).unwrap();
    let env = doc.environment.clone().unwrap();
    assert_eq!(doc.formulas.len(), 3);
    assert_eq!(doc.terms.len(), 2);
    for (name, ctx, f) in &doc.formulas {
        let sub = interp_formula(ctx, f, &env).unwrap_or_else(|e| panic!("{name}: {e}"));
        match name.as_str() {
            // evens and their predecessors: n3 and n1 point at evens
            "even-or-successor-even" => assert_eq!(sub.size(), 4),
            // closed truths hold over the point
            "somewhere-even" | "even-set-is-not-everything" => assert_eq!(sub.size(), 1),
            other => panic!("unexpected formula {other}"),
        }
    }
    for (name, ctx, t) in &doc.terms {
        interp_term(ctx, t, &env).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn corpus_formulas_round_trip() {
    let doc = parse_document(&corpus("evens.sexp")).unwrap();
    let sig = doc.signature.clone().unwrap();
    let families = FamilyRegistry::new();
    let pctx = ParseCtx {
        sig: &sig,
        families: &families,
    };
    for (name, ctx, f) in &doc.formulas {
        let printed = f.to_string();
        let sexps = sexpr::read_all(&printed).unwrap();
        let scope = ctx.entries().iter().cloned().collect();
        let again = sexpr::parse_formula(&pctx, &scope, &sexps[0]).unwrap();
        assert!(alpha_eq_formula(f, &again), "{name}");
    }
}
