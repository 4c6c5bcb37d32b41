//! Acceptance suite: every verification criterion at its stated tolerance,
//! one test per criterion, each printing a pass/fail line.
//!
//! Time bounds are asserted where stated; the test profile builds with
//! optimizations so the bounds hold comfortably.

use fintopos::suites::{self, SuiteConfig};

fn run(name: &str, config: &SuiteConfig, limit_ms: Option<u128>) {
    let outcome = suites::run_suite(name, config);
    let status = if outcome.passed { "pass" } else { "FAIL" };
    println!(
        "criterion {name}: {status} ({}) [{} ms]",
        outcome.detail, outcome.millis
    );
    assert!(outcome.passed, "{name}: {}", outcome.detail);
    if let Some(limit) = limit_ms {
        assert!(
            outcome.millis < limit,
            "{name} took {} ms, limit {limit} ms",
            outcome.millis
        );
    }
}

fn config() -> SuiteConfig {
    SuiteConfig::default()
}

#[test]
fn criterion_01_lemma_library() {
    // all helper-lemma proof trees check, in under a second
    run("lemma-library", &config(), Some(1_000));
}

#[test]
fn criterion_02_soundness() {
    // every checked sequent holds in every environment over base sets of
    // size ≤ 3, exhaustively over relation assignments
    run("soundness", &config(), Some(60_000));
}

#[test]
fn criterion_03_heyting_laws() {
    // lattice laws and residuation, exhaustively for |E| ≤ 4
    run("heyting", &config(), Some(10_000));
}

#[test]
fn criterion_04_adjoint_triple() {
    // both residuation equivalences, exhaustively for |dom|, |cod| ≤ 3
    run("adjoints", &config(), Some(60_000));
}

#[test]
fn criterion_05_image_agreement() {
    // pushout-equaliser image equals the direct range on 200 seeded
    // morphisms with |dom|, |cod| ≤ 6
    run("image", &config(), None);
}

#[test]
fn criterion_06_substitution_lemma() {
    // direct-vs-pullback interpretation equality on 100 seeded instances
    run("substitution-lemma", &config(), None);
}

#[test]
fn criterion_07_singleton_embedding() {
    // bijection onto the singleton labels for all |U| ≤ 5
    run("singleton-embedding", &config(), None);
}

#[test]
fn criterion_08_initial_object() {
    // the falsum subobject over the point is empty, with a unique map to
    // every target of size ≤ 4
    run("initial-object", &config(), None);
}

#[test]
fn criterion_09_coproducts() {
    // binary for all |A|, |B| ≤ 4 and n-ary for size vectors summing to at
    // most 6: cardinality, disjoint jointly-surjective injections, and the
    // universal property against apexes of size ≤ 3
    run("coproducts", &config(), None);
}

#[test]
fn criterion_10_coequalizers() {
    // 100 seeded pairs with |A|, |B| ≤ 5: class count matches union-find,
    // the quotient coequalizes, the universal property holds, and the chain
    // family stabilizes within |B|²
    run("coequalizers", &config(), None);
}

#[test]
fn criterion_11_finite_colimits() {
    // 200 seeded diagrams with ≤ 3 objects of size ≤ 3 and ≤ 3 morphisms:
    // bijective over cocones with the union-find oracle colimit
    run("colimits", &config(), Some(300_000));
}

#[test]
fn criterion_12_derived_rules() {
    // member, set-equality and countable-or rules plus surjective pairing,
    // semantically valid on their generated instance suites
    run("derived-rules", &config(), None);
}
