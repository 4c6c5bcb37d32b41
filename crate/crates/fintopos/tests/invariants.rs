//! Cross-cutting invariants that sit beside the acceptance criteria: label
//! semantics of the crucial terms, preimage preserving meets and joins,
//! the growing-family fixpoint example, and the transpose round trip.

use fintopos::suites::{self, SuiteConfig};

fn assert_outcome(outcome: fintopos::suites::SuiteOutcome) {
    println!(
        "{}: {} ({})",
        outcome.id,
        if outcome.passed { "pass" } else { "FAIL" },
        outcome.detail
    );
    assert!(outcome.passed, "{}: {}", outcome.id, outcome.detail);
}

#[test]
fn crucial_terms_act_on_labels() {
    assert_outcome(suites::crucial_term_suite());
}

#[test]
fn preimage_preserves_meets_and_joins() {
    assert_outcome(suites::beck_sanity());
}

#[test]
fn growing_family_stabilizes_at_its_last_growth() {
    assert_outcome(suites::growing_family_example());
}

#[test]
fn transpose_round_trips_on_sampled_tables() {
    assert_outcome(suites::transpose_suite(&SuiteConfig::default()));
}
