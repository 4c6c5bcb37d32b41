//! Checks every proof tree in the built-in lemma library and prints each
//! conclusion in mathematical notation.
//!
//! ```bash
//! cargo run -p fintopos --example check_lemma_library
//! ```

use fintopos::sequent::lemmas::{lemma_library, standard_signature};
use fintopos::sequent::{Checker, DerivedRuleRegistry};
use fintopos::sexpr::math_sequent;

fn main() {
    let sig = standard_signature();
    let registry = DerivedRuleRegistry::new();
    let checker = Checker::new(&sig, &registry);
    for entry in lemma_library() {
        let verdict = match checker.check_tree(&entry.tree) {
            Ok(()) => "ok".to_string(),
            Err(e) => format!("FAILED: {e}"),
        };
        println!(
            "{:<18} {:<40} {} nodes  [{verdict}]",
            entry.name,
            entry.statement,
            entry.tree.node_count()
        );
        println!("    {}", math_sequent(&entry.tree.conclusion));
    }
}
