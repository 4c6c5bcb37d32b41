//! Loads the shipped proof-script corpus and checks every proof against the
//! deduction rules.
//!
//! ```bash
//! cargo run -p fintopos --example proof_scripts
//! ```

use fintopos::sequent::{Checker, DerivedRuleRegistry};
use fintopos::sexpr::{math_sequent, parse_document};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/lemmas.proof");
    let src = std::fs::read_to_string(path).expect("corpus file");
    let doc = parse_document(&src).expect("parses");
    let sig = doc.signature.expect("signature present");
    let registry = DerivedRuleRegistry::new();
    let checker = Checker::new(&sig, &registry);
    for (name, tree) in &doc.proofs {
        let verdict = match checker.check_tree(tree) {
            Ok(()) => "ok",
            Err(_) => "FAILED",
        };
        println!(
            "{name:<18} {:<52} [{verdict}]",
            math_sequent(&tree.conclusion)
        );
    }
}
