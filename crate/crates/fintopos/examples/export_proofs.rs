//! Renders the built-in lemma library as a proof-script document on
//! standard output. The shipped corpus file was produced by this example:
//!
//! ```bash
//! cargo run -p fintopos --example export_proofs > corpus/lemmas.proof
//! ```

use fintopos::sequent::lemmas::{lemma_library, standard_signature};
use fintopos::sexpr::{math_sequent, print_proof, print_signature};

fn main() {
    println!("; helper lemmas as checkable proof scripts");
    println!("{}", print_signature(&standard_signature()));
    for entry in lemma_library() {
        println!();
        println!("; {} — {}", entry.name, entry.statement);
        println!("; concludes {}", math_sequent(&entry.tree.conclusion));
        println!("(proof {} {})", entry.name, print_proof(&entry.tree));
    }
}
