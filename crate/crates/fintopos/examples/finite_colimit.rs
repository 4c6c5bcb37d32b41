//! Computes the colimit of the shipped pushout diagram twice — inside the
//! language and by the set-theoretic oracle — and prints both.
//!
//! ```bash
//! cargo run -p fintopos --example finite_colimit
//! ```

use fintopos::colimit::{finite_colimit, oracle_colimit, VerifyOptions};
use fintopos::sexpr::parse_document;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/pushout.diagram");
    let src = std::fs::read_to_string(path).expect("corpus file");
    let doc = parse_document(&src).expect("parses");
    let (diag, env) = doc.diagram.expect("diagram file");
    println!(
        "diagram: {} objects, {} morphisms",
        diag.objects.len(),
        diag.morphisms.len()
    );
    let (oracle_obj, _) = oracle_colimit(&diag, &env).unwrap();
    println!("oracle colimit: {} element(s)", oracle_obj.size());
    let result = finite_colimit(&diag, &env, &VerifyOptions::default()).unwrap();
    println!("internal colimit: {} element(s)", result.object.size());
    println!("\nconstruction:");
    for line in result.construction_trace.iter().take(4) {
        println!("    {line}");
    }
    println!("    …");
    println!("\nverification:");
    for item in &result.verification.items {
        println!("    {}: {}", item.name, item.detail);
    }
}
