//! Builds the coproduct of two finite sets inside the language — the
//! subobject of PA × PB picking out injection tuples — and prints the
//! construction trace and verification report.
//!
//! ```bash
//! cargo run -p fintopos --example binary_coproduct
//! ```

use std::collections::BTreeMap;

use fintopos::colimit::{binary_coproduct, VerifyOptions};
use fintopos::finset::FinObj;
use fintopos::interp::Environment;
use fintopos::syntax::Signature;

fn main() {
    let sig = Signature::new().with_base("A").with_base("B");
    let env = Environment::new(
        sig,
        BTreeMap::from([
            ("A".to_string(), FinObj::numbered("a", 2)),
            ("B".to_string(), FinObj::numbered("b", 3)),
        ]),
        BTreeMap::new(),
        BTreeMap::new(),
    )
    .unwrap();
    let result = binary_coproduct("A", "B", &env, &VerifyOptions::default()).unwrap();
    println!("object has {} elements:", result.object.size());
    for e in result.object.elements() {
        println!("    {e}");
    }
    println!("\nconstruction:");
    for line in &result.construction_trace {
        println!("    {line}");
    }
    println!("\nverification:");
    for item in &result.verification.items {
        println!("    {}: {}", item.name, item.detail);
    }
}
