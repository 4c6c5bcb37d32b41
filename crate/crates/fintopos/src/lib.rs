//! The internal (Mitchell–Bénabou) language of a topos, with its semantics
//! computed in the topos of finite sets, and finite colimits — initial
//! object, coproducts, coequalisers, general finite colimits — constructed
//! *inside* the language and verified against brute-force set-theoretic
//! oracles.
//!
//! The crate is organized around six pieces:
//!
//! - [`syntax`]: types, terms and formulas of the language, free variables,
//!   α-equivalence and capture-avoiding substitution;
//! - [`sequent`]: sequents `p ⊢_Δ q`, explicit proof trees, a rule-by-rule
//!   checker and a library of machine-checked lemmas;
//! - [`finset`]: finite sets, function tables, canonical subobjects, Heyting
//!   subobject lattices, quantifier adjoints, power objects;
//! - [`interp`]: the interpretation of types, terms-in-context and
//!   formulas-in-context into finite sets, semantic entailment, and semantic
//!   validation of derived rules;
//! - [`colimit`]: the internal-language colimit constructions and their
//!   verification machinery, including the union-find oracle;
//! - [`sexpr`]: the s-expression surface syntax, pretty-printer and file
//!   formats used by the command line.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and [`suites`] for the verification suites behind `fintopos verify`.

pub mod colimit;
pub mod finset;
pub mod interp;
pub mod report;
pub mod sequent;
pub mod sexpr;
pub mod suites;
pub mod syntax;

pub use finset::{FinMor, FinObj, Label, Subobj};
pub use sequent::{Context, ProofTree, RuleId, Sequent};
pub use syntax::{Formula, Signature, Term, TypeExpr};
