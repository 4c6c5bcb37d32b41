//! Verification suites: the property- and oracle-based checks behind the
//! `verify` subcommand and the acceptance test target. Each suite returns a
//! structured outcome; randomized suites are driven by a seeded generator.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::colimit::{
    self, coequalizer, finite_colimit, initial_object, nary_coproduct, oracle_colimit,
    DiagramMorphism, DiagramSpec, VerifyOptions,
};
use crate::finset::{
    self, countable_join_fixpoint, exists_f, forall_f, image, inv_image, sub_implies, sub_join,
    sub_leq, sub_meet, FinMor, FinObj, HeytingStructure, Label, Subobj,
};
use crate::interp::{
    interp_formula, semantic_entails, sequent_holds, validate_rule_instances,
    validate_substitution_lemma, Environment, RuleInstance,
};
use crate::sequent::lemmas::{lemma_library, standard_signature};
use crate::sequent::{Checker, Context, DerivedRuleRegistry, Sequent};
use crate::syntax::{Formula, FormulaFamily, Signature, Term, TypeExpr, VarDecl};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides the per-suite case count of randomized suites.
    pub cases: Option<usize>,
    /// Apex size cap for universal-property checks.
    pub size_cap: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            cases: None,
            size_cap: 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub id: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

fn outcome(id: &str, started: Instant, passed: bool, detail: impl Into<String>) -> SuiteOutcome {
    SuiteOutcome {
        id: id.to_string(),
        passed,
        detail: detail.into(),
        millis: started.elapsed().as_millis(),
    }
}

pub const ALL_SUITES: &[&str] = &[
    "lemma-library",
    "soundness",
    "heyting",
    "adjoints",
    "image",
    "substitution-lemma",
    "singleton-embedding",
    "initial-object",
    "coproducts",
    "coequalizers",
    "colimits",
    "derived-rules",
];

/// Runs one suite by name.
pub fn run_suite(name: &str, config: &SuiteConfig) -> SuiteOutcome {
    match name {
        "lemma-library" => lemma_library_suite(),
        "soundness" => soundness_suite(),
        "heyting" => heyting_suite(),
        "adjoints" => adjoint_suite(),
        "image" => image_suite(config),
        "substitution-lemma" => substitution_lemma_suite(config),
        "singleton-embedding" => singleton_embedding_suite(),
        "initial-object" => initial_object_suite(),
        "coproducts" => coproduct_suite(config),
        "coequalizers" => coequalizer_suite(config),
        "colimits" => colimit_suite(config),
        "derived-rules" => derived_rules_suite(),
        other => SuiteOutcome {
            id: other.to_string(),
            passed: false,
            detail: format!("unknown suite `{other}`"),
            millis: 0,
        },
    }
}

pub fn run_all(config: &SuiteConfig) -> Vec<SuiteOutcome> {
    ALL_SUITES.iter().map(|s| run_suite(s, config)).collect()
}

// ---------------------------------------------------------------------------
// 1. Lemma library checks syntactically

pub fn lemma_library_suite() -> SuiteOutcome {
    let started = Instant::now();
    let sig = standard_signature();
    let registry = DerivedRuleRegistry::new();
    let checker = Checker::new(&sig, &registry);
    let lib = lemma_library();
    if lib.len() < 11 {
        return outcome(
            "lemma-library",
            started,
            false,
            format!("only {} trees", lib.len()),
        );
    }
    for entry in &lib {
        if let Err(e) = checker.check_tree(&entry.tree) {
            return outcome(
                "lemma-library",
                started,
                false,
                format!("{} failed: {e}", entry.name),
            );
        }
    }
    outcome(
        "lemma-library",
        started,
        true,
        format!("{} proof trees check", lib.len()),
    )
}

// ---------------------------------------------------------------------------
// 2. Soundness of every checked sequent in the library

/// Environments for the standard signature: base sizes 1..=max, every
/// assignment of the three relation symbols.
pub fn standard_environments(max_size: usize) -> Vec<Environment> {
    let sig = standard_signature();
    let mut out = Vec::new();
    for n in 1..=max_size {
        let a = FinObj::numbered("a", n);
        let h = HeytingStructure::new(a.clone());
        let subs = h.all_subobjects();
        for p in &subs {
            for q in &subs {
                for r in &subs {
                    let env = Environment::new(
                        sig.clone(),
                        BTreeMap::from([("A".to_string(), a.clone())]),
                        BTreeMap::new(),
                        BTreeMap::from([
                            ("P".to_string(), p.clone()),
                            ("Q".to_string(), q.clone()),
                            ("R".to_string(), r.clone()),
                        ]),
                    )
                    .expect("standard environment");
                    out.push(env);
                }
            }
        }
    }
    out
}

pub fn soundness_suite() -> SuiteOutcome {
    let started = Instant::now();
    let envs = standard_environments(3);
    let lib = lemma_library();
    let mut checked = 0usize;
    for env in &envs {
        for entry in &lib {
            for seq in entry.tree.sequents() {
                checked += 1;
                match sequent_holds(seq, env) {
                    Ok(true) => {}
                    Ok(false) => {
                        return outcome(
                            "soundness",
                            started,
                            false,
                            format!("{}: `{seq}` fails in some environment", entry.name),
                        )
                    }
                    Err(e) => {
                        return outcome("soundness", started, false, format!("{}: {e}", entry.name))
                    }
                }
            }
        }
    }
    outcome(
        "soundness",
        started,
        true,
        format!(
            "{checked} sequent/environment checks, {} environments",
            envs.len()
        ),
    )
}

// ---------------------------------------------------------------------------
// 3. Heyting algebra laws

pub fn heyting_suite() -> SuiteOutcome {
    let started = Instant::now();
    let mut triples = 0usize;
    for n in 0..=4 {
        let e = FinObj::numbered("e", n);
        let h = HeytingStructure::new(e);
        let subs = h.all_subobjects();
        for x in &subs {
            for y in &subs {
                let meet = sub_meet(x, y).unwrap();
                let join = sub_join(x, y).unwrap();
                let ok = meet == sub_meet(y, x).unwrap()
                    && join == sub_join(y, x).unwrap()
                    && sub_meet(x, x).unwrap() == *x
                    && sub_join(x, x).unwrap() == *x
                    && sub_join(x, &meet).unwrap() == *x
                    && sub_meet(x, &join).unwrap() == *x
                    && sub_meet(x, &h.top).unwrap() == *x
                    && sub_join(x, &h.bottom).unwrap() == *x;
                if !ok {
                    return outcome("heyting", started, false, "lattice law failed");
                }
                for z in &subs {
                    triples += 1;
                    let assoc = sub_meet(&sub_meet(x, y).unwrap(), z).unwrap()
                        == sub_meet(x, &sub_meet(y, z).unwrap()).unwrap()
                        && sub_join(&sub_join(x, y).unwrap(), z).unwrap()
                            == sub_join(x, &sub_join(y, z).unwrap()).unwrap();
                    let residuation = sub_leq(&sub_meet(z, x).unwrap(), y).unwrap()
                        == sub_leq(z, &sub_implies(x, y).unwrap()).unwrap();
                    if !assoc || !residuation {
                        return outcome(
                            "heyting",
                            started,
                            false,
                            format!("law failed at |E| = {n}"),
                        );
                    }
                }
            }
        }
    }
    outcome(
        "heyting",
        started,
        true,
        format!("{triples} triples over |E| ≤ 4"),
    )
}

// ---------------------------------------------------------------------------
// 4. The adjoint triple

pub fn adjoint_suite() -> SuiteOutcome {
    let started = Instant::now();
    let mut checks = 0usize;
    for a_size in 0..=3usize {
        for b_size in 0..=3usize {
            let a = FinObj::numbered("a", a_size);
            let b = FinObj::numbered("b", b_size);
            if a_size > 0 && b_size == 0 {
                continue; // no morphisms exist
            }
            let ha = HeytingStructure::new(a.clone());
            let hb = HeytingStructure::new(b.clone());
            let subs_a = ha.all_subobjects();
            let subs_b = hb.all_subobjects();
            for f in all_morphisms(&a, &b) {
                for x in &subs_a {
                    for y in &subs_b {
                        checks += 1;
                        let left = sub_leq(&exists_f(&f, x).unwrap(), y).unwrap()
                            == sub_leq(x, &inv_image(&f, y).unwrap()).unwrap();
                        let right = sub_leq(&inv_image(&f, y).unwrap(), x).unwrap()
                            == sub_leq(y, &forall_f(&f, x).unwrap()).unwrap();
                        if !left || !right {
                            return outcome(
                                "adjoints",
                                started,
                                false,
                                format!("residuation failed for |A|={a_size}, |B|={b_size}"),
                            );
                        }
                        // the image characterization of the left adjoint
                        let restricted =
                            FinMor::from_fn(x.as_object(), b.clone(), |l| f.apply(l).clone())
                                .unwrap();
                        if exists_f(&f, x).unwrap() != image(&restricted).unwrap() {
                            return outcome(
                                "adjoints",
                                started,
                                false,
                                "left adjoint differs from image of restriction",
                            );
                        }
                    }
                }
            }
        }
    }
    outcome(
        "adjoints",
        started,
        true,
        format!("{checks} residuation pairs over |dom|,|cod| ≤ 3"),
    )
}

fn all_morphisms(dom: &FinObj, cod: &FinObj) -> Vec<FinMor> {
    let n = dom.size();
    let m = cod.size();
    if n == 0 {
        return vec![FinMor::new(dom.clone(), cod.clone(), BTreeMap::new()).unwrap()];
    }
    if m == 0 {
        return vec![];
    }
    (0..m.pow(n as u32))
        .map(|mut k| {
            let table: BTreeMap<Label, Label> = dom
                .elements()
                .iter()
                .map(|x| {
                    let v = k % m;
                    k /= m;
                    (x.clone(), cod.elements()[v].clone())
                })
                .collect();
            FinMor::new(dom.clone(), cod.clone(), table).unwrap()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// 5. Image agreement on random morphisms

pub fn image_suite(config: &SuiteConfig) -> SuiteOutcome {
    let started = Instant::now();
    let cases = config.cases.unwrap_or(200);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for case in 0..cases {
        let dom_size = rng.gen_range(0..=6);
        let cod_size = rng.gen_range(1..=6);
        let dom = FinObj::numbered("x", dom_size);
        let cod = FinObj::numbered("y", cod_size);
        let table: BTreeMap<Label, Label> = dom
            .elements()
            .iter()
            .map(|x| {
                let v = rng.gen_range(0..cod_size);
                (x.clone(), cod.elements()[v].clone())
            })
            .collect();
        let f = FinMor::new(dom, cod, table).unwrap();
        // `image` itself asserts pushout-equalizer vs direct range
        match image(&f) {
            Ok(im) => {
                if im.subset().iter().cloned().collect::<Vec<_>>()
                    != f.range().into_iter().collect::<Vec<_>>()
                {
                    return outcome("image", started, false, format!("case {case}: mismatch"));
                }
            }
            Err(e) => {
                return outcome("image", started, false, format!("case {case}: {e}"));
            }
        }
    }
    outcome("image", started, true, format!("{cases} random morphisms"))
}

// ---------------------------------------------------------------------------
// 6. Substitution lemma on random instances

fn random_formula(rng: &mut ChaCha8Rng, depth: usize, vars: &[VarDecl], rels: &[&str]) -> Formula {
    let pick_var = |rng: &mut ChaCha8Rng| {
        let (n, t) = &vars[rng.gen_range(0..vars.len())];
        Term::var(n.clone(), t.clone())
    };
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => Formula::Rel(
                rels[rng.gen_range(0..rels.len())].to_string(),
                pick_var(rng),
            ),
            1 => Formula::eq(pick_var(rng), pick_var(rng)).unwrap(),
            _ => {
                if rng.gen_bool(0.5) {
                    Formula::Top
                } else {
                    Formula::Bot
                }
            }
        };
    }
    match rng.gen_range(0..6) {
        0 => Formula::and(
            random_formula(rng, depth - 1, vars, rels),
            random_formula(rng, depth - 1, vars, rels),
        ),
        1 => Formula::or(
            random_formula(rng, depth - 1, vars, rels),
            random_formula(rng, depth - 1, vars, rels),
        ),
        2 => Formula::implies(
            random_formula(rng, depth - 1, vars, rels),
            random_formula(rng, depth - 1, vars, rels),
        ),
        3 | 4 => {
            let fresh = format!("q{depth}");
            let mut inner = vars.to_vec();
            inner.push((fresh.clone(), TypeExpr::base("A")));
            let body = random_formula(rng, depth - 1, &inner, rels);
            if rng.gen_bool(0.5) {
                Formula::exists(fresh, TypeExpr::base("A"), body)
            } else {
                Formula::forall(fresh, TypeExpr::base("A"), body)
            }
        }
        _ => random_formula(rng, 0, vars, rels),
    }
}

pub fn substitution_lemma_suite(config: &SuiteConfig) -> SuiteOutcome {
    let started = Instant::now();
    let cases = config.cases.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let a_ty = TypeExpr::base("A");
    let sig = Signature::new()
        .with_base("A")
        .with_relation("P", a_ty.clone())
        .with_relation("S", a_ty.clone());
    for case in 0..cases {
        let n = rng.gen_range(1..=3);
        let a = FinObj::numbered("a", n);
        let h = HeytingStructure::new(a.clone());
        let subs = h.all_subobjects();
        let env = Environment::new(
            sig.clone(),
            BTreeMap::from([("A".to_string(), a.clone())]),
            BTreeMap::new(),
            BTreeMap::from([
                ("P".to_string(), subs[rng.gen_range(0..subs.len())].clone()),
                ("S".to_string(), subs[rng.gen_range(0..subs.len())].clone()),
            ]),
        )
        .unwrap();
        let b_vars: Vec<VarDecl> = vec![
            ("b1".to_string(), a_ty.clone()),
            ("b2".to_string(), a_ty.clone()),
        ];
        let q = random_formula(&mut rng, 3, &b_vars, &["P", "S"]);
        let ctx = Context::new([
            ("x".to_string(), a_ty.clone()),
            ("y".to_string(), a_ty.clone()),
        ])
        .unwrap();
        let pick = |rng: &mut ChaCha8Rng| {
            if rng.gen_bool(0.5) {
                Term::var("x", a_ty.clone())
            } else {
                Term::var("y", a_ty.clone())
            }
        };
        let bindings: Vec<(VarDecl, Term)> = vec![
            (b_vars[0].clone(), pick(&mut rng)),
            (b_vars[1].clone(), pick(&mut rng)),
        ];
        if let Err(e) = validate_substitution_lemma(&ctx, &bindings, &q, &env) {
            return outcome(
                "substitution-lemma",
                started,
                false,
                format!("case {case}: {e}"),
            );
        }
    }
    outcome(
        "substitution-lemma",
        started,
        true,
        format!("{cases} random instances"),
    )
}

// ---------------------------------------------------------------------------
// 7. Singleton embedding

pub fn singleton_embedding_suite() -> SuiteOutcome {
    let started = Instant::now();
    for n in 0..=5usize {
        let sig = Signature::new().with_base("U");
        let u = FinObj::numbered("u", n);
        let env = Environment::new(
            sig,
            BTreeMap::from([("U".to_string(), u.clone())]),
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let u_ty = TypeExpr::base("U");
        let z_ty = TypeExpr::power(u_ty.clone());
        let f = Formula::exists(
            "v",
            u_ty.clone(),
            Formula::eq(
                Term::var("z", z_ty.clone()),
                Term::singleton(Term::var("v", u_ty.clone())),
            )
            .unwrap(),
        );
        let ctx = Context::new([("z".to_string(), z_ty)]).unwrap();
        let sub = interp_formula(&ctx, &f, &env).unwrap();
        if sub.size() != n {
            return outcome(
                "singleton-embedding",
                started,
                false,
                format!("|U| = {n}: found {} labels", sub.size()),
            );
        }
        // bijection: every element's singleton label appears exactly once
        for e in u.elements() {
            if !sub.contains(&Label::subset([e.clone()])) {
                return outcome(
                    "singleton-embedding",
                    started,
                    false,
                    format!("missing singleton of {e}"),
                );
            }
        }
    }
    outcome(
        "singleton-embedding",
        started,
        true,
        "bijective for |U| ≤ 5",
    )
}

// ---------------------------------------------------------------------------
// 8. Initial object

pub fn initial_object_suite() -> SuiteOutcome {
    let started = Instant::now();
    let sig = Signature::new().with_base("A");
    let env = Environment::new(
        sig,
        BTreeMap::from([("A".to_string(), FinObj::numbered("a", 2))]),
        BTreeMap::new(),
        BTreeMap::new(),
    )
    .unwrap();
    let targets: Vec<(String, FinObj)> = (0..=4)
        .map(|n| (format!("u{n}"), FinObj::numbered("t", n)))
        .collect();
    match initial_object(&env, &targets) {
        Ok((obj, report)) => {
            if obj.size() != 0 {
                return outcome("initial-object", started, false, "carrier not empty");
            }
            outcome(
                "initial-object",
                started,
                report.passed(),
                format!("{} checks over targets of size ≤ 4", report.items.len()),
            )
        }
        Err(e) => outcome("initial-object", started, false, e.to_string()),
    }
}

// ---------------------------------------------------------------------------
// 9. Coproducts

fn sized_env(sizes: &[(&str, usize)]) -> Environment {
    let mut sig = Signature::new();
    let mut base = BTreeMap::new();
    for (name, n) in sizes {
        sig = sig.with_base(*name);
        base.insert(name.to_string(), FinObj::numbered(&name.to_lowercase(), *n));
    }
    Environment::new(sig, base, BTreeMap::new(), BTreeMap::new()).unwrap()
}

pub fn coproduct_suite(config: &SuiteConfig) -> SuiteOutcome {
    let started = Instant::now();
    let opts = VerifyOptions {
        apex_cap: config.size_cap,
        seed: config.seed,
        ..VerifyOptions::default()
    };
    let mut built = 0usize;
    // binary: all sizes up to 4
    for a in 0..=4usize {
        for b in 0..=4usize {
            let env = sized_env(&[("A", a), ("B", b)]);
            match colimit::binary_coproduct("A", "B", &env, &opts) {
                Ok(result) => {
                    built += 1;
                    if result.object.size() != a + b {
                        return outcome(
                            "coproducts",
                            started,
                            false,
                            format!("binary {a}+{b}: wrong cardinality"),
                        );
                    }
                }
                Err(e) => {
                    return outcome("coproducts", started, false, format!("binary {a}+{b}: {e}"))
                }
            }
        }
    }
    // n-ary: size vectors with up to four summands and total at most 6
    let names = ["A", "B", "C", "D"];
    let mut vectors: Vec<Vec<usize>> = Vec::new();
    fn extend(prefix: &mut Vec<usize>, vectors: &mut Vec<Vec<usize>>) {
        if !prefix.is_empty() {
            vectors.push(prefix.clone());
        }
        if prefix.len() == 4 {
            return;
        }
        let used: usize = prefix.iter().sum();
        for s in 0..=(6 - used) {
            prefix.push(s);
            extend(prefix, vectors);
            prefix.pop();
        }
    }
    extend(&mut Vec::new(), &mut vectors);
    for sizes in &vectors {
        let pairs: Vec<(&str, usize)> = names.iter().copied().zip(sizes.iter().copied()).collect();
        let env = sized_env(&pairs);
        let summands: Vec<String> = pairs.iter().map(|(n, _)| n.to_string()).collect();
        match nary_coproduct(&summands, &env, &opts) {
            Ok(result) => {
                built += 1;
                let total: usize = sizes.iter().sum();
                if result.object.size() != total {
                    return outcome(
                        "coproducts",
                        started,
                        false,
                        format!("n-ary {sizes:?}: wrong cardinality"),
                    );
                }
            }
            Err(e) => {
                return outcome(
                    "coproducts",
                    started,
                    false,
                    format!("n-ary {sizes:?}: {e}"),
                )
            }
        }
    }
    // associativity cross-check on cardinalities for a ternary instance
    let env3 = sized_env(&[("A", 1), ("B", 2), ("C", 3)]);
    let tern = nary_coproduct(
        &["A".to_string(), "B".to_string(), "C".to_string()],
        &env3,
        &opts,
    );
    let env2 = sized_env(&[("A", 1), ("B", 2)]);
    let bin = colimit::binary_coproduct("A", "B", &env2, &opts);
    match (tern, bin) {
        (Ok(t), Ok(b)) if t.object.size() == b.object.size() + 3 => {}
        _ => {
            return outcome(
                "coproducts",
                started,
                false,
                "ternary/binary association cross-check failed",
            )
        }
    }
    outcome(
        "coproducts",
        started,
        true,
        format!("{built} coproducts verified (binary ≤ 4+4, n-ary sum ≤ 6)"),
    )
}

// ---------------------------------------------------------------------------
// 10. Coequalisers

pub fn coequalizer_suite(config: &SuiteConfig) -> SuiteOutcome {
    let started = Instant::now();
    let cases = config.cases.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let opts = VerifyOptions {
        apex_cap: config.size_cap,
        seed: config.seed,
        ..VerifyOptions::default()
    };
    for case in 0..cases {
        let a_size = rng.gen_range(0..=5);
        let b_size = rng.gen_range(1..=5);
        let env = sized_env(&[("A", a_size), ("B", b_size)]);
        let a_obj = env.base_object("A").unwrap().clone();
        let b_obj = env.base_object("B").unwrap().clone();
        let random_table = |rng: &mut ChaCha8Rng| {
            let table: BTreeMap<Label, Label> = a_obj
                .elements()
                .iter()
                .map(|x| {
                    let v = rng.gen_range(0..b_size);
                    (x.clone(), b_obj.elements()[v].clone())
                })
                .collect();
            FinMor::new(a_obj.clone(), b_obj.clone(), table).unwrap()
        };
        let f = random_table(&mut rng);
        let g = random_table(&mut rng);
        let env = env
            .with_function("f", TypeExpr::base("A"), TypeExpr::base("B"), f)
            .unwrap()
            .with_function("g", TypeExpr::base("A"), TypeExpr::base("B"), g)
            .unwrap();
        let t0 = Term::app(&env.sig, "f", Term::var("a", TypeExpr::base("A"))).unwrap();
        let t1 = Term::app(&env.sig, "g", Term::var("a", TypeExpr::base("A"))).unwrap();
        match coequalizer(&t0, &t1, &env, &opts) {
            Ok(result) => {
                if result.stabilization_index > b_size * b_size {
                    return outcome(
                        "coequalizers",
                        started,
                        false,
                        format!(
                            "case {case}: stabilization {} exceeds |B|² = {}",
                            result.stabilization_index,
                            b_size * b_size
                        ),
                    );
                }
            }
            Err(e) => return outcome("coequalizers", started, false, format!("case {case}: {e}")),
        }
    }
    outcome(
        "coequalizers",
        started,
        true,
        format!("{cases} random pairs, |A|,|B| ≤ 5"),
    )
}

// ---------------------------------------------------------------------------
// 11. General finite colimits

pub fn colimit_suite(config: &SuiteConfig) -> SuiteOutcome {
    let started = Instant::now();
    let cases = config.cases.unwrap_or(200);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let opts = VerifyOptions {
        apex_cap: config.size_cap,
        seed: config.seed,
        ..VerifyOptions::default()
    };
    let names = ["A", "B", "C"];
    for case in 0..cases {
        let n = rng.gen_range(1..=3);
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let pairs: Vec<(&str, usize)> = names.iter().copied().zip(sizes.iter().copied()).collect();
        let mut env = sized_env(&pairs);
        let m = rng.gen_range(0..=3);
        let mut morphisms = Vec::new();
        for k in 0..m {
            let dom = rng.gen_range(0..n);
            let cod = rng.gen_range(0..n);
            let name = format!("f{k}");
            let dom_obj = env.base_object(names[dom]).unwrap().clone();
            let cod_obj = env.base_object(names[cod]).unwrap().clone();
            let table: BTreeMap<Label, Label> = dom_obj
                .elements()
                .iter()
                .map(|x| {
                    let v = rng.gen_range(0..cod_obj.size());
                    (x.clone(), cod_obj.elements()[v].clone())
                })
                .collect();
            let mor = FinMor::new(dom_obj, cod_obj, table).unwrap();
            env = env
                .with_function(
                    &name,
                    TypeExpr::base(names[dom]),
                    TypeExpr::base(names[cod]),
                    mor,
                )
                .unwrap();
            morphisms.push(DiagramMorphism { name, dom, cod });
        }
        let diag = DiagramSpec::new(
            pairs.iter().map(|(n, _)| n.to_string()).collect(),
            morphisms,
        )
        .unwrap();
        match finite_colimit(&diag, &env, &opts) {
            Ok(result) => {
                let (oracle_obj, _) = oracle_colimit(&diag, &env).unwrap();
                if result.object.size() != oracle_obj.size() {
                    return outcome(
                        "colimits",
                        started,
                        false,
                        format!("case {case}: size mismatch with the oracle"),
                    );
                }
            }
            Err(e) => return outcome("colimits", started, false, format!("case {case}: {e}")),
        }
    }
    outcome(
        "colimits",
        started,
        true,
        format!("{cases} random diagrams (≤ 3 objects of size ≤ 3, ≤ 3 morphisms)"),
    )
}

// ---------------------------------------------------------------------------
// 12. Derived rules

/// The reconstructed derived sequent: every element of a product is a pair.
pub fn surjective_pairing_sequent(a: &str, b: &str) -> Sequent {
    let a_ty = TypeExpr::base(a);
    let b_ty = TypeExpr::base(b);
    let prod = TypeExpr::product(a_ty.clone(), b_ty.clone());
    let body = Formula::exists(
        "pa",
        a_ty.clone(),
        Formula::exists(
            "pb",
            b_ty.clone(),
            Formula::eq(
                Term::var("zp", prod.clone()),
                Term::pair(Term::var("pa", a_ty), Term::var("pb", b_ty)),
            )
            .unwrap(),
        ),
    );
    Sequent::new(
        Context::new([("zp".to_string(), prod)]).unwrap(),
        Formula::Top,
        body,
    )
    .unwrap()
}

/// Validates the member, set and countable-or rules plus surjective pairing
/// on generated instance suites, and returns the registry of validated
/// derived sequents on success.
pub fn validated_registry() -> Result<DerivedRuleRegistry, String> {
    let mut registry = DerivedRuleRegistry::new();

    // --- member rules over |A|, |B| ≤ 2, all table and relation assignments
    let a_ty = TypeExpr::base("A");
    let b_ty = TypeExpr::base("B");
    let sig = Signature::new()
        .with_base("A")
        .with_base("B")
        .with_function("f", a_ty.clone(), b_ty.clone())
        .with_relation("P", a_ty.clone())
        .with_relation("Q", b_ty.clone());
    let mut envs = Vec::new();
    for a_size in 1..=2usize {
        for b_size in 1..=2usize {
            let a = FinObj::numbered("a", a_size);
            let b = FinObj::numbered("b", b_size);
            let subs_a = HeytingStructure::new(a.clone()).all_subobjects();
            let subs_b = HeytingStructure::new(b.clone()).all_subobjects();
            for f in all_morphisms(&a, &b) {
                for p in &subs_a {
                    for q in &subs_b {
                        envs.push(
                            Environment::new(
                                sig.clone(),
                                BTreeMap::from([
                                    ("A".to_string(), a.clone()),
                                    ("B".to_string(), b.clone()),
                                ]),
                                BTreeMap::from([("f".to_string(), f.clone())]),
                                BTreeMap::from([
                                    ("P".to_string(), p.clone()),
                                    ("Q".to_string(), q.clone()),
                                ]),
                            )
                            .unwrap(),
                        );
                    }
                }
            }
        }
    }
    let ctx = Context::new([("x".to_string(), a_ty.clone())]).unwrap();
    let t = Term::app(&sig, "f", Term::var("x", a_ty.clone())).unwrap();
    let b_var = Term::var("bb", b_ty.clone());
    let q_templates: Vec<Formula> = vec![
        Formula::Rel("Q".into(), b_var.clone()),
        Formula::eq(b_var.clone(), b_var.clone()).unwrap(),
        Formula::and(
            Formula::Rel("Q".into(), b_var.clone()),
            Formula::Rel("Q".into(), b_var.clone()),
        ),
        Formula::or(Formula::Rel("Q".into(), b_var.clone()), Formula::Bot),
        Formula::implies(Formula::Top, Formula::Rel("Q".into(), b_var.clone())),
        Formula::exists(
            "w",
            b_ty.clone(),
            Formula::eq(b_var.clone(), Term::var("w", b_ty.clone())).unwrap(),
        ),
    ];
    let p_templates: Vec<Formula> = vec![
        Formula::Top,
        Formula::Rel("P".into(), Term::var("x", a_ty.clone())),
        Formula::Bot,
    ];
    let mut instances = Vec::new();
    for (qi, q) in q_templates.iter().enumerate() {
        let comp = Term::comprehension("bb", b_ty.clone(), q.clone());
        let member = Formula::member(t.clone(), comp).unwrap();
        let substituted =
            crate::syntax::substitute_formula(q, &[(("bb".to_string(), b_ty.clone()), t.clone())])
                .unwrap();
        for (pi, p) in p_templates.iter().enumerate() {
            let premise1 = Sequent::new(ctx.clone(), p.clone(), member.clone()).unwrap();
            let conclusion1 = Sequent::new(ctx.clone(), p.clone(), substituted.clone()).unwrap();
            instances.push(RuleInstance {
                name: format!("mem-1[q{qi},p{pi}]"),
                premises: vec![premise1.clone()],
                conclusion: conclusion1.clone(),
            });
            instances.push(RuleInstance {
                name: format!("mem-2[q{qi},p{pi}]"),
                premises: vec![conclusion1],
                conclusion: premise1,
            });
        }
    }
    validate_rule_instances(&instances, &envs).map_err(|e| e.to_string())?;

    // --- set rules: {a | p} = {a | q} vs pointwise equivalence
    let mut set_instances = Vec::new();
    let a_var = Term::var("aa", a_ty.clone());
    let set_templates: Vec<(Formula, Formula)> = vec![
        (
            Formula::Rel("P".into(), a_var.clone()),
            Formula::Rel("P".into(), a_var.clone()),
        ),
        (
            Formula::Rel("P".into(), a_var.clone()),
            Formula::or(Formula::Rel("P".into(), a_var.clone()), Formula::Bot),
        ),
        (
            Formula::eq(a_var.clone(), Term::var("x", a_ty.clone())).unwrap(),
            Formula::eq(a_var.clone(), Term::var("x", a_ty.clone())).unwrap(),
        ),
        (
            Formula::Rel("P".into(), a_var.clone()),
            Formula::not(Formula::not(Formula::Rel("P".into(), a_var.clone()))),
        ),
    ];
    for (i, (p, q)) in set_templates.iter().enumerate() {
        let eq = Formula::eq(
            Term::comprehension("aa", a_ty.clone(), p.clone()),
            Term::comprehension("aa", a_ty.clone(), q.clone()),
        )
        .unwrap();
        let eq_seq = Sequent::new(ctx.clone(), Formula::Top, eq).unwrap();
        let wide = ctx.extended(("aa".to_string(), a_ty.clone())).unwrap();
        let iff_seq = Sequent::new(wide, Formula::Top, Formula::iff(p.clone(), q.clone())).unwrap();
        set_instances.push(RuleInstance {
            name: format!("set-e[{i}]"),
            premises: vec![eq_seq.clone()],
            conclusion: iff_seq.clone(),
        });
        set_instances.push(RuleInstance {
            name: format!("set-i[{i}]"),
            premises: vec![iff_seq],
            conclusion: eq_seq,
        });
    }
    validate_rule_instances(&set_instances, &envs).map_err(|e| e.to_string())?;

    // --- countable-or rules: joins against member entailments
    let small_envs = standard_environments(3);
    let x_ty = TypeExpr::base("A");
    let x_var = Term::var("x", x_ty.clone());
    let p0 = Formula::Rel("P".into(), x_var.clone());
    let p1 = Formula::Rel("Q".into(), x_var.clone());
    let families = vec![
        FormulaFamily::constant("suite-const", p0.clone()),
        FormulaFamily::new(
            "suite-two-step",
            p0.fv().union(&p1.fv()).cloned().collect(),
            move |i| match i {
                0 => p0.clone(),
                1 => p1.clone(),
                _ => Formula::Bot,
            },
        )
        // constant ⊥ from index 2 on, so one quiet step after that is final
        .with_stability_window(2),
    ];
    let q_targets = vec![
        Formula::Rel("P".into(), x_var.clone()),
        Formula::Rel("R".into(), x_var.clone()),
        Formula::or(
            Formula::Rel("P".into(), x_var.clone()),
            Formula::Rel("Q".into(), x_var.clone()),
        ),
        Formula::Top,
    ];
    let x_ctx = Context::new([("x".to_string(), x_ty.clone())]).unwrap();
    for env in &small_envs {
        for fam in &families {
            let join = interp_formula(&x_ctx, &Formula::CountableOr(fam.clone()), env)
                .map_err(|e| e.to_string())?;
            for q in &q_targets {
                let qi = interp_formula(&x_ctx, q, env).map_err(|e| e.to_string())?;
                let join_leq = sub_leq(&join, &qi).map_err(|e| e.to_string())?;
                // probe enough members to witness the whole join
                let members_leq = (0..4)
                    .all(|i| semantic_entails(&x_ctx, &fam.member(i), q, env).unwrap_or(false));
                if join_leq != members_leq {
                    return Err(format!("countable-or rule mismatch for family {}", fam.id));
                }
            }
        }
    }

    // --- surjective pairing over |A|, |B| ≤ 3
    for a_size in 0..=3usize {
        for b_size in 0..=3usize {
            let sig = Signature::new().with_base("A").with_base("B");
            let env = Environment::new(
                sig,
                BTreeMap::from([
                    ("A".to_string(), FinObj::numbered("a", a_size)),
                    ("B".to_string(), FinObj::numbered("b", b_size)),
                ]),
                BTreeMap::new(),
                BTreeMap::new(),
            )
            .unwrap();
            let seq = surjective_pairing_sequent("A", "B");
            match sequent_holds(&seq, &env) {
                Ok(true) => {}
                _ => {
                    return Err(format!(
                        "surjective pairing fails for |A|={a_size}, |B|={b_size}"
                    ))
                }
            }
        }
    }
    registry.register("surjective-pairing", surjective_pairing_sequent("A", "B"));
    Ok(registry)
}

pub fn derived_rules_suite() -> SuiteOutcome {
    let started = Instant::now();
    match validated_registry() {
        Ok(registry) => outcome(
            "derived-rules",
            started,
            true,
            format!(
                "member, set, countable-or rules and {} derived sequent(s) validated",
                registry.names().len()
            ),
        ),
        Err(e) => outcome("derived-rules", started, false, e),
    }
}

// ---------------------------------------------------------------------------
// Extra cross-checks exposed for tests

/// The growing-prefix family example for the countable join.
pub fn growing_family_example() -> SuiteOutcome {
    let started = Instant::now();
    let n = 4usize;
    let a = FinObj::numbered("x", n + 1);
    let family = |i: usize| {
        Subobj::new(
            a.clone(),
            (0..=i.min(n)).map(|k| Label::atom(format!("x{k}"))),
        )
    };
    match countable_join_fixpoint(family, &a, None) {
        Ok((join, stable)) if join.is_full() && stable == n => outcome(
            "growing-family",
            started,
            true,
            format!("stabilized at {stable}"),
        ),
        Ok((_, stable)) => outcome(
            "growing-family",
            started,
            false,
            format!("stabilized at {stable}, expected {n}"),
        ),
        Err(e) => outcome("growing-family", started, false, e.to_string()),
    }
}

/// Preimage preserves meets and joins (small exhaustive cases).
pub fn beck_sanity() -> SuiteOutcome {
    let started = Instant::now();
    for a_size in 0..=3usize {
        for b_size in 1..=3usize {
            let a = FinObj::numbered("a", a_size);
            let b = FinObj::numbered("b", b_size);
            let subs_b = HeytingStructure::new(b.clone()).all_subobjects();
            for f in all_morphisms(&a, &b) {
                for x in &subs_b {
                    for y in &subs_b {
                        let lhs = inv_image(&f, &sub_meet(x, y).unwrap()).unwrap();
                        let rhs = sub_meet(&inv_image(&f, x).unwrap(), &inv_image(&f, y).unwrap())
                            .unwrap();
                        let lhs2 = inv_image(&f, &sub_join(x, y).unwrap()).unwrap();
                        let rhs2 = sub_join(&inv_image(&f, x).unwrap(), &inv_image(&f, y).unwrap())
                            .unwrap();
                        if lhs != rhs || lhs2 != rhs2 {
                            return outcome(
                                "beck-sanity",
                                started,
                                false,
                                "preimage does not preserve meets/joins",
                            );
                        }
                    }
                }
            }
        }
    }
    outcome("beck-sanity", started, true, "meets and joins preserved")
}

/// Crucial-term semantics: unions and pushforwards act on labels.
pub fn crucial_term_suite() -> SuiteOutcome {
    let started = Instant::now();
    for u_size in 0..=3usize {
        for b_size in 1..=3usize {
            let mut sig = Signature::new().with_base("U").with_base("B");
            sig = sig.with_function("h", TypeExpr::base("U"), TypeExpr::base("B"));
            let u = FinObj::numbered("u", u_size);
            let b = FinObj::numbered("b", b_size);
            for h in all_morphisms(&u, &b) {
                let env = Environment::new(
                    sig.clone(),
                    BTreeMap::from([("U".to_string(), u.clone()), ("B".to_string(), b.clone())]),
                    BTreeMap::from([("h".to_string(), h.clone())]),
                    BTreeMap::new(),
                )
                .unwrap();
                let u_ty = TypeExpr::base("U");
                let pu = TypeExpr::power(u_ty.clone());
                let union = colimit::union_term(
                    &u_ty,
                    Term::var("z1", pu.clone()),
                    Term::var("z2", pu.clone()),
                )
                .unwrap();
                let ctx = Context::new([
                    ("z1".to_string(), pu.clone()),
                    ("z2".to_string(), pu.clone()),
                ])
                .unwrap();
                let mor = crate::interp::interp_term(&ctx, &union, &env).unwrap();
                for (key, value) in mor.table() {
                    if let Label::Pair(l, r) = key {
                        if *value != colimit::label_union(l, r) {
                            return outcome(
                                "crucial-terms",
                                started,
                                false,
                                "union term disagrees with label union",
                            );
                        }
                    }
                }
                let push =
                    colimit::pushforward_term(&env.sig, "h", Term::var("z1", pu.clone())).unwrap();
                let ctx1 = Context::new([("z1".to_string(), pu.clone())]).unwrap();
                let mor2 = crate::interp::interp_term(&ctx1, &push, &env).unwrap();
                for (key, value) in mor2.table() {
                    if *value != colimit::label_pushforward(&h, key) {
                        return outcome(
                            "crucial-terms",
                            started,
                            false,
                            "pushforward term disagrees with label image",
                        );
                    }
                }
            }
        }
    }
    outcome("crucial-terms", started, true, "label semantics agree")
}

/// Transpose round trip on sampled tables.
pub fn transpose_suite(config: &SuiteConfig) -> SuiteOutcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let a = FinObj::numbered("a", 2);
    let b = FinObj::numbered("b", 2);
    let (prod, _, _) = finset::product(&a, &b);
    for _ in 0..100 {
        let table: BTreeMap<Label, Label> = prod
            .elements()
            .iter()
            .map(|l| (l.clone(), Label::Truth(rng.gen_bool(0.5))))
            .collect();
        let f = FinMor::new(prod.clone(), finset::omega(), table).unwrap();
        let t = finset::transpose(&f, &a, &b).unwrap();
        if finset::untranspose(&t, &a, &b).unwrap() != f {
            return outcome("transpose", started, false, "round trip failed");
        }
    }
    outcome("transpose", started, true, "100 sampled tables")
}
