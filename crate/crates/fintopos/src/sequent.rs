//! Sequents `p ⊢_Δ q`, explicit proof trees labeled by deduction rules, and a
//! node-by-node checker.
//!
//! Contexts are matched up to permutation when rule shapes are compared: the
//! substitution rule explicitly permits rearranging and extending contexts,
//! so insisting on a fixed order would only produce spurious rejections.

pub mod lemmas;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{
    alpha_eq_formula, alpha_eq_term, substitute_formula, Formula, Signature, Term, TypeError,
    TypeExpr, VarDecl,
};

/// An ordered sequence of typed variables with pairwise distinct names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    entries: Vec<VarDecl>,
}

impl Context {
    pub fn new(entries: impl IntoIterator<Item = VarDecl>) -> Result<Context, CheckError> {
        let entries: Vec<VarDecl> = entries.into_iter().collect();
        let mut names = BTreeSet::new();
        for (n, _) in &entries {
            if !names.insert(n.clone()) {
                return Err(CheckError::DuplicateContextName(n.clone()));
            }
        }
        Ok(Context { entries })
    }

    pub fn empty() -> Context {
        Context { entries: vec![] }
    }

    pub fn entries(&self) -> &[VarDecl] {
        &self.entries
    }

    pub fn as_set(&self) -> BTreeSet<VarDecl> {
        self.entries.iter().cloned().collect()
    }

    pub fn contains(&self, decl: &VarDecl) -> bool {
        self.entries.contains(decl)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == name)
    }

    /// Appends `decl` at the end.
    pub fn extended(&self, decl: VarDecl) -> Result<Context, CheckError> {
        let mut entries = self.entries.clone();
        entries.push(decl);
        Context::new(entries)
    }

    /// Drops `decl`, preserving the relative order of the rest.
    pub fn without(&self, decl: &VarDecl) -> Context {
        Context {
            entries: self
                .entries
                .iter()
                .filter(|e| *e != decl)
                .cloned()
                .collect(),
        }
    }

    /// Equality as sets of typed variables.
    pub fn permutation_eq(&self, other: &Context) -> bool {
        self.as_set() == other.as_set()
    }

    pub fn is_valid_for(&self, formulas: &[&Formula]) -> bool {
        let set = self.as_set();
        formulas.iter().all(|f| f.fv().is_subset(&set))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{t}")?;
        }
        Ok(())
    }
}

/// An entailment judgment `lhs ⊢_Δ rhs` with a context valid for both sides.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequent {
    pub context: Context,
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Sequent {
    pub fn new(context: Context, lhs: Formula, rhs: Formula) -> Result<Sequent, CheckError> {
        if !context.is_valid_for(&[&lhs, &rhs]) {
            return Err(CheckError::InvalidContext(format!(
                "free variables of `{lhs}` or `{rhs}` escape the context [{context}]"
            )));
        }
        Ok(Sequent { context, lhs, rhs })
    }

    /// α-equivalence of both sides plus context permutation equality.
    pub fn matches(&self, other: &Sequent) -> bool {
        self.context.permutation_eq(&other.context)
            && alpha_eq_formula(&self.lhs, &other.lhs)
            && alpha_eq_formula(&self.rhs, &other.rhs)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |-[{}] {}", self.lhs, self.context, self.rhs)
    }
}

/// Labels of the deduction rules: the structural and logical rules, plus the
/// derived member/countable-or/set-equality rules and registered derived
/// sequents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleId {
    Ax,
    Cut,
    Subst,
    TopR,
    BotL,
    AndI,
    AndEL,
    AndER,
    OrI,
    OrEL,
    OrER,
    ImpI,
    ImpE,
    ForallI,
    ForallE,
    ExistsI,
    ExistsE,
    EqI,
    EqE,
    Mem1,
    Mem2,
    BigOrI,
    BigOrE(usize),
    SetI,
    SetE,
    DerivedSequent(String),
}

impl RuleId {
    /// `None` means the arity is parameter-dependent.
    pub fn arity(&self) -> Option<usize> {
        match self {
            RuleId::Ax
            | RuleId::TopR
            | RuleId::BotL
            | RuleId::EqI
            | RuleId::EqE
            | RuleId::DerivedSequent(_) => Some(0),
            RuleId::Cut | RuleId::AndI | RuleId::OrI => Some(2),
            RuleId::BigOrI => None,
            _ => Some(1),
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::BigOrE(i) => write!(f, "bigor-e {i}"),
            RuleId::DerivedSequent(n) => write!(f, "derived {n}"),
            other => {
                let s = match other {
                    RuleId::Ax => "ax",
                    RuleId::Cut => "cut",
                    RuleId::Subst => "subst",
                    RuleId::TopR => "top-r",
                    RuleId::BotL => "bot-l",
                    RuleId::AndI => "and-i",
                    RuleId::AndEL => "and-el",
                    RuleId::AndER => "and-er",
                    RuleId::OrI => "or-i",
                    RuleId::OrEL => "or-el",
                    RuleId::OrER => "or-er",
                    RuleId::ImpI => "imp-i",
                    RuleId::ImpE => "imp-e",
                    RuleId::ForallI => "forall-i",
                    RuleId::ForallE => "forall-e",
                    RuleId::ExistsI => "exists-i",
                    RuleId::ExistsE => "exists-e",
                    RuleId::EqI => "eq-i",
                    RuleId::EqE => "eq-e",
                    RuleId::Mem1 => "mem-1",
                    RuleId::Mem2 => "mem-2",
                    RuleId::BigOrI => "bigor-i",
                    RuleId::SetI => "set-i",
                    RuleId::SetE => "set-e",
                    _ => unreachable!(),
                };
                write!(f, "{s}")
            }
        }
    }
}

/// Extra data some rules need beyond their premises.
#[derive(Clone, Debug, PartialEq)]
pub enum RuleParams {
    None,
    /// Simultaneous substitution bindings for the substitution rule.
    Subst(Vec<(VarDecl, Term)>),
    /// Variable pairs and the base formula for equality elimination.
    EqE {
        pairs: Vec<(VarDecl, VarDecl)>,
        base: Formula,
    },
    /// Stabilization certificate: the interpreter found the countable join
    /// stable at this index, and premises must cover indices `0..=stable_at`.
    BigOrCertificate {
        stable_at: usize,
    },
}

/// A derivation: a conclusion, the rule that produced it, and the premises.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofTree {
    pub conclusion: Sequent,
    pub rule: RuleId,
    pub params: RuleParams,
    pub premises: Vec<ProofTree>,
}

impl ProofTree {
    pub fn new(
        conclusion: Sequent,
        rule: RuleId,
        params: RuleParams,
        premises: Vec<ProofTree>,
    ) -> ProofTree {
        ProofTree {
            conclusion,
            rule,
            params,
            premises,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .premises
            .iter()
            .map(ProofTree::node_count)
            .sum::<usize>()
    }

    /// Every sequent appearing in the tree, conclusion first.
    pub fn sequents(&self) -> Vec<&Sequent> {
        let mut out = vec![&self.conclusion];
        for p in &self.premises {
            out.extend(p.sequents());
        }
        out
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CheckError {
    #[error("duplicate context variable {0}")]
    DuplicateContextName(String),
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("rule {rule} expects {expected} premises, found {found}")]
    WrongPremiseCount {
        rule: RuleId,
        expected: usize,
        found: usize,
    },
    #[error("rule {rule} does not match: {detail}")]
    Shape { rule: RuleId, detail: String },
    #[error("side condition violated for {rule}: {detail}")]
    SideCondition { rule: RuleId, detail: String },
    #[error("derived sequent {0} is not registered")]
    UnregisteredDerived(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Where in a tree a check failed: premise indices from the root.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeError {
    pub path: Vec<usize>,
    pub error: CheckError,
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at node {:?}: {}", self.path, self.error)
    }
}

/// Derived sequents validated semantically and admitted as leaves.
#[derive(Clone, Debug, Default)]
pub struct DerivedRuleRegistry {
    sequents: BTreeMap<String, Vec<Sequent>>,
}

impl DerivedRuleRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: impl Into<String>, sequent: Sequent) {
        self.sequents.entry(name.into()).or_default().push(sequent);
    }

    pub fn lookup(&self, name: &str, conclusion: &Sequent) -> bool {
        self.sequents
            .get(name)
            .map(|seqs| seqs.iter().any(|s| s.matches(conclusion)))
            .unwrap_or(false)
    }

    pub fn names(&self) -> Vec<&str> {
        self.sequents.keys().map(String::as_str).collect()
    }
}

/// The proof checker: a signature for well-formedness plus the registry of
/// validated derived sequents.
pub struct Checker<'a> {
    pub sig: &'a Signature,
    pub registry: &'a DerivedRuleRegistry,
}

fn shape(rule: &RuleId, detail: impl Into<String>) -> CheckError {
    CheckError::Shape {
        rule: rule.clone(),
        detail: detail.into(),
    }
}

fn side(rule: &RuleId, detail: impl Into<String>) -> CheckError {
    CheckError::SideCondition {
        rule: rule.clone(),
        detail: detail.into(),
    }
}

impl<'a> Checker<'a> {
    pub fn new(sig: &'a Signature, registry: &'a DerivedRuleRegistry) -> Self {
        Checker { sig, registry }
    }

    fn validate_sequent(&self, s: &Sequent) -> Result<(), CheckError> {
        s.lhs.check(self.sig)?;
        s.rhs.check(self.sig)?;
        if !s.context.is_valid_for(&[&s.lhs, &s.rhs]) {
            return Err(CheckError::InvalidContext(format!("{s}")));
        }
        Ok(())
    }

    /// Accepts iff the conclusion follows from the premises by exactly the
    /// named rule with the given parameters.
    pub fn check_node(&self, node: &ProofTree) -> Result<(), CheckError> {
        self.validate_sequent(&node.conclusion)?;
        for p in &node.premises {
            self.validate_sequent(&p.conclusion)?;
        }
        if let Some(expected) = node.rule.arity() {
            if node.premises.len() != expected {
                return Err(CheckError::WrongPremiseCount {
                    rule: node.rule.clone(),
                    expected,
                    found: node.premises.len(),
                });
            }
        }
        let c = &node.conclusion;
        let rule = &node.rule;
        let prem = |i: usize| &node.premises[i].conclusion;
        let same_ctx = |s: &Sequent| -> Result<(), CheckError> {
            if !s.context.permutation_eq(&c.context) {
                return Err(shape(
                    rule,
                    "premise context differs from conclusion context",
                ));
            }
            Ok(())
        };
        match rule {
            RuleId::Ax => {
                if !alpha_eq_formula(&c.lhs, &c.rhs) {
                    return Err(shape(rule, "axiom requires identical sides"));
                }
            }
            RuleId::Cut => {
                let (s1, s2) = (prem(0), prem(1));
                same_ctx(s1)?;
                same_ctx(s2)?;
                if !alpha_eq_formula(&s1.rhs, &s2.lhs) {
                    return Err(shape(rule, "cut formulas disagree"));
                }
                if !alpha_eq_formula(&c.lhs, &s1.lhs) || !alpha_eq_formula(&c.rhs, &s2.rhs) {
                    return Err(shape(rule, "conclusion does not splice the premises"));
                }
            }
            RuleId::Subst => {
                let bindings = match &node.params {
                    RuleParams::Subst(b) => b,
                    _ => return Err(shape(rule, "missing substitution bindings")),
                };
                let mut names = BTreeSet::new();
                for ((n, _), t) in bindings {
                    if !names.insert(n.clone()) {
                        return Err(side(rule, format!("variable {n} bound twice")));
                    }
                    t.check_type(self.sig)?;
                    if !t.fv().is_subset(&c.context.as_set()) {
                        return Err(side(
                            rule,
                            format!("substituted term `{t}` has free variables outside the target context"),
                        ));
                    }
                }
                let s = prem(0);
                let substituted: BTreeSet<&str> =
                    bindings.iter().map(|((n, _), _)| n.as_str()).collect();
                for (n, t) in s.context.entries() {
                    if !substituted.contains(n.as_str())
                        && !c.context.contains(&(n.clone(), t.clone()))
                    {
                        return Err(side(
                            rule,
                            format!("context variable {n} neither substituted nor kept"),
                        ));
                    }
                }
                let lhs = substitute_formula(&s.lhs, bindings)?;
                let rhs = substitute_formula(&s.rhs, bindings)?;
                if !alpha_eq_formula(&c.lhs, &lhs) || !alpha_eq_formula(&c.rhs, &rhs) {
                    return Err(shape(rule, "conclusion is not the substituted premise"));
                }
            }
            RuleId::TopR => {
                if c.rhs != Formula::Top {
                    return Err(shape(rule, "right side must be the true formula"));
                }
            }
            RuleId::BotL => {
                if c.lhs != Formula::Bot {
                    return Err(shape(rule, "left side must be the false formula"));
                }
            }
            RuleId::AndI => {
                let (s1, s2) = (prem(0), prem(1));
                same_ctx(s1)?;
                same_ctx(s2)?;
                if !alpha_eq_formula(&s1.lhs, &c.lhs) || !alpha_eq_formula(&s2.lhs, &c.lhs) {
                    return Err(shape(
                        rule,
                        "premises must share the conclusion's left side",
                    ));
                }
                match &c.rhs {
                    Formula::And(p, q)
                        if alpha_eq_formula(p, &s1.rhs) && alpha_eq_formula(q, &s2.rhs) => {}
                    _ => return Err(shape(rule, "conclusion right side is not the conjunction")),
                }
            }
            RuleId::AndEL | RuleId::AndER => {
                let s = prem(0);
                same_ctx(s)?;
                if !alpha_eq_formula(&s.lhs, &c.lhs) {
                    return Err(shape(rule, "left sides differ"));
                }
                match &s.rhs {
                    Formula::And(p, q) => {
                        let kept = if *rule == RuleId::AndEL { p } else { q };
                        if !alpha_eq_formula(kept, &c.rhs) {
                            return Err(shape(rule, "conclusion is not the kept conjunct"));
                        }
                    }
                    _ => return Err(shape(rule, "premise right side is not a conjunction")),
                }
            }
            RuleId::OrI => {
                let (s1, s2) = (prem(0), prem(1));
                same_ctx(s1)?;
                same_ctx(s2)?;
                if !alpha_eq_formula(&s1.rhs, &c.rhs) || !alpha_eq_formula(&s2.rhs, &c.rhs) {
                    return Err(shape(
                        rule,
                        "premises must share the conclusion's right side",
                    ));
                }
                match &c.lhs {
                    Formula::Or(p, q)
                        if alpha_eq_formula(p, &s1.lhs) && alpha_eq_formula(q, &s2.lhs) => {}
                    _ => return Err(shape(rule, "conclusion left side is not the disjunction")),
                }
            }
            RuleId::OrEL | RuleId::OrER => {
                let s = prem(0);
                same_ctx(s)?;
                if !alpha_eq_formula(&s.rhs, &c.rhs) {
                    return Err(shape(rule, "right sides differ"));
                }
                match &s.lhs {
                    Formula::Or(p, q) => {
                        let kept = if *rule == RuleId::OrEL { p } else { q };
                        if !alpha_eq_formula(kept, &c.lhs) {
                            return Err(shape(rule, "conclusion is not the kept disjunct"));
                        }
                    }
                    _ => return Err(shape(rule, "premise left side is not a disjunction")),
                }
            }
            RuleId::ImpI => {
                let s = prem(0);
                same_ctx(s)?;
                match (&s.lhs, &c.rhs) {
                    (Formula::And(p, q), Formula::Implies(q2, r2))
                        if alpha_eq_formula(p, &c.lhs)
                            && alpha_eq_formula(q, q2)
                            && alpha_eq_formula(&s.rhs, r2) => {}
                    _ => return Err(shape(rule, "not an implication introduction instance")),
                }
            }
            RuleId::ImpE => {
                let s = prem(0);
                same_ctx(s)?;
                match (&s.rhs, &c.lhs) {
                    (Formula::Implies(q, r), Formula::And(p2, q2))
                        if alpha_eq_formula(&s.lhs, p2)
                            && alpha_eq_formula(q, q2)
                            && alpha_eq_formula(r, &c.rhs) => {}
                    _ => return Err(shape(rule, "not an implication elimination instance")),
                }
            }
            RuleId::ForallI => {
                let s = prem(0);
                let (y, ty) = context_extension(&s.context, &c.context, rule)?;
                if !alpha_eq_formula(&s.lhs, &c.lhs) {
                    return Err(shape(rule, "left sides differ"));
                }
                let wrapped = Formula::forall(y, ty, s.rhs.clone());
                if !alpha_eq_formula(&wrapped, &c.rhs) {
                    return Err(shape(rule, "conclusion is not the quantified premise"));
                }
            }
            RuleId::ForallE => {
                let s = prem(0);
                let (y, ty) = context_extension(&c.context, &s.context, rule)?;
                if !alpha_eq_formula(&s.lhs, &c.lhs) {
                    return Err(shape(rule, "left sides differ"));
                }
                let wrapped = Formula::forall(y, ty, c.rhs.clone());
                if !alpha_eq_formula(&wrapped, &s.rhs) {
                    return Err(shape(rule, "premise is not the quantified conclusion"));
                }
            }
            RuleId::ExistsI => {
                let s = prem(0);
                let (y, ty) = context_extension(&s.context, &c.context, rule)?;
                if !alpha_eq_formula(&s.rhs, &c.rhs) {
                    return Err(shape(rule, "right sides differ"));
                }
                let wrapped = Formula::exists(y, ty, s.lhs.clone());
                if !alpha_eq_formula(&wrapped, &c.lhs) {
                    return Err(shape(rule, "conclusion is not the quantified premise"));
                }
            }
            RuleId::ExistsE => {
                let s = prem(0);
                let (y, ty) = context_extension(&c.context, &s.context, rule)?;
                if !alpha_eq_formula(&s.rhs, &c.rhs) {
                    return Err(shape(rule, "right sides differ"));
                }
                let wrapped = Formula::exists(y, ty, c.lhs.clone());
                if !alpha_eq_formula(&wrapped, &s.lhs) {
                    return Err(shape(rule, "premise is not the quantified conclusion"));
                }
            }
            RuleId::EqI => {
                if c.lhs != Formula::Top {
                    return Err(shape(rule, "left side must be the true formula"));
                }
                match &c.rhs {
                    Formula::Eq(t, s) if alpha_eq_term(t, s) => {}
                    _ => return Err(shape(rule, "right side must be a reflexive equality")),
                }
            }
            RuleId::EqE => {
                let (pairs, base) = match &node.params {
                    RuleParams::EqE { pairs, base } => (pairs, base),
                    _ => return Err(shape(rule, "missing equality elimination parameters")),
                };
                if pairs.is_empty() {
                    return Err(shape(rule, "at least one variable pair required"));
                }
                let mut sources = BTreeSet::new();
                for ((xn, _), _) in pairs {
                    if !sources.insert(xn.clone()) {
                        return Err(side(rule, format!("source variable {xn} repeated")));
                    }
                }
                let mut conjuncts = Vec::new();
                for ((xn, xt), (yn, yt)) in pairs {
                    if xt != yt {
                        return Err(side(rule, "paired variables must share a type"));
                    }
                    conjuncts.push(Formula::Eq(
                        Term::var(xn.clone(), xt.clone()),
                        Term::var(yn.clone(), yt.clone()),
                    ));
                }
                conjuncts.push(base.clone());
                let expected_lhs = Formula::and_all(conjuncts).expect("nonempty");
                if !alpha_eq_formula(&c.lhs, &expected_lhs) {
                    return Err(shape(rule, "left side is not the equality prefix"));
                }
                let bindings: Vec<(VarDecl, Term)> = pairs
                    .iter()
                    .map(|(x, (yn, yt))| (x.clone(), Term::var(yn.clone(), yt.clone())))
                    .collect();
                let expected_rhs = substitute_formula(base, &bindings)?;
                if !alpha_eq_formula(&c.rhs, &expected_rhs) {
                    return Err(shape(
                        rule,
                        "right side is not the substituted base formula",
                    ));
                }
            }
            RuleId::Mem1 => {
                let s = prem(0);
                same_ctx(s)?;
                if !alpha_eq_formula(&s.lhs, &c.lhs) {
                    return Err(shape(rule, "left sides differ"));
                }
                let expected = member_unfold(&s.rhs, rule)?;
                if !alpha_eq_formula(&c.rhs, &expected) {
                    return Err(shape(rule, "conclusion is not the unfolded membership"));
                }
            }
            RuleId::Mem2 => {
                let s = prem(0);
                same_ctx(s)?;
                if !alpha_eq_formula(&s.lhs, &c.lhs) {
                    return Err(shape(rule, "left sides differ"));
                }
                let expected = member_unfold(&c.rhs, rule)?;
                if !alpha_eq_formula(&s.rhs, &expected) {
                    return Err(shape(rule, "premise is not the unfolded membership"));
                }
            }
            RuleId::BigOrE(i) => {
                let s = prem(0);
                same_ctx(s)?;
                if !alpha_eq_formula(&s.rhs, &c.rhs) {
                    return Err(shape(rule, "right sides differ"));
                }
                match &s.lhs {
                    Formula::CountableOr(fam) => {
                        if !alpha_eq_formula(&c.lhs, &fam.member(*i)) {
                            return Err(shape(rule, format!("conclusion is not member {i}")));
                        }
                    }
                    _ => return Err(shape(rule, "premise left side is not a countable or")),
                }
            }
            RuleId::BigOrI => {
                let stable_at = match &node.params {
                    RuleParams::BigOrCertificate { stable_at } => *stable_at,
                    _ => return Err(shape(rule, "missing stabilization certificate")),
                };
                let fam = match &c.lhs {
                    Formula::CountableOr(fam) => fam,
                    _ => return Err(shape(rule, "conclusion left side is not a countable or")),
                };
                if fam.stability_window.is_none() {
                    return Err(side(
                        rule,
                        "family declares no stability window; the certificate cannot close the join",
                    ));
                }
                if node.premises.len() != stable_at + 1 {
                    return Err(CheckError::WrongPremiseCount {
                        rule: rule.clone(),
                        expected: stable_at + 1,
                        found: node.premises.len(),
                    });
                }
                for (i, premise) in node.premises.iter().enumerate() {
                    let s = &premise.conclusion;
                    same_ctx(s)?;
                    if !alpha_eq_formula(&s.rhs, &c.rhs) {
                        return Err(shape(rule, format!("premise {i} right side differs")));
                    }
                    if !alpha_eq_formula(&s.lhs, &fam.member(i)) {
                        return Err(shape(rule, format!("premise {i} is not member {i}")));
                    }
                }
            }
            RuleId::SetE => {
                let s = prem(0);
                if s.lhs != Formula::Top || c.lhs != Formula::Top {
                    return Err(shape(rule, "both sides use an empty assumption"));
                }
                let (y, yt) = context_extension(&c.context, &s.context, rule)?;
                let (p, q) = comprehension_eq_split(&s.rhs, rule)?;
                let (xa, ta, body_p) = p;
                let (xb, tb, body_q) = q;
                if ta != yt || tb != yt {
                    return Err(shape(rule, "bound type differs from the new context entry"));
                }
                let pv = substitute_formula(
                    &body_p,
                    &[((xa, ta.clone()), Term::var(y.clone(), yt.clone()))],
                )?;
                let qv =
                    substitute_formula(&body_q, &[((xb, tb), Term::var(y.clone(), yt.clone()))])?;
                let expected = Formula::iff(pv, qv);
                if !alpha_eq_formula(&c.rhs, &expected) {
                    return Err(shape(rule, "conclusion is not the pointwise equivalence"));
                }
            }
            RuleId::SetI => {
                let s = prem(0);
                if s.lhs != Formula::Top || c.lhs != Formula::Top {
                    return Err(shape(rule, "both sides use an empty assumption"));
                }
                let (y, yt) = context_extension(&s.context, &c.context, rule)?;
                let (p, q) = comprehension_eq_split(&c.rhs, rule)?;
                let (xa, ta, body_p) = p;
                let (xb, tb, body_q) = q;
                if ta != yt || tb != yt {
                    return Err(shape(
                        rule,
                        "bound type differs from the dropped context entry",
                    ));
                }
                let pv = substitute_formula(
                    &body_p,
                    &[((xa, ta.clone()), Term::var(y.clone(), yt.clone()))],
                )?;
                let qv =
                    substitute_formula(&body_q, &[((xb, tb), Term::var(y.clone(), yt.clone()))])?;
                let expected = Formula::iff(pv, qv);
                if !alpha_eq_formula(&s.rhs, &expected) {
                    return Err(shape(rule, "premise is not the pointwise equivalence"));
                }
            }
            RuleId::DerivedSequent(name) => {
                if !self.registry.lookup(name, c) {
                    return Err(CheckError::UnregisteredDerived(name.clone()));
                }
            }
        }
        Ok(())
    }

    /// Accepts iff every node accepts; reports the deepest-first failure.
    pub fn check_tree(&self, tree: &ProofTree) -> Result<(), TreeError> {
        for (i, premise) in tree.premises.iter().enumerate() {
            if let Err(mut e) = self.check_tree(premise) {
                e.path.insert(0, i);
                return Err(e);
            }
        }
        self.check_node(tree).map_err(|error| TreeError {
            path: vec![],
            error,
        })
    }
}

/// `larger` must equal `smaller` plus exactly one extra typed variable, which
/// is returned.
fn context_extension(
    larger: &Context,
    smaller: &Context,
    rule: &RuleId,
) -> Result<VarDecl, CheckError> {
    let big = larger.as_set();
    let small = smaller.as_set();
    if !small.is_subset(&big) {
        return Err(shape(
            rule,
            "smaller context is not contained in the larger",
        ));
    }
    let extra: Vec<VarDecl> = big.difference(&small).cloned().collect();
    match extra.as_slice() {
        [decl] => Ok(decl.clone()),
        _ => Err(shape(
            rule,
            format!(
                "expected exactly one extra context variable, found {}",
                extra.len()
            ),
        )),
    }
}

/// Splits `t ∈ {b:B | q}` into the substituted body `q[b:=t]`.
fn member_unfold(f: &Formula, rule: &RuleId) -> Result<Formula, CheckError> {
    match f {
        Formula::Member(t, container) => match &container.kind {
            crate::syntax::TermKind::Comprehension(b, b_ty, body) => Ok(substitute_formula(
                body,
                &[((b.clone(), b_ty.clone()), t.clone())],
            )?),
            _ => Err(shape(rule, "membership container is not a comprehension")),
        },
        _ => Err(shape(rule, "formula is not a membership")),
    }
}

type CompSplit = (String, TypeExpr, Formula);

/// Splits `{a:A | p} = {a:A | q}` into its two comprehensions.
fn comprehension_eq_split(
    f: &Formula,
    rule: &RuleId,
) -> Result<(CompSplit, CompSplit), CheckError> {
    match f {
        Formula::Eq(l, r) => {
            let split = |t: &Term| -> Result<CompSplit, CheckError> {
                match &t.kind {
                    crate::syntax::TermKind::Comprehension(x, ty, body) => {
                        Ok((x.clone(), ty.clone(), (**body).clone()))
                    }
                    _ => Err(shape(rule, "equality side is not a comprehension")),
                }
            };
            Ok((split(l)?, split(r)?))
        }
        _ => Err(shape(rule, "formula is not an equality of comprehensions")),
    }
}

#[cfg(test)]
mod tests {
    use super::lemmas::{builders as b, standard_signature};
    use super::*;
    use crate::syntax::FormulaFamily;

    fn sig() -> Signature {
        standard_signature()
    }

    fn a() -> TypeExpr {
        TypeExpr::base("A")
    }

    fn ctx_x() -> Context {
        Context::new([("x".to_string(), a())]).unwrap()
    }

    fn p() -> Formula {
        Formula::Rel("P".into(), Term::var("x", a()))
    }

    fn q() -> Formula {
        Formula::Rel("Q".into(), Term::var("x", a()))
    }

    fn r() -> Formula {
        Formula::Rel("R".into(), Term::var("x", a()))
    }

    fn checker_ok(tree: &ProofTree) -> Result<(), TreeError> {
        let sig = sig();
        let registry = DerivedRuleRegistry::new();
        Checker::new(&sig, &registry).check_tree(tree)
    }

    #[test]
    fn axiom_accepts_identical_sides() {
        let tree = b::ax(ctx_x(), p());
        checker_ok(&tree).unwrap();
    }

    #[test]
    fn axiom_rejects_different_sides() {
        let seq = Sequent::new(ctx_x(), p(), q()).unwrap();
        let tree = ProofTree::new(seq, RuleId::Ax, RuleParams::None, vec![]);
        assert!(checker_ok(&tree).is_err());
    }

    #[test]
    fn cut_accepts_spliced_premises() {
        let t1 = b::ax(ctx_x(), p());
        let t2 = b::ax(ctx_x(), p());
        let tree = b::cut(t1, t2);
        checker_ok(&tree).unwrap();
    }

    #[test]
    fn and_i_wrong_arity_rejected() {
        let seq = Sequent::new(ctx_x(), r(), Formula::and(p(), q())).unwrap();
        let tree = ProofTree::new(
            seq,
            RuleId::AndI,
            RuleParams::None,
            vec![b::ax(ctx_x(), r())],
        );
        let err = checker_ok(&tree).unwrap_err();
        assert!(matches!(err.error, CheckError::WrongPremiseCount { .. }));
    }

    #[test]
    fn forall_e_with_wrong_bound_variable_rejected() {
        // premise: p ⊢ ∀y:A, Q(y); bad conclusion: p ⊢_{x… ,z} Q(x)
        let forall = Formula::forall("y", a(), Formula::Rel("Q".into(), Term::var("y", a())));
        let prem = Sequent::new(ctx_x(), p(), forall).unwrap();
        let prem_tree = ProofTree::new(prem, RuleId::Ax, RuleParams::None, vec![]);
        let concl_ctx = ctx_x().extended(("z".to_string(), a())).unwrap();
        let concl = Sequent::new(concl_ctx, p(), q()).unwrap(); // Q(x), not Q(z)
        let tree = ProofTree::new(concl, RuleId::ForallE, RuleParams::None, vec![prem_tree]);
        let err = checker_ok(&tree).unwrap_err();
        assert!(matches!(err.error, CheckError::Shape { .. }));
    }

    #[test]
    fn subst_identity_requires_alpha_equal_sequents() {
        let prem = b::ax(ctx_x(), p());
        let good = b::subst(&prem, vec![], ctx_x());
        checker_ok(&good).unwrap();

        let bad_concl = Sequent::new(ctx_x(), p(), q()).unwrap();
        let bad = ProofTree::new(
            bad_concl,
            RuleId::Subst,
            RuleParams::Subst(vec![]),
            vec![prem],
        );
        assert!(checker_ok(&bad).is_err());
    }

    #[test]
    fn subst_may_extend_and_permute_contexts() {
        let prem = b::ax(ctx_x(), p());
        let bigger = Context::new([("y".to_string(), a()), ("x".to_string(), a())]).unwrap();
        let tree = b::subst(&prem, vec![], bigger);
        checker_ok(&tree).unwrap();
    }

    #[test]
    fn bigor_round_trip_on_constant_family() {
        let fam = FormulaFamily::constant("const-p", p());
        let cor = Formula::CountableOr(fam);
        let seq = Sequent::new(ctx_x(), cor.clone(), q()).unwrap();
        let hypothetical = ProofTree::new(
            seq,
            RuleId::DerivedSequent("h".into()),
            RuleParams::None,
            vec![],
        );
        // BigOrE(0) then BigOrI with certificate 0 reproduces the sequent.
        let e = b::bigor_e(&hypothetical, 0);
        assert!(alpha_eq_formula(&e.conclusion.lhs, &p()));
        let i = b::bigor_i(vec![e.clone()], cor, 0);
        assert!(alpha_eq_formula(
            &i.conclusion.lhs,
            &Formula::CountableOr(FormulaFamily::constant("const-p", p()))
        ));
        // node-level checks (the hypothetical leaf is not registered, so only
        // check the two new nodes)
        let sig = sig();
        let registry = DerivedRuleRegistry::new();
        let ck = Checker::new(&sig, &registry);
        ck.check_node(&e).unwrap();
        ck.check_node(&i).unwrap();
    }

    #[test]
    fn derived_sequent_requires_registration() {
        let seq = Sequent::new(ctx_x(), Formula::Top, Formula::Top).unwrap();
        let tree = ProofTree::new(
            seq.clone(),
            RuleId::DerivedSequent("fact".into()),
            RuleParams::None,
            vec![],
        );
        assert!(checker_ok(&tree).is_err());
        let sig = sig();
        let mut registry = DerivedRuleRegistry::new();
        registry.register("fact", seq);
        assert!(Checker::new(&sig, &registry).check_tree(&tree).is_ok());
    }

    #[test]
    fn mem_rules_unfold_membership() {
        // premise p ⊢ x ∈ {b:A | Q(b)}  ⇝  conclusion p ⊢ Q(x)
        let comp = Term::comprehension("b", a(), Formula::Rel("Q".into(), Term::var("b", a())));
        let member = Formula::member(Term::var("x", a()), comp).unwrap();
        let premise = ProofTree::new(
            Sequent::new(ctx_x(), p(), member.clone()).unwrap(),
            RuleId::DerivedSequent("h".into()),
            RuleParams::None,
            vec![],
        );
        let good = ProofTree::new(
            Sequent::new(ctx_x(), p(), q()).unwrap(),
            RuleId::Mem1,
            RuleParams::None,
            vec![premise.clone()],
        );
        let sig = sig();
        let registry = DerivedRuleRegistry::new();
        let ck = Checker::new(&sig, &registry);
        ck.check_node(&good).unwrap();
        // the reverse direction
        let back = ProofTree::new(
            Sequent::new(ctx_x(), p(), member).unwrap(),
            RuleId::Mem2,
            RuleParams::None,
            vec![ProofTree::new(
                Sequent::new(ctx_x(), p(), q()).unwrap(),
                RuleId::DerivedSequent("h".into()),
                RuleParams::None,
                vec![],
            )],
        );
        ck.check_node(&back).unwrap();
        // wrong unfolding rejected
        let bad = ProofTree::new(
            Sequent::new(ctx_x(), p(), r()).unwrap(),
            RuleId::Mem1,
            RuleParams::None,
            vec![premise],
        );
        assert!(ck.check_node(&bad).is_err());
    }

    #[test]
    fn set_rules_relate_equality_and_equivalence() {
        // ⊢ {b|Q(b)} = {c|Q(c)}  ⇝  ⊢_{…,w:A} Q(w) ⇔ Q(w)
        let left = Term::comprehension("b", a(), Formula::Rel("Q".into(), Term::var("b", a())));
        let right = Term::comprehension("c", a(), Formula::Rel("Q".into(), Term::var("c", a())));
        let eq = Formula::eq(left, right).unwrap();
        let eq_seq = Sequent::new(ctx_x(), Formula::Top, eq).unwrap();
        let wide = ctx_x().extended(("w".to_string(), a())).unwrap();
        let qw = Formula::Rel("Q".into(), Term::var("w", a()));
        let iff_seq = Sequent::new(wide, Formula::Top, Formula::iff(qw.clone(), qw)).unwrap();
        let sig = sig();
        let registry = DerivedRuleRegistry::new();
        let ck = Checker::new(&sig, &registry);
        let hyp = |s: &Sequent| {
            ProofTree::new(
                s.clone(),
                RuleId::DerivedSequent("h".into()),
                RuleParams::None,
                vec![],
            )
        };
        let sete = ProofTree::new(
            iff_seq.clone(),
            RuleId::SetE,
            RuleParams::None,
            vec![hyp(&eq_seq)],
        );
        ck.check_node(&sete).unwrap();
        let seti = ProofTree::new(eq_seq, RuleId::SetI, RuleParams::None, vec![hyp(&iff_seq)]);
        ck.check_node(&seti).unwrap();
    }

    #[test]
    fn eq_elimination_substitutes_simultaneously() {
        // x=y ∧ P(x) ⊢ P(y) with the pair (x, y)
        let ctx = Context::new([("x".to_string(), a()), ("y".to_string(), a())]).unwrap();
        let node = b::eq_e(
            ctx,
            vec![(("x".to_string(), a()), ("y".to_string(), a()))],
            p(),
        );
        assert!(alpha_eq_formula(
            &node.conclusion.rhs,
            &Formula::Rel("P".into(), Term::var("y", a()))
        ));
        let sig = sig();
        let registry = DerivedRuleRegistry::new();
        Checker::new(&sig, &registry).check_node(&node).unwrap();
    }

    #[test]
    fn subst_rejects_terms_escaping_the_target_context() {
        let prem = b::ax(ctx_x(), p());
        // binds x to a variable that is not in the conclusion context
        let node = ProofTree::new(
            Sequent::new(
                Context::new([("y".to_string(), a())]).unwrap(),
                Formula::Rel("P".into(), Term::var("y", a())),
                Formula::Rel("P".into(), Term::var("y", a())),
            )
            .unwrap(),
            RuleId::Subst,
            RuleParams::Subst(vec![(("x".to_string(), a()), Term::var("w", a()))]),
            vec![prem],
        );
        let sig = sig();
        let registry = DerivedRuleRegistry::new();
        let err = Checker::new(&sig, &registry).check_node(&node).unwrap_err();
        assert!(matches!(err, CheckError::SideCondition { .. }));
    }

    #[test]
    fn failure_path_points_at_deepest_bad_node() {
        let bad_leaf = ProofTree::new(
            Sequent::new(ctx_x(), p(), q()).unwrap(),
            RuleId::Ax,
            RuleParams::None,
            vec![],
        );
        let good_leaf = b::ax(ctx_x(), p());
        let cut = b::cut(good_leaf, bad_leaf);
        let err = checker_ok(&cut).unwrap_err();
        assert_eq!(err.path, vec![1]);
    }
}
