//! Syntax of the internal language: types, terms, formulas, free variables,
//! α-equivalence and capture-avoiding simultaneous substitution.
//!
//! Terms carry their type at construction time, so nothing downstream has to
//! re-infer. The only binders are the quantifiers and set comprehension.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Types of the internal language: base types plus `Unit` (𝟙), `Omega` (Ω),
/// products and power types.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    Base(String),
    Unit,
    Omega,
    Product(Box<TypeExpr>, Box<TypeExpr>),
    Power(Box<TypeExpr>),
}

impl TypeExpr {
    pub fn base(name: impl Into<String>) -> Self {
        TypeExpr::Base(name.into())
    }

    pub fn product(left: TypeExpr, right: TypeExpr) -> Self {
        TypeExpr::Product(Box::new(left), Box::new(right))
    }

    pub fn power(inner: TypeExpr) -> Self {
        TypeExpr::Power(Box::new(inner))
    }

    /// Left-associated product of a non-empty list, the bracketing used for
    /// context carriers and coproduct ambients.
    pub fn product_left(factors: &[TypeExpr]) -> Option<TypeExpr> {
        let mut it = factors.iter().cloned();
        let first = it.next()?;
        Some(it.fold(first, TypeExpr::product))
    }

    /// True when the type only mentions base types declared in `sig`.
    pub fn declared_in(&self, sig: &Signature) -> bool {
        match self {
            TypeExpr::Base(n) => sig.base_types.contains(n),
            TypeExpr::Unit | TypeExpr::Omega => true,
            TypeExpr::Product(l, r) => l.declared_in(sig) && r.declared_in(sig),
            TypeExpr::Power(t) => t.declared_in(sig),
        }
    }
}

// Display forms double as the surface syntax, so parse ∘ print is identity.
impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Base(n) => write!(f, "{n}"),
            TypeExpr::Unit => write!(f, "unit"),
            TypeExpr::Omega => write!(f, "omega"),
            TypeExpr::Product(l, r) => write!(f, "(prod {l} {r})"),
            TypeExpr::Power(t) => write!(f, "(pow {t})"),
        }
    }
}

/// Declared base types, function symbols and relation symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub base_types: BTreeSet<String>,
    pub functions: std::collections::BTreeMap<String, (TypeExpr, TypeExpr)>,
    pub relations: std::collections::BTreeMap<String, TypeExpr>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn with_base(mut self, name: impl Into<String>) -> Self {
        self.base_types.insert(name.into());
        self
    }

    pub fn with_function(mut self, name: impl Into<String>, dom: TypeExpr, cod: TypeExpr) -> Self {
        self.functions.insert(name.into(), (dom, cod));
        self
    }

    pub fn with_relation(mut self, name: impl Into<String>, carrier: TypeExpr) -> Self {
        self.relations.insert(name.into(), carrier);
        self
    }

    /// Every type mentioned by a symbol must be built over the declared bases.
    pub fn validate(&self) -> Result<(), TypeError> {
        for (name, (dom, cod)) in &self.functions {
            if !dom.declared_in(self) || !cod.declared_in(self) {
                return Err(TypeError::UndeclaredBase {
                    context: format!("function symbol {name}"),
                });
            }
        }
        for (name, carrier) in &self.relations {
            if !carrier.declared_in(self) {
                return Err(TypeError::UndeclaredBase {
                    context: format!("relation symbol {name}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown function symbol {0}")]
    UnknownFunction(String),
    #[error("unknown relation symbol {0}")]
    UnknownRelation(String),
    #[error("type mentions an undeclared base type ({context})")]
    UndeclaredBase { context: String },
    #[error("fst/snd applied to non-product type {0}")]
    NotAProduct(TypeExpr),
    #[error("function {name} expects {expected}, got {actual}")]
    DomainMismatch {
        name: String,
        expected: TypeExpr,
        actual: TypeExpr,
    },
    #[error("relation {name} has carrier {expected}, got {actual}")]
    CarrierMismatch {
        name: String,
        expected: TypeExpr,
        actual: TypeExpr,
    },
    #[error("equality between distinct types {0} and {1}")]
    EqTypeMismatch(TypeExpr, TypeExpr),
    #[error("membership t : {0} against container of type {1} (expected P{0})")]
    MemberTypeMismatch(TypeExpr, TypeExpr),
    #[error("term carries cached type {cached} but formation rules give {derived}")]
    CachedTypeMismatch { cached: TypeExpr, derived: TypeExpr },
    #[error("substitution binds {var} : {var_ty} to a term of type {term_ty}")]
    BindingTypeMismatch {
        var: String,
        var_ty: TypeExpr,
        term_ty: TypeExpr,
    },
    #[error("countable-or member {index} has free variables outside the declared bound")]
    FamilyFvBound { index: usize },
}

/// A variable paired with its type. Context entries and substitution keys.
pub type VarDecl = (String, TypeExpr);

#[derive(Clone, Debug, PartialEq)]
pub enum TermKind {
    Var(String),
    Star,
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    App(String, Box<Term>),
    Comprehension(String, TypeExpr, Box<Formula>),
}

/// A preterm together with its derived type. Built through the checking
/// constructors, so a `Term` in hand is well-typed.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub kind: TermKind,
    pub ty: TypeExpr,
}

impl Term {
    pub fn var(name: impl Into<String>, ty: TypeExpr) -> Term {
        Term {
            kind: TermKind::Var(name.into()),
            ty,
        }
    }

    pub fn star() -> Term {
        Term {
            kind: TermKind::Star,
            ty: TypeExpr::Unit,
        }
    }

    pub fn pair(left: Term, right: Term) -> Term {
        let ty = TypeExpr::product(left.ty.clone(), right.ty.clone());
        Term {
            kind: TermKind::Pair(Box::new(left), Box::new(right)),
            ty,
        }
    }

    /// Left-associated tuple ⟨⟨t₁,t₂⟩,…,tₙ⟩; a single term is returned as is.
    pub fn tuple_left(terms: Vec<Term>) -> Option<Term> {
        let mut it = terms.into_iter();
        let first = it.next()?;
        Some(it.fold(first, Term::pair))
    }

    pub fn fst(t: Term) -> Result<Term, TypeError> {
        match &t.ty {
            TypeExpr::Product(l, _) => {
                let ty = (**l).clone();
                Ok(Term {
                    kind: TermKind::Fst(Box::new(t)),
                    ty,
                })
            }
            other => Err(TypeError::NotAProduct(other.clone())),
        }
    }

    pub fn snd(t: Term) -> Result<Term, TypeError> {
        match &t.ty {
            TypeExpr::Product(_, r) => {
                let ty = (**r).clone();
                Ok(Term {
                    kind: TermKind::Snd(Box::new(t)),
                    ty,
                })
            }
            other => Err(TypeError::NotAProduct(other.clone())),
        }
    }

    pub fn app(sig: &Signature, name: impl Into<String>, arg: Term) -> Result<Term, TypeError> {
        let name = name.into();
        let (dom, cod) = sig
            .functions
            .get(&name)
            .ok_or_else(|| TypeError::UnknownFunction(name.clone()))?;
        if *dom != arg.ty {
            return Err(TypeError::DomainMismatch {
                name,
                expected: dom.clone(),
                actual: arg.ty.clone(),
            });
        }
        let ty = cod.clone();
        Ok(Term {
            kind: TermKind::App(name, Box::new(arg)),
            ty,
        })
    }

    pub fn comprehension(var: impl Into<String>, var_ty: TypeExpr, body: Formula) -> Term {
        let ty = TypeExpr::power(var_ty.clone());
        Term {
            kind: TermKind::Comprehension(var.into(), var_ty, Box::new(body)),
            ty,
        }
    }

    /// Singleton shorthand `{t}`, expanding to `{x : τ | t = x}` with a bound
    /// variable fresh for `t`.
    pub fn singleton(t: Term) -> Term {
        let ty = t.ty.clone();
        let avoid = all_names_term(&t);
        let x = fresh_name("s", &avoid);
        let body = Formula::eq(t, Term::var(x.clone(), ty.clone())).expect("same type");
        Term::comprehension(x, ty, body)
    }

    /// Empty-set shorthand `∅_{x:τ}`, expanding to `{x : τ | ⊥}`.
    pub fn empty_set(ty: TypeExpr) -> Term {
        Term::comprehension("e", ty, Formula::Bot)
    }

    /// Re-derives the type bottom-up per the formation rules, checking every
    /// cached annotation along the way.
    pub fn check_type(&self, sig: &Signature) -> Result<TypeExpr, TypeError> {
        let derived = match &self.kind {
            TermKind::Var(_) => self.ty.clone(),
            TermKind::Star => TypeExpr::Unit,
            TermKind::Pair(l, r) => TypeExpr::product(l.check_type(sig)?, r.check_type(sig)?),
            TermKind::Fst(t) => match t.check_type(sig)? {
                TypeExpr::Product(l, _) => *l,
                other => return Err(TypeError::NotAProduct(other)),
            },
            TermKind::Snd(t) => match t.check_type(sig)? {
                TypeExpr::Product(_, r) => *r,
                other => return Err(TypeError::NotAProduct(other)),
            },
            TermKind::App(name, arg) => {
                let (dom, cod) = sig
                    .functions
                    .get(name)
                    .ok_or_else(|| TypeError::UnknownFunction(name.clone()))?;
                let arg_ty = arg.check_type(sig)?;
                if arg_ty != *dom {
                    return Err(TypeError::DomainMismatch {
                        name: name.clone(),
                        expected: dom.clone(),
                        actual: arg_ty,
                    });
                }
                cod.clone()
            }
            TermKind::Comprehension(_, var_ty, body) => {
                body.check(sig)?;
                TypeExpr::power(var_ty.clone())
            }
        };
        if derived != self.ty {
            return Err(TypeError::CachedTypeMismatch {
                cached: self.ty.clone(),
                derived,
            });
        }
        Ok(derived)
    }
}

/// The unique type assigned to a well-formed term by the formation rules.
pub fn type_of(t: &Term, sig: &Signature) -> Result<TypeExpr, TypeError> {
    t.check_type(sig)
}

/// A countable disjunction presented as a total generator of formulas.
///
/// `fv_bound` is a declared superset of the free variables of every generated
/// member; `stability_window` is an optional promise that a partial join
/// unchanged across that many consecutive indices is unchanged forever.
#[derive(Clone)]
pub struct FormulaFamily {
    pub id: String,
    pub fv_bound: BTreeSet<VarDecl>,
    pub stability_window: Option<usize>,
    gen: Arc<dyn Fn(usize) -> Formula + Send + Sync>,
}

impl FormulaFamily {
    pub fn new(
        id: impl Into<String>,
        fv_bound: BTreeSet<VarDecl>,
        gen: impl Fn(usize) -> Formula + Send + Sync + 'static,
    ) -> Self {
        FormulaFamily {
            id: id.into(),
            fv_bound,
            stability_window: None,
            gen: Arc::new(gen),
        }
    }

    pub fn with_stability_window(mut self, window: usize) -> Self {
        self.stability_window = Some(window);
        self
    }

    /// The family of constant value `p`: every index yields `p`.
    pub fn constant(id: impl Into<String>, p: Formula) -> Self {
        let fv = p.fv();
        FormulaFamily::new(id, fv, move |_| p.clone()).with_stability_window(1)
    }

    pub fn member(&self, index: usize) -> Formula {
        (self.gen)(index)
    }

    /// A new family whose members are the substituted members of `self`.
    fn substituted(&self, bindings: &[(VarDecl, Term)]) -> FormulaFamily {
        let mut fv = BTreeSet::new();
        for decl in &self.fv_bound {
            if let Some((_, t)) = bindings.iter().find(|(v, _)| v == decl) {
                fv.extend(t.fv());
            } else {
                fv.insert(decl.clone());
            }
        }
        let inner = self.gen.clone();
        let bindings: Arc<Vec<(VarDecl, Term)>> = Arc::new(bindings.to_vec());
        let desc: Vec<String> = bindings
            .iter()
            .map(|((n, _), t)| format!("{n}:={t}"))
            .collect();
        FormulaFamily {
            id: format!("{}[{}]", self.id, desc.join(",")),
            fv_bound: fv,
            stability_window: self.stability_window,
            gen: Arc::new(move |i| {
                substitute_formula(&inner(i), &bindings).expect("family substitution")
            }),
        }
    }
}

impl fmt::Debug for FormulaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormulaFamily")
            .field("id", &self.id)
            .field("fv_bound", &self.fv_bound)
            .finish()
    }
}

// Families compare by identity: the generator is opaque. Identical
// construction paths produce identical ids.
impl PartialEq for FormulaFamily {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.fv_bound == other.fv_bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Formula {
    Top,
    Bot,
    Rel(String, Term),
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    CountableOr(FormulaFamily),
    Forall(String, TypeExpr, Box<Formula>),
    Exists(String, TypeExpr, Box<Formula>),
    Member(Term, Term),
}

impl Formula {
    pub fn rel(sig: &Signature, name: impl Into<String>, arg: Term) -> Result<Formula, TypeError> {
        let name = name.into();
        let carrier = sig
            .relations
            .get(&name)
            .ok_or_else(|| TypeError::UnknownRelation(name.clone()))?;
        if *carrier != arg.ty {
            return Err(TypeError::CarrierMismatch {
                name,
                expected: carrier.clone(),
                actual: arg.ty.clone(),
            });
        }
        Ok(Formula::Rel(name, arg))
    }

    pub fn eq(left: Term, right: Term) -> Result<Formula, TypeError> {
        if left.ty != right.ty {
            return Err(TypeError::EqTypeMismatch(left.ty.clone(), right.ty.clone()));
        }
        Ok(Formula::Eq(left, right))
    }

    pub fn and(p: Formula, q: Formula) -> Formula {
        Formula::And(Box::new(p), Box::new(q))
    }

    pub fn or(p: Formula, q: Formula) -> Formula {
        Formula::Or(Box::new(p), Box::new(q))
    }

    pub fn implies(p: Formula, q: Formula) -> Formula {
        Formula::Implies(Box::new(p), Box::new(q))
    }

    /// `¬p`, the shorthand for `p ⇒ ⊥`. Expansion happens exactly once.
    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Formula) -> Formula {
        Formula::implies(p, Formula::Bot)
    }

    /// `p ⇔ q`, the shorthand for `(p ⇒ q) ∧ (q ⇒ p)`.
    pub fn iff(p: Formula, q: Formula) -> Formula {
        Formula::and(
            Formula::implies(p.clone(), q.clone()),
            Formula::implies(q, p),
        )
    }

    pub fn forall(var: impl Into<String>, ty: TypeExpr, body: Formula) -> Formula {
        Formula::Forall(var.into(), ty, Box::new(body))
    }

    pub fn exists(var: impl Into<String>, ty: TypeExpr, body: Formula) -> Formula {
        Formula::Exists(var.into(), ty, Box::new(body))
    }

    /// Nested existentials ∃x₁…∃xₙ, body.
    pub fn exists_many(vars: &[VarDecl], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, (n, t)| {
            Formula::exists(n.clone(), t.clone(), acc)
        })
    }

    /// Right-nested conjunction of a non-empty list.
    pub fn and_all(mut formulas: Vec<Formula>) -> Option<Formula> {
        let last = formulas.pop()?;
        Some(
            formulas
                .into_iter()
                .rev()
                .fold(last, |acc, f| Formula::and(f, acc)),
        )
    }

    /// Right-nested disjunction of a non-empty list.
    pub fn or_all(mut formulas: Vec<Formula>) -> Option<Formula> {
        let last = formulas.pop()?;
        Some(
            formulas
                .into_iter()
                .rev()
                .fold(last, |acc, f| Formula::or(f, acc)),
        )
    }

    pub fn member(element: Term, container: Term) -> Result<Formula, TypeError> {
        match &container.ty {
            TypeExpr::Power(inner) if **inner == element.ty => {
                Ok(Formula::Member(element, container))
            }
            other => Err(TypeError::MemberTypeMismatch(
                element.ty.clone(),
                other.clone(),
            )),
        }
    }

    /// Checks well-formedness of every node under `sig`.
    pub fn check(&self, sig: &Signature) -> Result<(), TypeError> {
        match self {
            Formula::Top | Formula::Bot => Ok(()),
            Formula::Rel(name, t) => {
                let carrier = sig
                    .relations
                    .get(name)
                    .ok_or_else(|| TypeError::UnknownRelation(name.clone()))?;
                let ty = t.check_type(sig)?;
                if ty != *carrier {
                    return Err(TypeError::CarrierMismatch {
                        name: name.clone(),
                        expected: carrier.clone(),
                        actual: ty,
                    });
                }
                Ok(())
            }
            Formula::Eq(l, r) => {
                let lt = l.check_type(sig)?;
                let rt = r.check_type(sig)?;
                if lt != rt {
                    return Err(TypeError::EqTypeMismatch(lt, rt));
                }
                Ok(())
            }
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
                p.check(sig)?;
                q.check(sig)
            }
            Formula::CountableOr(fam) => {
                // Spot-check the first few members against the declared bound.
                for i in 0..3 {
                    let m = fam.member(i);
                    m.check(sig)?;
                    if !m.fv().is_subset(&fam.fv_bound) {
                        return Err(TypeError::FamilyFvBound { index: i });
                    }
                }
                Ok(())
            }
            Formula::Forall(_, _, body) | Formula::Exists(_, _, body) => body.check(sig),
            Formula::Member(t, s) => {
                let tt = t.check_type(sig)?;
                let st = s.check_type(sig)?;
                match st {
                    TypeExpr::Power(inner) if *inner == tt => Ok(()),
                    other => Err(TypeError::MemberTypeMismatch(tt, other)),
                }
            }
        }
    }

    pub fn fv(&self) -> BTreeSet<VarDecl> {
        let mut out = BTreeSet::new();
        fv_formula(self, &mut out);
        out
    }
}

impl Term {
    pub fn fv(&self) -> BTreeSet<VarDecl> {
        let mut out = BTreeSet::new();
        fv_term(self, &mut out);
        out
    }
}

fn fv_term(t: &Term, out: &mut BTreeSet<VarDecl>) {
    match &t.kind {
        TermKind::Var(name) => {
            out.insert((name.clone(), t.ty.clone()));
        }
        TermKind::Star => {}
        TermKind::Pair(l, r) => {
            fv_term(l, out);
            fv_term(r, out);
        }
        TermKind::Fst(inner) | TermKind::Snd(inner) | TermKind::App(_, inner) => {
            fv_term(inner, out)
        }
        TermKind::Comprehension(x, ty, body) => {
            let mut inner = BTreeSet::new();
            fv_formula(body, &mut inner);
            inner.remove(&(x.clone(), ty.clone()));
            out.extend(inner);
        }
    }
}

fn fv_formula(f: &Formula, out: &mut BTreeSet<VarDecl>) {
    match f {
        Formula::Top | Formula::Bot => {}
        Formula::Rel(_, t) => fv_term(t, out),
        Formula::Eq(l, r) => {
            fv_term(l, out);
            fv_term(r, out);
        }
        Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
            fv_formula(p, out);
            fv_formula(q, out);
        }
        Formula::CountableOr(fam) => out.extend(fam.fv_bound.iter().cloned()),
        Formula::Forall(x, ty, body) | Formula::Exists(x, ty, body) => {
            let mut inner = BTreeSet::new();
            fv_formula(body, &mut inner);
            inner.remove(&(x.clone(), ty.clone()));
            out.extend(inner);
        }
        Formula::Member(t, s) => {
            fv_term(t, out);
            fv_term(s, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Name management

fn collect_names_term(t: &Term, out: &mut BTreeSet<String>) {
    match &t.kind {
        TermKind::Var(n) => {
            out.insert(n.clone());
        }
        TermKind::Star => {}
        TermKind::Pair(l, r) => {
            collect_names_term(l, out);
            collect_names_term(r, out);
        }
        TermKind::Fst(i) | TermKind::Snd(i) | TermKind::App(_, i) => collect_names_term(i, out),
        TermKind::Comprehension(x, _, body) => {
            out.insert(x.clone());
            collect_names_formula(body, out);
        }
    }
}

fn collect_names_formula(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Top | Formula::Bot => {}
        Formula::Rel(_, t) => collect_names_term(t, out),
        Formula::Eq(l, r) => {
            collect_names_term(l, out);
            collect_names_term(r, out);
        }
        Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) => {
            collect_names_formula(p, out);
            collect_names_formula(q, out);
        }
        Formula::CountableOr(fam) => {
            for (n, _) in &fam.fv_bound {
                out.insert(n.clone());
            }
        }
        Formula::Forall(x, _, body) | Formula::Exists(x, _, body) => {
            out.insert(x.clone());
            collect_names_formula(body, out);
        }
        Formula::Member(t, s) => {
            collect_names_term(t, out);
            collect_names_term(s, out);
        }
    }
}

pub(crate) fn all_names_term(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_names_term(t, &mut out);
    out
}

pub(crate) fn all_names_formula(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_names_formula(f, &mut out);
    out
}

/// `base` with the minimal numeric suffix that avoids `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    for k in 1usize.. {
        let candidate = format!("{base}{k}");
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

// ---------------------------------------------------------------------------
// Substitution

/// Simultaneous capture-avoiding substitution on terms.
pub fn substitute_term(t: &Term, bindings: &[(VarDecl, Term)]) -> Result<Term, TypeError> {
    check_bindings(bindings)?;
    Ok(subst_term(t, bindings))
}

/// Simultaneous capture-avoiding substitution on formulas.
pub fn substitute_formula(f: &Formula, bindings: &[(VarDecl, Term)]) -> Result<Formula, TypeError> {
    check_bindings(bindings)?;
    Ok(subst_formula(f, bindings))
}

fn check_bindings(bindings: &[(VarDecl, Term)]) -> Result<(), TypeError> {
    for ((name, ty), term) in bindings {
        if term.ty != *ty {
            return Err(TypeError::BindingTypeMismatch {
                var: name.clone(),
                var_ty: ty.clone(),
                term_ty: term.ty.clone(),
            });
        }
    }
    Ok(())
}

fn subst_term(t: &Term, bindings: &[(VarDecl, Term)]) -> Term {
    if bindings.is_empty() {
        return t.clone();
    }
    match &t.kind {
        TermKind::Var(name) => {
            for ((n, ty), replacement) in bindings {
                if n == name && *ty == t.ty {
                    return replacement.clone();
                }
            }
            t.clone()
        }
        TermKind::Star => t.clone(),
        TermKind::Pair(l, r) => Term::pair(subst_term(l, bindings), subst_term(r, bindings)),
        TermKind::Fst(inner) => Term {
            kind: TermKind::Fst(Box::new(subst_term(inner, bindings))),
            ty: t.ty.clone(),
        },
        TermKind::Snd(inner) => Term {
            kind: TermKind::Snd(Box::new(subst_term(inner, bindings))),
            ty: t.ty.clone(),
        },
        TermKind::App(f, inner) => Term {
            kind: TermKind::App(f.clone(), Box::new(subst_term(inner, bindings))),
            ty: t.ty.clone(),
        },
        TermKind::Comprehension(x, x_ty, body) => {
            let (x2, body2, active) = enter_binder(x, x_ty, body, bindings);
            Term::comprehension(x2, x_ty.clone(), subst_formula(&body2, &active))
        }
    }
}

fn subst_formula(f: &Formula, bindings: &[(VarDecl, Term)]) -> Formula {
    if bindings.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Top | Formula::Bot => f.clone(),
        Formula::Rel(r, t) => Formula::Rel(r.clone(), subst_term(t, bindings)),
        Formula::Eq(l, r) => Formula::Eq(subst_term(l, bindings), subst_term(r, bindings)),
        Formula::And(p, q) => Formula::and(subst_formula(p, bindings), subst_formula(q, bindings)),
        Formula::Or(p, q) => Formula::or(subst_formula(p, bindings), subst_formula(q, bindings)),
        Formula::Implies(p, q) => {
            Formula::implies(subst_formula(p, bindings), subst_formula(q, bindings))
        }
        Formula::CountableOr(fam) => {
            let active: Vec<(VarDecl, Term)> = bindings
                .iter()
                .filter(|(v, _)| fam.fv_bound.contains(v))
                .cloned()
                .collect();
            if active.is_empty() {
                f.clone()
            } else {
                Formula::CountableOr(fam.substituted(&active))
            }
        }
        Formula::Forall(x, x_ty, body) => {
            let (x2, body2, active) = enter_binder(x, x_ty, body, bindings);
            Formula::forall(x2, x_ty.clone(), subst_formula(&body2, &active))
        }
        Formula::Exists(x, x_ty, body) => {
            let (x2, body2, active) = enter_binder(x, x_ty, body, bindings);
            Formula::exists(x2, x_ty.clone(), subst_formula(&body2, &active))
        }
        Formula::Member(t, s) => Formula::Member(subst_term(t, bindings), subst_term(s, bindings)),
    }
}

/// Handles one binder: drops shadowed bindings and renames the bound variable
/// when a free variable of a substituted term would be captured.
fn enter_binder(
    x: &str,
    x_ty: &TypeExpr,
    body: &Formula,
    bindings: &[(VarDecl, Term)],
) -> (String, Formula, Vec<(VarDecl, Term)>) {
    let body_fv = body.fv();
    let active: Vec<(VarDecl, Term)> = bindings
        .iter()
        .filter(|((n, _), _)| n != x)
        .filter(|(v, _)| body_fv.contains(v))
        .cloned()
        .collect();
    let captured = active
        .iter()
        .any(|(_, t)| t.fv().iter().any(|(n, _)| n == x));
    if !captured {
        return (x.to_string(), body.clone(), active);
    }
    let mut avoid = all_names_formula(body);
    for (_, t) in &active {
        avoid.extend(all_names_term(t));
    }
    let x2 = fresh_name(x, &avoid);
    let renamed = subst_formula(
        body,
        &[(
            (x.to_string(), x_ty.clone()),
            Term::var(x2.clone(), x_ty.clone()),
        )],
    );
    (x2, renamed, active)
}

// ---------------------------------------------------------------------------
// α-equivalence via canonical renaming

/// Bound variables renamed to a reserved scheme `!0`, `!1`, … in traversal
/// order. `!` cannot appear in source names, so renaming never captures.
pub fn canonicalize_term(t: &Term) -> Term {
    let mut counter = 0;
    canon_term(t, &mut counter)
}

pub fn canonicalize_formula(f: &Formula) -> Formula {
    let mut counter = 0;
    canon_formula(f, &mut counter)
}

fn canon_term(t: &Term, counter: &mut usize) -> Term {
    match &t.kind {
        TermKind::Var(_) | TermKind::Star => t.clone(),
        TermKind::Pair(l, r) => {
            let l2 = canon_term(l, counter);
            let r2 = canon_term(r, counter);
            Term::pair(l2, r2)
        }
        TermKind::Fst(inner) => Term {
            kind: TermKind::Fst(Box::new(canon_term(inner, counter))),
            ty: t.ty.clone(),
        },
        TermKind::Snd(inner) => Term {
            kind: TermKind::Snd(Box::new(canon_term(inner, counter))),
            ty: t.ty.clone(),
        },
        TermKind::App(f, inner) => Term {
            kind: TermKind::App(f.clone(), Box::new(canon_term(inner, counter))),
            ty: t.ty.clone(),
        },
        TermKind::Comprehension(x, x_ty, body) => {
            let fresh = format!("!{counter}");
            *counter += 1;
            let renamed = subst_formula(
                body,
                &[(
                    (x.clone(), x_ty.clone()),
                    Term::var(fresh.clone(), x_ty.clone()),
                )],
            );
            Term::comprehension(fresh, x_ty.clone(), canon_formula(&renamed, counter))
        }
    }
}

fn canon_formula(f: &Formula, counter: &mut usize) -> Formula {
    match f {
        Formula::Top | Formula::Bot => f.clone(),
        Formula::Rel(r, t) => Formula::Rel(r.clone(), canon_term(t, counter)),
        Formula::Eq(l, r) => {
            let l2 = canon_term(l, counter);
            let r2 = canon_term(r, counter);
            Formula::Eq(l2, r2)
        }
        Formula::And(p, q) => Formula::and(canon_formula(p, counter), canon_formula(q, counter)),
        Formula::Or(p, q) => Formula::or(canon_formula(p, counter), canon_formula(q, counter)),
        Formula::Implies(p, q) => {
            Formula::implies(canon_formula(p, counter), canon_formula(q, counter))
        }
        // Families canonicalize by identity; see the module notes.
        Formula::CountableOr(_) => f.clone(),
        Formula::Forall(x, x_ty, body) => {
            let fresh = format!("!{counter}");
            *counter += 1;
            let renamed = subst_formula(
                body,
                &[(
                    (x.clone(), x_ty.clone()),
                    Term::var(fresh.clone(), x_ty.clone()),
                )],
            );
            Formula::forall(fresh, x_ty.clone(), canon_formula(&renamed, counter))
        }
        Formula::Exists(x, x_ty, body) => {
            let fresh = format!("!{counter}");
            *counter += 1;
            let renamed = subst_formula(
                body,
                &[(
                    (x.clone(), x_ty.clone()),
                    Term::var(fresh.clone(), x_ty.clone()),
                )],
            );
            Formula::exists(fresh, x_ty.clone(), canon_formula(&renamed, counter))
        }
        Formula::Member(t, s) => {
            let t2 = canon_term(t, counter);
            let s2 = canon_term(s, counter);
            Formula::Member(t2, s2)
        }
    }
}

pub fn alpha_eq_term(a: &Term, b: &Term) -> bool {
    canonicalize_term(a) == canonicalize_term(b)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TermKind::Var(n) => write!(f, "{n}"),
            TermKind::Star => write!(f, "star"),
            TermKind::Pair(l, r) => write!(f, "(pair {l} {r})"),
            TermKind::Fst(t) => write!(f, "(fst {t})"),
            TermKind::Snd(t) => write!(f, "(snd {t})"),
            TermKind::App(g, t) => write!(f, "(app {g} {t})"),
            TermKind::Comprehension(x, ty, body) => write!(f, "(comp {x} {ty} {body})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => write!(f, "true"),
            Formula::Bot => write!(f, "false"),
            Formula::Rel(r, t) => write!(f, "(rel {r} {t})"),
            Formula::Eq(l, r) => write!(f, "(eq {l} {r})"),
            Formula::And(p, q) => write!(f, "(and {p} {q})"),
            Formula::Or(p, q) => write!(f, "(or {p} {q})"),
            Formula::Implies(p, q) => write!(f, "(implies {p} {q})"),
            Formula::CountableOr(fam) => write!(f, "(cor {})", fam.id),
            Formula::Forall(x, ty, body) => write!(f, "(forall {x} {ty} {body})"),
            Formula::Exists(x, ty, body) => write!(f, "(exists {x} {ty} {body})"),
            Formula::Member(t, s) => write!(f, "(member {t} {s})"),
        }
    }
}

pub fn alpha_eq_formula(a: &Formula, b: &Formula) -> bool {
    canonicalize_formula(a) == canonicalize_formula(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new()
            .with_base("A")
            .with_base("B")
            .with_function("f", TypeExpr::base("A"), TypeExpr::base("B"))
            .with_relation("P", TypeExpr::base("A"))
    }

    fn a() -> TypeExpr {
        TypeExpr::base("A")
    }

    fn b() -> TypeExpr {
        TypeExpr::base("B")
    }

    #[test]
    fn type_of_star_is_unit() {
        assert_eq!(type_of(&Term::star(), &sig()).unwrap(), TypeExpr::Unit);
    }

    #[test]
    fn type_of_pair() {
        let t = Term::pair(Term::var("x", a()), Term::var("y", b()));
        assert_eq!(type_of(&t, &sig()).unwrap(), TypeExpr::product(a(), b()));
    }

    #[test]
    fn type_of_comprehension_is_power() {
        let t = Term::comprehension("x", a(), Formula::Top);
        assert_eq!(type_of(&t, &sig()).unwrap(), TypeExpr::power(a()));
    }

    #[test]
    fn app_domain_mismatch_rejected() {
        let err = Term::app(&sig(), "f", Term::var("y", b())).unwrap_err();
        assert!(matches!(err, TypeError::DomainMismatch { .. }));
    }

    #[test]
    fn fst_of_non_product_rejected() {
        assert!(Term::fst(Term::var("x", a())).is_err());
    }

    #[test]
    fn member_against_non_power_rejected() {
        let err = Formula::member(Term::var("x", a()), Term::var("y", b())).unwrap_err();
        assert!(matches!(err, TypeError::MemberTypeMismatch(..)));
    }

    #[test]
    fn fv_of_star_empty() {
        assert!(Term::star().fv().is_empty());
        assert!(Formula::Top.fv().is_empty());
        assert!(Formula::Bot.fv().is_empty());
    }

    #[test]
    fn fv_of_pair_unions() {
        let t = Term::pair(Term::var("x", a()), Term::var("y", b()));
        let fv = t.fv();
        assert_eq!(fv.len(), 2);
        assert!(fv.contains(&("x".into(), a())));
        assert!(fv.contains(&("y".into(), b())));
    }

    #[test]
    fn fv_of_comprehension_drops_bound() {
        let body = Formula::eq(Term::var("x", a()), Term::var("y", a())).unwrap();
        let t = Term::comprehension("x", a(), body);
        let fv = t.fv();
        assert_eq!(fv, BTreeSet::from([("y".to_string(), a())]));
    }

    #[test]
    fn alpha_eq_renames_comprehension_binder() {
        let p = Term::comprehension(
            "x",
            a(),
            Formula::eq(Term::var("x", a()), Term::var("x", a())).unwrap(),
        );
        let q = Term::comprehension(
            "y",
            a(),
            Formula::eq(Term::var("y", a()), Term::var("y", a())).unwrap(),
        );
        assert!(alpha_eq_term(&p, &q));
    }

    #[test]
    fn alpha_eq_distinguishes_free_variable_positions() {
        let p = Term::pair(Term::var("x", a()), Term::var("y", a()));
        let q = Term::pair(Term::var("y", a()), Term::var("x", a()));
        assert!(!alpha_eq_term(&p, &q));
    }

    #[test]
    fn alpha_eq_exists_bound_rename() {
        let p = Formula::exists(
            "x",
            a(),
            Formula::eq(Term::var("x", a()), Term::var("z", a())).unwrap(),
        );
        let q = Formula::exists(
            "w",
            a(),
            Formula::eq(Term::var("w", a()), Term::var("z", a())).unwrap(),
        );
        assert!(alpha_eq_formula(&p, &q));
    }

    #[test]
    fn substitute_replaces_free_variable() {
        let f = Formula::eq(Term::var("x", a()), Term::var("y", a())).unwrap();
        let out = substitute_formula(&f, &[(("x".into(), a()), Term::var("t", a()))]).unwrap();
        assert_eq!(
            out,
            Formula::eq(Term::var("t", a()), Term::var("y", a())).unwrap()
        );
    }

    #[test]
    fn substitute_avoids_capture() {
        // (∃y:A, x = y)[x := y]  ⇒  ∃y1:A, y = y1
        let f = Formula::exists(
            "y",
            a(),
            Formula::eq(Term::var("x", a()), Term::var("y", a())).unwrap(),
        );
        let out = substitute_formula(&f, &[(("x".into(), a()), Term::var("y", a()))]).unwrap();
        match &out {
            Formula::Exists(bound, _, body) => {
                assert_ne!(bound, "y");
                let expected =
                    Formula::eq(Term::var("y", a()), Term::var(bound.clone(), a())).unwrap();
                assert_eq!(**body, expected);
            }
            other => panic!("unexpected {other:?}"),
        }
        let again = Formula::exists(
            "y",
            a(),
            Formula::eq(Term::var("x", a()), Term::var("y", a())).unwrap(),
        );
        assert!(alpha_eq_formula(&f, &again));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let t = Term::pair(Term::var("x", a()), Term::var("y", a()));
        let out = substitute_term(
            &t,
            &[
                (("x".into(), a()), Term::var("y", a())),
                (("y".into(), a()), Term::var("x", a())),
            ],
        )
        .unwrap();
        assert_eq!(out, Term::pair(Term::var("y", a()), Term::var("x", a())));
    }

    #[test]
    fn binding_type_mismatch_rejected() {
        let f = Formula::eq(Term::var("x", a()), Term::var("y", a())).unwrap();
        let err = substitute_formula(&f, &[(("x".into(), a()), Term::var("t", b()))]);
        assert!(matches!(err, Err(TypeError::BindingTypeMismatch { .. })));
    }

    #[test]
    fn shorthand_expansion_is_single_step() {
        let p = Formula::Rel("P".into(), Term::var("x", a()));
        let n = Formula::not(p.clone());
        assert_eq!(n, Formula::implies(p, Formula::Bot));
    }

    #[test]
    fn singleton_shape() {
        let s = Term::singleton(Term::var("x", a()));
        match &s.kind {
            TermKind::Comprehension(bound, ty, body) => {
                assert_eq!(*ty, a());
                assert_ne!(bound, "x");
                let expected =
                    Formula::eq(Term::var("x", a()), Term::var(bound.clone(), a())).unwrap();
                assert_eq!(**body, expected);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(s.ty, TypeExpr::power(a()));
    }

    #[test]
    fn fresh_name_minimal_suffix() {
        let avoid: BTreeSet<String> = ["x", "x1", "x3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(fresh_name("x", &avoid), "x2");
        assert_eq!(fresh_name("y", &avoid), "y");
    }

    #[test]
    fn substitution_preserves_type() {
        let f_term = Term::app(&sig(), "f", Term::var("x", a())).unwrap();
        let out = substitute_term(&f_term, &[(("x".into(), a()), Term::var("w", a()))]).unwrap();
        assert_eq!(out.ty, b());
        assert_eq!(out.check_type(&sig()).unwrap(), b());
    }

    #[test]
    fn syntax_values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<TypeExpr>();
        assert_send_sync::<Term>();
        assert_send_sync::<Formula>();
        assert_send_sync::<FormulaFamily>();
        assert_send_sync::<Signature>();
    }

    #[test]
    fn constant_family_members_identical() {
        let p = Formula::Rel("P".into(), Term::var("x", a()));
        let fam = FormulaFamily::constant("const-p", p.clone());
        assert_eq!(fam.member(0), p);
        assert_eq!(fam.member(17), p);
        assert_eq!(fam.fv_bound, p.fv());
    }
}
