//! Surface syntax: an s-expression reader and printers for types, terms,
//! formulas, sequents, proof scripts, signatures, environments and
//! diagrams, plus a mathematical notation printer for human-readable
//! traces.
//!
//! The `Display` implementations on syntax values emit exactly this
//! grammar, so parse ∘ print is the identity up to α-equivalence.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::colimit::{DiagramMorphism, DiagramSpec};
use crate::finset::{FinMor, FinObj, Label, Subobj};
use crate::interp::Environment;
use crate::sequent::{Context, ProofTree, RuleId, RuleParams, Sequent};
use crate::syntax::{Formula, FormulaFamily, Signature, Term, TypeExpr, VarDecl};

#[derive(Clone, Debug, Error, PartialEq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom(String, usize, usize),
    List(Vec<Sexp>, usize, usize),
}

impl Sexp {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom(_, l, c) | Sexp::List(_, l, c) => (*l, *c),
        }
    }

    fn as_atom(&self) -> Result<&str, ParseError> {
        match self {
            Sexp::Atom(s, _, _) => Ok(s),
            Sexp::List(_, l, c) => err(*l, *c, "expected an atom"),
        }
    }

    fn as_list(&self) -> Result<&[Sexp], ParseError> {
        match self {
            Sexp::List(items, _, _) => Ok(items),
            Sexp::Atom(s, l, c) => err(*l, *c, format!("expected a list, found `{s}`")),
        }
    }

    fn head(&self) -> Result<(&str, &[Sexp]), ParseError> {
        let items = self.as_list()?;
        match items.split_first() {
            Some((h, rest)) => Ok((h.as_atom()?, rest)),
            None => {
                let (l, c) = self.pos();
                err(l, c, "empty list")
            }
        }
    }
}

/// Tokenizes and reads all top-level s-expressions. Comments run from `;`
/// to the end of the line.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = vec![];
    let mut top = Vec::new();
    let mut atom = String::new();
    let mut atom_pos = (0usize, 0usize);
    let (mut line, mut col) = (1usize, 0usize);
    let mut in_comment = false;
    let push_atom = |atom: &mut String,
                     pos: (usize, usize),
                     stack: &mut Vec<(Vec<Sexp>, usize, usize)>,
                     top: &mut Vec<Sexp>| {
        if !atom.is_empty() {
            let s = Sexp::Atom(std::mem::take(atom), pos.0, pos.1);
            match stack.last_mut() {
                Some((items, _, _)) => items.push(s),
                None => top.push(s),
            }
        }
    };
    for ch in src.chars() {
        col += 1;
        if ch == '\n' {
            line += 1;
            col = 0;
            in_comment = false;
            push_atom(&mut atom, atom_pos, &mut stack, &mut top);
            continue;
        }
        if in_comment {
            continue;
        }
        match ch {
            ';' => {
                in_comment = true;
                push_atom(&mut atom, atom_pos, &mut stack, &mut top);
            }
            '(' => {
                push_atom(&mut atom, atom_pos, &mut stack, &mut top);
                stack.push((Vec::new(), line, col));
            }
            ')' => {
                push_atom(&mut atom, atom_pos, &mut stack, &mut top);
                match stack.pop() {
                    Some((items, l, c)) => {
                        let s = Sexp::List(items, l, c);
                        match stack.last_mut() {
                            Some((parent, _, _)) => parent.push(s),
                            None => top.push(s),
                        }
                    }
                    None => return err(line, col, "unmatched closing parenthesis"),
                }
            }
            c if c.is_whitespace() => push_atom(&mut atom, atom_pos, &mut stack, &mut top),
            '!' => return err(line, col, "`!` is reserved for canonical names"),
            c => {
                if atom.is_empty() {
                    atom_pos = (line, col);
                }
                atom.push(c);
            }
        }
    }
    push_atom(&mut atom, atom_pos, &mut stack, &mut top);
    if let Some((_, l, c)) = stack.last() {
        return err(*l, *c, "unclosed parenthesis");
    }
    Ok(top)
}

// ---------------------------------------------------------------------------
// Types, terms, formulas

pub fn parse_type(sexp: &Sexp) -> Result<TypeExpr, ParseError> {
    match sexp {
        Sexp::Atom(s, l, c) => match s.as_str() {
            "unit" => Ok(TypeExpr::Unit),
            "omega" => Ok(TypeExpr::Omega),
            name if is_identifier(name) => Ok(TypeExpr::base(name)),
            other => err(*l, *c, format!("invalid type name `{other}`")),
        },
        Sexp::List(_, l, c) => {
            let (head, rest) = sexp.head()?;
            match (head, rest) {
                ("prod", [a, b]) => Ok(TypeExpr::product(parse_type(a)?, parse_type(b)?)),
                ("pow", [a]) => Ok(TypeExpr::power(parse_type(a)?)),
                _ => err(*l, *c, format!("invalid type form `{head}`")),
            }
        }
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        && !matches!(
            s,
            "unit" | "omega" | "star" | "true" | "false" | "prod" | "pow"
        )
}

/// Families that `(cor id)` may reference.
#[derive(Clone, Debug, Default)]
pub struct FamilyRegistry {
    families: BTreeMap<String, FormulaFamily>,
}

impl FamilyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, fam: FormulaFamily) {
        self.families.insert(fam.id.clone(), fam);
    }

    pub fn get(&self, id: &str) -> Option<&FormulaFamily> {
        self.families.get(id)
    }
}

pub struct ParseCtx<'a> {
    pub sig: &'a Signature,
    pub families: &'a FamilyRegistry,
}

type Scope = BTreeMap<String, TypeExpr>;

pub fn parse_term(ctx: &ParseCtx, scope: &Scope, sexp: &Sexp) -> Result<Term, ParseError> {
    let (l, c) = sexp.pos();
    match sexp {
        Sexp::Atom(s, ..) => match s.as_str() {
            "star" => Ok(Term::star()),
            name => match scope.get(name) {
                Some(ty) => Ok(Term::var(name, ty.clone())),
                None => err(l, c, format!("unbound variable `{name}`")),
            },
        },
        Sexp::List(..) => {
            let (head, rest) = sexp.head()?;
            match (head, rest) {
                ("pair", [a, b]) => Ok(Term::pair(
                    parse_term(ctx, scope, a)?,
                    parse_term(ctx, scope, b)?,
                )),
                ("fst", [a]) => Term::fst(parse_term(ctx, scope, a)?).map_err(|e| ParseError {
                    line: l,
                    col: c,
                    message: e.to_string(),
                }),
                ("snd", [a]) => Term::snd(parse_term(ctx, scope, a)?).map_err(|e| ParseError {
                    line: l,
                    col: c,
                    message: e.to_string(),
                }),
                ("app", [f, a]) => Term::app(ctx.sig, f.as_atom()?, parse_term(ctx, scope, a)?)
                    .map_err(|e| ParseError {
                        line: l,
                        col: c,
                        message: e.to_string(),
                    }),
                ("comp", [x, ty, body]) => {
                    let x = x.as_atom()?.to_string();
                    let ty = parse_type(ty)?;
                    let mut inner = scope.clone();
                    inner.insert(x.clone(), ty.clone());
                    Ok(Term::comprehension(
                        x,
                        ty,
                        parse_formula(ctx, &inner, body)?,
                    ))
                }
                ("singleton", [a]) => Ok(Term::singleton(parse_term(ctx, scope, a)?)),
                ("empty", [ty]) => Ok(Term::empty_set(parse_type(ty)?)),
                _ => err(l, c, format!("invalid term form `{head}`")),
            }
        }
    }
}

pub fn parse_formula(ctx: &ParseCtx, scope: &Scope, sexp: &Sexp) -> Result<Formula, ParseError> {
    let (l, c) = sexp.pos();
    let type_error = |e: crate::syntax::TypeError| ParseError {
        line: l,
        col: c,
        message: e.to_string(),
    };
    match sexp {
        Sexp::Atom(s, ..) => match s.as_str() {
            "true" => Ok(Formula::Top),
            "false" => Ok(Formula::Bot),
            other => err(l, c, format!("invalid formula `{other}`")),
        },
        Sexp::List(..) => {
            let (head, rest) = sexp.head()?;
            match (head, rest) {
                ("rel", [r, t]) => Formula::rel(ctx.sig, r.as_atom()?, parse_term(ctx, scope, t)?)
                    .map_err(type_error),
                ("eq", [a, b]) => {
                    Formula::eq(parse_term(ctx, scope, a)?, parse_term(ctx, scope, b)?)
                        .map_err(type_error)
                }
                ("and", [p, q]) => Ok(Formula::and(
                    parse_formula(ctx, scope, p)?,
                    parse_formula(ctx, scope, q)?,
                )),
                ("or", [p, q]) => Ok(Formula::or(
                    parse_formula(ctx, scope, p)?,
                    parse_formula(ctx, scope, q)?,
                )),
                ("implies", [p, q]) => Ok(Formula::implies(
                    parse_formula(ctx, scope, p)?,
                    parse_formula(ctx, scope, q)?,
                )),
                ("not", [p]) => Ok(Formula::not(parse_formula(ctx, scope, p)?)),
                ("iff", [p, q]) => Ok(Formula::iff(
                    parse_formula(ctx, scope, p)?,
                    parse_formula(ctx, scope, q)?,
                )),
                ("forall", [x, ty, body]) | ("exists", [x, ty, body]) => {
                    let x = x.as_atom()?.to_string();
                    let ty = parse_type(ty)?;
                    let mut inner = scope.clone();
                    inner.insert(x.clone(), ty.clone());
                    let body = parse_formula(ctx, &inner, body)?;
                    Ok(if head == "forall" {
                        Formula::forall(x, ty, body)
                    } else {
                        Formula::exists(x, ty, body)
                    })
                }
                ("member", [t, s]) => {
                    Formula::member(parse_term(ctx, scope, t)?, parse_term(ctx, scope, s)?)
                        .map_err(type_error)
                }
                ("cor", [id]) => {
                    let id = id.as_atom()?;
                    match ctx.families.get(id) {
                        Some(fam) => Ok(Formula::CountableOr(fam.clone())),
                        None => err(l, c, format!("unregistered formula family `{id}`")),
                    }
                }
                _ => err(l, c, format!("invalid formula form `{head}`")),
            }
        }
    }
}

fn parse_var_decl(sexp: &Sexp) -> Result<VarDecl, ParseError> {
    let items = sexp.as_list()?;
    match items {
        [name, ty] => Ok((name.as_atom()?.to_string(), parse_type(ty)?)),
        _ => {
            let (l, c) = sexp.pos();
            err(l, c, "expected (name type)")
        }
    }
}

pub fn parse_context(sexp: &Sexp) -> Result<Context, ParseError> {
    let (l, c) = sexp.pos();
    let decls: Vec<VarDecl> = sexp
        .as_list()?
        .iter()
        .map(parse_var_decl)
        .collect::<Result<_, _>>()?;
    Context::new(decls).map_err(|e| ParseError {
        line: l,
        col: c,
        message: e.to_string(),
    })
}

fn scope_of(ctx: &Context) -> Scope {
    ctx.entries().iter().cloned().collect()
}

pub fn parse_sequent(ctx: &ParseCtx, sexp: &Sexp) -> Result<Sequent, ParseError> {
    let (l, c) = sexp.pos();
    let (head, rest) = sexp.head()?;
    if head != "seq" {
        return err(l, c, "expected (seq context lhs rhs)");
    }
    match rest {
        [context, lhs, rhs] => {
            let context = parse_context(context)?;
            let scope = scope_of(&context);
            let lhs = parse_formula(ctx, &scope, lhs)?;
            let rhs = parse_formula(ctx, &scope, rhs)?;
            Sequent::new(context, lhs, rhs).map_err(|e| ParseError {
                line: l,
                col: c,
                message: e.to_string(),
            })
        }
        _ => err(l, c, "expected (seq context lhs rhs)"),
    }
}

fn parse_rule(
    ctx: &ParseCtx,
    scope: &Scope,
    sexp: &Sexp,
) -> Result<(RuleId, RuleParams), ParseError> {
    let (l, c) = sexp.pos();
    let (head, rest) = sexp.head()?;
    let simple = |rule: RuleId| Ok((rule, RuleParams::None));
    match (head, rest) {
        ("ax", []) => simple(RuleId::Ax),
        ("cut", []) => simple(RuleId::Cut),
        ("subst", bindings) => {
            let bindings: Vec<(VarDecl, Term)> = bindings
                .iter()
                .map(|b| {
                    let items = b.as_list()?;
                    match items {
                        [decl, term] => Ok((parse_var_decl(decl)?, parse_term(ctx, scope, term)?)),
                        _ => {
                            let (l, c) = b.pos();
                            err(l, c, "expected ((x type) term)")
                        }
                    }
                })
                .collect::<Result<_, _>>()?;
            Ok((RuleId::Subst, RuleParams::Subst(bindings)))
        }
        ("top-r", []) => simple(RuleId::TopR),
        ("bot-l", []) => simple(RuleId::BotL),
        ("and-i", []) => simple(RuleId::AndI),
        ("and-el", []) => simple(RuleId::AndEL),
        ("and-er", []) => simple(RuleId::AndER),
        ("or-i", []) => simple(RuleId::OrI),
        ("or-el", []) => simple(RuleId::OrEL),
        ("or-er", []) => simple(RuleId::OrER),
        ("imp-i", []) => simple(RuleId::ImpI),
        ("imp-e", []) => simple(RuleId::ImpE),
        ("forall-i", []) => simple(RuleId::ForallI),
        ("forall-e", []) => simple(RuleId::ForallE),
        ("exists-i", []) => simple(RuleId::ExistsI),
        ("exists-e", []) => simple(RuleId::ExistsE),
        ("eq-i", []) => simple(RuleId::EqI),
        ("eq-e", [pairs, base]) => {
            let pairs: Vec<(VarDecl, VarDecl)> = pairs
                .as_list()?
                .iter()
                .map(|p| {
                    let items = p.as_list()?;
                    match items {
                        [x, y] => Ok((parse_var_decl(x)?, parse_var_decl(y)?)),
                        _ => {
                            let (l, c) = p.pos();
                            err(l, c, "expected ((x type) (y type))")
                        }
                    }
                })
                .collect::<Result<_, _>>()?;
            let base = parse_formula(ctx, scope, base)?;
            Ok((RuleId::EqE, RuleParams::EqE { pairs, base }))
        }
        ("mem-1", []) => simple(RuleId::Mem1),
        ("mem-2", []) => simple(RuleId::Mem2),
        ("bigor-i", [n]) => {
            let n = parse_usize(n)?;
            Ok((
                RuleId::BigOrI,
                RuleParams::BigOrCertificate { stable_at: n },
            ))
        }
        ("bigor-e", [i]) => simple(RuleId::BigOrE(parse_usize(i)?)),
        ("set-i", []) => simple(RuleId::SetI),
        ("set-e", []) => simple(RuleId::SetE),
        ("derived", [name]) => simple(RuleId::DerivedSequent(name.as_atom()?.to_string())),
        _ => err(l, c, format!("unknown rule `{head}`")),
    }
}

fn parse_usize(sexp: &Sexp) -> Result<usize, ParseError> {
    let (l, c) = sexp.pos();
    sexp.as_atom()?.parse().map_err(|_| ParseError {
        line: l,
        col: c,
        message: "expected a number".into(),
    })
}

/// `(infer <rule> <sequent> <premise>*)`
pub fn parse_proof(ctx: &ParseCtx, sexp: &Sexp) -> Result<ProofTree, ParseError> {
    let (l, c) = sexp.pos();
    let (head, rest) = sexp.head()?;
    if head != "infer" {
        return err(l, c, "expected (infer rule sequent premises...)");
    }
    match rest {
        [rule, sequent, premises @ ..] => {
            let conclusion = parse_sequent(ctx, sequent)?;
            let scope = scope_of(&conclusion.context);
            let (rule, params) = parse_rule(ctx, &scope, rule)?;
            let premises = premises
                .iter()
                .map(|p| parse_proof(ctx, p))
                .collect::<Result<_, _>>()?;
            Ok(ProofTree::new(conclusion, rule, params, premises))
        }
        _ => err(l, c, "expected (infer rule sequent premises...)"),
    }
}

// ---------------------------------------------------------------------------
// Printers

pub fn print_context(ctx: &Context) -> String {
    let mut out = String::from("(");
    for (i, (n, t)) in ctx.entries().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({n} {t})");
    }
    out.push(')');
    out
}

pub fn print_sequent(seq: &Sequent) -> String {
    format!(
        "(seq {} {} {})",
        print_context(&seq.context),
        seq.lhs,
        seq.rhs
    )
}

fn print_rule(rule: &RuleId, params: &RuleParams) -> String {
    match (rule, params) {
        (RuleId::Subst, RuleParams::Subst(bindings)) => {
            let mut out = String::from("(subst");
            for ((n, ty), t) in bindings {
                let _ = write!(out, " (({n} {ty}) {t})");
            }
            out.push(')');
            out
        }
        (RuleId::EqE, RuleParams::EqE { pairs, base }) => {
            let mut out = String::from("(eq-e (");
            for (i, ((xn, xt), (yn, yt))) in pairs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "(({xn} {xt}) ({yn} {yt}))");
            }
            let _ = write!(out, ") {base})");
            out
        }
        (RuleId::BigOrI, RuleParams::BigOrCertificate { stable_at }) => {
            format!("(bigor-i {stable_at})")
        }
        (rule, _) => format!("({rule})"),
    }
}

pub fn print_proof(tree: &ProofTree) -> String {
    let mut out = format!(
        "(infer {} {}",
        print_rule(&tree.rule, &tree.params),
        print_sequent(&tree.conclusion)
    );
    for p in &tree.premises {
        out.push(' ');
        out.push_str(&print_proof(p));
    }
    out.push(')');
    out
}

pub fn print_signature(sig: &Signature) -> String {
    let mut out = String::from("(signature (types");
    for t in &sig.base_types {
        let _ = write!(out, " {t}");
    }
    out.push_str(") (functions");
    for (f, (d, c)) in &sig.functions {
        let _ = write!(out, " ({f} {d} {c})");
    }
    out.push_str(") (relations");
    for (r, t) in &sig.relations {
        let _ = write!(out, " ({r} {t})");
    }
    out.push_str("))");
    out
}

// ---------------------------------------------------------------------------
// Mathematical notation (for traces and comments)

pub fn math_type(ty: &TypeExpr) -> String {
    match ty {
        TypeExpr::Base(n) => n.clone(),
        TypeExpr::Unit => "𝟙".into(),
        TypeExpr::Omega => "Ω".into(),
        TypeExpr::Product(l, r) => format!("({} × {})", math_type(l), math_type(r)),
        TypeExpr::Power(t) => format!("P{}", math_type(t)),
    }
}

pub fn math_term(t: &Term) -> String {
    use crate::syntax::TermKind::*;
    match &t.kind {
        Var(n) => n.clone(),
        Star => "∗".into(),
        Pair(l, r) => format!("⟨{},{}⟩", math_term(l), math_term(r)),
        Fst(x) => format!("fst({})", math_term(x)),
        Snd(x) => format!("snd({})", math_term(x)),
        App(f, x) => format!("{f}({})", math_term(x)),
        Comprehension(x, ty, body) => {
            format!("{{{x}:{} | {}}}", math_type(ty), math_formula(body))
        }
    }
}

pub fn math_formula(f: &Formula) -> String {
    match f {
        Formula::Top => "⊤".into(),
        Formula::Bot => "⊥".into(),
        Formula::Rel(r, t) => format!("{r}({})", math_term(t)),
        Formula::Eq(a, b) => format!("{} = {}", math_term(a), math_term(b)),
        Formula::And(p, q) => format!("({} ∧ {})", math_formula(p), math_formula(q)),
        Formula::Or(p, q) => format!("({} ∨ {})", math_formula(p), math_formula(q)),
        Formula::Implies(p, q) => format!("({} ⇒ {})", math_formula(p), math_formula(q)),
        Formula::CountableOr(fam) => format!("⋁{{{}}}", fam.id),
        Formula::Forall(x, ty, body) => {
            format!("∀{x}:{}, {}", math_type(ty), math_formula(body))
        }
        Formula::Exists(x, ty, body) => {
            format!("∃{x}:{}, {}", math_type(ty), math_formula(body))
        }
        Formula::Member(t, s) => format!("{} ∈ {}", math_term(t), math_term(s)),
    }
}

pub fn math_sequent(seq: &Sequent) -> String {
    format!(
        "{} ⊢[{}] {}",
        math_formula(&seq.lhs),
        seq.context,
        math_formula(&seq.rhs)
    )
}

// ---------------------------------------------------------------------------
// Documents

#[derive(Debug, Default)]
pub struct Document {
    pub signature: Option<Signature>,
    pub proofs: Vec<(String, ProofTree)>,
    pub formulas: Vec<(String, Context, Formula)>,
    pub terms: Vec<(String, Context, Term)>,
    pub environment: Option<Environment>,
    pub diagram: Option<(DiagramSpec, Environment)>,
}

/// Parses a whole file: an optional signature first, then proofs, named
/// formulas and terms, an environment, and a diagram.
pub fn parse_document(src: &str) -> Result<Document, ParseError> {
    parse_document_with(src, &FamilyRegistry::new())
}

pub fn parse_document_with(src: &str, families: &FamilyRegistry) -> Result<Document, ParseError> {
    let sexps = read_all(src)?;
    let mut doc = Document::default();
    // signature first, wherever it appears
    for sexp in &sexps {
        if let Ok(("signature", rest)) = sexp.head() {
            doc.signature = Some(parse_signature_body(rest, sexp.pos())?);
        }
    }
    let empty_sig = Signature::new();
    for sexp in &sexps {
        let (l, c) = sexp.pos();
        let (head, rest) = sexp.head()?;
        let sig = doc.signature.as_ref().unwrap_or(&empty_sig);
        let pctx = ParseCtx { sig, families };
        match (head, rest) {
            ("signature", _) => {}
            ("proof", [name, node]) => {
                let name = name.as_atom()?.to_string();
                doc.proofs.push((name, parse_proof(&pctx, node)?));
            }
            ("formula", [name, context, f]) => {
                let name = name.as_atom()?.to_string();
                let context = parse_context(context)?;
                let scope = scope_of(&context);
                let f = parse_formula(&pctx, &scope, f)?;
                doc.formulas.push((name, context, f));
            }
            ("term", [name, context, t]) => {
                let name = name.as_atom()?.to_string();
                let context = parse_context(context)?;
                let scope = scope_of(&context);
                let t = parse_term(&pctx, &scope, t)?;
                doc.terms.push((name, context, t));
            }
            ("environment", body) => {
                let sig = doc.signature.clone().ok_or_else(|| ParseError {
                    line: l,
                    col: c,
                    message: "an environment needs a signature earlier in the file".into(),
                })?;
                doc.environment = Some(parse_environment_body(&sig, body, (l, c))?);
            }
            ("diagram", body) => {
                doc.diagram = Some(parse_diagram_body(body, (l, c))?);
            }
            (other, _) => return err(l, c, format!("unknown top-level form `{other}`")),
        }
    }
    Ok(doc)
}

fn parse_signature_body(rest: &[Sexp], pos: (usize, usize)) -> Result<Signature, ParseError> {
    let mut sig = Signature::new();
    for section in rest {
        let (head, items) = section.head()?;
        match head {
            "types" => {
                for t in items {
                    sig = sig.with_base(t.as_atom()?);
                }
            }
            "functions" => {
                for f in items {
                    let parts = f.as_list()?;
                    match parts {
                        [name, dom, cod] => {
                            sig = sig.with_function(
                                name.as_atom()?,
                                parse_type(dom)?,
                                parse_type(cod)?,
                            );
                        }
                        _ => {
                            let (l, c) = f.pos();
                            return err(l, c, "expected (name domtype codtype)");
                        }
                    }
                }
            }
            "relations" => {
                for r in items {
                    let parts = r.as_list()?;
                    match parts {
                        [name, carrier] => {
                            sig = sig.with_relation(name.as_atom()?, parse_type(carrier)?);
                        }
                        _ => {
                            let (l, c) = r.pos();
                            return err(l, c, "expected (name carriertype)");
                        }
                    }
                }
            }
            other => {
                let (l, c) = section.pos();
                return err(l, c, format!("unknown signature section `{other}`"));
            }
        }
    }
    sig.validate().map_err(|e| ParseError {
        line: pos.0,
        col: pos.1,
        message: e.to_string(),
    })?;
    Ok(sig)
}

/// `(environment (base A (a0 a1)) (fun f ((a0 b1) …)) (rel P (a0 …)))`
fn parse_environment_body(
    sig: &Signature,
    body: &[Sexp],
    pos: (usize, usize),
) -> Result<Environment, ParseError> {
    let mut base: BTreeMap<String, FinObj> = BTreeMap::new();
    let mut funs: BTreeMap<String, FinMor> = BTreeMap::new();
    let mut rels: BTreeMap<String, Subobj> = BTreeMap::new();
    type FunTable = (String, Vec<(String, String)>, (usize, usize));
    type RelSet = (String, Vec<String>, (usize, usize));
    let mut fun_tables: Vec<FunTable> = Vec::new();
    let mut rel_sets: Vec<RelSet> = Vec::new();
    for section in body {
        let (head, items) = section.head()?;
        match (head, items) {
            ("base", [name, elements]) => {
                let labels: Vec<Label> = elements
                    .as_list()?
                    .iter()
                    .map(|e| Ok(Label::atom(e.as_atom()?)))
                    .collect::<Result<_, ParseError>>()?;
                base.insert(name.as_atom()?.to_string(), FinObj::new(labels));
            }
            ("fun", [name, table]) => {
                let pairs: Vec<(String, String)> = table
                    .as_list()?
                    .iter()
                    .map(|p| {
                        let items = p.as_list()?;
                        match items {
                            [x, y] => Ok((x.as_atom()?.to_string(), y.as_atom()?.to_string())),
                            _ => {
                                let (l, c) = p.pos();
                                err(l, c, "expected (input output)")
                            }
                        }
                    })
                    .collect::<Result<_, _>>()?;
                fun_tables.push((name.as_atom()?.to_string(), pairs, section.pos()));
            }
            ("rel", [name, elements]) => {
                let labels: Vec<String> = elements
                    .as_list()?
                    .iter()
                    .map(|e| Ok(e.as_atom()?.to_string()))
                    .collect::<Result<_, ParseError>>()?;
                rel_sets.push((name.as_atom()?.to_string(), labels, section.pos()));
            }
            (other, _) => {
                let (l, c) = section.pos();
                return err(l, c, format!("unknown environment section `{other}`"));
            }
        }
    }
    // realize function tables and relation subsets against the base sets
    let lookup = |ty: &TypeExpr, pos: (usize, usize)| -> Result<FinObj, ParseError> {
        match ty {
            TypeExpr::Base(n) => base.get(n).cloned().ok_or(ParseError {
                line: pos.0,
                col: pos.1,
                message: format!("base type {n} has no elements declared"),
            }),
            other => err(
                pos.0,
                pos.1,
                format!("environment files support base-typed symbols only, got {other}"),
            ),
        }
    };
    for (name, pairs, pos) in fun_tables {
        let (dom_ty, cod_ty) = sig.functions.get(&name).ok_or(ParseError {
            line: pos.0,
            col: pos.1,
            message: format!("function {name} not in the signature"),
        })?;
        let dom = lookup(dom_ty, pos)?;
        let cod = lookup(cod_ty, pos)?;
        let table: BTreeMap<Label, Label> = pairs
            .into_iter()
            .map(|(x, y)| (Label::atom(x), Label::atom(y)))
            .collect();
        let mor = FinMor::new(dom, cod, table).map_err(|e| ParseError {
            line: pos.0,
            col: pos.1,
            message: format!("function {name}: {e}"),
        })?;
        funs.insert(name, mor);
    }
    for (name, labels, pos) in rel_sets {
        let carrier_ty = sig.relations.get(&name).ok_or(ParseError {
            line: pos.0,
            col: pos.1,
            message: format!("relation {name} not in the signature"),
        })?;
        let carrier = lookup(carrier_ty, pos)?;
        let sub =
            Subobj::new(carrier, labels.into_iter().map(Label::atom)).map_err(|e| ParseError {
                line: pos.0,
                col: pos.1,
                message: format!("relation {name}: {e}"),
            })?;
        rels.insert(name, sub);
    }
    Environment::new(sig.clone(), base, funs, rels).map_err(|e| ParseError {
        line: pos.0,
        col: pos.1,
        message: e.to_string(),
    })
}

/// `(diagram (objects (A 2) …) (morphisms (f A B ((a0 b1) …)) …))`
/// Object elements are auto-named `<lowercase>0 …`.
fn parse_diagram_body(
    body: &[Sexp],
    pos: (usize, usize),
) -> Result<(DiagramSpec, Environment), ParseError> {
    type RawMorphism = (
        String,
        String,
        String,
        Vec<(String, String)>,
        (usize, usize),
    );
    let mut objects: Vec<(String, usize)> = Vec::new();
    let mut morphisms: Vec<RawMorphism> = Vec::new();
    for section in body {
        let (head, items) = section.head()?;
        match head {
            "objects" => {
                for o in items {
                    let parts = o.as_list()?;
                    match parts {
                        [name, size] => {
                            objects.push((name.as_atom()?.to_string(), parse_usize(size)?))
                        }
                        _ => {
                            let (l, c) = o.pos();
                            return err(l, c, "expected (name cardinality)");
                        }
                    }
                }
            }
            "morphisms" => {
                for m in items {
                    let parts = m.as_list()?;
                    match parts {
                        [name, dom, cod, table] => {
                            let pairs: Vec<(String, String)> = table
                                .as_list()?
                                .iter()
                                .map(|p| {
                                    let items = p.as_list()?;
                                    match items {
                                        [x, y] => {
                                            Ok((x.as_atom()?.to_string(), y.as_atom()?.to_string()))
                                        }
                                        _ => {
                                            let (l, c) = p.pos();
                                            err(l, c, "expected (input output)")
                                        }
                                    }
                                })
                                .collect::<Result<_, _>>()?;
                            morphisms.push((
                                name.as_atom()?.to_string(),
                                dom.as_atom()?.to_string(),
                                cod.as_atom()?.to_string(),
                                pairs,
                                m.pos(),
                            ));
                        }
                        _ => {
                            let (l, c) = m.pos();
                            return err(l, c, "expected (name dom cod table)");
                        }
                    }
                }
            }
            other => {
                let (l, c) = section.pos();
                return err(l, c, format!("unknown diagram section `{other}`"));
            }
        }
    }
    let mut sig = Signature::new();
    let mut base = BTreeMap::new();
    for (name, size) in &objects {
        sig = sig.with_base(name.clone());
        base.insert(name.clone(), FinObj::numbered(&name.to_lowercase(), *size));
    }
    let mut funs = BTreeMap::new();
    let mut diag_mors = Vec::new();
    let index_of = |name: &str, pos: (usize, usize)| -> Result<usize, ParseError> {
        objects
            .iter()
            .position(|(n, _)| n == name)
            .ok_or(ParseError {
                line: pos.0,
                col: pos.1,
                message: format!("unknown diagram object {name}"),
            })
    };
    for (name, dom, cod, pairs, mpos) in morphisms {
        let dom_ix = index_of(&dom, mpos)?;
        let cod_ix = index_of(&cod, mpos)?;
        sig = sig.with_function(name.clone(), TypeExpr::base(&dom), TypeExpr::base(&cod));
        let table: BTreeMap<Label, Label> = pairs
            .into_iter()
            .map(|(x, y)| (Label::atom(x), Label::atom(y)))
            .collect();
        let mor =
            FinMor::new(base[&dom].clone(), base[&cod].clone(), table).map_err(|e| ParseError {
                line: mpos.0,
                col: mpos.1,
                message: format!("morphism {name}: {e}"),
            })?;
        funs.insert(name.clone(), mor);
        diag_mors.push(DiagramMorphism {
            name,
            dom: dom_ix,
            cod: cod_ix,
        });
    }
    let env = Environment::new(sig, base, funs, BTreeMap::new()).map_err(|e| ParseError {
        line: pos.0,
        col: pos.1,
        message: e.to_string(),
    })?;
    let spec = DiagramSpec::new(objects.into_iter().map(|(n, _)| n).collect(), diag_mors).map_err(
        |e| ParseError {
            line: pos.0,
            col: pos.1,
            message: e.to_string(),
        },
    )?;
    Ok((spec, env))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_eq_formula;

    fn sig() -> Signature {
        Signature::new()
            .with_base("A")
            .with_base("B")
            .with_function("f", TypeExpr::base("A"), TypeExpr::base("B"))
            .with_relation("P", TypeExpr::base("A"))
    }

    fn parse_f(src: &str) -> Formula {
        let families = FamilyRegistry::new();
        let sig = sig();
        let ctx = ParseCtx {
            sig: &sig,
            families: &families,
        };
        let sexps = read_all(src).unwrap();
        let scope: Scope = [
            ("x".to_string(), TypeExpr::base("A")),
            ("y".to_string(), TypeExpr::base("A")),
        ]
        .into();
        parse_formula(&ctx, &scope, &sexps[0]).unwrap()
    }

    #[test]
    fn parse_spec_grammar_examples() {
        let f = parse_f("(exists x A (eq x y))");
        assert!(matches!(f, Formula::Exists(..)));
        let g = parse_f("(member x (comp w A true))");
        assert!(matches!(g, Formula::Member(..)));
    }

    #[test]
    fn round_trip_formula() {
        let f = parse_f("(implies (rel P x) (or (eq x y) (exists w A (eq w x))))");
        let printed = f.to_string();
        let again = parse_f(&printed);
        assert!(alpha_eq_formula(&f, &again));
    }

    #[test]
    fn parse_error_has_position() {
        let e = read_all("(and true").unwrap_err();
        assert_eq!(e.line, 1);
        let sexps = read_all("(bogus x)").unwrap();
        let families = FamilyRegistry::new();
        let sig = sig();
        let ctx = ParseCtx {
            sig: &sig,
            families: &families,
        };
        let out = parse_formula(&ctx, &Scope::new(), &sexps[0]);
        assert!(out.is_err());
    }

    #[test]
    fn reserved_bang_rejected() {
        assert!(read_all("(eq !x y)").is_err());
    }

    #[test]
    fn proof_round_trip() {
        use crate::sequent::lemmas::lemma_library;
        for entry in lemma_library() {
            let printed = format!("(proof {} {})", entry.name, print_proof(&entry.tree));
            let doc_src = format!(
                "{}\n{}",
                print_signature(&crate::sequent::lemmas::standard_signature()),
                printed
            );
            let doc = parse_document(&doc_src).unwrap();
            assert_eq!(doc.proofs.len(), 1);
            let (_, tree) = &doc.proofs[0];
            assert_eq!(tree.node_count(), entry.tree.node_count());
            assert!(tree.conclusion.matches(&entry.tree.conclusion));
        }
    }

    #[test]
    fn diagram_document() {
        let src = r#"
(diagram
  (objects (A 2) (B 2))
  (morphisms (f A B ((a0 b0) (a1 b1)))))
"#;
        let doc = parse_document(src).unwrap();
        let (spec, env) = doc.diagram.unwrap();
        assert_eq!(spec.objects.len(), 2);
        assert_eq!(spec.morphisms.len(), 1);
        assert_eq!(env.base_object("A").unwrap().size(), 2);
    }

    #[test]
    fn environment_document() {
        let src = r#"
(signature (types A B) (functions (f A B)) (relations (P A)))
(environment
  (base A (a0 a1))
  (base B (b0))
  (fun f ((a0 b0) (a1 b0)))
  (rel P (a1)))
"#;
        let doc = parse_document(src).unwrap();
        let env = doc.environment.unwrap();
        assert_eq!(env.base_object("A").unwrap().size(), 2);
        assert_eq!(env.relation("P").unwrap().size(), 1);
    }
}
