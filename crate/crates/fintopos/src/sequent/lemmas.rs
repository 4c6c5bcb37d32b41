//! Machine-encoded proof trees for the helper lemmas, over a small standard
//! signature, together with the forward builders used to assemble them.
//!
//! Conditional lemmas ("if p ⊢ q then …") are shipped as closed instances:
//! the hypothesis is instantiated so that it becomes an axiom leaf, which
//! keeps every tree checkable without premises.

use crate::sequent::{Context, ProofTree, RuleId, RuleParams, Sequent};
use crate::syntax::{Formula, Signature, Term, TypeExpr, VarDecl};

/// One base type `A` with relation symbols `P`, `Q`, `R` over it.
pub fn standard_signature() -> Signature {
    Signature::new()
        .with_base("A")
        .with_relation("P", TypeExpr::base("A"))
        .with_relation("Q", TypeExpr::base("A"))
        .with_relation("R", TypeExpr::base("A"))
}

/// A named, checkable proof tree together with a human-readable statement.
#[derive(Clone, Debug)]
pub struct LemmaEntry {
    pub name: &'static str,
    pub statement: String,
    pub tree: ProofTree,
}

/// Forward construction of proof trees: each builder derives its conclusion
/// from the premises, and the checker validates the result independently.
pub mod builders {
    use super::*;

    fn seq(context: Context, lhs: Formula, rhs: Formula) -> Sequent {
        Sequent::new(context, lhs, rhs).expect("builder produced an invalid sequent")
    }

    pub fn ax(context: Context, p: Formula) -> ProofTree {
        ProofTree::new(
            seq(context, p.clone(), p),
            RuleId::Ax,
            RuleParams::None,
            vec![],
        )
    }

    pub fn top_r(context: Context, p: Formula) -> ProofTree {
        ProofTree::new(
            seq(context, p, Formula::Top),
            RuleId::TopR,
            RuleParams::None,
            vec![],
        )
    }

    pub fn bot_l(context: Context, p: Formula) -> ProofTree {
        ProofTree::new(
            seq(context, Formula::Bot, p),
            RuleId::BotL,
            RuleParams::None,
            vec![],
        )
    }

    pub fn cut(left: ProofTree, right: ProofTree) -> ProofTree {
        let conclusion = seq(
            left.conclusion.context.clone(),
            left.conclusion.lhs.clone(),
            right.conclusion.rhs.clone(),
        );
        ProofTree::new(conclusion, RuleId::Cut, RuleParams::None, vec![left, right])
    }

    pub fn subst(
        premise: &ProofTree,
        bindings: Vec<(VarDecl, Term)>,
        target: Context,
    ) -> ProofTree {
        let lhs = crate::syntax::substitute_formula(&premise.conclusion.lhs, &bindings)
            .expect("builder bindings well-typed");
        let rhs = crate::syntax::substitute_formula(&premise.conclusion.rhs, &bindings)
            .expect("builder bindings well-typed");
        ProofTree::new(
            seq(target, lhs, rhs),
            RuleId::Subst,
            RuleParams::Subst(bindings),
            vec![premise.clone()],
        )
    }

    pub fn and_i(left: ProofTree, right: ProofTree) -> ProofTree {
        let conclusion = seq(
            left.conclusion.context.clone(),
            left.conclusion.lhs.clone(),
            Formula::and(left.conclusion.rhs.clone(), right.conclusion.rhs.clone()),
        );
        ProofTree::new(
            conclusion,
            RuleId::AndI,
            RuleParams::None,
            vec![left, right],
        )
    }

    pub fn and_el(premise: ProofTree) -> ProofTree {
        let kept = match &premise.conclusion.rhs {
            Formula::And(p, _) => (**p).clone(),
            other => panic!("and_el on non-conjunction {other}"),
        };
        let conclusion = seq(
            premise.conclusion.context.clone(),
            premise.conclusion.lhs.clone(),
            kept,
        );
        ProofTree::new(conclusion, RuleId::AndEL, RuleParams::None, vec![premise])
    }

    pub fn and_er(premise: ProofTree) -> ProofTree {
        let kept = match &premise.conclusion.rhs {
            Formula::And(_, q) => (**q).clone(),
            other => panic!("and_er on non-conjunction {other}"),
        };
        let conclusion = seq(
            premise.conclusion.context.clone(),
            premise.conclusion.lhs.clone(),
            kept,
        );
        ProofTree::new(conclusion, RuleId::AndER, RuleParams::None, vec![premise])
    }

    pub fn or_i(left: ProofTree, right: ProofTree) -> ProofTree {
        let conclusion = seq(
            left.conclusion.context.clone(),
            Formula::or(left.conclusion.lhs.clone(), right.conclusion.lhs.clone()),
            left.conclusion.rhs.clone(),
        );
        ProofTree::new(conclusion, RuleId::OrI, RuleParams::None, vec![left, right])
    }

    pub fn or_el(premise: ProofTree) -> ProofTree {
        let kept = match &premise.conclusion.lhs {
            Formula::Or(p, _) => (**p).clone(),
            other => panic!("or_el on non-disjunction {other}"),
        };
        let conclusion = seq(
            premise.conclusion.context.clone(),
            kept,
            premise.conclusion.rhs.clone(),
        );
        ProofTree::new(conclusion, RuleId::OrEL, RuleParams::None, vec![premise])
    }

    pub fn or_er(premise: ProofTree) -> ProofTree {
        let kept = match &premise.conclusion.lhs {
            Formula::Or(_, q) => (**q).clone(),
            other => panic!("or_er on non-disjunction {other}"),
        };
        let conclusion = seq(
            premise.conclusion.context.clone(),
            kept,
            premise.conclusion.rhs.clone(),
        );
        ProofTree::new(conclusion, RuleId::OrER, RuleParams::None, vec![premise])
    }

    pub fn imp_i(premise: ProofTree) -> ProofTree {
        let (p, q) = match &premise.conclusion.lhs {
            Formula::And(p, q) => ((**p).clone(), (**q).clone()),
            other => panic!("imp_i on non-conjunction {other}"),
        };
        let conclusion = seq(
            premise.conclusion.context.clone(),
            p,
            Formula::implies(q, premise.conclusion.rhs.clone()),
        );
        ProofTree::new(conclusion, RuleId::ImpI, RuleParams::None, vec![premise])
    }

    pub fn imp_e(premise: ProofTree) -> ProofTree {
        let (q, r) = match &premise.conclusion.rhs {
            Formula::Implies(q, r) => ((**q).clone(), (**r).clone()),
            other => panic!("imp_e on non-implication {other}"),
        };
        let conclusion = seq(
            premise.conclusion.context.clone(),
            Formula::and(premise.conclusion.lhs.clone(), q),
            r,
        );
        ProofTree::new(conclusion, RuleId::ImpE, RuleParams::None, vec![premise])
    }

    pub fn forall_i(premise: ProofTree, var: &str, ty: TypeExpr) -> ProofTree {
        let decl = (var.to_string(), ty.clone());
        let conclusion = seq(
            premise.conclusion.context.without(&decl),
            premise.conclusion.lhs.clone(),
            Formula::forall(var, ty, premise.conclusion.rhs.clone()),
        );
        ProofTree::new(conclusion, RuleId::ForallI, RuleParams::None, vec![premise])
    }

    pub fn forall_e(premise: ProofTree) -> ProofTree {
        let (x, ty, body) = match &premise.conclusion.rhs {
            Formula::Forall(x, ty, body) => (x.clone(), ty.clone(), (**body).clone()),
            other => panic!("forall_e on non-universal {other}"),
        };
        let conclusion = seq(
            premise
                .conclusion
                .context
                .extended((x, ty))
                .expect("bound variable clashes with the context"),
            premise.conclusion.lhs.clone(),
            body,
        );
        ProofTree::new(conclusion, RuleId::ForallE, RuleParams::None, vec![premise])
    }

    pub fn exists_i(premise: ProofTree, var: &str, ty: TypeExpr) -> ProofTree {
        let decl = (var.to_string(), ty.clone());
        let conclusion = seq(
            premise.conclusion.context.without(&decl),
            Formula::exists(var, ty, premise.conclusion.lhs.clone()),
            premise.conclusion.rhs.clone(),
        );
        ProofTree::new(conclusion, RuleId::ExistsI, RuleParams::None, vec![premise])
    }

    pub fn exists_e(premise: ProofTree) -> ProofTree {
        let (x, ty, body) = match &premise.conclusion.lhs {
            Formula::Exists(x, ty, body) => (x.clone(), ty.clone(), (**body).clone()),
            other => panic!("exists_e on non-existential {other}"),
        };
        let conclusion = seq(
            premise
                .conclusion
                .context
                .extended((x, ty))
                .expect("bound variable clashes with the context"),
            body,
            premise.conclusion.rhs.clone(),
        );
        ProofTree::new(conclusion, RuleId::ExistsE, RuleParams::None, vec![premise])
    }

    pub fn eq_i(context: Context, t: Term) -> ProofTree {
        let conclusion = seq(
            context,
            Formula::Top,
            Formula::eq(t.clone(), t).expect("same term"),
        );
        ProofTree::new(conclusion, RuleId::EqI, RuleParams::None, vec![])
    }

    pub fn eq_e(context: Context, pairs: Vec<(VarDecl, VarDecl)>, base: Formula) -> ProofTree {
        let mut conjuncts: Vec<Formula> = pairs
            .iter()
            .map(|((xn, xt), (yn, yt))| {
                Formula::eq(
                    Term::var(xn.clone(), xt.clone()),
                    Term::var(yn.clone(), yt.clone()),
                )
                .expect("paired variables share a type")
            })
            .collect();
        conjuncts.push(base.clone());
        let lhs = Formula::and_all(conjuncts).expect("nonempty");
        let bindings: Vec<(VarDecl, Term)> = pairs
            .iter()
            .map(|(x, (yn, yt))| (x.clone(), Term::var(yn.clone(), yt.clone())))
            .collect();
        let rhs = crate::syntax::substitute_formula(&base, &bindings).expect("well-typed");
        ProofTree::new(
            seq(context, lhs, rhs),
            RuleId::EqE,
            RuleParams::EqE { pairs, base },
            vec![],
        )
    }

    pub fn bigor_e(premise: &ProofTree, index: usize) -> ProofTree {
        let fam = match &premise.conclusion.lhs {
            Formula::CountableOr(fam) => fam.clone(),
            other => panic!("bigor_e on non-countable-or {other}"),
        };
        let conclusion = seq(
            premise.conclusion.context.clone(),
            fam.member(index),
            premise.conclusion.rhs.clone(),
        );
        ProofTree::new(
            conclusion,
            RuleId::BigOrE(index),
            RuleParams::None,
            vec![premise.clone()],
        )
    }

    pub fn bigor_i(premises: Vec<ProofTree>, countable_or: Formula, stable_at: usize) -> ProofTree {
        let first = premises.first().expect("at least one premise");
        let conclusion = seq(
            first.conclusion.context.clone(),
            countable_or,
            first.conclusion.rhs.clone(),
        );
        ProofTree::new(
            conclusion,
            RuleId::BigOrI,
            RuleParams::BigOrCertificate { stable_at },
            premises,
        )
    }

    pub fn derived(name: &str, sequent: Sequent) -> ProofTree {
        ProofTree::new(
            sequent,
            RuleId::DerivedSequent(name.to_string()),
            RuleParams::None,
            vec![],
        )
    }

    /// The three-node commutation tree `q∧p ⊢ p∧q`.
    pub fn commute_and(context: Context, p: Formula, q: Formula) -> ProofTree {
        let qp = Formula::and(q, p);
        and_i(
            and_er(ax(context.clone(), qp.clone())),
            and_el(ax(context, qp)),
        )
    }

    /// Derived symmetry tree `u=v ⊢ v=u`, built from equality elimination
    /// with two simultaneous pairs, substitution and reflexivity.
    pub fn eq_symmetry(context: Context, u: VarDecl, v: VarDecl) -> ProofTree {
        let ty = u.1.clone();
        let w: VarDecl = ("w".to_string(), ty.clone());
        assert!(
            !context.contains_name("w"),
            "eq_symmetry requires the name w to be free"
        );
        let uv = Formula::eq(
            Term::var(u.0.clone(), ty.clone()),
            Term::var(v.0.clone(), ty.clone()),
        )
        .expect("same type");
        // (u=v) ∧ ((w=u) ∧ (u=w)) ⊢ v=u  by equality elimination
        let wide = context.extended(w.clone()).expect("fresh w");
        let elim = eq_e(
            wide,
            vec![(u.clone(), v.clone()), (w.clone(), u.clone())],
            Formula::eq(
                Term::var(u.0.clone(), ty.clone()),
                Term::var(w.0.clone(), ty.clone()),
            )
            .expect("same type"),
        );
        // substitute w := u to collapse the auxiliary variable
        let collapsed = subst(
            &elim,
            vec![(w, Term::var(u.0.clone(), ty.clone()))],
            context.clone(),
        );
        // u=v ⊢ (u=v) ∧ ((u=u) ∧ (u=u))
        let refl = cut(
            top_r(context.clone(), uv.clone()),
            eq_i(context.clone(), Term::var(u.0.clone(), ty)),
        );
        let inner = and_i(refl.clone(), refl);
        let whole = and_i(ax(context, uv), inner);
        cut(whole, collapsed)
    }
}

use builders as b;

fn ty_a() -> TypeExpr {
    TypeExpr::base("A")
}

fn rel(name: &str, var: &str) -> Formula {
    Formula::Rel(name.into(), Term::var(var, ty_a()))
}

fn ctx(names: &[&str]) -> Context {
    Context::new(names.iter().map(|n| (n.to_string(), ty_a()))).expect("distinct names")
}

/// The distribution tree `p∧(q∨r) ⊢ (p∧q)∨(p∧r)`, reused by two lemmas.
fn distribution_tree(context: Context, p: Formula, q: Formula, r: Formula) -> ProofTree {
    let d = Formula::or(
        Formula::and(p.clone(), q.clone()),
        Formula::and(p.clone(), r.clone()),
    );
    let branch = |keep_left: bool, x: &Formula| {
        let picked = if keep_left {
            b::or_el(b::ax(context.clone(), d.clone()))
        } else {
            b::or_er(b::ax(context.clone(), d.clone()))
        };
        // x∧p ⊢ D, then x ⊢ p ⇒ D
        let commuted = b::cut(
            b::commute_and(context.clone(), p.clone(), x.clone()),
            picked,
        );
        b::imp_i(commuted)
    };
    let both = b::or_i(branch(true, &q), branch(false, &r));
    let applied = b::imp_e(both);
    // p∧(q∨r) ⊢ (q∨r)∧p, then cut
    let flip = b::commute_and(context, Formula::or(q, r), p);
    b::cut(flip, applied)
}

/// Proof trees for the helper lemmas. Every tree checks against the pure
/// rules with no registered derived sequents.
pub fn lemma_library() -> Vec<LemmaEntry> {
    let x = ctx(&["x"]);
    let xy = ctx(&["y"]);
    let p = rel("P", "x");
    let q = rel("Q", "x");
    let r = rel("R", "x");
    let mut out = Vec::new();

    // 1: if p∧q ⊢ r then q∧p ⊢ r (instance r := p∧q)
    {
        let hyp = b::ax(x.clone(), Formula::and(p.clone(), q.clone()));
        let tree = b::cut(b::commute_and(x.clone(), p.clone(), q.clone()), hyp);
        out.push(LemmaEntry {
            name: "and-commute",
            statement: "q ∧ p ⊢ p ∧ q".into(),
            tree,
        });
    }

    // 2: p ⊢ ¬¬p
    {
        let notp = Formula::not(p.clone());
        let pn = Formula::and(p.clone(), notp.clone());
        let flip = b::and_i(
            b::and_er(b::ax(x.clone(), pn.clone())),
            b::and_el(b::ax(x.clone(), pn)),
        );
        let blast = b::imp_e(b::ax(x.clone(), notp));
        let tree = b::imp_i(b::cut(flip, blast));
        out.push(LemmaEntry {
            name: "double-negation",
            statement: "p ⊢ ¬¬p".into(),
            tree,
        });
    }

    // 3: if p ⊢ q then p∧r ⊢ q (instance q := p)
    {
        let hyp = b::ax(x.clone(), p.clone());
        let pr = Formula::and(p.clone(), r.clone());
        let inner = b::imp_i(b::ax(x.clone(), pr));
        let chained = b::cut(hyp, inner);
        let tree = b::and_el(b::imp_e(chained));
        out.push(LemmaEntry {
            name: "and-weaken",
            statement: "p ∧ r ⊢ p".into(),
            tree,
        });
    }

    // 4: ¬q ⊢ ¬(q∧p)
    {
        let notq = Formula::not(q.clone());
        let qp = Formula::and(q.clone(), p.clone());
        let big = Formula::and(notq.clone(), qp.clone());
        let first = b::and_el(b::ax(x.clone(), big.clone()));
        let second = b::and_el(b::and_er(b::ax(x.clone(), big)));
        let to_pair = b::and_i(first, second);
        let blast = b::imp_e(b::ax(x.clone(), notq));
        let tree = b::imp_i(b::cut(to_pair, blast));
        out.push(LemmaEntry {
            name: "neg-and-weaken",
            statement: "¬q ⊢ ¬(q ∧ p)".into(),
            tree,
        });
    }

    // 5: p∧(q∨r) ⊢ (p∧q)∨(p∧r)
    out.push(LemmaEntry {
        name: "and-or-distribute",
        statement: "p ∧ (q ∨ r) ⊢ (p ∧ q) ∨ (p ∧ r)".into(),
        tree: distribution_tree(x.clone(), p.clone(), q.clone(), r.clone()),
    });

    // 6: (p∨q)∧¬q ⊢ p
    {
        let notq = Formula::not(q.clone());
        let pq = Formula::or(p.clone(), q.clone());
        let flip = b::commute_and(x.clone(), notq.clone(), pq.clone());
        let distribute = distribution_tree(x.clone(), notq.clone(), p.clone(), q.clone());
        let left = b::and_er(b::ax(x.clone(), Formula::and(notq.clone(), p.clone())));
        let right = b::cut(
            b::imp_e(b::ax(x.clone(), notq)),
            b::bot_l(x.clone(), p.clone()),
        );
        let join = b::or_i(left, right);
        let tree = b::cut(flip, b::cut(distribute, join));
        out.push(LemmaEntry {
            name: "or-neg-cancel",
            statement: "(p ∨ q) ∧ ¬q ⊢ p".into(),
            tree,
        });
    }

    // 7: (∃x,p)∧q ⊣⊢ ∃x,(p∧q), with x not free in q (context variable y)
    let py = rel("P", "x");
    let qy = rel("Q", "y");
    {
        let e = Formula::exists("x", ty_a(), Formula::and(py.clone(), qy.clone()));
        let start = b::ax(xy.clone(), e.clone());
        let opened = b::exists_e(start);
        let curried = b::imp_i(opened);
        let closed = b::exists_i(curried, "x", ty_a());
        let tree = b::imp_e(closed);
        out.push(LemmaEntry {
            name: "exists-and-in",
            statement: "(∃x, p) ∧ q ⊢ ∃x, (p ∧ q)".into(),
            tree,
        });
    }
    {
        let some_p = Formula::exists("x", ty_a(), py.clone());
        let pandq = Formula::and(py.clone(), qy.clone());
        let wide = xy.extended(("x".to_string(), ty_a())).unwrap();
        let left = b::and_el(b::ax(wide.clone(), pandq.clone()));
        let embed = b::exists_e(b::ax(xy.clone(), some_p.clone()));
        let left_done = b::cut(left, embed);
        let right = b::and_er(b::ax(wide, pandq));
        let paired = b::and_i(left_done, right);
        let tree = b::exists_i(paired, "x", ty_a());
        out.push(LemmaEntry {
            name: "exists-and-out",
            statement: "∃x, (p ∧ q) ⊢ (∃x, p) ∧ q".into(),
            tree,
        });
    }

    // variable substitution, elimination direction:
    // from x=t ⊢ s conclude ⊢ s[x:=t]   (instance s := (x=y), t := y)
    {
        let wide = ctx(&["y", "x"]);
        let x_eq_y = Formula::eq(Term::var("x", ty_a()), Term::var("y", ty_a())).unwrap();
        let hyp = b::ax(wide, x_eq_y);
        let collapsed = b::subst(
            &hyp,
            vec![(("x".to_string(), ty_a()), Term::var("y", ty_a()))],
            xy.clone(),
        );
        let refl = b::eq_i(xy.clone(), Term::var("y", ty_a()));
        let tree = b::cut(refl, collapsed);
        out.push(LemmaEntry {
            name: "subst-elim",
            statement: "if x=t ⊢ s then ⊢ s[x:=t]".into(),
            tree,
        });
    }

    // variable substitution, introduction direction:
    // from ⊢ s[x:=t] conclude x=t ⊢ s   (instance s := (y=x), t := y,
    // which is exactly symmetry of equality)
    {
        let wide = ctx(&["y", "x"]);
        let tree = b::eq_symmetry(wide, ("x".to_string(), ty_a()), ("y".to_string(), ty_a()));
        out.push(LemmaEntry {
            name: "subst-intro",
            statement: "if ⊢ s[x:=t] then x=t ⊢ s".into(),
            tree,
        });
    }

    // monotonicity of ∃: if p ⊢_{Δ,x} q then ∃x,p ⊢ ∃x,q (instance q := p)
    {
        let py_only = rel("P", "y");
        let wide = ctx(&["y", "x"]);
        let hyp = b::ax(wide.clone(), py_only.clone());
        let gen = b::forall_i(hyp, "x", ty_a());
        let widened = b::subst(&gen, vec![], wide.clone());
        let all = Formula::forall("x", ty_a(), py_only.clone());
        let some = Formula::exists("x", ty_a(), py_only.clone());
        let open_all = b::forall_e(b::ax(xy.clone(), all));
        let open_some = b::exists_e(b::ax(xy.clone(), some));
        let bridge = b::cut(open_all, open_some);
        let chained = b::cut(widened, bridge);
        let tree = b::exists_i(chained, "x", ty_a());
        out.push(LemmaEntry {
            name: "exists-mono",
            statement: "if p ⊢_{Δ,x:τ} q then ∃x,p ⊢ ∃x,q".into(),
            tree,
        });
    }

    // witness: p[x:=t] ⊢ ∃x,p (instance p := P(x), t := y)
    {
        let some = Formula::exists("x", ty_a(), rel("P", "x"));
        let opened = b::exists_e(b::ax(xy.clone(), some));
        let tree = b::subst(
            &opened,
            vec![(("x".to_string(), ty_a()), Term::var("y", ty_a()))],
            xy.clone(),
        );
        out.push(LemmaEntry {
            name: "exists-witness",
            statement: "p[x:=t] ⊢ ∃x, p".into(),
            tree,
        });
    }

    // if p ⊢ q then p ⊢ q∨r (instance p := q)
    {
        let hyp = b::ax(x.clone(), q.clone());
        let open_or = b::or_el(b::ax(x.clone(), Formula::or(q.clone(), r.clone())));
        let tree = b::cut(hyp, open_or);
        out.push(LemmaEntry {
            name: "or-intro-right",
            statement: "if p ⊢ q then p ⊢ q ∨ r".into(),
            tree,
        });
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequent::{Checker, DerivedRuleRegistry};

    #[test]
    fn library_has_at_least_eleven_trees() {
        assert!(lemma_library().len() >= 11);
    }

    #[test]
    fn every_lemma_tree_checks() {
        let sig = standard_signature();
        let registry = DerivedRuleRegistry::new();
        let checker = Checker::new(&sig, &registry);
        for entry in lemma_library() {
            if let Err(e) = checker.check_tree(&entry.tree) {
                panic!("lemma {} failed to check: {e}", entry.name);
            }
        }
    }

    #[test]
    fn lemma_conclusions_match_statements() {
        let lib = lemma_library();
        let find = |name: &str| {
            lib.iter()
                .find(|e| e.name == name)
                .unwrap_or_else(|| panic!("missing {name}"))
        };
        let a = TypeExpr::base("A");
        let p = Formula::Rel("P".into(), Term::var("x", a.clone()));
        let q = Formula::Rel("Q".into(), Term::var("x", a.clone()));
        // and-commute: q∧p ⊢ p∧q
        let e = find("and-commute");
        assert!(crate::syntax::alpha_eq_formula(
            &e.tree.conclusion.lhs,
            &Formula::and(q.clone(), p.clone())
        ));
        assert!(crate::syntax::alpha_eq_formula(
            &e.tree.conclusion.rhs,
            &Formula::and(p.clone(), q.clone())
        ));
        // double-negation: p ⊢ (p⇒⊥)⇒⊥
        let e = find("double-negation");
        assert!(crate::syntax::alpha_eq_formula(
            &e.tree.conclusion.rhs,
            &Formula::not(Formula::not(p.clone()))
        ));
        // witness conclusion: P(y) ⊢ ∃x,P(x)
        let e = find("exists-witness");
        assert!(crate::syntax::alpha_eq_formula(
            &e.tree.conclusion.lhs,
            &Formula::Rel("P".into(), Term::var("y", a.clone()))
        ));
        // symmetry: x=y ⊢ y=x
        let e = find("subst-intro");
        assert!(crate::syntax::alpha_eq_formula(
            &e.tree.conclusion.rhs,
            &Formula::eq(Term::var("y", a.clone()), Term::var("x", a)).unwrap()
        ));
    }
}
