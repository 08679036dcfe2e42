//! Reduction of know-how and announcements to the classical epistemic language,
//! and normal forms for the propositional fragment.

mod normal;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::proofs::axioms::Axiom;
use crate::syntax::{fresh_atom, Atom, Formula};

pub use normal::{normal_form, realizations, simplify_general_tensor, RealizationBudget};

/// One rewrite: the subformula at `path` of `before` (the redex) was replaced by
/// `reduct`, giving `after`. `redex <-> reduct` is an instance of `rule`, or for
/// `KKhp` and `SUB∀` an equivalence derivable from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub rule: Axiom,
    pub before: Formula,
    pub after: Formula,
    pub path: Vec<usize>,
    pub redex: Formula,
    pub reduct: Formula,
}

/// Elimination of one innermost announcement, as a whole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacroStep {
    pub redex: Formula,
    pub reduct: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteTrace {
    pub steps: Vec<RewriteStep>,
    pub macro_steps: Vec<MacroStep>,
}

impl RewriteTrace {
    /// The formula the trace ends with, given the one it started from.
    pub fn result<'a>(&'a self, start: &'a Formula) -> &'a Formula {
        self.steps.last().map_or(start, |s| &s.after)
    }
}

impl fmt::Display for RewriteTrace {
    /// One line per step: `<rule> : <before> ==> <after>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{} : {} ==> {}", s.rule, s.before, s.after)?;
        }
        Ok(())
    }
}

pub fn subformula_at<'a>(f: &'a Formula, path: &[usize]) -> Option<&'a Formula> {
    path.iter()
        .try_fold(f, |cur, &i| cur.children().get(i).copied())
}

/// `f` with the subformula at `path` replaced by `g`.
pub fn replace_at(f: &Formula, path: &[usize], g: Formula) -> Formula {
    let Some((&i, rest)) = path.split_first() else {
        return g;
    };
    let mut g = Some(g);
    let mut j = 0;
    f.map_children(|c| {
        let out = if j == i {
            replace_at(c, rest, g.take().expect("single replacement"))
        } else {
            c.clone()
        };
        j += 1;
        out
    })
}

fn find_preorder(f: &Formula, pred: &impl Fn(&Formula) -> bool, path: &mut Vec<usize>) -> bool {
    if pred(f) {
        return true;
    }
    for (i, c) in f.children().into_iter().enumerate() {
        path.push(i);
        if find_preorder(c, pred, path) {
            return true;
        }
        path.pop();
    }
    false
}

fn first_kh(f: &Formula) -> Option<Vec<usize>> {
    let mut path = Vec::new();
    find_preorder(f, &|g| matches!(g, Formula::Kh(_)), &mut path).then_some(path)
}

/// Leftmost announcement all of whose proper subformulas are announcement-free.
fn innermost_announcement(f: &Formula) -> Option<Vec<usize>> {
    let mut path = Vec::new();
    find_preorder(
        f,
        &|g| match g {
            Formula::Announce(a, b) => !a.contains_announcement() && !b.contains_announcement(),
            _ => false,
        },
        &mut path,
    )
    .then_some(path)
}

struct Rewriter {
    current: Formula,
    avoid: BTreeSet<Atom>,
    trace: RewriteTrace,
}

impl Rewriter {
    fn new(f: &Formula) -> Self {
        Rewriter {
            current: f.clone(),
            avoid: f.atoms(),
            trace: RewriteTrace::default(),
        }
    }

    fn fresh(&mut self) -> Atom {
        let q = fresh_atom(&self.avoid);
        self.avoid.insert(q.clone());
        q
    }

    fn apply(&mut self, rule: Axiom, path: Vec<usize>, reduct: Formula) {
        let redex = subformula_at(&self.current, &path)
            .expect("rewrite path inside formula")
            .clone();
        let after = replace_at(&self.current, &path, reduct.clone());
        let before = std::mem::replace(&mut self.current, after.clone());
        self.trace.steps.push(RewriteStep {
            rule,
            before,
            after,
            path,
            redex,
            reduct,
        });
    }

    fn kh_step(&mut self, path: Vec<usize>) {
        let Some(Formula::Kh(body)) = subformula_at(&self.current, &path) else {
            unreachable!("path points at a Kh node");
        };
        let body = (**body).clone();
        let kh = Formula::kh_unchecked;
        let (rule, reduct) = match body {
            Formula::Atom(_) => (Axiom::KKhp, Formula::k(body)),
            Formula::Bottom => (Axiom::KhBot, Formula::Bottom),
            Formula::And(a, b) => (Axiom::KhAnd, Formula::and(kh(*a), kh(*b))),
            Formula::Or(a, b) => (Axiom::KhOr, Formula::or(kh(*a), kh(*b))),
            Formula::Implies(a, b) => {
                let q = self.fresh();
                let inner = Formula::announce(
                    Formula::Atom(q.clone()),
                    Formula::implies(kh(*a), kh(*b)),
                );
                (Axiom::KhImp, Formula::k(Formula::forall(q, inner)))
            }
            Formula::Tensor(sig, args) if sig.is_binary() => {
                let q = self.fresh();
                let qf = Formula::Atom(q.clone());
                let [a, b]: [Formula; 2] = args.try_into().expect("binary tensor");
                let body = Formula::and(
                    Formula::announce(qf.clone(), kh(a)),
                    Formula::announce(Formula::not(qf), kh(b)),
                );
                (Axiom::KhTensor, Formula::exists(q, Formula::k(body)))
            }
            Formula::Tensor(sig, args) => {
                let qs: Vec<Atom> = (0..sig.n()).map(|_| self.fresh()).collect();
                (
                    Axiom::KhTensorKn,
                    crate::proofs::axioms::kh_tensor_kn_rhs(sig, &args, &qs),
                )
            }
            Formula::K(_) | Formula::Kh(_) | Formula::Forall(..) | Formula::Announce(..) => {
                unreachable!("Kh bodies are propositional")
            }
        };
        self.apply(rule, path, reduct);
    }

    fn eliminate_kh(&mut self) {
        while let Some(path) = first_kh(&self.current) {
            self.kh_step(path);
        }
    }

    /// Rewrites the announcement-headed subformula at `path`, whose announced
    /// formula and body are announcement-free.
    fn announcement_step(&mut self, path: Vec<usize>) {
        let Some(Formula::Announce(chi, body)) = subformula_at(&self.current, &path) else {
            unreachable!("path points at an announcement");
        };
        let (chi, body) = ((**chi).clone(), (**body).clone());
        let ann = |x: &Formula| Formula::announce(chi.clone(), x.clone());
        let (rule, reduct) = match &body {
            Formula::Atom(_) | Formula::Bottom => {
                (Axiom::AnnAtom, Formula::implies(chi.clone(), body.clone()))
            }
            Formula::And(a, b) => (Axiom::AnnConnective, Formula::and(ann(a), ann(b))),
            Formula::Or(a, b) => (Axiom::AnnConnective, Formula::or(ann(a), ann(b))),
            Formula::Implies(a, b) => (Axiom::AnnConnective, Formula::implies(ann(a), ann(b))),
            Formula::Tensor(sig, args) => (
                Axiom::AnnConnective,
                Formula::Tensor(*sig, args.iter().map(ann).collect()),
            ),
            Formula::K(a) => (
                Axiom::AnnK,
                Formula::implies(chi.clone(), Formula::k(ann(a))),
            ),
            Formula::Forall(p, a) if chi.atoms().contains(p) => {
                let q = self.fresh();
                let renamed = a
                    .substitute(p, &Formula::Atom(q.clone()))
                    .expect("fresh atom cannot be captured");
                let mut inner = path.clone();
                inner.push(1);
                self.apply(Axiom::SubForall, inner, Formula::forall(q, renamed));
                return;
            }
            Formula::Forall(p, a) => (Axiom::AnnForall, Formula::forall(p.clone(), ann(a))),
            Formula::Kh(_) | Formula::Announce(..) => {
                unreachable!("checked before rewriting")
            }
        };
        self.apply(rule, path, reduct);
    }

    fn eliminate_announcements(&mut self) {
        while let Some(path) = innermost_announcement(&self.current) {
            let redex = subformula_at(&self.current, &path).unwrap().clone();
            loop {
                let sub = subformula_at(&self.current, &path).unwrap();
                let mut rel = Vec::new();
                if !find_preorder(sub, &|g| matches!(g, Formula::Announce(..)), &mut rel) {
                    break;
                }
                let mut abs = path.clone();
                abs.extend(rel);
                self.announcement_step(abs);
            }
            let reduct = subformula_at(&self.current, &path).unwrap().clone();
            self.trace.macro_steps.push(MacroStep { redex, reduct });
        }
    }
}

pub fn eliminate_kh(f: &Formula) -> Formula {
    eliminate_kh_traced(f).1
}

/// Replaces each `Kh` by its reduction, leftmost first.
pub fn eliminate_kh_traced(f: &Formula) -> (RewriteTrace, Formula) {
    let mut rw = Rewriter::new(f);
    rw.eliminate_kh();
    (rw.trace, rw.current)
}

pub fn eliminate_announcements(f: &Formula) -> Result<Formula> {
    Ok(eliminate_announcements_traced(f)?.1)
}

/// Replaces each announcement by its reduction, innermost first. The input must
/// be free of `Kh`.
pub fn eliminate_announcements_traced(f: &Formula) -> Result<(RewriteTrace, Formula)> {
    if f.contains_kh() {
        return Err(Error::Domain(format!(
            "announcement elimination needs a Kh-free formula, got `{f}`"
        )));
    }
    let mut rw = Rewriter::new(f);
    rw.eliminate_announcements();
    Ok((rw.trace, rw.current))
}

pub fn to_classical_epistemic(f: &Formula) -> Formula {
    to_classical_epistemic_traced(f).1
}

/// Eliminates `Kh`, then announcements. The trace covers both phases.
pub fn to_classical_epistemic_traced(f: &Formula) -> (RewriteTrace, Formula) {
    let mut rw = Rewriter::new(f);
    rw.eliminate_kh();
    rw.eliminate_announcements();
    (rw.trace, rw.current)
}

/// Nesting measure for announcements: `[a]b` has rank `ar(a) + ar(b) + 1`.
pub fn announcement_rank(f: &Formula) -> Result<usize> {
    if f.contains_kh() {
        return Err(Error::Domain(format!(
            "announcement rank is defined for Kh-free formulas, got `{f}`"
        )));
    }
    Ok(rank(f))
}

fn rank(f: &Formula) -> usize {
    match f {
        Formula::Announce(a, b) => rank(a) + rank(b) + 1,
        _ => f.children().into_iter().map(rank).max().unwrap_or(0),
    }
}
