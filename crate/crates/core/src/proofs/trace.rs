//! Proofs of `f <-> toClassicalEpistemic(f)` generated from rewrite traces.

use super::axioms::Axiom;
use super::check::{Justification, ProofScript};
use crate::rewrite::{to_classical_epistemic_traced, RewriteStep};
use crate::syntax::{Atom, Formula};

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

fn iff(a: &Formula, b: &Formula) -> Formula {
    Formula::iff(a.clone(), b.clone())
}

/// From lines `i: a -> b` and `j: b -> a`, derives `a <-> b`.
fn iff_intro(s: &mut ProofScript, i: usize, j: usize, a: &Formula, b: &Formula) -> usize {
    let taut = imp(&imp(a, b), &imp(&imp(b, a), &iff(a, b)));
    let t = s.push(taut, Justification::Axiom(Axiom::Taut));
    let m = s.push(imp(&imp(b, a), &iff(a, b)), Justification::Mp(i, t));
    s.push(iff(a, b), Justification::Mp(j, m))
}

/// Derives `redex <-> reduct` for one rewrite step.
fn step_equivalence(s: &mut ProofScript, step: &RewriteStep) -> usize {
    let (a, b) = (&step.redex, &step.reduct);
    match step.rule {
        Axiom::KKhp => {
            let i = s.push(imp(a, b), Justification::Axiom(Axiom::KhK));
            let j = s.push(imp(b, a), Justification::Axiom(Axiom::KKhp));
            iff_intro(s, i, j, a, b)
        }
        Axiom::SubForall => {
            let (Formula::Forall(p, body), Formula::Forall(q, renamed)) = (a, b) else {
                unreachable!("renaming steps rewrite binders");
            };
            let (p, q): (&Atom, &Atom) = (p, q);
            let i1 = s.push(imp(a, renamed), Justification::Axiom(Axiom::SubForall));
            let i2 = s.push(imp(a, b), Justification::GenForall(i1, q.clone()));
            let j1 = s.push(imp(b, body), Justification::Axiom(Axiom::SubForall));
            let j2 = s.push(imp(b, a), Justification::GenForall(j1, p.clone()));
            iff_intro(s, i2, j2, a, b)
        }
        rule => s.push(iff(a, b), Justification::Axiom(rule)),
    }
}

/// A proof whose last line is `f <-> toClassicalEpistemic(f)`: each rewrite step
/// contributes the equivalence of redex and reduct and a replacement into the
/// equivalence proved so far.
pub fn reduction_trace(f: &Formula) -> ProofScript {
    let (trace, out) = to_classical_epistemic_traced(f);
    let mut s = ProofScript::new();
    let mut acc: Option<usize> = None;
    for step in &trace.steps {
        let e = step_equivalence(&mut s, step);
        acc = Some(match acc {
            None if step.path.is_empty() => e,
            None => s.push(iff(&step.before, &step.after), Justification::Rre(e)),
            Some(a) => {
                let (x, y) = (&step.redex, &step.reduct);
                let flip = imp(&iff(x, y), &iff(y, x));
                let t = s.push(flip, Justification::Axiom(Axiom::Taut));
                let e2 = s.push(iff(y, x), Justification::Mp(e, t));
                s.push(iff(f, &step.after), Justification::RreInto(e2, a))
            }
        });
    }
    if acc.is_none() {
        s.push(iff(f, f), Justification::Axiom(Axiom::Taut));
    }
    s.goal = Some(iff(f, &out));
    s
}
