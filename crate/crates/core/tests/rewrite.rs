mod common;

use common::*;
use inqkh::decide::bounded_models;
use inqkh::models::canonical_model;
use inqkh::rewrite::{
    eliminate_announcements, eliminate_kh, normal_form, realizations, simplify_general_tensor,
    to_classical_epistemic, to_classical_epistemic_traced, RealizationBudget,
};
use inqkh::support::{relativized_witness, SupportLimits};
use inqkh::{extension, EvalLimits, Error, Formula};

fn equivalent_up_to(a: &Formula, b: &Formula, worlds: usize) {
    let limits = EvalLimits::default();
    let vocab: Vec<_> = a.free_atoms().union(&b.free_atoms()).cloned().collect();
    for m in bounded_models(&vocab, worlds).unwrap() {
        assert_eq!(
            extension(&m, a, &limits).unwrap(),
            extension(&m, b, &limits).unwrap(),
            "{a} vs {b} on {:?}",
            m.world_ids()
        );
    }
}

fn is_classical(f: &Formula) -> bool {
    !matches!(f, Formula::Or(..) | Formula::Tensor(..)) && f.children().into_iter().all(is_classical)
}

#[test]
fn kh_elimination_is_equivalent_and_complete() {
    for g in modal_corpus(80, 21) {
        let out = eliminate_kh(&g);
        assert!(!out.contains_kh(), "{g} left {out}");
        equivalent_up_to(&g, &out, 2);
    }
}

#[test]
fn announcement_elimination_is_equivalent_and_complete() {
    for g in announcement_corpus(80, 22) {
        let out = eliminate_announcements(&g).unwrap();
        assert!(!out.contains_announcement(), "{g} left {out}");
        equivalent_up_to(&g, &out, 2);
    }
}

#[test]
fn announcements_over_kh_are_refused() {
    let err = eliminate_announcements(&f("[p] Kh q")).unwrap_err();
    assert!(matches!(err, Error::Domain(_)), "{err}");
}

#[test]
fn pipeline_output_is_classical_epistemic_and_stable() {
    for g in modal_corpus(80, 23) {
        let out = to_classical_epistemic(&g);
        assert!(!out.contains_kh() && !out.contains_announcement(), "{out}");
        assert_eq!(to_classical_epistemic(&out), out);
    }
}

#[test]
fn trace_replays_to_the_result() {
    let g = f("[q] Kh (p (+) ~p) & [p] forall p. p");
    let (trace, out) = to_classical_epistemic_traced(&g);
    assert_eq!(trace.result(&g), &out);
    let mut cur = g.clone();
    for s in &trace.steps {
        assert_eq!(s.before, cur);
        cur = s.after.clone();
    }
    assert_eq!(cur, out);
    let text = trace.to_string();
    assert_eq!(text.lines().count(), trace.steps.len());
    assert!(text.lines().all(|l| l.contains(" ==> ")));
}

#[test]
fn realizations_are_classical_and_support_equivalent() {
    let models: Vec<_> = labelled_models(&atoms(&["p", "q"]), 3).into_iter().step_by(7).collect();
    for a in tensor_corpus().iter().step_by(9) {
        let rl = realizations(a, RealizationBudget::default()).unwrap();
        assert!(!rl.is_empty());
        assert!(rl.iter().all(|r| is_classical(r)), "{a}");
        let nf = normal_form(a, RealizationBudget::default()).unwrap();
        for m in &models {
            let w = relativized_witness(m, &m.all_worlds(), a, &nf, SupportLimits::default()).unwrap();
            assert_eq!(w, None, "{a} vs {nf}");
        }
    }
}

#[test]
fn realization_budget_is_enforced() {
    let a = pf("((p | q) -> (p | q | ~p)) -> (p | q | ~q)");
    let err = realizations(&a, RealizationBudget { max_realizations: 4 }).unwrap_err();
    assert!(matches!(err, Error::Budget { .. }), "{err}");
}

#[test]
fn tensor_simplification() {
    assert_eq!(simplify_general_tensor(&pf("tensor[2,2](p, q)")), pf("p & q"));
    assert_eq!(simplify_general_tensor(&pf("tensor[2,3](p, q, bot -> bot)")), pf("tensor[1,2](p, q)"));
    assert_eq!(simplify_general_tensor(&pf("tensor[1,3](p, q, bot)")), pf("p (+) q"));
    let m = canonical_model(&atoms(&["p", "q"])).unwrap();
    for a in tensor_corpus().iter().step_by(5) {
        let b = simplify_general_tensor(a);
        let w = relativized_witness(&m, &m.all_worlds(), a, &b, SupportLimits::default()).unwrap();
        assert_eq!(w, None, "{a} vs {b}");
    }
}
