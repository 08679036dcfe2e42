mod common;

use common::*;
use inqkh::models::canonical_model;
use inqkh::support::{relativized_witness, supports_with, SupportEngine, SupportLimits};
use inqkh::{supports, Error, PropFormula, WorldSet};

fn sample(corpus: &[PropFormula], step: usize) -> Vec<&PropFormula> {
    corpus.iter().step_by(step).collect()
}

#[test]
fn engine_matches_the_clauses() {
    let corpus = tensor_corpus();
    let formulas = sample(&corpus, 7);
    let models = labelled_models(&atoms(&["p", "q"]), 3);
    for m in models.iter().step_by(5) {
        let mut states = nonempty_states(m);
        states.push(WorldSet::new());
        for a in &formulas {
            for s in &states {
                assert_eq!(
                    supports(m, s, a).unwrap(),
                    naive_supports(m, s, a),
                    "{a} at {:?} of {:?}",
                    m.state_ids(s),
                    m.world_ids()
                );
            }
        }
    }
}

#[test]
fn support_is_downward_closed_and_empty_state_supports_all() {
    let m = canonical_model(&atoms(&["p", "q"])).unwrap();
    for a in tensor_corpus().iter().step_by(3) {
        let mut engine = SupportEngine::new(&m, &m.all_worlds(), SupportLimits::default()).unwrap();
        let profile = engine.profile(a).clone();
        assert!(profile.contains(0), "{a}");
        for s in profile.members() {
            for t in 0..16u64 {
                if t & s == t {
                    assert!(profile.contains(t), "{a}: {s:b} supported but {t:b} not");
                }
            }
        }
    }
}

#[test]
fn engine_answers_substates_consistently() {
    let m = canonical_model(&atoms(&["p", "q"])).unwrap();
    let a = pf("tensor[2,3](p, q, p -> q)");
    let mut engine = SupportEngine::new(&m, &m.all_worlds(), SupportLimits::default()).unwrap();
    for s in nonempty_states(&m) {
        assert_eq!(engine.supports(&a, &s), supports(&m, &s, &a).unwrap());
    }
}

#[test]
fn known_cases() {
    let m = canonical_model(&atoms(&["p", "q"])).unwrap();
    let all = m.all_worlds();
    assert!(!supports(&m, &all, &pf("p | ~p")).unwrap());
    assert!(supports(&m, &all, &pf("p (+) ~p")).unwrap());
    // The world where both hold can only be covered by the first argument.
    assert!(!supports(&m, &all, &pf("tensor[2,3](p | q, ~p, ~q)")).unwrap());
    assert!(supports(&m, &all, &pf("tensor[1,3](p | q, ~p, ~q)")).unwrap());
    assert!(!supports(&m, &all, &pf("=(p,q)")).unwrap());
    let pq = m.state(&["w_pq", "w_q"]).unwrap();
    assert!(supports(&m, &pq, &pf("=(p,q)")).unwrap());
    assert!(!supports(&m, &all, &pf("tensor[2,2](p, q)")).unwrap());
}

#[test]
fn relativized_witness_is_the_first_separating_substate() {
    let m = canonical_model(&atoms(&["p"])).unwrap();
    let all = m.all_worlds();
    let w = relativized_witness(&m, &all, &pf("p | ~p"), &pf("p (+) ~p"), SupportLimits::default()).unwrap();
    assert_eq!(w, Some(all.clone()));
    let none = relativized_witness(&m, &all, &pf("p & p"), &pf("p"), SupportLimits::default()).unwrap();
    assert_eq!(none, None);
}

#[test]
fn oversized_states_are_refused() {
    let m = canonical_model(&atoms(&["p", "q", "r"])).unwrap();
    let limits = SupportLimits { max_state_bits: 2 };
    let err = supports_with(&m, &m.all_worlds(), &pf("p (+) q"), limits).unwrap_err();
    assert!(matches!(err, Error::Budget { .. }), "{err}");
}
