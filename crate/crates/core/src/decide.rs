//! Validity and entailment: exact for the propositional fragment, bounded model
//! search for the full language, and the tensor classification experiment.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use crate::enumerate::{formulas_up_to_height, Connective};
use crate::error::{Error, Result};
use crate::models::{canonical_model_capped, class_id, valuation_classes, Model, WorldSet};
use crate::par::{find_map_first, find_map_first_range, Parallelism};
use crate::satisfaction::{extension, EvalLimits};
use crate::support::{Profile, SupportEngine};
use crate::syntax::{Atom, Formula, PropFormula, TensorSig};

/// Largest number of models a bounded search will enumerate.
pub const MAX_BOUNDED_MODELS: u64 = 2_000_000;

/// Largest number of contexts the classification experiment will enumerate.
pub const MAX_CONTEXTS: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// `world` of `model` falsifies the formula.
    CounterexamplePointed { model: Model, world: usize },
    /// `state` of `model` refutes the formula; `minimal` is a substate of it that
    /// still refutes it but none of whose proper substates obtained by dropping one
    /// world does.
    CounterexampleState {
        model: Model,
        state: WorldSet,
        minimal: Option<WorldSet>,
    },
    NoCounterexampleUpTo(usize),
}

impl Verdict {
    /// `Valid` or no counterexample found.
    pub fn is_positive(&self) -> bool {
        matches!(self, Verdict::Valid | Verdict::NoCounterexampleUpTo(_))
    }

    /// The JSON report. Counterexample models are in the model file format, so the
    /// `model` field can be loaded back as a model.
    pub fn to_json(&self) -> Value {
        match self {
            Verdict::Valid => json!({ "verdict": "valid" }),
            Verdict::NoCounterexampleUpTo(n) => {
                json!({ "verdict": "no-counterexample", "max_worlds": n })
            }
            Verdict::CounterexamplePointed { model, world } => json!({
                "verdict": "counterexample",
                "model": model.to_json(&BTreeMap::new()),
                "world": model.world_id(*world),
            }),
            Verdict::CounterexampleState {
                model,
                state,
                minimal,
            } => {
                let mut states = BTreeMap::from([("counterexample".to_string(), state.clone())]);
                if let Some(m) = minimal {
                    states.insert("minimal".to_string(), m.clone());
                }
                json!({
                    "verdict": "counterexample",
                    "model": model.to_json(&states),
                    "state": "counterexample",
                })
            }
        }
    }
}

fn vocabulary(formulas: &[&Formula]) -> Vec<Atom> {
    let set: BTreeSet<Atom> = formulas.iter().flat_map(|f| f.atoms()).collect();
    set.into_iter().collect()
}

/// Drops worlds from `start`, first to last, while `fails` still holds.
fn shrink(start: &WorldSet, fails: impl Fn(&WorldSet) -> bool) -> WorldSet {
    let mut cur = start.clone();
    for w in start.iter() {
        let mut smaller = cur.clone();
        smaller.remove(w);
        if fails(&smaller) {
            cur = smaller;
        }
    }
    cur
}

/// Exact validity of a propositional formula, decided on the full state of the
/// canonical model over its atoms.
pub fn valid_inq(a: &PropFormula, limits: &EvalLimits) -> Result<Verdict> {
    let vocab = vocabulary(&[a.as_formula()]);
    let model = canonical_model_capped(&vocab, limits.max_vocabulary)?;
    let full = model.all_worlds();
    let mut engine = SupportEngine::new(&model, &full, limits.support).map_err(|e| e.at(a))?;
    if engine.supports_state(a) {
        return Ok(Verdict::Valid);
    }
    let profile = engine.profile(a).clone();
    let subs = engine.substates();
    let minimal = shrink(&full, |t| !profile.contains(subs.to_mask(t)));
    Ok(Verdict::CounterexampleState {
        model,
        state: full,
        minimal: Some(minimal),
    })
}

/// Whether every nonempty state of the canonical model over the combined vocabulary
/// that supports all of `gamma` supports `a`. The counterexample is the first
/// failing state in increasing bit order.
pub fn entails_inq(gamma: &[PropFormula], a: &PropFormula, limits: &EvalLimits) -> Result<Verdict> {
    let mut all: Vec<&Formula> = gamma.iter().map(|g| g.as_formula()).collect();
    all.push(a.as_formula());
    let vocab = vocabulary(&all);
    let model = canonical_model_capped(&vocab, limits.max_vocabulary)?;
    let full = model.all_worlds();
    let mut engine = SupportEngine::new(&model, &full, limits.support)?;
    let premises: Vec<Profile> = gamma.iter().map(|g| engine.profile(g).clone()).collect();
    let conclusion = engine.profile(a).clone();
    let subs = engine.substates();
    let refutes = |mask: u64| premises.iter().all(|p| p.contains(mask)) && !conclusion.contains(mask);
    let hit = find_map_first_range(limits.parallelism, 1..subs.full_mask() + 1, |mask| {
        refutes(mask).then_some(mask)
    });
    Ok(match hit {
        None => Verdict::Valid,
        Some(mask) => {
            let state = subs.to_set(mask);
            let minimal = shrink(&state, |t| !t.is_empty() && refutes(subs.to_mask(t)));
            Verdict::CounterexampleState {
                model,
                state,
                minimal: Some(minimal),
            }
        }
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| {
        acc.saturating_mul(n - i) / (i + 1)
    })
}

/// Nondecreasing sequences of length `n` over `0..classes`, lexicographically.
fn multisets(classes: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n).rev().find(|&i| cur[i] + 1 < classes) else {
            return out;
        };
        let v = cur[i] + 1;
        cur[i..].iter_mut().for_each(|x| *x = v);
    }
}

/// The models searched by [`valid_bounded`], in search order: by world count, then
/// by the multiset of valuation classes over `vocab`.
pub fn bounded_models(vocab: &[Atom], max_worlds: usize) -> Result<Vec<Model>> {
    let classes = valuation_classes(vocab);
    let total = (1..=max_worlds as u64).fold(0u64, |acc, n| {
        acc.saturating_add(binomial(classes.len() as u64 + n - 1, n))
    });
    if total > MAX_BOUNDED_MODELS {
        return Err(Error::budget("bounded models", MAX_BOUNDED_MODELS, total));
    }
    let mut models = Vec::new();
    for n in 1..=max_worlds {
        for ms in multisets(classes.len(), n) {
            let ids = ms
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let id = class_id(vocab, &classes[c]);
                    format!("w{i}{}", &id[1..])
                })
                .collect();
            let cls: Vec<BTreeSet<Atom>> = ms.iter().map(|&c| classes[c].clone()).collect();
            models.push(Model::from_classes(ids, &cls)?);
        }
    }
    Ok(models)
}

/// Searches all models with up to `max_worlds` worlds over the free atoms of `f`
/// for a world falsifying `f`.
pub fn valid_bounded(f: &Formula, max_worlds: usize, limits: &EvalLimits) -> Result<Verdict> {
    f.check_well_formed()?;
    let vocab: Vec<Atom> = f.free_atoms().into_iter().collect();
    if vocab.len() > limits.max_vocabulary {
        return Err(Error::budget(
            "vocabulary",
            limits.max_vocabulary as u64,
            vocab.len(),
        ));
    }
    let models = bounded_models(&vocab, max_worlds)?;
    let inner = EvalLimits {
        parallelism: Parallelism::Sequential,
        ..*limits
    };
    let hit = find_map_first(limits.parallelism, &models, |m| {
        match extension(m, f, &inner) {
            Err(e) => Some(Err(e)),
            Ok(ext) => m
                .all_worlds()
                .difference(&ext)
                .first()
                .map(|w| Ok((m.clone(), w))),
        }
    });
    Ok(match hit.transpose()? {
        None => Verdict::NoCounterexampleUpTo(max_worlds),
        Some((model, world)) => Verdict::CounterexamplePointed { model, world },
    })
}

/// One comparison of the ternary tensor with a candidate definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T23Check {
    pub label: &'static str,
    pub candidate: PropFormula,
    /// First separating substate, if any.
    pub witness: Option<WorldSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct T23Report {
    pub model: Model,
    pub state: WorldSet,
    pub psi: PropFormula,
    pub target: PropFormula,
    pub checks: Vec<T23Check>,
    pub depth: usize,
    pub contexts: usize,
    /// Number of contexts equivalent to each candidate, in `checks` order.
    pub class_counts: Vec<usize>,
    /// Contexts matching no candidate.
    pub unclassified: Vec<PropFormula>,
}

impl T23Report {
    /// The target differs from every candidate and every context matched one.
    pub fn confirmed(&self) -> bool {
        self.checks.iter().all(|c| c.witness.is_some()) && self.unclassified.is_empty()
    }

    pub fn to_json(&self) -> Value {
        let ids = |s: &WorldSet| self.model.state_ids(s);
        json!({
            "state": ids(&self.state),
            "psi": self.psi.to_string(),
            "target": self.target.to_string(),
            "checks": self.checks.iter().map(|c| json!({
                "candidate": c.label,
                "formula": c.candidate.to_string(),
                "equivalent": c.witness.is_none(),
                "witness": c.witness.as_ref().map(ids),
            })).collect::<Vec<_>>(),
            "depth": self.depth,
            "contexts": self.contexts,
            "classes": self.checks.iter().zip(&self.class_counts)
                .map(|(c, n)| (c.label.to_string(), json!(n)))
                .collect::<serde_json::Map<_, _>>(),
            "unclassified": self.unclassified.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "confirmed": self.confirmed(),
        })
    }
}

/// The six-world model where world `w_ij` makes exactly `p_i` and `p_j` true.
pub fn t23_model() -> Model {
    let atoms: Vec<Atom> = (1..=4)
        .map(|i| Atom::new(&format!("p{i}")).expect("valid name"))
        .collect();
    let mut ids = Vec::new();
    let mut classes = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            ids.push(format!("w{}{}", i + 1, j + 1));
            classes.push(BTreeSet::from([atoms[i].clone(), atoms[j].clone()]));
        }
    }
    Model::from_classes(ids, &classes).expect("fixed model is well formed")
}

/// Compares `tensor[2,3](psi, psi, psi)` with `bot`, `psi`, `psi (+) psi` and `top`
/// on the six-world state, and classifies every context of height at most `depth`
/// built from `bot`, the hole `p0`, one extra atom, `&`, `|`, `->` and `(+)`.
pub fn t23_report(depth: usize) -> Result<T23Report> {
    let model = t23_model();
    let state = model.all_worlds();
    let psi = Formula::disjunction(
        (1..=4).map(|i| Formula::atom(&format!("p{i}")).expect("valid name")),
    );
    let target = Formula::Tensor(
        TensorSig::new(2, 3).expect("valid signature"),
        vec![psi.clone(); 3],
    );
    let candidates: [(&'static str, Formula); 4] = [
        ("bot", Formula::Bottom),
        ("psi", psi.clone()),
        ("psi (+) psi", Formula::tensor2(psi.clone(), psi.clone())),
        ("top", Formula::top()),
    ];
    let hole = Atom::new("p0").expect("valid name");
    let leaves = [
        Formula::Bottom,
        Formula::Atom(hole.clone()),
        Formula::atom("x").expect("valid name"),
    ];
    let connectives = [
        Connective::And,
        Connective::Or,
        Connective::Implies,
        Connective::Tensor(TensorSig::BINARY),
    ];
    let contexts = formulas_up_to_height(&leaves, &connectives, depth, MAX_CONTEXTS)?;

    let mut engine = SupportEngine::new(&model, &state, Default::default())?;
    let prop = PropFormula::new_unchecked;
    let target_profile = engine.profile(&prop(target.clone())).clone();
    let mut checks = Vec::new();
    let mut profiles = Vec::new();
    for (label, c) in candidates {
        let p = engine.profile(&prop(c.clone())).clone();
        let witness = target_profile
            .first_difference(&p)
            .map(|m| engine.substates().to_set(m));
        checks.push(T23Check {
            label,
            candidate: prop(c),
            witness,
        });
        profiles.push(p);
    }
    let mut class_counts = vec![0; profiles.len()];
    let mut unclassified = Vec::new();
    for ctx in &contexts {
        let instance = ctx.substitute(&hole, &psi)?;
        let p = engine.profile(&prop(instance));
        match profiles.iter().position(|c| c == p) {
            Some(i) => class_counts[i] += 1,
            None => unclassified.push(prop(ctx.clone())),
        }
    }
    Ok(T23Report {
        model,
        state,
        psi: prop(psi),
        target: prop(target),
        checks,
        depth,
        contexts: contexts.len(),
        class_counts,
        unclassified,
    })
}
