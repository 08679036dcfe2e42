//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use inqkh::decide::{bounded_models, t23_report};
use inqkh::models::canonical_model;
use inqkh::par::{self, Parallelism};
use inqkh::proofs::{check_proof, matches_axiom, reduction_trace, Axiom, Justification, ProofScript, ProofVerdict};
use inqkh::resolution::{resolutions_at, uniform_resolution, Budget};
use inqkh::rewrite::{
    announcement_rank, eliminate_announcements_traced, normal_form, to_classical_epistemic, RealizationBudget,
};
use inqkh::support::{relativized_witness, supports, SupportLimits};
use inqkh::{entails_inq, extension, valid_bounded, valid_inq, EvalLimits, Formula, PropFormula, Verdict, WorldSet};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn truth_resolution_bridge() -> Outcome {
    let corpus = prop_corpus();
    let m = canonical_model(&atoms(&["p", "q"])).unwrap();
    let limits = EvalLimits::default();
    let failures = par::try_map(Parallelism::Parallel, &corpus, |a| -> Result<Option<String>, String> {
        for w in 0..m.len() {
            let sat = inqkh::satisfies(&m, w, a, &limits).map_err(|e| e.to_string())?;
            let res = resolutions_at(&m, w, a, Budget::default()).map_err(|e| e.to_string())?;
            if sat == res.is_empty() {
                return Ok(Some(format!("{a} at {}", m.world_id(w))));
            }
        }
        Ok(None)
    })?;
    let bad: Vec<String> = failures.into_iter().flatten().collect();
    ensure(bad.is_empty(), || format!("{} mismatches, first: {}", bad.len(), bad[0]))?;
    Ok(format!("{} formulas x {} worlds agree", corpus.len(), m.len()))
}

fn kh_support_bridge() -> Outcome {
    let corpus = tensor_corpus();
    let full = canonical_model(&atoms(&["p", "q"])).unwrap();
    let submodels: Vec<_> = nonempty_states(&full)
        .iter()
        .map(|x| full.restrict(x).unwrap())
        .collect();
    let budget = Budget { max_space_size: 1_000_000 };
    // None: over budget; Some(Err): mismatch.
    let results = par::map(Parallelism::Parallel, &corpus, |a| {
        for m in &submodels {
            let uniform = match uniform_resolution(m, a, budget) {
                Ok(r) => r.is_some(),
                Err(_) => return None,
            };
            let sup = supports(m, &m.all_worlds(), a).unwrap();
            if uniform != sup {
                return Some(Err(format!("{a} on {:?}", m.world_ids())));
            }
        }
        Some(Ok(()))
    });
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let bad: Vec<&String> = results.iter().flatten().filter_map(|r| r.as_ref().err()).collect();
    ensure(bad.is_empty(), || format!("{} mismatches, first: {}", bad.len(), bad[0]))?;
    Ok(format!(
        "{} formulas x {} submodels agree ({skipped} over the resolution budget)",
        corpus.len() - skipped,
        submodels.len()
    ))
}

fn reduction_soundness() -> Outcome {
    let corpus = instance_corpus(50, 3);
    let mut instances = Vec::new();
    for ax in Axiom::ALL {
        for (i, inst) in corpus.iter().enumerate() {
            let f = instantiate(ax, inst, i);
            ensure(matches_axiom(ax, &f).is_some(), || format!("{f} is not an instance of {ax}"))?;
            instances.push((ax, f));
        }
    }
    let limits = EvalLimits {
        parallelism: Parallelism::Sequential,
        ..EvalLimits::default()
    };
    let verdicts = par::try_map(Parallelism::Parallel, &instances, |(ax, f)| {
        valid_bounded(f, 3, &limits).map_err(|e| format!("{ax}: {f}: {e}"))
    })?;
    let bad: Vec<String> = instances
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| !v.is_positive())
        .map(|((ax, f), v)| format!("{ax}: {f}: {}", v.to_json()))
        .collect();
    ensure(bad.is_empty(), || format!("{} counterexamples, first: {}", bad.len(), bad[0]))?;
    Ok(format!("{} instances of {} schemas valid up to 3 worlds", instances.len(), Axiom::ALL.len()))
}

fn pipeline_preservation() -> Outcome {
    let corpus = modal_corpus(200, 4);
    let limits = EvalLimits {
        parallelism: Parallelism::Sequential,
        ..EvalLimits::default()
    };
    let counts = par::try_map(Parallelism::Parallel, &corpus, |f| -> Result<usize, String> {
        let g = to_classical_epistemic(f);
        let vocab: Vec<_> = f.free_atoms().into_iter().collect();
        let models = bounded_models(&vocab, 3).map_err(|e| e.to_string())?;
        for m in &models {
            let a = extension(m, f, &limits).map_err(|e| format!("{f}: {e}"))?;
            let b = extension(m, &g, &limits).map_err(|e| format!("{g}: {e}"))?;
            let global = |x: &WorldSet| *x == m.all_worlds();
            if a != b || global(&a) != global(&b) {
                return Err(format!("{f} differs from {g} on {:?}", m.world_ids()));
            }
        }
        Ok(models.len())
    })?;
    Ok(format!(
        "{} formulas, {} model checks, extensions agree",
        corpus.len(),
        counts.iter().sum::<usize>()
    ))
}

fn rank_descent() -> Outcome {
    let corpus: Vec<Formula> = announcement_corpus(300, 5)
        .into_iter()
        .filter(|f| announcement_depth(f) <= 3)
        .collect();
    let mut macros = 0;
    for f in &corpus {
        let (trace, out) = eliminate_announcements_traced(f).map_err(|e| e.to_string())?;
        for m in &trace.macro_steps {
            let (a, b) = (announcement_rank(&m.redex).unwrap(), announcement_rank(&m.reduct).unwrap());
            ensure(b < a, || format!("{} ({a}) ==> {} ({b})", m.redex, m.reduct))?;
            macros += 1;
        }
        let mut prev = announcement_rank(f).unwrap();
        for s in &trace.steps {
            let r = announcement_rank(&s.after).unwrap();
            ensure(r <= prev, || format!("rank rose from {prev} to {r} at {}", s.after))?;
            prev = r;
        }
        ensure(announcement_rank(&out).unwrap() == 0, || format!("{f} left {out}"))?;
    }
    let deepest = corpus.iter().map(announcement_depth).max().unwrap_or(0);
    Ok(format!(
        "{} formulas (nesting up to {deepest}), {macros} eliminations each lower the rank",
        corpus.len()
    ))
}

fn normal_forms() -> Outcome {
    let corpus = tensor_corpus();
    let models: Vec<_> = [vec![], atoms(&["p"]), atoms(&["p", "q"])]
        .iter()
        .map(|v| canonical_model(v).unwrap())
        .collect();
    let results = par::map(Parallelism::Parallel, &corpus, |a| {
        let nf = match normal_form(a, RealizationBudget::default()) {
            Ok(nf) => nf,
            Err(_) => return None,
        };
        for m in &models {
            let w = relativized_witness(m, &m.all_worlds(), a, &nf, SupportLimits::default()).unwrap();
            if let Some(w) = w {
                return Some(Err(format!("{a} vs {nf} at {:?}", m.state_ids(&w))));
            }
        }
        Some(Ok(()))
    });
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let bad: Vec<&String> = results.iter().flatten().filter_map(|r| r.as_ref().err()).collect();
    ensure(bad.is_empty(), || format!("{} mismatches, first: {}", bad.len(), bad[0]))?;
    Ok(format!(
        "{} formulas support-equivalent to their normal form on every state ({skipped} over the realization budget)",
        corpus.len() - skipped
    ))
}

fn replays(v: &Verdict, a: &PropFormula) -> bool {
    match v {
        Verdict::CounterexampleState { model, state, minimal } => {
            !supports(model, state, a).unwrap()
                && minimal.as_ref().is_none_or(|s| !supports(model, s, a).unwrap())
        }
        _ => false,
    }
}

fn spot_validities() -> Outcome {
    let limits = EvalLimits::default();
    let v = valid_inq(&pf("p -> p"), &limits).unwrap();
    ensure(v == Verdict::Valid, || format!("p -> p: {v:?}"))?;
    let lem = pf("p | ~p");
    let v = valid_inq(&lem, &limits).unwrap();
    ensure(replays(&v, &lem), || format!("p | ~p: {v:?}"))?;
    let v = valid_inq(&pf("p (+) ~p"), &limits).unwrap();
    ensure(v == Verdict::Valid, || format!("p (+) ~p: {v:?}"))?;
    let v = valid_bounded(&f("Kh (p | ~p) <-> (K p | K ~p)"), 4, &limits).unwrap();
    ensure(v == Verdict::NoCounterexampleUpTo(4), || format!("Kh (p | ~p): {v:?}"))?;
    Ok("p -> p valid, p | ~p refuted and replayed, p (+) ~p valid, Kh (p | ~p) <-> K p | K ~p up to 4 worlds".into())
}

fn dependence_gap() -> Outcome {
    let dep = pf("=(p,q)");
    let premise = pf("=(p,q) (+) =(p,q)");
    let v = entails_inq(std::slice::from_ref(&premise), &dep, &EvalLimits::default()).unwrap();
    let Verdict::CounterexampleState { model, state, .. } = &v else {
        return Err(format!("expected a counterexample, got {v:?}"));
    };
    ensure(supports(model, state, &premise).unwrap(), || "premise not supported".into())?;
    ensure(replays(&v, &dep), || "conclusion supported on replay".into())?;
    Ok(format!("counterexample state {:?} replayed", model.state_ids(state)))
}

fn t23() -> Outcome {
    let r = t23_report(2).map_err(|e| e.to_string())?;
    let witnesses: Vec<String> = r
        .checks
        .iter()
        .map(|c| match &c.witness {
            Some(w) => format!("{}: {:?}", c.label, r.model.state_ids(w)),
            None => format!("{}: none", c.label),
        })
        .collect();
    ensure(r.confirmed(), || format!("not confirmed: {witnesses:?}, {} unclassified", r.unclassified.len()))?;
    Ok(format!(
        "{} contexts in classes {:?}; witnesses {}",
        r.contexts,
        r.class_counts,
        witnesses.join(", ")
    ))
}

fn golden(name: &str) -> ProofScript {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    ProofScript::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// A deliberately broken copy of `s` that differs in line `i` only.
fn mutate(s: &ProofScript, i: usize, kind: usize) -> ProofScript {
    let mut m = s.clone();
    let line = &mut m.lines[i];
    match kind % 3 {
        0 => line.formula = Formula::and(line.formula.clone(), Formula::Bottom),
        1 => {
            line.by = match &line.by {
                Justification::Axiom(Axiom::Taut) => Justification::Axiom(Axiom::KhK),
                Justification::Axiom(_) => Justification::Axiom(Axiom::Taut),
                Justification::Mp(a, b) => Justification::Mp(*b, *a),
                Justification::Rre(_) => Justification::Axiom(Axiom::AnnK),
                Justification::RreInto(a, b) => Justification::RreInto(*b, *a),
                Justification::NecK(a) => Justification::Mp(*a, *a),
                Justification::GenForall(a, _) => Justification::GenForall(*a, atom("p")),
            }
        }
        _ => line.formula = Formula::not(line.formula.clone()),
    }
    m
}

fn proof_checker() -> Outcome {
    let scripts = [golden("announce_pre.json"), golden("announce_exists.json")];
    for s in &scripts {
        let v = check_proof(s).map_err(|e| e.to_string())?;
        ensure(v.is_accepted(), || format!("golden script: {v}"))?;
    }
    let long = &scripts[1];
    let mut rejected = 0;
    for k in 0..20 {
        let i = (k * 7 + 3) % long.lines.len();
        let m = mutate(long, i, k);
        let v = check_proof(&m).map_err(|e| e.to_string())?;
        ensure(!v.is_accepted(), || format!("mutation {k} of line {} accepted", i + 1))?;
        rejected += 1;
    }
    let corpus = modal_corpus(50, 6);
    for f in &corpus {
        let v = check_proof(&reduction_trace(f)).map_err(|e| e.to_string())?;
        ensure(v.is_accepted(), || format!("trace of {f}: {v}"))?;
    }
    let mut guard = ProofScript::new();
    let base = guard.push(f("(p | ~p) <-> (p -> p)"), Justification::Axiom(Axiom::Taut));
    guard.push(f("Kh (p | ~p) <-> Kh (p -> p)"), Justification::Rre(base));
    let v = check_proof(&guard).map_err(|e| e.to_string())?;
    ensure(
        matches!(&v, ProofVerdict::Rejected { line: 2, reason } if reason.contains("Kh")),
        || format!("guard: {v}"),
    )?;
    Ok(format!(
        "golden scripts accepted, {rejected} mutations rejected, {} traces accepted, Kh guard holds",
        corpus.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("truth-resolution bridge", truth_resolution_bridge),
        ("Kh-support bridge", kh_support_bridge),
        ("reduction soundness", reduction_soundness),
        ("pipeline preservation", pipeline_preservation),
        ("announcement-rank descent", rank_descent),
        ("normal form", normal_forms),
        ("spot validities", spot_validities),
        ("dependence-atom tensor gap", dependence_gap),
        ("ternary tensor kernel", t23),
        ("proof checker", proof_checker),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
