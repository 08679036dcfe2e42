//! Command-line front end.
//!
//! Exit status: 0 for a positive verdict or success, 1 for a negative verdict (the
//! witness goes to stdout as JSON), 2 for usage, parse, file and budget errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use inqkh::decide::t23_report;
use inqkh::rewrite::{
    normal_form, realizations, simplify_general_tensor, to_classical_epistemic_traced, RealizationBudget,
};
use inqkh::support::relativized_witness;
use inqkh::syntax::render_sugared;
use inqkh::{
    check_proof, entails_inq, parse, reduction_trace, satisfies, supports, valid_bounded, valid_inq, Error,
    EvalLimits, Formula, KhBackend, Model, ProofScript, ProofVerdict, PropFormula, Verdict, WorldSet,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "inqkh", version, about = "Inquisitive logic and know-how with announcements")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// How `Kh` is evaluated: `support` or `resolution`.
    #[arg(long, global = true, value_name = "B")]
    kh_backend: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula and print it in canonical form.
    Fmt {
        #[arg(short = 'f', long = "formula")]
        formula: String,
    },
    /// Support at a state, or truth at a world, of a model file.
    Eval {
        /// A model file, or a verdict printed by `valid`/`entail`.
        #[arg(long)]
        model: PathBuf,
        /// A named state of the file, or comma-separated world ids.
        #[arg(long, conflicts_with = "world")]
        state: Option<String>,
        #[arg(long)]
        world: Option<String>,
        #[arg(short = 'f', long = "formula")]
        formula: String,
    },
    /// Rewrite into the language with `K` and quantifiers only.
    Reduce {
        #[arg(short = 'f', long = "formula")]
        formula: String,
        /// Write a proof of the equivalence to this file.
        #[arg(long, value_name = "OUT")]
        trace: Option<PathBuf>,
    },
    /// Disjunction of the classical realizations of a propositional formula.
    Nf {
        #[arg(short = 'f', long = "formula")]
        formula: String,
    },
    /// Remove degenerate generalized tensors.
    Simplify {
        #[arg(short = 'f', long = "formula")]
        formula: String,
    },
    /// Search for a counterexample.
    Valid {
        #[arg(short = 'f', long = "formula")]
        formula: String,
        #[arg(long, default_value_t = 3, value_name = "N")]
        max_worlds: usize,
        /// Decide inquisitive validity exactly (propositional input only).
        #[arg(long)]
        inq: bool,
    },
    /// Inquisitive entailment from `;`-separated premises.
    Entail {
        #[arg(short = 'g', long = "premises")]
        premises: String,
        #[arg(short = 'f', long = "formula")]
        formula: String,
    },
    /// Compare two propositional formulas on every substate of a state.
    Equiv {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(short = 'f')]
        a: String,
        #[arg(short = 'g')]
        b: String,
    },
    /// Check a proof script.
    Check { proof: PathBuf },
    /// Compare the ternary tensor with its candidate definitions.
    T23 {
        #[arg(long, default_value_t = 2, value_name = "D")]
        depth: usize,
    },
}

enum Outcome {
    Positive,
    Negative,
}

struct Settings {
    json: bool,
    limits: EvalLimits,
    realization: RealizationBudget,
}

impl Settings {
    /// Prints a report for a successful command or positive verdict.
    fn report(&self, human: impl FnOnce() -> String, machine: impl FnOnce() -> Value) {
        if self.json {
            println!("{}", machine());
        } else {
            println!("{}", human());
        }
    }

    /// Prints a negative verdict: the summary to stderr in human mode, the witness
    /// to stdout either way.
    fn refute(&self, human: impl FnOnce() -> String, witness: Value) -> Outcome {
        if !self.json {
            eprintln!("{}", human());
        }
        println!("{witness}");
        Outcome::Negative
    }
}

fn parse_budget(text: &str, limits: &mut EvalLimits, realization: &mut RealizationBudget) -> Result<(), String> {
    let number = |v: &str| v.trim().parse::<u64>().map_err(|_| format!("INQKH_BUDGET: `{v}` is not a number"));
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item.split_once('=').unwrap_or(("resolution", item));
        let n = number(value)?;
        let small = || u32::try_from(n).map_err(|_| format!("INQKH_BUDGET: `{key}` is too large"));
        match key.trim() {
            "resolution" => limits.resolution.max_space_size = n,
            "quantifier-bits" => limits.max_quantifier_bits = small()?,
            "override-evals" => limits.max_override_evals = n,
            "state-bits" => limits.support.max_state_bits = small()?,
            "vocabulary" => limits.max_vocabulary = n as usize,
            "realizations" => realization.max_realizations = n,
            other => return Err(format!("INQKH_BUDGET: unknown budget `{other}`")),
        }
    }
    Ok(())
}

fn settings(cli: &Cli) -> Result<Settings, String> {
    let mut limits = EvalLimits::default();
    let mut realization = RealizationBudget::default();
    if let Ok(text) = std::env::var("INQKH_BUDGET") {
        parse_budget(&text, &mut limits, &mut realization)?;
    }
    if let Some(b) = &cli.kh_backend {
        limits.kh_backend = b.parse::<KhBackend>().map_err(|e| e.to_string())?;
    }
    Ok(Settings {
        json: cli.json,
        limits,
        realization,
    })
}

fn formula(text: &str) -> Result<Formula, Error> {
    parse(text)
}

fn prop(text: &str) -> Result<PropFormula, Error> {
    PropFormula::parse(text)
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::ModelFile(format!("{}: {e}", path.display())))
}

/// A model file, or the model inside a verdict, with the verdict's state or world.
struct Loaded {
    model: Model,
    states: BTreeMap<String, WorldSet>,
    state: Option<String>,
    world: Option<String>,
}

fn load_model(path: &Path) -> Result<Loaded, Error> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::ModelFile(e.to_string()))?;
    let (inner, state, world) = match value.get("model") {
        Some(m) => (
            m.to_string(),
            value.get("state").and_then(Value::as_str).map(String::from),
            value.get("world").and_then(Value::as_str).map(String::from),
        ),
        None => (text, None, None),
    };
    let (model, states) = Model::from_json(&inner)?;
    Ok(Loaded {
        model,
        states,
        state,
        world,
    })
}

fn resolve_state(l: &Loaded, name: &str) -> Result<WorldSet, Error> {
    if let Some(s) = l.states.get(name) {
        return Ok(s.clone());
    }
    let ids: Vec<&str> = name.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    l.model
        .state(&ids)
        .map_err(|_| Error::ModelFile(format!("no state named `{name}`")))
}

fn state_json(m: &Model, s: &WorldSet) -> Value {
    json!(m.state_ids(s))
}

fn verdict_summary(v: &Verdict) -> String {
    match v {
        Verdict::Valid => "valid".into(),
        Verdict::NoCounterexampleUpTo(n) => format!("no counterexample up to {n} worlds"),
        Verdict::CounterexamplePointed { model, world } => format!(
            "counterexample: world {} of a {}-world model",
            model.world_id(*world),
            model.len()
        ),
        Verdict::CounterexampleState { model, state, minimal } => {
            let mut s = format!("counterexample: state {:?}", model.state_ids(state));
            if let Some(m) = minimal {
                s.push_str(&format!(", minimal {:?}", model.state_ids(m)));
            }
            s
        }
    }
}

fn verdict(cfg: &Settings, v: Verdict) -> Outcome {
    if v.is_positive() {
        cfg.report(|| verdict_summary(&v), || v.to_json());
        Outcome::Positive
    } else {
        cfg.refute(|| verdict_summary(&v), v.to_json())
    }
}

fn run(cli: &Cli, cfg: &Settings) -> Result<Outcome, Error> {
    let limits = &cfg.limits;
    match &cli.command {
        Command::Fmt { formula: text } => {
            let f = formula(text)?;
            cfg.report(
                || render_sugared(&f),
                || json!({ "formula": render_sugared(&f), "plain": f.to_string() }),
            );
            Ok(Outcome::Positive)
        }
        Command::Eval {
            model,
            state,
            world,
            formula: text,
        } => {
            let l = load_model(model)?;
            let f = formula(text)?;
            let (state, world) = match (state, world) {
                (None, None) => (l.state.clone(), l.world.clone()),
                other => (other.0.clone(), other.1.clone()),
            };
            match (state, world) {
                (Some(name), _) => {
                    let a = PropFormula::new(f)?;
                    let s = resolve_state(&l, &name)?;
                    let ok = supports(&l.model, &s, &a)?;
                    let value = json!({ "state": state_json(&l.model, &s), "formula": a.to_string(), "supports": ok });
                    if ok {
                        cfg.report(|| format!("state {name} supports {a}"), || value);
                        Ok(Outcome::Positive)
                    } else {
                        Ok(cfg.refute(|| format!("state {name} does not support {a}"), value))
                    }
                }
                (None, Some(id)) => {
                    let w = l
                        .model
                        .world_index(&id)
                        .ok_or_else(|| Error::ModelFile(format!("no world named `{id}`")))?;
                    let ok = satisfies(&l.model, w, &f, limits)?;
                    let value = json!({ "world": id, "formula": f.to_string(), "satisfies": ok });
                    if ok {
                        cfg.report(|| format!("world {id} satisfies {f}"), || value);
                        Ok(Outcome::Positive)
                    } else {
                        Ok(cfg.refute(|| format!("world {id} does not satisfy {f}"), value))
                    }
                }
                (None, None) => Err(Error::Domain("eval needs --state or --world".into())),
            }
        }
        Command::Reduce { formula: text, trace } => {
            let f = formula(text)?;
            let (steps, out) = to_classical_epistemic_traced(&f);
            if let Some(path) = trace {
                std::fs::write(path, reduction_trace(&f).to_json_pretty() + "\n")
                    .map_err(|e| Error::ProofFile(format!("{}: {e}", path.display())))?;
            }
            cfg.report(
                || render_sugared(&out),
                || {
                    json!({
                        "input": f.to_string(),
                        "output": out.to_string(),
                        "steps": steps.steps.iter().map(|s| json!({
                            "rule": s.rule.name(),
                            "before": s.before.to_string(),
                            "after": s.after.to_string(),
                        })).collect::<Vec<_>>(),
                    })
                },
            );
            Ok(Outcome::Positive)
        }
        Command::Nf { formula: text } => {
            let a = prop(text)?;
            let rl = realizations(&a, cfg.realization)?;
            let nf = normal_form(&a, cfg.realization)?;
            cfg.report(
                || nf.to_string(),
                || {
                    json!({
                        "formula": a.to_string(),
                        "normal_form": nf.to_string(),
                        "realizations": rl.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                    })
                },
            );
            Ok(Outcome::Positive)
        }
        Command::Simplify { formula: text } => {
            let a = prop(text)?;
            let out = simplify_general_tensor(&a);
            cfg.report(|| out.to_string(), || json!({ "formula": a.to_string(), "simplified": out.to_string() }));
            Ok(Outcome::Positive)
        }
        Command::Valid {
            formula: text,
            max_worlds,
            inq,
        } => {
            let v = if *inq {
                valid_inq(&prop(text)?, limits)?
            } else {
                valid_bounded(&formula(text)?, *max_worlds, limits)?
            };
            Ok(verdict(cfg, v))
        }
        Command::Entail { premises, formula: text } => {
            let gamma = premises
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(prop)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(verdict(cfg, entails_inq(&gamma, &prop(text)?, limits)?))
        }
        Command::Equiv { model, state, a, b } => {
            let l = load_model(model)?;
            let s = resolve_state(&l, state)?;
            let (a, b) = (prop(a)?, prop(b)?);
            match relativized_witness(&l.model, &s, &a, &b, limits.support)? {
                None => {
                    cfg.report(
                        || format!("equivalent on every substate of {state}"),
                        || json!({ "equivalent": true }),
                    );
                    Ok(Outcome::Positive)
                }
                Some(w) => {
                    let by_a = supports(&l.model, &w, &a)?;
                    let ids = l.model.state_ids(&w);
                    let value = json!({
                        "equivalent": false,
                        "witness": ids,
                        "supports_a": by_a,
                        "supports_b": !by_a,
                    });
                    Ok(cfg.refute(|| format!("not equivalent: they differ at {ids:?}"), value))
                }
            }
        }
        Command::Check { proof } => {
            let script = ProofScript::from_json(&read(proof)?)?;
            match check_proof(&script)? {
                ProofVerdict::Accepted => {
                    cfg.report(
                        || format!("accepted ({} lines)", script.lines.len()),
                        || json!({ "verdict": "accepted", "lines": script.lines.len() }),
                    );
                    Ok(Outcome::Positive)
                }
                ProofVerdict::Rejected { line, reason } => {
                    let value = json!({ "verdict": "rejected", "line": line, "reason": reason });
                    Ok(cfg.refute(|| format!("rejected at line {line}: {reason}"), value))
                }
            }
        }
        Command::T23 { depth } => {
            let r = t23_report(*depth)?;
            let human = || {
                let mut out = format!("{} vs candidates on {:?}:\n", r.target, r.model.state_ids(&r.state));
                for c in &r.checks {
                    match &c.witness {
                        Some(w) => out.push_str(&format!("  {}: differs at {:?}\n", c.label, r.model.state_ids(w))),
                        None => out.push_str(&format!("  {}: equivalent\n", c.label)),
                    }
                }
                out.push_str(&format!("{} contexts of height <= {}:", r.contexts, r.depth));
                for (c, n) in r.checks.iter().zip(&r.class_counts) {
                    out.push_str(&format!(" {}={n}", c.label));
                }
                out.push_str(&format!(" unclassified={}", r.unclassified.len()));
                out
            };
            if r.confirmed() {
                cfg.report(human, || r.to_json());
                Ok(Outcome::Positive)
            } else {
                Ok(cfg.refute(human, r.to_json()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match settings(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &cfg) {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
