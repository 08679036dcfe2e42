//! Proof scripts and the line-by-line checker.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::axioms::{matches_axiom, Axiom};
use crate::error::{Error, Result};
use crate::syntax::{parse, render_sugared, Atom, Formula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(Axiom),
    /// `Mp(i, j)`: line `j` is `line i -> this line`.
    Mp(usize, usize),
    NecK(usize),
    GenForall(usize, Atom),
    /// Line `i` is `phi <-> psi` and this line is `chi[phi/psi] <-> chi`.
    Rre(usize),
    /// Line `i` is `phi <-> psi` and this line is line `j` with some occurrences
    /// of `psi` replaced by `phi`; shorthand for `Rre` followed by `Mp`.
    RreInto(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofLine {
    pub index: usize,
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofScript {
    pub goal: Option<Formula>,
    pub lines: Vec<ProofLine>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofVerdict {
    Accepted,
    Rejected { line: usize, reason: String },
}

impl ProofVerdict {
    pub fn is_accepted(&self) -> bool {
        *self == ProofVerdict::Accepted
    }
}

impl fmt::Display for ProofVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofVerdict::Accepted => f.write_str("accepted"),
            ProofVerdict::Rejected { line, reason } => {
                write!(f, "rejected at line {line}: {reason}")
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ScriptRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    goal: Option<String>,
    lines: Vec<LineRepr>,
}

#[derive(Serialize, Deserialize)]
struct LineRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    formula: String,
    by: Value,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ProofFile(msg.into())
}

fn parse_by(by: &Value, line: usize) -> Result<Justification> {
    let obj = by
        .as_object()
        .filter(|o| o.len() == 1)
        .ok_or_else(|| bad(format!("line {line}: `by` must be an object with one key")))?;
    let (key, v) = obj.iter().next().expect("one entry");
    let idx = |v: &Value| {
        v.as_u64()
            .map(|i| i as usize)
            .ok_or_else(|| bad(format!("line {line}: expected a line number in `{key}`")))
    };
    fn pair<'v>(v: &'v Value, line: usize, key: &str) -> Result<(&'v Value, &'v Value)> {
        match v.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((a, b)),
            _ => Err(bad(format!("line {line}: `{key}` expects two entries"))),
        }
    }
    Ok(match key.as_str() {
        "axiom" => {
            let name = v
                .as_str()
                .ok_or_else(|| bad(format!("line {line}: axiom name must be a string")))?;
            Justification::Axiom(name.parse()?)
        }
        "mp" => {
            let (a, b) = pair(v, line, key)?;
            Justification::Mp(idx(a)?, idx(b)?)
        }
        "necK" => Justification::NecK(idx(v)?),
        "genForall" => {
            let (a, p) = pair(v, line, key)?;
            let p = p
                .as_str()
                .ok_or_else(|| bad(format!("line {line}: bound atom must be a string")))?;
            Justification::GenForall(idx(a)?, Atom::new(p)?)
        }
        "rre" => match v {
            Value::Array(_) => {
                let (a, b) = pair(v, line, key)?;
                Justification::RreInto(idx(a)?, idx(b)?)
            }
            _ => Justification::Rre(idx(v)?),
        },
        other => return Err(bad(format!("line {line}: unknown justification `{other}`"))),
    })
}

impl Justification {
    fn to_json(&self) -> Value {
        match self {
            Justification::Axiom(a) => json!({ "axiom": a.name() }),
            Justification::Mp(i, j) => json!({ "mp": [i, j] }),
            Justification::NecK(i) => json!({ "necK": i }),
            Justification::GenForall(i, p) => json!({ "genForall": [i, p.name()] }),
            Justification::Rre(i) => json!({ "rre": i }),
            Justification::RreInto(i, j) => json!({ "rre": [i, j] }),
        }
    }

    fn premises(&self) -> Vec<usize> {
        match self {
            Justification::Axiom(_) => vec![],
            Justification::Mp(i, j) | Justification::RreInto(i, j) => vec![*i, *j],
            Justification::NecK(i) | Justification::GenForall(i, _) | Justification::Rre(i) => {
                vec![*i]
            }
        }
    }
}

impl ProofScript {
    pub fn new() -> Self {
        ProofScript::default()
    }

    /// Appends a line numbered after the last one and returns its index.
    pub fn push(&mut self, formula: Formula, by: Justification) -> usize {
        let index = self.lines.last().map_or(1, |l| l.index + 1);
        self.lines.push(ProofLine { index, formula, by });
        index
    }

    pub fn last_formula(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ScriptRepr = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let goal = raw.goal.as_deref().map(parse).transpose()?;
        let mut lines = Vec::new();
        for (pos, l) in raw.lines.iter().enumerate() {
            let index = l.index.unwrap_or(pos + 1);
            let formula = parse(&l.formula)?;
            lines.push(ProofLine {
                index,
                formula,
                by: parse_by(&l.by, index)?,
            });
        }
        Ok(ProofScript { goal, lines })
    }

    fn repr(&self) -> ScriptRepr {
        ScriptRepr {
            goal: self.goal.as_ref().map(render_sugared),
            lines: self
                .lines
                .iter()
                .map(|l| LineRepr {
                    index: Some(l.index),
                    formula: render_sugared(&l.formula),
                    by: l.by.to_json(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self.repr()).expect("script serialization is infallible")
    }

    /// The proof file text, fields in reading order.
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.repr()).expect("script serialization is infallible")
    }
}

/// Whether `this` arises from `orig` by replacing at least one occurrence of `psi`
/// by `phi`, none of them inside a `Kh`.
fn replaces(this: &Formula, orig: &Formula, phi: &Formula, psi: &Formula) -> bool {
    fn walk(this: &Formula, orig: &Formula, phi: &Formula, psi: &Formula) -> Option<bool> {
        if orig == psi && this == phi {
            return Some(true);
        }
        if this == orig {
            return Some(false);
        }
        match (this, orig) {
            (Formula::Kh(_), Formula::Kh(_)) => None,
            (Formula::Forall(p, _), Formula::Forall(q, _)) if p != q => None,
            (Formula::Tensor(s, _), Formula::Tensor(t, _)) if s != t => None,
            _ if std::mem::discriminant(this) == std::mem::discriminant(orig) => {
                let (tc, oc) = (this.children(), orig.children());
                if tc.len() != oc.len() {
                    return None;
                }
                let mut any = false;
                for (t, o) in tc.into_iter().zip(oc) {
                    any |= walk(t, o, phi, psi)?;
                }
                Some(any)
            }
            _ => None,
        }
    }
    walk(this, orig, phi, psi) == Some(true)
}

/// Where a rewrite inside `Kh` would be needed to relate `this` and `orig`.
fn kh_blocked(this: &Formula, orig: &Formula) -> bool {
    match (this, orig) {
        (Formula::Kh(a), Formula::Kh(b)) => a != b,
        _ if std::mem::discriminant(this) == std::mem::discriminant(orig) => this
            .children()
            .into_iter()
            .zip(orig.children())
            .any(|(t, o)| kh_blocked(t, o)),
        _ => false,
    }
}

fn check_line<'a>(
    f: &Formula,
    by: &Justification,
    get: &impl Fn(usize) -> &'a Formula,
) -> std::result::Result<(), String> {
    match by {
        Justification::Axiom(a) => match matches_axiom(*a, f) {
            Some(_) => Ok(()),
            None => Err(format!("not an instance of {a}")),
        },
        Justification::Mp(i, j) => {
            let expected = Formula::implies(get(*i).clone(), f.clone());
            if *get(*j) == expected {
                Ok(())
            } else {
                Err(format!("line {j} is not `line {i} -> this line`"))
            }
        }
        Justification::NecK(i) => {
            if *f == Formula::k(get(*i).clone()) {
                Ok(())
            } else {
                Err(format!("not K applied to line {i}"))
            }
        }
        Justification::GenForall(i, p) => {
            let (Formula::Implies(a, b), Formula::Implies(c, d)) = (get(*i), f) else {
                return Err("generalization needs implications".into());
            };
            if a != c || **d != Formula::forall(p.clone(), (**b).clone()) {
                return Err(format!("not `phi -> forall {p}. psi` for line {i}"));
            }
            if a.occurs_free(p) {
                return Err(format!("`{p}` occurs free in the antecedent"));
            }
            Ok(())
        }
        Justification::Rre(i) => {
            let (phi, psi) = get(*i)
                .as_iff()
                .ok_or_else(|| format!("line {i} is not an equivalence"))?;
            let (l, r) = f.as_iff().ok_or("not an equivalence")?;
            rre_target(l, r, phi, psi)
        }
        Justification::RreInto(i, j) => {
            let (phi, psi) = get(*i)
                .as_iff()
                .ok_or_else(|| format!("line {i} is not an equivalence"))?;
            rre_target(f, get(*j), phi, psi)
        }
    }
}

fn rre_target(
    this: &Formula,
    orig: &Formula,
    phi: &Formula,
    psi: &Formula,
) -> std::result::Result<(), String> {
    if replaces(this, orig, phi, psi) {
        Ok(())
    } else if kh_blocked(this, orig) {
        Err("replacement inside the scope of Kh".into())
    } else {
        Err("not obtained by replacing occurrences of the equivalence".into())
    }
}

/// Checks every line in order. Malformed references are errors; lines that do not
/// follow are a rejection.
pub fn check_proof(s: &ProofScript) -> Result<ProofVerdict> {
    if s.lines.is_empty() {
        return Err(bad("empty proof"));
    }
    let mut by_index: BTreeMap<usize, usize> = BTreeMap::new();
    for (pos, line) in s.lines.iter().enumerate() {
        if by_index.keys().next_back().is_some_and(|&last| line.index <= last) {
            return Err(bad(format!("line numbers must increase (line {})", line.index)));
        }
        for p in line.by.premises() {
            if !by_index.contains_key(&p) {
                return Err(bad(format!(
                    "line {} cites {p}, which is not an earlier line",
                    line.index
                )));
            }
        }
        by_index.insert(line.index, pos);
    }
    for line in &s.lines {
        let get = |i: usize| &s.lines[by_index[&i]].formula;
        if let Err(reason) = check_line(&line.formula, &line.by, &get) {
            return Ok(ProofVerdict::Rejected {
                line: line.index,
                reason,
            });
        }
    }
    let last = s.lines.last().expect("nonempty");
    if let Some(goal) = &s.goal {
        if *goal != last.formula {
            return Ok(ProofVerdict::Rejected {
                line: last.index,
                reason: "last line differs from the goal".into(),
            });
        }
    }
    Ok(ProofVerdict::Accepted)
}
