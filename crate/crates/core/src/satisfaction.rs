//! Pointed-model satisfaction for the full language.
//!
//! Formulas are evaluated to their extension, the set of worlds where they hold,
//! relative to a current domain (shrunk by announcements) and a stack of
//! valuation overrides (pushed by quantifiers).

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::models::{Model, Substates, Valuation, WorldSet, DEFAULT_MAX_VOCABULARY};
use crate::par::Parallelism;
use crate::resolution::{uniform_resolution_over, Budget};
use crate::support::{supports_with, SupportLimits};
use crate::syntax::{Atom, Formula, PropFormula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KhBackend {
    /// Support of the body by the whole current domain.
    #[default]
    Support,
    /// Search for a uniform resolution.
    Resolution,
}

impl FromStr for KhBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "support" => Ok(KhBackend::Support),
            "resolution" => Ok(KhBackend::Resolution),
            other => Err(Error::Domain(format!(
                "unknown Kh backend `{other}` (expected `support` or `resolution`)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalLimits {
    /// Quantifiers range over at most `2^max_quantifier_bits` subsets.
    pub max_quantifier_bits: u32,
    /// Total number of quantifier-body evaluations per call.
    pub max_override_evals: u64,
    pub resolution: Budget,
    pub support: SupportLimits,
    pub kh_backend: KhBackend,
    /// Largest vocabulary for canonical models and bounded model search.
    pub max_vocabulary: usize,
    pub parallelism: Parallelism,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits {
            max_quantifier_bits: 16,
            max_override_evals: 1 << 26,
            resolution: Budget::default(),
            support: SupportLimits::default(),
            kh_backend: KhBackend::default(),
            max_vocabulary: DEFAULT_MAX_VOCABULARY,
            parallelism: Parallelism::default(),
        }
    }
}

struct View<'a> {
    model: &'a Model,
    overrides: &'a [(Atom, WorldSet)],
}

impl Valuation for View<'_> {
    fn truth(&self, p: &Atom) -> WorldSet {
        match self.overrides.iter().rev().find(|(q, _)| q == p) {
            Some((_, ext)) => ext.clone(),
            None => self.model.truth(p),
        }
    }

    fn holds(&self, p: &Atom, w: usize) -> bool {
        match self.overrides.iter().rev().find(|(q, _)| q == p) {
            Some((_, ext)) => ext.contains(w),
            None => self.model.holds(p, w),
        }
    }
}

struct Evaluator<'a> {
    model: &'a Model,
    limits: &'a EvalLimits,
    overrides: Vec<(Atom, WorldSet)>,
    evals: u64,
}

impl Evaluator<'_> {
    fn view(&self) -> View<'_> {
        View {
            model: self.model,
            overrides: &self.overrides,
        }
    }

    fn ext(&mut self, f: &Formula, dom: &WorldSet) -> Result<WorldSet> {
        if dom.is_empty() {
            return Ok(WorldSet::new());
        }
        Ok(match f {
            Formula::Atom(p) => self.view().truth(p).intersection(dom),
            Formula::Bottom => WorldSet::new(),
            // Every operand is evaluated over the full current domain: modal
            // subformulas depend on the whole model, not only on their own world.
            Formula::And(a, b) => self.ext(a, dom)?.intersection(&self.ext(b, dom)?),
            Formula::Or(a, b) => self.ext(a, dom)?.union(&self.ext(b, dom)?),
            Formula::Implies(a, b) => {
                let a = self.ext(a, dom)?;
                dom.difference(&a).union(&self.ext(b, dom)?)
            }
            Formula::Tensor(sig, args) => {
                let k = sig.k();
                let mut ge = vec![WorldSet::new(); k + 1];
                ge[0] = dom.clone();
                for a in args {
                    let e = self.ext(a, dom)?;
                    for j in (1..=k).rev() {
                        ge[j] = ge[j].union(&ge[j - 1].intersection(&e));
                    }
                }
                ge.swap_remove(k)
            }
            Formula::K(a) => {
                if self.ext(a, dom)? == *dom {
                    dom.clone()
                } else {
                    WorldSet::new()
                }
            }
            Formula::Kh(a) => {
                let body = PropFormula::new_unchecked((**a).clone());
                let known = match self.limits.kh_backend {
                    KhBackend::Support => {
                        supports_with(&self.view(), dom, &body, self.limits.support)?
                    }
                    KhBackend::Resolution => uniform_resolution_over(
                        &self.view(),
                        dom,
                        &body,
                        self.limits.resolution,
                        Parallelism::Sequential,
                    )?
                    .is_some(),
                };
                if known {
                    dom.clone()
                } else {
                    WorldSet::new()
                }
            }
            Formula::Forall(p, body) => {
                let size = dom.len();
                if size > self.limits.max_quantifier_bits as usize {
                    return Err(Error::budget(
                        "quantifier domain bits",
                        self.limits.max_quantifier_bits as u64,
                        size,
                    )
                    .at(f));
                }
                let local = Substates::new(dom);
                let mut acc = dom.clone();
                for mask in 0..=local.full_mask() {
                    self.evals += 1;
                    if self.evals > self.limits.max_override_evals {
                        return Err(Error::budget(
                            "quantifier evaluations",
                            self.limits.max_override_evals,
                            self.evals,
                        )
                        .at(f));
                    }
                    self.overrides.push((p.clone(), local.to_set(mask)));
                    let r = self.ext(body, dom);
                    self.overrides.pop();
                    acc = acc.intersection(&r?);
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
            Formula::Announce(chi, body) => {
                let x = self.ext(chi, dom)?;
                dom.difference(&x).union(&self.ext(body, &x)?)
            }
        })
    }
}

/// The worlds of `m` where `f` holds.
pub fn extension(m: &Model, f: &Formula, limits: &EvalLimits) -> Result<WorldSet> {
    f.check_well_formed()?;
    let mut ev = Evaluator {
        model: m,
        limits,
        overrides: Vec::new(),
        evals: 0,
    };
    ev.ext(f, &m.all_worlds())
}

pub fn satisfies(m: &Model, w: usize, f: &Formula, limits: &EvalLimits) -> Result<bool> {
    if w >= m.len() {
        return Err(Error::Domain(format!("world index {w} is not in the model")));
    }
    Ok(extension(m, f, limits)?.contains(w))
}

/// Whether `f` holds at every world of `m`.
pub fn holds_globally(m: &Model, f: &Formula, limits: &EvalLimits) -> Result<bool> {
    Ok(extension(m, f, limits)? == m.all_worlds())
}
