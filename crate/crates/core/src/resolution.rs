//! Resolution spaces, actual resolutions at worlds, and uniform resolutions.
//!
//! Resolutions print in a nested text form:
//!
//! ```text
//! r ::= <atom> | bot! | in0(r) | in1(r) | pair(r, r) | tuple(r, r, ...) | fn{r=>r, ...}
//! ```
//!
//! `in0`/`in1` tag the left and right disjunct, `pair` resolves conjunctions and
//! tensors with two arguments, `tuple` resolves tensors with three or more, and
//! `fn` lists the graph of a function in increasing order of its domain.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::models::{Model, Valuation, WorldSet};
use crate::par::{self, Parallelism};
use crate::syntax::{Formula, PropFormula};

pub const DEFAULT_MAX_SPACE: u64 = 1_000_000;

/// Largest resolution space any subformula may have before enumeration is refused.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_space_size: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_space_size: DEFAULT_MAX_SPACE,
        }
    }
}

/// The derived order is the canonical order on every resolution space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Resolution {
    BaseAtom(crate::syntax::Atom),
    /// The formal element of the space of `bot`; never actual.
    BaseBottom,
    Tagged(u8, Box<Resolution>),
    Pair(Box<Resolution>, Box<Resolution>),
    Tuple(Vec<Resolution>),
    Func(BTreeMap<Resolution, Resolution>),
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::BaseAtom(p) => write!(f, "{p}"),
            Resolution::BaseBottom => f.write_str("bot!"),
            Resolution::Tagged(side, r) => write!(f, "in{side}({r})"),
            Resolution::Pair(a, b) => write!(f, "pair({a}, {b})"),
            Resolution::Tuple(items) => {
                f.write_str("tuple(")?;
                for (i, r) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{r}")?;
                }
                f.write_str(")")
            }
            Resolution::Func(graph) => {
                f.write_str("fn{")?;
                for (i, (x, y)) in graph.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}=>{y}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// `|S(a)|`, saturating at `u64::MAX`.
pub fn space_size(a: &Formula) -> u64 {
    match a {
        Formula::Atom(_) | Formula::Bottom => 1,
        Formula::Or(x, y) => space_size(x).saturating_add(space_size(y)),
        Formula::And(x, y) => space_size(x).saturating_mul(space_size(y)),
        Formula::Tensor(_, args) => args
            .iter()
            .fold(1u64, |acc, x| acc.saturating_mul(space_size(x))),
        Formula::Implies(x, y) => {
            let base = space_size(y);
            let exp = space_size(x);
            match u32::try_from(exp) {
                Ok(e) => base.checked_pow(e).unwrap_or(u64::MAX),
                Err(_) if base <= 1 => base,
                Err(_) => u64::MAX,
            }
        }
        _ => unreachable!("resolutions are only defined for propositional formulas"),
    }
}

/// Fails on the innermost subformula whose space exceeds the budget.
fn check_budget(a: &Formula, budget: Budget) -> Result<()> {
    for c in a.children() {
        check_budget(c, budget)?;
    }
    let size = space_size(a);
    if size > budget.max_space_size {
        let needed = if size == u64::MAX {
            "more than 2^64".to_string()
        } else {
            size.to_string()
        };
        return Err(Error::budget("resolution space size", budget.max_space_size, needed).at(a));
    }
    Ok(())
}

fn product(spaces: &[Vec<Resolution>]) -> Vec<Vec<Resolution>> {
    let mut out: Vec<Vec<Resolution>> = vec![Vec::new()];
    for space in spaces {
        let mut next = Vec::with_capacity(out.len() * space.len());
        for prefix in &out {
            for r in space {
                let mut row = prefix.clone();
                row.push(r.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

fn assemble(a: &Formula, row: Vec<Resolution>) -> Resolution {
    match a {
        Formula::Tensor(sig, _) if sig.n() > 2 => Resolution::Tuple(row),
        _ => {
            let mut it = row.into_iter();
            let x = it.next().expect("two components");
            let y = it.next().expect("two components");
            Resolution::Pair(Box::new(x), Box::new(y))
        }
    }
}

fn components(r: &Resolution) -> Vec<&Resolution> {
    match r {
        Resolution::Pair(x, y) => vec![x, y],
        Resolution::Tuple(items) => items.iter().collect(),
        _ => vec![],
    }
}

fn space_rec(a: &Formula) -> Vec<Resolution> {
    match a {
        Formula::Atom(p) => vec![Resolution::BaseAtom(p.clone())],
        Formula::Bottom => vec![Resolution::BaseBottom],
        Formula::Or(x, y) => {
            let left = space_rec(x).into_iter().map(|r| Resolution::Tagged(0, Box::new(r)));
            let right = space_rec(y).into_iter().map(|r| Resolution::Tagged(1, Box::new(r)));
            left.chain(right).collect()
        }
        Formula::And(x, y) => {
            let spaces = [space_rec(x), space_rec(y)];
            product(&spaces).into_iter().map(|row| assemble(a, row)).collect()
        }
        Formula::Tensor(_, args) => {
            let spaces: Vec<Vec<Resolution>> = args.iter().map(space_rec).collect();
            product(&spaces).into_iter().map(|row| assemble(a, row)).collect()
        }
        Formula::Implies(x, y) => {
            let domain = space_rec(x);
            let codomain = space_rec(y);
            functions(&domain, |_| codomain.clone())
        }
        _ => unreachable!("resolutions are only defined for propositional formulas"),
    }
}

/// All functions on `domain` with values at `x` drawn from `choices(x)`, in canonical order.
fn functions(domain: &[Resolution], choices: impl Fn(&Resolution) -> Vec<Resolution>) -> Vec<Resolution> {
    let per_point: Vec<Vec<Resolution>> = domain.iter().map(choices).collect();
    product(&per_point)
        .into_iter()
        .map(|values| Resolution::Func(domain.iter().cloned().zip(values).collect()))
        .collect()
}

/// `S(a)`, in canonical order.
pub fn resolution_space(a: &PropFormula, budget: Budget) -> Result<Vec<Resolution>> {
    check_budget(a, budget)?;
    Ok(space_rec(a))
}

/// Whether `r ∈ R(w, a)`, assuming `r ∈ S(a)`.
pub fn is_actual(v: &(impl Valuation + ?Sized), w: usize, a: &Formula, r: &Resolution) -> bool {
    match (a, r) {
        (Formula::Atom(p), _) => v.holds(p, w),
        (Formula::Bottom, _) => false,
        (Formula::Or(x, _), Resolution::Tagged(0, r)) => is_actual(v, w, x, r),
        (Formula::Or(_, y), Resolution::Tagged(_, r)) => is_actual(v, w, y, r),
        (Formula::And(x, y), Resolution::Pair(rx, ry)) => {
            is_actual(v, w, x, rx) && is_actual(v, w, y, ry)
        }
        (Formula::Tensor(sig, args), _) => {
            let actual = args
                .iter()
                .zip(components(r))
                .filter(|(x, rx)| is_actual(v, w, x, rx))
                .count();
            actual >= sig.k()
        }
        (Formula::Implies(x, y), Resolution::Func(graph)) => graph
            .iter()
            .all(|(rx, ry)| !is_actual(v, w, x, rx) || is_actual(v, w, y, ry)),
        _ => panic!("resolution `{r}` does not belong to the space of `{a}`"),
    }
}

fn actual_rec(v: &(impl Valuation + ?Sized), w: usize, a: &Formula) -> Vec<Resolution> {
    match a {
        Formula::Atom(p) => {
            if v.holds(p, w) {
                vec![Resolution::BaseAtom(p.clone())]
            } else {
                vec![]
            }
        }
        Formula::Bottom => vec![],
        Formula::Or(x, y) => {
            let left = actual_rec(v, w, x).into_iter().map(|r| Resolution::Tagged(0, Box::new(r)));
            let right = actual_rec(v, w, y).into_iter().map(|r| Resolution::Tagged(1, Box::new(r)));
            left.chain(right).collect()
        }
        Formula::And(x, y) => {
            let spaces = [actual_rec(v, w, x), actual_rec(v, w, y)];
            product(&spaces).into_iter().map(|row| assemble(a, row)).collect()
        }
        Formula::Tensor(_, _) => space_rec(a)
            .into_iter()
            .filter(|r| is_actual(v, w, a, r))
            .collect(),
        Formula::Implies(x, y) => {
            let domain = space_rec(x);
            let target = actual_rec(v, w, y);
            let codomain = space_rec(y);
            if target.is_empty() && domain.iter().any(|rx| is_actual(v, w, x, rx)) {
                return vec![];
            }
            functions(&domain, |rx| {
                if is_actual(v, w, x, rx) {
                    target.clone()
                } else {
                    codomain.clone()
                }
            })
        }
        _ => unreachable!("resolutions are only defined for propositional formulas"),
    }
}

/// `R(w, a)`, in canonical order.
pub fn resolutions_at(
    v: &(impl Valuation + ?Sized),
    w: usize,
    a: &PropFormula,
    budget: Budget,
) -> Result<Vec<Resolution>> {
    check_budget(a, budget)?;
    Ok(actual_rec(v, w, a))
}

/// The least resolution of `a` actual at every world of `m`.
pub fn uniform_resolution(m: &Model, a: &PropFormula, budget: Budget) -> Result<Option<Resolution>> {
    uniform_resolution_over(m, &m.all_worlds(), a, budget, Parallelism::Sequential)
}

/// The least element of `R(dom, a)`, the resolutions actual at every world of `dom`.
pub fn uniform_resolution_over(
    v: &(impl Valuation + ?Sized),
    dom: &WorldSet,
    a: &PropFormula,
    budget: Budget,
    mode: Parallelism,
) -> Result<Option<Resolution>> {
    check_budget(a, budget)?;
    let Some(first) = dom.first() else {
        return Ok(space_rec(a).into_iter().next());
    };
    let others: Vec<usize> = dom.iter().skip(1).collect();
    let candidates = actual_rec(v, first, a);
    Ok(par::find_map_first(mode, &candidates, |r| {
        others
            .iter()
            .all(|&w| is_actual(v, w, a, r))
            .then(|| r.clone())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::canonical_model;
    use crate::syntax::Atom;

    fn prop(s: &str) -> PropFormula {
        PropFormula::parse(s).unwrap()
    }

    fn show(rs: &[Resolution]) -> Vec<String> {
        rs.iter().map(|r| r.to_string()).collect()
    }

    #[test]
    fn spaces() {
        let b = Budget::default();
        assert_eq!(show(&resolution_space(&prop("p"), b).unwrap()), ["p"]);
        assert_eq!(
            show(&resolution_space(&prop("p | q"), b).unwrap()),
            ["in0(p)", "in1(q)"]
        );
        let s = resolution_space(&prop("p -> q | r"), b).unwrap();
        assert_eq!(show(&s), ["fn{p=>in0(q)}", "fn{p=>in1(r)}"]);
        assert_eq!(space_size(&prop("(p | q | r) -> (p | q)")), 8);
    }

    #[test]
    fn spaces_come_sorted() {
        let b = Budget::default();
        for f in ["(p | q) -> (q | bot)", "tensor[2,3](p | q, q -> r, bot)", "(p -> q) -> p | q"] {
            let s = resolution_space(&prop(f), b).unwrap();
            assert!(s.windows(2).all(|w| w[0] < w[1]), "{f}");
            assert_eq!(s.len() as u64, space_size(&prop(f)));
        }
    }

    #[test]
    fn actual_resolutions() {
        let m = canonical_model(&[Atom::new("p").unwrap(), Atom::new("q").unwrap()]).unwrap();
        let b = Budget::default();
        for w in 0..4 {
            assert!(resolutions_at(&m, w, &prop("bot"), b).unwrap().is_empty());
        }
        let wp = m.world_index("w_p").unwrap();
        let wq = m.world_index("w_q").unwrap();
        assert!(resolutions_at(&m, wp, &prop("~p"), b).unwrap().is_empty());
        assert_eq!(show(&resolutions_at(&m, wq, &prop("~p"), b).unwrap()), ["fn{p=>bot!}"]);
        assert_eq!(show(&resolutions_at(&m, wp, &prop("p (+) q"), b).unwrap()), ["pair(p, q)"]);
        assert!(resolutions_at(&m, m.world_index("w_").unwrap(), &prop("p (+) q"), b)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn uniform_examples() {
        let b = Budget::default();
        let p = Atom::new("p").unwrap();
        let m = canonical_model(std::slice::from_ref(&p)).unwrap();
        let all_p = m.restrict(&WorldSet::singleton(0)).unwrap();
        assert_eq!(
            uniform_resolution(&all_p, &prop("p"), b).unwrap(),
            Some(Resolution::BaseAtom(p))
        );
        assert_eq!(uniform_resolution(&m, &prop("p | ~p"), b).unwrap(), None);
        assert_eq!(
            uniform_resolution(&m, &prop("p (+) ~p"), b).unwrap().unwrap().to_string(),
            "pair(p, fn{p=>bot!})"
        );
    }

    #[test]
    fn budget_reports_subformula() {
        let err = resolution_space(&prop("(p | q | r) -> (p | q)"), Budget { max_space_size: 5 })
            .unwrap_err();
        match err {
            Error::Budget { needed, subformula, .. } => {
                assert_eq!(needed, "8");
                assert_eq!(subformula.as_deref(), Some("p | q | r -> p | q"));
            }
            other => panic!("{other:?}"),
        }
    }
}
