//! Realizations, the disjunctive normal form, and tensor simplification.

use crate::error::{Error, Result};
use crate::proofs::axioms::k_subsets;
use crate::syntax::{Formula, PropFormula, TensorSig};

/// Cap on the number of realizations of any subformula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealizationBudget {
    pub max_realizations: u64,
}

impl Default for RealizationBudget {
    fn default() -> Self {
        RealizationBudget {
            max_realizations: 100_000,
        }
    }
}

fn check(len: u64, f: &Formula, budget: RealizationBudget) -> Result<()> {
    if len > budget.max_realizations {
        return Err(Error::budget("realizations", budget.max_realizations, len).at(f));
    }
    Ok(())
}

fn dedup(items: Vec<Formula>) -> Vec<Formula> {
    let mut seen = std::collections::HashSet::new();
    items.into_iter().filter(|f| seen.insert(f.clone())).collect()
}

/// Every combination of one element from each list, the last list varying fastest.
fn product(lists: &[Vec<Formula>]) -> Vec<Vec<Formula>> {
    lists.iter().fold(vec![Vec::new()], |acc, list| {
        acc.into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x.clone());
                    v
                })
            })
            .collect()
    })
}

fn rl(f: &Formula, budget: RealizationBudget) -> Result<Vec<Formula>> {
    Ok(match f {
        Formula::Atom(_) | Formula::Bottom => vec![f.clone()],
        Formula::Or(a, b) => {
            let mut out = rl(a, budget)?;
            out.extend(rl(b, budget)?);
            dedup(out)
        }
        Formula::And(a, b) => {
            let (ra, rb) = (rl(a, budget)?, rl(b, budget)?);
            check((ra.len() as u64).saturating_mul(rb.len() as u64), f, budget)?;
            dedup(
                product(&[ra, rb])
                    .into_iter()
                    .map(Formula::conjunction)
                    .collect(),
            )
        }
        Formula::Implies(a, b) => {
            let (ra, rb) = (rl(a, budget)?, rl(b, budget)?);
            let count = (rb.len() as u64)
                .checked_pow(ra.len().try_into().unwrap_or(u32::MAX))
                .unwrap_or(u64::MAX);
            check(count, f, budget)?;
            // Functions RL(a) -> RL(b) as tuples of images, first point most significant.
            let images = vec![rb; ra.len()];
            dedup(
                product(&images)
                    .into_iter()
                    .map(|img| {
                        Formula::conjunction(
                            ra.iter()
                                .zip(img)
                                .map(|(r, s)| Formula::implies(r.clone(), s)),
                        )
                    })
                    .collect(),
            )
        }
        Formula::Tensor(sig, args) => {
            let lists = args
                .iter()
                .map(|a| rl(a, budget))
                .collect::<Result<Vec<_>>>()?;
            let count = lists
                .iter()
                .fold(1u64, |acc, l| acc.saturating_mul(l.len() as u64));
            check(count, f, budget)?;
            dedup(
                product(&lists)
                    .into_iter()
                    .map(|rhos| tensor_realization(*sig, &rhos))
                    .collect(),
            )
        }
        Formula::K(_) | Formula::Kh(_) | Formula::Forall(..) | Formula::Announce(..) => {
            unreachable!("propositional input")
        }
    })
}

/// `~ /\_{|I|=k} ~ /\_{i in I} rho_i`.
fn tensor_realization(sig: TensorSig, rhos: &[Formula]) -> Formula {
    Formula::not(Formula::conjunction(
        k_subsets(sig.n(), sig.k()).into_iter().map(|ix| {
            Formula::not(Formula::conjunction(ix.into_iter().map(|i| rhos[i].clone())))
        }),
    ))
}

/// The realizations of `a`: classical formulas, in a fixed order without repeats.
pub fn realizations(a: &PropFormula, budget: RealizationBudget) -> Result<Vec<PropFormula>> {
    Ok(rl(a, budget)?
        .into_iter()
        .map(PropFormula::new_unchecked)
        .collect())
}

/// Disjunction of the realizations of `a`.
pub fn normal_form(a: &PropFormula, budget: RealizationBudget) -> Result<PropFormula> {
    Ok(PropFormula::new_unchecked(Formula::disjunction(rl(
        a, budget,
    )?)))
}

/// Rewrites general tensors, innermost first: full tensors become conjunctions,
/// a literal `top` or `bot` in last position is dropped, and `tensor[1,n]` becomes
/// a chain of binary tensors.
pub fn simplify_general_tensor(a: &PropFormula) -> PropFormula {
    PropFormula::new_unchecked(simplify(a))
}

fn simplify(f: &Formula) -> Formula {
    let f = f.map_children(simplify);
    match step(&f) {
        Some(g) => simplify(&g),
        None => f,
    }
}

fn step(f: &Formula) -> Option<Formula> {
    let Formula::Tensor(sig, args) = f else {
        return None;
    };
    let (k, n) = (sig.k(), sig.n());
    let (last, init) = args.split_last().expect("tensors have arguments");
    let shrink = |k| Formula::Tensor(TensorSig::new(k, n - 1).expect("valid signature"), init.to_vec());
    if k == n {
        Some(Formula::conjunction(args.iter().cloned()))
    } else if last.is_top() && k >= 2 {
        Some(shrink(k - 1))
    } else if *last == Formula::Bottom && n >= 3 && k < n {
        Some(shrink(k))
    } else if k == 1 && n >= 3 {
        Some(Formula::tensor2(shrink(1), last.clone()))
    } else {
        None
    }
}
