//! Exhaustive enumeration of formulas by height.

use crate::error::{Error, Result};
use crate::syntax::{Formula, TensorSig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Implies,
    Tensor(TensorSig),
}

impl Connective {
    pub fn arity(self) -> usize {
        match self {
            Connective::Tensor(sig) => sig.n(),
            _ => 2,
        }
    }

    fn build(self, mut args: Vec<Formula>) -> Formula {
        match self {
            Connective::Tensor(sig) => Formula::Tensor(sig, args),
            _ => {
                let b = args.pop().expect("binary");
                let a = args.pop().expect("binary");
                match self {
                    Connective::And => Formula::and(a, b),
                    Connective::Or => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
        }
    }
}

/// Number of formulas [`formulas_up_to_height`] would return, saturating.
pub fn count_up_to_height(leaves: usize, connectives: &[Connective], height: usize) -> u64 {
    let mut count = leaves as u64;
    for _ in 0..height {
        count = connectives.iter().fold(leaves as u64, |acc, c| {
            acc.saturating_add(count.saturating_pow(c.arity() as u32))
        });
    }
    count
}

/// All formulas of height at most `height` built from `leaves` with `connectives`:
/// the leaves, then for each connective every argument tuple drawn from the formulas
/// of the previous height, in lexicographic order.
pub fn formulas_up_to_height(
    leaves: &[Formula],
    connectives: &[Connective],
    height: usize,
    max_count: u64,
) -> Result<Vec<Formula>> {
    let needed = count_up_to_height(leaves.len(), connectives, height);
    if needed > max_count {
        return Err(Error::budget("enumerated formulas", max_count, needed));
    }
    let mut level = leaves.to_vec();
    for _ in 0..height {
        let mut next = leaves.to_vec();
        for &c in connectives {
            let arity = c.arity();
            let total = level.len().pow(arity as u32);
            for idx in 0..total {
                let mut rest = idx;
                let mut args = vec![Formula::Bottom; arity];
                for slot in (0..arity).rev() {
                    args[slot] = level[rest % level.len()].clone();
                    rest /= level.len();
                }
                next.push(c.build(args));
            }
        }
        level = next;
    }
    Ok(level)
}
