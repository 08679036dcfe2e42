//! State-based support for the propositional fragment.
//!
//! Formulas are evaluated over every substate of a fixed state at once: each
//! subformula gets a [`Profile`], the downward-closed family of substates that
//! support it, indexed by local bitmask.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::models::{Model, Substates, Valuation, WorldSet};
use crate::syntax::{Formula, PropFormula};

/// Default bound on the size of a state whose substates are enumerated.
pub const DEFAULT_MAX_STATE_BITS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SupportLimits {
    pub max_state_bits: u32,
}

impl Default for SupportLimits {
    fn default() -> Self {
        SupportLimits {
            max_state_bits: DEFAULT_MAX_STATE_BITS,
        }
    }
}

/// A family of substates of an `n`-element state, one bit per local mask.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Profile {
    n: u32,
    words: Vec<u64>,
}

// Bit positions inside a word whose index lacks bit `b`, for b < 6.
const LOW_HALVES: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

impl Profile {
    fn empty(n: u32) -> Self {
        let words = if n >= 6 { 1usize << (n - 6) } else { 1 };
        Profile {
            n,
            words: vec![0; words],
        }
    }

    fn valid_bits(&self) -> u64 {
        if self.n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << self.n)) - 1
        }
    }

    fn only_empty(n: u32) -> Self {
        let mut p = Profile::empty(n);
        p.words[0] = 1;
        p
    }

    /// All subsets of `v`.
    fn below(n: u32, v: u64) -> Self {
        let mut p = Profile::empty(n);
        let mut sub = v;
        loop {
            p.set(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & v;
        }
        p
    }

    fn set(&mut self, mask: u64) {
        self.words[(mask >> 6) as usize] |= 1 << (mask & 63);
    }

    /// Size of the underlying state.
    pub fn state_bits(&self) -> u32 {
        self.n
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.words[(mask >> 6) as usize] & (1 << (mask & 63)) != 0
    }

    /// Members in increasing mask order.
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(((i as u64) << 6) | b)
            })
        })
    }

    /// The whole profile as one word, for states of at most 6 worlds.
    pub fn as_u64(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.words[0])
    }

    /// Least mask on which the two profiles disagree.
    pub fn first_difference(&self, other: &Profile) -> Option<u64> {
        assert_eq!(self.n, other.n, "profiles over different states");
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(i, (a, b))| ((i as u64) << 6) | (a ^ b).trailing_zeros() as u64)
    }

    fn zip(&self, other: &Profile, f: impl Fn(u64, u64) -> u64) -> Profile {
        Profile {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Every superset of a member.
    fn up_closure(&mut self) {
        for b in 0..self.n.min(6) {
            let low = LOW_HALVES[b as usize];
            let shift = 1u32 << b;
            for w in &mut self.words {
                *w |= (*w & low) << shift;
            }
        }
        for b in 6..self.n {
            let stride = 1usize << (b - 6);
            for i in 0..self.words.len() {
                if i & stride != 0 {
                    self.words[i] |= self.words[i ^ stride];
                }
            }
        }
        let valid = self.valid_bits();
        self.words[0] &= valid;
    }

    fn complement(&self) -> Profile {
        let valid = self.valid_bits();
        Profile {
            n: self.n,
            words: self.words.iter().map(|w| !w & valid).collect(),
        }
    }

    /// Members with no member strict superset obtained by adding one world.
    fn maximal(&self) -> Vec<u64> {
        let full = full_mask(self.n);
        self.members()
            .filter(|&t| {
                let mut outside = full & !t;
                while outside != 0 {
                    let b = outside & outside.wrapping_neg();
                    if self.contains(t | b) {
                        return false;
                    }
                    outside &= outside - 1;
                }
                true
            })
            .collect()
    }
}

fn full_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn implication(a: &Profile, b: &Profile) -> Profile {
    let mut bad = a.zip(b, |x, y| x & !y);
    bad.up_closure();
    bad.complement()
}

fn tensor(n_bits: u32, k: usize, args: &[&Profile]) -> Profile {
    let maxima: Vec<Vec<u64>> = args.iter().map(|p| p.maximal()).collect();
    let full = full_mask(n_bits);
    let mut out = Profile::empty(n_bits);
    let mut ge = vec![0u64; k + 1];
    for t in (0..=full).rev() {
        let mut outside = full & !t;
        let mut inherited = false;
        while outside != 0 {
            let b = outside & outside.wrapping_neg();
            if out.contains(t | b) {
                inherited = true;
                break;
            }
            outside &= outside - 1;
        }
        if inherited || t == 0 || covers(t, k, &maxima, &mut ge) {
            out.set(t);
        }
    }
    out
}

/// Whether `t` splits into parts supporting each argument with every world in at
/// least `k` parts. Only maximal parts need to be tried, since enlarging a part
/// never hurts coverage.
fn covers(t: u64, k: usize, maxima: &[Vec<u64>], ge: &mut [u64]) -> bool {
    let cands: Vec<Vec<u64>> = maxima
        .iter()
        .map(|ms| {
            let mut c: Vec<u64> = ms.iter().map(|m| m & t).collect();
            c.sort_unstable_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
            c.dedup();
            let keep: Vec<u64> = c
                .iter()
                .copied()
                .filter(|&x| !c.iter().any(|&y| y != x && x & !y == 0))
                .collect();
            keep
        })
        .collect();
    ge.fill(0);
    ge[0] = t;
    search(t, k, &cands, 0, ge)
}

fn search(t: u64, k: usize, cands: &[Vec<u64>], i: usize, ge: &mut [u64]) -> bool {
    let remaining = cands.len() - i;
    if k > remaining && ge[k - remaining] != t {
        return false;
    }
    if i == cands.len() {
        return ge[k] == t;
    }
    for &x in &cands[i] {
        let saved: Vec<u64> = ge.to_vec();
        for j in (1..=k).rev() {
            ge[j] |= ge[j - 1] & x;
        }
        if search(t, k, cands, i + 1, ge) {
            return true;
        }
        ge.copy_from_slice(&saved);
    }
    false
}

/// Evaluates propositional formulas over all substates of one state, sharing work
/// between syntactically equal subformulas.
pub struct SupportEngine<'v, V: Valuation + ?Sized> {
    valuation: &'v V,
    substates: Substates,
    memo: HashMap<Formula, usize>,
    profiles: Vec<Profile>,
}

impl<'v, V: Valuation + ?Sized> SupportEngine<'v, V> {
    pub fn new(valuation: &'v V, state: &WorldSet, limits: SupportLimits) -> Result<Self> {
        let size = state.len();
        if size > limits.max_state_bits as usize {
            return Err(Error::budget(
                "state size for subset enumeration",
                limits.max_state_bits as u64,
                size,
            ));
        }
        Ok(SupportEngine {
            valuation,
            substates: Substates::new(state),
            memo: HashMap::new(),
            profiles: Vec::new(),
        })
    }

    pub fn substates(&self) -> &Substates {
        &self.substates
    }

    pub fn profile(&mut self, a: &PropFormula) -> &Profile {
        let id = self.node(a.as_formula());
        &self.profiles[id]
    }

    /// Whether the whole state supports `a`.
    pub fn supports_state(&mut self, a: &PropFormula) -> bool {
        let full = self.substates.full_mask();
        self.profile(a).contains(full)
    }

    /// Whether `t` supports `a`; `t` is intersected with the state.
    pub fn supports(&mut self, a: &PropFormula, t: &WorldSet) -> bool {
        let mask = self.substates.to_mask(t);
        self.profile(a).contains(mask)
    }

    fn node(&mut self, f: &Formula) -> usize {
        if let Some(&id) = self.memo.get(f) {
            return id;
        }
        let n = self.substates.bits();
        let profile = match f {
            Formula::Atom(p) => {
                let v = self.substates.to_mask(&self.valuation.truth(p));
                Profile::below(n, v)
            }
            Formula::Bottom => Profile::only_empty(n),
            Formula::And(a, b) => {
                let (a, b) = (self.node(a), self.node(b));
                self.profiles[a].zip(&self.profiles[b], |x, y| x & y)
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.node(a), self.node(b));
                self.profiles[a].zip(&self.profiles[b], |x, y| x | y)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.node(a), self.node(b));
                implication(&self.profiles[a], &self.profiles[b])
            }
            Formula::Tensor(sig, args) => {
                let ids: Vec<usize> = args.iter().map(|a| self.node(a)).collect();
                let refs: Vec<&Profile> = ids.iter().map(|&i| &self.profiles[i]).collect();
                tensor(n, sig.k(), &refs)
            }
            Formula::K(_) | Formula::Kh(_) | Formula::Forall(..) | Formula::Announce(..) => {
                unreachable!("support is only defined for propositional formulas")
            }
        };
        let id = self.profiles.len();
        self.profiles.push(profile);
        self.memo.insert(f.clone(), id);
        id
    }
}

/// Support of formulas built from atoms, `bot`, `&`, and `|`, computed without
/// enumerating substates.
fn direct(v: &(impl Valuation + ?Sized), s: &WorldSet, f: &Formula) -> Option<bool> {
    match f {
        Formula::Atom(p) => Some(s.is_subset(&v.truth(p))),
        Formula::Bottom => Some(s.is_empty()),
        Formula::And(a, b) => Some(direct(v, s, a)? && direct(v, s, b)?),
        Formula::Or(a, b) => Some(direct(v, s, a)? || direct(v, s, b)?),
        _ => None,
    }
}

/// Whether state `s` of `m` supports `a`.
pub fn supports(m: &Model, s: &WorldSet, a: &PropFormula) -> Result<bool> {
    supports_with(m, s, a, SupportLimits::default())
}

pub fn supports_with(
    v: &(impl Valuation + ?Sized),
    s: &WorldSet,
    a: &PropFormula,
    limits: SupportLimits,
) -> Result<bool> {
    if s.is_empty() {
        return Ok(true);
    }
    if let Some(answer) = direct(v, s, a) {
        return Ok(answer);
    }
    let mut engine = SupportEngine::new(v, s, limits).map_err(|e| e.at(a))?;
    Ok(engine.supports_state(a))
}

/// Whether every substate of `s` supports `a` exactly when it supports `b`.
pub fn relativized_equivalent(
    m: &Model,
    s: &WorldSet,
    a: &PropFormula,
    b: &PropFormula,
) -> Result<bool> {
    Ok(relativized_witness(m, s, a, b, SupportLimits::default())?.is_none())
}

/// The first substate of `s`, in increasing local-mask order, that separates `a`
/// from `b`.
pub fn relativized_witness(
    v: &(impl Valuation + ?Sized),
    s: &WorldSet,
    a: &PropFormula,
    b: &PropFormula,
    limits: SupportLimits,
) -> Result<Option<WorldSet>> {
    let mut engine = SupportEngine::new(v, s, limits)?;
    let pa = engine.profile(a).clone();
    let pb = engine.profile(b);
    Ok(pa.first_difference(pb).map(|m| engine.substates().to_set(m)))
}
