//! Finite epistemic models, world sets, and model surgery.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::syntax::Atom;

/// Default cap on the vocabulary of a canonical model.
pub const DEFAULT_MAX_VOCABULARY: usize = 16;

/// A set of world indices, stored as a bitset.
///
/// Trailing zero words are never stored, so equal sets have equal representations.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldSet {
    words: SmallVec<[u64; 2]>,
}

impl WorldSet {
    pub fn new() -> Self {
        WorldSet::default()
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut s = WorldSet::new();
        let whole = n / 64;
        s.words.resize(whole, u64::MAX);
        if !n.is_multiple_of(64) {
            s.words.push((1u64 << (n % 64)) - 1);
        }
        s
    }

    pub fn singleton(w: usize) -> Self {
        let mut s = WorldSet::new();
        s.insert(w);
        s
    }

    /// The set whose members are the set bits of `bits`.
    pub fn from_bits(bits: u64) -> Self {
        let mut s = WorldSet::new();
        if bits != 0 {
            s.words.push(bits);
        }
        s
    }

    pub fn insert(&mut self, w: usize) {
        let (i, b) = (w / 64, w % 64);
        if self.words.len() <= i {
            self.words.resize(i + 1, 0);
        }
        self.words[i] |= 1 << b;
    }

    pub fn remove(&mut self, w: usize) {
        let (i, b) = (w / 64, w % 64);
        if let Some(word) = self.words.get_mut(i) {
            *word &= !(1 << b);
        }
        self.normalize();
    }

    pub fn contains(&self, w: usize) -> bool {
        self.words
            .get(w / 64)
            .is_some_and(|word| word & (1 << (w % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// One past the largest member, or 0.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(&w) => (self.words.len() - 1) * 64 + 64 - w.leading_zeros() as usize,
        }
    }

    fn normalize(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    fn zip_with(&self, other: &WorldSet, f: impl Fn(u64, u64) -> u64) -> WorldSet {
        let n = self.words.len().max(other.words.len());
        let mut words = SmallVec::with_capacity(n);
        for i in 0..n {
            let a = self.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            words.push(f(a, b));
        }
        let mut s = WorldSet { words };
        s.normalize();
        s
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &WorldSet) -> WorldSet {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, &a)| a & !other.words.get(i).copied().unwrap_or(0) == 0)
    }
}

impl FromIterator<usize> for WorldSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = WorldSet::new();
        for w in iter {
            s.insert(w);
        }
        s
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The members of a state of size at most 64, with conversions between
/// world sets and local bitmasks (bit `i` stands for the `i`-th smallest member).
#[derive(Clone, Debug)]
pub struct Substates {
    worlds: Vec<usize>,
}

impl Substates {
    pub fn new(state: &WorldSet) -> Self {
        Substates {
            worlds: state.iter().collect(),
        }
    }

    pub fn bits(&self) -> u32 {
        self.worlds.len() as u32
    }

    pub fn worlds(&self) -> &[usize] {
        &self.worlds
    }

    pub fn full_mask(&self) -> u64 {
        if self.worlds.len() >= 64 {
            u64::MAX
        } else {
            (1u64 << self.worlds.len()) - 1
        }
    }

    pub fn to_set(&self, mask: u64) -> WorldSet {
        self.worlds
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &w)| w)
            .collect()
    }

    /// Local mask of `set ∩ state`.
    pub fn to_mask(&self, set: &WorldSet) -> u64 {
        self.worlds
            .iter()
            .enumerate()
            .filter(|(_, &w)| set.contains(w))
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

/// Anything that assigns extensions to atoms over a fixed set of world indices.
pub trait Valuation: Sync {
    fn truth(&self, p: &Atom) -> WorldSet;

    fn holds(&self, p: &Atom, w: usize) -> bool {
        self.truth(p).contains(w)
    }
}

impl Valuation for Model {
    fn truth(&self, p: &Atom) -> WorldSet {
        Model::truth(self, p)
    }

    fn holds(&self, p: &Atom, w: usize) -> bool {
        Model::holds(self, p, w)
    }
}

/// A finite model: a nonempty, ordered list of named worlds and a valuation.
///
/// Atoms missing from the valuation are false at every world.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Model {
    worlds: Vec<String>,
    valuation: BTreeMap<Atom, WorldSet>,
}

impl Model {
    pub fn new(worlds: Vec<String>, valuation: BTreeMap<Atom, WorldSet>) -> Result<Self> {
        if worlds.is_empty() {
            return Err(Error::Domain("a model needs at least one world".into()));
        }
        let distinct: BTreeSet<&String> = worlds.iter().collect();
        if distinct.len() != worlds.len() {
            return Err(Error::Domain("world identifiers must be distinct".into()));
        }
        let all = WorldSet::full(worlds.len());
        for (p, ext) in &valuation {
            if !ext.is_subset(&all) {
                return Err(Error::Domain(format!(
                    "valuation of `{p}` mentions worlds outside the model"
                )));
            }
        }
        let valuation = valuation.into_iter().filter(|(_, e)| !e.is_empty()).collect();
        Ok(Model { worlds, valuation })
    }

    /// Builds a model whose world `i` makes exactly the atoms in `classes[i]` true.
    pub fn from_classes(ids: Vec<String>, classes: &[BTreeSet<Atom>]) -> Result<Self> {
        let mut valuation: BTreeMap<Atom, WorldSet> = BTreeMap::new();
        for (w, class) in classes.iter().enumerate() {
            for p in class {
                valuation.entry(p.clone()).or_default().insert(w);
            }
        }
        Model::new(ids, valuation)
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn world_ids(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_id(&self, w: usize) -> &str {
        &self.worlds[w]
    }

    pub fn world_index(&self, id: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == id)
    }

    pub fn all_worlds(&self) -> WorldSet {
        WorldSet::full(self.worlds.len())
    }

    pub fn valuation(&self) -> &BTreeMap<Atom, WorldSet> {
        &self.valuation
    }

    /// Worlds where `p` is true.
    pub fn truth(&self, p: &Atom) -> WorldSet {
        self.valuation.get(p).cloned().unwrap_or_default()
    }

    pub fn holds(&self, p: &Atom, w: usize) -> bool {
        self.valuation.get(p).is_some_and(|e| e.contains(w))
    }

    /// Atoms true at `w`.
    pub fn valuation_class(&self, w: usize) -> BTreeSet<Atom> {
        self.valuation
            .iter()
            .filter(|(_, e)| e.contains(w))
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Resolves world identifiers into a state.
    pub fn state(&self, ids: &[impl AsRef<str>]) -> Result<WorldSet> {
        ids.iter()
            .map(|id| {
                let id = id.as_ref();
                self.world_index(id)
                    .ok_or_else(|| Error::Domain(format!("unknown world `{id}`")))
            })
            .collect()
    }

    pub fn state_ids(&self, s: &WorldSet) -> Vec<String> {
        s.iter().map(|w| self.worlds[w].clone()).collect()
    }

    /// The submodel on `x`, keeping the original order of worlds.
    pub fn restrict(&self, x: &WorldSet) -> Result<Model> {
        if x.is_empty() {
            return Err(Error::Domain("cannot restrict a model to the empty set".into()));
        }
        if !x.is_subset(&self.all_worlds()) {
            return Err(Error::Domain("restriction set is not a set of worlds of the model".into()));
        }
        let kept: Vec<usize> = x.iter().collect();
        let worlds = kept.iter().map(|&w| self.worlds[w].clone()).collect();
        let valuation = self
            .valuation
            .iter()
            .map(|(p, e)| {
                let ext = kept
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| e.contains(w))
                    .map(|(i, _)| i)
                    .collect();
                (p.clone(), ext)
            })
            .collect();
        Model::new(worlds, valuation)
    }

    /// The model with `p` true exactly at `u`.
    pub fn override_atom(&self, p: &Atom, u: &WorldSet) -> Result<Model> {
        if !u.is_subset(&self.all_worlds()) {
            return Err(Error::Domain(format!(
                "new extension of `{p}` is not a set of worlds of the model"
            )));
        }
        let mut valuation = self.valuation.clone();
        if u.is_empty() {
            valuation.remove(p);
        } else {
            valuation.insert(p.clone(), u.clone());
        }
        Ok(Model {
            worlds: self.worlds.clone(),
            valuation,
        })
    }

    pub fn to_json(&self, states: &BTreeMap<String, WorldSet>) -> serde_json::Value {
        let file = ModelFileRepr {
            worlds: self.worlds.clone(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, e)| (p.name().to_string(), self.state_ids(e)))
                .collect(),
            states: states
                .iter()
                .map(|(n, s)| (n.clone(), self.state_ids(s)))
                .collect(),
        };
        serde_json::to_value(file).expect("model serialization is infallible")
    }

    /// Parses the JSON model format, returning the model and its named states.
    pub fn from_json(text: &str) -> Result<(Model, BTreeMap<String, WorldSet>)> {
        let raw: ModelFileRepr =
            serde_json::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))?;
        let index = |id: &str, what: &str| {
            raw.worlds
                .iter()
                .position(|w| w == id)
                .ok_or_else(|| Error::ModelFile(format!("{what} mentions unknown world `{id}`")))
        };
        let mut valuation = BTreeMap::new();
        for (name, ids) in &raw.valuation {
            let p = Atom::new(name).map_err(|e| Error::ModelFile(e.to_string()))?;
            let ext = ids
                .iter()
                .map(|id| index(id, &format!("valuation of `{name}`")))
                .collect::<Result<WorldSet>>()?;
            valuation.insert(p, ext);
        }
        let mut states = BTreeMap::new();
        for (name, ids) in &raw.states {
            let s = ids
                .iter()
                .map(|id| index(id, &format!("state `{name}`")))
                .collect::<Result<WorldSet>>()?;
            states.insert(name.clone(), s);
        }
        let model = Model::new(raw.worlds.clone(), valuation).map_err(|e| match e {
            Error::Domain(m) => Error::ModelFile(m),
            other => other,
        })?;
        Ok((model, states))
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFileRepr {
    worlds: Vec<String>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    states: BTreeMap<String, Vec<String>>,
}

/// Valuation classes over `vocabulary` in lexicographic order: all atoms true first,
/// then dropping atoms from the right.
pub fn valuation_classes(vocabulary: &[Atom]) -> Vec<BTreeSet<Atom>> {
    let n = vocabulary.len();
    (0..1u64 << n)
        .map(|i| {
            let bits = (1u64 << n) - 1 - i;
            vocabulary
                .iter()
                .enumerate()
                .filter(|(j, _)| bits & (1 << (n - 1 - j)) != 0)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

/// Readable identifier for a valuation class, such as `w_pq` or `w_`.
pub fn class_id(vocabulary: &[Atom], class: &BTreeSet<Atom>) -> String {
    let short = vocabulary.iter().all(|p| p.name().len() == 1);
    let names: Vec<&str> = vocabulary
        .iter()
        .filter(|p| class.contains(*p))
        .map(Atom::name)
        .collect();
    format!("w_{}", names.join(if short { "" } else { "." }))
}

/// The model with one world per valuation class of `vocabulary`.
pub fn canonical_model(vocabulary: &[Atom]) -> Result<Model> {
    canonical_model_capped(vocabulary, DEFAULT_MAX_VOCABULARY)
}

pub fn canonical_model_capped(vocabulary: &[Atom], cap: usize) -> Result<Model> {
    let distinct: BTreeSet<&Atom> = vocabulary.iter().collect();
    if distinct.len() != vocabulary.len() {
        return Err(Error::Domain("vocabulary contains duplicate atoms".into()));
    }
    if vocabulary.len() > cap {
        return Err(Error::budget("vocabulary", cap as u64, vocabulary.len()));
    }
    let classes = valuation_classes(vocabulary);
    let ids = classes.iter().map(|c| class_id(vocabulary, c)).collect();
    Model::from_classes(ids, &classes)
}
