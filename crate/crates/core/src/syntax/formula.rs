use std::borrow::Borrow;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

const KEYWORDS: &[&str] = &[
    "bot", "top", "K", "Kh", "forall", "exists", "box", "tensor",
];

/// Prefix reserved for machine-generated atoms.
pub const FRESH_PREFIX: &str = "_q";

/// A propositional letter.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Self> {
        if !is_identifier(name) {
            return Err(Error::Structure(format!("`{name}` is not a valid atom name")));
        }
        if KEYWORDS.contains(&name) {
            return Err(Error::Structure(format!("`{name}` is a keyword")));
        }
        Ok(Atom(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_fresh(&self) -> bool {
        self.0.starts_with(FRESH_PREFIX)
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for Atom {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Parameters of the generalized tensor: `n` arguments, at least `k` of them resolved.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TensorSig {
    k: usize,
    n: usize,
}

impl TensorSig {
    /// The binary tensor disjunction.
    pub const BINARY: TensorSig = TensorSig { k: 1, n: 2 };

    pub fn new(k: usize, n: usize) -> Result<Self> {
        if n < 2 || k < 1 || k > n {
            return Err(Error::Structure(format!(
                "tensor[{k},{n}] requires n >= 2 and 1 <= k <= n"
            )));
        }
        Ok(TensorSig { k, n })
    }

    pub fn k(self) -> usize {
        self.k
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn is_binary(self) -> bool {
        self == Self::BINARY
    }
}

impl fmt::Display for TensorSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tensor[{},{}]", self.k, self.n)
    }
}

/// Formulas of the full language. Negation, `top`, biconditional, the existential
/// quantifier, the dual announcement, dependence atoms, and `box` are abbreviations
/// and have no node of their own.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Atom(Atom),
    Bottom,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Tensor(TensorSig, Vec<Formula>),
    K(Box<Formula>),
    Kh(Box<Formula>),
    Forall(Atom, Box<Formula>),
    Announce(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Result<Self> {
        Atom::new(name).map(Formula::Atom)
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::implies(a, Formula::Bottom)
    }

    pub fn top() -> Self {
        Formula::not(Formula::Bottom)
    }

    /// `a <-> b`, expanded to `(a -> b) & (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    /// Binary tensor `a (+) b`.
    pub fn tensor2(a: Formula, b: Formula) -> Self {
        Formula::Tensor(TensorSig::BINARY, vec![a, b])
    }

    pub fn tensor(sig: TensorSig, args: Vec<Formula>) -> Result<Self> {
        if args.len() != sig.n() {
            return Err(Error::Structure(format!(
                "{sig} expects {} arguments, got {}",
                sig.n(),
                args.len()
            )));
        }
        Ok(Formula::Tensor(sig, args))
    }

    pub fn k(a: Formula) -> Self {
        Formula::K(Box::new(a))
    }

    /// `Kh a`; fails unless `a` is propositional.
    pub fn kh(a: Formula) -> Result<Self> {
        if !a.is_propositional() {
            return Err(Error::Structure(format!(
                "Kh applied to non-propositional `{a}`"
            )));
        }
        Ok(Formula::Kh(Box::new(a)))
    }

    pub(crate) fn kh_unchecked(a: Formula) -> Self {
        debug_assert!(a.is_propositional());
        Formula::Kh(Box::new(a))
    }

    pub fn forall(p: Atom, a: Formula) -> Self {
        Formula::Forall(p, Box::new(a))
    }

    /// `exists p. a`, expanded to `~forall p. ~a`.
    pub fn exists(p: Atom, a: Formula) -> Self {
        Formula::not(Formula::forall(p, Formula::not(a)))
    }

    pub fn announce(announced: Formula, body: Formula) -> Self {
        Formula::Announce(Box::new(announced), Box::new(body))
    }

    /// `<a> b`, expanded to `~[a]~b`.
    pub fn diamond(announced: Formula, body: Formula) -> Self {
        Formula::not(Formula::announce(announced, Formula::not(body)))
    }

    /// Right-nested conjunction; `top` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::top();
        };
        while let Some(next) = items.pop() {
            acc = Formula::and(next, acc);
        }
        acc
    }

    /// Right-nested inquisitive disjunction; `bot` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::Bottom;
        };
        while let Some(next) = items.pop() {
            acc = Formula::or(next, acc);
        }
        acc
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Bottom => vec![],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Announce(a, b) => vec![a, b],
            Formula::Tensor(_, args) => args.iter().collect(),
            Formula::K(a) | Formula::Kh(a) | Formula::Forall(_, a) => vec![a],
        }
    }

    /// True when the formula contains no `K`, `Kh`, quantifier, or announcement.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bottom => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            Formula::Tensor(_, args) => args.iter().all(Formula::is_propositional),
            Formula::K(_) | Formula::Kh(_) | Formula::Forall(..) | Formula::Announce(..) => false,
        }
    }

    pub fn contains_kh(&self) -> bool {
        matches!(self, Formula::Kh(_)) || self.children().into_iter().any(Formula::contains_kh)
    }

    pub fn contains_announcement(&self) -> bool {
        matches!(self, Formula::Announce(..))
            || self.children().into_iter().any(Formula::contains_announcement)
    }

    pub fn contains_tensor(&self) -> bool {
        matches!(self, Formula::Tensor(..)) || self.children().into_iter().any(Formula::contains_tensor)
    }

    /// Checks tensor arities and that every `Kh` body is propositional.
    pub fn check_well_formed(&self) -> Result<()> {
        match self {
            Formula::Tensor(sig, args) if args.len() != sig.n() => Err(Error::Structure(format!(
                "{sig} expects {} arguments, got {}",
                sig.n(),
                args.len()
            ))),
            Formula::Kh(body) if !body.is_propositional() => Err(Error::Structure(format!(
                "Kh applied to non-propositional `{body}`"
            ))),
            _ => self
                .children()
                .into_iter()
                .try_for_each(Formula::check_well_formed),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Connective nesting depth; atoms and `bot` have height 0.
    pub fn height(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Every atom occurring anywhere, bound or free.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Forall(p, body) => {
                out.insert(p.clone());
                body.collect_atoms(out);
            }
            _ => {
                for c in self.children() {
                    c.collect_atoms(out);
                }
            }
        }
    }

    /// Atoms with at least one occurrence outside the scope of a quantifier binding them.
    pub fn free_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Atom>, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(p) => {
                if !bound.contains(p) {
                    out.insert(p.clone());
                }
            }
            Formula::Forall(p, body) => {
                bound.push(p.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn occurs_free(&self, p: &Atom) -> bool {
        match self {
            Formula::Atom(q) => q == p,
            Formula::Forall(q, body) => q != p && body.occurs_free(p),
            _ => self.children().into_iter().any(|c| c.occurs_free(p)),
        }
    }

    /// Replaces every free occurrence of `p` by `g`.
    ///
    /// Fails if a free atom of `g` would be captured by a quantifier of `self`, or if
    /// an occurrence inside a `Kh` scope would receive a non-propositional `g`.
    pub fn substitute(&self, p: &Atom, g: &Formula) -> Result<Formula> {
        let g_free = g.free_atoms();
        let g_prop = g.is_propositional();
        let mut binders = Vec::new();
        self.subst_rec(p, g, &g_free, g_prop, &mut binders, false)
    }

    fn subst_rec(
        &self,
        p: &Atom,
        g: &Formula,
        g_free: &BTreeSet<Atom>,
        g_prop: bool,
        binders: &mut Vec<Atom>,
        under_kh: bool,
    ) -> Result<Formula> {
        let rec = |f: &Formula, binders: &mut Vec<Atom>, kh: bool| {
            f.subst_rec(p, g, g_free, g_prop, binders, kh)
        };
        Ok(match self {
            Formula::Atom(q) if q == p => {
                if let Some(captured) = binders.iter().find(|b| g_free.contains(*b)) {
                    return Err(Error::Capture {
                        atom: captured.to_string(),
                    });
                }
                if under_kh && !g_prop {
                    return Err(Error::Structure(format!(
                        "substituting non-propositional `{g}` for `{p}` inside Kh"
                    )));
                }
                g.clone()
            }
            Formula::Atom(_) | Formula::Bottom => self.clone(),
            Formula::Forall(q, _) if q == p => self.clone(),
            Formula::Forall(q, body) => {
                binders.push(q.clone());
                let body = rec(body, binders, under_kh);
                binders.pop();
                Formula::forall(q.clone(), body?)
            }
            Formula::And(a, b) => Formula::and(rec(a, binders, under_kh)?, rec(b, binders, under_kh)?),
            Formula::Or(a, b) => Formula::or(rec(a, binders, under_kh)?, rec(b, binders, under_kh)?),
            Formula::Implies(a, b) => {
                Formula::implies(rec(a, binders, under_kh)?, rec(b, binders, under_kh)?)
            }
            Formula::Announce(a, b) => {
                Formula::announce(rec(a, binders, under_kh)?, rec(b, binders, under_kh)?)
            }
            Formula::Tensor(sig, args) => Formula::Tensor(
                *sig,
                args.iter()
                    .map(|a| rec(a, binders, under_kh))
                    .collect::<Result<_>>()?,
            ),
            Formula::K(a) => Formula::k(rec(a, binders, under_kh)?),
            Formula::Kh(a) => Formula::Kh(Box::new(rec(a, binders, true)?)),
        })
    }

    /// Rebuilds the node with each child transformed by `f`.
    pub(crate) fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Atom(_) | Formula::Bottom => self.clone(),
            Formula::And(a, b) => Formula::and(f(a), f(b)),
            Formula::Or(a, b) => Formula::or(f(a), f(b)),
            Formula::Implies(a, b) => Formula::implies(f(a), f(b)),
            Formula::Announce(a, b) => Formula::announce(f(a), f(b)),
            Formula::Tensor(sig, args) => Formula::Tensor(*sig, args.iter().map(f).collect()),
            Formula::K(a) => Formula::k(f(a)),
            Formula::Kh(a) => Formula::Kh(Box::new(f(a))),
            Formula::Forall(p, a) => Formula::forall(p.clone(), f(a)),
        }
    }

    /// Matches `(a -> b) & (b -> a)`.
    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::And(l, r) = self {
            if let (Formula::Implies(a, b), Formula::Implies(b2, a2)) = (&**l, &**r) {
                if a == a2 && b == b2 {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Matches `a -> bot`.
    pub fn as_negation(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(a, b) if **b == Formula::Bottom => Some(a),
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        self.as_negation() == Some(&Formula::Bottom)
    }
}

/// Returns `_q<i>` for the least `i` such that the name is not in `avoid`.
pub fn fresh_atom(avoid: &BTreeSet<Atom>) -> Atom {
    (0..)
        .map(|i| Atom(Arc::from(format!("{FRESH_PREFIX}{i}"))))
        .find(|a| !avoid.contains(a))
        .expect("unbounded index range")
}

/// A formula guaranteed to contain no modal operator, quantifier, or announcement.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PropFormula(Formula);

impl PropFormula {
    pub fn new(f: Formula) -> Result<Self> {
        if !f.is_propositional() {
            return Err(Error::Structure(format!("`{f}` is not propositional")));
        }
        f.check_well_formed()?;
        Ok(PropFormula(f))
    }

    pub(crate) fn new_unchecked(f: Formula) -> Self {
        debug_assert!(f.is_propositional());
        PropFormula(f)
    }

    pub fn parse(text: &str) -> Result<Self> {
        PropFormula::new(crate::syntax::parse(text)?)
    }

    pub fn as_formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }
}

impl Deref for PropFormula {
    type Target = Formula;

    fn deref(&self) -> &Formula {
        &self.0
    }
}

impl TryFrom<Formula> for PropFormula {
    type Error = Error;

    fn try_from(f: Formula) -> Result<Self> {
        PropFormula::new(f)
    }
}

impl From<PropFormula> for Formula {
    fn from(p: PropFormula) -> Formula {
        p.0
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
