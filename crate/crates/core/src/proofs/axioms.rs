//! The axiom catalog and schema matching.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::syntax::{parse, Atom, Formula};

/// Axiom schemas of the proof system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Taut,
    RdTensor,
    RdTensorKn,
    DistK,
    AnnAtom,
    AnnConnective,
    AnnK,
    AnnForall,
    DistForall,
    SubForall,
    Su,
    Bc,
    KhK,
    KKhp,
    KhBot,
    KhOr,
    KhAnd,
    KhImp,
    KhTensor,
    KhTensorKn,
    TK,
    FourK,
    FiveK,
    FourKh,
    FiveKh,
}

impl Axiom {
    pub const ALL: [Axiom; 25] = [
        Axiom::Taut,
        Axiom::RdTensor,
        Axiom::RdTensorKn,
        Axiom::DistK,
        Axiom::AnnAtom,
        Axiom::AnnConnective,
        Axiom::AnnK,
        Axiom::AnnForall,
        Axiom::DistForall,
        Axiom::SubForall,
        Axiom::Su,
        Axiom::Bc,
        Axiom::KhK,
        Axiom::KKhp,
        Axiom::KhBot,
        Axiom::KhOr,
        Axiom::KhAnd,
        Axiom::KhImp,
        Axiom::KhTensor,
        Axiom::KhTensorKn,
        Axiom::TK,
        Axiom::FourK,
        Axiom::FiveK,
        Axiom::FourKh,
        Axiom::FiveKh,
    ];

    /// Catalog name.
    pub fn name(self) -> &'static str {
        self.names()[0]
    }

    /// Catalog name followed by accepted ASCII spellings.
    pub fn names(self) -> &'static [&'static str] {
        match self {
            Axiom::Taut => &["TAUT"],
            Axiom::RdTensor => &["Rd⊗", "Rd_tensor"],
            Axiom::RdTensorKn => &["Rd⊗ᵏₙ", "Rd_tensor_kn"],
            Axiom::DistK => &["DIST_K"],
            Axiom::AnnAtom => &["[]p", "[]_p"],
            Axiom::AnnConnective => &["[]○", "[]_o", "[]_circ"],
            Axiom::AnnK => &["[]K", "[]_K"],
            Axiom::AnnForall => &["[]∀", "[]_forall"],
            Axiom::DistForall => &["DIST∀", "DIST_forall"],
            Axiom::SubForall => &["SUB∀", "SUB_forall"],
            Axiom::Su => &["SU"],
            Axiom::Bc => &["BC"],
            Axiom::KhK => &["KhK"],
            Axiom::KKhp => &["KKhp"],
            Axiom::KhBot => &["Kh⊥", "Kh_bot"],
            Axiom::KhOr => &["Kh∨", "Kh_or"],
            Axiom::KhAnd => &["Kh∧", "Kh_and"],
            Axiom::KhImp => &["Kh→", "Kh_imp"],
            Axiom::KhTensor => &["Kh⊗", "Kh_tensor"],
            Axiom::KhTensorKn => &["Kh⊗ᵏₙ", "Kh_tensor_kn"],
            Axiom::TK => &["T_K"],
            Axiom::FourK => &["4_K"],
            Axiom::FiveK => &["5_K"],
            Axiom::FourKh => &["4_Kh"],
            Axiom::FiveKh => &["5_Kh"],
        }
    }

    /// The schema in concrete syntax, for schemas with a fixed shape.
    ///
    /// Upper-case atoms are metavariables: `PHI`, `PSI`, `CHI` range over formulas,
    /// `ALPHA`, `BETA` over propositional formulas, `P`, `Q` over atoms.
    pub fn schema_text(self) -> Option<&'static str> {
        Some(match self {
            Axiom::RdTensor => "PHI (+) PSI <-> PHI | PSI",
            Axiom::DistK => "K (PHI -> PSI) -> K PHI -> K PSI",
            Axiom::AnnK => "[CHI] K PHI <-> (CHI -> K [CHI] PHI)",
            Axiom::AnnForall => "([CHI] forall P. PHI) <-> forall P. [CHI] PHI",
            Axiom::DistForall => "(forall P. PHI -> PSI) -> (forall P. PHI) -> forall P. PSI",
            Axiom::Su => "exists P. P & forall Q. Q -> K (P -> Q)",
            Axiom::Bc => "(forall P. K PHI) -> K forall P. PHI",
            Axiom::KhK => "Kh ALPHA -> K ALPHA",
            Axiom::KKhp => "K P -> Kh P",
            Axiom::KhBot => "Kh bot <-> bot",
            Axiom::KhOr => "Kh (ALPHA | BETA) <-> Kh ALPHA | Kh BETA",
            Axiom::KhAnd => "Kh (ALPHA & BETA) <-> Kh ALPHA & Kh BETA",
            Axiom::KhImp => "Kh (ALPHA -> BETA) <-> K forall P. [P] (Kh ALPHA -> Kh BETA)",
            Axiom::KhTensor => {
                "Kh (ALPHA (+) BETA) <-> exists P. K ([P] Kh ALPHA & [~P] Kh BETA)"
            }
            Axiom::TK => "K PHI -> PHI",
            Axiom::FourK => "K PHI -> K K PHI",
            Axiom::FiveK => "~K PHI -> K ~K PHI",
            Axiom::FourKh => "Kh ALPHA -> K Kh ALPHA",
            Axiom::FiveKh => "~Kh ALPHA -> K ~Kh ALPHA",
            Axiom::Taut
            | Axiom::RdTensorKn
            | Axiom::AnnAtom
            | Axiom::AnnConnective
            | Axiom::SubForall
            | Axiom::KhTensorKn => return None,
        })
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.names().contains(&s))
            .ok_or_else(|| Error::ProofFile(format!("unknown axiom `{s}`")))
    }
}

/// Values assigned to schema metavariables by a successful match.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Binding {
    pub formulas: BTreeMap<String, Formula>,
    pub atoms: BTreeMap<String, Atom>,
}

impl Binding {
    fn formula(&self, name: &str) -> Option<&Formula> {
        self.formulas.get(name)
    }

    fn atom(&self, name: &str) -> Option<&Atom> {
        self.atoms.get(name)
    }
}

const FORMULA_VARS: &[&str] = &["PHI", "PSI", "CHI", "ALPHA", "BETA"];
const PROP_VARS: &[&str] = &["ALPHA", "BETA"];
const ATOM_VARS: &[&str] = &["P", "Q"];

fn schemas() -> &'static BTreeMap<Axiom, Formula> {
    static SCHEMAS: OnceLock<BTreeMap<Axiom, Formula>> = OnceLock::new();
    SCHEMAS.get_or_init(|| {
        Axiom::ALL
            .into_iter()
            .filter_map(|a| {
                a.schema_text()
                    .map(|t| (a, parse(t).expect("catalog schemas parse")))
            })
            .collect()
    })
}

/// First-order matching of a schema against a formula; metavariables occur only
/// as leaves or as bound atoms.
fn unify(pattern: &Formula, f: &Formula, b: &mut Binding) -> bool {
    match (pattern, f) {
        (Formula::Atom(v), _) if FORMULA_VARS.contains(&v.name()) => {
            if PROP_VARS.contains(&v.name()) && !f.is_propositional() {
                return false;
            }
            match b.formulas.get(v.name()) {
                Some(bound) => bound == f,
                None => {
                    b.formulas.insert(v.name().to_string(), f.clone());
                    true
                }
            }
        }
        (Formula::Atom(v), Formula::Atom(q)) if ATOM_VARS.contains(&v.name()) => bind_atom(v, q, b),
        (Formula::Atom(v), _) if ATOM_VARS.contains(&v.name()) => false,
        (Formula::Forall(v, pb), Formula::Forall(q, fb)) if ATOM_VARS.contains(&v.name()) => {
            bind_atom(v, q, b) && unify(pb, fb, b)
        }
        (Formula::Tensor(ps, pa), Formula::Tensor(fs, fa)) => {
            ps == fs && pa.iter().zip(fa).all(|(x, y)| unify(x, y, b))
        }
        _ => {
            if std::mem::discriminant(pattern) != std::mem::discriminant(f) {
                return false;
            }
            match (pattern, f) {
                (Formula::Atom(x), Formula::Atom(y)) => x == y,
                (Formula::Bottom, Formula::Bottom) => true,
                (Formula::Forall(..), Formula::Forall(..)) => false,
                _ => {
                    let (pc, fc) = (pattern.children(), f.children());
                    pc.len() == fc.len() && pc.into_iter().zip(fc).all(|(x, y)| unify(x, y, b))
                }
            }
        }
    }
}

fn bind_atom(v: &Atom, q: &Atom, b: &mut Binding) -> bool {
    match b.atoms.get(v.name()) {
        Some(bound) => bound == q,
        None => {
            b.atoms.insert(v.name().to_string(), q.clone());
            true
        }
    }
}

fn match_schema(axiom: Axiom, f: &Formula) -> Option<Binding> {
    let mut b = Binding::default();
    unify(&schemas()[&axiom], f, &mut b).then_some(b)
}

/// Matches `f` against an axiom schema, checking side conditions.
pub fn matches_axiom(axiom: Axiom, f: &Formula) -> Option<Binding> {
    match axiom {
        Axiom::Taut => is_tautology(f).then(Binding::default),
        Axiom::RdTensorKn => match_rd_tensor_kn(f),
        Axiom::AnnAtom => match_ann_atom(f),
        Axiom::AnnConnective => match_ann_connective(f),
        Axiom::SubForall => match_sub_forall(f),
        Axiom::KhTensorKn => match_kh_tensor_kn(f),
        Axiom::AnnForall => {
            let b = match_schema(axiom, f)?;
            let (chi, p) = (b.formula("CHI")?, b.atom("P")?);
            (!chi.atoms().contains(p)).then_some(b)
        }
        Axiom::KhImp | Axiom::KhTensor => {
            let b = match_schema(axiom, f)?;
            let p = b.atom("P")?;
            let fresh = !b.formula("ALPHA")?.occurs_free(p) && !b.formula("BETA")?.occurs_free(p);
            fresh.then_some(b)
        }
        Axiom::Su => {
            let b = match_schema(axiom, f)?;
            (b.atom("P")? != b.atom("Q")?).then_some(b)
        }
        _ => match_schema(axiom, f),
    }
}

/// `[CHI] P <-> (CHI -> P)` with `P` an atom or `bot`.
fn match_ann_atom(f: &Formula) -> Option<Binding> {
    let (l, r) = f.as_iff()?;
    let Formula::Announce(chi, body) = l else {
        return None;
    };
    if !matches!(**body, Formula::Atom(_) | Formula::Bottom) {
        return None;
    }
    if *r != Formula::implies((**chi).clone(), (**body).clone()) {
        return None;
    }
    let mut b = Binding::default();
    b.formulas.insert("CHI".into(), (**chi).clone());
    b.formulas.insert("PHI".into(), (**body).clone());
    Some(b)
}

/// `[CHI](A o B) <-> [CHI]A o [CHI]B` for binary connectives, and the
/// componentwise form for tensors of any arity.
fn match_ann_connective(f: &Formula) -> Option<Binding> {
    let (l, r) = f.as_iff()?;
    let Formula::Announce(chi, body) = l else {
        return None;
    };
    let ann = |x: &Formula| Formula::announce((**chi).clone(), x.clone());
    let expected = match &**body {
        Formula::And(a, c) => Formula::and(ann(a), ann(c)),
        Formula::Or(a, c) => Formula::or(ann(a), ann(c)),
        Formula::Implies(a, c) => Formula::implies(ann(a), ann(c)),
        Formula::Tensor(sig, args) => Formula::Tensor(*sig, args.iter().map(ann).collect()),
        _ => return None,
    };
    if *r != expected {
        return None;
    }
    let mut b = Binding::default();
    b.formulas.insert("CHI".into(), (**chi).clone());
    for (i, c) in body.children().into_iter().enumerate() {
        b.formulas.insert(format!("PHI{}", i + 1), c.clone());
    }
    Some(b)
}

/// `forall P. PHI -> PHI[PSI/P]` with `PSI` free for `P` in `PHI`.
fn match_sub_forall(f: &Formula) -> Option<Binding> {
    let Formula::Implies(l, r) = f else {
        return None;
    };
    let Formula::Forall(p, phi) = &**l else {
        return None;
    };
    let psi = find_substituend(phi, p, r)?;
    let ok = match &psi {
        None => **phi == **r,
        Some(psi) => phi.substitute(p, psi).ok().as_ref() == Some(&**r),
    };
    if !ok {
        return None;
    }
    let mut b = Binding::default();
    b.formulas.insert("PHI".into(), (**phi).clone());
    b.formulas
        .insert("PSI".into(), psi.unwrap_or_else(|| Formula::Atom(p.clone())));
    b.atoms.insert("P".into(), p.clone());
    Some(b)
}

/// The formula standing at the first free occurrence of `p` in `phi`, read off the
/// corresponding position of `target`. `Some(None)` when `p` is not free in `phi`.
fn find_substituend(phi: &Formula, p: &Atom, target: &Formula) -> Option<Option<Formula>> {
    match phi {
        Formula::Atom(q) if q == p => Some(Some(target.clone())),
        Formula::Forall(q, _) if q == p => Some(None),
        _ => {
            if std::mem::discriminant(phi) != std::mem::discriminant(target) {
                return None;
            }
            if let (Formula::Forall(a, _), Formula::Forall(b, _)) = (phi, target) {
                if a != b {
                    return None;
                }
            }
            let (pc, tc) = (phi.children(), target.children());
            if pc.len() != tc.len() {
                return None;
            }
            let mut found = None;
            for (x, y) in pc.into_iter().zip(tc) {
                if let Some(psi) = find_substituend(x, p, y)? {
                    found = Some(psi);
                    break;
                }
            }
            Some(found)
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `I` ranging over the `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    combinations(n, k)
}

/// The right-hand side of the tensor expansion outside `Kh`:
/// the disjunction over `|I| = k` of the conjunction of the selected arguments.
pub fn tensor_expansion(k: usize, args: &[Formula]) -> Formula {
    Formula::disjunction(
        k_subsets(args.len(), k)
            .into_iter()
            .map(|ix| Formula::conjunction(ix.into_iter().map(|i| args[i].clone()))),
    )
}

fn match_rd_tensor_kn(f: &Formula) -> Option<Binding> {
    let (l, r) = f.as_iff()?;
    let Formula::Tensor(sig, args) = l else {
        return None;
    };
    if *r != tensor_expansion(sig.k(), args) {
        return None;
    }
    let mut b = Binding::default();
    for (i, a) in args.iter().enumerate() {
        b.formulas.insert(format!("PHI{}", i + 1), a.clone());
    }
    Some(b)
}

/// The right-hand side of the know-how reduction for a general tensor, with `qs`
/// the quantified atoms.
pub fn kh_tensor_kn_rhs(sig: crate::syntax::TensorSig, args: &[Formula], qs: &[Atom]) -> Formula {
    let tensor = Formula::Tensor(sig, qs.iter().map(|q| Formula::Atom(q.clone())).collect());
    let parts = qs.iter().zip(args).map(|(q, a)| {
        Formula::k(Formula::announce(
            Formula::Atom(q.clone()),
            Formula::kh_unchecked(a.clone()),
        ))
    });
    let body = Formula::and(Formula::k(tensor), Formula::conjunction(parts));
    qs.iter()
        .rev()
        .fold(body, |acc, q| Formula::exists(q.clone(), acc))
}

fn match_kh_tensor_kn(f: &Formula) -> Option<Binding> {
    let (l, r) = f.as_iff()?;
    let Formula::Kh(body) = l else {
        return None;
    };
    let Formula::Tensor(sig, args) = &**body else {
        return None;
    };
    // Peel `exists q1 ... exists qn` off the right-hand side.
    let mut qs = Vec::new();
    let mut cur = r;
    for _ in 0..sig.n() {
        let inner = cur.as_negation()?;
        let Formula::Forall(q, neg_body) = inner else {
            return None;
        };
        qs.push(q.clone());
        cur = neg_body.as_negation()?;
    }
    if *r != kh_tensor_kn_rhs(*sig, args, &qs) {
        return None;
    }
    let distinct: BTreeSet<&Atom> = qs.iter().collect();
    if distinct.len() != qs.len() || args.iter().any(|a| qs.iter().any(|q| a.occurs_free(q))) {
        return None;
    }
    let mut b = Binding::default();
    for (i, (a, q)) in args.iter().zip(&qs).enumerate() {
        b.formulas.insert(format!("ALPHA{}", i + 1), a.clone());
        b.atoms.insert(format!("P{}", i + 1), q.clone());
    }
    Some(b)
}

/// Truth-table check with maximal non-boolean subformulas (atoms, `K`, `Kh`,
/// quantified formulas, announcements, tensors) treated as opaque letters.
pub fn is_tautology(f: &Formula) -> bool {
    let mut letters: Vec<&Formula> = Vec::new();
    collect_letters(f, &mut letters);
    let n = letters.len();
    if n > 20 {
        // Far beyond any formula produced by the tools; refuse rather than stall.
        return false;
    }
    let rows = 1u64 << n;
    let mut base = 0;
    while base < rows {
        // 64 rows at a time: bit j of a lane is the value in row base + j.
        let lanes: Vec<u64> = (0..n)
            .map(|i| {
                (0..64u64)
                    .filter(|j| base + j < rows && (base + j) >> i & 1 == 1)
                    .fold(0, |acc, j| acc | 1 << j)
            })
            .collect();
        let valid = if rows - base >= 64 {
            u64::MAX
        } else {
            (1u64 << (rows - base)) - 1
        };
        if eval_lanes(f, &letters, &lanes) & valid != valid {
            return false;
        }
        base += 64;
    }
    true
}

fn collect_letters<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Bottom => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_letters(a, out);
            collect_letters(b, out);
        }
        _ => {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
}

fn eval_lanes(f: &Formula, letters: &[&Formula], lanes: &[u64]) -> u64 {
    match f {
        Formula::Bottom => 0,
        Formula::And(a, b) => eval_lanes(a, letters, lanes) & eval_lanes(b, letters, lanes),
        Formula::Or(a, b) => eval_lanes(a, letters, lanes) | eval_lanes(b, letters, lanes),
        Formula::Implies(a, b) => !eval_lanes(a, letters, lanes) | eval_lanes(b, letters, lanes),
        _ => {
            let i = letters.iter().position(|l| *l == f).expect("collected letter");
            lanes[i]
        }
    }
}
