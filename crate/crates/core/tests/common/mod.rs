//! Formula corpora and oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use inqkh::enumerate::{formulas_up_to_height, Connective};
use inqkh::models::{valuation_classes, Model, WorldSet};
use inqkh::syntax::{Atom, Formula, PropFormula, TensorSig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn atom(name: &str) -> Atom {
    Atom::new(name).unwrap()
}

pub fn atoms(names: &[&str]) -> Vec<Atom> {
    names.iter().map(|n| atom(n)).collect()
}

pub fn f(text: &str) -> Formula {
    inqkh::parse(text).unwrap()
}

pub fn pf(text: &str) -> PropFormula {
    PropFormula::parse(text).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sig(k: usize, n: usize) -> TensorSig {
    TensorSig::new(k, n).unwrap()
}

pub const BASE: [Connective; 4] = [
    Connective::And,
    Connective::Or,
    Connective::Implies,
    Connective::Tensor(TensorSig::BINARY),
];

pub fn general_tensors() -> Vec<TensorSig> {
    [(1, 2), (2, 2), (1, 3), (2, 3), (3, 3)]
        .into_iter()
        .map(|(k, n)| sig(k, n))
        .collect()
}

fn dedup(items: impl IntoIterator<Item = Formula>) -> Vec<Formula> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|x| seen.insert(x.clone())).collect()
}

/// A random propositional formula of height at most `height`.
pub fn random_prop(r: &mut impl Rng, atoms: &[Atom], sigs: &[TensorSig], height: usize) -> Formula {
    if height == 0 || r.gen_bool(0.2) {
        return match r.gen_range(0..=atoms.len()) {
            0 => Formula::Bottom,
            i => Formula::Atom(atoms[i - 1].clone()),
        };
    }
    let choice = r.gen_range(0..3 + sigs.len());
    let mut sub = || random_prop(r, atoms, sigs, height - 1);
    match choice {
        0 => Formula::and(sub(), sub()),
        1 => Formula::or(sub(), sub()),
        2 => Formula::implies(sub(), sub()),
        i => {
            let s = sigs[i - 3];
            let args = (0..s.n()).map(|_| sub()).collect();
            Formula::Tensor(s, args)
        }
    }
}

/// Every formula of height at most two over `p`, `q`, `bot` with the binary
/// connectives, followed by seeded random formulas of height three.
pub fn prop_corpus() -> Vec<PropFormula> {
    let leaves = [f("p"), f("q"), Formula::Bottom];
    let mut all = formulas_up_to_height(&leaves, &BASE, 2, 10_000).unwrap();
    let mut r = rng(1);
    let pq = atoms(&["p", "q"]);
    all.extend((0..4_500).map(|_| random_prop(&mut r, &pq, &[TensorSig::BINARY], 3)));
    dedup(all).into_iter().map(|x| PropFormula::try_from(x).unwrap()).collect()
}

/// [`prop_corpus`] plus random formulas with general tensors.
pub fn tensor_corpus() -> Vec<PropFormula> {
    let mut all: Vec<Formula> = prop_corpus().into_iter().map(Into::into).collect();
    let mut r = rng(2);
    let pq = atoms(&["p", "q"]);
    let sigs = general_tensors();
    all.extend((0..3_000).map(|_| {
        let h = r.gen_range(1..=3);
        random_prop(&mut r, &pq, &sigs, h)
    }));
    dedup(all).into_iter().map(|x| PropFormula::try_from(x).unwrap()).collect()
}

/// A random formula of the full language. `binders` are used for quantifiers.
pub fn random_modal(
    r: &mut impl Rng,
    atoms: &[Atom],
    binders: &[Atom],
    sigs: &[TensorSig],
    height: usize,
) -> Formula {
    if height == 0 || r.gen_bool(0.15) {
        return match r.gen_range(0..=atoms.len()) {
            0 => Formula::Bottom,
            i => Formula::Atom(atoms[i - 1].clone()),
        };
    }
    let h = height - 1;
    match r.gen_range(0..8) {
        0 => Formula::and(random_modal(r, atoms, binders, sigs, h), random_modal(r, atoms, binders, sigs, h)),
        1 => Formula::or(random_modal(r, atoms, binders, sigs, h), random_modal(r, atoms, binders, sigs, h)),
        2 => Formula::implies(random_modal(r, atoms, binders, sigs, h), random_modal(r, atoms, binders, sigs, h)),
        3 => Formula::k(random_modal(r, atoms, binders, sigs, h)),
        4 => Formula::kh(random_prop(r, atoms, sigs, h.min(2))).unwrap(),
        5 => {
            let p = binders.choose(r).unwrap().clone();
            let mut scope = atoms.to_vec();
            scope.push(p.clone());
            Formula::forall(p, random_modal(r, &scope, binders, sigs, h))
        }
        6 => Formula::announce(
            random_modal(r, atoms, binders, sigs, h.min(1)),
            random_modal(r, atoms, binders, sigs, h),
        ),
        _ => {
            let s = *sigs.choose(r).unwrap();
            let args = (0..s.n()).map(|_| random_modal(r, atoms, binders, sigs, h.min(1))).collect();
            Formula::Tensor(s, args)
        }
    }
}

/// Modal formulas over `p`, `q` that mention `Kh` or an announcement, with
/// hand-picked cases first.
pub fn modal_corpus(n: usize, seed: u64) -> Vec<Formula> {
    let mut out: Vec<Formula> = [
        "Kh (p -> q)",
        "Kh (p (+) ~p)",
        "Kh (p | ~p) <-> K p | K ~p",
        "[p] K q",
        "[p] forall p. q & p",
        "[q] Kh (p | ~p)",
        "Kh tensor[2,3](p, q, ~p)",
        "[p] [q] K (p & q)",
        "[[p] q] K q",
        "forall r. [r] Kh (p -> r)",
        "exists r. K ([r] Kh p & [~r] Kh q)",
        "[Kh (p | q)] K p",
    ]
    .into_iter()
    .map(f)
    .collect();
    let mut r = rng(seed);
    let pq = atoms(&["p", "q"]);
    let binders = atoms(&["r", "p"]);
    let sigs = [TensorSig::BINARY, sig(2, 3), sig(1, 3)];
    while out.len() < n {
        let g = random_modal(&mut r, &pq, &binders, &sigs, 3);
        if (g.contains_kh() || g.contains_announcement()) && g.size() <= 14 && !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// Kh-free formulas with announcements nested up to three deep.
pub fn announcement_corpus(n: usize, seed: u64) -> Vec<Formula> {
    let mut out = vec![f("[[p] q] r"), f("[[[p] q] r] s"), f("[p] [q] [r] K s"), f("[p] forall p. [p] p")];
    let mut r = rng(seed);
    let vocab = atoms(&["p", "q"]);
    let binders = atoms(&["p", "r"]);
    while out.len() < n {
        let g = random_modal(&mut r, &vocab, &binders, &[TensorSig::BINARY, sig(2, 3)], 4);
        if !g.contains_kh() && g.contains_announcement() && !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// Naive support straight from the clauses, enumerating substates and covers.
pub fn naive_supports(m: &Model, s: &WorldSet, a: &Formula) -> bool {
    let subsets = |s: &WorldSet| -> Vec<WorldSet> {
        let ws: Vec<usize> = s.iter().collect();
        (0..1u64 << ws.len())
            .map(|mask| ws.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &w)| w).collect())
            .collect()
    };
    match a {
        Formula::Atom(p) => s.is_subset(&m.truth(p)),
        Formula::Bottom => s.is_empty(),
        Formula::And(x, y) => naive_supports(m, s, x) && naive_supports(m, s, y),
        Formula::Or(x, y) => naive_supports(m, s, x) || naive_supports(m, s, y),
        Formula::Implies(x, y) => subsets(s)
            .iter()
            .all(|t| !naive_supports(m, t, x) || naive_supports(m, t, y)),
        Formula::Tensor(sg, args) => {
            // Each argument may take any supporting substate.
            let options: Vec<Vec<WorldSet>> = args
                .iter()
                .map(|x| subsets(s).into_iter().filter(|t| naive_supports(m, t, x)).collect())
                .collect();
            let mut idx = vec![0; options.len()];
            loop {
                let covered = s.iter().all(|w| {
                    idx.iter().enumerate().filter(|(i, &j)| options[*i][j].contains(w)).count() >= sg.k()
                });
                if covered {
                    return true;
                }
                let mut i = 0;
                loop {
                    if i == idx.len() {
                        return false;
                    }
                    idx[i] += 1;
                    if idx[i] < options[i].len() {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
            }
        }
        _ => panic!("support is only defined for propositional formulas"),
    }
}

/// Every model whose worlds carry valuations over `vocab`, up to `max_worlds`
/// worlds, as labelled world lists (so isomorphic copies repeat).
pub fn labelled_models(vocab: &[Atom], max_worlds: usize) -> Vec<Model> {
    let classes = valuation_classes(vocab);
    let mut out = Vec::new();
    for n in 1..=max_worlds {
        let total = classes.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let cls: Vec<BTreeSet<Atom>> = (0..n)
                .map(|_| {
                    let x = classes[c % classes.len()].clone();
                    c /= classes.len();
                    x
                })
                .collect();
            let ids = (0..n).map(|i| format!("v{i}")).collect();
            out.push(Model::from_classes(ids, &cls).unwrap());
        }
    }
    out
}

/// All nonempty subsets of the worlds of `m`.
pub fn nonempty_states(m: &Model) -> Vec<WorldSet> {
    (1..1u64 << m.len()).map(WorldSet::from_bits).collect()
}

/// Deepest chain of announcements nested inside one another.
pub fn announcement_depth(f: &Formula) -> usize {
    let below = f.children().into_iter().map(announcement_depth).max().unwrap_or(0);
    match f {
        Formula::Announce(..) => below + 1,
        _ => below,
    }
}

/// One choice of values for the schema metavariables.
#[derive(Clone, Debug)]
pub struct Instance {
    pub phi: Formula,
    pub psi: Formula,
    pub chi: Formula,
    pub alpha: Formula,
    pub beta: Formula,
    pub sig: TensorSig,
}

/// Instances over free atoms `p`, `q`, `r`. Formulas bound by a schema quantifier
/// may also mention `s`, which never occurs free in `chi`, `alpha` or `beta`.
pub fn instance_corpus(n: usize, seed: u64) -> Vec<Instance> {
    let mut r = rng(seed);
    let pqr = atoms(&["p", "q", "r"]);
    let pqrs = atoms(&["p", "q", "r", "s"]);
    let binders = atoms(&["t"]);
    let sigs = [TensorSig::BINARY, sig(2, 2), sig(1, 3), sig(2, 3), sig(3, 3)];
    (0..n)
        .map(|i| Instance {
            phi: random_modal(&mut r, &pqrs, &binders, &sigs[..2], 2),
            psi: random_modal(&mut r, &pqr, &binders, &sigs[..2], 2),
            chi: random_modal(&mut r, &pqr, &binders, &sigs[..1], 1),
            alpha: random_prop(&mut r, &pqr, &sigs, 2),
            beta: random_prop(&mut r, &pqr, &sigs[..2], 2),
            sig: sigs[i % sigs.len()],
        })
        .collect()
}

/// Replaces upper-case metavariables in a schema text by parenthesized values.
pub fn fill_schema(text: &str, inst: &Instance) -> Formula {
    let mut out = String::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        let value = match word.as_str() {
            "PHI" => Some(inst.phi.to_string()),
            "PSI" => Some(inst.psi.to_string()),
            "CHI" => Some(inst.chi.to_string()),
            "ALPHA" => Some(inst.alpha.to_string()),
            "BETA" => Some(inst.beta.to_string()),
            _ => None,
        };
        match (value, word.as_str()) {
            (Some(v), _) => out.push_str(&format!("({v})")),
            (None, "P") => out.push('s'),
            (None, "Q") => out.push('t'),
            (None, w) => out.push_str(w),
        }
        word.clear();
    };
    for c in text.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            out.push(c);
        }
    }
    flush(&mut word, &mut out);
    f(&out)
}

const TAUTOLOGIES: [&str; 6] = [
    "PHI -> PSI -> PHI",
    "(PHI -> PSI -> CHI) -> (PHI -> PSI) -> PHI -> CHI",
    "~~PHI -> PHI",
    "PHI & PSI -> PSI & PHI",
    "PHI | ~PHI",
    "((PHI -> PSI) -> PHI) -> PHI",
];

/// The instance of `axiom` determined by `inst`; `i` picks among variants.
pub fn instantiate(axiom: inqkh::proofs::Axiom, inst: &Instance, i: usize) -> Formula {
    use inqkh::proofs::axioms::{kh_tensor_kn_rhs, tensor_expansion};
    use inqkh::proofs::Axiom;
    if let Some(text) = axiom.schema_text() {
        return fill_schema(text, inst);
    }
    let Instance { phi, psi, chi, alpha, beta, sig } = inst.clone();
    let three = [phi.clone(), psi.clone(), chi.clone()];
    match axiom {
        Axiom::Taut => fill_schema(TAUTOLOGIES[i % TAUTOLOGIES.len()], inst),
        Axiom::RdTensorKn => {
            let args = three[..sig.n()].to_vec();
            Formula::iff(Formula::Tensor(sig, args.clone()), tensor_expansion(sig.k(), &args))
        }
        Axiom::AnnAtom => {
            let leaf = [f("p"), f("q"), f("r"), Formula::Bottom][i % 4].clone();
            Formula::iff(
                Formula::announce(chi.clone(), leaf.clone()),
                Formula::implies(chi, leaf),
            )
        }
        Axiom::AnnConnective => {
            let ann = |x: &Formula| Formula::announce(chi.clone(), x.clone());
            let (l, r) = match i % 5 {
                0 => (Formula::and(phi.clone(), psi.clone()), Formula::and(ann(&phi), ann(&psi))),
                1 => (Formula::or(phi.clone(), psi.clone()), Formula::or(ann(&phi), ann(&psi))),
                2 => (Formula::implies(phi.clone(), psi.clone()), Formula::implies(ann(&phi), ann(&psi))),
                _ => {
                    let args = three[..sig.n()].to_vec();
                    (Formula::Tensor(sig, args.clone()), Formula::Tensor(sig, args.iter().map(ann).collect()))
                }
            };
            Formula::iff(Formula::announce(chi.clone(), l), r)
        }
        Axiom::SubForall => {
            let s = atom("s");
            let body = Formula::and(phi.clone(), Formula::Atom(s.clone()));
            let out = body.substitute(&s, &psi).or_else(|_| body.substitute(&s, &alpha)).unwrap();
            Formula::implies(Formula::forall(s, body), out)
        }
        Axiom::KhTensorKn => {
            let args = [alpha.clone(), beta.clone(), Formula::and(alpha, beta)][..sig.n()].to_vec();
            let qs: Vec<Atom> = ["s", "t", "u"][..sig.n()].iter().map(|n| atom(n)).collect();
            Formula::iff(
                Formula::kh(Formula::Tensor(sig, args.clone())).unwrap(),
                kh_tensor_kn_rhs(sig, &args, &qs),
            )
        }
        _ => unreachable!("every other axiom has a fixed schema"),
    }
}
