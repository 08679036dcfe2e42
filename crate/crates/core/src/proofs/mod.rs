//! Hilbert-style derivations: axiom matching, proof checking, and proofs generated
//! from rewrite traces.

pub mod axioms;
mod check;
mod trace;

pub use axioms::{is_tautology, matches_axiom, Axiom, Binding};
pub use check::{check_proof, Justification, ProofLine, ProofScript, ProofVerdict};
pub use trace::reduction_trace;
