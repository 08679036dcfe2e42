//! Inquisitive logic with generalized tensor disjunction, and the dynamic epistemic
//! language with know-how, public announcements, and propositional quantifiers.

pub mod decide;
pub mod enumerate;
pub mod error;
pub mod models;
pub mod par;
pub mod proofs;
pub mod resolution;
pub mod rewrite;
pub mod satisfaction;
pub mod support;
pub mod syntax;

pub use decide::{entails_inq, t23_report, valid_bounded, valid_inq, Verdict};
pub use error::{Error, ParseError, Result};
pub use models::{canonical_model, Model, WorldSet};
pub use par::Parallelism;
pub use proofs::{check_proof, reduction_trace, ProofScript, ProofVerdict};
pub use rewrite::{eliminate_announcements, eliminate_kh, to_classical_epistemic};
pub use satisfaction::{extension, holds_globally, satisfies, EvalLimits, KhBackend};
pub use support::supports;
pub use syntax::{parse, Atom, Formula, PropFormula, TensorSig};
