use std::fmt;

use thiserror::Error;

/// A syntax error located at a character offset of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    /// A formula violates a structural invariant (tensor arity, non-propositional
    /// body under `Kh`, malformed atom name).
    #[error("ill-formed formula: {0}")]
    Structure(String),

    /// A substitution would capture a free atom of the substituted formula.
    #[error("substitution captures `{atom}` under `forall {atom}`")]
    Capture { atom: String },

    /// A precondition on models, states, or formulas does not hold.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration would exceed a configured limit.
    #[error("budget exceeded: {limit} (limit {max}, needed {needed}){}", subformula.as_ref().map(|s| format!(" at `{s}`")).unwrap_or_default())]
    Budget {
        limit: &'static str,
        max: u64,
        needed: String,
        subformula: Option<String>,
    },

    #[error("model file: {0}")]
    ModelFile(String),

    #[error("proof file: {0}")]
    ProofFile(String),
}

impl Error {
    pub(crate) fn budget(limit: &'static str, max: u64, needed: impl fmt::Display) -> Self {
        Error::Budget {
            limit,
            max,
            needed: needed.to_string(),
            subformula: None,
        }
    }

    pub(crate) fn at(mut self, f: &crate::Formula) -> Self {
        if let Error::Budget { subformula, .. } = &mut self {
            if subformula.is_none() {
                *subformula = Some(f.to_string());
            }
        }
        self
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
