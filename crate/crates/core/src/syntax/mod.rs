//! Formulas, their concrete syntax, and atom bookkeeping.

mod formula;
mod parse;
mod render;

pub use formula::{fresh_atom, Atom, Formula, PropFormula, TensorSig, FRESH_PREFIX};
pub use parse::{dependence, parse};
pub use render::{render, render_sugared};
