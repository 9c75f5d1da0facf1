//! Exact differential polynomials over the rationals.
//!
//! A [`DiffPoly`] is a polynomial in jet coordinates `u, u1, u2, ...`,
//! coefficient functions `v, v1, ...`, the independent variable `x` and
//! constant parameters. The total derivative [`d_total`] acts on it as a
//! derivation.

mod calculus;
mod eval;
mod monomial;
mod parse;
mod poly;
mod symbol;

pub use calculus::{
    anti_d, apply_operator, d_total, d_total_n, euler, is_total_derivative, jet_bases, shifted_derivative,
    substitute,
};
pub use eval::{eval_jet, CompiledPoly};
pub use monomial::Monomial;
pub use parse::{parse, parse_with, ParseError};
pub use poly::{int, rat, DiffPoly};
pub use symbol::{DiffSymbol, SymbolKind, SymbolTable};

pub type Rational = num_rational::BigRational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DiffPolyError {
    #[error("not a total derivative: {poly}")]
    NotExact { poly: String },
    #[error("unassigned symbols: {}", .0.join(", "))]
    MissingSymbol(Vec<String>),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
