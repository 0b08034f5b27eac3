//! Exact univariate polynomial and piecewise-polynomial arithmetic over the
//! rationals, with definite integration and certified real-root isolation.

mod piecewise;
mod polynomial;
mod rational;
mod roots;

pub use piecewise::PiecewisePoly;
pub use polynomial::Polynomial;
pub use rational::{format_rational, from_f64, int, midpoint, parse_rational, rat, to_f64, Rational};
pub use roots::{
    descartes_bound, is_nonnegative_on, isolate_roots, NonnegativityReport, PieceProof, RootInterval,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PolyError {
    #[error("integration bounds out of order (a > b)")]
    ArgumentOrder,
    #[error("cannot isolate roots of the zero polynomial")]
    ZeroPolynomial,
    #[error("root resolution must be positive")]
    Resolution,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("expected {} pieces for {breakpoints} breakpoints, got {pieces}", breakpoints.saturating_sub(1))]
    PieceCount { breakpoints: usize, pieces: usize },
    #[error("breakpoints must be strictly increasing")]
    UnsortedBreakpoints,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("non-finite value {0}")]
    NonFinite(f64),
}
