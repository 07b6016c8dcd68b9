//! Discrete fractional calculus on shifted integer grids.
//!
//! The operators (fractional sum, forward difference, Caputo-like and
//! Riemann–Liouville differences) are generic over a [`Scalar`] backend:
//! exact rationals ([`Rational`]) or IEEE floats (`f64`, `f32`). On top of
//! them sit residual checks for the discrete fractional Taylor formulas and
//! related identities, certificate builders for the remainder, Ostrowski,
//! Poincaré and Sobolev type inequalities, and a seeded verification harness.
//!
//! ```
//! use fdcalc_core::{operators, numerics::rat, ExactGrid};
//!
//! let ones = ExactGrid::from_samples(rat(0, 1), vec![rat(1, 1); 3]).unwrap();
//! let half = operators::fractional_sum(&ones, &rat(1, 2)).unwrap();
//! assert_eq!(half.base(), &rat(1, 2));
//! assert_eq!(half.values(), &[rat(1, 1), rat(3, 2), rat(15, 8)]);
//! ```

pub mod grid;
pub mod harness;
pub mod identities;
pub mod inequalities;
pub mod numerics;
pub mod operators;

pub use grid::{DiscreteInterval, GridFn};
pub use numerics::{Backend, FracOrder, GammaMonomial, Scalar};

/// Exact arbitrary-precision rational, always in canonical form.
pub type Rational = num_rational::BigRational;

pub type ExactGrid = GridFn<Rational>;
pub type FloatGrid = GridFn<f64>;
pub type ExactResiduals = identities::ResidualSeries<Rational>;
pub type FloatResiduals = identities::ResidualSeries<f64>;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("not exactly representable: {0}")]
    Exactness(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("empty domain")]
    EmptyDomain,
    #[error("point {0} is not on the grid")]
    OffGrid(String),
    #[error("point {0} is outside the grid")]
    OutOfRange(String),
    #[error("grid too short: need at least {required} samples, got {got}")]
    TooShort { required: usize, got: usize },
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("order error: {0}")]
    Order(String),
    #[error("hypothesis violated: Δ^{k} f(a) = {value} is not zero")]
    HypothesisViolated { k: usize, value: String },
    #[error("Hölder exponents must satisfy 1/γ + 1/δ = 1 with γ, δ > 1: {0}")]
    Holder(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("weight error: {0}")]
    Weight(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
