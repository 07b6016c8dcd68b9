//! Scalar backends and the gamma-ratio kernel.

mod gamma;
mod order;
mod rational;
mod scalar;

pub use gamma::{
    binom_rising, binom_rising_table, falling_factorial_exact, falling_factorial_f64,
    falling_over_gamma_f64, gamma_telescope_residual_exact, gamma_telescope_residual_f64,
    ln_gamma_signed, recip_gamma_f64, GammaMonomial,
};
pub use order::FracOrder;
pub use rational::{
    as_i64, as_index, ceil, factorial, floor, from_f64, int, is_integer, parse_decimal,
    parse_number, parse_rational, rat, to_f64,
};
pub use scalar::{format_significant, Backend, Scalar, FLOAT_ZERO_TOLERANCE};

use crate::{Rational, Result};

/// `x^(α)` for any backend.
pub fn falling_factorial<S: Scalar>(x: &Rational, alpha: &Rational) -> Result<S> {
    S::falling_factorial(x, alpha)
}

/// `Γ(x+1)/(Γ(k+1)Γ(x−k+1)) − [Γ(x+2)/(Γ(k+2)Γ(x−k+1)) − Γ(x+1)/(Γ(k+2)Γ(x−k))]`
/// evaluated in the backend of `S`.
pub fn gamma_telescope_residual<S: Scalar>(x: &Rational, k: &Rational) -> Result<S> {
    gamma::check_telescope_domain(x, k)?;
    if S::BACKEND == Backend::Exact {
        let r = gamma_telescope_residual_exact(x, k)?;
        // zero whenever the identity holds; a nonzero exact residual would be
        // reported through its float value
        return Ok(match r.to_rational() {
            Some(q) => S::from_rational(&q),
            None => S::from_rational(&from_f64(r.to_f64()).unwrap_or_default()),
        });
    }
    let v = gamma_telescope_residual_f64(to_f64(x), to_f64(k));
    Ok(S::from_rational(&from_f64(v).unwrap_or_default()))
}
