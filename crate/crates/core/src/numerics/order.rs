use std::fmt;

use num_traits::{Signed, ToPrimitive};

use super::rational::{ceil, int, is_integer};
use crate::{Error, Rational, Result};

/// A non-integer order `μ > 0` with `m = ⌈μ⌉` and `ν = m − μ ∈ (0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FracOrder {
    mu: Rational,
    m: usize,
    nu: Rational,
}

impl FracOrder {
    pub fn new(mu: Rational) -> Result<Self> {
        if !mu.is_positive() {
            return Err(Error::Order(format!("μ must be positive, got {mu}")));
        }
        if is_integer(&mu) {
            return Err(Error::Order(format!(
                "μ must be non-integer (m−1 < μ < m), got {mu}"
            )));
        }
        let m = ceil(&mu)
            .to_usize()
            .ok_or_else(|| Error::Order(format!("μ = {mu} is too large")))?;
        let nu = int(m as i64) - &mu;
        Ok(Self { mu, m, nu })
    }

    pub fn mu(&self) -> &Rational {
        &self.mu
    }

    /// `⌈μ⌉`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `m − μ`.
    pub fn nu(&self) -> &Rational {
        &self.nu
    }
}

impl fmt::Display for FracOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mu)
    }
}

impl std::str::FromStr for FracOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(super::parse_rational(s)?)
    }
}
