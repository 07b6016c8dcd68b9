use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, NumAssign, One, Signed, ToPrimitive, Zero};

use super::gamma::{
    binom_rising_table, falling_factorial_exact, falling_factorial_f64, falling_over_gamma_f64,
    GammaMonomial,
};
use super::rational::{parse_number, to_f64};
use crate::{Error, Rational, Result};

/// Which arithmetic a scalar type performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    F64,
    F32,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::F64 => "f64",
            Backend::F32 => "f32",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "f64" | "float" => Ok(Backend::F64),
            "f32" => Ok(Backend::F32),
            other => Err(Error::Parse(format!("unknown backend {other:?}"))),
        }
    }
}

/// A real number as the operators see it.
///
/// Grid positions and fractional orders are always exact rationals; only the
/// function values and the quantities derived from them are `Self`. Gamma-ratio
/// helpers take `Rational` arguments so the exact backend can stay exact and
/// the float backends can round once at the boundary.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Send + Sync + NumAssign + Signed + 'static
{
    const BACKEND: Backend;

    fn from_rational(q: &Rational) -> Self;

    fn from_i64(n: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// The exact value, when the backend keeps one.
    fn to_exact(&self) -> Option<Rational>;

    /// `c_0(ν), …, c_{len−1}(ν)` with `c_n(ν) = Γ(ν+n)/(Γ(ν) n!)`.
    fn rising_coefficients(nu: &Rational, len: usize) -> Vec<Self>;

    /// `x^(α)` under the crate's pole conventions.
    fn falling_factorial(x: &Rational, alpha: &Rational) -> Result<Self>;

    /// `x^(α) / Γ(z)`, zero when `z` is a pole.
    fn falling_over_gamma(x: &Rational, alpha: &Rational, z: &Rational) -> Result<Self>;

    /// Parses a value in this backend's accepted text forms.
    fn parse_value(text: &str) -> Result<Self>;

    /// Text used by the CSV writer.
    fn to_text(&self) -> String;

    /// Zero test used for hypotheses such as `Δ^k f(a) = 0`. Exact
    /// backends require exact zero; floats allow roundoff relative to `scale`.
    fn is_negligible(&self, scale: &Self) -> bool;

    fn powi(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc *= self.clone();
        }
        acc
    }

    /// `Σ_{j≤n} c[n−j] v[j]`, accumulated left to right.
    fn convolution_at(c: &[Self], v: &[Self], n: usize) -> Self {
        let mut acc = Self::zero();
        for j in 0..=n {
            acc += c[n - j].clone() * v[j].clone();
        }
        acc
    }

    /// [`convolution_at`](Self::convolution_at) for `n = 0..v.len()`.
    fn causal_convolution(c: &[Self], v: &[Self]) -> Vec<Self> {
        (0..v.len()).map(|n| Self::convolution_at(c, v, n)).collect()
    }
}

/// Integer numerators over a common denominator.
fn common_denominator(xs: &[Rational]) -> (Vec<BigInt>, BigInt) {
    let d = xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let nums = xs.iter().map(|x| x.numer() * (&d / x.denom())).collect();
    (nums, d)
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(n.into())
    }

    fn to_f64(&self) -> f64 {
        to_f64(self)
    }

    fn to_exact(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn rising_coefficients(nu: &Rational, len: usize) -> Vec<Self> {
        binom_rising_table(nu, len)
    }

    fn falling_factorial(x: &Rational, alpha: &Rational) -> Result<Self> {
        rational_or_err(falling_factorial_exact(x, alpha)?, || format!("{x}^({alpha})"))
    }

    fn falling_over_gamma(x: &Rational, alpha: &Rational, z: &Rational) -> Result<Self> {
        let value = falling_factorial_exact(x, alpha)? * GammaMonomial::recip_gamma(z);
        rational_or_err(value, || format!("{x}^({alpha})/Γ({z})"))
    }

    fn parse_value(text: &str) -> Result<Self> {
        parse_number(text, false)
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn is_negligible(&self, _scale: &Self) -> bool {
        num_traits::Zero::is_zero(self)
    }

    // Integer arithmetic over common denominators, reducing once per output.
    fn convolution_at(c: &[Self], v: &[Self], n: usize) -> Self {
        let (cn, cd) = common_denominator(&c[..=n]);
        let (vn, vd) = common_denominator(&v[..=n]);
        let mut acc = BigInt::zero();
        for j in 0..=n {
            acc += &cn[n - j] * &vn[j];
        }
        Rational::new(acc, cd * vd)
    }

    fn causal_convolution(c: &[Self], v: &[Self]) -> Vec<Self> {
        let len = v.len();
        let (cn, cd) = common_denominator(&c[..len]);
        let (vn, vd) = common_denominator(v);
        let d = cd * vd;
        (0..len)
            .map(|n| {
                let mut acc = BigInt::zero();
                for j in 0..=n {
                    acc += &cn[n - j] * &vn[j];
                }
                Rational::new(acc, d.clone())
            })
            .collect()
    }
}

fn rational_or_err(value: GammaMonomial, what: impl FnOnce() -> String) -> Result<Rational> {
    value
        .to_rational()
        .ok_or_else(|| Error::Exactness(format!("{} = {value} is not rational", what())))
}

/// Relative size below which a float is treated as zero in hypothesis checks.
pub const FLOAT_ZERO_TOLERANCE: f64 = 1e-12;

impl Scalar for f64 {
    const BACKEND: Backend = Backend::F64;

    fn from_rational(q: &Rational) -> Self {
        to_f64(q)
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_exact(&self) -> Option<Rational> {
        None
    }

    fn rising_coefficients(nu: &Rational, len: usize) -> Vec<Self> {
        rising_float(to_f64(nu), len)
    }

    fn falling_factorial(x: &Rational, alpha: &Rational) -> Result<Self> {
        falling_factorial_f64(to_f64(x), to_f64(alpha))
    }

    fn falling_over_gamma(x: &Rational, alpha: &Rational, z: &Rational) -> Result<Self> {
        falling_over_gamma_f64(to_f64(x), to_f64(alpha), to_f64(z))
    }

    fn parse_value(text: &str) -> Result<Self> {
        let q = parse_number(text, true)?;
        // keep the shortest round trip for plain decimals
        match text.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Ok(to_f64(&q)),
        }
    }

    fn to_text(&self) -> String {
        format_significant(*self, 17)
    }

    fn is_negligible(&self, scale: &Self) -> bool {
        self.abs() <= FLOAT_ZERO_TOLERANCE * scale.abs().max(1.0)
    }

    fn powi(&self, exp: u32) -> Self {
        Float::powi(*self, exp as i32)
    }
}

impl Scalar for f32 {
    const BACKEND: Backend = Backend::F32;

    fn from_rational(q: &Rational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }

    fn from_i64(n: i64) -> Self {
        n as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn to_exact(&self) -> Option<Rational> {
        None
    }

    fn rising_coefficients(nu: &Rational, len: usize) -> Vec<Self> {
        rising_float(to_f64(nu), len).into_iter().map(|c| c as f32).collect()
    }

    fn falling_factorial(x: &Rational, alpha: &Rational) -> Result<Self> {
        f64::falling_factorial(x, alpha).map(|v| v as f32)
    }

    fn falling_over_gamma(x: &Rational, alpha: &Rational, z: &Rational) -> Result<Self> {
        f64::falling_over_gamma(x, alpha, z).map(|v| v as f32)
    }

    fn parse_value(text: &str) -> Result<Self> {
        f64::parse_value(text).map(|v| v as f32)
    }

    fn to_text(&self) -> String {
        format_significant(f64::from(*self), 9)
    }

    fn is_negligible(&self, scale: &Self) -> bool {
        self.abs() <= 1e-6 * scale.abs().max(1.0)
    }

    fn powi(&self, exp: u32) -> Self {
        Float::powi(*self, exp as i32)
    }
}

fn rising_float(nu: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut c = 1.0;
    for n in 0..len {
        if n > 0 {
            c *= (nu + (n - 1) as f64) / n as f64;
        }
        out.push(c);
    }
    out
}

/// Plain decimal with `digits` significant digits, falling back to
/// scientific notation for very large or very small magnitudes.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..=16).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}
