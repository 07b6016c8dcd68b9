//! Gamma ratios, falling factorials and the fractional-sum coefficients.
//!
//! Exact values live in [`GammaMonomial`]: a rational coefficient times a
//! product of integer powers of `Γ(f)` with `f ∈ (0, 1)`. Every gamma value at
//! a rational non-pole argument reduces to that form, so sums such as
//! `Σ r^(ν)` stay exact even when the result is irrational (e.g. `√π`).
//!
//! Pole conventions, used by both backends:
//! * `1/Γ(z)` at a nonpositive integer `z` is `0`;
//! * `x^(α) = Γ(x+1)/Γ(x−α+1)` is `0` when only the denominator sits on a
//!   pole, the finite limit from the product form when both do, and a
//!   [`Error::Pole`] when only the numerator does.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{as_i64, factorial, floor, int, is_integer, to_f64};
use crate::{Error, Rational, Result};

/// `coeff · Π Γ(f)^e` over fractional parts `f ∈ (0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaMonomial {
    coeff: Rational,
    gammas: BTreeMap<Rational, i32>,
}

impl GammaMonomial {
    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::rational(Rational::one())
    }

    pub fn rational(coeff: Rational) -> Self {
        Self { coeff, gammas: BTreeMap::new() }
    }

    /// `Γ(z)`; fails on nonpositive integers.
    pub fn gamma(z: &Rational) -> Result<Self> {
        let (coeff, frac) = reduce_gamma(z)?;
        let mut g = Self::rational(coeff);
        if let Some(f) = frac {
            g.gammas.insert(f, 1);
        }
        Ok(g)
    }

    /// `1/Γ(z)`, which is `0` at the poles.
    pub fn recip_gamma(z: &Rational) -> Self {
        match Self::gamma(z) {
            Ok(g) => g.recip().expect("gamma is never zero"),
            Err(_) => Self::zero(),
        }
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// True when no transcendental gamma factor remains.
    pub fn is_rational(&self) -> bool {
        self.is_zero() || self.gammas.is_empty()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeff.clone())
    }

    /// The gamma factors, as `(f, exponent)` pairs.
    pub fn factors(&self) -> impl Iterator<Item = (&Rational, i32)> {
        self.gammas.iter().map(|(f, e)| (f, *e))
    }

    /// Whether two monomials carry the same transcendental factor and can be
    /// added exactly.
    pub fn same_unit(&self, other: &Self) -> bool {
        self.is_zero() || other.is_zero() || self.gammas == other.gammas
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(Self {
            coeff: self.coeff.recip(),
            gammas: self.gammas.iter().map(|(f, e)| (f.clone(), -e)).collect(),
        })
    }

    pub fn abs(&self) -> Self {
        Self { coeff: self.coeff.abs(), gammas: self.gammas.clone() }
    }

    pub fn scale(&self, by: &Rational) -> Self {
        Self { coeff: &self.coeff * by, gammas: self.gammas.clone() }.normalized()
    }

    /// Exact sum; `None` when the transcendental parts differ.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(other.clone());
        }
        if other.is_zero() {
            return Some(self.clone());
        }
        if self.gammas != other.gammas {
            return None;
        }
        Some(
            Self { coeff: &self.coeff + &other.coeff, gammas: self.gammas.clone() }
                .normalized(),
        )
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&-other.clone())
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut log = 0.0;
        for (f, e) in &self.gammas {
            log += f64::from(*e) * libm::lgamma(to_f64(f));
        }
        to_f64(&self.coeff) * log.exp()
    }

    fn normalized(mut self) -> Self {
        if self.coeff.is_zero() {
            self.gammas.clear();
        }
        self
    }
}

impl Mul for GammaMonomial {
    type Output = Self;

    fn mul(mut self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        self.coeff *= rhs.coeff;
        for (f, e) in rhs.gammas {
            let slot = self.gammas.entry(f).or_insert(0);
            *slot += e;
        }
        self.gammas.retain(|_, e| *e != 0);
        self
    }
}

impl Neg for GammaMonomial {
    type Output = Self;

    fn neg(mut self) -> Self {
        self.coeff = -self.coeff;
        self
    }
}

/// Panics when the units differ; use [`GammaMonomial::checked_add`] otherwise.
impl Add for GammaMonomial {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("adding gamma monomials with different units")
    }
}

impl Sub for GammaMonomial {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(&rhs).expect("subtracting gamma monomials with different units")
    }
}

impl fmt::Display for GammaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        for (arg, e) in &self.gammas {
            if *e == 1 {
                write!(f, "·Γ({arg})")?;
            } else {
                write!(f, "·Γ({arg})^{e}")?;
            }
        }
        Ok(())
    }
}

/// Splits `Γ(z)` into `coeff · Γ(f)` with `f ∈ (0,1)`, or `f` absent when `z`
/// is a positive integer.
fn reduce_gamma(z: &Rational) -> Result<(Rational, Option<Rational>)> {
    if is_integer(z) {
        if !z.is_positive() {
            return Err(Error::Pole(format!("Γ({z})")));
        }
        let n = z.to_integer().to_usize().ok_or_else(|| Error::Domain(format!("Γ({z}) too large")))?;
        return Ok((factorial(n - 1), None));
    }
    let whole = floor(z);
    let frac = z - Rational::from_integer(whole.clone());
    let mut coeff = Rational::one();
    if whole.is_positive() {
        // Γ(f + n) = Γ(f) · f (f+1) ··· (f+n−1)
        let mut x = frac.clone();
        let mut k = BigInt::zero();
        while k < whole {
            coeff *= &x;
            x += Rational::one();
            k += 1;
        }
    } else {
        // Γ(z) = Γ(f) / (z (z+1) ··· (f−1))
        let mut x = z.clone();
        while x < frac {
            coeff /= &x;
            x += Rational::one();
        }
    }
    Ok((coeff, Some(frac)))
}

fn is_pole(z: &Rational) -> bool {
    is_integer(z) && !z.is_positive()
}

/// `x^(α) = Γ(x+1)/Γ(x−α+1)` in exact arithmetic.
pub fn falling_factorial_exact(x: &Rational, alpha: &Rational) -> Result<GammaMonomial> {
    if let Some(k) = as_i64(alpha) {
        return integer_falling_exact(x, k).map(GammaMonomial::rational);
    }
    let top = x + Rational::one();
    let bottom = x - alpha + Rational::one();
    if is_pole(&top) {
        return Err(Error::Pole(format!("{x}^({alpha}): Γ({top}) in the numerator")));
    }
    Ok(GammaMonomial::gamma(&top)? * GammaMonomial::recip_gamma(&bottom))
}

/// Product form for integer `k`: `x(x−1)···(x−k+1)` when `k ≥ 0`, and
/// `1/((x+1)···(x−k))` when `k < 0`. Valid through the poles as a limit.
fn integer_falling_exact(x: &Rational, k: i64) -> Result<Rational> {
    let mut acc = Rational::one();
    if k >= 0 {
        for i in 0..k {
            acc *= x - int(i);
        }
        return Ok(acc);
    }
    for i in 1..=-k {
        let factor = x + int(i);
        if factor.is_zero() {
            return Err(Error::Pole(format!("{x}^({k}): numerator pole")));
        }
        acc /= factor;
    }
    Ok(acc)
}

/// The fractional-sum coefficient `c_n(ν) = Γ(ν+n)/(Γ(ν) n!) = Π_{i<n} (ν+i) / n!`.
pub fn binom_rising(nu: &Rational, n: usize) -> Rational {
    let mut c = Rational::one();
    for i in 0..n {
        c *= (nu + int(i as i64)) / int(i as i64 + 1);
    }
    c
}

/// `c_0(ν), …, c_{len−1}(ν)` by the recurrence `c_n = c_{n−1} (ν+n−1)/n`.
pub fn binom_rising_table(nu: &Rational, len: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(len);
    let mut c = Rational::one();
    for n in 0..len {
        if n > 0 {
            c = c * (nu + int(n as i64 - 1)) / int(n as i64);
        }
        out.push(c.clone());
    }
    out
}

/// Residual of `Γ(x+1)/(Γ(k+1)Γ(x−k+1)) = Γ(x+2)/(Γ(k+2)Γ(x−k+1)) − Γ(x+1)/(Γ(k+2)Γ(x−k))`.
pub fn gamma_telescope_residual_exact(x: &Rational, k: &Rational) -> Result<GammaMonomial> {
    check_telescope_domain(x, k)?;
    let one = Rational::one();
    let g = |z: Rational| GammaMonomial::gamma(&z);
    let rg = |z: Rational| GammaMonomial::recip_gamma(&z);
    let lhs = g(x + &one)? * rg(k + &one) * rg(x - k + &one);
    let first = g(x + int(2))? * rg(k + int(2)) * rg(x - k + &one);
    let second = g(x + &one)? * rg(k + int(2)) * rg(x - k);
    let rhs = first
        .checked_sub(&second)
        .ok_or_else(|| Error::Exactness("telescope terms have different units".into()))?;
    lhs.checked_sub(&rhs)
        .ok_or_else(|| Error::Exactness("telescope sides have different units".into()))
}

pub(crate) fn check_telescope_domain(x: &Rational, k: &Rational) -> Result<()> {
    let minus_one = -Rational::one();
    if x > k && x > &minus_one && k > &minus_one {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "telescope identity needs x > k, x > -1, k > -1 (x = {x}, k = {k})"
        )))
    }
}

// ---------------------------------------------------------------------------
// Floating-point gamma ratios

/// `(ln|Γ(z)|, sign Γ(z))`, or `None` at a pole.
pub fn ln_gamma_signed(z: f64) -> Option<(f64, f64)> {
    if z <= 0.0 && z.fract() == 0.0 {
        return None;
    }
    let (value, sign) = libm::lgamma_r(z);
    Some((value, f64::from(sign)))
}

fn float_pole(z: f64) -> bool {
    z <= 0.0 && z.fract() == 0.0
}

/// Integer exponents up to this size use the product form in floating point.
const PRODUCT_FORM_LIMIT: f64 = 4096.0;

/// `x^(α)` in `f64` via log-gamma differences with sign tracking.
pub fn falling_factorial_f64(x: f64, alpha: f64) -> Result<f64> {
    if !x.is_finite() || !alpha.is_finite() {
        return Err(Error::Domain(format!("non-finite falling factorial {x}^({alpha})")));
    }
    if alpha.fract() == 0.0 && alpha.abs() <= PRODUCT_FORM_LIMIT {
        let k = alpha as i64;
        let mut acc = 1.0;
        if k >= 0 {
            for i in 0..k {
                acc *= x - i as f64;
            }
        } else {
            for i in 1..=-k {
                let factor = x + i as f64;
                if factor == 0.0 {
                    return Err(Error::Pole(format!("{x}^({alpha}): numerator pole")));
                }
                acc /= factor;
            }
        }
        return Ok(acc);
    }
    ratio_f64(x + 1.0, x - alpha + 1.0, None)
}

/// `x^(α) / Γ(z)` in `f64`, combining the three log-gamma terms before
/// exponentiating.
pub fn falling_over_gamma_f64(x: f64, alpha: f64, z: f64) -> Result<f64> {
    if float_pole(z) {
        falling_factorial_f64(x, alpha)?;
        return Ok(0.0);
    }
    if alpha.fract() == 0.0 {
        let head = falling_factorial_f64(x, alpha)?;
        let (lz, sz) = ln_gamma_signed(z).expect("pole handled above");
        return Ok(head * sz * (-lz).exp());
    }
    ratio_f64(x + 1.0, x - alpha + 1.0, Some(z))
}

/// `Γ(top) / (Γ(bottom) Γ(extra))` for a non-integer gap between `top` and
/// `bottom`, so at most one of the two can be a pole.
fn ratio_f64(top: f64, bottom: f64, extra: Option<f64>) -> Result<f64> {
    if float_pole(bottom) {
        return Ok(0.0);
    }
    let Some((lt, st)) = ln_gamma_signed(top) else {
        return Err(Error::Pole(format!("Γ({top}) in the numerator")));
    };
    let (lb, sb) = ln_gamma_signed(bottom).expect("pole handled above");
    let (le, se) = match extra {
        Some(z) => ln_gamma_signed(z).expect("caller filters poles"),
        None => (0.0, 1.0),
    };
    Ok(st * sb * se * (lt - lb - le).exp())
}

/// `1/Γ(z)` in `f64`, zero at the poles.
pub fn recip_gamma_f64(z: f64) -> f64 {
    match ln_gamma_signed(z) {
        Some((l, s)) => s * (-l).exp(),
        None => 0.0,
    }
}

pub fn gamma_telescope_residual_f64(x: f64, k: f64) -> f64 {
    // Γ(x+1)/Γ(x−k+1) = (Γ(x+2)/Γ(x−k+1) − Γ(x+1)/Γ(x−k)) / (k+1), scaled by 1/Γ(k+1).
    let lhs = falling_over_gamma_f64(x, k, k + 1.0).unwrap_or(f64::NAN);
    let first = falling_over_gamma_f64(x + 1.0, k + 1.0, k + 2.0).unwrap_or(f64::NAN);
    let second = falling_over_gamma_f64(x, k + 1.0, k + 2.0).unwrap_or(f64::NAN);
    lhs - (first - second)
}
