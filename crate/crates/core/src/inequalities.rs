//! Certificates for the remainder bounds and the Ostrowski, Poincaré,
//! Sobolev and averaged Sobolev type inequalities.
//!
//! Each builder evaluates both sides on a concrete function and records the
//! slack `rhs − lhs`. Quantities that only involve integer powers are kept in
//! the grid's scalar type, so on the exact backend the comparison itself is
//! exact. Fractional powers and roots are evaluated in `f64`; the certificate
//! then says so, and the float verdict allows a roundoff floor of
//! `1e−9 · max(1, |rhs|)`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::grid::{sum, GridFn};
use crate::identities::CaputoTaylor;
use crate::numerics::{as_index, int, is_integer, to_f64, FracOrder, Scalar};
use crate::operators::forward_difference;
use crate::{Error, Rational, Result};

/// Float slack floor, relative to `max(1, |rhs|)`.
pub const FLOAT_SLACK_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    TaylorRemainder,
    Ostrowski,
    Poincare,
    Sobolev,
    AvgSobolev,
}

impl Inequality {
    pub fn name(self) -> &'static str {
        match self {
            Inequality::TaylorRemainder => "taylor_remainder",
            Inequality::Ostrowski => "ostrowski",
            Inequality::Poincare => "poincare",
            Inequality::Sobolev => "sobolev",
            Inequality::AvgSobolev => "avg_sobolev",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Conjugate exponents `γ, δ > 1` with `1/γ + 1/δ = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolderPair {
    gamma: Rational,
    delta: Rational,
}

impl HolderPair {
    pub fn new(gamma: Rational, delta: Rational) -> Result<Self> {
        let one = Rational::one();
        if gamma <= one || delta <= one {
            return Err(Error::Holder(format!("γ = {gamma}, δ = {delta}")));
        }
        if gamma.recip() + delta.recip() != one {
            return Err(Error::Holder(format!(
                "1/{gamma} + 1/{delta} = {}",
                gamma.recip() + delta.recip()
            )));
        }
        Ok(Self { gamma, delta })
    }

    /// The pair `(γ, γ/(γ−1))`.
    pub fn conjugate(gamma: Rational) -> Result<Self> {
        let delta = &gamma / (&gamma - Rational::one());
        Self::new(gamma, delta)
    }

    pub fn gamma(&self) -> &Rational {
        &self.gamma
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    fn is_two_two(&self) -> bool {
        self.gamma == int(2) && self.delta == int(2)
    }
}

/// Exact comparison of `lhs^power` against `rhs^power`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactForm {
    pub power: u32,
    pub lhs: String,
    pub rhs: String,
    pub slack: String,
    #[serde(skip)]
    pub slack_value: Rational,
}

impl ExactForm {
    fn new(power: u32, lhs: Rational, rhs: Rational) -> Self {
        let slack = &rhs - &lhs;
        Self {
            power,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            slack: slack.to_string(),
            slack_value: slack,
        }
    }
}

/// An intermediate quantity of a bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factor {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

/// One inequality instance: both sides, slack and how they were computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub inequality: Inequality,
    pub params: BTreeMap<String, String>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Whether the verdict rests on an exact comparison.
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_form: Option<ExactForm>,
    pub witness: BTreeMap<String, String>,
    pub factors: BTreeMap<String, Factor>,
    pub pass: bool,
}

impl BoundCertificate {
    fn build(
        inequality: Inequality,
        params: BTreeMap<String, String>,
        lhs: f64,
        rhs: f64,
        exact_form: Option<ExactForm>,
        witness: BTreeMap<String, String>,
        factors: BTreeMap<String, Factor>,
    ) -> Self {
        let slack = rhs - lhs;
        let pass = match &exact_form {
            Some(e) => !e.slack_value.is_negative(),
            None => slack >= -FLOAT_SLACK_FLOOR * rhs.abs().max(1.0),
        };
        Self {
            inequality,
            params,
            lhs,
            rhs,
            slack,
            exact: exact_form.is_some(),
            exact_form,
            witness,
            factors,
            pass,
        }
    }

    /// Verdict-relevant slack as a float, normalised by `max(1, |rhs|)`.
    pub fn relative_slack(&self) -> f64 {
        match &self.exact_form {
            Some(e) => to_f64(&e.slack_value) / to_f64(&e.rhs.parse::<Rational>().unwrap_or_default()).abs().max(1.0),
            None => self.slack / self.rhs.abs().max(1.0),
        }
    }
}

fn factor<S: Scalar>(value: &S) -> Factor {
    Factor { value: value.to_f64(), exact: value.to_exact().map(|q| q.to_string()) }
}

fn float_factor(value: f64) -> Factor {
    Factor { value, exact: None }
}

/// Index and value of the largest `|x|` (first on ties).
fn argmax_abs<S: Scalar>(xs: &[S]) -> (usize, S) {
    let mut best = (0, S::zero());
    for (i, x) in xs.iter().enumerate() {
        let a = x.abs();
        if a > best.1 {
            best = (i, a);
        }
    }
    best
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn nonneg_index(q: &Rational, what: &str) -> Result<usize> {
    if is_integer(q) && !q.is_negative() {
        as_index(q).ok_or_else(|| Error::Domain(format!("{what} = {q} too large")))
    } else {
        Err(Error::Domain(format!("{what} = {q} must be a nonnegative integer offset")))
    }
}

/// `|x|^e` in `f64`.
fn powf_abs(x: f64, e: f64) -> f64 {
    x.abs().powf(e)
}

/// Positive integer value of `e`, if any.
fn small_integer(e: &Rational) -> Option<u32> {
    if is_integer(e) && e.is_positive() {
        e.to_integer().to_u32()
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Remainder bounds

/// Bound on the Caputo Taylor remainder at `t ∈ N_{a+m}`.
pub fn remainder_bound<S: Scalar>(f: &GridFn<S>, mu: &FracOrder, t: &Rational) -> Result<BoundCertificate> {
    remainder_bound_p(f, mu, 0, t)
}

/// `|Δ^p f(t) − Σ_{k=p}^{m−1} ((t−a)^(k−p)/(k−p)!) Δ^k f(a)|
///   ≤ ((t−a−ν)^(μ−p)/Γ(μ−p+1)) · max_{s ∈ {a+ν,…,t−μ+p}} |Δ_*^μ f(s)|`.
pub fn remainder_bound_p<S: Scalar>(
    f: &GridFn<S>,
    mu: &FracOrder,
    p: usize,
    t: &Rational,
) -> Result<BoundCertificate> {
    let taylor = CaputoTaylor::new(f, mu, p)?;
    let head = taylor.head(t)?;
    let n = nonneg_index(&(t - taylor.first_point()), "t − (a+m−p)")?;
    let target = forward_difference(f, p)?.eval(t)?;
    let lhs = (target - head).abs();

    let a = f.base();
    let order = mu.mu() - int(p as i64);
    let scale = S::falling_over_gamma(&(t - a - mu.nu()), &order, &(&order + Rational::one()))?;
    let window = &taylor.caputo().values()[..=n];
    let (arg, max) = argmax_abs(window);
    let rhs = scale.clone() * max.clone();

    let exact_form = match (lhs.to_exact(), rhs.to_exact()) {
        (Some(l), Some(r)) => Some(ExactForm::new(1, l, r)),
        _ => None,
    };
    let witness = params(&[
        ("argmax_s", taylor.caputo().point(arg).to_string()),
        ("window", format!("{}..={}", taylor.caputo().point(0), taylor.caputo().point(n))),
    ]);
    let mut factors = BTreeMap::new();
    factors.insert("kernel_scale".into(), factor(&scale));
    factors.insert("max_abs_caputo".into(), factor(&max));
    Ok(BoundCertificate::build(
        Inequality::TaylorRemainder,
        params(&[("mu", mu.to_string()), ("p", p.to_string()), ("a", a.to_string()), ("t", t.to_string())]),
        lhs.to_f64(),
        rhs.to_f64(),
        exact_form,
        witness,
        factors,
    ))
}

// ---------------------------------------------------------------------------
// Window-based inequalities

/// Shared set-up for the inequalities on `[a, b]`.
struct Window<S> {
    taylor: CaputoTaylor<S>,
    /// `Δ^p f(j)` for `j = a+m−p ..= b`.
    dp: Vec<S>,
    /// `Δ_*^μ f(s)` for `s = a+ν ..= b−μ+p`.
    caputo: Vec<S>,
}

impl<S: Scalar> Window<S> {
    fn new(f: &GridFn<S>, mu: &FracOrder, p: usize, b: &Rational, min_span: usize) -> Result<Self> {
        let a = f.base().clone();
        let taylor = CaputoTaylor::new(f, mu, p)?;
        let first = taylor.first_point();
        let span = nonneg_index(&(b - &first), "b − (a+m−p)")
            .map_err(|_| Error::Domain(format!("need a+m−p ≤ b, got a = {a}, m = {}, p = {p}, b = {b}", mu.m())))?;
        if span < min_span {
            return Err(Error::Domain(format!(
                "window [a+m−p+{min_span}, b] is empty: a = {a}, m = {}, p = {p}, b = {b}",
                mu.m()
            )));
        }
        let required = nonneg_index(&(b - &a), "b − a")? + p + 1;
        if f.len() < required {
            return Err(Error::TooShort { required, got: f.len() });
        }
        let diffs = forward_difference(f, p)?;
        let start = diffs.index_of(&first)?;
        let dp = diffs.values()[start..=start + span].to_vec();
        let caputo = taylor.caputo().values()[..=span].to_vec();
        Ok(Self { taylor, dp, caputo })
    }

    /// `Σ_{i≤J} w_i^γ` for every `J`, the inner Hölder sums, in `f64`.
    fn inner_sums_f64(&self, gamma: f64) -> Vec<f64> {
        let mut acc = 0.0;
        self.taylor.weights()[..self.caputo.len()]
            .iter()
            .map(|w| {
                acc += powf_abs(w.to_f64(), gamma);
                acc
            })
            .collect()
    }

    /// `Σ_{i≤J} w_i^2` for every `J` in the scalar type.
    fn inner_sums_sq(&self) -> Vec<S> {
        let mut acc = S::zero();
        self.taylor.weights()[..self.caputo.len()]
            .iter()
            .map(|w| {
                acc += w.clone() * w.clone();
                acc.clone()
            })
            .collect()
    }
}

/// Discrete fractional Ostrowski type inequality on `[a, b]`.
///
/// Requires `Δ^k f(a) = 0` for `k = p+1..m−1` and `a+m−p < b`. The average
/// runs over `j = a+m−p+1..=b` and is normalised by `b−a−m+p`.
pub fn ostrowski<S: Scalar>(f: &GridFn<S>, mu: &FracOrder, p: usize, b: &Rational) -> Result<BoundCertificate> {
    let w = Window::new(f, mu, p, b, 1)?;
    w.taylor.initial().require_zero(p + 1..mu.m(), &f.max_abs())?;
    let a = f.base();
    let count = w.dp.len() - 1; // = b − a − m + p
    let n = S::from_i64(count as i64);
    let dp_a = forward_difference(f, p)?.values()[0].clone();
    let mean = sum(w.dp[1..].iter().cloned()) / n.clone();
    let lhs = (mean - dp_a).abs();

    let order = mu.mu() - int(p as i64);
    let bracket = S::falling_over_gamma(
        &(b - a - mu.nu() + Rational::one()),
        &(&order + Rational::one()),
        &(&order + int(2)),
    )? - S::one();
    let (arg, max) = argmax_abs(&w.caputo);
    let rhs = bracket.clone() / n * max.clone();

    let exact_form = match (lhs.to_exact(), rhs.to_exact()) {
        (Some(l), Some(r)) => Some(ExactForm::new(1, l, r)),
        _ => None,
    };
    let mut factors = BTreeMap::new();
    factors.insert("bracket_over_gamma".into(), factor(&bracket));
    factors.insert("max_abs_caputo".into(), factor(&max));
    Ok(BoundCertificate::build(
        Inequality::Ostrowski,
        params(&[("mu", mu.to_string()), ("p", p.to_string()), ("a", a.to_string()), ("b", b.to_string())]),
        lhs.to_f64(),
        rhs.to_f64(),
        exact_form,
        params(&[("argmax_t", w.taylor.caputo().point(arg).to_string())]),
        factors,
    ))
}

/// Discrete fractional Poincaré inequality on `[a+m−p, b]`.
///
/// Requires `Δ^k f(a) = 0` for `k = p..m−1`.
pub fn poincare<S: Scalar>(
    f: &GridFn<S>,
    mu: &FracOrder,
    p: usize,
    hp: &HolderPair,
    b: &Rational,
) -> Result<BoundCertificate> {
    let w = Window::new(f, mu, p, b, 0)?;
    w.taylor.initial().require_zero(p..mu.m(), &f.max_abs())?;
    let (gamma, delta) = (to_f64(hp.gamma()), to_f64(hp.delta()));

    let lhs = w.dp.iter().map(|x| powf_abs(x.to_f64(), delta)).sum::<f64>();
    let kernel = w.inner_sums_f64(gamma).iter().map(|s| s.powf(delta / gamma)).sum::<f64>();
    let energy = w.caputo.iter().map(|x| powf_abs(x.to_f64(), delta)).sum::<f64>();
    let rhs = kernel * energy;

    let mut factors = BTreeMap::new();
    let exact_form = if hp.is_two_two() && S::BACKEND == crate::Backend::Exact {
        let lhs_s = sum(w.dp.iter().map(|x| x.clone() * x.clone()));
        let kernel_s = sum(w.inner_sums_sq().into_iter());
        let energy_s = sum(w.caputo.iter().map(|x| x.clone() * x.clone()));
        factors.insert("kernel_sum".into(), factor(&kernel_s));
        factors.insert("caputo_energy".into(), factor(&energy_s));
        Some(ExactForm::new(
            1,
            lhs_s.to_exact().expect("exact backend"),
            (kernel_s * energy_s).to_exact().expect("exact backend"),
        ))
    } else {
        factors.insert("kernel_sum".into(), float_factor(kernel));
        factors.insert("caputo_energy".into(), float_factor(energy));
        None
    };
    Ok(BoundCertificate::build(
        Inequality::Poincare,
        params(&[
            ("mu", mu.to_string()),
            ("p", p.to_string()),
            ("a", f.base().to_string()),
            ("b", b.to_string()),
            ("gamma", hp.gamma().to_string()),
            ("delta", hp.delta().to_string()),
        ]),
        lhs,
        rhs,
        exact_form,
        params(&[("window", format!("{}..={}", w.taylor.first_point(), b))]),
        factors,
    ))
}

/// Discrete Sobolev type fractional inequality on `[a+m−p, b]`, `r ≥ 1`.
///
/// With `γ = δ = 2` and even integer `r` the comparison of `lhs^r` and
/// `rhs^r` is exact on the exact backend.
pub fn sobolev<S: Scalar>(
    f: &GridFn<S>,
    mu: &FracOrder,
    p: usize,
    hp: &HolderPair,
    r: &Rational,
    b: &Rational,
) -> Result<BoundCertificate> {
    if *r < Rational::one() {
        return Err(Error::Range(format!("r must be at least 1, got {r}")));
    }
    let w = Window::new(f, mu, p, b, 0)?;
    w.taylor.initial().require_zero(p..mu.m(), &f.max_abs())?;
    let (gamma, delta, rf) = (to_f64(hp.gamma()), to_f64(hp.delta()), to_f64(r));

    let lhs = w.dp.iter().map(|x| powf_abs(x.to_f64(), rf)).sum::<f64>().powf(1.0 / rf);
    let kernel = w
        .inner_sums_f64(gamma)
        .iter()
        .map(|s| s.powf(rf / gamma))
        .sum::<f64>()
        .powf(1.0 / rf);
    let energy = w.caputo.iter().map(|x| powf_abs(x.to_f64(), delta)).sum::<f64>().powf(1.0 / delta);
    let rhs = kernel * energy;

    let mut factors = BTreeMap::new();
    factors.insert("kernel_norm".into(), float_factor(kernel));
    factors.insert("caputo_norm".into(), float_factor(energy));
    let even_r = small_integer(r).filter(|n| n % 2 == 0);
    let exact_form = match even_r {
        Some(power) if hp.is_two_two() && S::BACKEND == crate::Backend::Exact => {
            let half = power / 2;
            let lhs_s = sum(w.dp.iter().map(|x| x.abs().powi(power)));
            let kernel_s = sum(w.inner_sums_sq().into_iter().map(|s| s.powi(half)));
            let energy_s = sum(w.caputo.iter().map(|x| x.clone() * x.clone())).powi(half);
            Some(ExactForm::new(
                power,
                lhs_s.to_exact().expect("exact backend"),
                (kernel_s * energy_s).to_exact().expect("exact backend"),
            ))
        }
        _ => None,
    };
    Ok(BoundCertificate::build(
        Inequality::Sobolev,
        params(&[
            ("mu", mu.to_string()),
            ("p", p.to_string()),
            ("a", f.base().to_string()),
            ("b", b.to_string()),
            ("gamma", hp.gamma().to_string()),
            ("delta", hp.delta().to_string()),
            ("r", r.to_string()),
        ]),
        lhs,
        rhs,
        exact_form,
        params(&[("window", format!("{}..={}", w.taylor.first_point(), b))]),
        factors,
    ))
}

// ---------------------------------------------------------------------------
// Averaged Sobolev

/// A positive weight `C(s)` on a window `{a+ν, …, b−μ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightFn {
    Constant(Rational),
    /// `intercept + slope · s`.
    Affine { intercept: Rational, slope: Rational },
    /// Values at `s = a+ν, a+ν+1, …`.
    Table(Vec<Rational>),
}

impl WeightFn {
    fn eval(&self, s: &Rational, index: usize) -> Result<Rational> {
        match self {
            WeightFn::Constant(c) => Ok(c.clone()),
            WeightFn::Affine { intercept, slope } => Ok(intercept + slope * s),
            WeightFn::Table(v) => v
                .get(index)
                .cloned()
                .ok_or_else(|| Error::Weight(format!("weight table has no entry for s = {s}"))),
        }
    }
}

/// Orders `μ_1 < … < μ_k`, one weight per order, and the norm exponent `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct AvgSobolevSpec {
    orders: Vec<FracOrder>,
    weights: Vec<WeightFn>,
    r: Rational,
}

impl AvgSobolevSpec {
    pub fn new(orders: Vec<FracOrder>, weights: Vec<WeightFn>, r: Rational) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::Config("at least one order is required".into()));
        }
        if orders.len() != weights.len() {
            return Err(Error::Config(format!(
                "{} orders but {} weights",
                orders.len(),
                weights.len()
            )));
        }
        if orders.windows(2).any(|w| w[0].mu() >= w[1].mu()) {
            return Err(Error::Order("orders must be strictly increasing".into()));
        }
        if r < Rational::one() {
            return Err(Error::Range(format!("r must be at least 1, got {r}")));
        }
        Ok(Self { orders, weights, r })
    }

    pub fn orders(&self) -> &[FracOrder] {
        &self.orders
    }

    pub fn weights(&self) -> &[WeightFn] {
        &self.weights
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }
}

/// Discrete fractional average Sobolev type inequality on `[a+m_k, b]`, with
/// `a` the grid base:
/// `‖f‖_r ≤ √(δ* ρ*) · ((Σ_l B_l)/k)^{1/2}`.
pub fn avg_sobolev<S: Scalar>(f: &GridFn<S>, spec: &AvgSobolevSpec, b: &Rational) -> Result<BoundCertificate> {
    let a = f.base().clone();
    let top = spec.orders.last().expect("nonempty");
    let rf = to_f64(&spec.r);
    let exact_r2 = spec.r == int(2) && S::BACKEND == crate::Backend::Exact;

    let mut factors = BTreeMap::new();
    let mut delta_star = (f64::NEG_INFINITY, None::<S>);
    let mut rho_star: Option<Rational> = None;
    let mut b_total = S::zero();
    let mut lhs_window: Option<Vec<S>> = None;

    for (l, (mu, weight)) in spec.orders.iter().zip(&spec.weights).enumerate() {
        let w = Window::new(f, mu, 0, b, 0)?;
        if l + 1 == spec.orders.len() {
            w.taylor.initial().require_zero(0..top.m(), &f.max_abs())?;
            lhs_window = Some(w.dp.clone());
        }
        let inner = w.inner_sums_f64(2.0);
        let delta_l = inner.iter().map(|s| s.powf(rf / 2.0)).sum::<f64>().powf(2.0 / rf);
        let delta_l_s = exact_r2.then(|| sum(w.inner_sums_sq().into_iter()));

        let mut b_l = S::zero();
        let mut rho_l: Option<Rational> = None;
        for (i, d) in w.caputo.iter().enumerate() {
            let s = w.taylor.caputo().point(i);
            let c = weight.eval(&s, i)?;
            if !c.is_positive() {
                return Err(Error::Weight(format!("C_{}({s}) = {c} is not positive", l + 1)));
            }
            let inv = c.recip();
            if rho_l.as_ref().map_or(true, |r| &inv > r) {
                rho_l = Some(inv);
            }
            b_l += S::from_rational(&c) * d.clone() * d.clone();
        }
        let rho_l = rho_l.expect("window is nonempty");

        let tag = |name: &str| format!("{name}_{}", l + 1);
        factors.insert(tag("B"), factor(&b_l));
        factors.insert(
            tag("delta"),
            match &delta_l_s {
                Some(v) => factor(v),
                None => float_factor(delta_l),
            },
        );
        factors.insert(tag("rho"), factor(&rho_l));
        // the per-order bound ‖f‖²_{r,[a+m_l,b]} ≤ δ_l (Σ (Δ_*^{μ_l} f)²), before weighting
        let energy = w.caputo.iter().map(|x| x.to_f64() * x.to_f64()).sum::<f64>();
        factors.insert(tag("single_order_bound_sq"), float_factor(delta_l * energy));

        if delta_l > delta_star.0 {
            delta_star = (delta_l, delta_l_s);
        }
        if rho_star.as_ref().map_or(true, |r| &rho_l > r) {
            rho_star = Some(rho_l);
        }
        b_total += b_l;
    }

    let k = spec.orders.len();
    let rho_star = rho_star.expect("at least one order");
    let dp = lhs_window.expect("last order processed");
    let lhs = dp.iter().map(|x| powf_abs(x.to_f64(), rf)).sum::<f64>().powf(1.0 / rf);
    let rhs = (delta_star.0 * to_f64(&rho_star) * b_total.to_f64() / k as f64).sqrt();

    factors.insert("delta_star".into(), match &delta_star.1 {
        Some(v) => factor(v),
        None => float_factor(delta_star.0),
    });
    factors.insert("rho_star".into(), factor(&rho_star));
    factors.insert("B_sum".into(), factor(&b_total));

    let exact_form = match (&delta_star.1, exact_r2) {
        (Some(ds), true) => {
            let lhs_sq = sum(dp.iter().map(|x| x.clone() * x.clone()));
            let rhs_sq = ds.clone() * S::from_rational(&rho_star) * b_total.clone() / S::from_i64(k as i64);
            Some(ExactForm::new(2, lhs_sq.to_exact().expect("exact"), rhs_sq.to_exact().expect("exact")))
        }
        _ => None,
    };
    let orders = spec.orders.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",");
    Ok(BoundCertificate::build(
        Inequality::AvgSobolev,
        params(&[("mu", orders), ("a", a.to_string()), ("b", b.to_string()), ("r", spec.r.to_string())]),
        lhs,
        rhs,
        exact_form,
        params(&[("window", format!("{}..={}", &a + int(top.m() as i64), b))]),
        factors,
    ))
}
