//! Both sides of the discrete fractional identities, returned as residuals.
//!
//! Grid-valued identities produce a [`ResidualSeries`] over their common
//! domain. Closed-form sums whose values are irrational (they carry factors
//! such as `Γ(1/2) = √π`) are evaluated exactly as [`GammaMonomial`]s, with a
//! separate `f64` route.
//!
//! Every summation range `{a+ν, a+ν+1, …, u}` is enumerated by integer
//! offsets; an upper limit below the lower limit gives an empty sum.

use num_traits::{One, Signed};

use crate::grid::GridFn;
use crate::numerics::{
    as_index, factorial, falling_factorial_exact, falling_factorial_f64, int, is_integer, ceil,
    to_f64, FracOrder, GammaMonomial, Scalar,
};
use crate::operators::{
    caputo_difference_with, difference_at_base, forward_difference, fractional_sum,
    rl_difference, caputo_difference, Kernel, RisingKernel,
};
use crate::{Error, Rational, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualPoint<S> {
    pub t: Rational,
    pub lhs: S,
    pub rhs: S,
    pub residual: S,
}

/// Pointwise `lhs − rhs` of an identity.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSeries<S> {
    pub points: Vec<ResidualPoint<S>>,
}

impl<S: Scalar> Default for ResidualSeries<S> {
    fn default() -> Self {
        Self { points: Vec::new() }
    }
}

impl<S: Scalar> ResidualSeries<S> {
    pub fn push(&mut self, t: Rational, lhs: S, rhs: S) {
        let residual = lhs.clone() - rhs.clone();
        self.points.push(ResidualPoint { t, lhs, rhs, residual });
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn extend(&mut self, other: Self) {
        self.points.extend(other.points);
    }

    pub fn max_abs_residual(&self) -> S {
        self.points
            .iter()
            .map(|p| p.residual.abs())
            .fold(S::zero(), |m, r| if r > m { r } else { m })
    }

    pub fn all_zero(&self) -> bool {
        self.points.iter().all(|p| p.residual.is_zero())
    }

    /// `|residual| / max(1, |lhs|, |rhs|)` at one point.
    pub fn relative(point: &ResidualPoint<S>) -> f64 {
        let scale = 1f64.max(point.lhs.to_f64().abs()).max(point.rhs.to_f64().abs());
        point.residual.to_f64().abs() / scale
    }

    /// The point with the largest relative residual.
    pub fn worst(&self) -> Option<&ResidualPoint<S>> {
        self.points
            .iter()
            .max_by(|x, y| Self::relative(x).total_cmp(&Self::relative(y)))
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.worst().map(Self::relative).unwrap_or(0.0)
    }

    /// Exact backends require every residual to vanish; floats allow
    /// `rel_tol` relative to `max(1, |lhs|, |rhs|)`.
    pub fn within(&self, rel_tol: f64) -> bool {
        if S::BACKEND == crate::Backend::Exact {
            self.all_zero()
        } else {
            self.points.iter().all(|p| Self::relative(p) <= rel_tol)
        }
    }
}

/// `Δ^k f(a)` for `k = 0..count`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialDiffs<S> {
    pub a: Rational,
    pub diffs: Vec<S>,
}

impl<S: Scalar> InitialDiffs<S> {
    pub fn of(f: &GridFn<S>, count: usize) -> Result<Self> {
        let diffs = (0..count).map(|k| difference_at_base(f, k)).collect::<Result<_>>()?;
        Ok(Self { a: f.base().clone(), diffs })
    }

    /// Fails with the first `k` in `range` whose difference is not zero.
    pub fn require_zero(&self, range: std::ops::Range<usize>, scale: &S) -> Result<()> {
        for k in range {
            let d = &self.diffs[k];
            if !d.is_negligible(scale) {
                return Err(Error::HypothesisViolated { k, value: d.to_text() });
            }
        }
        Ok(())
    }
}

/// `t − base` as a nonnegative index, or a domain error naming the lattice.
fn lattice_index(t: &Rational, base: &Rational) -> Result<usize> {
    let offset = t - base;
    if !is_integer(&offset) || offset.is_negative() {
        return Err(Error::Domain(format!("t = {t} is not in N_{base}")));
    }
    as_index(&offset).ok_or_else(|| Error::Domain(format!("t = {t} too far from {base}")))
}

fn require_nonneg_integer_base(a: &Rational) -> Result<()> {
    if is_integer(a) && !a.is_negative() {
        Ok(())
    } else {
        Err(Error::Domain(format!("base a = {a} must be in {{0, 1, 2, …}}")))
    }
}

// ---------------------------------------------------------------------------
// Taylor formulas

/// Classical discrete Taylor formula with integer order `m`:
/// `Σ_{k<m} ((t−a)^(k)/k!) Δ^k f(a) + (1/(m−1)!) Σ_{s=a}^{t−m} (t−s−1)^(m−1) Δ^m f(s)`.
pub fn taylor_classic_rhs<S: Scalar>(f: &GridFn<S>, m: usize, t: &Rational) -> Result<S> {
    if m == 0 {
        return Err(Error::Order("classical Taylor order must be positive".into()));
    }
    let a = f.base();
    let n = lattice_index(t, &(a + int(m as i64)))?;
    let top = forward_difference(f, m)?;
    if n >= top.len() {
        return Err(Error::TooShort { required: n + m + 1, got: f.len() });
    }
    let x = t - a;
    let mut head = S::zero();
    for k in 0..m {
        let w = S::falling_factorial(&x, &int(k as i64))? / S::from_rational(&factorial(k));
        head += w * difference_at_base(f, k)?;
    }
    let m_minus_1 = int(m as i64 - 1);
    let norm = S::from_rational(&factorial(m - 1));
    let mut tail = S::zero();
    for i in 0..=n {
        // s = a + i, so t − s − 1 = m − 1 + (n − i)
        let lag = &m_minus_1 + int((n - i) as i64);
        tail += S::falling_factorial(&lag, &m_minus_1)? * top.values()[i].clone();
    }
    Ok(head + tail / norm)
}

/// The Caputo fractional Taylor expansion of `Δ^p f` around `a`, prepared once
/// and evaluated at any `t ∈ N_{a+m−p}`:
///
/// ```text
/// Δ^p f(t) = Σ_{k=p}^{m−1} ((t−a)^(k−p)/(k−p)!) Δ^k f(a)
///          + (1/Γ(μ−p)) Σ_{s=a+ν}^{t−μ+p} (t−s−1)^(μ−p−1) Δ_*^μ f(s)
/// ```
///
/// `p = 0` is the plain Caputo Taylor formula. The remainder weights are
/// computed from gamma ratios, independently of the kernel that produces
/// `Δ_*^μ f`.
#[derive(Clone, Debug)]
pub struct CaputoTaylor<S> {
    a: Rational,
    mu: FracOrder,
    p: usize,
    initial: InitialDiffs<S>,
    caputo: GridFn<S>,
    weights: Vec<S>,
}

impl<S: Scalar> CaputoTaylor<S> {
    pub fn new(f: &GridFn<S>, mu: &FracOrder, p: usize) -> Result<Self> {
        Self::with_kernel(f, mu, p, &RisingKernel)
    }

    pub fn with_kernel<K: Kernel<S> + ?Sized>(
        f: &GridFn<S>,
        mu: &FracOrder,
        p: usize,
        kernel: &K,
    ) -> Result<Self> {
        if int(p as i64) >= *mu.mu() {
            return Err(Error::Order(format!("need p < μ, got p = {p}, μ = {mu}")));
        }
        require_nonneg_integer_base(f.base())?;
        let caputo = caputo_difference_with(f, mu, kernel)?;
        let initial = InitialDiffs::of(f, mu.m())?;
        let order = mu.mu() - int(p as i64);
        let lag0 = &order - Rational::one();
        // w_0 from the gamma ratio, then (x+1)^(α)/x^(α) = (x+1)/(x+1−α)
        let mut weights = Vec::with_capacity(caputo.len());
        if !caputo.is_empty() {
            weights.push(S::falling_over_gamma(&lag0, &lag0, &order)?);
        }
        for i in 1..caputo.len() {
            let step = (&lag0 + int(i as i64)) / int(i as i64);
            let next = weights[i - 1].clone() * S::from_rational(&step);
            weights.push(next);
        }
        Ok(Self { a: f.base().clone(), mu: mu.clone(), p, initial, caputo, weights })
    }

    /// First point where the formula applies, `a + m − p`.
    pub fn first_point(&self) -> Rational {
        &self.a + int((self.mu.m() - self.p) as i64)
    }

    /// Last point the prepared data covers.
    pub fn last_point(&self) -> Rational {
        self.first_point() + int(self.caputo.len() as i64 - 1)
    }

    pub fn caputo(&self) -> &GridFn<S> {
        &self.caputo
    }

    /// `(μ−p−1+i)^(μ−p−1)/Γ(μ−p)` for `i = 0..`, the remainder weights by lag.
    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn order(&self) -> &FracOrder {
        &self.mu
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn initial(&self) -> &InitialDiffs<S> {
        &self.initial
    }

    /// `Σ_{k=p}^{m−1} ((t−a)^(k−p)/(k−p)!) Δ^k f(a)`.
    pub fn head(&self, t: &Rational) -> Result<S> {
        self.index(t)?;
        let x = t - &self.a;
        let mut acc = S::zero();
        for k in self.p..self.mu.m() {
            let j = k - self.p;
            let w = S::falling_factorial(&x, &int(j as i64))? / S::from_rational(&factorial(j));
            acc += w * self.initial.diffs[k].clone();
        }
        Ok(acc)
    }

    /// `(1/Γ(μ−p)) Σ_{s=a+ν}^{t−μ+p} (t−s−1)^(μ−p−1) Δ_*^μ f(s)`.
    pub fn remainder(&self, t: &Rational) -> Result<S> {
        let n = self.index(t)?;
        Ok(S::convolution_at(&self.weights, self.caputo.values(), n))
    }

    pub fn rhs(&self, t: &Rational) -> Result<S> {
        Ok(self.head(t)? + self.remainder(t)?)
    }

    fn index(&self, t: &Rational) -> Result<usize> {
        let n = lattice_index(t, &self.first_point())?;
        if n >= self.caputo.len() {
            return Err(Error::TooShort {
                required: n + self.mu.m() + 1,
                got: self.caputo.len() + self.mu.m(),
            });
        }
        Ok(n)
    }

    /// `Δ^p f(t)` against the expansion at every covered `t`.
    pub fn residuals(&self, f: &GridFn<S>) -> Result<ResidualSeries<S>> {
        let target = forward_difference(f, self.p)?;
        let remainders = S::causal_convolution(&self.weights, self.caputo.values());
        let mut out = ResidualSeries::default();
        for (n, r) in remainders.into_iter().enumerate() {
            let t = self.first_point() + int(n as i64);
            out.push(t.clone(), target.eval(&t)?, self.head(&t)? + r);
        }
        Ok(out)
    }

    /// Same as [`residuals`](Self::residuals) but the right side omits the
    /// initial-difference head, as in the representations that assume
    /// `Δ^k f(a) = 0` for `k = p..m−1`.
    pub fn pure_remainder_residuals(&self, f: &GridFn<S>) -> Result<ResidualSeries<S>> {
        self.initial.require_zero(self.p..self.mu.m(), &f.max_abs())?;
        let target = forward_difference(f, self.p)?;
        let remainders = S::causal_convolution(&self.weights, self.caputo.values());
        let mut out = ResidualSeries::default();
        for (n, r) in remainders.into_iter().enumerate() {
            let t = self.first_point() + int(n as i64);
            out.push(t.clone(), target.eval(&t)?, r);
        }
        Ok(out)
    }
}

/// Right side of the Caputo fractional Taylor formula at `t ∈ N_{a+m}`.
pub fn taylor_caputo_rhs<S: Scalar>(f: &GridFn<S>, mu: &FracOrder, t: &Rational) -> Result<S> {
    CaputoTaylor::new(f, mu, 0)?.rhs(t)
}

/// Right side of the extended formula for `Δ^p f(t)`, `t ∈ N_{a+m−p}`.
pub fn taylor_extended_rhs<S: Scalar>(
    f: &GridFn<S>,
    mu: &FracOrder,
    p: usize,
    t: &Rational,
) -> Result<S> {
    CaputoTaylor::new(f, mu, p)?.rhs(t)
}

/// Residual of `f(t) = Σ_{k<m} ((t−a)^(k)/k!) Δ^k f(a) + Δ^{−μ} Δ_*^μ f(t)`
/// where the last term is routed through the operators, against the direct
/// integer-order remainder `(1/(m−1)!) Σ_{s=a}^{t−m} (t−s−1)^(m−1) Δ^m f(s)`.
pub fn remainder_routes_residual<S: Scalar>(
    f: &GridFn<S>,
    mu: &FracOrder,
) -> Result<ResidualSeries<S>> {
    let caputo = caputo_difference(f, mu)?;
    let via_fractional = fractional_sum(&caputo, mu.mu())?;
    let m = mu.m();
    let top = forward_difference(f, m)?;
    let m_minus_1 = int(m as i64 - 1);
    let norm = S::from_rational(&factorial(m - 1));
    let weights = (0..top.len())
        .map(|k| S::falling_factorial(&(&m_minus_1 + int(k as i64)), &m_minus_1))
        .collect::<Result<Vec<_>>>()?;
    let direct = S::causal_convolution(&weights, top.values());
    let mut out = ResidualSeries::default();
    for (n, (lhs, d)) in via_fractional.values().iter().zip(direct).enumerate() {
        out.push(via_fractional.point(n), lhs.clone(), d / norm.clone());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Operator identities

/// `Δ^{−ν}(Δ^{−μ} f)` and `Δ^{−μ}(Δ^{−ν} f)` against `Δ^{−(μ+ν)} f` on
/// `N_{a+μ+ν}`. The series lists the first ordering, then the second.
pub fn composition_residual<S: Scalar>(
    f: &GridFn<S>,
    mu: &Rational,
    nu: &Rational,
) -> Result<ResidualSeries<S>> {
    let single = fractional_sum(f, &(mu + nu))?;
    let nu_after_mu = fractional_sum(&fractional_sum(f, mu)?, nu)?;
    let mu_after_nu = fractional_sum(&fractional_sum(f, nu)?, mu)?;
    let mut out = ResidualSeries::default();
    for path in [nu_after_mu, mu_after_nu] {
        debug_assert_eq!(path.base(), single.base());
        for (j, (l, r)) in path.values().iter().zip(single.values()).enumerate() {
            out.push(single.point(j), l.clone(), r.clone());
        }
    }
    Ok(out)
}

/// The initial-data correction `Σ_{k<terms} ((t−a)^(ν−p+k)/Γ(ν+k−p+1)) Δ^k f(a)`.
fn exchange_correction<S: Scalar>(
    diffs: &[S],
    a: &Rational,
    nu: &Rational,
    p: usize,
    t: &Rational,
) -> Result<S> {
    let x = t - a;
    let mut acc = S::zero();
    for (k, d) in diffs.iter().enumerate() {
        let shift = nu + int(k as i64 - p as i64);
        let w = S::falling_over_gamma(&x, &shift, &(&shift + Rational::one()))?;
        acc += w * d.clone();
    }
    Ok(acc)
}

/// `Δ^{−ν} Δ^p f(t)` against `Δ^p Δ^{−ν} f(t) − Σ_{k=0}^{p−1} …` on `N_{a+ν}`.
pub fn exchange_residual<S: Scalar>(
    f: &GridFn<S>,
    nu: &Rational,
    p: usize,
) -> Result<ResidualSeries<S>> {
    exchange_residual_terms(f, nu, p, p)
}

/// The exchange formula with the correction sum truncated to `terms` terms
/// (`k = 0..terms`). Only `terms = p` is an identity.
pub fn exchange_residual_terms<S: Scalar>(
    f: &GridFn<S>,
    nu: &Rational,
    p: usize,
    terms: usize,
) -> Result<ResidualSeries<S>> {
    if p == 0 {
        return Err(Error::Order("exchange formula needs a positive integer p".into()));
    }
    if f.len() <= p.max(terms.saturating_sub(1)) {
        return Err(Error::TooShort { required: p.max(terms.saturating_sub(1)) + 1, got: f.len() });
    }
    let lhs = fractional_sum(&forward_difference(f, p)?, nu)?;
    let commuted = forward_difference(&fractional_sum(f, nu)?, p)?;
    let initial = InitialDiffs::of(f, terms)?;
    let mut out = ResidualSeries::default();
    for (j, l) in lhs.values().iter().enumerate() {
        let t = lhs.point(j);
        let corr = exchange_correction(&initial.diffs, f.base(), nu, p, &t)?;
        out.push(t, l.clone(), commuted.values()[j].clone() - corr);
    }
    Ok(out)
}

/// `Δ^μ f` against `Δ_*^μ f + Σ_{k<m} ((t−a)^(ν−m+k)/Γ(ν+k−m+1)) Δ^k f(a)`.
pub fn caputo_rl_residual<S: Scalar>(f: &GridFn<S>, mu: &FracOrder) -> Result<ResidualSeries<S>> {
    let rl = rl_difference(f, mu)?;
    let caputo = caputo_difference(f, mu)?;
    let initial = InitialDiffs::of(f, mu.m())?;
    let mut out = ResidualSeries::default();
    for (j, r) in rl.values().iter().enumerate() {
        let t = rl.point(j);
        let corr = exchange_correction(&initial.diffs, f.base(), mu.nu(), mu.m(), &t)?;
        out.push(t, r.clone(), caputo.values()[j].clone() + corr);
    }
    Ok(out)
}

/// The difference between the Riemann–Liouville and Caputo differences,
/// `Σ_{k<m} ((t−a)^(ν−m+k)/Γ(ν+k−m+1)) Δ^k f(a)`, on `N_{a+ν}`.
pub fn caputo_rl_correction<S: Scalar>(f: &GridFn<S>, mu: &FracOrder) -> Result<GridFn<S>> {
    if f.len() <= mu.m() {
        return Err(Error::TooShort { required: mu.m() + 1, got: f.len() });
    }
    let initial = InitialDiffs::of(f, mu.m())?;
    let base = f.base() + mu.nu();
    let len = f.len() - mu.m();
    let values = (0..len)
        .map(|j| {
            let t = &base + int(j as i64);
            exchange_correction(&initial.diffs, f.base(), mu.nu(), mu.m(), &t)
        })
        .collect::<Result<_>>()?;
    GridFn::from_samples(base, values)
}

/// `Δ^p(Δ^{−ν} f)` against `Δ^{−(ν−p)} f` on `N_{a+ν}`, for `ν > p ≥ 1`.
pub fn commute_diff_sum_residual<S: Scalar>(
    f: &GridFn<S>,
    nu: &Rational,
    p: usize,
) -> Result<ResidualSeries<S>> {
    if p == 0 || *nu <= int(p as i64) {
        return Err(Error::Order(format!("need ν > p ≥ 1, got ν = {nu}, p = {p}")));
    }
    if f.len() <= p {
        return Err(Error::TooShort { required: p + 1, got: f.len() });
    }
    let lhs = forward_difference(&fractional_sum(f, nu)?, p)?;
    let rhs = fractional_sum(f, &(nu - int(p as i64)))?;
    let mut out = ResidualSeries::default();
    for (j, l) in lhs.values().iter().enumerate() {
        let t = lhs.point(j);
        out.push(t.clone(), l.clone(), rhs.eval(&t)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Closed-form sums

/// `(m, ν)` for a positive order that may be an integer (then `ν = 0`).
fn ceiling_split(mu: &Rational) -> Result<(usize, Rational)> {
    if !mu.is_positive() {
        return Err(Error::Domain(format!("order must be positive, got {mu}")));
    }
    let m = as_index(&Rational::from_integer(ceil(mu)))
        .ok_or_else(|| Error::Domain(format!("order {mu} too large")))?;
    Ok((m, int(m as i64) - mu))
}

/// Number of terms `N + 1` of `Σ_{s=a+ν}^{t−μ}`, checking `t ∈ N_{a+m}`.
fn kernel_sum_terms(a: &Rational, mu: &Rational, t: &Rational) -> Result<(usize, Rational)> {
    let (m, nu) = ceiling_split(mu)?;
    let n = lattice_index(t, &(a + int(m as i64)))?;
    Ok((n, nu))
}

/// `(t−a−ν)^(μ)/μ`, the closed form of `Σ_{s=a+ν}^{t−μ} (t−s−1)^(μ−1)`.
pub fn closed_kernel_sum(a: &Rational, mu: &Rational, t: &Rational) -> Result<GammaMonomial> {
    let (_, nu) = kernel_sum_terms(a, mu, t)?;
    Ok(falling_factorial_exact(&(t - a - nu), mu)?.scale(&mu.recip()))
}

/// `Σ_{s=a+ν}^{t−μ} (t−s−1)^(μ−1)` term by term.
pub fn direct_kernel_sum(a: &Rational, mu: &Rational, t: &Rational) -> Result<GammaMonomial> {
    let (n, nu) = kernel_sum_terms(a, mu, t)?;
    let lag0 = t - a - &nu - Rational::one();
    let shift = mu - Rational::one();
    let mut acc = GammaMonomial::zero();
    for i in 0..=n {
        let term = falling_factorial_exact(&(&lag0 - int(i as i64)), &shift)?;
        acc = acc
            .checked_add(&term)
            .ok_or_else(|| Error::Exactness("kernel terms with different units".into()))?;
    }
    Ok(acc)
}

pub fn closed_kernel_sum_f64(a: &Rational, mu: &Rational, t: &Rational) -> Result<f64> {
    let (_, nu) = kernel_sum_terms(a, mu, t)?;
    Ok(falling_factorial_f64(to_f64(&(t - a - nu)), to_f64(mu))? / to_f64(mu))
}

pub fn direct_kernel_sum_f64(a: &Rational, mu: &Rational, t: &Rational) -> Result<f64> {
    let (n, nu) = kernel_sum_terms(a, mu, t)?;
    let lag0 = to_f64(&(t - a - &nu)) - 1.0;
    let shift = to_f64(mu) - 1.0;
    let mut acc = 0.0;
    for i in 0..=n {
        acc += falling_factorial_f64(lag0 - i as f64, shift)?;
    }
    Ok(acc)
}

fn check_sum_falling(a: &Rational, b: &Rational, nu: &Rational) -> Result<usize> {
    let minus_one = -Rational::one();
    if !(a >= nu && *a > minus_one && *nu > minus_one) {
        return Err(Error::Domain(format!("need a ≥ ν and a, ν > −1, got a = {a}, ν = {nu}")));
    }
    lattice_index(b, a)
}

/// `((b+1)^(ν+1) − a^(ν+1))/(ν+1)`, the closed form of `Σ_{r=a}^{b} r^(ν)`.
///
/// Accepts `a = ν`, where `a^(ν+1)` vanishes by the reciprocal-gamma pole
/// convention.
pub fn sum_falling(a: &Rational, b: &Rational, nu: &Rational) -> Result<GammaMonomial> {
    check_sum_falling(a, b, nu)?;
    let one = Rational::one();
    let up = nu + &one;
    let top = falling_factorial_exact(&(b + &one), &up)?;
    let bottom = falling_factorial_exact(a, &up)?;
    let diff = top
        .checked_sub(&bottom)
        .ok_or_else(|| Error::Exactness("closed-form terms with different units".into()))?;
    Ok(diff.scale(&up.recip()))
}

pub fn sum_falling_direct(a: &Rational, b: &Rational, nu: &Rational) -> Result<GammaMonomial> {
    let n = check_sum_falling(a, b, nu)?;
    let mut acc = GammaMonomial::zero();
    for i in 0..=n {
        let term = falling_factorial_exact(&(a + int(i as i64)), nu)?;
        acc = acc
            .checked_add(&term)
            .ok_or_else(|| Error::Exactness("summands with different units".into()))?;
    }
    Ok(acc)
}

pub fn sum_falling_f64(a: &Rational, b: &Rational, nu: &Rational) -> Result<f64> {
    check_sum_falling(a, b, nu)?;
    let up = to_f64(nu) + 1.0;
    let top = falling_factorial_f64(to_f64(b) + 1.0, up)?;
    let bottom = falling_factorial_f64(to_f64(a), up)?;
    Ok((top - bottom) / up)
}

/// `Σ_{j=a+m−p+1}^{b} (j−a−ν)^(μ−p)` minus
/// `(1/(μ−p+1)) (Γ(b−a−ν+2)/Γ(b−a−m+p+1) − Γ(μ−p+2))`.
pub fn averaged_kernel_residual(
    a: &Rational,
    mu: &FracOrder,
    p: usize,
    b: &Rational,
) -> Result<GammaMonomial> {
    let pp = int(p as i64);
    let order = mu.mu() - &pp;
    if !order.is_positive() {
        return Err(Error::Order(format!("need p < μ, got p = {p}, μ = {mu}")));
    }
    let first = a + int(mu.m() as i64) - &pp + Rational::one();
    let count = lattice_index(b, &first)?;
    let mut direct = GammaMonomial::zero();
    for i in 0..=count {
        let j = &first + int(i as i64);
        let term = falling_factorial_exact(&(j - a - mu.nu()), &order)?;
        direct = direct
            .checked_add(&term)
            .ok_or_else(|| Error::Exactness("summands with different units".into()))?;
    }
    let one = Rational::one();
    let ratio = GammaMonomial::gamma(&(b - a - mu.nu() + int(2)))?
        * GammaMonomial::recip_gamma(&(b - a - int(mu.m() as i64) + &pp + &one));
    let closed = ratio
        .checked_sub(&GammaMonomial::gamma(&(&order + int(2)))?)
        .ok_or_else(|| Error::Exactness("closed-form terms with different units".into()))?
        .scale(&(&order + &one).recip());
    direct
        .checked_sub(&closed)
        .ok_or_else(|| Error::Exactness("sides with different units".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat;
    use crate::{ExactGrid, FloatGrid};
    use num_traits::Zero;

    const SQRT_PI: f64 = 1.772_453_850_905_516;

    fn order(p: i64, q: i64) -> FracOrder {
        FracOrder::new(rat(p, q)).unwrap()
    }

    fn poly(len: usize, f: impl Fn(i64) -> i64) -> ExactGrid {
        ExactGrid::from_samples(int(0), (0..len as i64).map(|t| int(f(t))).collect()).unwrap()
    }

    #[test]
    fn classic_taylor_examples() {
        assert_eq!(taylor_classic_rhs(&poly(6, |t| t * t), 2, &int(4)).unwrap(), int(16));
        let c = ExactGrid::from_samples(int(0), vec![int(7); 5]).unwrap();
        for t in 1..5 {
            assert_eq!(taylor_classic_rhs(&c, 1, &int(t)).unwrap(), int(7));
        }
        assert_eq!(taylor_classic_rhs(&poly(7, |t| 1 << t), 3, &int(5)).unwrap(), int(32));
        assert!(matches!(taylor_classic_rhs(&poly(7, |t| t), 3, &int(2)), Err(Error::Domain(_))));
    }

    #[test]
    fn caputo_taylor_examples() {
        let sq = poly(9, |t| t * t);
        assert_eq!(taylor_caputo_rhs(&sq, &order(1, 2), &int(3)).unwrap(), int(9));
        let c = ExactGrid::from_samples(int(0), vec![rat(5, 3); 6]).unwrap();
        assert_eq!(taylor_caputo_rhs(&c, &order(1, 2), &int(4)).unwrap(), rat(5, 3));
        assert_eq!(taylor_caputo_rhs(&poly(7, |t| t), &order(3, 2), &int(4)).unwrap(), int(4));
        assert!(matches!(
            taylor_caputo_rhs(&sq, &order(1, 2), &rat(5, 2)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            taylor_caputo_rhs(&sq, &order(1, 2), &int(9)),
            Err(Error::TooShort { .. })
        ));
        let shifted = ExactGrid::from_samples(rat(1, 2), vec![int(1); 5]).unwrap();
        assert!(matches!(taylor_caputo_rhs(&shifted, &order(1, 2), &rat(3, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn extended_taylor_examples() {
        let sq = poly(9, |t| t * t);
        assert_eq!(taylor_extended_rhs(&sq, &order(3, 2), 1, &int(3)).unwrap(), int(7));
        for t in 1..9 {
            let t = int(t);
            assert_eq!(
                taylor_extended_rhs(&sq, &order(1, 2), 0, &t).unwrap(),
                taylor_caputo_rhs(&sq, &order(1, 2), &t).unwrap()
            );
        }
        assert!(matches!(taylor_extended_rhs(&sq, &order(1, 2), 1, &int(3)), Err(Error::Order(_))));
    }

    #[test]
    fn float_extended_taylor_p0_is_bit_identical() {
        let g = FloatGrid::from_samples(int(0), (0..20).map(|t| (t as f64 * 0.7).sin()).collect()).unwrap();
        for mu in [order(1, 3), order(7, 4), order(5, 2)] {
            let ext = CaputoTaylor::new(&g, &mu, 0).unwrap();
            for t in 3..20 {
                let t = int(t);
                let a = taylor_caputo_rhs(&g, &mu, &t).unwrap();
                assert_eq!(a.to_bits(), ext.rhs(&t).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn taylor_residuals_vanish_exactly() {
        let f = poly(16, |t| 3 * t * t * t - 5 * t + 2);
        for mu in [order(1, 4), order(2, 3), order(7, 4), order(8, 3)] {
            for p in 0..mu.m() {
                let r = CaputoTaylor::new(&f, &mu, p).unwrap().residuals(&f).unwrap();
                assert!(!r.is_empty() && r.all_zero(), "μ={mu} p={p}");
            }
        }
    }

    #[test]
    fn pure_remainder_needs_vanishing_differences() {
        // Δf(0) = 0 and Δ²f ≡ 2 for f(t) = t(t−1) = t² − t, but f(0) = 0 too
        let f = poly(10, |t| t * t - t);
        let mu = order(3, 2);
        assert!(CaputoTaylor::new(&f, &mu, 1).unwrap().pure_remainder_residuals(&f).unwrap().all_zero());
        assert!(CaputoTaylor::new(&f, &mu, 0).unwrap().pure_remainder_residuals(&f).unwrap().all_zero());
        let g = poly(10, |t| t * t);
        assert!(matches!(
            CaputoTaylor::new(&g, &mu, 0).unwrap().pure_remainder_residuals(&g),
            Err(Error::HypothesisViolated { k: 1, .. })
        ));
    }

    #[test]
    fn remainder_routes_agree() {
        let f = poly(12, |t| (t * 7 + 3) % 5 - 2);
        for mu in [order(1, 2), order(5, 3), order(9, 4)] {
            assert!(remainder_routes_residual(&f, &mu).unwrap().all_zero());
        }
    }

    #[test]
    fn composition_examples() {
        let ones = poly(6, |_| 1);
        let r = composition_residual(&ones, &rat(1, 2), &rat(1, 2)).unwrap();
        assert_eq!(r.len(), 12);
        assert!(r.all_zero());
        // the combined order-1 sum is the cumulative sum
        assert_eq!(r.points[3].rhs, int(4));
        let single = ExactGrid::from_samples(int(0), vec![int(9)]).unwrap();
        let r = composition_residual(&single, &rat(1, 3), &rat(2, 3)).unwrap();
        assert!(r.points.iter().all(|p| p.lhs == int(9) && p.residual.is_zero()));
    }

    #[test]
    fn exchange_examples() {
        let id = poly(8, |t| t);
        assert!(exchange_residual(&id, &rat(1, 2), 1).unwrap().all_zero());
        // p = m, ν = m − μ: Δ^m Δ^{−ν} f = Δ_*^μ f + correction
        let f = poly(10, |t| t * t * t - 4 * t + 1);
        let mu = order(5, 4);
        let ex = exchange_residual(&f, mu.nu(), mu.m()).unwrap();
        let rl = caputo_rl_residual(&f, &mu).unwrap();
        assert!(ex.all_zero() && rl.all_zero());
        // one term too many breaks it
        assert!(!exchange_residual_terms(&f, mu.nu(), mu.m(), mu.m() + 1).unwrap().all_zero());
    }

    #[test]
    fn caputo_rl_examples() {
        let ones = poly(4, |_| 1);
        let r = caputo_rl_residual(&ones, &order(1, 2)).unwrap();
        assert_eq!(r.points[0].t, rat(1, 2));
        assert_eq!(r.points[0].lhs, rat(1, 2));
        assert_eq!(r.points[0].rhs, rat(1, 2));
        assert!(r.all_zero());
        // vanishing initial data: RL equals Caputo
        let f = poly(8, |t| t * (t - 1) * (t - 2));
        let mu = order(5, 2);
        let corr = caputo_rl_correction(&f, &mu).unwrap();
        assert!(corr.values().iter().all(|v| v.is_zero()));
        assert_eq!(rl_difference(&f, &mu).unwrap(), caputo_difference(&f, &mu).unwrap());
    }

    #[test]
    fn commute_examples() {
        assert!(commute_diff_sum_residual(&poly(6, |_| 1), &rat(3, 2), 1).unwrap().all_zero());
        assert!(commute_diff_sum_residual(&poly(9, |t| t * t - 3), &int(2), 1).unwrap().all_zero());
        assert!(matches!(
            commute_diff_sum_residual(&poly(6, |_| 1), &rat(1, 2), 1),
            Err(Error::Order(_))
        ));
    }

    #[test]
    fn closed_kernel_sum_examples() {
        let a = int(0);
        let one = closed_kernel_sum(&a, &rat(1, 2), &int(1)).unwrap();
        assert_eq!(one, direct_kernel_sum(&a, &rat(1, 2), &int(1)).unwrap());
        assert_eq!(one.coeff(), &int(1));
        assert!((one.to_f64() - SQRT_PI).abs() < 1e-12);
        let two = closed_kernel_sum(&a, &rat(1, 2), &int(2)).unwrap();
        assert_eq!(two, direct_kernel_sum(&a, &rat(1, 2), &int(2)).unwrap());
        assert!((two.to_f64() - 1.5 * SQRT_PI).abs() < 1e-12);
        assert!((closed_kernel_sum_f64(&a, &rat(1, 2), &int(1)).unwrap() - SQRT_PI).abs() < 1e-12);
        // integer order m at t = a + m: Γ(m) = (m−1)!
        for m in 1..6 {
            let v = closed_kernel_sum(&int(2), &int(m), &int(2 + m)).unwrap();
            assert_eq!(v.to_rational(), Some(factorial(m as usize - 1)));
        }
        assert!(matches!(closed_kernel_sum(&a, &rat(1, 2), &rat(1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_sum_boundary_term_is_gamma_mu() {
        // the s = t − μ term is (μ−1)^(μ−1) = Γ(μ); the rest telescopes to
        // Γ(t−a−ν+1)/(μ Γ(t−a−ν+1−μ)) − Γ(μ)
        let (a, mu) = (int(1), rat(5, 3));
        let nu = int(2) - &mu;
        let gamma_mu = GammaMonomial::gamma(&mu).unwrap();
        let last = falling_factorial_exact(&(&mu - int(1)), &(&mu - int(1))).unwrap();
        assert_eq!(last, gamma_mu);
        for t in 3..10 {
            let t = int(t);
            let full = direct_kernel_sum(&a, &mu, &t).unwrap();
            let x = &t - &a - &nu + int(1);
            let telescoped = (GammaMonomial::gamma(&x).unwrap()
                * GammaMonomial::recip_gamma(&(&x - &mu)))
            .scale(&mu.recip())
                - gamma_mu.clone();
            assert_eq!(full - gamma_mu.clone(), telescoped);
        }
    }

    #[test]
    fn sum_falling_examples() {
        assert_eq!(sum_falling(&int(1), &int(3), &int(1)).unwrap().to_rational(), Some(int(6)));
        let v = sum_falling(&rat(3, 2), &rat(5, 2), &rat(1, 2)).unwrap();
        assert_eq!(v, sum_falling_direct(&rat(3, 2), &rat(5, 2), &rat(1, 2)).unwrap());
        assert_eq!(v.coeff(), &rat(27, 16));
        assert!((v.to_f64() - 27.0 * SQRT_PI / 16.0).abs() < 1e-12);
        let f = sum_falling_f64(&rat(3, 2), &rat(5, 2), &rat(1, 2)).unwrap();
        assert!((f - 27.0 * SQRT_PI / 16.0).abs() < 1e-12);
        assert!(matches!(sum_falling(&rat(1, 4), &rat(9, 4), &rat(1, 2)), Err(Error::Domain(_))));
        assert!(matches!(sum_falling(&int(2), &rat(5, 2), &rat(1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn averaged_kernel_identity() {
        for (mu, p) in [(order(1, 2), 0), (order(7, 3), 1), (order(11, 4), 2)] {
            for b in (mu.m() as i64 - p as i64 + 1)..12 {
                let r = averaged_kernel_residual(&int(0), &mu, p, &int(b)).unwrap();
                assert!(r.is_zero(), "μ={mu} p={p} b={b}: {r}");
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn frac_rational() -> impl Strategy<Value = Rational> {
            (1i64..48, 2i64..=12).prop_filter("non-integer", |(p, q)| p % q != 0).prop_map(|(p, q)| rat(p, q))
        }

        proptest! {
            #[test]
            fn kernel_sum_closed_form(a in 0i64..6, mu in frac_rational(), extra in 0i64..20) {
                let m = ceil(&mu).to_string().parse::<i64>().unwrap();
                let t = int(a + m + extra);
                prop_assert_eq!(
                    closed_kernel_sum(&int(a), &mu, &t).unwrap(),
                    direct_kernel_sum(&int(a), &mu, &t).unwrap()
                );
            }

            #[test]
            fn falling_sum_closed_form(nu in frac_rational(), lift in 0i64..24, q in 1i64..=12, len in 0i64..20) {
                let a = &nu + rat(lift, q);
                let b = &a + int(len);
                prop_assert_eq!(sum_falling(&a, &b, &nu).unwrap(), sum_falling_direct(&a, &b, &nu).unwrap());
            }
        }
    }
}
