//! Fractional sum, forward difference, Caputo-like and Riemann–Liouville
//! differences.
//!
//! On a grid with base `a`, the fractional sum of order `ν` at the output
//! point `t = a + ν + N` is
//!
//! ```text
//! Δ^{−ν} f(t) = (1/Γ(ν)) Σ_{s=a}^{t−ν} (t−s−1)^(ν−1) f(s) = Σ_{j=0}^{N} c_{N−j}(ν) f(a+j)
//! ```
//!
//! with `c_n(ν) = Γ(ν+n)/(Γ(ν) n!)`, so every operator is a direct
//! `O(n²)` kernel sum with rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::grid::GridFn;
use crate::numerics::{FracOrder, Scalar};
use crate::{Error, Rational, Result};

/// Source of the fractional-sum coefficients `c_0(ν), …, c_{len−1}(ν)`.
pub trait Kernel<S>: Sync {
    fn coefficients(&self, nu: &Rational, len: usize) -> Vec<S>;
}

/// The standard coefficients `c_n(ν) = Π_{i<n}(ν+i)/n!`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RisingKernel;

impl<S: Scalar> Kernel<S> for RisingKernel {
    fn coefficients(&self, nu: &Rational, len: usize) -> Vec<S> {
        S::rising_coefficients(nu, len)
    }
}

/// Multiplies one coefficient of another kernel by `1 + rel`. Used as a
/// negative control: suites run with it must fail.
#[derive(Clone, Debug)]
pub struct PerturbedKernel<K> {
    pub inner: K,
    pub index: usize,
    pub rel: Rational,
}

impl<S: Scalar, K: Kernel<S>> Kernel<S> for PerturbedKernel<K> {
    fn coefficients(&self, nu: &Rational, len: usize) -> Vec<S> {
        let mut c = self.inner.coefficients(nu, len);
        if let Some(x) = c.get_mut(self.index) {
            let factor = S::one() + S::from_rational(&self.rel);
            *x = x.clone() * factor;
        }
        c
    }
}

/// Which operator to apply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorTag {
    FracSum(Rational),
    ForwardDiff(usize),
    Caputo(FracOrder),
    RiemannLiouville(FracOrder),
}

impl OperatorTag {
    pub fn apply<S: Scalar>(&self, f: &GridFn<S>) -> Result<GridFn<S>> {
        match self {
            OperatorTag::FracSum(nu) => fractional_sum(f, nu),
            OperatorTag::ForwardDiff(m) => forward_difference(f, *m),
            OperatorTag::Caputo(mu) => caputo_difference(f, mu),
            OperatorTag::RiemannLiouville(mu) => rl_difference(f, mu),
        }
    }

    /// Samples of input needed for a one-point output.
    pub fn min_input_len(&self) -> usize {
        match self {
            OperatorTag::FracSum(_) => 1,
            OperatorTag::ForwardDiff(m) => m + 1,
            OperatorTag::Caputo(mu) | OperatorTag::RiemannLiouville(mu) => mu.m() + 1,
        }
    }
}

impl fmt::Display for OperatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorTag::FracSum(nu) => write!(f, "Δ^(-{nu})"),
            OperatorTag::ForwardDiff(m) => write!(f, "Δ^{m}"),
            OperatorTag::Caputo(mu) => write!(f, "Δ_*^({mu})"),
            OperatorTag::RiemannLiouville(mu) => write!(f, "Δ^({mu})"),
        }
    }
}

/// `Δ^{−ν} f`, mapping a grid on `N_a` to one on `N_{a+ν}` of the same
/// length.
pub fn fractional_sum<S: Scalar>(f: &GridFn<S>, nu: &Rational) -> Result<GridFn<S>> {
    fractional_sum_with(f, nu, &RisingKernel)
}

pub fn fractional_sum_with<S: Scalar, K: Kernel<S> + ?Sized>(
    f: &GridFn<S>,
    nu: &Rational,
    kernel: &K,
) -> Result<GridFn<S>> {
    if !nu.is_positive() {
        return Err(Error::Order(format!("fractional sum order must be positive, got {nu}")));
    }
    let c = kernel.coefficients(nu, f.len());
    GridFn::from_samples(f.base() + nu, S::causal_convolution(&c, f.values()))
}

/// `Δ^m f(s) = Σ_k C(m,k) (−1)^{m−k} f(s+k)`; same base, `m` fewer points.
pub fn forward_difference<S: Scalar>(f: &GridFn<S>, m: usize) -> Result<GridFn<S>> {
    if f.len() <= m {
        return Err(Error::TooShort { required: m + 1, got: f.len() });
    }
    let weights = difference_weights::<S>(m);
    let values = f.values();
    let out = (0..values.len() - m)
        .map(|s| {
            let mut acc = S::zero();
            for (k, w) in weights.iter().enumerate() {
                acc += w.clone() * values[s + k].clone();
            }
            acc
        })
        .collect();
    GridFn::from_samples(f.base().clone(), out)
}

/// `C(m,k) (−1)^{m−k}` for `k = 0..=m`.
fn difference_weights<S: Scalar>(m: usize) -> Vec<S> {
    let mut binom = BigInt::from(1);
    let mut out = Vec::with_capacity(m + 1);
    for k in 0..=m {
        if k > 0 {
            binom = binom * (m - k + 1) / k;
        }
        let signed = if (m - k) % 2 == 0 { binom.clone() } else { -binom.clone() };
        out.push(S::from_rational(&Rational::from_integer(signed)));
    }
    out
}

/// `Δ^k f(a)` at the grid base.
pub fn difference_at_base<S: Scalar>(f: &GridFn<S>, k: usize) -> Result<S> {
    if f.len() <= k {
        return Err(Error::TooShort { required: k + 1, got: f.len() });
    }
    let weights = difference_weights::<S>(k);
    let mut acc = S::zero();
    for (i, w) in weights.into_iter().enumerate() {
        acc += w * f.values()[i].clone();
    }
    Ok(acc)
}

/// `Δ_*^μ f = Δ^{−ν}(Δ^m f)` on `N_{a+ν}`.
pub fn caputo_difference<S: Scalar>(f: &GridFn<S>, mu: &FracOrder) -> Result<GridFn<S>> {
    caputo_difference_with(f, mu, &RisingKernel)
}

pub fn caputo_difference_with<S: Scalar, K: Kernel<S> + ?Sized>(
    f: &GridFn<S>,
    mu: &FracOrder,
    kernel: &K,
) -> Result<GridFn<S>> {
    let diff = forward_difference(f, mu.m())?;
    fractional_sum_with(&diff, mu.nu(), kernel)
}

/// `Δ^μ f = Δ^m(Δ^{−ν} f)` on `N_{a+ν}`.
pub fn rl_difference<S: Scalar>(f: &GridFn<S>, mu: &FracOrder) -> Result<GridFn<S>> {
    rl_difference_with(f, mu, &RisingKernel)
}

pub fn rl_difference_with<S: Scalar, K: Kernel<S> + ?Sized>(
    f: &GridFn<S>,
    mu: &FracOrder,
    kernel: &K,
) -> Result<GridFn<S>> {
    if f.len() <= mu.m() {
        return Err(Error::TooShort { required: mu.m() + 1, got: f.len() });
    }
    let summed = fractional_sum_with(f, mu.nu(), kernel)?;
    forward_difference(&summed, mu.m())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{int, rat};
    use crate::ExactGrid;

    fn grid(base: Rational, v: &[i64]) -> ExactGrid {
        GridFn::from_samples(base, v.iter().map(|&x| int(x)).collect()).unwrap()
    }

    fn order(p: i64, q: i64) -> FracOrder {
        FracOrder::new(rat(p, q)).unwrap()
    }

    #[test]
    fn fractional_sum_examples() {
        let s = fractional_sum(&grid(int(0), &[1, 1, 1, 1]), &int(1)).unwrap();
        assert_eq!(s.base(), &int(1));
        assert_eq!(s.values(), grid(int(1), &[1, 2, 3, 4]).values());

        let s = fractional_sum(&grid(int(0), &[1, 1, 1]), &rat(1, 2)).unwrap();
        assert_eq!(s.base(), &rat(1, 2));
        assert_eq!(s.values(), &[int(1), rat(3, 2), rat(15, 8)]);

        let s = fractional_sum(&grid(int(3), &[7]), &rat(5, 7)).unwrap();
        assert_eq!(s.values(), &[int(7)]);
        assert!(matches!(fractional_sum(&grid(int(0), &[1]), &int(0)), Err(Error::Order(_))));
    }

    #[test]
    fn half_sum_of_ones_matches_closed_form() {
        // Δ^{−ν}1(t) = (t−a)^(ν)/Γ(ν+1)
        let nu = rat(1, 2);
        let s = fractional_sum(&grid(int(0), &[1; 6]), &nu).unwrap();
        for (j, v) in s.values().iter().enumerate() {
            let t = s.point(j);
            let closed = Rational::falling_over_gamma(&t, &nu, &(&nu + int(1))).unwrap();
            assert_eq!(v, &closed);
        }
    }

    #[test]
    fn forward_difference_examples() {
        let d = forward_difference(&grid(int(0), &[1, 2, 4, 8]), 1).unwrap();
        assert_eq!(d.values(), grid(int(0), &[1, 2, 4]).values());
        let sq = ExactGrid::tabulate(int(0), 5, |t| t * t).unwrap();
        assert_eq!(forward_difference(&sq, 2).unwrap().values(), &[int(2), int(2), int(2)]);
        assert_eq!(
            forward_difference(&grid(int(0), &[5]), 1),
            Err(Error::TooShort { required: 2, got: 1 })
        );
    }

    #[test]
    fn caputo_examples() {
        let id = ExactGrid::tabulate(int(0), 4, |t| t.clone()).unwrap();
        let c = caputo_difference(&id, &order(1, 2)).unwrap();
        assert_eq!(c.base(), &rat(1, 2));
        assert_eq!(c.values(), &[int(1), rat(3, 2), rat(15, 8)]);

        let k = grid(int(0), &[3; 6]);
        for mu in [order(1, 2), order(5, 4), order(7, 3)] {
            assert!(caputo_difference(&k, &mu).unwrap().values().iter().all(|v| v == &int(0)));
        }
        let short = ExactGrid::tabulate(int(0), 2, |t| t.clone()).unwrap();
        assert_eq!(
            caputo_difference(&short, &order(3, 2)),
            Err(Error::TooShort { required: 3, got: 2 })
        );
    }

    #[test]
    fn rl_examples() {
        let r = rl_difference(&grid(int(0), &[1, 1, 1]), &order(1, 2)).unwrap();
        assert_eq!(r.base(), &rat(1, 2));
        assert_eq!(r.values(), &[rat(1, 2), rat(3, 8)]);
        let z = rl_difference(&grid(int(0), &[0; 5]), &order(4, 3)).unwrap();
        assert!(z.values().iter().all(|v| v == &int(0)));
    }

    #[test]
    fn operator_tags_dispatch() {
        let f = grid(int(0), &[1, 1, 1, 1]);
        let tag = OperatorTag::Caputo(order(1, 2));
        assert_eq!(tag.apply(&f).unwrap(), caputo_difference(&f, &order(1, 2)).unwrap());
        assert_eq!(tag.min_input_len(), 2);
        assert_eq!(OperatorTag::FracSum(rat(1, 2)).to_string(), "Δ^(-1/2)");
    }

    #[test]
    fn perturbed_kernel_changes_one_coefficient() {
        let k = PerturbedKernel { inner: RisingKernel, index: 1, rel: rat(1, 1000) };
        let c: Vec<Rational> = k.coefficients(&rat(1, 2), 3);
        assert_eq!(c, vec![int(1), rat(1, 2) * rat(1001, 1000), rat(3, 8)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn values(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<i64>> {
            prop::collection::vec(-20i64..20, len)
        }

        fn order_strategy() -> impl Strategy<Value = FracOrder> {
            (1i64..36, 2i64..=12)
                .prop_filter("non-integer", |(p, q)| p % q != 0)
                .prop_map(|(p, q)| order(p, q))
        }

        proptest! {
            #[test]
            fn operators_are_linear(f in values(4..14), g in values(4..14),
                                    alpha in -5i64..5, beta in -5i64..5, mu in order_strategy()) {
                let n = f.len().min(g.len());
                prop_assume!(n > mu.m());
                let fg = grid(int(0), &f[..n]);
                let gg = grid(int(0), &g[..n]);
                let (al, be) = (int(alpha), int(beta));
                let comb = fg.linear_combination(&al, &gg, &be).unwrap();
                for tag in [OperatorTag::FracSum(mu.mu().clone()), OperatorTag::ForwardDiff(mu.m()),
                            OperatorTag::Caputo(mu.clone()), OperatorTag::RiemannLiouville(mu.clone())] {
                    let lhs = tag.apply(&comb).unwrap();
                    let rhs = tag.apply(&fg).unwrap().linear_combination(&al, &tag.apply(&gg).unwrap(), &be).unwrap();
                    prop_assert_eq!(lhs, rhs);
                }
            }

            #[test]
            fn unit_sum_is_cumulative(f in values(1..20)) {
                let s = fractional_sum(&grid(int(0), &f), &int(1)).unwrap();
                let mut acc = 0;
                for (v, x) in s.values().iter().zip(&f) {
                    acc += x;
                    prop_assert_eq!(v, &int(acc));
                }
            }

            #[test]
            fn differences_compose(f in values(1..20), m1 in 0usize..5, m2 in 0usize..5) {
                prop_assume!(f.len() > m1 + m2);
                let g = grid(int(2), &f);
                let twice = forward_difference(&forward_difference(&g, m1).unwrap(), m2).unwrap();
                prop_assert_eq!(twice, forward_difference(&g, m1 + m2).unwrap());
            }

            #[test]
            fn caputo_annihilates_low_degree_polynomials(coeffs in prop::collection::vec(-9i64..9, 1..4),
                                                         mu in order_strategy(), len in 1usize..16) {
                prop_assume!(coeffs.len() <= mu.m() && len > mu.m());
                let f = ExactGrid::tabulate(int(0), len, |t| {
                    coeffs.iter().rev().fold(int(0), |acc, c| acc * t + int(*c))
                }).unwrap();
                let c = caputo_difference(&f, &mu).unwrap();
                prop_assert!(c.values().iter().all(|v| v == &int(0)));
            }

            #[test]
            fn domain_bookkeeping(f in values(1..16), p in -8i64..8, q in 1i64..5, mu in order_strategy()) {
                let a = rat(p, q);
                let g = grid(a.clone(), &f);
                let n = f.len();
                let s = fractional_sum(&g, mu.mu()).unwrap();
                prop_assert_eq!((s.base().clone(), s.len()), (&a + mu.mu(), n));
                match caputo_difference(&g, &mu) {
                    Ok(c) => prop_assert_eq!((c.base().clone(), c.len()), (&a + mu.nu(), n - mu.m())),
                    Err(e) => prop_assert_eq!(e, Error::TooShort { required: mu.m() + 1, got: n }),
                }
                match rl_difference(&g, &mu) {
                    Ok(r) => prop_assert_eq!((r.base().clone(), r.len()), (&a + mu.nu(), n - mu.m())),
                    Err(e) => prop_assert_eq!(e, Error::TooShort { required: mu.m() + 1, got: n }),
                }
            }
        }
    }
}
