//! Operators against closed forms and the brute-force oracle.

use fdcalc_core::harness::oracle_fracsum;
use fdcalc_core::numerics::{falling_factorial_exact, int, rat, GammaMonomial};
use fdcalc_core::operators::{caputo_difference, forward_difference, fractional_sum, rl_difference};
use fdcalc_core::{Error, ExactGrid, FloatGrid, FracOrder, GridFn};
use proptest::prelude::*;

fn ones(len: usize) -> ExactGrid {
    ExactGrid::from_samples(int(0), vec![int(1); len]).unwrap()
}

#[test]
fn half_sum_of_ones_matches_power_rule() {
    // Δ^{−ν} 1 (t) = (t−a)^(ν) / Γ(ν+1)
    let nu = rat(1, 2);
    let g = fractional_sum(&ones(6), &nu).unwrap();
    for (t, v) in g.points().zip(g.values()) {
        let closed = falling_factorial_exact(&t, &nu).unwrap() * GammaMonomial::recip_gamma(&rat(3, 2));
        assert_eq!(closed.to_rational().as_ref(), Some(v), "t = {t}");
    }
    assert_eq!(&g.values()[..3], &[int(1), rat(3, 2), rat(15, 8)]);
}

#[test]
fn documented_operator_values() {
    let id = ExactGrid::tabulate(int(0), 4, |t| t.clone()).unwrap();
    let c = caputo_difference(&id, &FracOrder::new(rat(1, 2)).unwrap()).unwrap();
    assert_eq!((c.base(), c.values()), (&rat(1, 2), &[int(1), rat(3, 2), rat(15, 8)][..]));

    let rl = rl_difference(&ones(4), &FracOrder::new(rat(1, 2)).unwrap()).unwrap();
    assert_eq!(rl.values(), &[rat(1, 2), rat(3, 8), rat(5, 16)]);

    let sq = ExactGrid::tabulate(int(0), 5, |t| t * t).unwrap();
    assert_eq!(forward_difference(&sq, 2).unwrap().values(), &vec![int(2); 3][..]);

    let short = ExactGrid::tabulate(int(0), 2, |t| t.clone()).unwrap();
    assert_eq!(
        caputo_difference(&short, &FracOrder::new(rat(3, 2)).unwrap()),
        Err(Error::TooShort { required: 3, got: 2 })
    );
}

#[test]
fn oracle_agrees_on_both_backends() {
    let f = ExactGrid::tabulate(rat(1, 3), 20, |t| t * t - int(4) * t).unwrap();
    let g: FloatGrid = f.map(|x| fdcalc_core::numerics::to_f64(x));
    for nu in [rat(1, 4), rat(2, 3), rat(3, 2), int(2)] {
        let exact = fractional_sum(&f, &nu).unwrap();
        let float = fractional_sum(&g, &nu).unwrap();
        for (j, t) in exact.points().enumerate() {
            let o = oracle_fracsum(&f, &nu, &t).unwrap();
            let x = fdcalc_core::numerics::to_f64(&exact.values()[j]);
            let scale = o.abs().max(1.0);
            assert!((x - o).abs() <= 1e-10 * scale, "exact ν = {nu}, t = {t}: {x} vs {o}");
            assert!((float.values()[j] - o).abs() <= 1e-10 * scale, "float ν = {nu}, t = {t}");
        }
    }
}

proptest! {
    #[test]
    fn oracle_matches_random_integer_grids(vals in prop::collection::vec(-20i64..20, 1..24),
                                           p in 1i64..30, q in 1i64..9, base in 0i64..5) {
        let nu = rat(p, q);
        let f = GridFn::from_samples(int(base), vals.iter().map(|&v| int(v)).collect()).unwrap();
        let g = fractional_sum(&f, &nu).unwrap();
        for (j, t) in g.points().enumerate() {
            let o = oracle_fracsum(&f, &nu, &t).unwrap();
            let x = fdcalc_core::numerics::to_f64(&g.values()[j]);
            prop_assert!((x - o).abs() <= 1e-10 * o.abs().max(x.abs()).max(1.0));
        }
    }

    #[test]
    fn caputo_of_polynomial_below_order_vanishes(c in prop::collection::vec(-9i64..9, 1..3),
                                                 num in prop::sample::select(vec![5i64, 6, 7, 9, 10, 11]), len in 4usize..16) {
        // degree < m ⇒ Δ^m f = 0
        let mu = FracOrder::new(rat(num, 4)).unwrap();
        prop_assume!(c.len() <= mu.m());
        let f = ExactGrid::tabulate(int(0), len, |t| {
            c.iter().rev().fold(int(0), |acc, &k| acc * t + int(k))
        }).unwrap();
        prop_assume!(len > mu.m());
        let d = caputo_difference(&f, &mu).unwrap();
        prop_assert!(d.values().iter().all(|v| *v == int(0)));
    }
}
