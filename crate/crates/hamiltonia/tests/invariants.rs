//! Property tests for algebraic and geometric invariants.

use hamiltonia::base::{golden_frequency, FourierSeries, HarmonicVector};
use hamiltonia::canonical::{poisson_bracket, ObservableFn, PhaseMap};
use hamiltonia::kepler::{anomalies, solve_kepler, KeplerMethod};
use hamiltonia::lindstedt::lindstedt_recursion;
use hamiltonia::rigidbody::{canonical_to_deprit, deprit_to_canonical, InertiaTriple};
use proptest::prelude::*;

fn trig(a: f64, b: f64, c: f64) -> FourierSeries {
    FourierSeries::cosine(2, &[1, 0], a).add(&FourierSeries::sine(2, &[0, 1], b)).add(&FourierSeries::cosine(2, &[1, -2], c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_evaluates_pointwise(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let f = trig(a, b, c);
        let g = trig(c, a, b);
        let fg = f.mul(&g).eval_real(&[x, y]).unwrap();
        let direct = f.eval_real(&[x, y]).unwrap() * g.eval_real(&[x, y]).unwrap();
        prop_assert!((fg - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        prop_assert!(f.mul(&g).max_diff(&g.mul(&f)) <= 1e-15);
    }

    #[test]
    fn derivative_obeys_leibniz(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64) {
        let (f, g) = (trig(a, b, c), trig(b, c, a));
        let v = [1.0, 0.7];
        let lhs = f.mul(&g).derivative(&v);
        let rhs = f.derivative(&v).mul(&g).add(&f.mul(&g.derivative(&v)));
        prop_assert!(lhs.max_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn kepler_solution_satisfies_equation(e in 0.0..0.99f64, lambda in -10.0..10.0f64) {
        for method in [KeplerMethod::Newton, KeplerMethod::Bisection] {
            let xi = solve_kepler(e, lambda, method).unwrap();
            prop_assert!((xi - e * xi.sin() - lambda).abs() <= 1e-12);
        }
    }

    #[test]
    fn anomaly_identities_hold(e in 0.0..0.9f64, lambda in -3.1..3.1f64) {
        prop_assert!(anomalies(e, lambda).unwrap().max_residual() <= 1e-12);
    }

    #[test]
    fn polar_map_is_canonical(p1 in -2.0..2.0f64, p2 in -2.0..2.0f64, r in 0.2..3.0f64, th in -3.0..3.0f64) {
        let x = [p1, p2, r * th.cos(), r * th.sin()];
        prop_assert!(PhaseMap::polar().symplectic_residual(&x).unwrap() <= 1e-6);
    }

    #[test]
    fn bracket_is_antisymmetric(x in -2.0..2.0f64, y in -2.0..2.0f64, a in -1.0..1.0f64) {
        let f = ObservableFn::new(move |v| v[0] * v[0] * v[1] + a * v[1].sin());
        let g = ObservableFn::new(|v| (v[0] * v[1]).cos());
        let pt = [x, y];
        prop_assert!((poisson_bracket(&f, &g, &pt) + poisson_bracket(&g, &f, &pt)).abs() <= 1e-12);
    }

    #[test]
    fn deprit_chart_round_trips(
        pt in -1.0..1.0f64, pp in -1.0..1.0f64, ps in -1.0..1.0f64,
        th in 0.3..2.8f64, ph in -3.0..3.0f64, psi in -3.0..3.0f64,
    ) {
        let x = [pt, pp, ps, th, ph, psi];
        let d = canonical_to_deprit(&x).unwrap();
        prop_assert!(d.l.abs() <= d.g + 1e-12 && d.m3.abs() <= d.g + 1e-12);
        let back = deprit_to_canonical(&d).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        for k in 0..6 {
            let mut diff = back[k] - x[k];
            if k >= 3 {
                diff -= (diff / two_pi).round() * two_pi;
            }
            prop_assert!(diff.abs() <= 1e-9);
        }
    }

    #[test]
    fn inertia_energy_is_positive(i1 in 0.1..5.0f64, i2 in 0.1..5.0f64, i3 in 0.1..5.0f64, w in prop::array::uniform3(-2.0..2.0f64)) {
        let i = InertiaTriple::new(i1, i2, i3).unwrap();
        let m = i.momentum(&w);
        let k = i.kinetic_energy(&w);
        prop_assert!(k >= 0.0);
        prop_assert!((2.0 * k - (m[0] * w[0] + m[1] * w[1] + m[2] * w[2])).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lindstedt_orders_are_real_with_zero_mean(a in 0.1..2.0f64, b in -2.0..2.0f64) {
        let f = FourierSeries::cosine(2, &[1, 1], a).add(&FourierSeries::cosine(2, &[1, 0], b));
        let s = lindstedt_recursion::<f64>(&f, &golden_frequency(), 4).unwrap();
        prop_assert!(s.max_mean() <= 1e-14);
        prop_assert!(s.reality_defect(8) <= 1e-12);
    }

    #[test]
    fn harmonic_ball_size(n in 1usize..6) {
        prop_assert_eq!(HarmonicVector::ball(2, n).len(), 2 * n * (n + 1));
    }
}
