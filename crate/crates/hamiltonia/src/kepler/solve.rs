//! Iterative solution of λ = ξ − e sin ξ.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Solver selection for [`solve_kepler`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeplerMethod {
    /// Newton from ξ₀ = λ + e sin λ, falling back to bisection when progress stalls.
    Newton,
    /// Bisection on the bracket [λ − e, λ + e].
    Bisection,
}

const MAX_ITER: usize = 200;
const TOL: f64 = 1e-13;

fn residual(e: f64, lambda: f64, xi: f64) -> f64 {
    xi - e * xi.sin() - lambda
}

fn bisection(e: f64, lambda: f64) -> Result<f64> {
    let (mut a, mut b) = (lambda - e, lambda + e);
    if e == 0.0 {
        return Ok(lambda);
    }
    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        let r = residual(e, lambda, m);
        if r.abs() <= 0.25 * TOL || m == a || m == b {
            return Ok(m);
        }
        if r < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITER, detail: format!("bisection e={e} λ={lambda}") })
}

fn newton(e: f64, lambda: f64) -> Result<f64> {
    let mut xi = lambda + e * lambda.sin();
    let mut last = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let r = residual(e, lambda, xi);
        if r.abs() <= 0.25 * TOL {
            return Ok(xi);
        }
        if !(r.abs() < last) || (xi - lambda).abs() > e + 1e-15 {
            return bisection(e, lambda);
        }
        last = r.abs();
        xi -= r / (1.0 - e * xi.cos());
    }
    bisection(e, lambda)
}

/// Eccentric anomaly ξ with |ξ − e sin ξ − λ| ≤ 1e−13, in λ's period branch.
pub fn solve_kepler(e: f64, lambda: f64, method: KeplerMethod) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::DomainViolation(format!("eccentricity {e} outside [0, 1)")));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidInput("mean anomaly must be finite".into()));
    }
    let turns = (lambda / (2.0 * PI)).round();
    let reduced = lambda - turns * 2.0 * PI;
    let xi = match method {
        KeplerMethod::Newton => newton(e, reduced)?,
        KeplerMethod::Bisection => bisection(e, reduced)?,
    };
    Ok(xi + turns * 2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circular_is_identity() {
        for l in [-3.0, 0.1, 2.0, 10.0] {
            assert_eq!(solve_kepler(0.0, l, KeplerMethod::Newton).unwrap(), l);
        }
    }

    #[test]
    fn quarter_turn_reference() {
        let b = solve_kepler(0.3, PI / 2.0, KeplerMethod::Bisection).unwrap();
        let n = solve_kepler(0.3, PI / 2.0, KeplerMethod::Newton).unwrap();
        assert!((b - n).abs() < 1e-12);
        assert!((n - 1.8584).abs() < 1e-4);
        assert!(residual(0.3, PI / 2.0, n).abs() <= TOL);
    }

    #[test]
    fn zero_maps_to_zero() {
        for e in [0.0, 0.5, 0.99] {
            assert_eq!(solve_kepler(e, 0.0, KeplerMethod::Newton).unwrap(), 0.0);
        }
    }

    #[test]
    fn high_eccentricity_near_periapsis() {
        for l in [1e-6, 1e-3, 0.05, -0.02] {
            let x = solve_kepler(0.999, l, KeplerMethod::Newton).unwrap();
            assert!(residual(0.999, l, x).abs() <= TOL);
        }
    }

    #[test]
    fn rejects_unbound() {
        assert!(solve_kepler(1.0, 0.3, KeplerMethod::Newton).is_err());
    }
}
