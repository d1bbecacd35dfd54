//! One-dimensional quadrature.

use crate::error::{Error, Result};

/// Double-exponential (tanh-sinh) quadrature on [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    quadrature::double_exponential::integrate(f, a, b, tol).integral
}

/// Splits [a, b] into `pieces` equal panels and sums tanh-sinh on each.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let h = (b - a) / pieces as f64;
    (0..pieces).map(|i| integrate(&f, a + i as f64 * h, a + (i + 1) as f64 * h, tol)).sum()
}

/// Integral over the real line of a function decaying at both ends.
///
/// The tail is checked at ±`cutoff`; the integral is the panel sum on
/// [−cutoff, cutoff].
pub fn integrate_decaying<F: Fn(f64) -> f64>(f: F, cutoff: f64, tail_tol: f64, tol: f64) -> Result<f64> {
    for t in [-cutoff, cutoff] {
        let v = f(t).abs();
        if !(v <= tail_tol) {
            return Err(Error::TailNotDecaying { t, value: v });
        }
    }
    Ok(integrate_panels(&f, -cutoff, cutoff, 16, tol))
}

/// Composite trapezoid rule on a periodic integrand sampled at `n` points.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integral() {
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-14);
        assert!((v - 2.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn sech_squared() {
        let v = integrate_decaying(|t| 1.0 / t.cosh().powi(2), 40.0, 1e-12, 1e-14).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(integrate_decaying(|_| 1.0, 40.0, 1e-12, 1e-14).is_err());
    }

    #[test]
    fn trapezoid_spectral() {
        let v = periodic_trapezoid(|x| (x.cos()).exp(), 2.0 * std::f64::consts::PI, 32);
        // 2π I₀(1)
        assert!((v - 2.0 * std::f64::consts::PI * 1.2660658777520082).abs() < 1e-13);
    }
}
