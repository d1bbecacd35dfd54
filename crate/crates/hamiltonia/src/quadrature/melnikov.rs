//! Melnikov matrix of a perturbation f(A, α, p, q) of rotators coupled to a
//! pendulum p²/2 + g(cos q − 1), integrated along the separatrix
//! q_a(t) = 4 arctan e^{√g t}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::diff::second_derivative;
use crate::numerics::quad::integrate_decaying;

/// Separatrix (p_a(t), q_a(t)) of the pendulum with coupling g.
pub fn separatrix(g: f64, t: f64) -> (f64, f64) {
    let s = g.sqrt();
    (2.0 * s / (s * t).cosh(), 4.0 * (s * t).exp().atan())
}

/// (cos α₁ + sin α₂)(cos q − 1).
pub fn arnold_perturbation(_a: &[f64; 2], alpha: &[f64; 2], _p: f64, q: f64) -> f64 {
    (alpha[0].cos() + alpha[1].sin()) * (q.cos() - 1.0)
}

/// D and its determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MelnikovMatrix {
    pub d: [[f64; 2]; 2],
    pub det: f64,
}

/// Tail threshold for the integrand at |t| = 40/√g.
pub const MELNIKOV_TAIL: f64 = 1e-12;
const STEP: f64 = 2e-3;

/// D_ij = ∫ ∂²_{α_iα_j} f(A, α + ωt, p_a(t), q_a(t)) dt with angle
/// derivatives by 5-point differences.
pub fn melnikov_matrix<F>(f: F, a: [f64; 2], alpha: [f64; 2], omega: [f64; 2], g: f64) -> Result<MelnikovMatrix>
where
    F: Fn(&[f64; 2], &[f64; 2], f64, f64) -> f64,
{
    if !(g > 0.0) {
        return Err(Error::InvalidInput("pendulum coupling must be positive".into()));
    }
    let cutoff = 40.0 / g.sqrt();
    let along = |t: f64, dir: [f64; 2]| {
        let (p, q) = separatrix(g, t);
        let base = [alpha[0] + omega[0] * t, alpha[1] + omega[1] * t];
        second_derivative(|s| f(&a, &[base[0] + s * dir[0], base[1] + s * dir[1]], p, q), 0.0, STEP)
    };
    let tol = 1e-14;
    let d11 = integrate_decaying(|t| along(t, [1.0, 0.0]), cutoff, MELNIKOV_TAIL, tol)?;
    let d22 = integrate_decaying(|t| along(t, [0.0, 1.0]), cutoff, MELNIKOV_TAIL, tol)?;
    let plus = integrate_decaying(|t| along(t, [1.0, 1.0]), cutoff, MELNIKOV_TAIL, tol)?;
    let minus = integrate_decaying(|t| along(t, [1.0, -1.0]), cutoff, MELNIKOV_TAIL, tol)?;
    let d12 = 0.25 * (plus - minus);
    let d = [[d11, d12], [d12, d22]];
    Ok(MelnikovMatrix { d, det: d11 * d22 - d12 * d12 })
}

/// ∫ sech²(√g t) cos(ωt) dt·2 = 2πω/(g sinh(πω/2√g)), with limit 4/√g at ω = 0.
fn sech2_transform(omega: f64, g: f64) -> f64 {
    let s = g.sqrt();
    if omega == 0.0 {
        4.0 / s
    } else {
        2.0 * std::f64::consts::PI * omega / (g * (std::f64::consts::PI * omega / (2.0 * s)).sinh())
    }
}

/// Closed form of the Melnikov matrix for [`arnold_perturbation`].
pub fn arnold_melnikov_analytic(alpha: [f64; 2], omega: [f64; 2], g: f64) -> MelnikovMatrix {
    let d11 = alpha[0].cos() * sech2_transform(omega[0], g);
    let d22 = alpha[1].sin() * sech2_transform(omega[1], g);
    MelnikovMatrix { d: [[d11, 0.0], [0.0, d22]], det: d11 * d22 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn frozen_angles_det_sixteen() {
        let m = melnikov_matrix(arnold_perturbation, [0.0, 0.0], [0.0, FRAC_PI_2], [0.0, 0.0], 1.0).unwrap();
        assert!((m.det.abs() - 16.0).abs() < 1e-6, "{m:?}");
        let m = melnikov_matrix(arnold_perturbation, [0.0, 0.0], [FRAC_PI_2, 0.0], [0.0, 0.0], 1.0).unwrap();
        assert!(m.det.abs() < 1e-6);
    }

    #[test]
    fn rotating_angles_match_closed_form() {
        let (alpha, omega, g) = ([0.3, 1.1], [0.7, 1.0], 2.0);
        let m = melnikov_matrix(arnold_perturbation, [0.7, 0.0], alpha, omega, g).unwrap();
        let a = arnold_melnikov_analytic(alpha, omega, g);
        assert!((m.det - a.det).abs() < 1e-6, "{m:?} {a:?}");
    }

    #[test]
    fn angle_independent_gives_zero() {
        let m = melnikov_matrix(|_, _, _, q| q.cos() - 1.0, [0.0, 0.0], [0.4, 0.2], [0.0, 0.0], 1.0).unwrap();
        assert!(m.d.iter().flatten().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn separatrix_has_zero_energy() {
        for t in [-3.0, 0.0, 1.2] {
            let (p, q) = separatrix(1.7, t);
            assert!((0.5 * p * p + 1.7 * (q.cos() - 1.0)).abs() < 1e-13);
        }
    }
}
