//! Circular restricted three-body problem near circular orbits: the secular
//! Hamiltonian in Delaunay variables, its regularized form in the Cartesian
//! pair p = √(2G) cos γ, q = √(2G) sin γ, and the Levi-Civita square-root map.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coupling g, perturber distance R and rotation rate ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R3bpParams {
    pub g: f64,
    pub r: f64,
    pub omega: f64,
}

impl Default for R3bpParams {
    fn default() -> Self {
        R3bpParams { g: 1.0, r: 5.0, omega: 0.1 }
    }
}

/// Which version of the regularized Hamiltonian to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum R3bpForm {
    /// Obtained by substituting the chart change into the secular
    /// Hamiltonian: eccentric part −(s/2)[(11 cos λ − 3 cos 3λ)p + (7 sin λ + 3 sin 3λ)q]
    /// with s = √(1 − G/2L)/√L and the shift δ_ε evaluated at L − G.
    #[default]
    Composition,
    /// The commonly printed variant: +C[(11 cos λ − 3 cos 3λ)p + (7 sin λ + 3 sin 3λ)q]
    /// with C = ½(1 − G/2L)L^{−1/2} and δ_ε evaluated at G.
    AsPrinted,
}

/// δ_ε(x) = −((1 + ε)^{1/2} − 1)ωx − (εg/2R)x⁴/(g²R²).
fn delta_shift(x: f64, eps: f64, p: &R3bpParams) -> f64 {
    -((1.0 + eps).sqrt() - 1.0) * p.omega * x - eps * p.g / (2.0 * p.r) * x.powi(4) / (p.g * p.g * p.r * p.r)
}

/// Secular Hamiltonian in the rotating frame, lowest order in e and |r|/R:
/// −g²/2L₀² − ωG₀ + δ_ε(G₀) − (εg/2R)(G₀⁴/g²R²)[3 cos 2(λ₀+γ₀) − e cos λ₀
/// − (9/2)e cos(λ₀+2γ₀) + (3/2)e cos(3λ₀+2γ₀)], with e = √(1 − G₀²/L₀²).
pub fn r3bp_secular_hamiltonian(l0: f64, g0: f64, lambda0: f64, gamma0: f64, eps: f64, p: &R3bpParams) -> Result<f64> {
    if !(l0 > 0.0) || g0.abs() > l0 {
        return Err(Error::DomainViolation(format!("need L₀ > 0 and |G₀| ≤ L₀, got L₀={l0} G₀={g0}")));
    }
    let e = (1.0 - (g0 / l0).powi(2)).max(0.0).sqrt();
    let bracket = 3.0 * (2.0 * (lambda0 + gamma0)).cos() - e * lambda0.cos() - 4.5 * e * (lambda0 + 2.0 * gamma0).cos()
        + 1.5 * e * (3.0 * lambda0 + 2.0 * gamma0).cos();
    Ok(-p.g * p.g / (2.0 * l0 * l0) - p.omega * g0 + delta_shift(g0, eps, p)
        - eps * p.g / (2.0 * p.r) * g0.powi(4) / (p.g * p.g * p.r * p.r) * bracket)
}

/// Regularized Hamiltonian in (L, λ, p, q), analytic through p = q = 0.
pub fn regularized_r3bp_hamiltonian(
    l: f64,
    lambda: f64,
    pp: f64,
    qq: f64,
    eps: f64,
    params: &R3bpParams,
    form: R3bpForm,
) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::DomainViolation(format!("L must be positive, got {l}")));
    }
    let g = 0.5 * (pp * pp + qq * qq);
    if g >= l {
        return Err(Error::DomainViolation(format!("p²+q² = {} ≥ 2L = {}", 2.0 * g, 2.0 * l)));
    }
    let g0 = l - g;
    let pref = eps * params.g / (2.0 * params.r) * g0.powi(4) / (params.g * params.g * params.r * params.r);
    let (s1, c1) = lambda.sin_cos();
    let (s3, c3) = (3.0 * lambda).sin_cos();
    let linear = (11.0 * c1 - 3.0 * c3) * pp + (7.0 * s1 + 3.0 * s3) * qq;
    let (eccentric, shift) = match form {
        R3bpForm::Composition => (-0.5 * (1.0 - g / (2.0 * l)).sqrt() / l.sqrt() * linear, delta_shift(g0, eps, params)),
        R3bpForm::AsPrinted => (0.5 * (1.0 - g / (2.0 * l)) / l.sqrt() * linear, delta_shift(g, eps, params)),
    };
    Ok(-params.g * params.g / (2.0 * l * l) - params.omega * l + params.omega * g + shift
        - pref * (3.0 * (2.0 * lambda).cos() + eccentric))
}

/// (G, γ) → (p, q) = (√(2G) cos γ, √(2G) sin γ).
pub fn polar_to_pq(g: f64, gamma: f64) -> (f64, f64) {
    let r = (2.0 * g).sqrt();
    (r * gamma.cos(), r * gamma.sin())
}

/// Hessian ∂²H/∂(p, q)² of the regularized Hamiltonian by central differences.
pub fn pq_hessian(
    l: f64,
    lambda: f64,
    pp: f64,
    qq: f64,
    eps: f64,
    params: &R3bpParams,
    form: R3bpForm,
    h: f64,
) -> Result<[[f64; 2]; 2]> {
    let f = |a: f64, b: f64| regularized_r3bp_hamiltonian(l, lambda, a, b, eps, params, form);
    let f0 = f(pp, qq)?;
    let hpp = (f(pp + h, qq)? - 2.0 * f0 + f(pp - h, qq)?) / (h * h);
    let hqq = (f(pp, qq + h)? - 2.0 * f0 + f(pp, qq - h)?) / (h * h);
    let hpq = (f(pp + h, qq + h)? - f(pp + h, qq - h)? - f(pp - h, qq + h)? + f(pp - h, qq - h)?) / (4.0 * h * h);
    Ok([[hpp, hpq], [hpq, hqq]])
}

/// Both preimages (ξ, η) of (x, y) under x + iy = (ξ + iη)²; the origin has one.
pub fn levi_civita_map(x: f64, y: f64) -> Vec<(f64, f64)> {
    if x == 0.0 && y == 0.0 {
        return vec![(0.0, 0.0)];
    }
    let w = Complex::new(x, y).sqrt();
    vec![(w.re, w.im), (-w.re, -w.im)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_circular_value() {
        let p = R3bpParams::default();
        let h = regularized_r3bp_hamiltonian(1.3, 0.4, 0.0, 0.0, 0.0, &p, R3bpForm::Composition).unwrap();
        assert!((h - (-1.0 / (2.0 * 1.69) - 0.1 * 1.3)).abs() < 1e-15);
    }

    #[test]
    fn composition_matches_secular_form() {
        let p = R3bpParams::default();
        let (l, g, lambda, gamma, eps) = (1.2, 0.1, 0.7, 1.9, 0.01);
        let (pp, qq) = polar_to_pq(g, gamma);
        let a = regularized_r3bp_hamiltonian(l, lambda, pp, qq, eps, &p, R3bpForm::Composition).unwrap();
        let b = r3bp_secular_hamiltonian(l, l - g, lambda + gamma, -gamma, eps, &p).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} {b}");
        let c = regularized_r3bp_hamiltonian(l, lambda, pp, qq, eps, &p, R3bpForm::AsPrinted).unwrap();
        assert!((c - b).abs() > 1e-6);
    }

    #[test]
    fn hessian_continuous_at_origin() {
        let p = R3bpParams::default();
        let at0 = pq_hessian(1.0, 0.3, 0.0, 0.0, 0.05, &p, R3bpForm::Composition, 1e-4).unwrap();
        let near = pq_hessian(1.0, 0.3, 1e-5, -1e-5, 0.05, &p, R3bpForm::Composition, 1e-4).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((at0[i][j] - near[i][j]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_outside_domain() {
        let p = R3bpParams::default();
        assert!(regularized_r3bp_hamiltonian(1.0, 0.0, 1.0, 1.0, 0.0, &p, R3bpForm::Composition).is_err());
    }

    #[test]
    fn square_roots() {
        assert_eq!(levi_civita_map(1.0, 0.0), vec![(1.0, 0.0), (-1.0, -0.0)]);
        let r = levi_civita_map(0.0, 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r[0].0 - s).abs() < 1e-15 && (r[0].1 - s).abs() < 1e-15);
        assert_eq!(levi_civita_map(0.0, 0.0), vec![(0.0, 0.0)]);
        for &(a, b) in &levi_civita_map(-0.3, 2.2) {
            let z = Complex::new(a, b) * Complex::new(a, b);
            assert!((z.re + 0.3).abs() < 1e-14 && (z.im - 2.2).abs() < 1e-14);
        }
    }
}
