//! Euler angles (z-x-z), the Deprit chart ((M₃, γ), (L, ψ), (G, φ)) and the
//! free-body Hamiltonian in Deprit variables.
//!
//! Canonical points are ordered (p_θ₀, p_φ₀, p_ψ₀, θ₀, φ₀, ψ₀) and Deprit
//! points (M₃, L, G, γ, ψ, φ).

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::free::InertiaTriple;
use crate::canonical::{PhaseMap, VerificationReport};
use crate::error::{Error, Result};

/// Below this |sin| an Euler chart is treated as singular.
pub const CHART_EPS: f64 = 1e-9;

pub(crate) fn rz(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

pub(crate) fn rx(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Euler angles of a frame: R = R_z(φ) R_x(θ) R_z(ψ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(theta: f64, phi: f64, psi: f64) -> Self {
        EulerAngles { theta, phi, psi }
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        rz(self.phi) * rx(self.theta) * rz(self.psi)
    }

    pub fn from_rotation(r: &Matrix3<f64>) -> Result<Self> {
        let c = r[(2, 2)].clamp(-1.0, 1.0);
        let s = r[(0, 2)].hypot(r[(1, 2)]);
        if s < CHART_EPS {
            return Err(Error::ChartSingular(format!("Euler angle θ at a pole (sin θ = {s:.3e})")));
        }
        Ok(EulerAngles { theta: s.atan2(c), phi: r[(0, 2)].atan2(-r[(1, 2)]), psi: r[(2, 0)].atan2(r[(2, 1)]) })
    }
}

/// Deprit variables: (M₃, γ), (L, ψ), (G, φ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepritPoint {
    pub m3: f64,
    pub gamma: f64,
    pub l: f64,
    pub psi: f64,
    pub g: f64,
    pub phi: f64,
}

impl DepritPoint {
    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) {
            return Err(Error::DomainViolation(format!("G must be positive, got {}", self.g)));
        }
        if self.l.abs() > self.g || self.m3.abs() > self.g {
            return Err(Error::DomainViolation(format!("|L|, |M₃| must not exceed G = {}", self.g)));
        }
        Ok(())
    }

    /// Ordered (M₃, L, G, γ, ψ, φ).
    pub fn to_array(&self) -> [f64; 6] {
        [self.m3, self.l, self.g, self.gamma, self.psi, self.phi]
    }

    pub fn from_array(x: &[f64]) -> Self {
        DepritPoint { m3: x[0], l: x[1], g: x[2], gamma: x[3], psi: x[4], phi: x[5] }
    }

    /// cos ζ = M₃/G.
    pub fn cos_zeta(&self) -> f64 {
        self.m3 / self.g
    }

    /// cos θ = L/G.
    pub fn cos_theta(&self) -> f64 {
        self.l / self.g
    }

    /// Momentum frame in the lab: R_z(γ) R_x(ζ).
    pub fn momentum_frame(&self) -> Matrix3<f64> {
        rz(self.gamma) * rx(self.cos_zeta().clamp(-1.0, 1.0).acos())
    }

    /// Body frame relative to the momentum frame.
    pub fn relative_angles(&self) -> EulerAngles {
        EulerAngles::new(self.cos_theta().clamp(-1.0, 1.0).acos(), self.phi, self.psi)
    }

    /// Body frame in the lab.
    pub fn body_rotation(&self) -> Matrix3<f64> {
        self.momentum_frame() * self.relative_angles().rotation()
    }

    /// Body-frame angular momentum G (sin θ sin ψ, sin θ cos ψ, cos θ).
    pub fn body_momentum(&self) -> [f64; 3] {
        let s = (1.0 - self.cos_theta().powi(2)).max(0.0).sqrt();
        [self.g * s * self.psi.sin(), self.g * s * self.psi.cos(), self.l]
    }

    pub fn omega(&self, i: &InertiaTriple) -> [f64; 3] {
        i.omega_of_momentum(&self.body_momentum())
    }
}

/// Body-frame ω from Euler angles and their rates (θ̇₀, φ̇₀, ψ̇₀).
pub fn body_omega_from_rates(a: &EulerAngles, rates: &[f64; 3]) -> [f64; 3] {
    let (st, ct) = a.theta.sin_cos();
    let (sp, cp) = a.psi.sin_cos();
    let [dth, dph, dps] = *rates;
    [dth * cp + dph * st * sp, -dth * sp + dph * st * cp, dph * ct + dps]
}

/// (p_θ₀, p_φ₀, p_ψ₀) = (M·n, M·z₀, M·i₃) for the motion with the given angles and rates.
pub fn canonical_momenta(i: &InertiaTriple, a: &EulerAngles, rates: &[f64; 3]) -> [f64; 3] {
    let w = body_omega_from_rates(a, rates);
    let m = a.rotation() * Vector3::from(i.momentum(&w));
    let n = Vector3::new(a.phi.cos(), a.phi.sin(), 0.0);
    let i3 = a.rotation().column(2).into_owned();
    [m.dot(&n), m[2], m.dot(&i3)]
}

/// ((p_θ₀, p_φ₀, p_ψ₀), (θ₀, φ₀, ψ₀)) → Deprit variables.
pub fn canonical_to_deprit(x: &[f64]) -> Result<DepritPoint> {
    let a = EulerAngles::new(x[3], x[4], x[5]);
    if a.theta.sin().abs() < CHART_EPS {
        return Err(Error::ChartSingular("θ₀ at a pole".into()));
    }
    let r0 = a.rotation();
    let n = Vector3::new(a.phi.cos(), a.phi.sin(), 0.0);
    let z0 = Vector3::z();
    let i3 = r0.column(2).into_owned();
    let rows = Matrix3::from_rows(&[n.transpose(), z0.transpose(), i3.transpose()]);
    let m = rows
        .lu()
        .solve(&Vector3::new(x[0], x[1], x[2]))
        .ok_or_else(|| Error::ChartSingular("node, vertical and body axis are coplanar".into()))?;
    let g = m.norm();
    if !(g > 0.0) {
        return Err(Error::ChartSingular("zero angular momentum".into()));
    }
    let sin_zeta = m[0].hypot(m[1]) / g;
    if sin_zeta < CHART_EPS {
        return Err(Error::ChartSingular("angular momentum along the vertical (ζ at a pole)".into()));
    }
    let gamma = m[0].atan2(-m[1]);
    let mut d = DepritPoint { m3: m[2], gamma, l: x[2], psi: 0.0, g, phi: 0.0 };
    let rel = EulerAngles::from_rotation(&(d.momentum_frame().transpose() * r0))?;
    d.psi = rel.psi;
    d.phi = rel.phi;
    Ok(d)
}

/// Deprit variables → ((p_θ₀, p_φ₀, p_ψ₀), (θ₀, φ₀, ψ₀)).
pub fn deprit_to_canonical(d: &DepritPoint) -> Result<[f64; 6]> {
    d.validate()?;
    let a = EulerAngles::from_rotation(&d.body_rotation())?;
    let m = d.momentum_frame().column(2) * d.g;
    let n = Vector3::new(a.phi.cos(), a.phi.sin(), 0.0);
    let i3 = a.rotation().column(2).into_owned();
    Ok([m.dot(&n), m[2], m.dot(&i3), a.theta, a.phi, a.psi])
}

/// The Deprit chart as a phase-space map with angle outputs wrapped.
pub fn deprit_map() -> PhaseMap {
    PhaseMap::new("deprit", 3, |x| Ok(canonical_to_deprit(x)?.to_array().to_vec()))
        .with_inverse(|y| Ok(deprit_to_canonical(&DepritPoint::from_array(y))?.to_vec()))
        .with_periodic_outputs(vec![false, false, false, true, true, true])
}

/// Symplectic residual of the Deprit chart at a canonical point.
pub fn verify_deprit_canonicity(x: &[f64; 6]) -> Result<VerificationReport> {
    deprit_map().report(x)
}

/// K = ½[L²/I₃ + (G² − L²)(sin²ψ/I₁ + cos²ψ/I₂)].
pub fn deprit_hamiltonian(i: &InertiaTriple, l: f64, g: f64, psi: f64) -> Result<f64> {
    if l.abs() > g {
        return Err(Error::DomainViolation(format!("|L| = {} exceeds G = {g}", l.abs())));
    }
    let (s, c) = psi.sin_cos();
    Ok(0.5 * (l * l / i.i3 + (g * g - l * l) * (s * s / i.i1 + c * c / i.i2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_canonical(rng: &mut ChaCha8Rng) -> [f64; 6] {
        [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.3..2.8),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        ]
    }

    #[test]
    fn chart_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = random_canonical(&mut rng);
            let d = canonical_to_deprit(&x).unwrap();
            let back = deprit_to_canonical(&d).unwrap();
            for k in 0..6 {
                let diff = if k < 3 { back[k] - x[k] } else { (back[k] - x[k] + 3.0 * std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI };
                assert!(diff.abs() < 1e-10, "{x:?} {back:?}");
            }
        }
    }

    #[test]
    fn deprit_chart_is_canonical() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = random_canonical(&mut rng);
            let r = verify_deprit_canonicity(&x).unwrap();
            assert!(r.residual <= 1e-6, "{r:?}");
        }
    }

    #[test]
    fn energy_through_the_chart() {
        let i = InertiaTriple::new(1.0, 2.0, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = EulerAngles::new(rng.gen_range(0.3..2.8), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let rates = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let w = body_omega_from_rates(&a, &rates);
            let p = canonical_momenta(&i, &a, &rates);
            let d = canonical_to_deprit(&[p[0], p[1], p[2], a.theta, a.phi, a.psi]).unwrap();
            assert!((d.g * d.g - i.momentum_squared(&w)).abs() < 1e-10);
            let k = deprit_hamiltonian(&i, d.l, d.g, d.psi).unwrap();
            assert!((k - i.kinetic_energy(&w)).abs() < 1e-10);
            let w2 = d.omega(&i);
            assert!(w.iter().zip(&w2).all(|(a, b)| (a - b).abs() < 1e-10));
        }
    }

    #[test]
    fn hamiltonian_special_cases() {
        let i = InertiaTriple::new(1.0, 2.0, 3.0).unwrap();
        assert!((deprit_hamiltonian(&i, 2.0, 2.0, 0.7).unwrap() - 4.0 / 6.0).abs() < 1e-15);
        let sym = InertiaTriple::new(1.5, 1.5, 3.0).unwrap();
        let k = |psi| deprit_hamiltonian(&sym, 0.4, 1.0, psi).unwrap();
        assert!((k(0.1) - 0.5 * (0.16 / 3.0 + 0.84 / 1.5)).abs() < 1e-15);
        assert!((k(0.1) - k(2.0)).abs() < 1e-15);
        assert!(matches!(deprit_hamiltonian(&i, 1.1, 1.0, 0.0), Err(Error::DomainViolation(_))));
    }

    #[test]
    fn vertical_momentum_limit() {
        // As ζ → 0 the momentum frame meets the lab frame and p_φ₀ → G.
        let d = DepritPoint { m3: 1.0 - 1e-12, gamma: 0.3, l: 0.2, psi: 0.5, g: 1.0, phi: 0.9 };
        let x = deprit_to_canonical(&d).unwrap();
        assert!((x[1] - d.g).abs() < 1e-8);
        assert!(matches!(canonical_to_deprit(&[0.1, 0.2, 0.3, 0.0, 0.1, 0.2]), Err(Error::ChartSingular(_))));
    }
}
