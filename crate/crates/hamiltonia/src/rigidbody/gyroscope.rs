//! Lagrange gyroscope: symmetric body (I₁ = I₂ = I) with its centre of mass
//! on the body axis 3, in Deprit variables.
//!
//! H = L²/2I₃ + (G² − L²)/2I − m g h cos θ₀ with
//! cos θ₀ = (M₃ L)/G² − √(1 − M₃²/G²) √(1 − L²/G²) cos φ.

use serde::{Deserialize, Serialize};

use super::deprit::DepritPoint;
use crate::error::{Error, Result};
use crate::numerics::{integrate_dense, OdeOptions};

/// Parameters of the gyroscope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gyroscope {
    /// Equatorial moment I₁ = I₂.
    pub i: f64,
    pub i3: f64,
    pub m: f64,
    pub g: f64,
    /// Distance of the centre of mass from the pivot.
    pub h: f64,
}

impl Gyroscope {
    pub fn new(i: f64, i3: f64, m: f64, g: f64, h: f64) -> Result<Self> {
        if !(i > 0.0 && i3 > 0.0) {
            return Err(Error::InvalidInput("inertia moments must be positive".into()));
        }
        Ok(Gyroscope { i, i3, m, g, h })
    }

    fn mgh(&self) -> f64 {
        self.m * self.g * self.h
    }

    /// Height factor cos θ₀ of the body axis.
    pub fn cos_theta0(&self, d: &DepritPoint) -> Result<f64> {
        d.validate()?;
        let g2 = d.g * d.g;
        let sm = (1.0 - d.m3 * d.m3 / g2).max(0.0).sqrt();
        let sl = (1.0 - d.l * d.l / g2).max(0.0).sqrt();
        Ok(d.m3 * d.l / g2 - sm * sl * d.phi.cos())
    }

    pub fn hamiltonian(&self, d: &DepritPoint) -> Result<f64> {
        let c = self.cos_theta0(d)?;
        Ok(d.l * d.l / (2.0 * self.i3) + (d.g * d.g - d.l * d.l) / (2.0 * self.i) - self.mgh() * c)
    }

    /// Hamilton's equations on y = (M₃, L, G, γ, ψ, φ).
    pub fn vector_field(&self, y: &[f64], dy: &mut [f64]) {
        let (m3, l, g, phi) = (y[0], y[1], y[2], y[5]);
        let g2 = g * g;
        let g3 = g2 * g;
        let sm = (1.0 - m3 * m3 / g2).max(0.0).sqrt();
        let sl = (1.0 - l * l / g2).max(0.0).sqrt();
        let (sphi, cphi) = phi.sin_cos();
        let k = self.mgh();
        // ∂ cos θ₀ with respect to M₃, L, G, φ.
        let dc_dm3 = l / g2 + (m3 / (g2 * sm)) * sl * cphi;
        let dc_dl = m3 / g2 + sm * (l / (g2 * sl)) * cphi;
        let dc_dg = -2.0 * m3 * l / g3 - (m3 * m3 / (g3 * sm) * sl + sm * l * l / (g3 * sl)) * cphi;
        let dc_dphi = sm * sl * sphi;
        dy[0] = 0.0;
        dy[1] = 0.0;
        dy[2] = k * dc_dphi;
        dy[3] = -k * dc_dm3;
        dy[4] = l / self.i3 - l / self.i - k * dc_dl;
        dy[5] = g / self.i - k * dc_dg;
    }

    /// Integrates Hamilton's equations and reports invariant drifts.
    pub fn integrate(&self, d: &DepritPoint, t_final: f64, dt_out: f64, opts: OdeOptions) -> Result<GyroRun> {
        d.validate()?;
        if d.l.abs() >= d.g || d.m3.abs() >= d.g {
            return Err(Error::DomainViolation("the flow needs |L|, |M₃| < G".into()));
        }
        let h0 = self.hamiltonian(d)?;
        let traj = integrate_dense(|_t, y, dy| self.vector_field(y, dy), 0.0, &d.to_array(), t_final, dt_out, opts)?;
        let mut run = GyroRun { energy_drift: 0.0, m3_drift: 0.0, l_drift: 0.0, final_point: *d, samples: traj.t.len() };
        for y in &traj.y {
            let p = DepritPoint::from_array(y);
            run.energy_drift = run.energy_drift.max((self.hamiltonian(&p)? - h0).abs());
            run.m3_drift = run.m3_drift.max((p.m3 - d.m3).abs());
            run.l_drift = run.l_drift.max((p.l - d.l).abs());
            run.final_point = p;
        }
        Ok(run)
    }
}

/// Gyroscope Hamiltonian at a Deprit point.
pub fn gyroscope_hamiltonian(gyro: &Gyroscope, d: &DepritPoint) -> Result<f64> {
    gyro.hamiltonian(d)
}

/// Drifts of H, M₃ and L along an integrated gyroscope motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GyroRun {
    pub energy_drift: f64,
    pub m3_drift: f64,
    pub l_drift: f64,
    pub final_point: DepritPoint,
    pub samples: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidbody::deprit::deprit_hamiltonian;
    use crate::rigidbody::free::InertiaTriple;

    fn point() -> DepritPoint {
        DepritPoint { m3: 0.4, gamma: 0.2, l: 0.7, psi: -0.5, g: 1.2, phi: 1.1 }
    }

    #[test]
    fn no_gravity_is_the_free_body() {
        let gyro = Gyroscope::new(1.5, 2.5, 1.0, 0.0, 0.3).unwrap();
        let d = point();
        let k = deprit_hamiltonian(&InertiaTriple::new(1.5, 1.5, 2.5).unwrap(), d.l, d.g, d.psi).unwrap();
        assert!((gyro.hamiltonian(&d).unwrap() - k).abs() < 1e-15);
    }

    #[test]
    fn sleeping_top() {
        let gyro = Gyroscope::new(1.0, 2.0, 1.0, 9.8, 0.5).unwrap();
        let d = DepritPoint { m3: 1.3, gamma: 0.0, l: 1.3, psi: 0.0, g: 1.3, phi: 0.4 };
        assert_eq!(gyro.cos_theta0(&d).unwrap(), 1.0);
        assert!((gyro.hamiltonian(&d).unwrap() - (1.69 / 4.0 - 4.9)).abs() < 1e-14);
    }

    #[test]
    fn height_matches_rotation_composition() {
        let gyro = Gyroscope::new(1.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        let d = point();
        let c = gyro.cos_theta0(&d).unwrap();
        assert!((c - d.body_rotation()[(2, 2)]).abs() < 1e-14);
    }

    #[test]
    fn analytic_field_matches_differences() {
        let gyro = Gyroscope::new(1.0, 2.0, 1.3, 1.0, 0.8).unwrap();
        let y = point().to_array();
        let mut dy = [0.0; 6];
        gyro.vector_field(&y, &mut dy);
        let h = |x: &[f64]| gyro.hamiltonian(&DepritPoint::from_array(x)).unwrap();
        let grad = crate::numerics::diff::gradient(&h, &y, 1e-5);
        for k in 0..3 {
            assert!((dy[k] + grad[k + 3]).abs() < 1e-8);
            assert!((dy[k + 3] - grad[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn invariants_along_motion() {
        let gyro = Gyroscope::new(1.0, 2.0, 1.0, 1.0, 0.5).unwrap();
        let run = gyro.integrate(&point(), 20.0, 0.5, OdeOptions::default()).unwrap();
        assert!(run.energy_drift <= 1e-9 && run.m3_drift <= 1e-9 && run.l_drift <= 1e-9, "{run:?}");
        assert!((run.final_point.g - point().g).abs() > 1e-3);
    }
}
