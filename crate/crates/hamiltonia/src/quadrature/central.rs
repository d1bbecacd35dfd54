//! Planar central motion: the effective potential V_G(ρ) = G²/2mρ² + V(ρ),
//! the two frequencies and the two actions.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::onedim::Potential1D;
use crate::error::{Error, Result};
use crate::numerics::diff;
use crate::numerics::ode::{integrate, OdeOptions};
use crate::numerics::roots::{bisect, brent};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial potential V(ρ) with mass and the limit E_∞ of V_G at infinity.
#[derive(Clone)]
pub struct CentralPotential {
    pub name: String,
    v: ScalarFn,
    dv: ScalarFn,
    pub mass: f64,
    /// lim_{ρ→∞} V(ρ) (+∞ for confining potentials).
    pub e_infinity: f64,
}

impl std::fmt::Debug for CentralPotential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CentralPotential").field("name", &self.name).field("mass", &self.mass).finish()
    }
}

impl CentralPotential {
    pub fn new<V, D>(name: &str, v: V, dv: D, mass: f64, e_infinity: f64) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(mass > 0.0) {
            return Err(Error::InvalidInput("mass must be positive".into()));
        }
        Ok(CentralPotential { name: name.into(), v: Arc::new(v), dv: Arc::new(dv), mass, e_infinity })
    }

    /// −k m/ρ.
    pub fn newtonian(k: f64, mass: f64) -> Self {
        let km = k * mass;
        CentralPotential::new("newtonian", move |r| -km / r, move |r| km / (r * r), mass, 0.0).expect("valid potential")
    }

    /// ½ m Ω² ρ².
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        let c = mass * omega * omega;
        CentralPotential::new("harmonic", move |r| 0.5 * c * r * r, move |r| c * r, mass, f64::INFINITY)
            .expect("valid potential")
    }

    pub fn value(&self, rho: f64) -> f64 {
        (self.v)(rho)
    }

    pub fn derivative(&self, rho: f64) -> f64 {
        (self.dv)(rho)
    }

    /// V_G(ρ) = G²/2mρ² + V(ρ).
    pub fn effective(&self, g: f64, rho: f64) -> f64 {
        g * g / (2.0 * self.mass * rho * rho) + self.value(rho)
    }

    fn effective_derivative(&self, g: f64, rho: f64) -> f64 {
        -g * g / (self.mass * rho.powi(3)) + self.derivative(rho)
    }

    /// Location and value (ρ₀, E₀(G)) of the minimum of V_G.
    pub fn effective_minimum(&self, g: f64) -> Result<(f64, f64)> {
        if g == 0.0 {
            return Err(Error::InvalidInput("angular momentum must be nonzero".into()));
        }
        let d = |r: f64| self.effective_derivative(g, r);
        let mut a = 1e-8;
        while a < 1e8 {
            let b = a * 1.5;
            if d(a) < 0.0 && d(b) >= 0.0 {
                let r0 = brent(d, a, b, 1e-15).or_else(|_| bisect(d, a, b, 1e-15, 400))?;
                return Ok((r0, self.effective(g, r0)));
            }
            a = b;
        }
        Err(Error::InvalidInput(format!("effective potential of {} has no minimum", self.name)))
    }

    /// The radial problem as a one-dimensional potential on (0, ∞).
    pub fn radial(&self, g: f64) -> Result<Potential1D> {
        let (r0, _) = self.effective_minimum(g)?;
        let (v, dv, m) = (self.v.clone(), self.dv.clone(), self.mass);
        Potential1D::new(
            &format!("{}-radial", self.name),
            move |r| g * g / (2.0 * m * r * r) + v(r),
            move |r| -g * g / (m * r.powi(3)) + dv(r),
            m,
            (0.0, f64::INFINITY),
            r0,
        )
    }

    fn check_energy(&self, e: f64, g: f64) -> Result<Potential1D> {
        let radial = self.radial(g)?;
        let (_, e0) = self.effective_minimum(g)?;
        if !(e > e0 && e < self.e_infinity) {
            return Err(Error::InvalidInput(format!("energy {e} outside (E₀={e0}, E_∞={})", self.e_infinity)));
        }
        Ok(radial)
    }
}

/// Radial frequency ω₀ = 2π/T and mean angular velocity ω₁ = χ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralFrequencies {
    pub radial_period: f64,
    pub omega0: f64,
    pub omega1: f64,
}

pub fn central_frequencies(pot: &CentralPotential, e: f64, g: f64) -> Result<CentralFrequencies> {
    let radial = pot.check_energy(e, g)?;
    let period = radial.period(e)?;
    let m = pot.mass;
    let angle = 2.0 * radial.time_integral(e, |r| g / (m * r * r))?;
    Ok(CentralFrequencies { radial_period: period, omega0: 2.0 * PI / period, omega1: angle / period })
}

/// A₁ = (1/π)∫√(2m(E − V_G)) dρ and A₂ = G.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralActions {
    pub a1: f64,
    pub a2: f64,
}

pub fn central_actions(pot: &CentralPotential, e: f64, g: f64) -> Result<CentralActions> {
    let radial = pot.check_energy(e, g)?;
    Ok(CentralActions { a1: radial.action_of_energy(e)?, a2: g })
}

/// ∂(E, G)/∂(A₁, A₂) by inverting the finite-difference Jacobian of (A₁, A₂)(E, G).
pub fn central_energy_jacobian(pot: &CentralPotential, e: f64, g: f64) -> Result<[[f64; 2]; 2]> {
    let f = |x: &[f64]| match central_actions(pot, x[0], x[1]) {
        Ok(a) => vec![a.a1, a.a2],
        Err(_) => vec![f64::NAN, f64::NAN],
    };
    let h = 1e-4 * (1.0 + e.abs().min(g.abs()));
    let j = diff::jacobian(&f, &[e, g], h);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if !(det.abs() > 0.0) {
        return Err(Error::JacobianSingular(det));
    }
    Ok([[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]])
}

/// Frequencies measured on an integrated orbit: radial period from successive
/// pericenter passages and ω₁ from the angle swept between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitFrequencies {
    pub periods: usize,
    pub omega0: f64,
    pub omega1: f64,
}

/// Integrates (ρ, p_ρ, θ) from the pericenter and locates `periods` later
/// pericenter passages (p_ρ crossing zero upward) on a sampling step `dt`.
pub fn central_orbit_frequencies(pot: &CentralPotential, e: f64, g: f64, periods: usize, dt: f64) -> Result<OrbitFrequencies> {
    let radial = pot.check_energy(e, g)?;
    let (rmin, _) = radial.turning_points(e)?;
    let m = pot.mass;
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1] / m;
        dy[1] = g * g / (m * y[0].powi(3)) - pot.derivative(y[0]);
        dy[2] = g / (m * y[0] * y[0]);
    };
    let opts = OdeOptions::tight();
    let mut t = 0.0;
    let mut y = vec![rmin, 0.0, 0.0];
    let mut found = 0;
    let mut last = (0.0, 0.0);
    // Step off the starting pericenter before looking for upward crossings.
    let mut armed = false;
    let mut guard = 0usize;
    while found < periods {
        let next = integrate(rhs, t, &y, t + dt, opts)?;
        guard += 1;
        if guard > 10_000_000 {
            return Err(Error::NoConvergence { iterations: guard, detail: "no pericenter passage".into() });
        }
        if next[1] < 0.0 {
            armed = true;
        }
        if armed && y[1] < 0.0 && next[1] >= 0.0 {
            let (ts, ys) = (t, y.clone());
            let pr = |s: f64| integrate(rhs, ts, &ys, s, opts).map(|v| v[1]).unwrap_or(f64::NAN);
            let tc = brent(pr, t, t + dt, 1e-14)?;
            let yc = integrate(rhs, ts, &ys, tc, opts)?;
            last = (tc, yc[2]);
            found += 1;
            armed = false;
        }
        t += dt;
        y = next;
    }
    Ok(OrbitFrequencies { periods, omega0: 2.0 * PI * periods as f64 / last.0, omega1: last.1 / last.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kepler_orbits_close() {
        let pot = CentralPotential::newtonian(1.0, 1.0);
        let f = central_frequencies(&pot, -0.5, 0.8).unwrap();
        assert!((f.omega1 / f.omega0 - 1.0).abs() < 1e-8, "{f:?}");
        let a = central_actions(&pot, -0.5, 0.8).unwrap();
        assert!((a.a1 + a.a2 - 1.0).abs() < 1e-8, "{a:?}");
    }

    #[test]
    fn harmonic_half_ratio() {
        let pot = CentralPotential::harmonic(1.0, 2.0);
        let f = central_frequencies(&pot, 3.0, 0.7).unwrap();
        assert!((f.omega1 / f.omega0 - 0.5).abs() < 1e-8);
        let a = central_actions(&pot, 3.0, 0.7).unwrap();
        assert!((3.0 - (2.0 * a.a1 + a.a2) * 2.0).abs() < 1e-8);
    }

    #[test]
    fn jacobian_is_frequency_matrix() {
        let pot = CentralPotential::newtonian(1.0, 1.0);
        let j = central_energy_jacobian(&pot, -0.4, 0.6).unwrap();
        let f = central_frequencies(&pot, -0.4, 0.6).unwrap();
        assert!((j[0][0] - f.omega0).abs() < 1e-5 && (j[0][1] - f.omega1).abs() < 1e-5, "{j:?} {f:?}");
        assert!(j[1][0].abs() < 1e-5 && (j[1][1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn integrated_orbit_frequencies() {
        let pot = CentralPotential::new("power", |r: f64| r.powf(1.5), |r: f64| 1.5 * r.sqrt(), 1.0, f64::INFINITY).unwrap();
        let q = central_frequencies(&pot, 2.0, 0.5).unwrap();
        let o = central_orbit_frequencies(&pot, 2.0, 0.5, 10, q.radial_period / 16.0).unwrap();
        assert!((o.omega0 - q.omega0).abs() < 1e-6 && (o.omega1 - q.omega1).abs() < 1e-6, "{o:?} {q:?}");
    }
}
