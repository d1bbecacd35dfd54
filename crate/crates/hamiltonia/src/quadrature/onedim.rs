//! One-dimensional motion H = p²/2m + V(q): turning points, period, the
//! standard solution by inverting the time quadrature, and the action.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quad;
use crate::numerics::roots::{bracket_outward, brent};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Potential V with derivative, mass, open domain and a point of the well.
#[derive(Clone)]
pub struct Potential1D {
    name: String,
    v: ScalarFn,
    dv: ScalarFn,
    pub mass: f64,
    /// Open interval (lo, hi) on which V is defined.
    pub domain: (f64, f64),
    /// Location of the minimum of the well.
    pub minimum: f64,
}

impl fmt::Debug for Potential1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential1D")
            .field("name", &self.name)
            .field("mass", &self.mass)
            .field("domain", &self.domain)
            .field("minimum", &self.minimum)
            .finish()
    }
}

const QUAD_TOL: f64 = 1e-14;
/// Below this substitution variable the radicand is linearized at the turning point.
const S_LINEAR: f64 = 1e-6;

impl Potential1D {
    pub fn new<V, D>(name: &str, v: V, dv: D, mass: f64, domain: (f64, f64), minimum: f64) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(mass > 0.0) {
            return Err(Error::InvalidInput("mass must be positive".into()));
        }
        if !(domain.0 < minimum && minimum < domain.1) {
            return Err(Error::InvalidInput("well minimum must lie inside the domain".into()));
        }
        Ok(Potential1D { name: name.into(), v: Arc::new(v), dv: Arc::new(dv), mass, domain, minimum })
    }

    /// ½ m ω² q².
    pub fn harmonic(mass: f64, omega: f64) -> Self {
        let k = mass * omega * omega;
        Potential1D::new("harmonic", move |q| 0.5 * k * q * q, move |q| k * q, mass, (f64::NEG_INFINITY, f64::INFINITY), 0.0)
            .expect("valid harmonic potential")
    }

    /// c q⁴.
    pub fn quartic(mass: f64, c: f64) -> Self {
        Potential1D::new("quartic", move |q| c * q.powi(4), move |q| 4.0 * c * q.powi(3), mass, (f64::NEG_INFINITY, f64::INFINITY), 0.0)
            .expect("valid quartic potential")
    }

    /// m g (1 − cos(q/h)) on (−πh, πh).
    pub fn pendulum(mass: f64, g: f64, h: f64) -> Self {
        let mg = mass * g;
        Potential1D::new(
            "pendulum",
            move |q| 2.0 * mg * (0.5 * q / h).sin().powi(2),
            move |q| mg / h * (q / h).sin(),
            mass,
            (-PI * h, PI * h),
            0.0,
        )
        .expect("valid pendulum potential")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, q: f64) -> f64 {
        (self.v)(q)
    }

    pub fn derivative(&self, q: f64) -> f64 {
        (self.dv)(q)
    }

    pub fn energy(&self, p: f64, q: f64) -> f64 {
        p * p / (2.0 * self.mass) + self.value(q)
    }

    /// q₋(E) < q₊(E), the two roots of V(q) = E around the well.
    pub fn turning_points(&self, e: f64) -> Result<(f64, f64)> {
        let q0 = self.minimum;
        let f = |q: f64| e - self.value(q);
        if !(f(q0) > 0.0) {
            return Err(Error::InvalidInput(format!("energy {e} not above the well bottom {}", self.value(q0))));
        }
        let find = |dir: f64, limit: f64| -> Result<f64> {
            let reach = if limit.is_finite() { (limit - q0).abs() } else { f64::INFINITY };
            let step = dir * (1e-3f64).min(0.01 * reach);
            let lim = if limit.is_finite() { limit } else { q0 + dir * 1e12 };
            match bracket_outward(f, q0, step, lim, 1e-16)? {
                Some(q) => Ok(q),
                None if limit.is_finite() && f(limit).abs() <= 1e-12 * (1.0 + e.abs()) => Ok(limit),
                None => Err(Error::InvalidInput(format!("no turning point toward {limit} at energy {e}"))),
            }
        };
        let qm = find(-1.0, self.domain.0)?;
        let qp = find(1.0, self.domain.1)?;
        let scale = (e - self.value(q0)) / (qp - qm);
        for q in [qm, qp] {
            let slope = self.derivative(q);
            if !(slope.abs() > 1e-6 * scale) {
                return Err(Error::TurningPointDegenerate { q, slope });
            }
        }
        Ok((qm, qp))
    }

    /// ∫ from the turning point `tp` to `other` of kernel(s, r)·w(x) ds with
    /// x = tp + dir·s² and r = (E − V(x))/s², linearized for tiny s.
    fn from_turning_point<W, K>(&self, e: f64, tp: f64, other: f64, w: &W, kernel: &K) -> f64
    where
        W: Fn(f64) -> f64,
        K: Fn(f64, f64) -> f64,
    {
        let dir = if other >= tp { 1.0 } else { -1.0 };
        let smax = (other - tp).abs().sqrt();
        if smax == 0.0 {
            return 0.0;
        }
        let slope = -dir * self.derivative(tp);
        let integrand = |s: f64| {
            let x = tp + dir * s * s;
            let r = if s < S_LINEAR { slope } else { ((e - self.value(x)) / (s * s)).max(0.0) };
            kernel(s, r) * w(x)
        };
        quad::integrate_panels(integrand, 0.0, smax, 2, QUAD_TOL)
    }

    /// ∫_{q₋}^{q₊} w(x)/√((2/m)(E − V(x))) dx.
    pub fn time_integral<W: Fn(f64) -> f64>(&self, e: f64, w: W) -> Result<f64> {
        let (qm, qp) = self.turning_points(e)?;
        let mid = 0.5 * (qm + qp);
        let k = self.time_kernel();
        Ok(self.from_turning_point(e, qm, mid, &w, &k) + self.from_turning_point(e, qp, mid, &w, &k))
    }

    fn time_kernel(&self) -> impl Fn(f64, f64) -> f64 {
        let m = self.mass;
        move |_s: f64, r: f64| if r > 0.0 { 2.0 / (2.0 / m * r).sqrt() } else { 0.0 }
    }

    /// T(E) = 2∫_{q₋}^{q₊} dx/√((2/m)(E − V(x))).
    pub fn period(&self, e: f64) -> Result<f64> {
        Ok(2.0 * self.time_integral(e, |_| 1.0)?)
    }

    /// A(E) = (1/2π)∮ p dq = (1/π)∫_{q₋}^{q₊} √(2m(E − V(x))) dx.
    pub fn action_of_energy(&self, e: f64) -> Result<f64> {
        if e <= self.value(self.minimum) {
            return Ok(0.0);
        }
        let (qm, qp) = self.turning_points(e)?;
        let mid = 0.5 * (qm + qp);
        let m = self.mass;
        let k = move |s: f64, r: f64| 2.0 * s * s * (2.0 * m * r).sqrt();
        let one = |_: f64| 1.0;
        Ok((self.from_turning_point(e, qm, mid, &one, &k) + self.from_turning_point(e, qp, mid, &one, &k)) / PI)
    }

    /// Inverse of [`Self::action_of_energy`] below `energy_cap`.
    pub fn energy_of_action(&self, a: f64, energy_cap: f64) -> Result<f64> {
        if a < 0.0 {
            return Err(Error::InvalidInput("action must be non-negative".into()));
        }
        let e0 = self.value(self.minimum);
        if a == 0.0 {
            return Ok(e0);
        }
        let g = |e: f64| self.action_of_energy(e).unwrap_or(f64::NAN) - a;
        let step = 1e-3 * (1.0 + e0.abs());
        let cap = if energy_cap.is_finite() { energy_cap - 1e-9 * (1.0 + energy_cap.abs()) } else { e0 + 1e15 };
        bracket_outward(g, e0, step, cap, 1e-15)?
            .ok_or_else(|| Error::InvalidInput(format!("action {a} not reached below energy {energy_cap}")))
    }

    /// Time from q₋ to x along the upper branch of the orbit.
    fn time_to(&self, e: f64, qm: f64, qp: f64, half: f64, x: f64) -> f64 {
        let mid = 0.5 * (qm + qp);
        let k = self.time_kernel();
        let one = |_: f64| 1.0;
        if x <= mid {
            self.from_turning_point(e, qm, x, &one, &k)
        } else {
            half - self.from_turning_point(e, qp, x, &one, &k)
        }
    }

    /// (Q(t), Q̇(t)) with Q(0) = q₋(E), Q̇(0) = 0, for t reduced modulo T(E).
    pub fn standard_solution(&self, e: f64, t: f64) -> Result<(f64, f64)> {
        let (qm, qp) = self.turning_points(e)?;
        let period = self.period(e)?;
        let half = 0.5 * period;
        let t = t.rem_euclid(period);
        let (tau, sign) = if t <= half { (t, 1.0) } else { (period - t, -1.0) };
        let q = if tau == 0.0 {
            qm
        } else if tau >= half {
            qp
        } else {
            brent(|x| self.time_to(e, qm, qp, half, x) - tau, qm, qp, 1e-15)?
        };
        let qdot = sign * (2.0 / self.mass * (e - self.value(q)).max(0.0)).sqrt();
        Ok((q, qdot))
    }
}

/// Period and action at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitRow {
    pub energy: f64,
    pub period: f64,
    pub action: f64,
}

/// Period/action table over an energy grid.
pub fn orbit_table(pot: &Potential1D, energies: &[f64]) -> Result<Vec<OrbitRow>> {
    energies
        .iter()
        .map(|&e| Ok(OrbitRow { energy: e, period: pot.period(e)?, action: pot.action_of_energy(e)? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, OdeOptions};

    #[test]
    fn harmonic_period_is_isochronous() {
        let pot = Potential1D::harmonic(2.0, 1.5);
        for e in [0.01, 1.0, 50.0] {
            let t = pot.period(e).unwrap();
            assert!((t - 2.0 * PI / 1.5).abs() < 1e-10 * t, "{e} {t}");
            assert!((pot.action_of_energy(e).unwrap() - e / 1.5).abs() < 1e-10 * e);
        }
    }

    #[test]
    fn quartic_period() {
        let pot = Potential1D::quartic(1.0, 1.0);
        // (√2/2) Γ(1/4)Γ(1/2)/Γ(3/4).
        let beta = 0.5f64.sqrt() * 3.625609908221908 * PI.sqrt() / 1.225416702465178;
        assert!((pot.period(1.0).unwrap() - beta).abs() < 1e-10);
        assert!((beta - 3.7081).abs() < 1e-4);
    }

    #[test]
    fn pendulum_small_amplitude_and_separatrix() {
        let (g, h) = (9.0, 0.5);
        let pot = Potential1D::pendulum(1.0, g, h);
        let t = pot.period(1e-8).unwrap();
        assert!((t - 2.0 * PI * h / g.sqrt()).abs() < 1e-6);
        assert!(matches!(pot.period(2.0 * g), Err(Error::TurningPointDegenerate { .. })));
    }

    #[test]
    fn standard_solution_matches_ode() {
        let pot = Potential1D::quartic(1.0, 1.0);
        let e = 1.0;
        let (qm, qp) = pot.turning_points(e).unwrap();
        assert_eq!(pot.standard_solution(e, 0.0).unwrap(), (qm, 0.0));
        let t_quarter = pot.period(e).unwrap() / 4.0;
        let (q, v) = pot.standard_solution(e, t_quarter).unwrap();
        assert!((0.5 * v * v + q.powi(4) - 1.0).abs() < 1e-10);
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -4.0 * y[0].powi(3);
        };
        let y = integrate(f, 0.0, &[qm, 0.0], t_quarter, OdeOptions::tight()).unwrap();
        assert!((y[0] - q).abs() < 1e-9 && (y[1] - v).abs() < 1e-9, "{y:?} {q} {v}");
        let half = pot.standard_solution(e, 2.0 * t_quarter).unwrap();
        assert!((half.0 - qp).abs() < 1e-12);
    }

    #[test]
    fn action_derivative_is_period() {
        let pot = Potential1D::pendulum(1.0, 1.0, 1.0);
        let e = 1.0;
        let h = 1e-4;
        let da = (pot.action_of_energy(e + h).unwrap() - pot.action_of_energy(e - h).unwrap()) / (2.0 * h);
        assert!((da - pot.period(e).unwrap() / (2.0 * PI)).abs() < 1e-6);
        let a = pot.action_of_energy(e).unwrap();
        assert!((pot.energy_of_action(a, 2.0).unwrap() - e).abs() < 1e-9);
    }
}
