//! Quadratures for the free body in Deprit variables: ψ̇ from energy
//! conservation, φ̇ along ψ(t), and the periods T_L, T_G, checked against
//! direct integration of the Euler equations.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::deprit::EulerAngles;
use super::free::{free_body_rhs, rotation_of, InertiaTriple};
use crate::error::{Error, Result};
use crate::numerics::roots::brent;
use crate::numerics::{integrate, quad, OdeOptions};

/// Sign branch of ψ̇; `Plus` is the branch with L > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiBranch {
    Plus,
    Minus,
}

impl PsiBranch {
    pub fn sign(self) -> f64 {
        match self {
            PsiBranch::Plus => 1.0,
            PsiBranch::Minus => -1.0,
        }
    }
}

/// B(ψ) = sin²ψ/I₁ + cos²ψ/I₂.
fn b_of(i: &InertiaTriple, psi: f64) -> f64 {
    let (s, c) = psi.sin_cos();
    s * s / i.i1 + c * c / i.i2
}

/// A(ψ) = 1/I₃ − B(ψ).
fn a_of(i: &InertiaTriple, psi: f64) -> f64 {
    1.0 / i.i3 - b_of(i, psi)
}

/// ψ̇ = ±A √((2E − G² B)/A) at energy E and momentum G.
pub fn psi_rate(i: &InertiaTriple, e: f64, g: f64, psi: f64, branch: PsiBranch) -> Result<f64> {
    let a = a_of(i, psi);
    let num = 2.0 * e - g * g * b_of(i, psi);
    if a == 0.0 {
        return if num.abs() <= 1e-14 * e.abs().max(1e-300) { Ok(0.0) } else { Err(Error::ForbiddenRegion(f64::INFINITY)) };
    }
    let radicand = num / a;
    if radicand < 0.0 || radicand > g * g * (1.0 + 1e-12) {
        return Err(Error::ForbiddenRegion(radicand));
    }
    Ok(branch.sign() * a * radicand.sqrt())
}

/// φ̇ = B(ψ) G.
pub fn phi_rate(i: &InertiaTriple, g: f64, psi: f64) -> f64 {
    b_of(i, psi) * g
}

/// Periods of the free body at fixed (E, G).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyPeriods {
    /// Period of ψ (and of the body-frame motion).
    pub t_l: f64,
    /// Advance of φ over one period T_L.
    pub delta_phi: f64,
    /// Mean rotation period of φ, 2π T_L/Δφ.
    pub t_g: f64,
    /// Whether ψ oscillates between turning points instead of circulating.
    pub libration: bool,
}

impl BodyPeriods {
    fn new(t_l: f64, delta_phi: f64, libration: bool) -> Self {
        BodyPeriods { t_l, delta_phi, t_g: 2.0 * PI * t_l / delta_phi, libration }
    }
}

/// T_L and T_G from the ψ quadrature.
pub fn body_periods(i: &InertiaTriple, e: f64, g: f64) -> Result<BodyPeriods> {
    let (a0, a1) = (a_of(i, 0.0), a_of(i, 0.5 * PI));
    if a0 == 0.0 && a1 == 0.0 {
        return Err(Error::PreconditionViolated("spherical body: ψ is stationary".into()));
    }
    if a0 * a1 <= 0.0 {
        return Err(Error::PreconditionViolated("axis 3 must carry the largest or the smallest moment".into()));
    }
    let c = 1.0 / i.i1 - 1.0 / i.i2;
    let s2 = if c != 0.0 { (2.0 * e / (g * g) - 1.0 / i.i2) / c } else { f64::NAN };
    if s2 > 0.0 && s2 < 1.0 {
        let star = s2.sqrt().asin();
        let l2 = |psi: f64| g * g * c * (star - psi).sin() * (star + psi).sin() / a_of(i, psi);
        let (lo, hi) = if l2(0.0) > 0.0 { (-star, star) } else { (star, PI - star) };
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let over = |w: &dyn Fn(f64) -> f64| {
            2.0 * quad::integrate(
                |u: f64| {
                    let psi = mid + half * u.sin();
                    let r = l2(psi);
                    if r > 0.0 {
                        half * u.cos() * w(psi) / (a_of(i, psi).abs() * r.sqrt())
                    } else {
                        0.0
                    }
                },
                -0.5 * PI,
                0.5 * PI,
                1e-15,
            )
        };
        let t_l = over(&|_| 1.0);
        let dphi = over(&|psi| phi_rate(i, g, psi));
        return Ok(BodyPeriods::new(t_l, dphi, true));
    }
    let l2 = |psi: f64| (2.0 * e - g * g * b_of(i, psi)) / a_of(i, psi);
    let probe = (0..64).map(|k| l2(k as f64 * PI / 32.0)).fold(f64::INFINITY, f64::min);
    if !(probe > 0.0) {
        return Err(Error::ForbiddenRegion(probe));
    }
    if probe > g * g * (1.0 + 1e-12) {
        return Err(Error::DomainViolation(format!("(E, G) = ({e}, {g}) needs |L| > G")));
    }
    let over = |w: &dyn Fn(f64) -> f64| {
        let f = |psi: f64| w(psi) / (a_of(i, psi).abs() * l2(psi).sqrt());
        let mut n = 64;
        let mut prev = quad::periodic_trapezoid(&f, 2.0 * PI, n);
        loop {
            n *= 2;
            let next = quad::periodic_trapezoid(&f, 2.0 * PI, n);
            if (next - prev).abs() <= 1e-15 * next.abs() || n >= 1 << 18 {
                return next;
            }
            prev = next;
        }
    };
    let t_l = over(&|_| 1.0);
    let dphi = over(&|psi| phi_rate(i, g, psi));
    Ok(BodyPeriods::new(t_l, dphi, false))
}

/// Deprit angle φ of the body in the fixed momentum frame `rm`.
fn deprit_phi(rm_t: &nalgebra::Matrix3<f64>, q: &[f64]) -> f64 {
    let i3 = rm_t * rotation_of(q).column(2);
    i3[0].atan2(-i3[1])
}

/// T_L and Δφ measured on a direct integration of the Euler equations.
///
/// T_L is the spacing of two upward zero crossings of a body-frame momentum
/// component; Δφ is the unwrapped advance of the Deprit angle φ read off the
/// integrated orientation over the same interval.
pub fn integrated_periods(i: &InertiaTriple, w0: &[f64; 3], orientation: &EulerAngles) -> Result<BodyPeriods> {
    let opts = OdeOptions::tight();
    let rhs = free_body_rhs(*i);
    let q0 = super::free::quaternion_of(&orientation.rotation());
    let y0 = vec![w0[0], w0[1], w0[2], q0[0], q0[1], q0[2], q0[3]];
    let m_lab = rotation_of(&q0) * Vector3::from(i.momentum(w0));
    let g = m_lab.norm();
    let zeta = (m_lab[2] / g).clamp(-1.0, 1.0).acos();
    let gamma = m_lab[0].atan2(-m_lab[1]);
    let rm_t = (super::deprit::rz(gamma) * super::deprit::rx(zeta)).transpose();
    let wnorm = w0.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dt = 0.02 / wnorm.max(1e-12);
    let max_steps = 2_000_000usize;

    let mut t = 0.0;
    let mut y = y0.clone();
    let mut phi_unwrapped = deprit_phi(&rm_t, &y[3..7]);
    let mut crossings: [Vec<(f64, f64)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut l_changed_sign = false;
    for _ in 0..max_steps {
        let next = integrate(&rhs, t, &y, t + dt, opts)?;
        let phi_next = deprit_phi(&rm_t, &next[3..7]);
        let step = (phi_next - phi_unwrapped).rem_euclid(2.0 * PI);
        let step = if step > PI { step - 2.0 * PI } else { step };
        for j in 0..3 {
            if y[j] < 0.0 && next[j] >= 0.0 {
                let tc = brent(|s| integrate(&rhs, t, &y, s, opts).map(|v| v[j]).unwrap_or(f64::NAN), t, t + dt, 1e-15)?;
                let yc = integrate(&rhs, t, &y, tc, opts)?;
                let mut dphi = (deprit_phi(&rm_t, &yc[3..7]) - phi_unwrapped).rem_euclid(2.0 * PI);
                if dphi > PI {
                    dphi -= 2.0 * PI;
                }
                crossings[j].push((tc, phi_unwrapped + dphi));
            }
        }
        l_changed_sign |= y[2] * next[2] <= 0.0 && y[2] != next[2];
        phi_unwrapped += step;
        t += dt;
        y = next;
        if let Some(j) = (0..3).find(|&j| crossings[j].len() >= 2) {
            let (t1, p1) = crossings[j][0];
            let (t2, p2) = crossings[j][1];
            return Ok(BodyPeriods::new(t2 - t1, p2 - p1, l_changed_sign));
        }
    }
    Err(Error::NoConvergence { iterations: max_steps, detail: "no periodic return of the body-frame momentum".into() })
}

/// max − min of ψ̇ = L A(ψ) and of φ̇ = B(ψ) G along samples of ω(t).
pub fn rate_spread(i: &InertiaTriple, omegas: &[[f64; 3]]) -> (f64, f64) {
    let mut psi_rates = Vec::with_capacity(omegas.len());
    let mut phi_rates = Vec::with_capacity(omegas.len());
    for w in omegas {
        let m = i.momentum(w);
        let g = i.momentum_squared(w).sqrt();
        let psi = m[0].atan2(m[1]);
        psi_rates.push(m[2] * a_of(i, psi));
        phi_rates.push(phi_rate(i, g, psi));
    }
    let spread = |v: &[f64]| v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - v.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    (spread(&psi_rates), spread(&phi_rates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidbody::free::integrate_free_body;

    #[test]
    fn symmetric_top_rates() {
        let i = InertiaTriple::new(1.0, 1.0, 2.0).unwrap();
        let (l, g) = (1.0, 1.5);
        let e = 0.5 * (l * l / i.i3 + (g * g - l * l) / i.i1);
        for psi in [0.0, 0.7, 2.0] {
            let r = psi_rate(&i, e, g, psi, PsiBranch::Plus).unwrap();
            assert!((r.abs() - 0.5).abs() < 1e-14);
            assert!((r - l * (1.0 / i.i3 - 1.0 / i.i1)).abs() < 1e-14);
            assert_eq!(psi_rate(&i, e, g, psi, PsiBranch::Minus).unwrap(), -r);
            assert!((phi_rate(&i, g, psi) - g / i.i1).abs() < 1e-15);
        }
        let sph = InertiaTriple::new(2.0, 2.0, 2.0).unwrap();
        assert_eq!(psi_rate(&sph, 0.25, 1.0, 0.3, PsiBranch::Plus).unwrap(), 0.0);
        assert!((phi_rate(&sph, 1.0, 0.3) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn forbidden_region() {
        let i = InertiaTriple::new(1.0, 2.0, 3.0).unwrap();
        // 2E outside [G²/I₃, G²/I₁] is unreachable.
        assert!(matches!(psi_rate(&i, 0.1, 1.0, 0.3, PsiBranch::Plus), Err(Error::ForbiddenRegion(_))));
        assert!(matches!(psi_rate(&i, 0.6, 1.0, 0.3, PsiBranch::Plus), Err(Error::ForbiddenRegion(_))));
    }

    #[test]
    fn periods_match_integration() {
        let i = InertiaTriple::new(1.0, 2.0, 3.0).unwrap();
        let orient = EulerAngles::new(0.9, 0.4, -0.3);
        for w0 in [[0.3, 0.2, 0.8], [1.0, 0.2, 0.3], [0.2, 0.5, -0.9]] {
            let (e, g) = (i.kinetic_energy(&w0), i.momentum_squared(&w0).sqrt());
            let quad = body_periods(&i, e, g).unwrap();
            let num = integrated_periods(&i, &w0, &orient).unwrap();
            assert_eq!(quad.libration, num.libration, "{w0:?}");
            assert!(((quad.t_l - num.t_l) / quad.t_l).abs() < 1e-5, "{quad:?} {num:?}");
            assert!(((quad.delta_phi - num.delta_phi) / quad.delta_phi).abs() < 1e-5, "{quad:?} {num:?}");
            assert!(((quad.t_g - num.t_g) / quad.t_g).abs() < 1e-5);
        }
    }

    #[test]
    fn symmetric_rates_are_constant() {
        let i = InertiaTriple::new(1.5, 1.5, 2.5).unwrap();
        let run = integrate_free_body(&i, &[0.4, -0.3, 0.9], &[1.0, 0.0, 0.0, 0.0], 20.0, 0.1, OdeOptions::default()).unwrap();
        let omegas: Vec<[f64; 3]> = run.samples.iter().map(|s| s.omega).collect();
        let (a, b) = rate_spread(&i, &omegas);
        assert!(a <= 1e-12 && b <= 1e-12, "{a} {b}");
    }
}
