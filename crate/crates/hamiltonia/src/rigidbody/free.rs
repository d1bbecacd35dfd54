//! Free rigid body: Euler equations for the body-frame angular velocity
//! together with the orientation quaternion (body → lab).

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_dense, OdeOptions};

/// Principal moments of inertia (I₁, I₂, I₃).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaTriple {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl InertiaTriple {
    pub fn new(i1: f64, i2: f64, i3: f64) -> Result<Self> {
        if !(i1 > 0.0 && i2 > 0.0 && i3 > 0.0) {
            return Err(Error::InvalidInput(format!("inertia moments must be positive, got ({i1}, {i2}, {i3})")));
        }
        Ok(InertiaTriple { i1, i2, i3 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.i1, self.i2, self.i3]
    }

    /// K = ½ Σ I_j ω_j².
    pub fn kinetic_energy(&self, w: &[f64; 3]) -> f64 {
        0.5 * (self.i1 * w[0] * w[0] + self.i2 * w[1] * w[1] + self.i3 * w[2] * w[2])
    }

    /// Body-frame angular momentum (I₁ω₁, I₂ω₂, I₃ω₃).
    pub fn momentum(&self, w: &[f64; 3]) -> [f64; 3] {
        [self.i1 * w[0], self.i2 * w[1], self.i3 * w[2]]
    }

    /// G² = Σ I_j² ω_j².
    pub fn momentum_squared(&self, w: &[f64; 3]) -> f64 {
        self.momentum(w).iter().map(|m| m * m).sum()
    }

    /// ω from the body-frame angular momentum.
    pub fn omega_of_momentum(&self, m: &[f64; 3]) -> [f64; 3] {
        [m[0] / self.i1, m[1] / self.i2, m[2] / self.i3]
    }
}

/// dω/dt from the Euler equations.
pub fn euler_rhs(i: &InertiaTriple, w: &[f64; 3]) -> [f64; 3] {
    [
        (i.i2 - i.i3) * w[1] * w[2] / i.i1,
        (i.i3 - i.i1) * w[2] * w[0] / i.i2,
        (i.i1 - i.i2) * w[0] * w[1] / i.i3,
    ]
}

/// Right-hand side on y = (ω₁, ω₂, ω₃, q_w, q_x, q_y, q_z) with q̇ = ½ q ⊗ (0, ω).
pub fn free_body_rhs(i: InertiaTriple) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |_t, y, dy| {
        let w = [y[0], y[1], y[2]];
        let dw = euler_rhs(&i, &w);
        dy[..3].copy_from_slice(&dw);
        let q = Quaternion::new(y[3], y[4], y[5], y[6]);
        let dq = q * Quaternion::new(0.0, w[0], w[1], w[2]) * 0.5;
        dy[3] = dq.w;
        dy[4] = dq.i;
        dy[5] = dq.j;
        dy[6] = dq.k;
    }
}

/// Rotation matrix of a (not necessarily normalized) quaternion (w, x, y, z).
pub fn rotation_of(q: &[f64]) -> Matrix3<f64> {
    UnitQuaternion::from_quaternion(Quaternion::new(q[0], q[1], q[2], q[3])).to_rotation_matrix().into_inner()
}

/// Quaternion (w, x, y, z) of a rotation matrix.
pub fn quaternion_of(r: &Matrix3<f64>) -> [f64; 4] {
    let q = UnitQuaternion::from_matrix(r);
    [q.w, q.i, q.j, q.k]
}

/// One trajectory sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeBodySample {
    pub t: f64,
    pub omega: [f64; 3],
    pub quaternion: [f64; 4],
    pub energy: f64,
    pub momentum_squared: f64,
}

/// Sampled free motion with invariant drifts (relative to the initial values).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeBodyRun {
    pub inertia: InertiaTriple,
    pub samples: Vec<FreeBodySample>,
    pub energy_drift: f64,
    pub momentum_drift: f64,
    /// max |R(q) I ω − M(0)| / |M(0)|, the lab-frame momentum drift.
    pub lab_momentum_drift: f64,
}

impl FreeBodyRun {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,w1,w2,w3,qw,qx,qy,qz,energy,momentum_squared\n");
        for s in &self.samples {
            out.push_str(&format!("{:.15e}", s.t));
            for v in s.omega.iter().chain(&s.quaternion).chain([&s.energy, &s.momentum_squared]) {
                out.push_str(&format!(",{v:.15e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Integrates the free body from ω₀ and orientation q₀ up to `t_final`.
pub fn integrate_free_body(
    i: &InertiaTriple,
    w0: &[f64; 3],
    q0: &[f64; 4],
    t_final: f64,
    dt_out: f64,
    opts: OdeOptions,
) -> Result<FreeBodyRun> {
    if !(t_final >= 0.0) {
        return Err(Error::InvalidInput("t_final must be non-negative".into()));
    }
    let y0 = [w0[0], w0[1], w0[2], q0[0], q0[1], q0[2], q0[3]];
    let traj = integrate_dense(free_body_rhs(*i), 0.0, &y0, t_final, dt_out.min(t_final.max(dt_out)), opts)?;
    let (k0, g0) = (i.kinetic_energy(w0), i.momentum_squared(w0));
    let lab = |y: &[f64]| rotation_of(&y[3..7]) * Vector3::from(i.momentum(&[y[0], y[1], y[2]]));
    let m0 = lab(&y0);
    let mut run = FreeBodyRun { inertia: *i, samples: Vec::new(), energy_drift: 0.0, momentum_drift: 0.0, lab_momentum_drift: 0.0 };
    for (t, y) in traj.t.iter().zip(&traj.y) {
        let w = [y[0], y[1], y[2]];
        let s = FreeBodySample {
            t: *t,
            omega: w,
            quaternion: [y[3], y[4], y[5], y[6]],
            energy: i.kinetic_energy(&w),
            momentum_squared: i.momentum_squared(&w),
        };
        run.energy_drift = run.energy_drift.max(((s.energy - k0) / k0).abs());
        run.momentum_drift = run.momentum_drift.max(((s.momentum_squared - g0) / g0).abs());
        run.lab_momentum_drift = run.lab_momentum_drift.max((lab(y) - m0).norm() / m0.norm());
        run.samples.push(s);
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: [f64; 4] = [1.0, 0.0, 0.0, 0.0];

    #[test]
    fn euler_rhs_values() {
        let i = InertiaTriple::new(1.0, 2.0, 3.0).unwrap();
        let d = euler_rhs(&i, &[1.0, 1.0, 1.0]);
        assert_eq!(d[0], -1.0);
        assert_eq!(d[1], 1.0);
        assert!((d[2] + 1.0 / 3.0).abs() < 1e-16);
        let s = InertiaTriple::new(2.0, 2.0, 2.0).unwrap();
        assert_eq!(euler_rhs(&s, &[0.3, -1.0, 2.0]), [0.0; 3]);
        assert_eq!(euler_rhs(&i, &[0.0, 4.0, 0.0]), [0.0; 3]);
    }

    #[test]
    fn spherical_body_keeps_omega() {
        let s = InertiaTriple::new(1.5, 1.5, 1.5).unwrap();
        let run = integrate_free_body(&s, &[0.2, 0.4, -0.1], &IDENTITY, 5.0, 1.0, OdeOptions::default()).unwrap();
        assert!(run.samples.iter().all(|x| x.omega == [0.2, 0.4, -0.1]));
    }

    #[test]
    fn invariants_near_stable_and_unstable_axes() {
        let i = InertiaTriple::new(1.0, 2.0, 3.0).unwrap();
        for w0 in [[1.0, 0.01, 0.01], [0.01, 1.0, 0.01]] {
            let run = integrate_free_body(&i, &w0, &IDENTITY, 100.0, 1.0, OdeOptions::default()).unwrap();
            assert!(run.energy_drift <= 1e-10 && run.momentum_drift <= 1e-10, "{w0:?} {run:?}");
            assert!(run.lab_momentum_drift <= 1e-9);
            let spread = run.samples.iter().map(|s| s.omega[1].abs()).fold(0.0, f64::max);
            if w0[1] == 1.0 {
                assert!(run.samples.iter().any(|s| s.omega[1] < 0.0));
            } else {
                assert!(spread < 0.05);
            }
        }
    }
}
