//! ODE integration: adaptive 8th-order Dormand-Prince (DOP853) and leapfrog.

use nalgebra::DVector;
use ode_solvers::dop853::Dop853;
use ode_solvers::dop_shared::OutputType;
use ode_solvers::System;

use crate::error::{Error, Result};

/// Integrator tolerances and limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: u32,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-12, max_steps: 5_000_000 }
    }
}

impl OdeOptions {
    pub fn tight() -> Self {
        OdeOptions { rtol: 1e-13, atol: 1e-14, ..Default::default() }
    }
}

/// Sampled solution: times and states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.y.last().expect("trajectory has at least the initial point")
    }

    /// Writes `t,y0,y1,...` rows.
    pub fn to_csv(&self, header: &[&str]) -> String {
        let mut out = String::from("t");
        for h in header {
            out.push(',');
            out.push_str(h);
        }
        out.push('\n');
        for (t, y) in self.t.iter().zip(&self.y) {
            out.push_str(&format!("{t:.15e}"));
            for v in y {
                out.push_str(&format!(",{v:.15e}"));
            }
            out.push('\n');
        }
        out
    }
}

struct Rhs<F> {
    f: F,
}

impl<F> System<f64, DVector<f64>> for Rhs<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn system(&self, t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        (self.f)(t, y.as_slice(), dy.as_mut_slice());
    }
}

fn run<F>(f: F, t0: f64, y0: &[f64], t1: f64, opts: OdeOptions) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if t1 == t0 {
        return Ok(Trajectory { t: vec![t0], y: vec![y0.to_vec()] });
    }
    let mut solver = Dop853::from_param(
        Rhs { f },
        t0,
        t1,
        0.0,
        DVector::from_column_slice(y0),
        opts.rtol,
        opts.atol,
        0.9,
        0.0,
        0.333,
        6.0,
        t1 - t0,
        0.0,
        opts.max_steps,
        u32::MAX,
        OutputType::Sparse,
    );
    solver.integrate().map_err(|e| Error::IntegrationFailed(e.to_string()))?;
    let (ts, ys) = solver.results().get();
    let mut traj = Trajectory { t: ts.clone(), y: ys.iter().map(|v| v.as_slice().to_vec()).collect() };
    if traj.t.first().map_or(true, |&t| t != t0) {
        traj.t.insert(0, t0);
        traj.y.insert(0, y0.to_vec());
    }
    Ok(traj)
}

/// Integrates y' = f(t, y) from t0 to t1 and returns the final state.
pub fn integrate<F>(f: F, t0: f64, y0: &[f64], t1: f64, opts: OdeOptions) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let traj = run(f, t0, y0, t1, opts)?;
    Ok(traj.last().to_vec())
}

/// Integrates and returns samples every `dt_out` plus the endpoint.
///
/// Each sample is reached by restarting the adaptive integrator, so every
/// output carries the full step-control accuracy.
pub fn integrate_dense<F>(f: F, t0: f64, y0: &[f64], t1: f64, dt_out: f64, opts: OdeOptions) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if !(dt_out > 0.0) {
        return Err(Error::InvalidInput("dt_out must be positive".into()));
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let n = ((t1 - t0).abs() / dt_out).floor() as usize;
    let mut times: Vec<f64> = (1..=n).map(|i| t0 + dir * i as f64 * dt_out).collect();
    if times.last().map_or(true, |&t| (t - t1).abs() > 1e-12 * t1.abs().max(1.0)) {
        times.push(t1);
    } else if let Some(last) = times.last_mut() {
        *last = t1;
    }
    let mut traj = Trajectory { t: vec![t0], y: vec![y0.to_vec()] };
    let mut y = y0.to_vec();
    let mut t = t0;
    for tk in times {
        y = integrate(&f, t, &y, tk, opts)?;
        t = tk;
        traj.t.push(tk);
        traj.y.push(y.clone());
    }
    Ok(traj)
}

/// Integrates through the requested times in order and returns the state at each.
pub fn integrate_at<F>(f: F, t0: f64, y0: &[f64], times: &[f64], opts: OdeOptions) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let mut out = Vec::with_capacity(times.len());
    let mut t = t0;
    let mut y = y0.to_vec();
    for &tk in times {
        y = integrate(&f, t, &y, tk, opts)?;
        t = tk;
        out.push(y.clone());
    }
    Ok(out)
}

/// Störmer-Verlet (leapfrog) for separable H = T(p) + V(q).
///
/// `state` is (p, q) with p first; `dt_dp` and `dv_dq` return ∂T/∂p and ∂V/∂q.
pub fn leapfrog<FP, FQ>(state: &mut [f64], dt: f64, steps: usize, dt_dp: FP, dv_dq: FQ)
where
    FP: Fn(&[f64], &mut [f64]),
    FQ: Fn(&[f64], &mut [f64]),
{
    let n = state.len() / 2;
    let mut grad = vec![0.0; n];
    for _ in 0..steps {
        let (p, q) = state.split_at_mut(n);
        dv_dq(q, &mut grad);
        for i in 0..n {
            p[i] -= 0.5 * dt * grad[i];
        }
        dt_dp(p, &mut grad);
        for i in 0..n {
            q[i] += dt * grad[i];
        }
        dv_dq(q, &mut grad);
        for i in 0..n {
            p[i] -= 0.5 * dt * grad[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_returns_after_period() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let y = integrate(f, 0.0, &[1.0, 0.0], 2.0 * std::f64::consts::PI, OdeOptions::default()).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-11 && y[1].abs() < 1e-11, "{y:?}");
    }

    #[test]
    fn dense_output_hits_samples() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let traj = integrate_dense(f, 0.0, &[1.0], 1.0, 0.25, OdeOptions::default()).unwrap();
        for (t, y) in traj.t.iter().zip(&traj.y) {
            assert!((y[0] - t.exp()).abs() < 1e-11, "{t} {} {}", y[0], y[0] - t.exp());
        }
        assert!((traj.t.last().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(traj.t.len(), 5);
    }

    #[test]
    fn backward_integration() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let y = integrate(f, 1.0, &[1.0], -1.0, OdeOptions::default()).unwrap();
        assert!((y[0] - (-2f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn leapfrog_conserves_energy_approximately() {
        let mut s = [0.0, 1.0];
        leapfrog(&mut s, 1e-3, 10_000, |p, g| g[0] = p[0], |q, g| g[0] = q[0]);
        let e = 0.5 * (s[0] * s[0] + s[1] * s[1]);
        assert!((e - 0.5).abs() < 1e-6);
    }
}
