//! Toda, Calogero and Sutherland lattices with their Lax matrices; the
//! spectrum of the Lax matrix is used as a conservation oracle.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode::{integrate_dense, OdeOptions};

/// Lattice Hamiltonians on n particles of mass m on a line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LatticeKind {
    /// Σ p²/2m + g Σ_{i<n} e^{−κ(q_{i+1} − q_i)}.
    Toda { m: f64, g: f64, kappa: f64 },
    /// Σ p²/2m + Σ_{i<j} g/(q_i − q_j)² + ½ m ω² Σ q².
    Calogero { m: f64, g: f64, omega: f64 },
    /// Σ p²/2m + Σ_{i<j} g/sinh²(q_i − q_j).
    Sutherland { m: f64, g: f64 },
}

/// Momenta and positions of a lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeState {
    pub kind: LatticeKind,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

/// Minimum separation accepted for singular pair potentials.
pub const COLLISION_DISTANCE: f64 = 1e-8;

impl LatticeState {
    pub fn new(kind: LatticeKind, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() || p.is_empty() {
            return Err(Error::InvalidInput("p and q must be nonempty and of equal length".into()));
        }
        let m = match kind {
            LatticeKind::Toda { m, .. } | LatticeKind::Calogero { m, .. } | LatticeKind::Sutherland { m, .. } => m,
        };
        if !(m > 0.0) {
            return Err(Error::InvalidInput("mass must be positive".into()));
        }
        let s = LatticeState { kind, p, q };
        s.check_collision(&s.q)?;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    fn mass(&self) -> f64 {
        match self.kind {
            LatticeKind::Toda { m, .. } | LatticeKind::Calogero { m, .. } | LatticeKind::Sutherland { m, .. } => m,
        }
    }

    fn check_collision(&self, q: &[f64]) -> Result<()> {
        if matches!(self.kind, LatticeKind::Toda { .. }) {
            return Ok(());
        }
        for i in 0..q.len() {
            for j in i + 1..q.len() {
                let d = (q[i] - q[j]).abs();
                if d < COLLISION_DISTANCE {
                    return Err(Error::CollisionDetected { i, j, distance: d });
                }
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self, p: &[f64], q: &[f64]) -> f64 {
        let m = self.mass();
        let n = q.len();
        let kinetic: f64 = p.iter().map(|x| x * x / (2.0 * m)).sum();
        let pairs = || (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)));
        kinetic
            + match self.kind {
                LatticeKind::Toda { g, kappa, .. } => (0..n.saturating_sub(1)).map(|i| g * (-kappa * (q[i + 1] - q[i])).exp()).sum(),
                LatticeKind::Calogero { g, omega, .. } => {
                    pairs().map(|(i, j)| g / (q[i] - q[j]).powi(2)).sum::<f64>()
                        + 0.5 * m * omega * omega * q.iter().map(|x| x * x).sum::<f64>()
                }
                LatticeKind::Sutherland { g, .. } => pairs().map(|(i, j)| g / (q[i] - q[j]).sinh().powi(2)).sum(),
            }
    }

    /// Hamilton's equations for the state (q, p).
    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.n();
        let m = self.mass();
        let (q, p) = y.split_at(n);
        for i in 0..n {
            dy[i] = p[i] / m;
            dy[n + i] = 0.0;
        }
        let force = &mut dy[n..];
        match self.kind {
            LatticeKind::Toda { g, kappa, .. } => {
                for i in 0..n.saturating_sub(1) {
                    let f = g * kappa * (-kappa * (q[i + 1] - q[i])).exp();
                    force[i] -= f;
                    force[i + 1] += f;
                }
            }
            LatticeKind::Calogero { g, omega, .. } => {
                for i in 0..n {
                    force[i] -= m * omega * omega * q[i];
                    for j in 0..n {
                        if i != j {
                            force[i] += 2.0 * g / (q[i] - q[j]).powi(3);
                        }
                    }
                }
            }
            LatticeKind::Sutherland { g, .. } => {
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            let x = q[i] - q[j];
                            force[i] += 2.0 * g * x.cosh() / x.sinh().powi(3);
                        }
                    }
                }
            }
        }
    }

    /// Hermitian Lax matrix M(p, q) with tr M² = 2mH when ω = 0.
    pub fn lax_matrix(&self, p: &[f64], q: &[f64]) -> DMatrix<Complex<f64>> {
        let n = q.len();
        let m = self.mass();
        let mut lax = DMatrix::from_fn(n, n, |i, j| if i == j { Complex::new(p[i], 0.0) } else { Complex::new(0.0, 0.0) });
        match self.kind {
            LatticeKind::Toda { g, kappa, .. } => {
                for h in 0..n.saturating_sub(1) {
                    let a = (m * g).sqrt() * (-0.5 * kappa * (q[h + 1] - q[h])).exp();
                    lax[(h, h + 1)] = Complex::new(a, 0.0);
                    lax[(h + 1, h)] = Complex::new(a, 0.0);
                }
            }
            LatticeKind::Calogero { g, .. } => {
                for h in 0..n {
                    for k in 0..n {
                        if h != k {
                            lax[(h, k)] = Complex::new(0.0, (m * g).sqrt() / (q[h] - q[k]));
                        }
                    }
                }
            }
            LatticeKind::Sutherland { g, .. } => {
                for h in 0..n {
                    for k in 0..n {
                        if h != k {
                            lax[(h, k)] = Complex::new(0.0, (m * g).sqrt() / (q[h] - q[k]).sinh());
                        }
                    }
                }
            }
        }
        lax
    }

    /// Ascending eigenvalues of the Lax matrix.
    pub fn lax_spectrum(&self, p: &[f64], q: &[f64]) -> Vec<f64> {
        let eig = SymmetricEigen::new(self.lax_matrix(p, q));
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Outcome of a Lax conservation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaxReport {
    pub initial_spectrum: Vec<f64>,
    pub final_spectrum: Vec<f64>,
    /// max_t max_i |λ_i(t) − λ_i(0)|.
    pub max_drift: f64,
    /// max_t max_{hk} |M_hk(t) − M_hk(0)|: witness that the matrix itself moves.
    pub max_entry_variation: f64,
    pub energy_drift: f64,
    pub samples: usize,
}

/// Integrates the lattice to `t_final`, sampling every `dt_sample`, and
/// reports the drift of the Lax spectrum.
pub fn lax_eigenvalue_drift(state: &LatticeState, t_final: f64, dt_sample: f64) -> Result<LaxReport> {
    if let LatticeKind::Calogero { omega, .. } = state.kind {
        if omega != 0.0 {
            return Err(Error::PreconditionViolated("the Calogero Lax matrix is isospectral only for ω = 0".into()));
        }
    }
    let n = state.n();
    let y0: Vec<f64> = state.q.iter().chain(&state.p).copied().collect();
    let traj = integrate_dense(|_t, y: &[f64], dy: &mut [f64]| state.rhs(y, dy), 0.0, &y0, t_final, dt_sample, OdeOptions::tight())?;
    let m0 = state.lax_matrix(&state.p, &state.q);
    let s0 = state.lax_spectrum(&state.p, &state.q);
    let h0 = state.hamiltonian(&state.p, &state.q);
    let (mut drift, mut var, mut edrift) = (0.0f64, 0.0f64, 0.0f64);
    let mut last = s0.clone();
    for y in &traj.y {
        let (q, p) = y.split_at(n);
        state.check_collision(q)?;
        let s = state.lax_spectrum(p, q);
        drift = s.iter().zip(&s0).fold(drift, |d, (a, b)| d.max((a - b).abs()));
        let m = state.lax_matrix(p, q);
        var = m.iter().zip(m0.iter()).fold(var, |d, (a, b)| d.max((a - b).norm()));
        edrift = edrift.max((state.hamiltonian(p, q) - h0).abs());
        last = s;
    }
    Ok(LaxReport {
        initial_spectrum: s0,
        final_spectrum: last,
        max_drift: drift,
        max_entry_variation: var,
        energy_drift: edrift,
        samples: traj.t.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle_toda() {
        let s = LatticeState::new(LatticeKind::Toda { m: 1.0, g: 1.0, kappa: 2.0 }, vec![0.7], vec![0.0]).unwrap();
        let r = lax_eigenvalue_drift(&s, 10.0, 0.5).unwrap();
        assert_eq!(r.initial_spectrum, vec![0.7]);
        assert!(r.max_drift == 0.0);
    }

    #[test]
    fn toda_two_and_three() {
        let s = LatticeState::new(LatticeKind::Toda { m: 1.0, g: 1.0, kappa: 2.0 }, vec![1.0, -1.0], vec![0.0, 1.0]).unwrap();
        let r = lax_eigenvalue_drift(&s, 10.0, 0.1).unwrap();
        assert!(r.max_drift <= 1e-7 && r.max_entry_variation >= 1e-2, "{r:?}");
        let s = LatticeState::new(LatticeKind::Toda { m: 1.7, g: 0.6, kappa: 1.3 }, vec![0.5, -0.2, 0.1], vec![0.0, 0.8, 1.5]).unwrap();
        let r = lax_eigenvalue_drift(&s, 10.0, 0.1).unwrap();
        assert!(r.max_drift <= 1e-7 && r.max_entry_variation >= 1e-2, "{r:?}");
    }

    #[test]
    fn calogero_and_sutherland() {
        let s = LatticeState::new(LatticeKind::Calogero { m: 1.0, g: 1.0, omega: 0.0 }, vec![0.3, 0.0, -0.4], vec![-1.0, 0.2, 1.5])
            .unwrap();
        let r = lax_eigenvalue_drift(&s, 10.0, 0.1).unwrap();
        assert!(r.max_drift <= 1e-7 && r.max_entry_variation >= 1e-2, "{r:?}");
        let s = LatticeState::new(LatticeKind::Sutherland { m: 1.3, g: 0.4 }, vec![0.3, 0.0, -0.4], vec![-1.0, 0.2, 1.5]).unwrap();
        let r = lax_eigenvalue_drift(&s, 10.0, 0.1).unwrap();
        assert!(r.max_drift <= 1e-7 && r.max_entry_variation >= 1e-2, "{r:?}");
    }

    #[test]
    fn collisions_rejected() {
        let k = LatticeKind::Calogero { m: 1.0, g: 1.0, omega: 0.0 };
        assert!(matches!(LatticeState::new(k, vec![0.0, 0.0], vec![1.0, 1.0]), Err(Error::CollisionDetected { .. })));
        let s = LatticeState::new(LatticeKind::Calogero { m: 1.0, g: 1.0, omega: 0.5 }, vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert!(lax_eigenvalue_drift(&s, 1.0, 0.1).is_err());
    }
}
