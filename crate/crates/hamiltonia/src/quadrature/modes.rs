//! Small oscillations H = Σ p_i²/2m_i + ½ q·C q in normal modes, and free
//! rotators H = Σ A_i²/2J_i.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequencies ω_β and orthonormal modes of m^{−1/2} C m^{−1/2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalModes {
    pub masses: Vec<f64>,
    /// Ascending frequencies.
    pub frequencies: Vec<f64>,
    /// Column β is the β-th eigenvector in mass-weighted coordinates.
    pub modes: Vec<Vec<f64>>,
    pub stiffness: Vec<Vec<f64>>,
}

pub fn normal_modes(masses: &[f64], stiffness: &[Vec<f64>]) -> Result<NormalModes> {
    let n = masses.len();
    if n == 0 || stiffness.len() != n || stiffness.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("stiffness must be n×n with n = number of masses".into()));
    }
    if masses.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidInput("masses must be positive".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if (stiffness[i][j] - stiffness[j][i]).abs() > 1e-12 * (1.0 + stiffness[i][j].abs()) {
                return Err(Error::InvalidInput("stiffness must be symmetric".into()));
            }
        }
    }
    let k = DMatrix::from_fn(n, n, |i, j| stiffness[i][j] / (masses[i] * masses[j]).sqrt());
    let eig = SymmetricEigen::new(k);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if !(eig.eigenvalues[order[0]] > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let frequencies = order.iter().map(|&b| eig.eigenvalues[b].sqrt()).collect();
    let modes = (0..n).map(|i| order.iter().map(|&b| eig.eigenvectors[(i, b)]).collect()).collect();
    Ok(NormalModes { masses: masses.to_vec(), frequencies, modes, stiffness: stiffness.to_vec() })
}

impl NormalModes {
    fn modal(&self, p: &[f64], q: &[f64]) -> (DVector<f64>, DVector<f64>) {
        let n = self.masses.len();
        let u = DMatrix::from_fn(n, n, |i, j| self.modes[i][j]);
        let x = DVector::from_fn(n, |i, _| self.masses[i].sqrt() * q[i]);
        let y = DVector::from_fn(n, |i, _| p[i] / self.masses[i].sqrt());
        (u.transpose() * x, u.transpose() * y)
    }

    /// A_β = (η_β² + ω_β²ξ_β²)/2ω_β in modal coordinates.
    pub fn actions(&self, p: &[f64], q: &[f64]) -> Vec<f64> {
        let (xi, eta) = self.modal(p, q);
        self.frequencies.iter().enumerate().map(|(b, w)| (eta[b] * eta[b] + w * w * xi[b] * xi[b]) / (2.0 * w)).collect()
    }

    /// Direct value of Σ p²/2m + ½ q·C q.
    pub fn hamiltonian(&self, p: &[f64], q: &[f64]) -> f64 {
        let n = self.masses.len();
        let kinetic: f64 = (0..n).map(|i| p[i] * p[i] / (2.0 * self.masses[i])).sum();
        let potential: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| 0.5 * q[i] * self.stiffness[i][j] * q[j]).sum();
        kinetic + potential
    }

    /// Σ ω_β A_β.
    pub fn energy_from_actions(&self, p: &[f64], q: &[f64]) -> f64 {
        self.actions(p, q).iter().zip(&self.frequencies).map(|(a, w)| a * w).sum()
    }

    /// Right-hand side of Hamilton's equations for the state (q, p).
    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.masses.len();
        for i in 0..n {
            dy[i] = y[n + i] / self.masses[i];
            dy[n + i] = -(0..n).map(|j| self.stiffness[i][j] * y[j]).sum::<f64>();
        }
    }
}

/// Free rotators after time t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotatorFlow {
    /// α₀ + ω t, not reduced.
    pub advance: Vec<f64>,
    /// α(t) reduced to [0, 2π).
    pub alpha: Vec<f64>,
    /// ω_i = A_i/J_i.
    pub frequencies: Vec<f64>,
    pub energy: f64,
}

pub fn free_rotator_flow(inertia: &[f64], momenta: &[f64], alpha0: &[f64], t: f64) -> Result<RotatorFlow> {
    if inertia.len() != momenta.len() || inertia.len() != alpha0.len() {
        return Err(Error::InvalidInput("inertia, momenta and angles must have equal length".into()));
    }
    if inertia.iter().any(|&j| !(j > 0.0)) {
        return Err(Error::InvalidInput("moments of inertia must be positive".into()));
    }
    let frequencies: Vec<f64> = momenta.iter().zip(inertia).map(|(a, j)| a / j).collect();
    let advance: Vec<f64> = alpha0.iter().zip(&frequencies).map(|(a, w)| a + w * t).collect();
    let alpha = advance.iter().map(|a| a.rem_euclid(2.0 * std::f64::consts::PI)).collect();
    let energy = momenta.iter().zip(inertia).map(|(a, j)| a * a / (2.0 * j)).sum();
    Ok(RotatorFlow { advance, alpha, frequencies, energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, OdeOptions};
    use std::f64::consts::PI;

    #[test]
    fn chain_of_two() {
        let m = normal_modes(&[1.0, 1.0], &[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        assert!((m.frequencies[0] - 1.0).abs() < 1e-14 && (m.frequencies[1] - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn isotropic_and_indefinite() {
        let m = normal_modes(&[2.0, 2.0, 2.0], &[vec![8.0, 0.0, 0.0], vec![0.0, 8.0, 0.0], vec![0.0, 0.0, 8.0]]).unwrap();
        assert!(m.frequencies.iter().all(|w| (w - 2.0).abs() < 1e-14));
        assert_eq!(normal_modes(&[1.0, 1.0], &[vec![1.0, 2.0], vec![2.0, 1.0]]), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn actions_conserved() {
        let masses = [1.0, 2.0, 0.5];
        let c = vec![vec![3.0, -1.0, 0.2], vec![-1.0, 2.5, -0.7], vec![0.2, -0.7, 1.8]];
        let modes = normal_modes(&masses, &c).unwrap();
        let (p, q) = ([0.3, -0.2, 0.5], [0.1, 0.4, -0.3]);
        assert!((modes.energy_from_actions(&p, &q) - modes.hamiltonian(&p, &q)).abs() < 1e-12);
        let a0 = modes.actions(&p, &q);
        let y0 = [q[0], q[1], q[2], p[0], p[1], p[2]];
        let y = integrate(|_t, y: &[f64], dy: &mut [f64]| modes.rhs(y, dy), 0.0, &y0, 10.0, OdeOptions::tight()).unwrap();
        let a1 = modes.actions(&y[3..], &y[..3]);
        for (a, b) in a0.iter().zip(&a1) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn rotators() {
        let r = free_rotator_flow(&[1.0, 2.0], &[2.0, 2.0], &[0.0, 0.0], PI).unwrap();
        assert!((r.advance[0] - 2.0 * PI).abs() < 1e-15 && (r.advance[1] - PI).abs() < 1e-15);
        assert!((r.energy - 3.0).abs() < 1e-15);
        let still = free_rotator_flow(&[1.0], &[0.0], &[0.7], 5.0).unwrap();
        assert_eq!(still.alpha, vec![0.7]);
    }
}
