//! Phase-space maps (p, q) → (p′, q′) and the symplectic test L E Lᵀ = E.
//!
//! Points are ordered momenta first: x = (p₁..p_ℓ, q₁..q_ℓ), and
//! E = [[0, 1], [−1, 0]] in ℓ×ℓ blocks.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type MapFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// Finite-difference step pair (h, h/2) for map Jacobians.
pub const JACOBIAN_STEP: f64 = 1e-5;
/// Tolerance of [`PhaseMap::is_canonical`].
pub const CANONICAL_TOL: f64 = 1e-6;

/// Smooth invertible map of a 2ℓ-dimensional phase space.
#[derive(Clone)]
pub struct PhaseMap {
    pub name: String,
    pub dof: usize,
    forward: MapFn,
    inverse: Option<MapFn>,
    /// Output components taking values on a circle (differences wrapped mod 2π).
    pub periodic_outputs: Vec<bool>,
}

impl std::fmt::Debug for PhaseMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseMap").field("name", &self.name).field("dof", &self.dof).finish()
    }
}

fn wrap(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    x - (x / two_pi).round() * two_pi
}

/// Symplectic unit E for ℓ degrees of freedom.
pub fn symplectic_unit(dof: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * dof, 2 * dof, |i, j| {
        if j == i + dof {
            1.0
        } else if i == j + dof {
            -1.0
        } else {
            0.0
        }
    })
}

impl PhaseMap {
    pub fn new<F>(name: &str, dof: usize, forward: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        PhaseMap { name: name.into(), dof, forward: Arc::new(forward), inverse: None, periodic_outputs: vec![false; 2 * dof] }
    }

    pub fn with_inverse<F>(mut self, inverse: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn with_periodic_outputs(mut self, periodic: Vec<bool>) -> Self {
        self.periodic_outputs = periodic;
        self
    }

    pub fn identity(dof: usize) -> Self {
        PhaseMap::new("identity", dof, |x| Ok(x.to_vec())).with_inverse(|x| Ok(x.to_vec()))
    }

    /// (p, q) → (c p, c q); canonical only for c = ±1.
    pub fn scaling(dof: usize, c: f64) -> Self {
        PhaseMap::new("scaling", dof, move |x| Ok(x.iter().map(|v| c * v).collect()))
            .with_inverse(move |x| Ok(x.iter().map(|v| v / c).collect()))
    }

    /// (p₁, p₂, q₁, q₂) → (p_ρ, p_θ, ρ, θ).
    pub fn polar() -> Self {
        PhaseMap::new("polar", 2, |x| {
            let (p1, p2, q1, q2) = (x[0], x[1], x[2], x[3]);
            let rho = q1.hypot(q2);
            if rho == 0.0 {
                return Err(Error::ChartSingular("polar chart at the origin".into()));
            }
            Ok(vec![(p1 * q1 + p2 * q2) / rho, q1 * p2 - q2 * p1, rho, q2.atan2(q1)])
        })
        .with_inverse(|y| {
            let (pr, pt, rho, th) = (y[0], y[1], y[2], y[3]);
            let (s, c) = th.sin_cos();
            Ok(vec![pr * c - pt * s / rho, pr * s + pt * c / rho, rho * c, rho * s])
        })
        .with_periodic_outputs(vec![false, false, false, true])
    }

    /// (p, q) → ((∂R)^{−T} p, R(q)) for the point transformation q′ = R(q).
    pub fn point_transformation<R, J>(name: &str, dof: usize, r: R, jac: J) -> Self
    where
        R: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        PhaseMap::new(name, dof, move |x| {
            let (p, q) = x.split_at(dof);
            let jt = jac(q).transpose();
            let pp = jt
                .lu()
                .solve(&nalgebra::DVector::from_column_slice(p))
                .ok_or_else(|| Error::JacobianSingular(0.0))?;
            let mut out: Vec<f64> = pp.iter().copied().collect();
            out.extend(r(q));
            Ok(out)
        })
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != 2 * self.dof {
            return Err(Error::InvalidInput(format!("point has {} entries, map expects {}", x.len(), 2 * self.dof)));
        }
        (self.forward)(x)
    }

    pub fn invert(&self, y: &[f64]) -> Result<Vec<f64>> {
        match &self.inverse {
            Some(inv) => inv(y),
            None => Err(Error::InvalidInput(format!("map {} has no inverse", self.name))),
        }
    }

    /// max |forward(inverse(y)) − y| and max |inverse(forward(x)) − x| at x.
    pub fn inverse_residual(&self, x: &[f64]) -> Result<f64> {
        let y = self.apply(x)?;
        let back = self.invert(&y)?;
        let again = self.apply(&back)?;
        let a = back.iter().zip(x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        let b = again.iter().zip(&y).enumerate().map(|(i, (u, v))| self.diff(i, *u, *v).abs()).fold(0.0, f64::max);
        Ok(a.max(b))
    }

    fn diff(&self, i: usize, a: f64, b: f64) -> f64 {
        if self.periodic_outputs.get(i).copied().unwrap_or(false) {
            wrap(a - b)
        } else {
            a - b
        }
    }

    /// Self ∘ inner.
    pub fn compose(&self, inner: &PhaseMap) -> Result<PhaseMap> {
        if self.dof != inner.dof {
            return Err(Error::InvalidInput("composed maps must share the dimension".into()));
        }
        let (outer_f, inner_f) = (self.forward.clone(), inner.forward.clone());
        let mut m = PhaseMap::new(&format!("{}∘{}", self.name, inner.name), self.dof, move |x| outer_f(&inner_f(x)?));
        if let (Some(oi), Some(ii)) = (self.inverse.clone(), inner.inverse.clone()) {
            m.inverse = Some(Arc::new(move |y| ii(&oi(y)?)));
        }
        m.periodic_outputs = self.periodic_outputs.clone();
        Ok(m)
    }

    /// Jacobian L_ij = ∂x′_i/∂x_j by Richardson-refined central differences.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = 2 * self.dof;
        let mut l = DMatrix::zeros(n, n);
        for j in 0..n {
            let central = |h: f64| -> Result<Vec<f64>> {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[j] += h;
                xm[j] -= h;
                let (fp, fm) = (self.apply(&xp)?, self.apply(&xm)?);
                Ok((0..n).map(|i| self.diff(i, fp[i], fm[i]) / (2.0 * h)).collect())
            };
            let h = JACOBIAN_STEP * (1.0 + x[j].abs());
            let (d1, d2) = (central(h)?, central(h / 2.0)?);
            for i in 0..n {
                l[(i, j)] = (4.0 * d2[i] - d1[i]) / 3.0;
            }
        }
        Ok(l)
    }

    /// ‖L E Lᵀ − E‖ (largest entry in absolute value).
    pub fn symplectic_residual(&self, x: &[f64]) -> Result<f64> {
        let l = self.jacobian(x)?;
        let det = l.determinant();
        if !(det.abs() > 1e-12) {
            return Err(Error::JacobianSingular(det));
        }
        let e = symplectic_unit(self.dof);
        Ok((&l * &e * l.transpose() - e).amax())
    }

    pub fn jacobian_determinant(&self, x: &[f64]) -> Result<f64> {
        Ok(self.jacobian(x)?.determinant())
    }

    pub fn is_canonical(&self, x: &[f64]) -> Result<bool> {
        Ok(self.symplectic_residual(x)? <= CANONICAL_TOL)
    }

    /// Residual report at one point.
    pub fn report(&self, x: &[f64]) -> Result<VerificationReport> {
        let residual = self.symplectic_residual(x)?;
        Ok(VerificationReport { map: self.name.clone(), point: x.to_vec(), residual, pass: residual <= CANONICAL_TOL })
    }
}

/// One canonicity check, serializable as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub map: String,
    pub point: Vec<f64>,
    pub residual: f64,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_exact() {
        let r = PhaseMap::identity(2).symplectic_residual(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(r < 1e-9);
    }

    #[test]
    fn polar_is_canonical() {
        let m = PhaseMap::polar();
        for x in [[0.3, -0.7, 1.2, 0.5], [1.0, 2.0, -0.4, -0.1], [0.0, 0.5, -2.0, 1e-3]] {
            assert!(m.symplectic_residual(&x).unwrap() <= 1e-6);
            assert!((m.jacobian_determinant(&x).unwrap() - 1.0).abs() < 1e-6);
            assert!(m.inverse_residual(&x).unwrap() < 1e-10);
        }
    }

    #[test]
    fn scaling_residual_is_three() {
        let r = PhaseMap::scaling(1, 2.0).symplectic_residual(&[0.4, -1.1]).unwrap();
        assert!((r - 3.0).abs() < 1e-8);
    }

    #[test]
    fn branch_cut_is_harmless() {
        let r = PhaseMap::polar().symplectic_residual(&[0.2, 0.1, -1.0, 1e-9]).unwrap();
        assert!(r < 1e-6);
    }

    #[test]
    fn composition() {
        let m = PhaseMap::polar().compose(&PhaseMap::identity(2)).unwrap();
        assert!(m.symplectic_residual(&[0.3, 0.1, 0.9, 0.4]).unwrap() < 1e-6);
    }
}
