//! First-order obstruction scan: harmonics ν with f_ν ≠ 0 whose resonance
//! surface ω(A)·ν = 0 meets a box of actions.

use serde::{Deserialize, Serialize};

use crate::base::{FourierSeries, HarmonicVector};
use crate::error::{Error, Result};
use crate::numerics::diff::jacobian;
use crate::numerics::roots::brent;

/// Points of one resonance surface found inside the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionWitness {
    pub nu: Vec<i64>,
    pub points: Vec<Vec<f64>>,
}

/// Scans every harmonic 0 < |ν| ≤ `n_max` in the support of f (one of ±ν)
/// on a grid of `grid` points per axis, refining sign changes of ω(A)·ν
/// along grid edges by Brent's method.
pub fn poincare_obstruction_scan<W: Fn(&[f64]) -> Vec<f64>>(
    f: &FourierSeries,
    omega: W,
    lo: &[f64],
    hi: &[f64],
    n_max: usize,
    grid: usize,
) -> Result<Vec<ObstructionWitness>> {
    let dim = f.dim();
    if lo.len() != dim || hi.len() != dim || lo.iter().zip(hi).any(|(a, b)| a >= b) {
        return Err(Error::InvalidInput("box must be a nonempty product of intervals on the torus dimension".into()));
    }
    if grid < 2 {
        return Err(Error::InvalidInput("grid needs at least two points per axis".into()));
    }
    let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let jac = nalgebra::DMatrix::from_fn(dim, dim, |i, j| jacobian(&omega, &center, 1e-5)[i][j]);
    if jac.determinant().abs() < 1e-12 {
        return Err(Error::InvalidInput("frequency map is isochronous on the box".into()));
    }
    // ν and −ν share a resonance surface: keep the one with positive leading entry.
    let mut harmonics: Vec<HarmonicVector> = f
        .iter()
        .filter(|(nu, c)| !nu.is_zero() && nu.norm() <= n_max && c.norm() > 0.0)
        .map(|(nu, _)| if nu.entries().iter().find(|&&a| a != 0).is_some_and(|&a| a > 0) { nu.clone() } else { -nu })
        .collect();
    harmonics.sort();
    harmonics.dedup();
    let step: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / (grid - 1) as f64).collect();
    let total = grid.pow(dim as u32);
    let point = |idx: usize| -> Vec<f64> {
        let mut r = idx;
        (0..dim)
            .map(|j| {
                let v = lo[j] + (r % grid) as f64 * step[j];
                r /= grid;
                v
            })
            .collect()
    };
    let mut out = Vec::new();
    for nu in harmonics {
        let g = |a: &[f64]| nu.dot(&omega(a));
        let mut points = Vec::new();
        for idx in 0..total {
            let a = point(idx);
            let ga = g(&a);
            if ga == 0.0 {
                points.push(a.clone());
                continue;
            }
            let mut r = idx;
            for j in 0..dim {
                let coord = r % grid;
                r /= grid;
                if coord + 1 == grid {
                    continue;
                }
                let mut b = a.clone();
                b[j] += step[j];
                if ga * g(&b) < 0.0 {
                    let along = |s: f64| {
                        let mut x = a.clone();
                        x[j] = s;
                        g(&x)
                    };
                    let s = brent(along, a[j], b[j], 1e-13)?;
                    let mut x = a.clone();
                    x[j] = s;
                    points.push(x);
                }
            }
        }
        if !points.is_empty() {
            out.push(ObstructionWitness { nu: nu.entries().to_vec(), points });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(a: &[f64]) -> Vec<f64> {
        a.to_vec()
    }

    #[test]
    fn no_zero_without_resonance() {
        let f = FourierSeries::cosine(2, &[1, 0], 1.0);
        let w = poincare_obstruction_scan(&f, identity, &[0.5, 0.5], &[1.5, 1.5], 4, 9).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn diagonal_locus_detected() {
        let f = FourierSeries::cosine(2, &[1, -1], 1.0).add(&FourierSeries::cosine(2, &[1, 0], 0.3));
        let w = poincare_obstruction_scan(&f, identity, &[0.5, 0.5], &[1.5, 1.5], 4, 9).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].nu, vec![1, -1]);
        assert!(w[0].points.len() >= 9);
        for p in &w[0].points {
            assert!((p[0] - p[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_perturbation_is_clean() {
        let w = poincare_obstruction_scan(&FourierSeries::new(2, 0), identity, &[0.5, 0.5], &[1.5, 1.5], 4, 5).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn isochronous_rejected() {
        let f = FourierSeries::cosine(2, &[1, -1], 1.0);
        assert!(poincare_obstruction_scan(&f, |_: &[f64]| vec![1.0, 1.0], &[0.0, 0.0], &[1.0, 1.0], 2, 3).is_err());
    }
}
