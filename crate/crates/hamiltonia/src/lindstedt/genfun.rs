//! Generating function of a Lindstedt torus: with D = ω·∂_ψ,
//! F(A, ψ) = G(ψ) + a·ψ + h·(A − ω − Dh), where
//! ∂_ψG = −Dh + (∂_ψDh)ᵀh − a and a is the ψ-average of (∂_ψDh)ᵀh.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::series::{for_grid, PhaseTable, TorusSeries};
use crate::base::{FourierSeries, VectorSeries};
use crate::error::{Error, Result};

/// Largest accepted mixed-partial asymmetry of the one-form.
pub const CLOSURE_TOL: f64 = 1e-8;

/// G, a and the checks performed while building them.
#[derive(Debug, Clone)]
pub struct TorusGeneratingFunction {
    pub eps: f64,
    pub g: FourierSeries,
    /// a from the average of (∂_ψDh)ᵀh.
    pub a: Vec<f64>,
    /// a from the average of −Dh + (∂_ψDh)ᵀh.
    pub a_alt: Vec<f64>,
    /// max over the grid of |∂_k w_j − ∂_j w_k|.
    pub closure_residual: f64,
    /// max over the grid of |A′ − ω| at the torus points A = ω + Dh(ψ).
    pub torus_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingFunctionSummary {
    pub eps: f64,
    pub a: Vec<f64>,
    pub a_alt: Vec<f64>,
    pub closure_residual: f64,
    pub torus_defect: f64,
    pub coefficients: usize,
}

fn unit(dim: usize, j: usize) -> Vec<f64> {
    (0..dim).map(|i| if i == j { 1.0 } else { 0.0 }).collect()
}

/// Σ_i h_i ∂_j(Dh_i), one series per j.
fn pulled_back(h: &VectorSeries<f64>, dh: &VectorSeries<f64>) -> Vec<FourierSeries> {
    let dim = h.components.len();
    (0..dim)
        .map(|j| {
            let e = unit(dim, j);
            let mut acc = FourierSeries::new(dim, 0);
            for i in 0..dim {
                acc = acc.add(&h.components[i].mul(&dh.components[i].derivative(&e)));
            }
            acc
        })
        .collect()
}

/// Builds G on the torus of `series` at ε, checking closedness on a grid of `grid` points per axis.
pub fn torus_generating_function(series: &TorusSeries<f64>, eps: f64, grid: usize) -> Result<TorusGeneratingFunction> {
    let dim = series.dim();
    let h = series.summed(eps);
    let dh = series.summed_derivative(eps);
    let q = pulled_back(&h, &dh);
    let mut w: Vec<FourierSeries> = q.iter().zip(&dh.components).map(|(qj, dj)| qj.sub(dj)).collect();
    let a: Vec<f64> = q.iter().map(|s| s.mean().re).collect();
    let a_alt: Vec<f64> = w.iter().map(|s| s.mean().re).collect();
    for wj in w.iter_mut() {
        wj.take_mean();
    }
    let degree = w.iter().map(|s| s.support_norm()).max().unwrap_or(0).max(1);
    let mut curls = Vec::new();
    for j in 0..dim {
        for k in j + 1..dim {
            curls.push(w[j].derivative(&unit(dim, k)).sub(&w[k].derivative(&unit(dim, j))));
        }
    }
    let mut closure_residual: f64 = 0.0;
    for_grid(dim, grid, |psi| {
        let table = PhaseTable::new(psi, degree);
        for c in &curls {
            closure_residual = closure_residual.max(table.eval(c).norm());
        }
    });
    if closure_residual > CLOSURE_TOL {
        return Err(Error::NotClosed(closure_residual));
    }
    let mut g = FourierSeries::new(dim, degree);
    let mut keys: Vec<_> = w.iter().flat_map(|s| s.iter().map(|(nu, _)| nu.clone())).collect();
    keys.sort();
    keys.dedup();
    for nu in keys {
        let (j, &nj) = nu.entries().iter().enumerate().max_by_key(|(_, v)| v.abs()).expect("nonzero harmonic");
        g.add_term(nu.clone(), w[j].coeff(&nu) / Complex::new(0.0, nj as f64))?;
    }
    let grad_g: Vec<FourierSeries> = (0..dim).map(|j| g.derivative(&unit(dim, j))).collect();
    let mut torus_defect: f64 = 0.0;
    let table_degree = degree.max(h.support_norm()).max(1);
    for_grid(dim, grid, |psi| {
        let table = PhaseTable::new(psi, table_degree);
        for j in 0..dim {
            // On the torus A − ω − Dh = 0, so A′_j = ω_j + Dh_j + ∂_jG + a_j − Σ_i h_i ∂_j Dh_i.
            let val = table.eval(&dh.components[j]).re + table.eval(&grad_g[j]).re + a[j] - table.eval(&q[j]).re;
            torus_defect = torus_defect.max(val.abs());
        }
    });
    Ok(TorusGeneratingFunction { eps, g, a, a_alt, closure_residual, torus_defect })
}

impl TorusGeneratingFunction {
    pub fn summary(&self) -> GeneratingFunctionSummary {
        GeneratingFunctionSummary {
            eps: self.eps,
            a: self.a.clone(),
            a_alt: self.a_alt.clone(),
            closure_residual: self.closure_residual,
            torus_defect: self.torus_defect,
            coefficients: self.g.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::golden_frequency;
    use crate::lindstedt::{default_perturbation, lindstedt_recursion};

    #[test]
    fn zero_eps_is_trivial() {
        let s = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), 3).unwrap();
        let gf = torus_generating_function(&s, 0.0, 8).unwrap();
        assert!(gf.g.is_empty());
        assert!(gf.a.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn golden_torus_form_is_closed() {
        let s = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), 8).unwrap();
        let gf = torus_generating_function(&s, 1e-3, 16).unwrap();
        assert!(gf.closure_residual <= 1e-8);
        assert!(gf.torus_defect <= 1e-12, "{}", gf.torus_defect);
        for (x, y) in gf.a.iter().zip(&gf.a_alt) {
            assert!((x - y).abs() < 1e-18);
        }
    }

    #[test]
    fn low_order_at_large_eps_is_not_closed() {
        let s = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), 1).unwrap();
        assert!(matches!(torus_generating_function(&s, 0.3, 12), Err(Error::NotClosed(_))));
    }
}
