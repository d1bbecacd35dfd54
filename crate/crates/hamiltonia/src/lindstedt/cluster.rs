//! Scale-0 cluster matrices M⁽⁰⁾(ν) and the resummed line propagator.
//!
//! A cluster is a connected set of nodes joined by scale-0 lines
//! (C|ω·ν(l)| > 1) whose harmonics sum to zero, entered by a line of
//! momentum ν at v_in and left at v_out.  Its value is
//! ε^k ν_out ν_inᵀ Π(−f_{ν_v}) Π (ν_v·ν_v′)/(ω·ν(l))² with the tree
//! symmetry weights.  Summing all of them gives the zero mode of
//! K + K G_ν K + K G_ν K G_ν K + …, where K = ε∂²_α f(ψ + u⁰(ψ)) is built from
//! the scale-0 torus u⁰ and G_ν puts 1/(ω·(ν+μ))² on the scale-0 momenta
//! ν + μ with μ ≠ 0.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde_json::json;

use super::series::{exp_next, perturbation_support};
use crate::base::{FourierSeries, FrequencyVector, HarmonicVector};
use crate::error::{Error, Result};

type MatrixSeries = Vec<Vec<FourierSeries>>;

/// ℓ×ℓ complex matrix.
pub type CMatrix = DMatrix<Complex<f64>>;

/// True when C|ω·μ| > 1, i.e. μ is a scale-0 momentum.
pub fn is_scale_zero(omega: &FrequencyVector, c: f64, mu: &HarmonicVector) -> bool {
    !mu.is_zero() && c * omega.dot(mu).abs() > 1.0
}

/// Order-by-order kernel K⁽ʲ⁾(ψ) = [ε∂²_α f(ψ + u⁰(ψ))]⁽ʲ⁾, j = 1..k_max.
#[derive(Debug, Clone)]
pub struct ClusterKernel {
    pub omega: FrequencyVector,
    pub c: f64,
    pub k_max: usize,
    kernel: Vec<MatrixSeries>,
}

fn mat_zero(dim: usize, degree: usize) -> MatrixSeries {
    vec![vec![FourierSeries::new(dim, degree); dim]; dim]
}

fn mat_mul(a: &MatrixSeries, b: &MatrixSeries, dim: usize, degree: usize) -> MatrixSeries {
    let mut out = mat_zero(dim, degree);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                if a[i][k].is_empty() || b[k][j].is_empty() {
                    continue;
                }
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

impl ClusterKernel {
    /// Builds the scale-0 torus u⁰ to order k_max − 1 and the kernels.
    pub fn build(f: &FourierSeries, omega: &FrequencyVector, c: f64, k_max: usize, budget: u64) -> Result<Self> {
        let dim = omega.dim();
        let support = perturbation_support::<f64>(f, dim)?;
        let n = f.degree().max(1);
        let estimate = (k_max * dim * dim) as f64 * ((2 * k_max * n + 1) as f64).powi(dim as i32);
        if estimate > budget as f64 {
            return Err(Error::BudgetExceeded(format!("cluster kernel needs about {estimate:.0} coefficients")));
        }
        let mut xs: Vec<Vec<FourierSeries>> = vec![Vec::new(); support.len()];
        let mut es: Vec<Vec<FourierSeries>> = vec![vec![FourierSeries::constant(dim, Complex::one())]; support.len()];
        let mut torus: Vec<crate::base::VectorSeries<f64>> = Vec::new();
        let mut kernel = Vec::with_capacity(k_max);
        for j in 1..=k_max {
            let m = j - 1;
            if m >= 1 {
                for (idx, (nu, _)) in support.iter().enumerate() {
                    xs[idx].push(torus[m - 1].dot_imag_harmonic(nu));
                    let next = exp_next(&xs[idx], &es[idx], dim, m * n);
                    es[idx].push(next);
                }
            }
            let mut kj = mat_zero(dim, j * n);
            let mut g = crate::base::VectorSeries::<f64>::zeros(dim, j * n);
            for (idx, (nu, coef)) in support.iter().enumerate() {
                let mut mono = FourierSeries::new(dim, nu.norm());
                mono.add_term(nu.clone(), *coef)?;
                let shifted = es[idx][m].mul(&mono);
                let e = nu.entries();
                for a in 0..dim {
                    if e[a] == 0 {
                        continue;
                    }
                    g.components[a] = g.components[a].add(&shifted.scale(Complex::new(0.0, e[a] as f64)));
                    for b in 0..dim {
                        if e[b] != 0 {
                            kj[a][b] = kj[a][b].add(&shifted.scale(Complex::new(-(e[a] * e[b]) as f64, 0.0)));
                        }
                    }
                }
            }
            kernel.push(kj);
            let u = crate::base::VectorSeries {
                components: g
                    .components
                    .iter()
                    .map(|comp| {
                        comp.map(|mu, z| {
                            if is_scale_zero(omega, c, mu) {
                                let d = omega.dot(mu);
                                z / (d * d)
                            } else {
                                Complex::zero()
                            }
                        })
                    })
                    .collect(),
            };
            torus.push(u);
        }
        Ok(ClusterKernel { omega: omega.clone(), c, k_max, kernel })
    }

    fn propagate(&self, nu: &HarmonicVector, z: &MatrixSeries) -> MatrixSeries {
        z.iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        s.map(|mu, v| {
                            let cur = nu + mu;
                            if mu.is_zero() || !is_scale_zero(&self.omega, self.c, &cur) {
                                Complex::zero()
                            } else {
                                let d = self.omega.dot(&cur);
                                v / (d * d)
                            }
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Cluster matrix for the entering momentum ν.
    pub fn matrix(&self, nu: &HarmonicVector) -> Result<ClusterMatrix> {
        let dim = self.omega.dim();
        if nu.dim() != dim || nu.is_zero() {
            return Err(Error::InvalidInput("ν must be a nonzero harmonic of the torus dimension".into()));
        }
        let mut sums: Vec<MatrixSeries> = Vec::with_capacity(self.k_max);
        let mut per_order = Vec::with_capacity(self.k_max);
        for k in 1..=self.k_max {
            let degree = self.kernel[k - 1][0][0].degree();
            let mut s = self.kernel[k - 1].clone();
            for j in 1..k {
                let prod = mat_mul(&self.kernel[j - 1], &self.propagate(nu, &sums[k - j - 1]), dim, degree);
                for a in 0..dim {
                    for b in 0..dim {
                        s[a][b] = s[a][b].add(&prod[a][b]);
                    }
                }
            }
            per_order.push(CMatrix::from_fn(dim, dim, |a, b| s[a][b].mean()));
            sums.push(s);
        }
        Ok(ClusterMatrix { nu: nu.entries().to_vec(), k_max: self.k_max, per_order })
    }
}

/// M⁽⁰⁾(ν; ε) = Σ_k ε^k `per_order[k − 1]`.
#[derive(Debug, Clone)]
pub struct ClusterMatrix {
    pub nu: Vec<i64>,
    pub k_max: usize,
    pub per_order: Vec<CMatrix>,
}

impl ClusterMatrix {
    pub fn value(&self, eps: f64) -> CMatrix {
        let dim = self.nu.len();
        let mut acc = CMatrix::zeros(dim, dim);
        let mut p = 1.0;
        for m in &self.per_order {
            p *= eps;
            acc += m * Complex::new(p, 0.0);
        }
        acc
    }

    /// Largest entry of the order-ε coefficient.
    pub fn first_order_norm(&self) -> f64 {
        self.per_order.first().map_or(0.0, |m| m.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Largest entry of M − M†, over orders.
    pub fn hermiticity_defect(&self) -> f64 {
        self.per_order.iter().map(|m| (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "nu": self.nu,
            "k_max": self.k_max,
            "per_order": self.per_order.iter().map(|m| {
                (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>()).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }
}

/// Cluster matrix through order `k_max` for one ν.
pub fn cluster_matrix(
    f: &FourierSeries,
    omega: &FrequencyVector,
    c: f64,
    nu: &HarmonicVector,
    k_max: usize,
    budget: u64,
) -> Result<ClusterMatrix> {
    ClusterKernel::build(f, omega, c, k_max, budget)?.matrix(nu)
}

fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().max()
}

/// ((ω·ν)² I − M)⁻¹.
pub fn resummed_propagator(divisor: f64, m: &CMatrix) -> Result<CMatrix> {
    let d2 = divisor * divisor;
    let ratio = spectral_norm(m) / d2;
    if !(ratio < 1.0) {
        return Err(Error::ResummationDiverges(ratio));
    }
    let dim = m.nrows();
    let a = CMatrix::identity(dim, dim) * Complex::new(d2, 0.0) - m;
    a.try_inverse().ok_or(Error::ResummationDiverges(ratio))
}

/// Σ_{k=0}^{terms−1} (M/(ω·ν)²)^k/(ω·ν)².
pub fn geometric_propagator(divisor: f64, m: &CMatrix, terms: usize) -> CMatrix {
    let d2 = Complex::new(divisor * divisor, 0.0);
    let dim = m.nrows();
    let step = m / d2;
    let mut power = CMatrix::identity(dim, dim);
    let mut acc = CMatrix::zeros(dim, dim);
    for _ in 0..terms {
        acc += &power;
        power = &power * &step;
    }
    acc / d2
}

/// Largest entry of resummed − geometric relative to the largest entry of the resummed propagator.
pub fn resummation_gap(divisor: f64, m: &CMatrix, terms: usize) -> Result<f64> {
    let r = resummed_propagator(divisor, m)?;
    let g = geometric_propagator(divisor, m, terms);
    let scale = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((r - g).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale)
}

/// One row of the small-divisor probe.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DivisorProbe {
    pub nu: Vec<i64>,
    pub divisor: f64,
    /// ‖M⁽⁰⁾(ν; ε)‖/(ε²(ω·ν)²).
    pub ratio: f64,
}

/// The `count` harmonics 0 < |ν| ≤ `n_max` (one of ±ν) with the smallest |ω·ν|.
pub fn smallest_divisors(omega: &FrequencyVector, n_max: usize, count: usize) -> Vec<HarmonicVector> {
    let mut all: Vec<(f64, HarmonicVector)> = HarmonicVector::ball(omega.dim(), n_max)
        .into_iter()
        .filter(|nu| nu.entries().iter().find(|&&a| a != 0).is_some_and(|&a| a > 0))
        .map(|nu| (omega.dot(&nu).abs(), nu))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    all.into_iter().take(count).map(|(_, nu)| nu).collect()
}

/// ‖M⁽⁰⁾(ν; ε)‖/(ε²(ω·ν)²) over the smallest divisors.
pub fn divisor_probe(kernel: &ClusterKernel, eps: f64, n_max: usize, count: usize) -> Result<Vec<DivisorProbe>> {
    smallest_divisors(&kernel.omega, n_max, count)
        .iter()
        .map(|nu| {
            let m = kernel.matrix(nu)?.value(eps);
            let d = kernel.omega.dot(nu);
            Ok(DivisorProbe { nu: nu.entries().to_vec(), divisor: d, ratio: spectral_norm(&m) / (eps * eps * d * d) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::golden_frequency;

    fn two_cos() -> FourierSeries {
        FourierSeries::cosine(2, &[1, 1], 1.0).add(&FourierSeries::cosine(2, &[1, -1], 1.0))
    }

    fn c() -> f64 {
        5f64.sqrt()
    }

    /// Two-node clusters written out by hand: a chain v_out → v_in through the
    /// momentum ν + μ, and a single path node with one off-path leaf.
    fn order_two_by_hand(f: &FourierSeries, omega: &FrequencyVector, nu: &HarmonicVector) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        for (mu, fm) in f.iter() {
            let e = mu.entries();
            let outer = CMatrix::from_fn(2, 2, |a, b| Complex::new((e[a] * e[b]) as f64, 0.0));
            let n2 = mu.dot_int(mu) as f64;
            let fneg = f.coeff(&-mu);
            let chain = nu + mu;
            if is_scale_zero(omega, c(), &chain) {
                let d = omega.dot(&chain);
                m += &outer * (fneg * *fm * n2 / (d * d));
            }
            if is_scale_zero(omega, c(), mu) {
                let d = omega.dot(mu);
                m -= &outer * (fneg * *fm * n2 / (d * d));
            }
        }
        m
    }

    #[test]
    fn first_order_vanishes() {
        let m = cluster_matrix(&two_cos(), &golden_frequency(), c(), &HarmonicVector::new(&[1, 0]), 3, u64::MAX).unwrap();
        assert!(m.first_order_norm() <= 1e-14);
    }

    #[test]
    fn second_order_matches_hand_sum() {
        let omega = golden_frequency();
        let kernel = ClusterKernel::build(&two_cos(), &omega, c(), 2, u64::MAX).unwrap();
        for nu in [[1, 0], [0, 1], [2, -1], [3, -2]] {
            let nu = HarmonicVector::new(&nu);
            let m = kernel.matrix(&nu).unwrap();
            let hand = order_two_by_hand(&two_cos(), &omega, &nu);
            let gap = (&m.per_order[1] - &hand).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(gap < 1e-13, "{nu:?} {gap}");
        }
    }

    #[test]
    fn matrices_are_hermitian() {
        let kernel = ClusterKernel::build(&super::super::default_perturbation(), &golden_frequency(), c(), 4, u64::MAX).unwrap();
        let m = kernel.matrix(&HarmonicVector::new(&[2, -1])).unwrap();
        assert!(m.hermiticity_defect() < 1e-10 * m.per_order[3].norm().max(1.0), "{}", m.hermiticity_defect());
    }

    #[test]
    fn zero_matrix_propagator() {
        let p = resummed_propagator(0.5, &CMatrix::zeros(2, 2)).unwrap();
        assert!((p - CMatrix::identity(2, 2) * Complex::new(4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn scalar_geometric_sums() {
        let m = CMatrix::from_element(1, 1, Complex::new(0.3, 0.0));
        let d = 1.0;
        let exact = 1.0 / (1.0 - 0.3);
        for terms in [1, 5, 10, 20] {
            let g = geometric_propagator(d, &m, terms)[(0, 0)].re;
            assert!(((exact - g) - 0.3f64.powi(terms as i32) * exact).abs() < 1e-14);
        }
        assert!(matches!(
            resummed_propagator(0.5, &CMatrix::from_element(1, 1, Complex::new(0.3, 0.0))),
            Err(Error::ResummationDiverges(_))
        ));
    }

    #[test]
    fn thirring_resummation_matches_geometric_sum() {
        let omega = golden_frequency();
        let kernel = ClusterKernel::build(&super::super::default_perturbation(), &omega, c(), 4, u64::MAX).unwrap();
        for nu in smallest_divisors(&omega, 30, 20) {
            let m = kernel.matrix(&nu).unwrap().value(1e-3);
            assert!(resummation_gap(omega.dot(&nu), &m, 10).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn small_divisor_ratios_stay_bounded() {
        let kernel = ClusterKernel::build(&super::super::default_perturbation(), &golden_frequency(), c(), 4, u64::MAX).unwrap();
        let probe = divisor_probe(&kernel, 1e-3, 30, 20).unwrap();
        assert_eq!(probe.len(), 20);
        let low = ClusterKernel::build(&super::super::default_perturbation(), &golden_frequency(), c(), 2, u64::MAX).unwrap();
        let coarse = divisor_probe(&low, 1e-3, 30, 20).unwrap();
        for (p, q) in probe.iter().zip(&coarse) {
            assert!(p.ratio.is_finite() && p.ratio < 1e3, "{p:?}");
            assert!((p.ratio - q.ratio).abs() <= 1e-4 * p.ratio, "{p:?} {q:?}");
        }
    }
}
