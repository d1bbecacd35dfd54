//! Lindstedt series h_ε = Σ ε^k h⁽ᵏ⁾ for the maximal invariant torus with
//! frequency ω of H = ½A² + εf(α), solving
//! (ω·∂_ψ)² h_ε(ψ) = −ε ∂_α f(ψ + h_ε(ψ)), computed by Fourier recursion or
//! by summing tree values.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde_json::json;

use crate::base::{FourierSeries, FrequencyVector, HarmonicVector, Real, VectorSeries};
use crate::error::{Error, Result};
use crate::numerics::{integrate_dense, OdeOptions};
use crate::trees::{Forest, TreeFilter};

/// Default perturbation cos(α₁ + α₂) + cos α₁.
pub fn default_perturbation() -> FourierSeries {
    FourierSeries::cosine(2, &[1, 1], 1.0).add(&FourierSeries::cosine(2, &[1, 0], 1.0))
}

/// Route used to compute the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LindstedtMethod {
    Recursion,
    Trees,
}

/// Truncated Lindstedt series: `orders[k − 1]` is h⁽ᵏ⁾.
#[derive(Debug, Clone)]
pub struct TorusSeries<T: Real = f64> {
    pub omega: FrequencyVector,
    pub f: FourierSeries,
    pub orders: Vec<VectorSeries<T>>,
}

/// Nonzero coefficients of f, checked to be real with zero mean.
pub(crate) fn perturbation_support<T: Real>(f: &FourierSeries, dim: usize) -> Result<Vec<(HarmonicVector, Complex<T>)>> {
    if f.dim() != dim {
        return Err(Error::InvalidInput(format!("perturbation on T^{} but ω has {} entries", f.dim(), dim)));
    }
    if f.mean().norm() > 1e-15 {
        return Err(Error::InvalidInput("perturbation must have zero mean".into()));
    }
    f.clone().into_real(1e-14)?;
    Ok(f.iter()
        .filter(|(nu, c)| !nu.is_zero() && !c.is_zero())
        .map(|(nu, c)| (nu.clone(), Complex::new(T::from_f64(c.re), T::from_f64(c.im))))
        .collect())
}

fn monomial<T: Real>(dim: usize, nu: &HarmonicVector, c: Complex<T>) -> FourierSeries<T> {
    let mut s = FourierSeries::new(dim, nu.norm());
    s.add_term(nu.clone(), c).expect("degree covers the monomial");
    s
}

/// Power-series coefficients E⁽ᵐ⁾ of exp(X) from those of X (X⁽⁰⁾ = 0):
/// m E⁽ᵐ⁾ = Σ_{j=1}^{m} j X⁽ʲ⁾ E⁽ᵐ⁻ʲ⁾.
pub(crate) fn exp_next<T: Real>(x: &[FourierSeries<T>], e: &[FourierSeries<T>], dim: usize, degree: usize) -> FourierSeries<T> {
    let m = e.len();
    let mut acc = FourierSeries::new(dim, degree);
    for j in 1..=m {
        if j - 1 >= x.len() {
            break;
        }
        let term = x[j - 1].mul(&e[m - j]).scale(Complex::new(T::from_i64(j as i64), T::zero()));
        acc = acc.add(&term);
    }
    acc.scale(Complex::new(T::one() / T::from_i64(m as i64), T::zero()))
}

/// Largest |mean| over the components of a vector series.
fn vector_mean(g: &VectorSeries<impl Real>) -> f64 {
    g.components.iter().map(|c| c.mean().norm_sqr().to_f64().sqrt()).fold(0.0, f64::max)
}

/// h⁽¹⁾..h⁽ᴷ⁾ by order-by-order Fourier division in precision `T`.
pub fn lindstedt_recursion<T: Real>(f: &FourierSeries, omega: &FrequencyVector, k_max: usize) -> Result<TorusSeries<T>> {
    let dim = omega.dim();
    let support = perturbation_support::<T>(f, dim)?;
    let n = f.degree().max(1);
    let mut orders: Vec<VectorSeries<T>> = Vec::with_capacity(k_max);
    // Per harmonic ν of f: X_ν⁽ʲ⁾ = iν·h⁽ʲ⁾ and E_ν⁽ᵐ⁾ = [e^{iν·h_ε}]⁽ᵐ⁾.
    let mut xs: Vec<Vec<FourierSeries<T>>> = vec![Vec::new(); support.len()];
    let mut es: Vec<Vec<FourierSeries<T>>> = vec![vec![FourierSeries::constant(dim, Complex::one())]; support.len()];
    for k in 1..=k_max {
        let m = k - 1;
        if m >= 1 {
            for (idx, (nu, _)) in support.iter().enumerate() {
                xs[idx].push(orders[m - 1].dot_imag_harmonic(nu));
                let next = exp_next(&xs[idx], &es[idx], dim, m * n);
                es[idx].push(next);
            }
        }
        // g⁽ᵐ⁾ = [∂_α f(ψ + h_ε)]⁽ᵐ⁾ = Σ_ν iν f_ν e^{iν·ψ} E_ν⁽ᵐ⁾.
        let mut g = VectorSeries::<T>::zeros(dim, k * n);
        for (idx, (nu, c)) in support.iter().enumerate() {
            let shifted = es[idx][m].mul(&monomial(dim, nu, *c));
            for (comp, &a) in g.components.iter_mut().zip(nu.entries()) {
                if a != 0 {
                    *comp = comp.add(&shifted.scale(Complex::new(T::zero(), T::from_i64(a))));
                }
            }
        }
        let scale = g.abs_sum().max(1.0);
        let mean = vector_mean(&g);
        if mean > 1e-12 * scale {
            return Err(Error::ZeroMeanObstruction { order: k, magnitude: mean });
        }
        let h = VectorSeries {
            components: g
                .components
                .iter()
                .map(|c| {
                    let mut out = c.map(|nu, z| {
                        if nu.is_zero() {
                            Complex::zero()
                        } else {
                            let d: T = omega.dot_in(nu);
                            z / (d * d)
                        }
                    });
                    out.take_mean();
                    out.with_degree(k * n)
                })
                .collect(),
        };
        orders.push(h);
    }
    Ok(TorusSeries { omega: omega.clone(), f: f.clone(), orders })
}

/// h⁽¹⁾..h⁽ᴷ⁾ as sums of tree values over trees with nonzero line currents.
///
/// A canonical tree with automorphism group Aut contributes
/// (−i(−1)^k/|Aut|) ν_root W, where W multiplies f_{ν_v}/(ω·ν(l))² over its
/// nodes and ν_{v′}·ν_v over its internal lines.
pub fn lindstedt_trees(f: &FourierSeries, omega: &FrequencyVector, k_max: usize, budget: u64) -> Result<Vec<VectorSeries<f64>>> {
    let dim = omega.dim();
    let support = perturbation_support::<f64>(f, dim)?;
    if k_max == 0 {
        return Ok(Vec::new());
    }
    let alphabet: Vec<HarmonicVector> = support.iter().map(|(nu, _)| nu.clone()).collect();
    let coeff: Vec<Complex<f64>> = support.iter().map(|(_, c)| *c).collect();
    let forest = Forest::build(&alphabet, k_max - 1, TreeFilter::NonzeroCurrents, budget)?;
    let n = f.degree().max(1);
    let subtree_value = |label: usize, children: &[u32], current: &HarmonicVector, w: &[Complex<f64>]| {
        let d = omega.dot(current);
        let mut val = coeff[label] / (d * d);
        for &c in children {
            let cl = forest.label(c as usize);
            val *= alphabet[label].dot_int(&alphabet[cl]) as f64 * w[c as usize];
        }
        val
    };
    let mut w: Vec<Complex<f64>> = Vec::with_capacity(forest.len());
    for id in 0..forest.len() {
        let v = subtree_value(forest.label(id), forest.children(id), &HarmonicVector::new(forest.current(id)), &w);
        w.push(v);
    }
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut h = VectorSeries::<f64>::zeros(dim, k * n);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut status = Ok(());
        forest.for_each(k, &mut |view| {
            if status.is_err() {
                return;
            }
            let val = subtree_value(view.label, view.children, &view.current, &w)
                * Complex::new(0.0, -sign / view.aut as f64);
            for (comp, &a) in h.components.iter_mut().zip(alphabet[view.label].entries()) {
                if a != 0 {
                    if let Err(e) = comp.add_term(view.current.clone(), val * a as f64) {
                        status = Err(e);
                    }
                }
            }
        })?;
        status?;
        out.push(h);
    }
    Ok(out)
}

/// B = F N² 2^{Σ_n 8n 2^{−n/τ}} with F = C² max|f_ν|, the per-order tree bound constant.
pub fn tree_bound_constant(f: &FourierSeries, omega: &FrequencyVector) -> Result<f64> {
    let dio = omega.diophantine.ok_or_else(|| Error::InvalidInput("bound needs Diophantine constants".into()))?;
    let fmax = f.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
    let n = f.degree() as f64;
    let exponent: f64 = (1..2000).map(|k| 8.0 * k as f64 * 2f64.powf(-(k as f64) / dio.tau)).sum();
    Ok(dio.c * dio.c * fmax * n * n * 2f64.powf(exponent))
}

/// Largest |Val(θ)|·k!/B^k over restricted trees of order ≤ `k_max`, where
/// Val(θ) is the value of one labeled tree along a coordinate axis.
pub fn max_tree_bound_ratio(f: &FourierSeries, omega: &FrequencyVector, k_max: usize, budget: u64) -> Result<f64> {
    let b = tree_bound_constant(f, omega)?;
    let support = perturbation_support::<f64>(f, omega.dim())?;
    if k_max == 0 {
        return Ok(0.0);
    }
    let alphabet: Vec<HarmonicVector> = support.iter().map(|(nu, _)| nu.clone()).collect();
    let coeff: Vec<f64> = support.iter().map(|(_, c)| c.norm()).collect();
    let forest = Forest::build(&alphabet, k_max - 1, TreeFilter::Restricted, budget)?;
    let subtree = |label: usize, children: &[u32], current: &HarmonicVector, w: &[f64]| {
        let d = omega.dot(current);
        let mut val = coeff[label] / (d * d);
        for &c in children {
            val *= (alphabet[label].dot_int(&alphabet[forest.label(c as usize)]) as f64).abs() * w[c as usize];
        }
        val
    };
    let mut w: Vec<f64> = Vec::with_capacity(forest.len());
    for id in 0..forest.len() {
        let v = subtree(forest.label(id), forest.children(id), &HarmonicVector::new(forest.current(id)), &w);
        w.push(v);
    }
    let mut worst: f64 = 0.0;
    for k in 1..=k_max {
        let bk = b.powi(k as i32);
        forest.for_each(k, &mut |view| {
            let top = alphabet[view.label].entries().iter().map(|a| a.abs()).max().unwrap_or(0) as f64;
            worst = worst.max(top * subtree(view.label, view.children, &view.current, &w) / bk);
        })?;
    }
    Ok(worst)
}

/// h⁽ᵏ⁾ by the chosen route.
pub fn lindstedt_coefficient(
    f: &FourierSeries,
    omega: &FrequencyVector,
    k: usize,
    method: LindstedtMethod,
    budget: u64,
) -> Result<VectorSeries<f64>> {
    if k == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    match method {
        LindstedtMethod::Recursion => Ok(lindstedt_recursion::<f64>(f, omega, k)?.orders.pop().expect("k ≥ 1 orders")),
        LindstedtMethod::Trees => Ok(lindstedt_trees(f, omega, k, budget)?.pop().expect("k ≥ 1 orders")),
    }
}

/// e^{inψ_j} for |n| ≤ degree, used to evaluate series at one point.
pub(crate) struct PhaseTable<T: Real> {
    degree: i64,
    rows: Vec<Vec<Complex<T>>>,
}

impl<T: Real> PhaseTable<T> {
    pub(crate) fn new(psi: &[T], degree: usize) -> Self {
        let d = degree as i64;
        let rows = psi
            .iter()
            .map(|&x| {
                let (s, c) = x.sin_cos();
                let z = Complex::new(c, s);
                let zc = z.conj();
                let mut row = vec![Complex::one(); (2 * d + 1) as usize];
                for n in 1..=d as usize {
                    row[d as usize + n] = row[d as usize + n - 1] * z;
                    row[d as usize - n] = row[d as usize - n + 1] * zc;
                }
                row
            })
            .collect();
        PhaseTable { degree: d, rows }
    }

    pub(crate) fn phase(&self, nu: &HarmonicVector) -> Complex<T> {
        let mut z = Complex::one();
        for (row, &a) in self.rows.iter().zip(nu.entries()) {
            z = z * row[(self.degree + a) as usize];
        }
        z
    }

    pub(crate) fn eval(&self, s: &FourierSeries<T>) -> Complex<T> {
        let mut acc = Complex::zero();
        for (nu, c) in s.iter() {
            acc = acc + *c * self.phase(nu);
        }
        acc
    }
}

impl<T: Real> TorusSeries<T> {
    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn order(&self) -> usize {
        self.orders.len()
    }

    fn omega_t(&self) -> Vec<T> {
        self.omega.omega.iter().map(|&w| T::from_f64(w)).collect()
    }

    /// h_ε = Σ_k ε^k h⁽ᵏ⁾ as one series.
    pub fn summed(&self, eps: T) -> VectorSeries<T> {
        let mut acc = VectorSeries::zeros(self.dim(), 0);
        let mut p = T::one();
        for h in &self.orders {
            p *= eps;
            acc = acc.add(&h.scale_real(p));
        }
        acc
    }

    /// (ω·∂_ψ) h_ε.
    pub fn summed_derivative(&self, eps: T) -> VectorSeries<T> {
        self.summed(eps).derivative(&self.omega_t())
    }

    /// Truncation degree needed to evaluate the summed series.
    pub fn degree(&self) -> usize {
        self.orders.iter().map(|h| h.support_norm()).max().unwrap_or(0).max(1)
    }

    /// Largest |ν=0 coefficient| over orders and components.
    pub fn max_mean(&self) -> f64 {
        self.orders.iter().map(vector_mean).fold(0.0, f64::max)
    }

    /// max over orders of the largest imaginary part of h⁽ᵏ⁾ on a grid, relative to Σ|coefficients|.
    pub fn reality_defect(&self, grid: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for h in &self.orders {
            let scale = h.abs_sum().max(f64::MIN_POSITIVE);
            for_grid(self.dim(), grid, |psi: &[f64]| {
                let pt: Vec<T> = psi.iter().map(|&x| T::from_f64(x)).collect();
                let table = PhaseTable::new(&pt, h.support_norm().max(1));
                for c in &h.components {
                    worst = worst.max(table.eval(c).im.to_f64().abs() / scale);
                }
            });
        }
        worst
    }
}

/// Calls `visit` on the uniform grid of `n` points per axis of T^dim.
pub(crate) fn for_grid<F: FnMut(&[f64])>(dim: usize, n: usize, mut visit: F) {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let total = n.pow(dim as u32);
    let mut psi = vec![0.0; dim];
    for idx in 0..total {
        let mut r = idx;
        for p in psi.iter_mut() {
            *p = (r % n) as f64 * step + 0.1;
            r /= n;
        }
        visit(&psi);
    }
}

/// max over a grid of |(ω·∂_ψ)² h_ε(ψ) + ε ∂_α f(ψ + h_ε(ψ))| with the truncated series.
pub fn torus_residual<T: Real>(series: &TorusSeries<T>, eps: T, grid: usize) -> Result<f64> {
    let dim = series.dim();
    let support = perturbation_support::<T>(&series.f, dim)?;
    let h = series.summed(eps);
    let d2h = series.summed_derivative(eps).derivative(&series.omega_t());
    let degree = series.degree();
    let mut worst: f64 = 0.0;
    for_grid(dim, grid, |psi| {
        let pt: Vec<T> = psi.iter().map(|&x| T::from_f64(x)).collect();
        let table = PhaseTable::new(&pt, degree);
        let hv: Vec<T> = h.components.iter().map(|c| table.eval(c).re).collect();
        let lhs: Vec<T> = d2h.components.iter().map(|c| table.eval(c).re).collect();
        let moved: Vec<T> = pt.iter().zip(&hv).map(|(a, b)| *a + *b).collect();
        let mut rhs = vec![T::zero(); dim];
        for (nu, c) in &support {
            let (s, co) = nu.dot(&moved).sin_cos();
            // Re(i f_ν e^{iν·α}) = −(Re f_ν sin + Im f_ν cos).
            let re = -(c.re * s + c.im * co);
            for (r, &a) in rhs.iter_mut().zip(nu.entries()) {
                *r += T::from_i64(a) * re;
            }
        }
        for (l, r) in lhs.iter().zip(&rhs) {
            worst = worst.max((*l + eps * *r).abs().to_f64());
        }
    });
    Ok(worst)
}

/// Residual ratio r(2ε)/r(ε); close to 2^{K+1} when truncation dominates.
pub fn residual_doubling_ratio<T: Real>(series: &TorusSeries<T>, eps: T, grid: usize) -> Result<f64> {
    let r1 = torus_residual(series, eps, grid)?;
    let r2 = torus_residual(series, eps + eps, grid)?;
    Ok(r2 / r1)
}

/// Deviation of the true flow from the parametrized torus motion.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FlowReport {
    pub eps: f64,
    pub order: usize,
    pub max_deviation: f64,
    /// (t, deviation) at each sample.
    pub samples: Vec<(f64, f64)>,
}

impl FlowReport {
    /// Least-squares slope of log(deviation) against log(t) for t ≥ `t_min`.
    pub fn growth_exponent(&self, t_min: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> =
            self.samples.iter().filter(|(t, d)| *t >= t_min && *d > 0.0).map(|(t, d)| (t.ln(), d.ln())).collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

/// Integrates H = ½A² + εf(α) from the torus point over ψ₀ and compares with
/// (A, α) = (ω + Dh_ε(ψ), ψ + h_ε(ψ)) at ψ = ψ₀ + ωt.
pub fn verify_torus_flow(series: &TorusSeries<f64>, eps: f64, psi0: &[f64], t_final: f64, dt_out: f64) -> Result<FlowReport> {
    let dim = series.dim();
    if psi0.len() != dim {
        return Err(Error::InvalidInput("ψ₀ has the wrong dimension".into()));
    }
    let support = perturbation_support::<f64>(&series.f, dim)?;
    let h = series.summed(eps);
    let dh = series.summed_derivative(eps);
    let degree = series.degree();
    let omega = series.omega.omega.clone();
    let on_torus = |psi: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let table = PhaseTable::new(psi, degree);
        let a: Vec<f64> = dh.components.iter().zip(&omega).map(|(c, w)| w + table.eval(c).re).collect();
        let alpha: Vec<f64> = h.components.iter().zip(psi).map(|(c, p)| p + table.eval(c).re).collect();
        (a, alpha)
    };
    let (a0, alpha0) = on_torus(psi0);
    let y0: Vec<f64> = a0.iter().chain(&alpha0).copied().collect();
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let (a, alpha) = y.split_at(dim);
        dy[dim..].copy_from_slice(a);
        dy[..dim].iter_mut().for_each(|v| *v = 0.0);
        for (nu, c) in &support {
            let (s, co) = nu.dot(alpha).sin_cos();
            let re = -(c.re * s + c.im * co);
            for (d, &k) in dy[..dim].iter_mut().zip(nu.entries()) {
                *d -= eps * k as f64 * re;
            }
        }
    };
    let traj = integrate_dense(rhs, 0.0, &y0, t_final, dt_out, OdeOptions::tight())?;
    let mut report = FlowReport { eps, order: series.order(), max_deviation: 0.0, samples: Vec::new() };
    for (t, y) in traj.t.iter().zip(&traj.y) {
        let psi: Vec<f64> = psi0.iter().zip(&omega).map(|(p, w)| p + w * t).collect();
        let (a, alpha) = on_torus(&psi);
        let dev = a
            .iter()
            .chain(&alpha)
            .zip(y)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        report.max_deviation = report.max_deviation.max(dev);
        report.samples.push((*t, dev));
    }
    Ok(report)
}

impl TorusSeries<f64> {
    /// {"omega": [...], "K": K, "orders": [[{nu, re, im}, ...], ...]}.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "omega": self.omega.omega,
            "K": self.order(),
            "orders": self.orders.iter().map(|h| h.to_records()).collect::<Vec<_>>(),
        })
    }
}

/// CSV rows `eps,K,residual`.
pub fn residual_csv(rows: &[(f64, usize, f64)]) -> String {
    let mut out = String::from("eps,K,residual\n");
    for (e, k, r) in rows {
        out.push_str(&format!("{e:.6e},{k},{r:.6e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{golden_frequency, DoubleDouble, GOLDEN};

    fn single_cos() -> FourierSeries {
        FourierSeries::cosine(2, &[1, 1], 1.0)
    }

    #[test]
    fn first_order_coefficient() {
        let h = lindstedt_coefficient(&single_cos(), &golden_frequency(), 1, LindstedtMethod::Recursion, 0).unwrap();
        let c = h.coeff(&HarmonicVector::new(&[1, 1]));
        let expect = 0.5 / (1.0 + GOLDEN).powi(2);
        for z in c {
            assert!(z.re.abs() < 1e-16 && (z.im - expect).abs() < 1e-16);
        }
        assert!((expect - 0.07295).abs() < 1e-5);
    }

    #[test]
    fn recursion_equals_trees() {
        let omega = golden_frequency();
        let other = FourierSeries::cosine(2, &[1, -1], 0.7).add(&FourierSeries::sine(2, &[0, 1], 0.4));
        for f in [default_perturbation(), other] {
            let rec = lindstedt_recursion::<f64>(&f, &omega, 6).unwrap();
            let trees = lindstedt_trees(&f, &omega, 6, u64::MAX).unwrap();
            for (k, (a, b)) in rec.orders.iter().zip(&trees).enumerate() {
                let scale = a.abs_sum();
                assert!(a.max_diff(b) <= 1e-12 * scale, "order {} diff {}", k + 1, a.max_diff(b));
            }
        }
    }

    #[test]
    fn means_vanish_and_support_grows_linearly() {
        let f = default_perturbation();
        let s = lindstedt_recursion::<f64>(&f, &golden_frequency(), 6).unwrap();
        assert_eq!(s.max_mean(), 0.0);
        for (k, h) in s.orders.iter().enumerate() {
            assert!(h.support_norm() <= (k + 1) * f.degree());
        }
        assert!(s.reality_defect(8) <= 1e-13);
    }

    #[test]
    fn zero_eps_residual_is_zero() {
        let s = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), 3).unwrap();
        assert_eq!(torus_residual(&s, 0.0, 8).unwrap(), 0.0);
    }

    #[test]
    fn residual_scales_with_order() {
        let s = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), 4).unwrap();
        let ratio = residual_doubling_ratio(&s, 1e-3, 12).unwrap();
        assert!((0.75 * 32.0..=1.25 * 32.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn double_double_residual_floor() {
        let s = lindstedt_recursion::<DoubleDouble>(&default_perturbation(), &golden_frequency(), 8).unwrap();
        let r = torus_residual(&s, DoubleDouble::from_f64(1e-3), 8).unwrap();
        assert!(r <= 1e-20, "{r}");
        let ratio = residual_doubling_ratio(&s, DoubleDouble::from_f64(1e-3), 8).unwrap();
        assert!((0.75 * 512.0..=1.25 * 512.0).contains(&ratio), "{ratio} {r}");
    }

    #[test]
    fn flow_stays_on_torus() {
        let s = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), 8).unwrap();
        let rep = verify_torus_flow(&s, 1e-3, &[0.3, -1.2], 10.0, 0.5).unwrap();
        assert!(rep.max_deviation <= 1e-8, "{}", rep.max_deviation);
        let free = verify_torus_flow(&s, 0.0, &[0.3, -1.2], 10.0, 0.5).unwrap();
        assert!(free.max_deviation <= 1e-11);
    }

    #[test]
    fn flow_deviation_grows_linearly() {
        let s = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), 1).unwrap();
        let rep = verify_torus_flow(&s, 1e-2, &[0.3, -1.2], 10.0, 0.25).unwrap();
        let p = rep.growth_exponent(1.0).unwrap();
        assert!(p <= 1.2, "{p}");
    }

    #[test]
    fn restricted_trees_respect_the_bound() {
        let omega = golden_frequency();
        let b = tree_bound_constant(&default_perturbation(), &omega).unwrap();
        assert!((b - 2.5 * 4.0 * 65536.0).abs() < 1e-6);
        assert!(max_tree_bound_ratio(&default_perturbation(), &omega, 6, u64::MAX).unwrap() <= 1.0);
    }

    #[test]
    fn json_shape() {
        let s = lindstedt_recursion::<f64>(&single_cos(), &golden_frequency(), 2).unwrap();
        let v = s.to_json();
        assert_eq!(v["K"], 2);
        assert_eq!(v["orders"].as_array().unwrap().len(), 2);
    }
}
