//! Lindstedt series for a resonant torus of H = ½A² + εf(α′, β): the fast
//! angles ψ ∈ T^r rotate with ω ∈ R^r while the slow angles sit near a
//! nondegenerate stationary point β₀ of the fast average f̄(β).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::{One, Zero};

use super::series::{exp_next, for_grid, PhaseTable};
use crate::base::{FourierSeries, FrequencyVector, HarmonicVector, VectorSeries};
use crate::error::{Error, Result};

/// Stationarity tolerance on |∂_β f̄(β₀)|.
pub const STATIONARITY_TOL: f64 = 1e-10;
/// Smallest accepted |det ∂²_ββ f̄(β₀)|.
pub const HESSIAN_TOL: f64 = 1e-8;

/// Displacements u⁽ᵏ⁾ = (h⁽ᵏ⁾, k⁽ᵏ⁾) as functions of ψ ∈ T^r.
#[derive(Debug, Clone)]
pub struct ResonantSeries {
    pub omega: FrequencyVector,
    pub beta0: Vec<f64>,
    pub f: FourierSeries,
    /// `orders[k − 1]` has r fast components followed by s slow ones.
    pub orders: Vec<VectorSeries<f64>>,
    /// Constant part of k⁽ᵏ⁾; the last one is left at zero.
    pub shifts: Vec<Vec<f64>>,
}

/// Gradient and Hessian of f̄(β) = average of f over the fast angles.
pub fn slow_average_derivatives(f: &FourierSeries, r: usize, beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let s = beta.len();
    let mut grad = vec![0.0; s];
    let mut hess = DMatrix::zeros(s, s);
    for (nu, c) in f.iter() {
        let (fast, slow) = nu.entries().split_at(r);
        if fast.iter().any(|&a| a != 0) {
            continue;
        }
        let phase: f64 = slow.iter().zip(beta).map(|(m, b)| *m as f64 * b).sum();
        let z = *c * Complex::from_polar(1.0, phase);
        for a in 0..s {
            // ∂_a: i μ_a z; ∂_a∂_b: −μ_a μ_b z.
            grad[a] += -(slow[a] as f64) * z.im;
            for b in 0..s {
                hess[(a, b)] -= (slow[a] * slow[b]) as f64 * z.re;
            }
        }
    }
    (grad, hess)
}

fn fast_monomial(nu: &HarmonicVector, r: usize, c: Complex<f64>, beta0: &[f64]) -> FourierSeries {
    let (fast, slow) = nu.entries().split_at(r);
    let phase: f64 = slow.iter().zip(beta0).map(|(m, b)| *m as f64 * b).sum();
    let fast = HarmonicVector::new(fast);
    let mut s = FourierSeries::new(r, fast.norm());
    s.add_term(fast, c * Complex::from_polar(1.0, phase)).expect("degree covers the monomial");
    s
}

/// [∂_α f(ψ + h, β₀ + k)]⁽ᵐ⁾ from the stored exponential coefficients.
fn order_rhs(
    support: &[(HarmonicVector, FourierSeries)],
    es: &[Vec<FourierSeries>],
    m: usize,
    r: usize,
    dim: usize,
    degree: usize,
) -> VectorSeries<f64> {
    let mut g = VectorSeries::zeros(r, degree);
    g.components = vec![FourierSeries::new(r, degree); dim];
    for ((nu, mono), e) in support.iter().zip(es) {
        let shifted = e[m].mul(mono);
        for (comp, &a) in g.components.iter_mut().zip(nu.entries()) {
            if a != 0 {
                *comp = comp.add(&shifted.scale(Complex::new(0.0, a as f64)));
            }
        }
    }
    g
}

/// Solves the resonant torus equations order by order through `k_max`.
///
/// At order k the ψ-mean of the slow right-hand side is removed by the
/// constant c_{k−1} = −(∂²f̄)⁻¹ m, where m is that mean with c_{k−1} = 0.
pub fn resonant_lindstedt(f: &FourierSeries, omega: &FrequencyVector, beta0: &[f64], k_max: usize) -> Result<ResonantSeries> {
    let r = omega.dim();
    let s = beta0.len();
    let dim = r + s;
    if f.dim() != dim {
        return Err(Error::InvalidInput(format!("perturbation on T^{} but r + s = {dim}", f.dim())));
    }
    if s == 0 {
        return Err(Error::InvalidInput("at least one slow angle is needed".into()));
    }
    let (grad, hess) = slow_average_derivatives(f, r, beta0);
    let gnorm = grad.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if gnorm > STATIONARITY_TOL {
        return Err(Error::StationarityViolated(gnorm));
    }
    let det = hess.determinant();
    if det.abs() < HESSIAN_TOL {
        return Err(Error::DegenerateHessian(det));
    }
    let hinv = hess.try_inverse().ok_or(Error::DegenerateHessian(det))?;
    let support: Vec<(HarmonicVector, FourierSeries)> = f
        .iter()
        .filter(|(nu, c)| !nu.is_zero() && !c.is_zero())
        .map(|(nu, c)| (nu.clone(), fast_monomial(nu, r, *c, beta0)))
        .collect();
    let n = f.degree().max(1);
    let mut orders: Vec<VectorSeries<f64>> = Vec::new();
    let mut shifts: Vec<Vec<f64>> = Vec::new();
    let mut xs: Vec<Vec<FourierSeries>> = vec![Vec::new(); support.len()];
    let mut es: Vec<Vec<FourierSeries>> = vec![vec![FourierSeries::constant(r, Complex::one())]; support.len()];
    for k in 1..=k_max {
        let m = k - 1;
        let mut g = if m == 0 {
            order_rhs(&support, &es, 0, r, dim, k * n)
        } else {
            let push = |xs: &mut Vec<Vec<FourierSeries>>, es: &mut Vec<Vec<FourierSeries>>, u: &VectorSeries<f64>| {
                for (idx, (nu, _)) in support.iter().enumerate() {
                    xs[idx].push(u.dot_imag_harmonic(nu));
                    let next = exp_next(&xs[idx], &es[idx], r, m * n);
                    es[idx].push(next);
                }
            };
            push(&mut xs, &mut es, &orders[m - 1]);
            let g0 = order_rhs(&support, &es, m, r, dim, k * n);
            let mean = DVector::from_iterator(s, g0.components[r..].iter().map(|c| c.mean().re));
            let c = -(&hinv * mean);
            for (j, cj) in c.iter().enumerate() {
                orders[m - 1].components[r + j].add_term(HarmonicVector::zeros(r), Complex::new(*cj, 0.0))?;
            }
            shifts[m - 1] = c.iter().copied().collect();
            for idx in 0..support.len() {
                xs[idx].pop();
                es[idx].pop();
            }
            push(&mut xs, &mut es, &orders[m - 1]);
            order_rhs(&support, &es, m, r, dim, k * n)
        };
        let scale = g.abs_sum().max(1.0);
        let mean = g.components.iter().map(|c| c.mean().norm()).fold(0.0, f64::max);
        if mean > 1e-12 * scale {
            return Err(Error::ZeroMeanObstruction { order: k, magnitude: mean });
        }
        let mut err = Ok(());
        for comp in g.components.iter_mut() {
            *comp = comp.map(|nu, z| {
                if nu.is_zero() {
                    return Complex::zero();
                }
                match omega.small_divisor(nu) {
                    Ok(d) if d.abs() < 1e-14 => {
                        err = Err(Error::ResonantDenominator { nu: nu.entries().to_vec(), divisor: d });
                        Complex::zero()
                    }
                    Ok(d) => z / (d * d),
                    Err(e) => {
                        err = Err(e);
                        Complex::zero()
                    }
                }
            });
            comp.take_mean();
        }
        err?;
        orders.push(g);
        shifts.push(vec![0.0; s]);
    }
    Ok(ResonantSeries { omega: omega.clone(), beta0: beta0.to_vec(), f: f.clone(), orders, shifts })
}

impl ResonantSeries {
    pub fn r(&self) -> usize {
        self.omega.dim()
    }

    pub fn s(&self) -> usize {
        self.beta0.len()
    }

    /// Fast components h⁽ᵏ⁾.
    pub fn h(&self, k: usize) -> Vec<FourierSeries> {
        self.orders[k - 1].components[..self.r()].to_vec()
    }

    /// Slow components k⁽ᵏ⁾.
    pub fn k(&self, k: usize) -> Vec<FourierSeries> {
        self.orders[k - 1].components[self.r()..].to_vec()
    }

    /// max over a ψ grid of |(ω·∂_ψ)²u_ε + ε∂_α f(ψ + h_ε, β₀ + k_ε)|.
    pub fn residual(&self, eps: f64, grid: usize) -> f64 {
        let r = self.r();
        let dim = r + self.s();
        let mut u = VectorSeries::zeros(r, 0);
        u.components = vec![FourierSeries::new(r, 0); dim];
        let mut p = 1.0;
        for o in &self.orders {
            p *= eps;
            u = u.add(&o.scale_real(p));
        }
        let d2u = u.derivative(&self.omega.omega).derivative(&self.omega.omega);
        let degree = u.support_norm().max(1);
        let mut worst: f64 = 0.0;
        for_grid(r, grid, |psi| {
            let table = PhaseTable::new(psi, degree);
            let uv: Vec<f64> = u.components.iter().map(|c| table.eval(c).re).collect();
            let lhs: Vec<f64> = d2u.components.iter().map(|c| table.eval(c).re).collect();
            let alpha: Vec<f64> = psi.iter().chain(&self.beta0).zip(&uv).map(|(a, b)| a + b).collect();
            let mut rhs = vec![0.0; dim];
            for (nu, c) in self.f.iter() {
                let (sn, co) = nu.dot(&alpha).sin_cos();
                let re = -(c.re * sn + c.im * co);
                for (x, &a) in rhs.iter_mut().zip(nu.entries()) {
                    *x += a as f64 * re;
                }
            }
            for (l, x) in lhs.iter().zip(&rhs) {
                worst = worst.max((l + eps * x).abs());
            }
        });
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn example() -> FourierSeries {
        FourierSeries::cosine(2, &[0, 1], 1.0).add(&FourierSeries::cosine(2, &[1, 1], 1.0))
    }

    fn skewed() -> FourierSeries {
        example().add(&FourierSeries::sine(2, &[1, 0], 0.5))
    }

    #[test]
    fn first_order_by_hand() {
        let omega = FrequencyVector::new(vec![1.3]);
        let sol = resonant_lindstedt(&example(), &omega, &[PI], 2).unwrap();
        // At β₀ = π both components of −∂f(ψ, π) equal −sin ψ, so h⁽¹⁾ = k⁽¹⁾ = sin ψ/ω².
        let expect = FourierSeries::sine(1, &[1], 1.0 / (1.3 * 1.3));
        assert!(sol.h(1)[0].max_diff(&expect) < 1e-15);
        assert!(sol.k(1)[0].max_diff(&expect.with_degree(sol.k(1)[0].degree())) < 1e-15);
    }

    #[test]
    fn residual_is_third_order() {
        let omega = FrequencyVector::new(vec![1.3]);
        let sol = resonant_lindstedt(&skewed(), &omega, &[PI], 2).unwrap();
        let (r1, r2) = (sol.residual(1e-3, 16), sol.residual(2e-3, 16));
        assert!(r1 < 1e-8);
        let ratio = r2 / r1;
        assert!((6.0..10.0).contains(&ratio), "{ratio}");
        assert!(sol.shifts[0][0].abs() > 1e-3, "{:?}", sol.shifts);
    }

    #[test]
    fn dropping_the_shift_loses_an_order() {
        let omega = FrequencyVector::new(vec![1.3]);
        let mut sol = resonant_lindstedt(&skewed(), &omega, &[PI], 2).unwrap();
        sol.orders[0].components[1].take_mean();
        let ratio = sol.residual(2e-3, 16) / sol.residual(1e-3, 16);
        assert!((3.0..5.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn higher_orders_keep_scaling() {
        let omega = FrequencyVector::new(vec![1.3]);
        let sol = resonant_lindstedt(&skewed(), &omega, &[PI], 4).unwrap();
        let ratio = sol.residual(2e-3, 16) / sol.residual(1e-3, 16);
        assert!((0.75 * 32.0..1.25 * 32.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn beta_independent_f_is_degenerate() {
        let f = FourierSeries::cosine(2, &[1, 0], 1.0);
        let err = resonant_lindstedt(&f, &FrequencyVector::new(vec![1.0]), &[0.4], 2).unwrap_err();
        assert!(matches!(err, Error::DegenerateHessian(_)));
    }

    #[test]
    fn non_stationary_point_rejected() {
        let err = resonant_lindstedt(&example(), &FrequencyVector::new(vec![1.0]), &[1.0], 2).unwrap_err();
        assert!(matches!(err, Error::StationarityViolated(_)));
    }
}
