//! Birkhoff series for the isochronous rotator H_ε = ω₀·A + ε(A₂ + f(α)).
//!
//! The generating function Φ_ε(α) with A = A′ + ∂_αΦ, α′ = α turns H_ε into
//! (ω₀ + εe₂)·A′, so Φ_ν = −ε f_ν / (i ω_ε·ν) with ω_ε = (ω₀₁, ω₀₂ + ε).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::base::{FourierSeries, HarmonicVector};
use crate::error::{Error, Result};
use crate::numerics::{integrate_dense, OdeOptions};

/// Absolute threshold below which ω_ε·ν is treated as zero.
pub const RESONANCE_TOL: f64 = 1e-14;

/// Perturbation Σ_{0<|ν|≤n} e^{−decay·|ν|} cos(ν·α) with every Fourier coefficient positive.
pub fn positive_perturbation(n: usize, decay: f64) -> FourierSeries {
    let mut f = FourierSeries::new(2, n);
    for nu in HarmonicVector::ball(2, n) {
        if !nu.is_zero() {
            f.add_term(nu.clone(), Complex::new(0.5 * (-decay * nu.norm() as f64).exp(), 0.0)).expect("within degree");
        }
    }
    f
}

fn check_f(f: &FourierSeries, omega0: &[f64]) -> Result<()> {
    if omega0.len() != 2 || f.dim() != 2 {
        return Err(Error::InvalidInput("the rotator lives on T²".into()));
    }
    if f.mean().norm() > 1e-15 {
        return Err(Error::InvalidInput("perturbation must have zero mean".into()));
    }
    Ok(())
}

fn divisor(omega: &[f64], nu: &HarmonicVector) -> Result<f64> {
    let d = nu.dot(omega);
    if d.abs() < RESONANCE_TOL {
        return Err(Error::ResonantDenominator { nu: nu.entries().to_vec(), divisor: d });
    }
    Ok(d)
}

/// Closed-form generating function Φ_ε = Σ_ν −ε f_ν e^{iν·α}/(i ω_ε·ν).
pub fn birkhoff_closed_form(f: &FourierSeries, omega0: &[f64], eps: f64) -> Result<FourierSeries> {
    check_f(f, omega0)?;
    let omega = [omega0[0], omega0[1] + eps];
    let mut phi = FourierSeries::new(2, f.degree());
    for (nu, c) in f.iter() {
        let d = divisor(&omega, nu)?;
        phi.add_term(nu.clone(), -eps * *c / Complex::new(0.0, d))?;
    }
    Ok(phi)
}

/// Truncated Birkhoff series of order K.
#[derive(Debug, Clone)]
pub struct BirkhoffSeries {
    pub omega0: Vec<f64>,
    pub f: FourierSeries,
    /// `taylor[m − 1]` is the ε^m coefficient of Φ_ε: (−1)^m f_ν ν₂^{m−1}/(i(ω₀·ν)^m).
    pub taylor: Vec<FourierSeries>,
    /// `double_series[k]` is the term f_ν (iν₂)^k/(iω₀·ν)^{k+1} of the double series.
    pub double_series: Vec<FourierSeries>,
}

/// Φ_ε coefficients by ε-expansion of the closed form, next to the double-series terms.
pub fn birkhoff_series(f: &FourierSeries, omega0: &[f64], k_max: usize) -> Result<BirkhoffSeries> {
    check_f(f, omega0)?;
    let mut taylor = Vec::with_capacity(k_max);
    let mut double_series = Vec::with_capacity(k_max);
    for m in 1..=k_max {
        let mut t = FourierSeries::new(2, f.degree());
        let mut d = FourierSeries::new(2, f.degree());
        for (nu, c) in f.iter() {
            let w = divisor(omega0, nu)?;
            let nu2 = nu.entries()[1] as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            t.add_term(nu.clone(), sign * *c * nu2.powi(m as i32 - 1) / Complex::new(0.0, w.powi(m as i32)))?;
            let k = m as i32 - 1;
            let num = Complex::new(0.0, nu2).powi(k);
            d.add_term(nu.clone(), *c * num / Complex::new(0.0, w).powi(k + 1))?;
        }
        taylor.push(t);
        double_series.push(d);
    }
    Ok(BirkhoffSeries { omega0: omega0.to_vec(), f: f.clone(), taylor, double_series })
}

impl BirkhoffSeries {
    pub fn order(&self) -> usize {
        self.taylor.len()
    }

    /// max over m of the gap between the ε^m Taylor term and (−1)^m times the
    /// double-series term of index m − 1.
    pub fn convention_mismatch(&self) -> f64 {
        self.taylor
            .iter()
            .zip(&self.double_series)
            .enumerate()
            .map(|(i, (t, d))| {
                let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
                t.max_diff(&d.scale(Complex::new(sign, 0.0)))
            })
            .fold(0.0, f64::max)
    }

    /// Σ_{m≤K} ε^m Φ⁽ᵐ⁾.
    pub fn partial_sum(&self, eps: f64) -> FourierSeries {
        let mut acc = FourierSeries::new(2, self.f.degree());
        let mut p = 1.0;
        for t in &self.taylor {
            p *= eps;
            acc = acc.add(&t.scale(Complex::new(p, 0.0)));
        }
        acc
    }

    /// Largest geometric ratio |εν₂/ω₀·ν| over the support; the partial sums converge iff it is < 1.
    pub fn geometric_ratio(&self, eps: f64) -> f64 {
        self.f
            .iter()
            .map(|(nu, _)| (eps * nu.entries()[1] as f64 / nu.dot(&self.omega0)).abs())
            .fold(0.0, f64::max)
    }

    /// max |partial sum − closed form| over coefficients.
    pub fn resummation_gap(&self, eps: f64) -> Result<f64> {
        Ok(self.partial_sum(eps).max_diff(&birkhoff_closed_form(&self.f, &self.omega0, eps)?))
    }
}

/// Outcome of integrating H_ε and mapping the trajectory through Φ_ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyReport {
    pub eps: f64,
    pub t_final: f64,
    /// max |A′(t) − A′(0)| with A′ = A − ∂_αΦ_ε(α).
    pub action_drift: f64,
    /// max |α′(t) − α′(0) − (ω₀ + εe₂)t|.
    pub angle_error: f64,
    /// max |A(t) − A′(0) − ∂_αΦ_ε(α′(0) + ω_ε t)|.
    pub trajectory_error: f64,
}

impl ConjugacyReport {
    pub fn max_error(&self) -> f64 {
        self.action_drift.max(self.angle_error).max(self.trajectory_error)
    }
}

fn grad_phi(phi: &FourierSeries, alpha: &[f64]) -> [f64; 2] {
    let mut g = [0.0; 2];
    for (nu, c) in phi.iter() {
        let (s, co) = nu.dot(alpha).sin_cos();
        // Re(iν c e^{iν·α}).
        let re = -(c.re * s + c.im * co);
        g[0] += nu.entries()[0] as f64 * re;
        g[1] += nu.entries()[1] as f64 * re;
    }
    g
}

/// Integrates Hamilton's equations of H_ε from (A₀, α₀) and checks that the
/// closed-form Φ_ε maps the motion to constant actions and linear angles.
pub fn birkhoff_conjugacy(
    f: &FourierSeries,
    omega0: &[f64],
    eps: f64,
    a0: &[f64; 2],
    alpha0: &[f64; 2],
    t_final: f64,
    dt_out: f64,
) -> Result<ConjugacyReport> {
    let phi = birkhoff_closed_form(f, omega0, eps)?;
    let omega = [omega0[0], omega0[1] + eps];
    let terms: Vec<(HarmonicVector, Complex<f64>)> = f.iter().map(|(nu, c)| (nu.clone(), *c)).collect();
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = 0.0;
        dy[1] = 0.0;
        for (nu, c) in &terms {
            let (s, co) = nu.dot(&y[2..4]).sin_cos();
            let re = -(c.re * s + c.im * co);
            dy[0] -= eps * nu.entries()[0] as f64 * re;
            dy[1] -= eps * nu.entries()[1] as f64 * re;
        }
        dy[2] = omega[0];
        dy[3] = omega[1];
    };
    let y0 = [a0[0], a0[1], alpha0[0], alpha0[1]];
    let traj = integrate_dense(rhs, 0.0, &y0, t_final, dt_out, OdeOptions::tight())?;
    let g0 = grad_phi(&phi, alpha0);
    let a_prime0 = [a0[0] - g0[0], a0[1] - g0[1]];
    let mut report = ConjugacyReport { eps, t_final, action_drift: 0.0, angle_error: 0.0, trajectory_error: 0.0 };
    for (t, y) in traj.t.iter().zip(&traj.y) {
        let g = grad_phi(&phi, &y[2..4]);
        for j in 0..2 {
            report.action_drift = report.action_drift.max((y[j] - g[j] - a_prime0[j]).abs());
            report.angle_error = report.angle_error.max((y[2 + j] - alpha0[j] - omega[j] * t).abs());
        }
        let lin = [alpha0[0] + omega[0] * t, alpha0[1] + omega[1] * t];
        let gp = grad_phi(&phi, &lin);
        for j in 0..2 {
            report.trajectory_error = report.trajectory_error.max((y[j] - a_prime0[j] - gp[j]).abs());
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::GOLDEN;

    const OMEGA0: [f64; 2] = [1.0, GOLDEN];

    #[test]
    fn zero_perturbation() {
        let phi = birkhoff_closed_form(&FourierSeries::new(2, 0), &OMEGA0, 0.1).unwrap();
        assert!(phi.is_empty());
    }

    #[test]
    fn closed_form_coefficient() {
        let f = FourierSeries::cosine(2, &[1, 1], 2.0);
        let eps = 0.05;
        let phi = birkhoff_closed_form(&f, &OMEGA0, eps).unwrap();
        let c = phi.coeff(&HarmonicVector::new(&[1, 1]));
        let expect = Complex::new(0.0, eps / (1.0 + GOLDEN + eps));
        assert!((c - expect).norm() < 1e-16);
    }

    #[test]
    fn taylor_matches_double_series_up_to_sign() {
        let s = birkhoff_series(&positive_perturbation(3, 0.5), &OMEGA0, 8).unwrap();
        assert!(s.convention_mismatch() < 1e-12);
        let direct = s.taylor[1].max_diff(&s.double_series[1]);
        assert!(direct < 1e-12);
        assert!(s.taylor[2].max_diff(&s.double_series[2]) > 1e-3);
    }

    #[test]
    fn partial_sums_converge_to_closed_form() {
        let s = birkhoff_series(&FourierSeries::cosine(2, &[1, 1], 1.0), &OMEGA0, 12).unwrap();
        let eps = 0.05;
        let ratio = s.geometric_ratio(eps);
        assert!((ratio - eps / (1.0 + GOLDEN)).abs() < 1e-15);
        let gap = s.resummation_gap(eps).unwrap();
        assert!(gap <= ratio.powi(13) * 10.0 + 1e-17, "{gap} {ratio}");
    }

    #[test]
    fn conjugacy_at_diophantine_eps() {
        let rep =
            birkhoff_conjugacy(&positive_perturbation(3, 0.5), &OMEGA0, 0.05, &[0.4, -0.2], &[0.3, 1.1], 10.0, 0.1).unwrap();
        assert!(rep.max_error() <= 1e-8, "{rep:?}");
    }

    #[test]
    fn resonant_eps_rejected() {
        let f = positive_perturbation(3, 0.5);
        let err = birkhoff_closed_form(&f, &OMEGA0, 2.0 - GOLDEN).unwrap_err();
        assert!(matches!(err, Error::ResonantDenominator { .. }));
    }
}
