//! Evaluation of ξ − λ = h(λ) by truncated series: the plain power series in
//! e, the Levi-Civita form Σ (e sin ψ)^k/k! (u ∂_ψ)^k ψ with u = 1/(1 − e cos ψ),
//! and the starred tree sum without simple nodes.  Also the Laplace radius
//! of convergence and the two crude radius bounds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::series::{eval_exact, lagrange_series};
use super::solve::{solve_kepler, KeplerMethod};
use crate::base::HarmonicVector;
use crate::error::{Error, Result};
use crate::numerics::roots::brent;
use crate::trees::{Forest, TreeFilter};

/// Highest order accepted by the series evaluators.
pub const MAX_SERIES_ORDER: usize = 40;
/// Highest order accepted by the starred tree evaluator.
pub const MAX_STARRED_ORDER: usize = 18;

fn check_order(k: usize, max: usize) -> Result<()> {
    if k > max {
        return Err(Error::OrderTooLarge { order: k, detail: format!("series evaluators stop at {max}") });
    }
    Ok(())
}

/// Σ_{k=1}^{K} e^k h⁽ᵏ⁾(ψ) with exact coefficients.
pub fn plain_series_eval(e: f64, psi: f64, order: usize) -> Result<f64> {
    check_order(order, MAX_SERIES_ORDER)?;
    let mut total = 0.0;
    let mut ek = 1.0;
    for k in 1..=order {
        ek *= e;
        total += ek * eval_exact(&lagrange_series(k), psi);
    }
    Ok(total)
}

/// Monomial s^a c^b u^m with a ∈ {0, 1} (s² is rewritten as 1 − c²).
type Poly = BTreeMap<(u8, u32, u32), f64>;

fn poly_add(p: &mut Poly, key: (u8, u32, u32), v: f64) {
    if v == 0.0 {
        return;
    }
    let (a, b, m) = key;
    if a >= 2 {
        // s² = 1 − c².
        poly_add(p, (a - 2, b, m), v);
        poly_add(p, (a - 2, b + 2, m), -v);
        return;
    }
    *p.entry(key).or_insert(0.0) += v;
}

/// u·∂_ψ applied to a polynomial, with ∂s = c, ∂c = −s, ∂u = −e s u².
fn u_derivative(p: &Poly, e: f64) -> Poly {
    let mut out = Poly::new();
    for (&(a, b, m), &v) in p {
        if a == 1 {
            poly_add(&mut out, (0, b + 1, m + 1), v);
        }
        if b > 0 {
            poly_add(&mut out, (a + 1, b - 1, m + 1), -(b as f64) * v);
        }
        if m > 0 {
            poly_add(&mut out, (a + 1, b, m + 2), -e * m as f64 * v);
        }
    }
    out
}

fn poly_eval(p: &Poly, s: f64, c: f64, u: f64) -> f64 {
    p.iter().map(|(&(a, b, m), &v)| v * s.powi(a as i32) * c.powi(b as i32) * u.powi(m as i32)).sum()
}

/// Σ_{k=1}^{K} (e sin ψ)^k/k! · [(u∂_ψ)^{k−1} u](ψ), the Levi-Civita form.
pub fn levi_civita_eval(e: f64, psi: f64, order: usize) -> Result<f64> {
    check_order(order, MAX_SERIES_ORDER)?;
    let (s, c) = psi.sin_cos();
    let u = 1.0 / (1.0 - e * c);
    let mut p: Poly = Poly::new();
    p.insert((0, 0, 1), 1.0);
    let mut total = 0.0;
    let mut pref = 1.0;
    for k in 1..=order {
        if k > 1 {
            p = u_derivative(&p, e);
        }
        pref *= e * s / k as f64;
        total += pref * poly_eval(&p, s, c, u);
    }
    Ok(total)
}

/// Starred sum: trees without simple nodes (nodes with exactly one child),
/// each line carrying the factor 1/(1 − e cos ψ).  In angle space a tree of
/// order k contributes (e u)^k/|Aut| · Π_v sin^{(p_v)}(ψ), with p_v the
/// number of children of v.
pub fn starred_eval(e: f64, psi: f64, order: usize) -> Result<f64> {
    check_order(order, MAX_STARRED_ORDER)?;
    if order == 0 {
        return Ok(0.0);
    }
    let alphabet = [HarmonicVector::new(&[0])];
    let forest = Forest::build(&alphabet, order, TreeFilter::All, u64::MAX)?;
    let dsin = |p: usize| (psi + p as f64 * std::f64::consts::FRAC_PI_2).sin();
    let mut value = vec![0.0; forest.len()];
    let mut per_order = vec![0.0; order + 1];
    for id in 0..forest.len() {
        let kids = forest.children(id);
        let v = if kids.len() == 1 { 0.0 } else { dsin(kids.len()) * kids.iter().map(|&c| value[c as usize]).product::<f64>() };
        value[id] = v;
        per_order[forest.order(id)] += v / forest.aut(id) as f64;
    }
    let x = e / (1.0 - e * psi.cos());
    Ok((1..=order).map(|k| x.powi(k as i32) * per_order[k]).sum())
}

/// The three truncated evaluations alongside the Newton reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResummedValues {
    pub plain: f64,
    pub levi_civita: f64,
    pub starred: Option<f64>,
    /// ξ − λ from the iterative solver at λ = ψ.
    pub newton: f64,
}

/// Evaluates h(ψ) by the plain and Levi-Civita series truncated at order K
/// (and the starred tree sum when K ≤ 18), together with the solver value.
pub fn resummed_series_eval(e: f64, psi: f64, order: usize) -> Result<ResummedValues> {
    if !(0.0..laplace_radius()).contains(&e) {
        return Err(Error::DomainViolation(format!("e={e} outside [0, Laplace radius)")));
    }
    Ok(ResummedValues {
        plain: plain_series_eval(e, psi, order)?,
        levi_civita: levi_civita_eval(e, psi, order)?,
        starred: if order <= MAX_STARRED_ORDER { Some(starred_eval(e, psi, order)?) } else { None },
        newton: solve_kepler(e, psi, KeplerMethod::Newton)? - psi,
    })
}

/// Left side of the Laplace equation ε e^{√(1+ε²)}/(1+√(1+ε²)).
fn laplace_lhs(x: f64) -> f64 {
    let r = (1.0 + x * x).sqrt();
    x * r.exp() / (1.0 + r)
}

/// Radius of convergence of the eccentricity series, the positive root of
/// ε e^{√(1+ε²)}/(1+√(1+ε²)) = 1.
pub fn laplace_radius() -> f64 {
    brent(|x| laplace_lhs(x) - 1.0, 0.1, 1.0, 1e-15).expect("bracket [0.1, 1] contains the Laplace root")
}

/// The rough radius bounds 1/4 (from Σ|h⁽ᵏ⁾_ν| ≤ 4^k) and 1/e (from the
/// Cayley count k^{k−1} with c_{±1} = 1/2, via lim (k^{k−1}/k!)^{1/k} = e).
pub fn crude_radius_bounds() -> (f64, f64) {
    let k = 1.0e7f64;
    // Stirling: ln k! = k ln k − k + ½ ln(2πk) + 1/(12k) − …
    let ln_kfact = k * k.ln() - k + 0.5 * (2.0 * std::f64::consts::PI * k).ln() + 1.0 / (12.0 * k);
    let growth = (((k - 1.0) * k.ln() - ln_kfact) / k).exp();
    (0.25, 1.0 / growth)
}

/// η(ε) = ε e^{√(1−ε²)}/(1+√(1−ε²)) for complex ε.
pub fn eta(eps: num_complex::Complex<f64>) -> num_complex::Complex<f64> {
    let one = num_complex::Complex::new(1.0, 0.0);
    let r = (one - eps * eps).sqrt();
    eps * r.exp() / (one + r)
}

/// Radius and both probes of the curve |η(ε)| = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceReport {
    pub radius: f64,
    /// |η(i·radius)|: 1 on the imaginary axis.
    pub imaginary_axis_abs_eta: f64,
    /// η(radius) on the real axis, strictly inside the unit disk.
    pub real_axis_eta: f64,
    /// Real ε with η(ε) = 1, beyond the radius.
    pub real_axis_unit_point: f64,
    pub crude_quarter: f64,
    pub crude_inverse_e: f64,
}

pub fn laplace_report() -> LaplaceReport {
    let radius = laplace_radius();
    let (crude_quarter, crude_inverse_e) = crude_radius_bounds();
    let real_eta = |x: f64| eta(num_complex::Complex::new(x, 0.0)).re;
    let unit = brent(|x| real_eta(x) - 1.0, 0.5, 1.0 - 1e-15, 1e-15).unwrap_or(1.0);
    LaplaceReport {
        radius,
        imaginary_axis_abs_eta: eta(num_complex::Complex::new(0.0, radius)).norm(),
        real_axis_eta: real_eta(radius),
        real_axis_unit_point: unit,
        crude_quarter,
        crude_inverse_e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_eccentricity() {
        let r = resummed_series_eval(0.0, 1.3, 10).unwrap();
        assert_eq!(r.plain, 0.0);
        assert_eq!(r.levi_civita, 0.0);
        assert_eq!(r.starred, Some(0.0));
    }

    #[test]
    fn small_eccentricity_matches_newton() {
        let r = resummed_series_eval(0.2, 1.0, 10).unwrap();
        assert!((r.plain - r.newton).abs() <= 1e-8, "{r:?}");
        assert!((r.levi_civita - r.newton).abs() <= 1e-8, "{r:?}");
        assert!((r.starred.unwrap() - r.newton).abs() <= 1e-7, "{r:?}");
        let deep = starred_eval(0.2, 1.0, 16).unwrap();
        assert!((deep - r.newton).abs() <= 1e-10, "{deep}");
    }

    #[test]
    fn starred_matches_plain_order_by_order() {
        // Both are Taylor-complete through order K in e only after re-expansion,
        // so compare at tiny e where truncation is below round-off.
        for psi in [0.3, 1.7, -2.2] {
            let a = plain_series_eval(1e-3, psi, 6).unwrap();
            let b = starred_eval(1e-3, psi, 6).unwrap();
            assert!((a - b).abs() < 1e-17, "{a} {b}");
        }
    }

    #[test]
    fn ratio_convergence() {
        let a = plain_series_eval(0.5, 0.7, 12).unwrap();
        let b = plain_series_eval(0.5, 0.7, 13).unwrap();
        assert!((a - b).abs() <= 0.5f64.powi(13) * 4.0, "{}", (a - b).abs());
    }

    #[test]
    fn laplace_value() {
        let r = laplace_report();
        assert!((r.radius - 0.6627).abs() < 5e-4);
        assert!((laplace_lhs(r.radius) - 1.0).abs() < 1e-12);
        assert!((r.imaginary_axis_abs_eta - 1.0).abs() < 1e-9);
        assert!(r.real_axis_eta < 1.0);
        assert!((r.crude_quarter - 0.25).abs() < 1e-15);
        assert!((r.crude_inverse_e - 0.3678).abs() < 1e-4);
        assert!(r.crude_inverse_e < r.radius && r.crude_quarter < r.radius);
    }
}
