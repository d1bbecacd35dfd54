//! Mean, eccentric and true anomalies of a Kepler ellipse, orbital elements,
//! and the leading coefficients of ξ − λ and θ − λ in (e sin λ, e cos λ).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::solve::{solve_kepler, KeplerMethod};
use crate::error::{Error, Result};
use crate::numerics::quad;

/// Delaunay-type elements of a bound orbit with coupling k and mass m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitElements {
    /// Action conjugate to the mean anomaly; the energy is −k²m³/(2L²).
    pub l: f64,
    /// Angular momentum.
    pub g: f64,
    pub e: f64,
    /// Major semiaxis L²/(k m²).
    pub a: f64,
}

impl OrbitElements {
    /// Elements from L and e; `prograde` selects the sign of G.
    pub fn new(l: f64, e: f64, k: f64, m: f64, prograde: bool) -> Result<Self> {
        if !(l > 0.0 && k > 0.0 && m > 0.0) {
            return Err(Error::InvalidInput("L, k and m must be positive".into()));
        }
        if !(0.0..1.0).contains(&e) {
            return Err(Error::DomainViolation(format!("eccentricity {e} outside [0, 1)")));
        }
        let g = l * (1.0 - e * e).sqrt() * if prograde { 1.0 } else { -1.0 };
        Ok(OrbitElements { l, g, e, a: l * l / (k * m * m) })
    }

    /// Elements from the actions L and G with |G| ≤ L.
    pub fn from_actions(l: f64, g: f64, k: f64, m: f64) -> Result<Self> {
        if !(l > 0.0) || g.abs() > l {
            return Err(Error::DomainViolation(format!("need L > 0 and |G| ≤ L, got L={l} G={g}")));
        }
        let e = (1.0 - (g / l).powi(2)).max(0.0).sqrt();
        let mut el = OrbitElements::new(l, e, k, m, g >= 0.0)?;
        el.g = g;
        Ok(el)
    }

    /// Energy −k²m³/(2L²).
    pub fn energy(&self, k: f64, m: f64) -> f64 {
        -k * k * m.powi(3) / (2.0 * self.l * self.l)
    }
}

/// The three anomalies at one point of the orbit together with ρ/a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalyTriple {
    pub e: f64,
    pub lambda: f64,
    pub xi: f64,
    pub theta: f64,
    pub rho_over_a: f64,
}

/// Tolerance applied to every identity after construction.
pub const ANOMALY_TOL: f64 = 1e-12;

impl AnomalyTriple {
    /// Residuals of: Kepler's equation, the product identity
    /// (1 − e cos ξ)(1 + e cos θ) = 1 − e², ρ/a = (1 − e²)/(1 + e cos θ),
    /// ρ/a = 1 − e cos ξ, and the area law
    /// λ = (1 − e²)^{3/2} ∫₀^θ dθ′/(1 + e cos θ′)².
    pub fn residuals(&self) -> [f64; 5] {
        let e = self.e;
        let (cx, ct) = (self.xi.cos(), self.theta.cos());
        let area = (1.0 - e * e).powf(1.5)
            * quad::integrate_panels(|t| (1.0 + e * t.cos()).powi(-2), 0.0, self.theta, 4, 1e-15);
        [
            self.xi - e * self.xi.sin() - self.lambda,
            (1.0 - e * cx) * (1.0 + e * ct) - (1.0 - e * e),
            self.rho_over_a - (1.0 - e * e) / (1.0 + e * ct),
            self.rho_over_a - (1.0 - e * cx),
            area - self.lambda,
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Anomalies at mean anomaly λ, reduced to (−π, π]; θ shares ξ's branch.
pub fn anomalies(e: f64, lambda: f64) -> Result<AnomalyTriple> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let reduced = lambda - ((lambda - std::f64::consts::PI) / two_pi).ceil() * two_pi;
    let xi = solve_kepler(e, reduced, KeplerMethod::Newton)?;
    let (s, c) = (0.5 * xi).sin_cos();
    let theta = 2.0 * ((1.0 + e).sqrt() * s).atan2((1.0 - e).sqrt() * c);
    let triple = AnomalyTriple { e, lambda: reduced, xi, theta, rho_over_a: 1.0 - e * xi.cos() };
    let worst = triple.max_residual();
    if worst > ANOMALY_TOL {
        return Err(Error::NoConvergence { iterations: 0, detail: format!("anomaly identities off by {worst:e}") });
    }
    Ok(triple)
}

/// Leading coefficients of g(x, y) = ξ − λ ≈ x(g₁ + g_xy·y + …) and
/// f(x, y) = θ − λ ≈ x(f₁ + f_xy·y + …), with x = e sin λ, y = e cos λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgCoefficients {
    pub g_linear: f64,
    pub g_xy: f64,
    pub f_linear: f64,
    pub f_xy: f64,
    pub condition_number: f64,
}

/// Largest accepted condition number of the normalized design matrix.
pub const FG_MAX_CONDITION: f64 = 1e12;

/// Least-squares fit of ξ − λ and θ − λ on a grid e ∈ (0, 0.04], λ ∈ [0, 2π)
/// against x·x^{2a}y^b with 2a + b ≤ `fit_order` (both functions are odd
/// in x).
pub fn fg_leading_coefficients(fit_order: usize) -> Result<FgCoefficients> {
    if fit_order == 0 || fit_order > 8 {
        return Err(Error::InvalidInput("fit order must lie in 1..=8".into()));
    }
    let mut basis: Vec<(i32, i32)> = Vec::new();
    for deg in 0..=fit_order as i32 {
        for a in 0..=deg / 2 {
            basis.push((2 * a + 1, deg - 2 * a));
        }
    }
    let (n_e, n_l) = (12, 48);
    let rows = n_e * n_l;
    let mut design = DMatrix::<f64>::zeros(rows, basis.len());
    let mut g_rhs = DVector::<f64>::zeros(rows);
    let mut f_rhs = DVector::<f64>::zeros(rows);
    for i in 0..n_e {
        let e = 0.04 * (i + 1) as f64 / n_e as f64;
        for j in 0..n_l {
            let lambda = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_l as f64;
            let t = anomalies(e, lambda)?;
            let (x, y) = (e * lambda.sin(), e * lambda.cos());
            let r = i * n_l + j;
            for (col, &(px, py)) in basis.iter().enumerate() {
                design[(r, col)] = x.powi(px) * y.powi(py);
            }
            g_rhs[r] = t.xi - t.lambda;
            f_rhs[r] = t.theta - t.lambda;
        }
    }
    let scales: Vec<f64> = (0..basis.len()).map(|c| design.column(c).norm()).collect();
    for (c, s) in scales.iter().enumerate() {
        design.column_mut(c).scale_mut(1.0 / s);
    }
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition_number <= FG_MAX_CONDITION) {
        return Err(Error::FitIllConditioned(condition_number));
    }
    let solve = |rhs: &DVector<f64>| -> Result<Vec<f64>> {
        let sol = svd.solve(rhs, 0.0).map_err(|m| Error::InvalidInput(m.to_string()))?;
        Ok(sol.iter().zip(&scales).map(|(v, s)| v / s).collect())
    };
    let g = solve(&g_rhs)?;
    let f = solve(&f_rhs)?;
    let idx = |p: (i32, i32)| basis.iter().position(|&b| b == p);
    let pick = |v: &[f64], p| idx(p).map_or(0.0, |i| v[i]);
    Ok(FgCoefficients {
        g_linear: pick(&g, (1, 0)),
        g_xy: pick(&g, (1, 1)),
        f_linear: pick(&f, (1, 0)),
        f_xy: pick(&f, (1, 1)),
        condition_number,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circular_orbit() {
        let t = anomalies(0.0, 0.8).unwrap();
        assert_eq!((t.xi, t.theta, t.rho_over_a), (0.8, 0.8, 1.0));
    }

    #[test]
    fn product_identity() {
        let t = anomalies(0.1, 1.0).unwrap();
        assert!(t.residuals()[1].abs() <= 1e-12);
    }

    #[test]
    fn apocenter() {
        let t = anomalies(0.4, PI).unwrap();
        assert!((t.xi - PI).abs() < 1e-12 && (t.theta - PI).abs() < 1e-12);
        assert!((t.rho_over_a - 1.4).abs() < 1e-12);
    }

    #[test]
    fn near_branch_edge() {
        let t = anomalies(0.9, PI - 1e-3).unwrap();
        assert!(t.xi > 0.0 && t.max_residual() < 1e-12);
    }

    #[test]
    fn elements() {
        let el = OrbitElements::new(2.0, 0.6, 1.0, 1.0, false).unwrap();
        assert!((el.g + 1.6).abs() < 1e-15 && (el.a - 4.0).abs() < 1e-15);
        let back = OrbitElements::from_actions(2.0, -1.6, 1.0, 1.0).unwrap();
        assert!((back.e - 0.6).abs() < 1e-12);
        assert!(OrbitElements::new(1.0, 1.0, 1.0, 1.0, true).is_err());
    }

    #[test]
    fn fg_fit() {
        let c = fg_leading_coefficients(3).unwrap();
        assert!((c.g_linear - 1.0).abs() < 1e-3, "{c:?}");
        assert!((c.g_xy - 1.0).abs() < 1e-3, "{c:?}");
        assert!((c.f_linear - 2.0).abs() < 1e-3, "{c:?}");
        assert!((c.f_xy / c.f_linear - 1.25).abs() < 1e-2, "{c:?}");
    }
}
