//! Observables and the Poisson bracket
//! {F, G} = Σ_k (∂_{p_k}F ∂_{q_k}G − ∂_{q_k}F ∂_{p_k}G), so that {p, q} = +1.

use std::sync::Arc;

use crate::numerics::diff::second_derivative;

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Step of the 5-point stencils used for Hessians.
pub const HESSIAN_STEP: f64 = 1e-3;
/// Step pair (h, h/2) for gradients.
pub const GRADIENT_STEP: f64 = 1e-5;

/// Phase-space function F(p, q) with optional analytic gradient.
#[derive(Clone)]
pub struct ObservableFn {
    f: ScalarFn,
    grad: Option<VectorFn>,
}

impl std::fmt::Debug for ObservableFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ObservableFn").field("analytic_gradient", &self.grad.is_some()).finish()
    }
}

impl ObservableFn {
    pub fn new<F: Fn(&[f64]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        ObservableFn { f: Arc::new(f), grad: None }
    }

    pub fn with_gradient<F, G>(f: F, grad: G) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        ObservableFn { f: Arc::new(f), grad: Some(Arc::new(grad)) }
    }

    /// The coordinate function x ↦ x_i.
    pub fn coordinate(i: usize) -> Self {
        ObservableFn::with_gradient(move |x| x[i], move |x| (0..x.len()).map(|j| if j == i { 1.0 } else { 0.0 }).collect())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    /// Finite-difference gradient regardless of any analytic one.
    pub fn numeric_gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len())
            .map(|j| {
                let h = GRADIENT_STEP * (1.0 + x[j].abs());
                let central = |h: f64| {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[j] += h;
                    xm[j] -= h;
                    (self.value(&xp) - self.value(&xm)) / (2.0 * h)
                };
                (4.0 * central(h / 2.0) - central(h)) / 3.0
            })
            .collect()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.grad {
            Some(g) => g(x),
            None => self.numeric_gradient(x),
        }
    }

    /// max |analytic − numeric| gradient entries (0 without an analytic gradient).
    pub fn gradient_consistency(&self, x: &[f64]) -> f64 {
        match &self.grad {
            Some(g) => g(x).iter().zip(self.numeric_gradient(x)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            None => 0.0,
        }
    }

    /// Hessian by 5-point stencils; mixed entries from the diagonal directions e_i ± e_j.
    pub fn hessian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = x.len();
        let along = |u: &[f64]| {
            second_derivative(
                |s| {
                    let y: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + s * b).collect();
                    self.value(&y)
                },
                0.0,
                HESSIAN_STEP,
            )
        };
        let mut h = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            h[i][i] = along(&e);
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut plus = vec![0.0; n];
                let mut minus = vec![0.0; n];
                plus[i] = 1.0;
                plus[j] = 1.0;
                minus[i] = 1.0;
                minus[j] = -1.0;
                let v = 0.25 * (along(&plus) - along(&minus));
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        h
    }

    /// The observable {self, other}, with gradient from the two Hessians.
    pub fn bracket(&self, other: &ObservableFn) -> ObservableFn {
        let (a, b) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        ObservableFn::with_gradient(
            move |x| poisson_bracket(&a, &b, x),
            move |x| {
                let (ga, gb) = (a2.gradient(x), b2.gradient(x));
                let (ha, hb) = (a2.hessian(x), b2.hessian(x));
                let jgb = apply_j(&gb);
                let jga = apply_j(&ga);
                (0..x.len())
                    .map(|r| (0..x.len()).map(|c| ha[r][c] * jgb[c] - hb[r][c] * jga[c]).sum())
                    .collect()
            },
        )
    }
}

/// J v with J = [[0, 1], [−1, 0]]: (v_q, −v_p).
fn apply_j(v: &[f64]) -> Vec<f64> {
    let l = v.len() / 2;
    v[l..].iter().copied().chain(v[..l].iter().map(|x| -x)).collect()
}

/// {F, G}(x) = ∇F·J∇G at x = (p, q).
pub fn poisson_bracket(f: &ObservableFn, g: &ObservableFn, x: &[f64]) -> f64 {
    let (gf, gg) = (f.gradient(x), g.gradient(x));
    let l = x.len() / 2;
    (0..l).map(|k| gf[k] * gg[l + k] - gf[l + k] * gg[k]).sum()
}

/// {{F,G},Q} + {{G,Q},F} + {{Q,F},G} at x.
pub fn jacobi_residual(f: &ObservableFn, g: &ObservableFn, q: &ObservableFn, x: &[f64]) -> f64 {
    poisson_bracket(&f.bracket(g), q, x) + poisson_bracket(&g.bracket(q), f, x) + poisson_bracket(&q.bracket(f), g, x)
}

/// Largest deviation of {p′_i, q′_j} = δ_ij, {p′_i, p′_j} = {q′_i, q′_j} = 0
/// for the components of a map, with each component treated as an observable.
pub fn bracket_defect(map: &super::PhaseMap, x: &[f64]) -> crate::error::Result<f64> {
    let n = 2 * map.dof;
    let l = map.jacobian(x)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for k in 0..map.dof {
                v += l[(i, k)] * l[(j, map.dof + k)] - l[(i, map.dof + k)] * l[(j, k)];
            }
            let target = if j == i + map.dof {
                1.0
            } else if i == j + map.dof {
                -1.0
            } else {
                0.0
            };
            worst = worst.max((v - target).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_pair() {
        let (p, q) = (ObservableFn::coordinate(0), ObservableFn::coordinate(1));
        assert_eq!(poisson_bracket(&p, &q, &[0.3, 0.9]), 1.0);
        assert_eq!(poisson_bracket(&q, &p, &[0.3, 0.9]), -1.0);
    }

    #[test]
    fn self_bracket_vanishes() {
        let f = ObservableFn::new(|x| x[0].sin() * x[1].exp());
        assert!(poisson_bracket(&f, &f, &[0.4, 0.2]).abs() < 1e-15);
    }

    #[test]
    fn jacobi_identity() {
        let f = ObservableFn::new(|x| x[0] * x[0] * x[1]);
        let g = ObservableFn::new(|x| x[0] * x[1] * x[1]);
        let q = ObservableFn::new(|x| x[0] + x[1]);
        assert!(jacobi_residual(&f, &g, &q, &[1.0, 2.0]).abs() <= 1e-8);
        // {p²q, pq²} = 3p²q².
        assert!((poisson_bracket(&f, &g, &[1.0, 2.0]) - 12.0).abs() < 1e-8);
    }

    #[test]
    fn gradient_agrees() {
        let f = ObservableFn::with_gradient(|x| x[0] * x[1].cos(), |x| vec![x[1].cos(), -x[0] * x[1].sin()]);
        assert!(f.gradient_consistency(&[0.7, 1.3]) < 1e-6);
    }

    #[test]
    fn polar_brackets() {
        let m = super::super::PhaseMap::polar();
        assert!(bracket_defect(&m, &[0.2, -0.4, 1.1, 0.6]).unwrap() < 1e-6);
    }
}
