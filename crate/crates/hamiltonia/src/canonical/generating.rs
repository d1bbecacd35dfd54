//! Canonical maps induced by generating functions of the four mixed types,
//! with the implicit relation solved by Newton's method in a box.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::map::PhaseMap;
use crate::error::{Error, Result};
use crate::numerics::ode::{integrate, OdeOptions};
use crate::numerics::quad;
use crate::numerics::roots::brent;
use crate::quadrature::Potential1D;

/// Which pair of old/new variables the generator depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratingFamily {
    /// Φ(p′, q): p = ∂_qΦ, q′ = ∂_{p′}Φ.
    NewMomentumOldPosition,
    /// Γ(q, q′): p = ∂_qΓ, p′ = −∂_{q′}Γ.
    OldPositionNewPosition,
    /// F(p, q′): q = −∂_pF, p′ = −∂_{q′}F.
    OldMomentumNewPosition,
    /// G(p, p′): q = −∂_pG, q′ = ∂_{p′}G.
    OldMomentumNewMomentum,
}

type Generator = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
type GeneratorGrad = Arc<dyn Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// Generator W(a, b) of a given family with optional analytic gradient
/// (∂_aW, ∂_bW); the argument order follows the family name.
#[derive(Clone)]
pub struct GeneratingFunction {
    pub family: GeneratingFamily,
    pub dof: usize,
    value: Generator,
    grad: Option<GeneratorGrad>,
}

/// Box in which the implicitly solved variable must stay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DomainBox {
    pub fn cube(dof: usize, lo: f64, hi: f64) -> Self {
        DomainBox { lo: vec![lo; dof], hi: vec![hi; dof] }
    }

    fn contains(&self, u: &[f64]) -> bool {
        u.iter().zip(&self.lo).zip(&self.hi).all(|((x, a), b)| x >= a && x <= b)
    }
}

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX: usize = 60;
const GRAD_STEP: f64 = 1e-5;
const STALL_ACCEPT: f64 = 1e-9;

impl GeneratingFunction {
    pub fn new<W>(family: GeneratingFamily, dof: usize, w: W) -> Self
    where
        W: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        GeneratingFunction { family, dof, value: Arc::new(w), grad: None }
    }

    pub fn with_gradient<D>(mut self, d: D) -> Self
    where
        D: Fn(&[f64], &[f64]) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(d));
        self
    }

    pub fn value(&self, a: &[f64], b: &[f64]) -> f64 {
        (self.value)(a, b)
    }

    /// (∂_aW, ∂_bW), analytic when supplied, else Richardson differences.
    pub fn gradient(&self, a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        if let Some(g) = &self.grad {
            return g(a, b);
        }
        let mut joint: Vec<f64> = a.iter().chain(b).copied().collect();
        let n = self.dof;
        let mut out = vec![0.0; 2 * n];
        for j in 0..2 * n {
            let h = GRAD_STEP * (1.0 + joint[j].abs());
            let mut central = |h: f64| {
                let x0 = joint[j];
                joint[j] = x0 + h;
                let fp = self.value(&joint[..n], &joint[n..]);
                joint[j] = x0 - h;
                let fm = self.value(&joint[..n], &joint[n..]);
                joint[j] = x0;
                (fp - fm) / (2.0 * h)
            };
            let (d1, d2) = (central(h), central(h / 2.0));
            out[j] = (4.0 * d2 - d1) / 3.0;
        }
        (out[..n].to_vec(), out[n..].to_vec())
    }

    /// Maps (p, q) to (p′, q′) by solving the implicit relation in `domain`.
    pub fn apply(&self, x: &[f64], domain: &DomainBox) -> Result<Vec<f64>> {
        let n = self.dof;
        let (p, q) = x.split_at(n);
        use GeneratingFamily::*;
        // Unknown u, and the equation residual(u) = 0.
        let residual = |u: &[f64]| -> Vec<f64> {
            match self.family {
                NewMomentumOldPosition => self.gradient(u, q).1.iter().zip(p).map(|(a, b)| a - b).collect(),
                OldPositionNewPosition => self.gradient(q, u).0.iter().zip(p).map(|(a, b)| a - b).collect(),
                OldMomentumNewPosition | OldMomentumNewMomentum => {
                    self.gradient(p, u).0.iter().zip(q).map(|(a, b)| -a - b).collect()
                }
            }
        };
        let guess: Vec<f64> = match self.family {
            NewMomentumOldPosition | OldMomentumNewMomentum => p.to_vec(),
            OldPositionNewPosition | OldMomentumNewPosition => q.to_vec(),
        };
        let u = newton_in_box(residual, guess, domain)?;
        Ok(match self.family {
            NewMomentumOldPosition => {
                let (ga, _) = self.gradient(&u, q);
                u.iter().copied().chain(ga).collect()
            }
            OldPositionNewPosition => {
                let (_, gb) = self.gradient(q, &u);
                gb.iter().map(|v| -v).chain(u.iter().copied()).collect()
            }
            OldMomentumNewPosition => {
                let (_, gb) = self.gradient(p, &u);
                gb.iter().map(|v| -v).chain(u.iter().copied()).collect()
            }
            OldMomentumNewMomentum => {
                let (_, gb) = self.gradient(p, &u);
                u.iter().copied().chain(gb).collect()
            }
        })
    }
}

fn newton_in_box<R: Fn(&[f64]) -> Vec<f64>>(residual: R, guess: Vec<f64>, domain: &DomainBox) -> Result<Vec<f64>> {
    let n = guess.len();
    let mut u: Vec<f64> = guess.iter().zip(&domain.lo).zip(&domain.hi).map(|((x, a), b)| x.clamp(*a, *b)).collect();
    let mut best = (f64::INFINITY, u.clone());
    let mut stalls = 0;
    for _ in 0..NEWTON_MAX {
        let r = residual(&u);
        let norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !norm.is_finite() {
            return Err(Error::ImplicitSolveFailed("non-finite residual".into()));
        }
        if norm <= NEWTON_TOL {
            return Ok(u);
        }
        if norm < 0.5 * best.0 {
            stalls = 0;
        } else {
            stalls += 1;
        }
        if norm < best.0 {
            best = (norm, u.clone());
        }
        // Residuals from differenced gradients stop improving at their noise floor.
        if stalls >= 2 && best.0 <= STALL_ACCEPT {
            return Ok(best.1);
        }
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let h = 1e-6 * (1.0 + u[j].abs());
            let mut up = u.clone();
            let mut um = u.clone();
            up[j] += h;
            um[j] -= h;
            let (rp, rm) = (residual(&up), residual(&um));
            for i in 0..n {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(&r))
            .ok_or_else(|| Error::ImplicitSolveFailed("mixed Hessian of the generator is singular".into()))?;
        for j in 0..n {
            u[j] -= step[j];
        }
        if !domain.contains(&u) {
            return Err(Error::ImplicitSolveFailed(format!("iterate {u:?} left the domain box")));
        }
    }
    if best.0 <= STALL_ACCEPT {
        return Ok(best.1);
    }
    Err(Error::ImplicitSolveFailed(format!("no convergence in {NEWTON_MAX} Newton steps")))
}

/// The canonical map generated by `gen` on `domain`.
pub fn map_from_generating_function(gen: &GeneratingFunction, domain: DomainBox) -> PhaseMap {
    let g = gen.clone();
    PhaseMap::new(&format!("{:?}", gen.family), gen.dof, move |x| g.apply(x, &domain))
}

/// Φ(p′, q) = p′·R(q) with R(q)_i = q_i + c sin q_i.
pub fn point_transformation_generator(dof: usize, c: f64) -> GeneratingFunction {
    GeneratingFunction::new(GeneratingFamily::NewMomentumOldPosition, dof, move |pp, q| {
        pp.iter().zip(q).map(|(a, x)| a * (x + c * x.sin())).sum()
    })
    .with_gradient(move |pp, q| {
        (q.iter().map(|x| x + c * x.sin()).collect(), pp.iter().zip(q).map(|(a, x)| a * (1.0 + c * x.cos())).collect())
    })
}

/// S(q, E) = ∫₀^q √(2m(E − ½mω²x²)) dx as a generator of type Φ(E, q),
/// producing the energy-time chart (p, q) → (E, t) for p > 0.
pub fn harmonic_energy_time_generator(m: f64, omega: f64) -> GeneratingFunction {
    let amp = move |e: f64| (2.0 * e / (m * omega * omega)).sqrt();
    GeneratingFunction::new(GeneratingFamily::NewMomentumOldPosition, 1, move |e, q| {
        let a = amp(e[0]);
        let x = q[0];
        0.5 * m * omega * (x * (a * a - x * x).max(0.0).sqrt() + a * a * (x / a).asin())
    })
    .with_gradient(move |e, q| {
        let a = amp(e[0]);
        let p = (2.0 * m * (e[0] - 0.5 * m * omega * omega * q[0] * q[0])).max(0.0).sqrt();
        (vec![(q[0] / a).asin() / omega], vec![p])
    })
}

/// Residuals of p = ∂_qS and t = ∂_ES at a point of a one-dimensional system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTimeCheck {
    pub energy: f64,
    /// Travel time from q₀ to q along the flow, measured by integration.
    pub time: f64,
    pub dq_residual: f64,
    pub de_residual: f64,
}

/// Checks the energy-time generator S(q, E) = ∫_{q₀}^q √(2m(E − V)) at a
/// point (p, q) with p > 0 reached from q₀ with positive momentum.
pub fn energy_time_check(pot: &Potential1D, q0: f64, p: f64, q: f64) -> Result<EnergyTimeCheck> {
    if !(p > 0.0) || !(q > q0) {
        return Err(Error::InvalidInput("need p > 0 and q > q₀ on the rising branch".into()));
    }
    let m = pot.mass;
    let e = pot.energy(p, q);
    let s = |x: f64, en: f64| quad::integrate(|y| (2.0 * m * (en - pot.value(y))).max(0.0).sqrt(), q0, x, 1e-15);
    let h = 1e-4;
    let ds_dq = (8.0 * (s(q + h, e) - s(q - h, e)) - (s(q + 2.0 * h, e) - s(q - 2.0 * h, e))) / (12.0 * h);
    let ds_de = (8.0 * (s(q, e + h) - s(q, e - h)) - (s(q, e + 2.0 * h) - s(q, e - 2.0 * h))) / (12.0 * h);
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = -pot.derivative(y[1]);
        dy[1] = y[0] / m;
    };
    let p0 = (2.0 * m * (e - pot.value(q0))).sqrt();
    let y0 = [p0, q0];
    let opts = OdeOptions::tight();
    let guess = ds_de.abs().max(1e-3) * 2.0;
    let reach = |t: f64| integrate(rhs, 0.0, &y0, t, opts).map(|y| y[1] - q).unwrap_or(f64::NAN);
    let time = brent(reach, 0.0, guess, 1e-14)?;
    Ok(EnergyTimeCheck { energy: e, time, dq_residual: ds_dq - p, de_residual: ds_de - time })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_generator_is_identity() {
        let g = GeneratingFunction::new(GeneratingFamily::NewMomentumOldPosition, 2, |pp, q| pp[0] * q[0] + pp[1] * q[1]);
        let y = g.apply(&[0.3, -0.2, 1.0, 0.5], &DomainBox::cube(2, -10.0, 10.0)).unwrap();
        for (a, b) in y.iter().zip([0.3, -0.2, 1.0, 0.5]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn point_transformation_is_canonical() {
        let m = map_from_generating_function(&point_transformation_generator(2, 0.1), DomainBox::cube(2, -50.0, 50.0));
        let x = [0.4, -0.9, 1.3, 2.2];
        assert!(m.symplectic_residual(&x).unwrap() < 1e-6);
        let y = m.apply(&x).unwrap();
        assert!((y[2] - (1.3 + 0.1 * 1.3f64.sin())).abs() < 1e-14);
        assert!((y[0] * (1.0 + 0.1 * 1.3f64.cos()) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn other_families() {
        let dom = DomainBox::cube(1, -20.0, 20.0);
        // Γ(q, q′) = q q′ sends (p, q) to (−q, p).
        let g = GeneratingFunction::new(GeneratingFamily::OldPositionNewPosition, 1, |q, qq| q[0] * qq[0]);
        let y = g.apply(&[0.7, 0.2], &dom).unwrap();
        assert!((y[0] + 0.2).abs() < 1e-9 && (y[1] - 0.7).abs() < 1e-9);
        // F(p, q′) = −p q′ is the identity.
        let f = GeneratingFunction::new(GeneratingFamily::OldMomentumNewPosition, 1, |p, qq| -p[0] * qq[0]);
        let y = f.apply(&[0.7, 0.2], &dom).unwrap();
        assert!((y[0] - 0.7).abs() < 1e-9 && (y[1] - 0.2).abs() < 1e-9);
        // G(p, p′) = −p p′ + p′²/2: q = p′, q′ = −p + p′.
        let gg = GeneratingFunction::new(GeneratingFamily::OldMomentumNewMomentum, 1, |p, pp| -p[0] * pp[0] + 0.5 * pp[0] * pp[0]);
        let m = map_from_generating_function(&gg, dom);
        assert!(m.symplectic_residual(&[0.7, 0.2]).unwrap() < 1e-6);
    }

    #[test]
    fn leaving_box_fails() {
        let m = map_from_generating_function(&point_transformation_generator(1, 0.1), DomainBox::cube(1, -0.1, 0.1));
        assert!(matches!(m.apply(&[5.0, 0.0]), Err(Error::ImplicitSolveFailed(_))));
    }

    #[test]
    fn energy_time_chart() {
        let (mass, omega) = (1.5, 0.8);
        let g = harmonic_energy_time_generator(mass, omega);
        let m = map_from_generating_function(&g, DomainBox::cube(1, 1e-6, 100.0));
        let x = [0.9, 0.4];
        let y = m.apply(&x).unwrap();
        let e = 0.81 / 3.0 + 0.5 * mass * omega * omega * 0.16;
        assert!((y[0] - e).abs() < 1e-12);
        assert!(m.symplectic_residual(&x).unwrap() < 1e-6);
        let pot = Potential1D::harmonic(mass, omega);
        let c = energy_time_check(&pot, 0.0, x[0], x[1]).unwrap();
        assert!(c.dq_residual.abs() < 1e-8 && c.de_residual.abs() < 1e-8, "{c:?}");
        assert!((c.time - y[1]).abs() < 1e-10);
    }
}
