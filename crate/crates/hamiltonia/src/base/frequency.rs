//! Frequency vectors with optional Diophantine constants.

use serde::{Deserialize, Serialize};

use super::fourier::HarmonicVector;
use super::real::Real;
use crate::error::{Error, Result};

/// The golden mean (1+√5)/2.
pub const GOLDEN: f64 = 1.618_033_988_749_895;

/// Diophantine constants: |ω·ν| >= 1/(C|ν|^τ) for every ν ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diophantine {
    pub c: f64,
    pub tau: f64,
}

/// Frequency vector ω ∈ R^ℓ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyVector {
    pub omega: Vec<f64>,
    pub diophantine: Option<Diophantine>,
}

/// Outcome of a Diophantine scan over 0 < |ν| <= max_norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineScan {
    /// Minimum of C|ν|^τ |ω·ν| over the scanned harmonics.
    pub min_ratio: f64,
    pub argmin: HarmonicVector,
    pub max_norm: usize,
}

impl FrequencyVector {
    pub fn new(omega: Vec<f64>) -> Self {
        FrequencyVector { omega, diophantine: None }
    }

    pub fn with_diophantine(mut self, c: f64, tau: f64) -> Self {
        self.diophantine = Some(Diophantine { c, tau });
        self
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    /// ω·ν without any check.
    pub fn dot(&self, nu: &HarmonicVector) -> f64 {
        nu.dot(&self.omega)
    }

    /// ω·ν in the working precision `T`.
    pub fn dot_in<T: Real>(&self, nu: &HarmonicVector) -> T {
        let mut s = T::zero();
        for (a, w) in nu.entries().iter().zip(&self.omega) {
            s += T::from_i64(*a) * T::from_f64(*w);
        }
        s
    }

    /// ω·ν, asserting the Diophantine bound when constants are attached.
    pub fn small_divisor(&self, nu: &HarmonicVector) -> Result<f64> {
        if nu.is_zero() {
            return Err(Error::ZeroHarmonic);
        }
        let d = self.dot(nu);
        if let Some(Diophantine { c, tau }) = self.diophantine {
            let bound = 1.0 / (c * (nu.norm() as f64).powf(tau));
            if d.abs() < bound {
                return Err(Error::DiophantineViolation { nu: nu.0.to_vec(), divisor: d, bound });
            }
        }
        Ok(d)
    }

    /// Scans 0 < |ν| <= max_norm for the smallest C|ν|^τ|ω·ν|.
    ///
    /// Norms up to 100 are scanned exhaustively.  Beyond that, in two
    /// dimensions only the two integers ν₁ nearest to −ν₂ω₂/ω₁ are examined,
    /// which is complete once C m^τ |ω₁|/2 >= 1.
    pub fn scan_diophantine(&self, max_norm: usize) -> Result<DiophantineScan> {
        let Diophantine { c, tau } =
            self.diophantine.ok_or_else(|| Error::InvalidInput("no Diophantine constants attached".into()))?;
        let ratio = |nu: &HarmonicVector| c * (nu.norm() as f64).powf(tau) * self.dot(nu).abs();
        let exhaustive = max_norm.min(100);
        let mut best = DiophantineScan { min_ratio: f64::INFINITY, argmin: HarmonicVector::zeros(self.dim()), max_norm };
        for nu in HarmonicVector::ball(self.dim(), exhaustive) {
            let r = ratio(&nu);
            if r < best.min_ratio {
                best.min_ratio = r;
                best.argmin = nu;
            }
        }
        if max_norm <= exhaustive {
            return Ok(best);
        }
        if self.dim() != 2 || c * (exhaustive as f64).powf(tau) * self.omega[0].abs() / 2.0 < 1.0 {
            return Err(Error::InvalidInput("fast scan needs dim 2 and C m^τ |ω₁|/2 >= 1".into()));
        }
        let n = max_norm as i64;
        for nu2 in -n..=n {
            let center = -(nu2 as f64) * self.omega[1] / self.omega[0];
            for nu1 in [center.floor() as i64, center.ceil() as i64] {
                let nu = HarmonicVector::new(&[nu1, nu2]);
                let norm = nu.norm();
                if norm <= exhaustive || norm > max_norm {
                    continue;
                }
                let r = ratio(&nu);
                if r < best.min_ratio {
                    best.min_ratio = r;
                    best.argmin = nu;
                }
            }
        }
        Ok(best)
    }
}

/// ω = (1, φ) with τ = 1 and C = √5.
pub fn golden_frequency() -> FrequencyVector {
    FrequencyVector::new(vec![1.0, GOLDEN]).with_diophantine(5f64.sqrt(), 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_divisors() {
        let w = golden_frequency();
        assert!((w.small_divisor(&HarmonicVector::new(&[1, 1])).unwrap() - 2.618033988749895).abs() < 1e-15);
        assert!((w.small_divisor(&HarmonicVector::new(&[-2, 1])).unwrap() + 0.381966011250105).abs() < 1e-15);
        assert_eq!(w.small_divisor(&HarmonicVector::new(&[0, 0])), Err(Error::ZeroHarmonic));
        let d = w.small_divisor(&HarmonicVector::new(&[-1, 1])).unwrap();
        assert!(d >= 1.0 / (5f64.sqrt() * 2.0));
    }

    #[test]
    fn golden_second_component() {
        assert!((golden_frequency().omega[1] - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_is_diophantine_to_ten_thousand() {
        let scan = golden_frequency().scan_diophantine(10_000).unwrap();
        assert!(scan.min_ratio >= 1.0 - 1e-12, "{scan:?}");
        let small = golden_frequency().scan_diophantine(100).unwrap();
        assert!(small.min_ratio >= 1.0 - 1e-12);
    }

    #[test]
    fn violation_reported() {
        let w = FrequencyVector::new(vec![1.0, 1.0]).with_diophantine(1.0, 1.0);
        assert!(matches!(w.small_divisor(&HarmonicVector::new(&[1, -1])), Err(Error::DiophantineViolation { .. })));
    }
}
