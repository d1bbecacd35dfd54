//! Sparse Fourier series on the ℓ-torus.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::real::Real;
use crate::error::{Error, Result};

/// Integer harmonic vector ν ∈ Z^ℓ.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicVector(pub SmallVec<[i64; 4]>);

impl HarmonicVector {
    pub fn new(entries: &[i64]) -> Self {
        HarmonicVector(SmallVec::from_slice(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        HarmonicVector(SmallVec::from_elem(0, dim))
    }

    /// Unit harmonic e_i in dimension `dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = HarmonicVector::zeros(dim);
        v.0[i] = 1;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    /// L1 norm |ν| = Σ|ν_i|.
    pub fn norm(&self) -> usize {
        self.0.iter().map(|x| x.unsigned_abs() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// ν·x for a real vector x, summed left to right.
    pub fn dot<T: Real>(&self, x: &[T]) -> T {
        let mut s = T::zero();
        for (a, b) in self.0.iter().zip(x) {
            s += T::from_i64(*a) * *b;
        }
        s
    }

    /// Integer dot product ν·μ.
    pub fn dot_int(&self, other: &HarmonicVector) -> i64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Every harmonic of dimension `dim` with 0 < |ν| <= n, in lexicographic order.
    pub fn ball(dim: usize, n: usize) -> Vec<HarmonicVector> {
        let n = n as i64;
        let mut out = Vec::new();
        let mut cur = vec![-n; dim];
        loop {
            let norm: i64 = cur.iter().map(|x| x.abs()).sum();
            if norm > 0 && norm <= n {
                out.push(HarmonicVector::new(&cur));
            }
            let mut i = dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < n {
                    cur[i] += 1;
                    break;
                }
                cur[i] = -n;
            }
        }
    }
}

impl fmt::Debug for HarmonicVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl Add for &HarmonicVector {
    type Output = HarmonicVector;
    fn add(self, b: &HarmonicVector) -> HarmonicVector {
        HarmonicVector(self.0.iter().zip(b.0.iter()).map(|(x, y)| x + y).collect())
    }
}

impl Sub for &HarmonicVector {
    type Output = HarmonicVector;
    fn sub(self, b: &HarmonicVector) -> HarmonicVector {
        HarmonicVector(self.0.iter().zip(b.0.iter()).map(|(x, y)| x - y).collect())
    }
}

impl Neg for &HarmonicVector {
    type Output = HarmonicVector;
    fn neg(self) -> HarmonicVector {
        HarmonicVector(self.0.iter().map(|x| -x).collect())
    }
}

/// Scalar complex Fourier series Σ_ν c_ν e^{iν·ψ} with a declared truncation degree.
#[derive(Clone, PartialEq)]
pub struct FourierSeries<T: Real = f64> {
    dim: usize,
    degree: usize,
    real: bool,
    coeffs: BTreeMap<HarmonicVector, Complex<T>>,
}

impl<T: Real> fmt::Debug for FourierSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierSeries")
            .field("dim", &self.dim)
            .field("degree", &self.degree)
            .field("real", &self.real)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: Real> FourierSeries<T> {
    /// Empty series on the `dim`-torus admitting harmonics with |ν| <= `degree`.
    pub fn new(dim: usize, degree: usize) -> Self {
        FourierSeries { dim, degree, real: false, coeffs: BTreeMap::new() }
    }

    /// Constant series.
    pub fn constant(dim: usize, value: Complex<T>) -> Self {
        let mut s = FourierSeries::new(dim, 0);
        if !value.is_zero() {
            s.coeffs.insert(HarmonicVector::zeros(dim), value);
        }
        s
    }

    /// Builds a series from (ν, c_ν) pairs; the degree is the largest |ν| given.
    pub fn from_terms(dim: usize, terms: &[(&[i64], Complex<T>)]) -> Result<Self> {
        let degree = terms.iter().map(|(nu, _)| HarmonicVector::new(nu).norm()).max().unwrap_or(0);
        let mut s = FourierSeries::new(dim, degree);
        for (nu, c) in terms {
            s.add_term(HarmonicVector::new(nu), *c)?;
        }
        Ok(s)
    }

    /// Marks the series as real valued; checked against the conjugation symmetry.
    pub fn into_real(mut self, tol: f64) -> Result<Self> {
        let scale = self.abs_sum().max(1.0);
        for (nu, c) in &self.coeffs {
            let other = self.coeffs.get(&-nu).copied().unwrap_or_else(Complex::zero);
            let d = *c - other.conj();
            if d.norm_sqr().to_f64().sqrt() > tol * scale {
                return Err(Error::InvalidInput(format!("coefficient at {nu:?} breaks reality")));
            }
        }
        self.real = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Declared truncation degree N.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Raises the declared truncation degree.
    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = self.degree.max(degree);
        self
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HarmonicVector, &Complex<T>)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, nu: &HarmonicVector) -> Complex<T> {
        self.coeffs.get(nu).copied().unwrap_or_else(Complex::zero)
    }

    /// Mean value (ν = 0 coefficient).
    pub fn mean(&self) -> Complex<T> {
        self.coeff(&HarmonicVector::zeros(self.dim))
    }

    /// Largest |ν| carrying a nonzero coefficient.
    pub fn support_norm(&self) -> usize {
        self.coeffs.keys().map(|k| k.norm()).max().unwrap_or(0)
    }

    /// Adds c to the coefficient of ν, failing if |ν| exceeds the declared degree.
    pub fn add_term(&mut self, nu: HarmonicVector, c: Complex<T>) -> Result<()> {
        if nu.dim() != self.dim {
            return Err(Error::InvalidInput(format!("harmonic {nu:?} has wrong dimension")));
        }
        if nu.norm() > self.degree {
            return Err(Error::TruncationExceeded { nu: nu.0.to_vec(), degree: self.degree });
        }
        if c.is_zero() {
            return Ok(());
        }
        let e = self.coeffs.entry(nu).or_insert_with(Complex::zero);
        *e = *e + c;
        Ok(())
    }

    /// Removes the ν = 0 coefficient and returns it.
    pub fn take_mean(&mut self) -> Complex<T> {
        self.coeffs.remove(&HarmonicVector::zeros(self.dim)).unwrap_or_else(Complex::zero)
    }

    /// Σ_ν |c_ν| in double precision.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr().to_f64().sqrt()).sum()
    }

    /// Σ_ν c_ν e^{iν·ψ}.
    pub fn eval(&self, angles: &[T]) -> Complex<T> {
        let mut acc = Complex::zero();
        for (nu, c) in &self.coeffs {
            let (s, co) = nu.dot(angles).sin_cos();
            acc = acc + *c * Complex::new(co, s);
        }
        acc
    }

    /// Real part of the evaluation; for real-flagged series the imaginary
    /// residue is checked against `1e-12 · Σ|c_ν|`.
    pub fn eval_real(&self, angles: &[T]) -> Result<T> {
        let z = self.eval(angles);
        if self.real {
            let bound = 1e-12 * self.abs_sum().max(f64::MIN_POSITIVE);
            if z.im.to_f64().abs() > bound {
                return Err(Error::InvalidInput(format!("imaginary residue {:e} on real series", z.im.to_f64())));
            }
        }
        Ok(z.re)
    }

    /// Applies `g(ν, c_ν)` to every coefficient; zero results are dropped.
    pub fn map<F: FnMut(&HarmonicVector, Complex<T>) -> Complex<T>>(&self, mut g: F) -> Self {
        let mut out = FourierSeries::new(self.dim, self.degree);
        out.real = false;
        for (nu, c) in &self.coeffs {
            let v = g(nu, *c);
            if !v.is_zero() {
                out.coeffs.insert(nu.clone(), v);
            }
        }
        out
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        let mut out = self.map(|_, c| c * a);
        out.real = self.real && a.im.is_zero();
        out
    }

    /// Directional derivative (v·∂_ψ): multiplies c_ν by i(v·ν).
    pub fn derivative(&self, v: &[T]) -> Self {
        let mut out = self.map(|nu, c| c * Complex::new(T::zero(), nu.dot(v)));
        out.real = self.real;
        out
    }

    /// Sum of two series; the declared degree is the larger of the two.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.degree = self.degree.max(other.degree);
        out.real = self.real && other.real;
        for (nu, c) in &other.coeffs {
            let e = out.coeffs.entry(nu.clone()).or_insert_with(Complex::zero);
            *e = *e + *c;
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Complex::one()))
    }

    /// Product (convolution of coefficients); degrees add.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = FourierSeries::new(self.dim, self.degree + other.degree);
        out.real = self.real && other.real;
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let e = out.coeffs.entry(a + b).or_insert_with(Complex::zero);
                *e = *e + *ca * *cb;
            }
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    /// Converts coefficients to another real type through `f64`-exact splitting.
    pub fn convert<U: Real>(&self, conv: impl Fn(T) -> U) -> FourierSeries<U> {
        FourierSeries {
            dim: self.dim,
            degree: self.degree,
            real: self.real,
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), Complex::new(conv(c.re), conv(c.im)))).collect(),
        }
    }

    /// Maximum coefficient distance to another series.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (nu, c) in &self.coeffs {
            let d = *c - other.coeff(nu);
            m = m.max(d.norm_sqr().to_f64().sqrt());
        }
        for (nu, c) in &other.coeffs {
            if !self.coeffs.contains_key(nu) {
                m = m.max(c.norm_sqr().to_f64().sqrt());
            }
        }
        m
    }
}

/// JSON record for one scalar coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRecord {
    pub nu: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

impl FourierSeries<f64> {
    /// Cosine term a·cos(ν·ψ) as the pair of coefficients a/2 at ±ν.
    pub fn cosine(dim: usize, nu: &[i64], a: f64) -> Self {
        let nu = HarmonicVector::new(nu);
        let mut s = FourierSeries::new(dim, nu.norm());
        s.add_term(nu.clone(), Complex::new(a / 2.0, 0.0)).expect("within degree");
        s.add_term(-&nu, Complex::new(a / 2.0, 0.0)).expect("within degree");
        s.real = true;
        s
    }

    /// Sine term a·sin(ν·ψ).
    pub fn sine(dim: usize, nu: &[i64], a: f64) -> Self {
        let nu = HarmonicVector::new(nu);
        let mut s = FourierSeries::new(dim, nu.norm());
        s.add_term(nu.clone(), Complex::new(0.0, -a / 2.0)).expect("within degree");
        s.add_term(-&nu, Complex::new(0.0, a / 2.0)).expect("within degree");
        s.real = true;
        s
    }

    /// Records sorted lexicographically by ν.
    pub fn to_records(&self) -> Vec<CoeffRecord> {
        self.coeffs.iter().map(|(nu, c)| CoeffRecord { nu: nu.0.to_vec(), re: c.re, im: c.im }).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records serialize")
    }

    /// Parses the record list; the degree is the largest |ν| present.
    pub fn from_records(dim: usize, records: &[CoeffRecord]) -> Result<Self> {
        let degree = records.iter().map(|r| HarmonicVector::new(&r.nu).norm()).max().unwrap_or(0);
        let mut s = FourierSeries::new(dim, degree);
        for r in records {
            s.add_term(HarmonicVector::new(&r.nu), Complex::new(r.re, r.im))?;
        }
        Ok(s)
    }

    pub fn from_json(dim: usize, text: &str) -> Result<Self> {
        let records: Vec<CoeffRecord> =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad series JSON: {e}")))?;
        FourierSeries::from_records(dim, &records)
    }
}

/// ℓ-vector valued Fourier series stored componentwise.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSeries<T: Real = f64> {
    pub components: Vec<FourierSeries<T>>,
}

/// JSON record for one vector coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorCoeffRecord {
    pub nu: Vec<i64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl<T: Real> VectorSeries<T> {
    pub fn zeros(dim: usize, degree: usize) -> Self {
        VectorSeries { components: (0..dim).map(|_| FourierSeries::new(dim, degree)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Coefficient vector at ν.
    pub fn coeff(&self, nu: &HarmonicVector) -> Vec<Complex<T>> {
        self.components.iter().map(|c| c.coeff(nu)).collect()
    }

    /// Union of the supports, sorted.
    pub fn support(&self) -> Vec<HarmonicVector> {
        let mut keys: Vec<HarmonicVector> =
            self.components.iter().flat_map(|c| c.iter().map(|(k, _)| k.clone())).collect();
        keys.sort();
        keys.dedup();
        keys
    }

    pub fn support_norm(&self) -> usize {
        self.components.iter().map(|c| c.support_norm()).max().unwrap_or(0)
    }

    /// u·h as a scalar series for a real vector u.
    pub fn dot_real(&self, u: &[T]) -> FourierSeries<T> {
        let degree = self.components.iter().map(|c| c.degree()).max().unwrap_or(0);
        let mut out = FourierSeries::new(self.dim(), degree);
        for (c, ui) in self.components.iter().zip(u) {
            out = out.add(&c.scale(Complex::new(*ui, T::zero())));
        }
        out
    }

    /// (iμ)·h as a scalar series.
    pub fn dot_imag_harmonic(&self, mu: &HarmonicVector) -> FourierSeries<T> {
        let degree = self.components.iter().map(|c| c.degree()).max().unwrap_or(0);
        let mut out = FourierSeries::new(self.dim(), degree);
        for (c, m) in self.components.iter().zip(mu.entries()) {
            if *m != 0 {
                out = out.add(&c.scale(Complex::new(T::zero(), T::from_i64(*m))));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        VectorSeries { components: self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale_real(&self, a: T) -> Self {
        VectorSeries { components: self.components.iter().map(|c| c.scale(Complex::new(a, T::zero()))).collect() }
    }

    pub fn derivative(&self, v: &[T]) -> Self {
        VectorSeries { components: self.components.iter().map(|c| c.derivative(v)).collect() }
    }

    pub fn eval(&self, angles: &[T]) -> Vec<Complex<T>> {
        self.components.iter().map(|c| c.eval(angles)).collect()
    }

    /// Real parts of the evaluation.
    pub fn eval_re(&self, angles: &[T]) -> Vec<T> {
        self.eval(angles).into_iter().map(|z| z.re).collect()
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a.max_diff(b)).fold(0.0, f64::max)
    }

    pub fn abs_sum(&self) -> f64 {
        self.components.iter().map(|c| c.abs_sum()).sum()
    }

    pub fn convert<U: Real>(&self, conv: impl Fn(T) -> U + Copy) -> VectorSeries<U> {
        VectorSeries { components: self.components.iter().map(|c| c.convert(conv)).collect() }
    }
}

impl VectorSeries<f64> {
    pub fn to_records(&self) -> Vec<VectorCoeffRecord> {
        self.support()
            .into_iter()
            .map(|nu| {
                let c = self.coeff(&nu);
                VectorCoeffRecord { nu: nu.0.to_vec(), re: c.iter().map(|z| z.re).collect(), im: c.iter().map(|z| z.im).collect() }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_series_evaluates_to_zero() {
        let s: FourierSeries = FourierSeries::new(2, 3);
        assert_eq!(s.eval(&[0.3, 0.1]), Complex::zero());
    }

    #[test]
    fn cosine_at_zero_is_one() {
        let s = FourierSeries::cosine(1, &[1], 1.0);
        assert!((s.eval_real(&[0.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_dimensional_cosine_vanishes_at_quarter_turn() {
        let s = FourierSeries::cosine(2, &[1, 1], 1.0);
        assert!(s.eval_real(&[PI / 2.0, 0.0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn truncation_is_enforced() {
        let mut s: FourierSeries = FourierSeries::new(2, 1);
        let err = s.add_term(HarmonicVector::new(&[1, 1]), Complex::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::TruncationExceeded { .. }));
    }

    #[test]
    fn product_of_cosines() {
        // cos a · cos a = 1/2 + cos(2a)/2
        let c = FourierSeries::cosine(1, &[1], 1.0);
        let p = c.mul(&c);
        assert!((p.mean().re - 0.5).abs() < 1e-15);
        assert!((p.coeff(&HarmonicVector::new(&[2])).re - 0.25).abs() < 1e-15);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn json_is_sorted_and_round_trips() {
        let s = FourierSeries::cosine(2, &[1, -1], 2.0).add(&FourierSeries::sine(2, &[0, 1], 1.0));
        let text = s.to_json();
        assert!(text.find("[-1,1]").unwrap() < text.find("[0,-1]").unwrap());
        let back = FourierSeries::from_json(2, &text).unwrap();
        assert_eq!(back.max_diff(&s), 0.0);
    }

    #[test]
    fn ball_counts() {
        // Number of ν in Z² with 0 < |ν| <= n is 2n(n+1).
        for n in 1..6 {
            assert_eq!(HarmonicVector::ball(2, n).len(), 2 * n * (n + 1));
        }
    }

    #[test]
    fn reality_flag_checked() {
        let bad = FourierSeries::from_terms(1, &[(&[1], Complex::new(1.0, 0.0))]).unwrap();
        assert!(bad.into_real(1e-12).is_err());
        let good = FourierSeries::sine(1, &[1], 1.0);
        assert!(good.into_real(1e-12).is_ok());
    }
}
