//! Exact Fourier coefficients h⁽ᵏ⁾_ν of the eccentric-anomaly series
//! ξ − λ = Σ_k e^k h⁽ᵏ⁾(λ), computed three independent ways: the
//! order-by-order recursion, the sum over labeled trees, and the closed
//! form (1/k!) ∂^{k−1} sin^k.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::base::exact::{binomial, complex_to_f64, exact_zero, factorial, i_pow_times, ExactComplex};
use crate::base::{FourierSeries, HarmonicVector};
use crate::error::{Error, Result};
use crate::trees::{Forest, TreeFilter};

/// Sparse exact Fourier series in one angle: ν → coefficient.
pub type ExactSeries = BTreeMap<i64, ExactComplex>;

fn add_into(target: &mut ExactSeries, nu: i64, c: ExactComplex) {
    if c.re.is_zero() && c.im.is_zero() {
        return;
    }
    let slot = target.entry(nu).or_insert_with(exact_zero);
    *slot = &*slot + c;
    if slot.re.is_zero() && slot.im.is_zero() {
        target.remove(&nu);
    }
}

fn convolve(a: &ExactSeries, b: &ExactSeries) -> ExactSeries {
    let mut out = ExactSeries::new();
    for (na, ca) in a {
        for (nb, cb) in b {
            add_into(&mut out, na + nb, ca * cb);
        }
    }
    out
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Coefficients h⁽¹⁾..h⁽ᵏ⁾ from the recursion
/// h⁽ᵏ⁾_ν = −Σ_{p≥1} (1/p!) Σ_{ν₀=±1} (iν₀)^{p+1} c_{ν₀} [(h^p)⁽ᵏ⁻¹⁾]_{ν−ν₀},
/// with h⁽¹⁾_ν = −iν c_ν and c_{±1} = 1/2.
pub fn kepler_series_recursion(k: usize) -> Result<Vec<ExactSeries>> {
    if k == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    // h[m] for m = 1..; s[p][m] = order-m part of h^p.
    let mut h: Vec<ExactSeries> = vec![ExactSeries::new()];
    let mut s: Vec<Vec<ExactSeries>> = vec![vec![ExactSeries::new(); k + 1]; k + 1];
    for order in 1..=k {
        let mut next = ExactSeries::new();
        if order == 1 {
            for nu0 in [1i64, -1] {
                add_into(&mut next, nu0, i_pow_times(nu0, 1) * Complex::new(-half(), BigRational::zero()));
            }
        } else {
            let m = order - 1;
            for p in 1..=m {
                let pf = BigRational::from_integer(factorial(p as u32));
                for nu0 in [1i64, -1] {
                    let pref = i_pow_times(nu0, p as u32 + 1) * Complex::new(-half() / &pf, BigRational::zero());
                    for (nu, c) in &s[p][m] {
                        add_into(&mut next, nu + nu0, &pref * c);
                    }
                }
            }
        }
        h.push(next);
        // Extend products with the new order.
        s[1][order] = h[order].clone();
        for p in 2..=order {
            let mut acc = ExactSeries::new();
            for j in 1..=(order + 1 - p) {
                for (nu, c) in convolve(&h[j], &s[p - 1][order - j]) {
                    add_into(&mut acc, nu, c);
                }
            }
            s[p][order] = acc;
        }
    }
    h.remove(0);
    Ok(h)
}

/// Exact Fourier coefficients of (1/k!) ∂^{k−1} sin^k ψ.
pub fn lagrange_series(k: usize) -> ExactSeries {
    let mut out = ExactSeries::new();
    let kk = k as u32;
    // sin^k = (2i)^{−k} Σ_j C(k,j) (−1)^{k−j} e^{i(2j−k)ψ}; (2i)^{−k} = 2^{−k} (−i)^k.
    let two_k = BigRational::from_integer(BigInt::from(2).pow(kk));
    let kf = BigRational::from_integer(factorial(kk));
    for j in 0..=kk {
        let nu = 2 * j as i64 - k as i64;
        let sign = if (k - j as usize) % 2 == 0 { 1 } else { -1 };
        let mag = BigRational::from_integer(binomial(kk, j) * BigInt::from(sign)) / (&two_k * &kf);
        let c = i_pow_times(-1, kk) * Complex::new(mag, BigRational::zero()) * i_pow_times(nu, kk - 1);
        add_into(&mut out, nu, c);
    }
    out
}

/// Evaluates (1/k!) ∂^{k−1} sin^k at ψ from its exact Fourier expansion.
pub fn lagrange_coefficient(k: usize, psi: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    Ok(eval_exact(&lagrange_series(k), psi))
}

/// Real part of Σ_ν c_ν e^{iνψ}.
pub fn eval_exact(series: &ExactSeries, psi: f64) -> f64 {
    series
        .iter()
        .map(|(nu, c)| {
            let z = complex_to_f64(c);
            let (s, co) = (*nu as f64 * psi).sin_cos();
            z.re * co - z.im * s
        })
        .sum()
}

/// Σ_ν |h_ν| exactly (coefficients are purely imaginary or real).
pub fn exact_abs_sum(series: &ExactSeries) -> Option<BigRational> {
    let mut total = BigRational::zero();
    for c in series.values() {
        total += crate::base::exact::exact_abs(c)?;
    }
    Some(total)
}

/// Per-order, per-ν tree sums of the Kepler expansion.
struct TreeSums {
    all: ExactSeries,
    nonzero: ExactSeries,
}

fn tree_sums(k: usize, budget: u64) -> Result<TreeSums> {
    let alphabet = [HarmonicVector::new(&[1]), HarmonicVector::new(&[-1])];
    if k == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let forest = Forest::build(&alphabet, k - 1, TreeFilter::All, budget)?;
    // sign(id): Π_{internal lines} ν_{v′}ν_v; clean(id): no zero-current line inside or on top.
    let mut sign: Vec<i64> = Vec::with_capacity(forest.len());
    let mut clean: Vec<bool> = Vec::with_capacity(forest.len());
    for id in 0..forest.len() {
        let nu = forest.harmonic(id).entries()[0];
        let mut sg = 1;
        let mut ok = forest.current(id)[0] != 0;
        for &c in forest.children(id) {
            sg *= nu * forest.harmonic(c as usize).entries()[0] * sign[c as usize];
            ok &= clean[c as usize];
        }
        sign.push(sg);
        clean.push(ok);
    }
    let mut sums = TreeSums { all: ExactSeries::new(), nonzero: ExactSeries::new() };
    let scale = BigRational::new(BigInt::one(), BigInt::from(2).pow(k as u32));
    forest.for_each(k, &mut |view| {
        let nu = view.harmonic().entries()[0];
        let mut sg = nu;
        let mut ok = view.current.entries()[0] != 0;
        for &c in view.children {
            sg *= nu * forest.harmonic(c as usize).entries()[0] * sign[c as usize];
            ok &= clean[c as usize];
        }
        // Σ over the k!/|Aut| labelings of (−i/k!) Π ν_{v′}ν_v Π c = −i sign 2^{−k}/|Aut|.
        let v = BigRational::new(BigInt::from(-sg), BigInt::from(view.aut)) * &scale;
        let c = Complex::new(BigRational::zero(), v);
        let cur = view.current.entries()[0];
        if ok {
            add_into(&mut sums.nonzero, cur, c.clone());
        }
        add_into(&mut sums.all, cur, c);
    })?;
    Ok(sums)
}

/// h⁽ᵏ⁾ as a sum over canonical trees of order k; with `nonzero_only` the
/// sum is restricted to trees whose lines all carry nonzero current.
pub fn kepler_series_trees(k: usize, nonzero_only: bool, budget: u64) -> Result<ExactSeries> {
    let sums = tree_sums(k, budget)?;
    Ok(if nonzero_only { sums.nonzero } else { sums.all })
}

/// Sum of tree values over trees of order k with at least one zero-current
/// line, per root current.
pub fn zero_current_sum(k: usize, budget: u64) -> Result<ExactSeries> {
    let sums = tree_sums(k, budget)?;
    let mut out = sums.all;
    for (nu, c) in sums.nonzero {
        add_into(&mut out, nu, -c);
    }
    Ok(out)
}

/// Converts an exact series to a real-flagged floating Fourier series.
pub fn exact_to_fourier(series: &ExactSeries) -> FourierSeries {
    let degree = series.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0);
    let mut out = FourierSeries::new(1, degree);
    for (nu, c) in series {
        out.add_term(HarmonicVector::new(&[*nu]), complex_to_f64(c)).expect("degree covers support");
    }
    out.into_real(1e-15).expect("Kepler coefficients satisfy the reality condition")
}

/// True when the series is a real odd function: imaginary coefficients with
/// c_{−ν} = −c_ν and no constant term.
pub fn is_odd_imaginary(series: &ExactSeries) -> bool {
    !series.contains_key(&0)
        && series.iter().all(|(nu, c)| c.re.is_zero() && series.get(&-nu).map_or(false, |d| d.im == -c.im.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::exact::rational;
    use crate::trees::DEFAULT_BUDGET;

    fn im(n: i64, d: i64) -> ExactComplex {
        Complex::new(BigRational::zero(), rational(n, d))
    }

    #[test]
    fn first_orders() {
        let h = kepler_series_recursion(2).unwrap();
        assert_eq!(h[0], ExactSeries::from([(-1, im(1, 2)), (1, im(-1, 2))]));
        assert_eq!(h[1], ExactSeries::from([(-2, im(1, 4)), (2, im(-1, 4))]));
    }

    #[test]
    fn recursion_matches_lagrange() {
        let h = kepler_series_recursion(10).unwrap();
        for (k, hk) in h.iter().enumerate() {
            assert_eq!(*hk, lagrange_series(k + 1), "order {}", k + 1);
            assert!(!hk.contains_key(&0));
            assert!(hk.keys().all(|n| n.unsigned_abs() as usize <= k + 1));
            assert!(is_odd_imaginary(hk));
        }
    }

    #[test]
    fn trees_match_recursion() {
        let h = kepler_series_recursion(6).unwrap();
        for k in 1..=6 {
            assert_eq!(kepler_series_trees(k, false, DEFAULT_BUDGET).unwrap(), h[k - 1], "order {k}");
            assert_eq!(kepler_series_trees(k, true, DEFAULT_BUDGET).unwrap(), h[k - 1], "order {k}");
        }
    }

    #[test]
    fn zero_current_trees_cancel() {
        for k in 2..=5 {
            assert!(zero_current_sum(k, DEFAULT_BUDGET).unwrap().is_empty());
        }
    }

    #[test]
    fn lagrange_values() {
        assert!((lagrange_coefficient(1, std::f64::consts::FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((lagrange_coefficient(2, std::f64::consts::FRAC_PI_4).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coefficient_bound() {
        for (k, hk) in kepler_series_recursion(8).unwrap().iter().enumerate() {
            let s = exact_abs_sum(hk).unwrap();
            assert!(s <= BigRational::from_integer(BigInt::from(4).pow(k as u32 + 1)));
        }
    }
}
