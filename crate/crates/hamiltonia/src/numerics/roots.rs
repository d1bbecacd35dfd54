//! Bracketed scalar root finding.

use roots::{find_root_brent, SimpleConvergency};

use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket [a, b].
pub fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidInput(format!("no sign change on [{a}, {b}]")));
    }
    let mut conv = SimpleConvergency { eps: tol, max_iter: 500 };
    match find_root_brent(a, b, &f, &mut conv) {
        Ok(x) => Ok(x),
        // Tolerances below the float spacing of the root: finish by bisection.
        Err(_) => bisect(&f, a.min(b), a.max(b), tol, 2000),
    }
}

/// Walks from `start` in direction `step` (geometric growth) until `f` changes
/// sign, then refines with Brent.  Returns `None` if `limit` is crossed first.
pub fn bracket_outward<F: Fn(f64) -> f64>(f: F, start: f64, step: f64, limit: f64, tol: f64) -> Result<Option<f64>> {
    let f0 = f(start);
    if f0 == 0.0 {
        return Ok(Some(start));
    }
    let mut a = start;
    let mut h = step;
    loop {
        let mut b = a + h;
        let past = if step > 0.0 { b >= limit } else { b <= limit };
        if past {
            b = limit;
        }
        if f(b).signum() != f0.signum() {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            return brent(&f, lo, hi, tol).map(Some);
        }
        if past {
            return Ok(None);
        }
        a = b;
        h *= 1.6;
    }
}

/// Plain bisection, used where a guaranteed bracket exists.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let mut fa = f(a);
    if fa.signum() == f(b).signum() && fa != 0.0 {
        return Err(Error::InvalidInput(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, detail: "bisection".into() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt_two() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn outward_bracket() {
        let r = bracket_outward(|x| x - 5.0, 0.0, 0.1, 100.0, 1e-14).unwrap().unwrap();
        assert!((r - 5.0).abs() < 1e-13);
        assert!(bracket_outward(|x| x + 1.0, 0.0, 0.1, 10.0, 1e-14).unwrap().is_none());
    }

    #[test]
    fn bisection() {
        let r = bisect(|x| x.cos() - x, 0.0, 1.0, 1e-15, 200).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
    }
}
