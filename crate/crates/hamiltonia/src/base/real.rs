//! Real scalar abstraction over `f64` and double-double arithmetic.
//!
//! Series routines are generic over [`Real`] so the same code can run in
//! ordinary double precision or in [`DoubleDouble`] (about 32 significant
//! digits) when a residual must be resolved below the `f64` rounding floor.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

/// Minimal real-number interface used by the series code.
pub trait Real:
    Copy
    + fmt::Debug
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sin_cos(self) -> (Self, Self);
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const TWO_PI: DoubleDouble = DoubleDouble { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };
const HALF_PI: DoubleDouble = DoubleDouble { hi: 1.5707963267948966, lo: 6.123233995736766e-17 };
const DD_EPS: f64 = 1e-33;

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    /// 2π to double-double precision.
    pub fn two_pi() -> Self {
        TWO_PI
    }

    fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let (s, e) = quick_two_sum(hi, self.lo.round());
            DoubleDouble::new(s, e)
        } else if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            // Tie in the high part is broken by the sign of the low part.
            let adj = if self.lo > 0.0 && hi < self.hi { 1.0 } else if self.lo < 0.0 && hi > self.hi { -1.0 } else { 0.0 };
            DoubleDouble::new(hi + adj, 0.0)
        } else {
            DoubleDouble::new(hi, 0.0)
        }
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (s, e) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble::new(s, e)
    }

    /// Taylor series for sin and cos on |x| <= π/4.
    fn sin_cos_reduced(x: Self) -> (Self, Self) {
        let x2 = x * x;
        let mut sin = x;
        let mut cos = DoubleDouble::one();
        let mut term_s = x;
        let mut term_c = DoubleDouble::one();
        let mut n = 1.0f64;
        loop {
            term_c = -(term_c * x2) / DoubleDouble::from_f64(n * (n + 1.0));
            term_s = -(term_s * x2) / DoubleDouble::from_f64((n + 1.0) * (n + 2.0));
            cos += term_c;
            sin += term_s;
            n += 2.0;
            if term_c.hi.abs() < DD_EPS && term_s.hi.abs() < DD_EPS {
                break;
            }
        }
        (sin, cos)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}{:+e}", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hi)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::new(x, 0.0)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (s, e) = quick_two_sum(s, e + f);
        DoubleDouble::new(s, e)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble::new(-self.hi, -self.lo)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (s, e) = quick_two_sum(p, e);
        DoubleDouble::new(s, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        DoubleDouble::new(s, e) + DoubleDouble::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let q = if q.hi >= 0.0 { DoubleDouble::new(q.hi.floor(), 0.0) } else { DoubleDouble::new(q.hi.ceil(), 0.0) };
        self - q * b
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}
impl SubAssign for DoubleDouble {
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}
impl MulAssign for DoubleDouble {
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}
impl DivAssign for DoubleDouble {
    fn div_assign(&mut self, b: Self) {
        *self = *self / b;
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::new(1.0, 0.0)
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(DoubleDouble::from)
    }
}

impl Real for DoubleDouble {
    fn from_f64(x: f64) -> Self {
        DoubleDouble::new(x, 0.0)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn sin_cos(self) -> (Self, Self) {
        let k = (self / TWO_PI).round();
        let r = self - k * TWO_PI;
        let j = (r / HALF_PI).round();
        let r = r - j * HALF_PI;
        let (s, c) = DoubleDouble::sin_cos_reduced(r);
        match (j.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::zero();
        }
        let q = self.hi.sqrt();
        let (p, e) = two_prod(q, q);
        let resid = (self - DoubleDouble::new(p, e)).hi;
        let (s, e) = quick_two_sum(q, resid / (2.0 * q));
        DoubleDouble::new(s, e)
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        DoubleDouble::new(hi, lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(hi: f64, lo: f64) -> DoubleDouble {
        DoubleDouble::new(hi, lo)
    }

    fn close(a: DoubleDouble, b: DoubleDouble, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol
    }

    #[test]
    fn one_third_has_low_word() {
        let t = DoubleDouble::one() / DoubleDouble::from_f64(3.0);
        let back = t * DoubleDouble::from_f64(3.0);
        assert!(close(back, DoubleDouble::one(), 1e-31));
        assert!(t.lo != 0.0);
    }

    // Reference values from a 40-digit evaluation, split into (hi, lo).
    #[test]
    fn trig_matches_high_precision_reference() {
        let cases = [
            (1.0, 0.8414709848078965066525023216302989996226, 0.5403023058681397174009366074429766037323),
            (0.3, 0.2955202066613395644989550807669445010439, 0.9553364891256060229232436043420874092269),
            (2.5, 0.5984721441039564940518547021861622717036, -0.8011436155469337148335027904673516644286),
            (10.0, -0.5440211108893698134047476618513772816836, -0.8390715290764524522588639478240648345199),
        ];
        for (x, s, c) in cases {
            let (ss, cc) = DoubleDouble::from_f64(x).sin_cos();
            assert!((ss.to_f64() - s).abs() < 1e-16);
            assert!((cc.to_f64() - c).abs() < 1e-16);
            // sin² + cos² = 1 to double-double precision.
            assert!(close(ss * ss + cc * cc, DoubleDouble::one(), 1e-30));
        }
    }

    #[test]
    fn sin_of_one_low_word() {
        // sin(1) split from a 50-digit evaluation.
        let (s, _) = DoubleDouble::from_f64(1.0).sin_cos();
        let expect = dd(0.8414709848078965, 1.776845092935536e-18);
        assert!(close(s, expect, 1e-30), "{s:?}");
    }

    #[test]
    fn sqrt_two_squared() {
        let r = DoubleDouble::from_f64(2.0).sqrt();
        assert!(close(r * r, DoubleDouble::from_f64(2.0), 1e-31));
    }

    #[test]
    fn double_angle_identity() {
        let x = dd(0.7, 1.3e-18);
        let (s, c) = x.sin_cos();
        let (s2, _) = (x + x).sin_cos();
        assert!(close(s2, DoubleDouble::from_f64(2.0) * s * c, 1e-31));
    }
}
