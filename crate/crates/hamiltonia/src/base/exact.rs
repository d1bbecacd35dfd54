//! Exact rational scalars and the tagged exact/float scalar tower.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact Gaussian rational a + ib.
pub type ExactComplex = Complex<BigRational>;

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn exact(re: BigRational, im: BigRational) -> ExactComplex {
    Complex::new(re, im)
}

/// i·r.
pub fn imag(r: BigRational) -> ExactComplex {
    Complex::new(BigRational::zero(), r)
}

pub fn exact_zero() -> ExactComplex {
    Complex::new(BigRational::zero(), BigRational::zero())
}

/// (i·n)^p exactly.
pub fn i_pow_times(n: i64, p: u32) -> ExactComplex {
    let mag = BigRational::from_integer(BigInt::from(n).pow(p));
    match p % 4 {
        0 => Complex::new(mag, BigRational::zero()),
        1 => Complex::new(BigRational::zero(), mag),
        2 => Complex::new(-mag, BigRational::zero()),
        _ => Complex::new(BigRational::zero(), -mag),
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn complex_to_f64(z: &ExactComplex) -> Complex<f64> {
    Complex::new(to_f64(&z.re), to_f64(&z.im))
}

/// |z| as an exact rational when z is real or purely imaginary.
pub fn exact_abs(z: &ExactComplex) -> Option<BigRational> {
    if z.re.is_zero() {
        Some(z.im.abs())
    } else if z.im.is_zero() {
        Some(z.re.abs())
    } else {
        None
    }
}

/// Factors z as r·i^m with r rational, when possible.
pub fn as_rational_times_i_power(z: &ExactComplex) -> Option<(BigRational, u8)> {
    if z.im.is_zero() {
        Some((z.re.clone(), 0))
    } else if z.re.is_zero() {
        Some((z.im.clone(), 1))
    } else {
        None
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Scalar tagged as exact rational or double precision.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    fn lift(a: &Scalar, b: &Scalar) -> Option<(BigRational, BigRational)> {
        match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => Some((x.clone(), y.clone())),
            _ => None,
        }
    }

    pub fn add(&self, b: &Scalar) -> Scalar {
        match Scalar::lift(self, b) {
            Some((x, y)) => Scalar::Exact(x + y),
            None => Scalar::Float(self.to_f64() + b.to_f64()),
        }
    }

    pub fn sub(&self, b: &Scalar) -> Scalar {
        match Scalar::lift(self, b) {
            Some((x, y)) => Scalar::Exact(x - y),
            None => Scalar::Float(self.to_f64() - b.to_f64()),
        }
    }

    pub fn mul(&self, b: &Scalar) -> Scalar {
        match Scalar::lift(self, b) {
            Some((x, y)) => Scalar::Exact(x * y),
            None => Scalar::Float(self.to_f64() * b.to_f64()),
        }
    }

    pub fn div(&self, b: &Scalar) -> Result<Scalar> {
        match Scalar::lift(self, b) {
            Some((_, y)) if y.is_zero() => Err(Error::InvalidInput("exact division by zero".into())),
            Some((x, y)) => Ok(Scalar::Exact(x / y)),
            None => Ok(Scalar::Float(self.to_f64() / b.to_f64())),
        }
    }

    /// Equality: exact when both are exact, otherwise within `tol` relative.
    pub fn approx_eq(&self, b: &Scalar, tol: f64) -> bool {
        match Scalar::lift(self, b) {
            Some((x, y)) => x == y,
            None => {
                let (x, y) = (self.to_f64(), b.to_f64());
                (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_field_operations() {
        let a = Scalar::Exact(rational(1, 3));
        let b = Scalar::Exact(rational(1, 6));
        assert_eq!(a.add(&b), Scalar::Exact(rational(1, 2)));
        assert_eq!(a.div(&b).unwrap(), Scalar::Exact(rational(2, 1)));
        assert!(a.div(&Scalar::Exact(rational(0, 1))).is_err());
    }

    #[test]
    fn mixed_falls_back_to_float() {
        let a = Scalar::Exact(rational(1, 4));
        let b = Scalar::Float(0.5);
        assert!(a.mul(&b).approx_eq(&Scalar::Float(0.125), 1e-15));
    }

    #[test]
    fn powers_of_i() {
        assert_eq!(i_pow_times(2, 3), Complex::new(rational(0, 1), rational(-8, 1)));
        assert_eq!(as_rational_times_i_power(&imag(rational(1, 2))), Some((rational(1, 2), 1)));
    }
}
