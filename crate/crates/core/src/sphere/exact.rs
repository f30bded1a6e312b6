//! Exact Gaussian-rational arithmetic for maps whose coefficients are (to
//! double precision) small-denominator rationals.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::poly::Poly;

/// Largest denominator accepted when recognizing a float as a rational.
pub const MAX_DENOMINATOR: i64 = 4096;
const RECOGNIZE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn zero() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        GaussRat {
            re: BigRational::from_integer(1.into()),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// Recognizes `z` as a Gaussian rational with denominators at most
    /// [`MAX_DENOMINATOR`], or returns `None`.
    pub fn recognize(z: Complex64) -> Option<Self> {
        Some(GaussRat {
            re: recognize_real(z.re)?,
            im: recognize_real(z.im)?,
        })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRat {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    /// Total bit size of all numerators and denominators.
    pub fn bits(&self) -> u64 {
        [&self.re, &self.im]
            .iter()
            .map(|r| r.numer().bits() + r.denom().bits())
            .sum()
    }
}

fn recognize_real(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    // continued-fraction convergents
    let tol = RECOGNIZE_TOL * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > MAX_DENOMINATOR as i128 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - x).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

/// Polynomial with Gaussian-rational coefficients, ascending order, trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPoly {
    coeffs: Vec<GaussRat>,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ExactPoly { coeffs }
    }

    pub fn recognize(p: &Poly) -> Option<Self> {
        p.coeffs()
            .iter()
            .map(|&c| GaussRat::recognize(c))
            .collect::<Option<Vec<_>>>()
            .map(ExactPoly::new)
    }

    pub fn coeff(&self, k: usize) -> GaussRat {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: &GaussRat) -> GaussRat {
        self.coeffs
            .iter()
            .rev()
            .fold(GaussRat::zero(), |acc, c| &(&acc * z) + c)
    }

    /// Coefficients of `t -> p(c + t)`.
    pub fn shift(&self, c: &GaussRat) -> ExactPoly {
        let mut out: Vec<GaussRat> = Vec::with_capacity(self.coeffs.len());
        for a in self.coeffs.iter().rev() {
            out.push(GaussRat::zero());
            for k in (1..out.len()).rev() {
                out[k] = &out[k - 1] + &(&out[k] * c);
            }
            out[0] = &(&out[0] * c) + a;
        }
        ExactPoly::new(out)
    }

    pub fn scale(&self, s: &GaussRat) -> ExactPoly {
        ExactPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn sub(&self, o: &ExactPoly) -> ExactPoly {
        let n = self.len().max(o.len());
        ExactPoly::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }

    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// `t^d p(1/t)`.
    pub fn reversed(&self, d: usize) -> ExactPoly {
        let mut v = vec![GaussRat::zero(); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[d - k] = c.clone();
        }
        ExactPoly::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_small_rationals() {
        let r = GaussRat::recognize(Complex64::new(-2.0 / 3.0, 0.1)).unwrap();
        assert_eq!(r.re, BigRational::new((-2).into(), 3.into()));
        assert_eq!(r.im, BigRational::new(1.into(), 10.into()));
        assert!(GaussRat::recognize(Complex64::new(std::f64::consts::PI, 0.0)).is_none());
        assert!(GaussRat::recognize(Complex64::new(1.0 / 7919.0, 0.0)).is_none());
    }

    #[test]
    fn exact_shift_and_eval() {
        // (z - 2)^2 shifted to 2 is t^2
        let p = ExactPoly::recognize(&Poly::from_real(&[4.0, -4.0, 1.0])).unwrap();
        let two = GaussRat::recognize(Complex64::new(2.0, 0.0)).unwrap();
        assert!(p.eval(&two).is_zero());
        assert_eq!(p.shift(&two).low_order(), Some(2));
    }

    #[test]
    fn gaussian_inverse() {
        let z = GaussRat::recognize(Complex64::new(1.0, 1.0)).unwrap();
        let w = z.inv().unwrap();
        assert_eq!(&z * &w, GaussRat::one());
    }
}
