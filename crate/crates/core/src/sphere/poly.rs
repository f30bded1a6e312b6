use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense univariate polynomial with complex coefficients in ascending order.
///
/// Trailing exact zeros are always trimmed, so the zero polynomial has an
/// empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(ONE)
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `z`.
    pub fn identity() -> Self {
        Poly::new(vec![ZERO, ONE])
    }

    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut v = vec![ZERO; k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z` by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Coefficients of `t -> p(c + t)`.
    pub fn shift(&self, c: Complex64) -> Poly {
        let mut out: Vec<Complex64> = Vec::with_capacity(self.coeffs.len());
        for &a in self.coeffs.iter().rev() {
            // out <- out * (t + c) + a
            out.push(ZERO);
            for k in (1..out.len()).rev() {
                out[k] = out[k - 1] + out[k] * c;
            }
            out[0] = out[0] * c + a;
        }
        Poly::new(out)
    }

    /// `t^d p(1/t)` for `d >= deg p`; the chart transform at infinity.
    pub fn reversed(&self, d: usize) -> Poly {
        debug_assert!(self.degree().is_none_or(|k| k <= d));
        let mut v = vec![ZERO; d + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            v[d - k] = c;
        }
        Poly::new(v)
    }

    /// Quotient of synthetic division by `(z - root)`; the remainder is dropped.
    pub fn deflate(&self, root: Complex64) -> Poly {
        let n = self.coeffs.len();
        if n <= 1 {
            return Poly::zero();
        }
        let mut q = vec![ZERO; n - 1];
        let mut acc = ZERO;
        for k in (1..n).rev() {
            acc = acc * root + self.coeffs[k];
            q[k - 1] = acc;
        }
        Poly::new(q)
    }

    /// Drops coefficients below `rel * max_abs()` and re-trims.
    pub fn trim_relative(&self, rel: f64) -> Poly {
        let cut = rel * self.max_abs();
        Poly::new(
            self.coeffs
                .iter()
                .map(|&c| if c.norm() <= cut { ZERO } else { c })
                .collect(),
        )
    }

    /// Order of vanishing at zero (index of the first nonzero coefficient).
    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.re != 0.0 || c.im != 0.0)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}
