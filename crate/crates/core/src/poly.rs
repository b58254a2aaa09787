//! Dense complex polynomials with ascending coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::coeffs::{from_pairs, to_pairs};
use crate::Complex64;

/// Coefficients whose modulus falls below this are dropped from the top.
pub const TRIM_THRESHOLD: f64 = 1e-300;

/// `coeffs[j]` multiplies `z^j`. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `prod (1 - z / z_n)`, each root repeated `multiplicity` times.
    pub fn from_reciprocal_roots<'a>(roots: impl IntoIterator<Item = &'a (Complex64, usize)>) -> Self {
        let mut p = Self::one();
        for &(root, mult) in roots {
            let factor = Self::new(vec![Complex64::new(1.0, 0.0), -root.inv()]);
            for _ in 0..mult {
                p = &p * &factor;
            }
        }
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.norm() < TRIM_THRESHOLD) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |a_j| |z|^j`, the scale against which evaluation errors are measured.
    pub fn eval_abs(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl From<Vec<[f64; 2]>> for ComplexPolynomial {
    fn from(pairs: Vec<[f64; 2]>) -> Self {
        Self::new(from_pairs(&pairs))
    }
}

impl From<ComplexPolynomial> for Vec<[f64; 2]> {
    fn from(p: ComplexPolynomial) -> Self {
        to_pairs(&p.coeffs)
    }
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn add(self, rhs: Self) -> ComplexPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPolynomial::new((0..n).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn sub(self, rhs: Self) -> ComplexPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPolynomial::new((0..n).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn neg(self) -> ComplexPolynomial {
        ComplexPolynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn mul(self, rhs: Self) -> ComplexPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPolynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trims_negligible_top_coefficients() {
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-310, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(ComplexPolynomial::new(vec![c(0.0, 0.0)]).degree(), None);
    }

    #[test]
    fn arithmetic_and_evaluation() {
        let p = ComplexPolynomial::from_real(&[1.0, 1.0]);
        let q = ComplexPolynomial::from_real(&[-1.0, 1.0]);
        let prod = &p * &q;
        assert_eq!(prod.coeffs(), ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]).coeffs());
        assert_eq!((&p + &q).coeffs(), &[c(0.0, 0.0), c(2.0, 0.0)]);
        assert!((&p - &p).is_zero());
        assert_eq!(prod.eval(c(0.0, 1.0)), c(-2.0, 0.0));
        assert_eq!(p.shift(2).coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(prod.derivative().coeffs(), &[c(0.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn reciprocal_roots_normalize_at_origin() {
        let p = ComplexPolynomial::from_reciprocal_roots(&[(c(-2.0, 0.0), 1)]);
        assert_eq!(p.coeffs(), &[c(1.0, 0.0), c(0.5, 0.0)]);
        let q = ComplexPolynomial::from_reciprocal_roots(&[(c(2.0, 0.0), 2)]);
        assert_eq!(q.coeffs(), &[c(1.0, 0.0), c(-1.0, 0.0), c(0.25, 0.0)]);
    }

    #[test]
    fn json_is_a_list_of_pairs() {
        let p = ComplexPolynomial::new(vec![c(1.0, 0.0), c(0.5, -0.25)]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, "[[1.0,0.0],[0.5,-0.25]]");
        let back: ComplexPolynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
