//! Jost solutions, the Jost function `psi_0` and its normalized form `Pi`.
//!
//! For a truncated sequence the Volterra equations
//!
//! ```text
//! F(z,k) = (1,0)^T - sum_{n>k} [[0, alpha_n zeta_n], [z^{n-k-1} conj(alpha_n) zeta_{k+1}, 0]] F(z,n)
//! ```
//!
//! (`zeta_n = z` for odd `n`, `1` for even `n`) have finitely many terms and
//! are solved exactly by backward substitution from `F(z,N) = (1,0)^T`.
//! `psi_0(z) = C_0 (F_1(z,0) - F_2(z,0))` and `Pi = psi_0 / C_0` is a polynomial.

use crate::coeffs::{rho_data, ClassParams, VerblunskySequence};
use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;
use crate::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn zeta(n: usize, z: Complex64) -> Complex64 {
    if n % 2 == 1 {
        z
    } else {
        ONE
    }
}

/// `F(z, k)` for `k = 0..=kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct JostValues {
    pub z: Complex64,
    pub f: Vec<[Complex64; 2]>,
}

impl JostValues {
    pub fn at(&self, k: usize) -> [Complex64; 2] {
        self.f.get(k).copied().unwrap_or([ONE, ZERO])
    }

    /// `||F(z,k) - (1,0)^T||_2`.
    pub fn deviation(&self, k: usize) -> f64 {
        let [a, b] = self.at(k);
        ((a - ONE).norm_sqr() + b.norm_sqr()).sqrt()
    }
}

/// Solves the Volterra equations by evaluating each sum directly, `O(N^2)` per `z`.
pub fn solve_jost(seq: &VerblunskySequence, z: Complex64, kmax: usize) -> JostValues {
    let n_coeffs = seq.len();
    let top = kmax.max(n_coeffs);
    let mut f = vec![[ONE, ZERO]; top + 1];
    for k in (0..n_coeffs).rev() {
        let mut first = ONE;
        let mut second = ZERO;
        let zeta_next = zeta(k + 1, z);
        let mut zpow = ONE; // z^{n-k-1}
        for n in (k + 1)..=n_coeffs {
            let a = seq.get(n);
            let [f1, f2] = f[n];
            first -= a * zeta(n, z) * f2;
            second -= zpow * a.conj() * zeta_next * f1;
            zpow *= z;
        }
        f[k] = [first, second];
    }
    f.truncate(kmax + 1);
    JostValues { z, f }
}

/// `beta(z,k) exp(beta(z,k))` with `beta(z,k) = sum_{n>k} |alpha_n| max(1, |z|^{2n-1})`.
pub fn tail_bound(seq: &VerblunskySequence, z: Complex64, k: usize) -> f64 {
    let r = z.norm();
    let beta: f64 = ((k + 1)..=seq.len())
        .map(|n| seq.get(n).norm() * r.powi(2 * n as i32 - 1).max(1.0))
        .sum();
    beta * beta.exp()
}

/// `psi_0(z) = C_0 (1, -1) F(z, 0)`.
pub fn jost_function(seq: &VerblunskySequence, z: Complex64) -> Complex64 {
    let [f1, f2] = solve_jost(seq, z, 0).at(0);
    rho_data(seq).c0 * (f1 - f2)
}

/// `Pi(z) = (1, -1) F(z, 0)` as an exact polynomial, normalized so `Pi(0) = 1`.
///
/// Uses running sums instead of the literal Volterra sums:
/// `A_k = A_{k+1} + alpha_{k+1} zeta_{k+1} b_{k+1}`, `B_k = conj(alpha_{k+1}) a_{k+1} + z B_{k+1}`,
/// with `F(z,k) = (1 - A_k, -zeta_{k+1} B_k)`.
pub fn pi_polynomial(seq: &VerblunskySequence) -> ComplexPolynomial {
    let one = ComplexPolynomial::one();
    let z = ComplexPolynomial::new(vec![ZERO, ONE]);
    let zeta_poly = |n: usize| if n % 2 == 1 { z.clone() } else { one.clone() };

    let mut a = one.clone();
    let mut b = ComplexPolynomial::zero();
    let mut acc_a = ComplexPolynomial::zero();
    let mut acc_b = ComplexPolynomial::zero();
    for k in (0..seq.len()).rev() {
        let alpha = seq.get(k + 1);
        let zeta_next = zeta_poly(k + 1);
        acc_a = &acc_a + &(&zeta_next * &b).scale(alpha);
        acc_b = &a.scale(alpha.conj()) + &acc_b.shift(1);
        a = &one - &acc_a;
        b = -&(&zeta_next * &acc_b);
    }
    &a - &b
}

/// Upper envelope `log(sqrt(2) Q) + C + (log(2|z|^2))^{gamma/(gamma-1)}` for `log|Pi(z)|`, `|z| >= 1`.
pub fn log_growth_bound(z: Complex64, params: &ClassParams) -> Result<f64> {
    let r = z.norm();
    if !(r >= 1.0) {
        return Err(Error::Argument(format!(
            "growth bound needs |z| >= 1, got {r}"
        )));
    }
    Ok((std::f64::consts::SQRT_2 * params.q()).ln()
        + params.cap_c()
        + (2.0 * r * r).ln().powf(params.growth_exponent()))
}
