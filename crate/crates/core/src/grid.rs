//! Uniform samples of a function on the unit circle.
//!
//! Node `j` of an `M`-point grid is `exp(i t_j)` with `t_j = 2 pi j / M`,
//! traversed counterclockwise. Fourier coefficients use
//! `f_hat(n) = (1/M) sum_j f_j exp(-i n t_j)`.

use std::f64::consts::PI;

use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::Complex64;

pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    values: Vec<Complex64>,
}

pub fn check_grid_size(m: usize) -> Result<()> {
    if m < MIN_GRID || !m.is_power_of_two() {
        return Err(Error::Argument(format!(
            "grid size must be a power of two >= {MIN_GRID}, got {m}"
        )));
    }
    Ok(())
}

/// Node `j` of an `m`-point grid.
pub fn node(j: usize, m: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)
}

impl CircleGrid {
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        check_grid_size(values.len())?;
        Ok(Self { values })
    }

    /// Samples `f(exp(i t_j))`.
    pub fn from_fn(m: usize, f: impl Fn(Complex64) -> Complex64 + Sync + Send) -> Result<Self> {
        Self::from_fn_with(Execution::Sequential, m, f)
    }

    pub fn from_fn_with(
        exec: Execution,
        m: usize,
        f: impl Fn(Complex64) -> Complex64 + Sync + Send,
    ) -> Result<Self> {
        check_grid_size(m)?;
        Ok(Self {
            values: exec.map_range(m, |j| f(node(j, m))),
        })
    }

    pub fn constant(m: usize, c: Complex64) -> Result<Self> {
        check_grid_size(m)?;
        Ok(Self { values: vec![c; m] })
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn node(&self, j: usize) -> Complex64 {
        node(j, self.size())
    }

    /// Grid mean, summed in index order. This is the trapezoidal rule for
    /// `(1/2pi) int f(e^{it}) dt`, and by the mean value property `f(0)` for
    /// `f` analytic in the closed disk.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.size() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise map `g(value, node)`.
    pub fn map(&self, g: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let m = self.size();
        Self {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(j, &v)| g(v, node(j, m)))
                .collect(),
        }
    }

    pub fn try_map(
        &self,
        g: impl Fn(usize, Complex64, Complex64) -> Result<Complex64>,
    ) -> Result<Self> {
        let m = self.size();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| g(j, v, node(j, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    /// Max pointwise distance to another grid of the same size.
    pub fn max_diff(&self, other: &CircleGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `f_hat(n)` for `n = 0..M`; index `n` holds frequency `n` for
    /// `n < M/2` and frequency `n - M` above.
    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        let m = self.size();
        let mut buf = self.values.clone();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let scale = 1.0 / m as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Evaluates `sum_{n < M} c_n exp(i n t_j)` at the nodes. Coefficients past
    /// `M` are ignored; missing ones are zero.
    pub fn from_taylor(m: usize, coeffs: &[Complex64]) -> Result<Self> {
        check_grid_size(m)?;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (b, &c) in buf.iter_mut().zip(coeffs) {
            *b = c;
        }
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        Ok(Self { values: buf })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_bad_sizes() {
        assert!(CircleGrid::constant(8, Complex64::new(1.0, 0.0)).is_err());
        assert!(CircleGrid::constant(48, Complex64::new(1.0, 0.0)).is_err());
        assert!(CircleGrid::constant(16, Complex64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn mean_is_value_at_origin_for_polynomials() {
        let g = CircleGrid::from_fn(32, |z| 3.0 + z * z - z.powi(5)).unwrap();
        assert_abs_diff_eq!(g.mean().re, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.mean().im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn fourier_sign_convention() {
        let m = 64;
        let g = CircleGrid::from_fn(m, |z| 2.0 * z + Complex64::new(0.0, 1.0) / (z * z)).unwrap();
        let hat = g.fourier_coefficients();
        assert_abs_diff_eq!((hat[1] - 2.0).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((hat[m - 2] - Complex64::new(0.0, 1.0)).norm(), 0.0, epsilon = 1e-14);
        assert!(hat[m - 1].norm() < 1e-14);
    }

    #[test]
    fn taylor_synthesis_inverts_analysis() {
        let coeffs = [Complex64::new(1.0, 0.0), Complex64::new(0.5, -0.5), Complex64::new(0.0, 0.25)];
        let g = CircleGrid::from_taylor(16, &coeffs).unwrap();
        let direct = CircleGrid::from_fn(16, |z| coeffs[0] + coeffs[1] * z + coeffs[2] * z * z).unwrap();
        assert!(g.max_diff(&direct) < 1e-14);
        let back = g.fourier_coefficients();
        for (a, b) in back.iter().zip(&coeffs) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn parallel_sampling_matches_sequential() {
        let f = |z: Complex64| (z * 0.7).exp() / (2.0 - z);
        let a = CircleGrid::from_fn_with(Execution::Sequential, 1024, f).unwrap();
        let b = CircleGrid::from_fn_with(Execution::Parallel, 1024, f).unwrap();
        assert_eq!(a, b);
    }
}
