//! The CMV matrix `U = VW`, the transfer-matrix recursion and two independent
//! routes to the Weyl–Titchmarsh m-function.
//!
//! [`m_forward_schur`] runs the Schur recursion backward from the free tail
//! and is exact (up to rounding) for truncated sequences. [`m_finite_section`]
//! solves against a finite section of `U` instead and is used to cross-check it.

use std::ops::Mul;

use crate::coeffs::{rho_of, VerblunskySequence};
use crate::error::{Error, Result};
use crate::grid::CircleGrid;
use crate::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Boundary points with `|z| <= 1 + BOUNDARY_SLACK` count as on the circle.
const BOUNDARY_SLACK: f64 = 1e-12;

/// A 2x2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Largest entrywise distance.
    pub fn max_diff(&self, other: &Mat2) -> f64 {
        let mut d = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

fn check_coefficient(alpha: Complex64) -> Result<()> {
    if alpha.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("coefficient {alpha} is not in the open unit disk")))
    }
}

/// `[[-alpha, rho], [rho, conj(alpha)]]`, a unitary block.
pub fn theta_block(alpha: Complex64) -> Result<Mat2> {
    check_coefficient(alpha)?;
    let rho = Complex64::new(rho_of(alpha), 0.0);
    Ok(Mat2([[-alpha, rho], [rho, alpha.conj()]]))
}

/// Five-diagonal matrix: row `i` stores columns `i - 2 ..= i + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedUnitary {
    dim: usize,
    bands: Vec<[Complex64; 5]>,
}

impl BandedUnitary {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        if row >= self.dim || col >= self.dim || row.abs_diff(col) > 2 {
            return ZERO;
        }
        self.bands[row][col + 2 - row]
    }

    /// Conjugate transpose, which is the section of `U*`.
    pub fn adjoint(&self) -> Self {
        let mut out = BandedUnitary {
            dim: self.dim,
            bands: vec![[ZERO; 5]; self.dim],
        };
        for i in 0..self.dim {
            for j in i.saturating_sub(2)..=(i + 2).min(self.dim - 1) {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.bands[row][col + 2 - row] = v;
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| {
                let lo = i.saturating_sub(2);
                let hi = (i + 2).min(self.dim - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Rows that coincide with the corresponding rows of the infinite operator.
    /// The last row loses part of its `V` block to truncation.
    pub fn interior_rows(&self) -> std::ops::Range<usize> {
        0..self.dim - 1
    }

    /// Columns that coincide with the corresponding columns of the infinite
    /// operator, hence are orthonormal.
    pub fn interior_columns(&self) -> std::ops::Range<usize> {
        0..self.dim - 2
    }

    /// Solves `(U - shift) x = rhs` by banded Gaussian elimination with partial pivoting.
    pub fn solve_shifted(&self, shift: Complex64, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        const KL: usize = 2;
        const WIDTH: usize = 7; // columns row-2 ..= row+4 once fill-in is allowed for
        let n = self.dim;
        let mut rows: Vec<[Complex64; WIDTH]> = (0..n)
            .map(|i| {
                let mut r = [ZERO; WIDTH];
                for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                    let mut v = self.get(i, j);
                    if i == j {
                        v -= shift;
                    }
                    r[j + KL - i] = v;
                }
                r
            })
            .collect();
        let mut b = rhs.to_vec();
        let at = |rows: &Vec<[Complex64; WIDTH]>, i: usize, j: usize| -> Complex64 {
            if j + KL < i || j > i + 4 {
                ZERO
            } else {
                rows[i][j + KL - i]
            }
        };

        for k in 0..n {
            let last = (k + KL).min(n - 1);
            let (p, pmax) = (k..=last)
                .map(|i| (i, at(&rows, i, k).norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= f64::MIN_POSITIVE {
                return Err(Error::Numerical(format!(
                    "singular shifted section at column {k} (dim {n})"
                )));
            }
            if p != k {
                // both rows have their nonzeros inside columns k ..= k + 4
                let hi = (k + 4).min(n - 1);
                let row_k: Vec<Complex64> = (k..=hi).map(|j| at(&rows, k, j)).collect();
                let row_p: Vec<Complex64> = (k..=hi).map(|j| at(&rows, p, j)).collect();
                rows[k] = [ZERO; WIDTH];
                rows[p] = [ZERO; WIDTH];
                for (off, j) in (k..=hi).enumerate() {
                    rows[k][j + KL - k] = row_p[off];
                    rows[p][j + KL - p] = row_k[off];
                }
                b.swap(k, p);
            }
            let pivot = at(&rows, k, k);
            let hi = (k + 4).min(n - 1);
            for i in (k + 1)..=last {
                let factor = at(&rows, i, k) / pivot;
                if factor == ZERO {
                    continue;
                }
                for j in k..=hi {
                    let v = at(&rows, i, j) - factor * at(&rows, k, j);
                    rows[i][j + KL - i] = v;
                }
                b[i] = b[i] - factor * b[k];
            }
        }

        let mut x = vec![ZERO; n];
        for i in (0..n).rev() {
            let hi = (i + 4).min(n - 1);
            let s: Complex64 = ((i + 1)..=hi).map(|j| at(&rows, i, j) * x[j]).sum();
            x[i] = (b[i] - s) / at(&rows, i, i);
        }
        Ok(x)
    }
}

/// Entry of `W = Theta_1 (+) Theta_3 (+) ...` inside a `dim`-section.
fn w_entry(blocks: &[Mat2], row: usize, col: usize) -> Complex64 {
    if row / 2 != col / 2 {
        return ZERO;
    }
    // block b covers rows 2b, 2b+1 and holds Theta_{2b+1}
    blocks[row / 2 * 2].0[row % 2][col % 2]
}

/// Entry of `V = 1 (+) Theta_2 (+) Theta_4 (+) ...`; the last block may be cut by the section.
fn v_entry(blocks: &[Mat2], row: usize, col: usize) -> Complex64 {
    if row == 0 || col == 0 {
        return if row == col { ONE } else { ZERO };
    }
    // block b >= 1 covers rows 2b-1, 2b and holds Theta_{2b}
    let (br, bc) = (row.div_ceil(2), col.div_ceil(2));
    if br != bc {
        return ZERO;
    }
    blocks[2 * br - 1].0[(row + 1) % 2][(col + 1) % 2]
}

/// Leading `dim x dim` section of `U = VW`. `dim` must be even and at least 4.
pub fn build_cmv_matrix(seq: &VerblunskySequence, dim: usize) -> Result<BandedUnitary> {
    if dim < 4 || !dim.is_multiple_of(2) {
        return Err(Error::Argument(format!("section dimension must be even and >= 4, got {dim}")));
    }
    // blocks[k - 1] = Theta_k for k = 1..=dim
    let blocks = (1..=dim)
        .map(|k| theta_block(seq.get(k)))
        .collect::<Result<Vec<_>>>()?;
    let mut u = BandedUnitary {
        dim,
        bands: vec![[ZERO; 5]; dim],
    };
    for i in 0..dim {
        for l in i.saturating_sub(1)..=(i + 1).min(dim - 1) {
            let v = v_entry(&blocks, i, l);
            if v == ZERO {
                continue;
            }
            for j in l.saturating_sub(1)..=(l + 1).min(dim - 1) {
                let w = w_entry(&blocks, l, j);
                if w != ZERO {
                    let cur = u.get(i, j);
                    u.set(i, j, cur + v * w);
                }
            }
        }
    }
    Ok(u)
}

/// Transfer matrix `T(z, k)` for `k >= 1`:
/// `(1/rho_k) [[alpha_k, z], [1/z, conj(alpha_k)]]` for odd `k` and
/// `(1/rho_k) [[conj(alpha_k), 1], [1, alpha_k]]` for even `k`.
pub fn transfer_matrix(z: Complex64, k: usize, seq: &VerblunskySequence) -> Result<Mat2> {
    if z == ZERO {
        return Err(Error::Domain("transfer matrix is undefined at z = 0".into()));
    }
    if k == 0 {
        return Err(Error::Argument("transfer matrices are indexed from k = 1".into()));
    }
    let a = seq.get(k);
    let inv_rho = 1.0 / rho_of(a);
    let m = if k % 2 == 1 {
        [[a, z], [z.inv(), a.conj()]]
    } else {
        [[a.conj(), ONE], [ONE, a]]
    };
    Ok(Mat2(m.map(|row| row.map(|e| e * inv_rho))))
}

/// Solution `(u, v)(z, k)` of the CMV recursion for `k = 0..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSolution {
    pub z: Complex64,
    pub values: Vec<[Complex64; 2]>,
}

impl LatticeSolution {
    /// First components `u(z, k)`.
    pub fn u(&self) -> Vec<Complex64> {
        self.values.iter().map(|v| v[0]).collect()
    }

    pub fn v(&self) -> Vec<Complex64> {
        self.values.iter().map(|v| v[1]).collect()
    }
}

/// Propagates `theta(z, 0) = (-1, 1)` and `phi(z, 0) = (1, 1)` through `K` transfer steps.
pub fn fundamental_solutions(
    z: Complex64,
    kmax: usize,
    seq: &VerblunskySequence,
) -> Result<(LatticeSolution, LatticeSolution)> {
    if z == ZERO {
        return Err(Error::Domain("fundamental solutions are undefined at z = 0".into()));
    }
    let mut theta = vec![[-ONE, ONE]];
    let mut phi = vec![[ONE, ONE]];
    for k in 1..=kmax {
        let t = transfer_matrix(z, k, seq)?;
        theta.push(t.apply(theta[k - 1]));
        phi.push(t.apply(phi[k - 1]));
    }
    Ok((
        LatticeSolution { z, values: theta },
        LatticeSolution { z, values: phi },
    ))
}

fn check_closed_disk(z: Complex64) -> Result<()> {
    if z.norm() <= 1.0 + BOUNDARY_SLACK {
        Ok(())
    } else {
        Err(Error::Domain(format!("|z| = {} lies outside the closed unit disk", z.norm())))
    }
}

/// Schur function `Phi_0(z)`, obtained by running
/// `Phi_{k-1} = (z Phi_k - conj(alpha_k)) / (1 - alpha_k z Phi_k)` down from `Phi_N = 0`.
pub fn schur_phi0_forward(seq: &VerblunskySequence, z: Complex64) -> Result<Complex64> {
    check_closed_disk(z)?;
    Ok(seq
        .as_slice()
        .iter()
        .rev()
        .fold(ZERO, |phi, &a| (z * phi - a.conj()) / (ONE - a * z * phi)))
}

/// `m(z) = (1 + z Phi_0(z)) / (1 - z Phi_0(z))` for `|z| <= 1`.
pub fn m_forward_schur(seq: &VerblunskySequence, z: Complex64) -> Result<Complex64> {
    let zp = z * schur_phi0_forward(seq, z)?;
    Ok((ONE + zp) / (ONE - zp))
}

/// Default section size for [`m_finite_section`]: `max(64, 4N)`, rounded up to even.
pub fn default_section_dim(n: usize) -> usize {
    let d = (4 * n).max(64);
    d + d % 2
}

/// `m(z) = <delta_0, (U + z)(U - z)^{-1} delta_0>` on a finite section of `U`.
///
/// Sections of a unitary are contractions with eigenvalues inside the disk, so
/// `(U_N - z)^{-1}` is useless there. The resolvent is rewritten as
/// `(U - z)^{-1} = U* (I - z U*)^{-1}`, whose Neumann series converges for
/// `|z| < 1` on every section: `m = 1 + 2z <U delta_0, y>` with `(U* - 1/z) y = -delta_0 / z`.
pub fn m_finite_section(seq: &VerblunskySequence, z: Complex64, dim: usize) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!(
            "finite-section resolvent needs |z| < 1, got {}",
            z.norm()
        )));
    }
    if z == ZERO {
        return Ok(ONE);
    }
    let u = build_cmv_matrix(seq, dim)?;
    let mut rhs = vec![ZERO; dim];
    rhs[0] = -z.inv();
    let y = u.adjoint().solve_shifted(z.inv(), &rhs)?;
    // (U* y)_0 = sum_j conj(U_{j0}) y_j
    let first: Complex64 = (0..3.min(dim)).map(|j| u.get(j, 0).conj() * y[j]).sum();
    Ok(ONE + 2.0 * z * first)
}

/// Grid size used by [`m_taylor_coeffs`].
fn taylor_grid(n: usize) -> usize {
    (4 * n).next_power_of_two().max(256)
}

/// First `n` Taylor coefficients of `m` at the origin, by Fourier analysis of
/// its boundary values. The `j`-th derivative is `j! * coeffs[j]`.
pub fn m_taylor_coeffs(seq: &VerblunskySequence, n: usize) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::Argument("need at least one Taylor coefficient".into()));
    }
    let m = taylor_grid(n);
    let mut values = Vec::with_capacity(m);
    for j in 0..m {
        values.push(m_forward_schur(seq, crate::grid::node(j, m))?);
    }
    let hat = CircleGrid::from_values(values)?.fourier_coefficients();
    Ok(hat[..n].to_vec())
}
