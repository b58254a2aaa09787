//! Reconstruction of Verblunsky coefficients from resonances.
//!
//! Pipeline, entirely on an `M`-point circle grid:
//!
//! 1. `Pi(e^{it}) = prod (1 - e^{it}/z_n)` from the resonances;
//! 2. `psi_0(0)^2 = mean 1/|Pi|^2`, and `psi_0 = psi_0(0) Pi`;
//! 3. boundary values of `m`: `Re m = 1/|psi_0|^2`, with the imaginary part
//!    supplied by the analytic extension (Fourier coefficients `c_0 = w_hat(0)`,
//!    `c_n = 2 w_hat(n)`);
//! 4. `Phi_0 = conj(z) (m - 1)/(m + 1)`;
//! 5. Schur steps `alpha_{k+1} = -conj(mean Phi_k)`,
//!    `Phi_{k+1} = conj(z) S(alpha_{k+1}, Phi_k)` with `S(w, z) = (z + conj(w)) / (1 + w z)`.

use serde::{Deserialize, Serialize};

use crate::coeffs::{from_pairs, to_pairs, ClassParams};
use crate::error::{Error, Result};
use crate::grid::CircleGrid;
use crate::resonances::ResonanceSet;
use crate::Complex64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `|w_hat(0) - 1|` above this means `psi_0` was not normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// Extraction stops once the analyticity residual exceeds this.
pub const RESIDUAL_STOP: f64 = 1e-4;

/// Why the Schur extraction ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason", content = "step")]
pub enum StopReason {
    /// All `n_max` coefficients were extracted.
    Completed,
    /// `r_k` exceeded [`RESIDUAL_STOP`] after computing coefficient `k + 1`.
    Residual(usize),
    /// Coefficient `k` had `|alpha| > 1 - 1/(2Q)` and was discarded.
    OutsideClass(usize),
    /// Coefficient `k` left the unit disk (or was not finite); extraction failed.
    Failed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ResultDoc", into = "ResultDoc")]
pub struct ReconstructionResult {
    /// `alpha_hat[k - 1]` estimates `alpha_k`.
    pub alpha_hat: Vec<Complex64>,
    /// `residuals[k] = |mean S(alpha_hat_{k+1}, Phi_k)|`.
    pub residuals: Vec<f64>,
    /// `psi_0(0)`; `None` when extraction started directly from `Phi_0`.
    pub psi0_zero: Option<f64>,
    pub stop: StopReason,
}

impl ReconstructionResult {
    pub fn failed(&self) -> bool {
        matches!(self.stop, StopReason::Failed(_))
    }

    /// `alpha_hat_k` for 1-based `k`, zero past the extracted prefix.
    pub fn get(&self, k: usize) -> Complex64 {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.alpha_hat.get(k - 1).copied().unwrap_or_default()
    }
}

#[derive(Serialize, Deserialize)]
struct ResultDoc {
    alpha_hat: Vec<[f64; 2]>,
    residuals: Vec<f64>,
    psi0_zero: Option<f64>,
    #[serde(default = "completed")]
    stop: StopReason,
}

fn completed() -> StopReason {
    StopReason::Completed
}

impl TryFrom<ResultDoc> for ReconstructionResult {
    type Error = Error;

    fn try_from(doc: ResultDoc) -> Result<Self> {
        Ok(Self {
            alpha_hat: from_pairs(&doc.alpha_hat),
            residuals: doc.residuals,
            psi0_zero: doc.psi0_zero,
            stop: doc.stop,
        })
    }
}

impl From<ReconstructionResult> for ResultDoc {
    fn from(r: ReconstructionResult) -> Self {
        Self {
            alpha_hat: to_pairs(&r.alpha_hat),
            residuals: r.residuals,
            psi0_zero: r.psi0_zero,
            stop: r.stop,
        }
    }
}

/// Samples the Hadamard product of the resonance set. Every resonance must lie
/// outside the closed unit disk.
pub fn pi_on_circle(set: &ResonanceSet, m: usize) -> Result<CircleGrid> {
    if let Some(z) = set.zeros().iter().find(|z| !(z.location.norm() > 1.0)) {
        return Err(Error::Domain(format!(
            "resonance {} lies in the closed unit disk",
            z.location
        )));
    }
    CircleGrid::from_fn(m, |z| set.hadamard_product(z))
}

/// `psi_0(0) = sqrt(mean 1/|Pi|^2)`, taken positive.
pub fn psi0_zero_from_pi(grid: &CircleGrid) -> Result<f64> {
    let mut sum = 0.0;
    for (j, v) in grid.values().iter().enumerate() {
        let n2 = v.norm_sqr();
        if !(n2 > 0.0) {
            return Err(Error::Domain(format!("Pi vanishes at grid node {j}")));
        }
        sum += 1.0 / n2;
    }
    Ok((sum / grid.size() as f64).sqrt())
}

/// Boundary values of `m` from samples of `psi_0`.
pub fn m_on_circle(psi_grid: &CircleGrid) -> Result<CircleGrid> {
    let m = psi_grid.size();
    let density = psi_grid.map(|psi, _| Complex64::new(1.0 / psi.norm_sqr(), 0.0));
    if let Some(j) = density.values().iter().position(|w| !w.re.is_finite()) {
        return Err(Error::Domain(format!("psi_0 vanishes at grid node {j}")));
    }
    let hat = density.fourier_coefficients();
    if (hat[0].re - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Consistency(format!(
            "mean of 1/|psi_0|^2 is {} instead of 1",
            hat[0].re
        )));
    }
    let half = m / 2;
    let mut taylor = Vec::with_capacity(half + 1);
    taylor.push(Complex64::new(hat[0].re, 0.0));
    taylor.extend(hat[1..half].iter().map(|&h| 2.0 * h));
    // the Nyquist mode is its own conjugate partner
    taylor.push(hat[half]);
    CircleGrid::from_taylor(m, &taylor)
}

/// `Phi_0 = conj(z) (m - 1)/(m + 1)` on the grid.
pub fn schur_phi0(m_grid: &CircleGrid) -> Result<CircleGrid> {
    m_grid.try_map(|j, m, z| {
        let denom = m + ONE;
        if denom.norm() == 0.0 {
            return Err(Error::Domain(format!("m = -1 at grid node {j}")));
        }
        Ok(z.conj() * (m - ONE) / denom)
    })
}

/// `S(w, z) = (z + conj(w)) / (1 + w z)`.
pub fn mobius(w: Complex64, z: Complex64) -> Complex64 {
    (z + w.conj()) / (ONE + w * z)
}

/// Runs the Schur algorithm on boundary values of `Phi_0`, extracting up to
/// `n_max` coefficients. `q` is the class constant used by the stopping rule.
pub fn extract_verblunsky(phi0_grid: &CircleGrid, n_max: usize, q: f64) -> Result<ReconstructionResult> {
    if n_max == 0 {
        return Err(Error::Argument("n_max must be at least 1".into()));
    }
    let limit = 1.0 - 1.0 / (2.0 * q);
    let mut alpha_hat = Vec::with_capacity(n_max);
    let mut residuals = Vec::with_capacity(n_max);
    let mut phi = phi0_grid.clone();
    let mut stop = StopReason::Completed;
    for k in 0..n_max {
        let index = k + 1;
        let a = -phi.mean().conj();
        if !(a.norm() < 1.0) {
            stop = StopReason::Failed(index);
            break;
        }
        if a.norm() > limit {
            stop = StopReason::OutsideClass(index);
            break;
        }
        alpha_hat.push(a);
        let mapped = phi.map(|p, _| mobius(a, p));
        let residual = mapped.mean().norm();
        residuals.push(residual);
        if !residual.is_finite() {
            stop = StopReason::Failed(index);
            break;
        }
        if residual > RESIDUAL_STOP {
            if index < n_max {
                stop = StopReason::Residual(index);
            }
            break;
        }
        phi = mapped.map(|s, z| z.conj() * s);
    }
    Ok(ReconstructionResult {
        alpha_hat,
        residuals,
        psi0_zero: None,
        stop,
    })
}

/// Full inverse map from a resonance set to coefficient estimates.
pub fn reconstruct(
    set: &ResonanceSet,
    m: usize,
    n_max: usize,
    params: &ClassParams,
) -> Result<ReconstructionResult> {
    let pi = pi_on_circle(set, m).map_err(|e| e.in_stage("pi_on_circle"))?;
    let psi0 = psi0_zero_from_pi(&pi).map_err(|e| e.in_stage("psi0_zero_from_pi"))?;
    let psi = pi.map(|p, _| p * psi0);
    let m_grid = m_on_circle(&psi).map_err(|e| e.in_stage("m_on_circle"))?;
    let phi0 = schur_phi0(&m_grid).map_err(|e| e.in_stage("schur_phi0"))?;
    let mut result =
        extract_verblunsky(&phi0, n_max, params.q()).map_err(|e| e.in_stage("extract_verblunsky"))?;
    result.psi0_zero = Some(psi0);
    Ok(result)
}
