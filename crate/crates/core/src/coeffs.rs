//! Verblunsky coefficient sequences and the decay class they are drawn from.
//!
//! A sequence is stored as the finite prefix `alpha_1, ..., alpha_N`; every
//! coefficient past `N` is exactly zero. Slices are 0-based, so `alpha[k - 1]`
//! holds `alpha_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex64;

/// Parameters `(gamma, C, Q)` of the coefficient class: `|alpha_k| <= C exp(-k^gamma)`
/// and `prod (1 - |alpha_j|) >= 1/Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    gamma: f64,
    cap_c: f64,
    q: f64,
}

impl ClassParams {
    pub fn new(gamma: f64, cap_c: f64, q: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Argument(format!("gamma must exceed 1, got {gamma}")));
        }
        if !(cap_c > 0.0) || !cap_c.is_finite() {
            return Err(Error::Argument(format!("C must be positive, got {cap_c}")));
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::Argument(format!("Q must exceed 1, got {q}")));
        }
        Ok(Self { gamma, cap_c, q })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cap_c(&self) -> f64 {
        self.cap_c
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The exponent `gamma / (gamma - 1)` that appears in every growth estimate.
    pub fn growth_exponent(&self) -> f64 {
        self.gamma / (self.gamma - 1.0)
    }

    /// Decay envelope `C exp(-k^gamma)` for the 1-based index `k`.
    pub fn decay_envelope(&self, k: usize) -> f64 {
        self.cap_c * (-(k as f64).powf(self.gamma)).exp()
    }
}

/// A truncated sequence of Verblunsky coefficients together with its class parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceDoc", into = "SequenceDoc")]
pub struct VerblunskySequence {
    alpha: Vec<Complex64>,
    params: ClassParams,
}

impl VerblunskySequence {
    /// `alpha[0]` is `alpha_1`. Every coefficient must lie in the open unit disk.
    pub fn new(alpha: Vec<Complex64>, params: ClassParams) -> Result<Self> {
        for (i, a) in alpha.iter().enumerate() {
            if !(a.norm() < 1.0) {
                return Err(Error::Domain(format!(
                    "alpha_{} = {a} is not in the open unit disk",
                    i + 1
                )));
            }
        }
        Ok(Self { alpha, params })
    }

    /// Convenience constructor for real coefficients.
    pub fn from_real(alpha: &[f64], params: ClassParams) -> Result<Self> {
        Self::new(alpha.iter().map(|&a| Complex64::new(a, 0.0)).collect(), params)
    }

    /// Number of stored coefficients `N`.
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Stored prefix, 0-based.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.alpha
    }

    /// `alpha_k` for the 1-based index `k`; zero for `k == 0` or `k > N`.
    pub fn get(&self, k: usize) -> Complex64 {
        if k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.alpha.get(k - 1).copied().unwrap_or_default()
    }

    pub fn params(&self) -> &ClassParams {
        &self.params
    }

    pub fn with_params(&self, params: ClassParams) -> Self {
        Self {
            alpha: self.alpha.clone(),
            params,
        }
    }
}

/// `rho_k = sqrt(1 - |alpha_k|^2)` and the tail products `C_k = prod_{j > k} 1/rho_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoData {
    /// `rho[k - 1] = rho_k` for `k = 1..=N`.
    pub rho: Vec<f64>,
    /// `c_tail[k] = C_k` for `k = 0..=N`; `C_k = 1` for `k >= N`.
    pub c_tail: Vec<f64>,
    /// `C_0`, which equals `psi_0(0)`.
    pub c0: f64,
}

impl RhoData {
    /// `rho_k` for a 1-based index, 1 past the stored prefix.
    pub fn rho(&self, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        self.rho.get(k - 1).copied().unwrap_or(1.0)
    }

    /// `C_k`, 1 past the stored prefix.
    pub fn c(&self, k: usize) -> f64 {
        self.c_tail.get(k).copied().unwrap_or(1.0)
    }
}

/// `sqrt(1 - |a|^2)` evaluated as `sqrt((1 - |a|)(1 + |a|))` to keep accuracy near the circle.
pub fn rho_of(a: Complex64) -> f64 {
    let r = a.norm();
    ((1.0 - r) * (1.0 + r)).sqrt()
}

pub fn rho_data(seq: &VerblunskySequence) -> RhoData {
    let rho: Vec<f64> = seq.as_slice().iter().map(|&a| rho_of(a)).collect();
    let n = rho.len();
    let mut c_tail = vec![1.0; n + 1];
    for k in (0..n).rev() {
        c_tail[k] = c_tail[k + 1] / rho[k];
    }
    let c0 = c_tail[0];
    RhoData { rho, c_tail, c0 }
}

/// Outcome of checking both class conditions. Never an error: callers decide
/// what to do with a near-violation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// `|alpha_k| <= C exp(-k^gamma)` for every `k`.
    pub decay_ok: bool,
    /// `max_k |alpha_k| exp(k^gamma) / C` (0 for an empty or all-zero sequence).
    pub max_decay_ratio: f64,
    /// 1-based index attaining `max_decay_ratio`, if any coefficient is nonzero.
    pub worst_decay_index: Option<usize>,
    /// `prod (1 - |alpha_j|) >= 1/Q`.
    pub product_ok: bool,
    /// `prod (1 - |alpha_j|)`.
    pub product: f64,
    /// 1-based index with the largest `|alpha_k|`, the dominant factor of the product.
    pub worst_product_index: Option<usize>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.decay_ok && self.product_ok
    }
}

pub fn validate_class(seq: &VerblunskySequence) -> ValidationReport {
    let params = seq.params();
    let mut max_ratio = 0.0_f64;
    let mut worst_decay = None;
    let mut product = 1.0;
    let mut largest = 0.0;
    let mut worst_product = None;
    for (i, a) in seq.as_slice().iter().enumerate() {
        let k = i + 1;
        let r = a.norm();
        product *= 1.0 - r;
        if r > 0.0 {
            // log form keeps exp(k^gamma) from overflowing for long sequences
            let ratio = (r.ln() + (k as f64).powf(params.gamma) - params.cap_c.ln()).exp();
            if worst_decay.is_none() || ratio > max_ratio {
                max_ratio = ratio;
                worst_decay = Some(k);
            }
            if r > largest {
                largest = r;
                worst_product = Some(k);
            }
        }
    }
    ValidationReport {
        decay_ok: max_ratio <= 1.0,
        max_decay_ratio: max_ratio,
        worst_decay_index: worst_decay,
        product_ok: product >= 1.0 / params.q,
        product,
        worst_product_index: worst_product,
    }
}

/// JSON helpers: complex numbers are `[re, im]` pairs.
pub(crate) fn to_pairs(values: &[Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

pub(crate) fn from_pairs(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

#[derive(Serialize, Deserialize)]
struct SequenceDoc {
    alpha: Vec<[f64; 2]>,
    gamma: f64,
    #[serde(rename = "C")]
    cap_c: f64,
    #[serde(rename = "Q")]
    q: f64,
}

impl TryFrom<SequenceDoc> for VerblunskySequence {
    type Error = Error;

    fn try_from(doc: SequenceDoc) -> Result<Self> {
        let params = ClassParams::new(doc.gamma, doc.cap_c, doc.q)?;
        VerblunskySequence::new(from_pairs(&doc.alpha), params)
    }
}

impl From<VerblunskySequence> for SequenceDoc {
    fn from(seq: VerblunskySequence) -> Self {
        SequenceDoc {
            alpha: to_pairs(&seq.alpha),
            gamma: seq.params.gamma,
            cap_c: seq.params.cap_c,
            q: seq.params.q,
        }
    }
}
