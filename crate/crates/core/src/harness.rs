//! Seeded stability experiments: perturb the resonances of a fixed operator,
//! reconstruct, and compare the coefficient errors against the functional
//! form `A_0 (6Q^2)^n (eps + (log R)^p / R)` of the stability estimate.
//!
//! Randomness comes from ChaCha8 seeded with the experiment seed; trial `t`
//! draws from stream `t`, so each trial is reproducible on its own and the
//! report does not depend on how trials are scheduled.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeffs::{to_pairs, ClassParams, VerblunskySequence};
use crate::error::{Error, Result};
use crate::grid::check_grid_size;
use crate::inverse::{reconstruct, ReconstructionResult, StopReason};
use crate::jost::pi_polynomial;
use crate::par::Execution;
use crate::resonances::{find_resonances, resonance_free_radius, Resonance, ResonanceSet};
use crate::Complex64;

/// Relative residual accepted for the forward resonances.
pub const RESONANCE_TOL: f64 = 1e-10;
/// Per-coefficient radius cap used by the sampler.
pub const SAMPLER_CAP: f64 = 0.6;

/// Draws a member of the class with `n` coefficients.
///
/// `alpha_k` is uniform in the disk of radius `min(0.6, C exp(-k^gamma))`. If
/// the product condition fails, all coefficients are shrunk by a common factor
/// until `prod (1 - |alpha_k|) >= 1/Q`.
pub fn sample_class_member(params: &ClassParams, n: usize, seed: u64) -> VerblunskySequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alpha: Vec<Complex64> = (1..=n)
        .map(|k| {
            let cap = SAMPLER_CAP.min(params.decay_envelope(k));
            let r = cap * rng.random::<f64>().sqrt();
            let t = std::f64::consts::TAU * rng.random::<f64>();
            Complex64::from_polar(r, t)
        })
        .collect();
    let target = 1.0 / params.q();
    let product = |s: f64, a: &[Complex64]| a.iter().map(|x| 1.0 - s * x.norm()).product::<f64>();
    if product(1.0, &alpha) < target {
        // product(s) is decreasing in s; keep the bracket end that satisfies the condition
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if product(mid, &alpha) >= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // rounding in |s alpha| can leave the product an ulp short; back off until it holds
        let original = alpha.clone();
        loop {
            alpha = original.iter().map(|a| a * lo).collect();
            if alpha.iter().map(|x| 1.0 - x.norm()).product::<f64>() >= target {
                break;
            }
            lo *= 1.0 - 1e-12;
        }
    }
    VerblunskySequence::new(alpha, *params).expect("sampled coefficients lie inside the disk")
}

/// Displaces every resonance with `|z| < radius` by an independent uniform draw
/// from the open disk of radius `epsilon` and drops the rest. Zeros of higher
/// multiplicity are split and displaced one copy at a time.
pub fn perturb_resonances(set: &ResonanceSet, epsilon: f64, radius: f64, seed: u64) -> ResonanceSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    perturb_with_rng(set, epsilon, radius, &mut rng)
}

pub fn perturb_with_rng<R: Rng>(set: &ResonanceSet, epsilon: f64, radius: f64, rng: &mut R) -> ResonanceSet {
    let mut out = Vec::with_capacity(set.total_multiplicity());
    for z in set.expanded() {
        if !(z.norm() < radius) {
            continue;
        }
        let r = epsilon * rng.random::<f64>().sqrt();
        let t = std::f64::consts::TAU * rng.random::<f64>();
        out.push(Resonance {
            location: z + Complex64::from_polar(r, t),
            multiplicity: 1,
        });
    }
    ResonanceSet::new(out).expect("perturbed resonances are finite with unit multiplicity")
}

/// `(log R)^p / R`, the contribution of the unknown resonances beyond `R`.
fn far_term(radius: f64, params: &ClassParams) -> f64 {
    if radius.is_infinite() {
        0.0
    } else {
        radius.ln().powf(params.growth_exponent()) / radius
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 1.0) {
        return Err(Error::Argument(format!("retention radius must exceed 1, got {radius}")));
    }
    Ok(())
}

/// `a0 (6Q^2)^n (eps + (log R)^p / R)`; `R = inf` is allowed.
pub fn theorem_bound(n: usize, epsilon: f64, radius: f64, params: &ClassParams, a0: f64) -> Result<f64> {
    check_radius(radius)?;
    let growth = 6.0 * params.q() * params.q();
    Ok(a0 * growth.powi(n as i32) * (epsilon + far_term(radius, params)))
}

/// Index-free variant `a5 (eps + (log R)^p / R)^{1 / log(6 e Q^2)}`.
pub fn theorem_bound_uniform(epsilon: f64, radius: f64, params: &ClassParams, a5: f64) -> Result<f64> {
    check_radius(radius)?;
    let exponent = 1.0 / (6.0 * std::f64::consts::E * params.q() * params.q()).ln();
    Ok(a5 * (epsilon + far_term(radius, params)).powf(exponent))
}

/// Maximum coefficient error of one exact round trip
/// `seq -> Pi -> resonances -> reconstruct`, over `k = 1..=n_max`.
#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub resonances: ResonanceSet,
    pub result: ReconstructionResult,
    pub max_error: f64,
}

pub fn round_trip(seq: &VerblunskySequence, grid_m: usize, n_max: usize) -> Result<RoundTrip> {
    let resonances = find_resonances(&pi_polynomial(seq), RESONANCE_TOL)?;
    let result = reconstruct(&resonances, grid_m, n_max, seq.params())?;
    let max_error = if result.stop == StopReason::Completed {
        (1..=n_max)
            .map(|k| (result.get(k) - seq.get(k)).norm())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(RoundTrip {
        resonances,
        result,
        max_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigDoc", into = "ConfigDoc")]
pub struct ExperimentConfig {
    pub seq: VerblunskySequence,
    pub epsilon: f64,
    /// Retention radius `R`; infinite keeps every resonance.
    pub radius: f64,
    pub grid_m: usize,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    /// Permit `epsilon >= delta / 2`, outside the hypothesis of the estimate.
    pub allow_outside_hypothesis: bool,
}

impl ExperimentConfig {
    pub fn new(
        seq: VerblunskySequence,
        epsilon: f64,
        radius: f64,
        grid_m: usize,
        n_max: usize,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            seq,
            epsilon,
            radius,
            grid_m,
            n_max,
            trials,
            seed,
            allow_outside_hypothesis: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Same as [`new`](Self::new) but accepts perturbations of size `delta / 2` and above.
    pub fn beyond_hypothesis(
        seq: VerblunskySequence,
        epsilon: f64,
        radius: f64,
        grid_m: usize,
        n_max: usize,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let cfg = Self {
            seq,
            epsilon,
            radius,
            grid_m,
            n_max,
            trials,
            seed,
            allow_outside_hypothesis: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `delta / 2` for the configured class.
    pub fn epsilon_limit(&self) -> f64 {
        (resonance_free_radius(self.seq.params()) - 1.0) / 2.0
    }

    pub fn within_hypothesis(&self) -> bool {
        self.epsilon < self.epsilon_limit()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Argument(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        check_radius(self.radius)?;
        check_grid_size(self.grid_m)?;
        if self.n_max == 0 || self.trials == 0 {
            return Err(Error::Argument("n_max and trials must be positive".into()));
        }
        if !self.allow_outside_hypothesis && !self.within_hypothesis() {
            return Err(Error::Argument(format!(
                "epsilon = {} is not below delta/2 = {:e}; set allow_outside_hypothesis to probe beyond it",
                self.epsilon,
                self.epsilon_limit()
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigDoc {
    seq: VerblunskySequence,
    epsilon: f64,
    /// `null` means infinity.
    #[serde(rename = "radius_R")]
    radius: Option<f64>,
    #[serde(rename = "grid_M")]
    grid_m: usize,
    n_max: usize,
    trials: usize,
    seed: u64,
    #[serde(default)]
    allow_outside_hypothesis: bool,
}

impl TryFrom<ConfigDoc> for ExperimentConfig {
    type Error = Error;

    fn try_from(doc: ConfigDoc) -> Result<Self> {
        let cfg = Self {
            seq: doc.seq,
            epsilon: doc.epsilon,
            radius: doc.radius.unwrap_or(f64::INFINITY),
            grid_m: doc.grid_m,
            n_max: doc.n_max,
            trials: doc.trials,
            seed: doc.seed,
            allow_outside_hypothesis: doc.allow_outside_hypothesis,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<ExperimentConfig> for ConfigDoc {
    fn from(cfg: ExperimentConfig) -> Self {
        Self {
            seq: cfg.seq,
            epsilon: cfg.epsilon,
            radius: cfg.radius.is_finite().then_some(cfg.radius),
            grid_m: cfg.grid_m,
            n_max: cfg.n_max,
            trials: cfg.trials,
            seed: cfg.seed,
            allow_outside_hypothesis: cfg.allow_outside_hypothesis,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub trial: usize,
    pub k: usize,
    pub alpha: Complex64,
    pub alpha_hat: Complex64,
    pub abs_err: f64,
    /// `theorem_bound(k, eps, R, params, fitted_a0)`.
    pub bound_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialIssue {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    /// Trials whose reconstruction errored or stopped early.
    pub issues: Vec<TrialIssue>,
    /// Smallest `A_0` with `abs_err <= A_0 (6Q^2)^k (eps + far)` for every record.
    pub fitted_a0: f64,
    /// Median `abs_err` at `k = 1..=n_max` (`NaN` where no trial reached `k`).
    pub median_abs_err: Vec<f64>,
    /// Least-squares slope of `log(median_abs_err)` against `k`.
    pub log_error_slope: Option<f64>,
    pub resonance_count: usize,
    pub elapsed_ms: f64,
}

struct TrialOutcome {
    records: Vec<(usize, Complex64, Complex64)>,
    issue: Option<String>,
}

fn run_trial(cfg: &ExperimentConfig, set: &ResonanceSet, trial: usize) -> TrialOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial as u64);
    let perturbed = perturb_with_rng(set, cfg.epsilon, cfg.radius, &mut rng);
    match reconstruct(&perturbed, cfg.grid_m, cfg.n_max, cfg.seq.params()) {
        Ok(result) => {
            let records = result
                .alpha_hat
                .iter()
                .enumerate()
                .map(|(i, &a)| (i + 1, cfg.seq.get(i + 1), a))
                .collect();
            let issue = (result.stop != StopReason::Completed)
                .then(|| format!("extraction stopped: {:?}", result.stop));
            TrialOutcome { records, issue }
        }
        Err(e) => TrialOutcome {
            records: Vec::new(),
            issue: Some(e.to_string()),
        },
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Ordinary least-squares slope of `log y` against `x` over points with `y > 0`.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, y)| *y > 0.0 && y.is_finite())
        .map(|&(x, y)| (x, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

pub fn run_stability_experiment(cfg: &ExperimentConfig) -> Result<StabilityReport> {
    run_stability_experiment_with(cfg, Execution::default())
}

pub fn run_stability_experiment_with(cfg: &ExperimentConfig, exec: Execution) -> Result<StabilityReport> {
    cfg.validate()?;
    let start = Instant::now();
    let params = *cfg.seq.params();
    let set = find_resonances(&pi_polynomial(&cfg.seq), RESONANCE_TOL)?;

    let outcomes = exec.map_tasks(cfg.trials, |t| run_trial(cfg, &set, t));

    let far = far_term(cfg.radius, &params);
    let growth = 6.0 * params.q() * params.q();
    let mut raw = Vec::new();
    let mut issues = Vec::new();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        if let Some(message) = outcome.issue {
            issues.push(TrialIssue { trial, message });
        }
        for (k, alpha, alpha_hat) in outcome.records {
            raw.push((trial, k, alpha, alpha_hat, (alpha_hat - alpha).norm()));
        }
    }

    let scale = cfg.epsilon + far;
    let fitted_a0 = if scale > 0.0 {
        raw.iter()
            .map(|r| r.4 / (growth.powi(r.1 as i32) * scale))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let records: Vec<Record> = raw
        .into_iter()
        .map(|(trial, k, alpha, alpha_hat, abs_err)| Record {
            trial,
            k,
            alpha,
            alpha_hat,
            abs_err,
            bound_value: fitted_a0 * growth.powi(k as i32) * scale,
        })
        .collect();

    let median_abs_err: Vec<f64> = (1..=cfg.n_max)
        .map(|k| median(records.iter().filter(|r| r.k == k).map(|r| r.abs_err).collect()))
        .collect();
    let slope_points: Vec<(f64, f64)> = median_abs_err
        .iter()
        .enumerate()
        .map(|(i, &m)| ((i + 1) as f64, m))
        .collect();

    Ok(StabilityReport {
        config: cfg.clone(),
        records,
        issues,
        fitted_a0,
        median_abs_err,
        log_error_slope: log_slope(&slope_points),
        resonance_count: set.total_multiplicity(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Serialize)]
struct Summary<'a> {
    fitted_a0: f64,
    median_abs_err: Vec<Option<f64>>,
    log_error_slope: Option<f64>,
    growth_rate_log: f64,
    within_hypothesis: bool,
    epsilon_limit: f64,
    resonance_count: usize,
    trials: usize,
    records: usize,
    issues: &'a [TrialIssue],
    alpha: Vec<[f64; 2]>,
    config: &'a ExperimentConfig,
    elapsed_ms: f64,
}

impl StabilityReport {
    /// Per-record CSV. Contains no timing data, so it is reproducible byte for byte.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "trial", "k", "alpha_re", "alpha_im", "alpha_hat_re", "alpha_hat_im", "abs_err", "bound_value",
        ])?;
        for r in &self.records {
            w.write_record([
                r.trial.to_string(),
                r.k.to_string(),
                r.alpha.re.to_string(),
                r.alpha.im.to_string(),
                r.alpha_hat.re.to_string(),
                r.alpha_hat.im.to_string(),
                format!("{:e}", r.abs_err),
                format!("{:e}", r.bound_value),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        let p = self.config.seq.params();
        let summary = Summary {
            fitted_a0: self.fitted_a0,
            median_abs_err: self
                .median_abs_err
                .iter()
                .map(|&m| m.is_finite().then_some(m))
                .collect(),
            log_error_slope: self.log_error_slope,
            growth_rate_log: (6.0 * p.q() * p.q()).ln(),
            within_hypothesis: self.config.within_hypothesis(),
            epsilon_limit: self.config.epsilon_limit(),
            resonance_count: self.resonance_count,
            trials: self.config.trials,
            records: self.records.len(),
            issues: &self.issues,
            alpha: to_pairs(self.config.seq.as_slice()),
            config: &self.config,
            elapsed_ms: self.elapsed_ms,
        };
        Ok(serde_json::to_string_pretty(&summary)?)
    }

    /// Whitespace-separated columns `k median_abs_err bound` for gnuplot.
    pub fn write_gnuplot<W: Write>(&self, mut w: W) -> Result<()> {
        let p = self.config.seq.params();
        writeln!(w, "# k median_abs_err bound_fitted_a0")?;
        for (i, m) in self.median_abs_err.iter().enumerate() {
            let k = i + 1;
            let b = theorem_bound(k, self.config.epsilon, self.config.radius, p, self.fitted_a0)?;
            writeln!(w, "{k} {m:e} {b:e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::validate_class;
    use approx::assert_relative_eq;

    fn params() -> ClassParams {
        ClassParams::new(2.0, 2.0, 4.0).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sampler_is_deterministic_and_in_class() {
        let p = params();
        assert_eq!(sample_class_member(&p, 6, 42), sample_class_member(&p, 6, 42));
        assert_ne!(sample_class_member(&p, 6, 42), sample_class_member(&p, 6, 43));
        assert!(sample_class_member(&p, 0, 1).is_empty());
        // tight Q forces the rescaling branch
        let tight = ClassParams::new(1.5, 5.0, 1.05).unwrap();
        for seed in 0..200 {
            for p in [params(), tight] {
                let s = sample_class_member(&p, 1 + (seed as usize % 8), seed);
                assert!(validate_class(&s).passed(), "seed {seed}");
                assert!(s.as_slice().iter().all(|a| a.norm() <= SAMPLER_CAP));
            }
        }
    }

    #[test]
    fn perturbation_rules() {
        let set = ResonanceSet::new(vec![
            Resonance { location: c(-2.0, 0.0), multiplicity: 1 },
            Resonance { location: c(3.0, 1.0), multiplicity: 2 },
        ])
        .unwrap();
        assert_eq!(perturb_resonances(&set, 0.0, f64::INFINITY, 7).expanded().collect::<Vec<_>>(), set.expanded().collect::<Vec<_>>());
        assert!(perturb_resonances(&ResonanceSet::simple([c(-2.0, 0.0)]).unwrap(), 0.1, 1.5, 1).is_empty());
        let moved = perturb_resonances(&set, 0.05, f64::INFINITY, 9);
        assert_eq!(moved.total_multiplicity(), 3);
        let mut orig: Vec<Complex64> = set.expanded().collect();
        for z in moved.expanded() {
            let i = orig.iter().position(|o| (o - z).norm() < 0.05).expect("each moved zero stays within eps");
            orig.remove(i);
        }
        assert_eq!(perturb_resonances(&set, 0.05, 100.0, 9), perturb_resonances(&set, 0.05, 100.0, 9));
    }

    #[test]
    fn bound_values_and_shape() {
        let p = ClassParams::new(2.0, 1.0, 2.0).unwrap();
        let b = theorem_bound(1, 1e-3, 1e6, &p, 1.0).unwrap();
        let expected = 24.0 * (1e-3 + (1e6f64).ln().powi(2) / 1e6);
        assert_relative_eq!(b, expected, max_relative = 1e-14);
        assert_relative_eq!(b, 0.02858, max_relative = 1e-3);
        assert!(theorem_bound(1, 0.0, 1.0, &p, 1.0).is_err());
        assert_eq!(theorem_bound(3, 0.0, f64::INFINITY, &p, 1.0).unwrap(), 0.0);
        let mut prev = f64::INFINITY;
        for r in [10.0, 1e2, 1e4, 1e8, 1e16] {
            let v = theorem_bound(1, 0.0, r, &p, 1.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(theorem_bound(2, 1e-3, 10.0, &p, 1.0).unwrap() > theorem_bound(1, 1e-3, 10.0, &p, 1.0).unwrap());
        assert!(theorem_bound(1, 2e-3, 10.0, &p, 1.0).unwrap() > theorem_bound(1, 1e-3, 10.0, &p, 1.0).unwrap());
        let u = theorem_bound_uniform(1e-3, f64::INFINITY, &p, 1.0).unwrap();
        assert_relative_eq!(u, 1e-3f64.powf(1.0 / (24.0 * std::f64::consts::E).ln()), max_relative = 1e-14);
    }

    #[test]
    fn config_enforces_hypothesis_unless_overridden() {
        let s = sample_class_member(&params(), 4, 3);
        let limit = (resonance_free_radius(&params()) - 1.0) / 2.0;
        assert!(ExperimentConfig::new(s.clone(), 0.5 * limit, 100.0, 256, 4, 2, 1).is_ok());
        assert!(ExperimentConfig::new(s.clone(), 2.0 * limit, 100.0, 256, 4, 2, 1).is_err());
        let mut cfg = ExperimentConfig::new(s.clone(), 0.0, 100.0, 256, 4, 2, 1).unwrap();
        cfg.epsilon = 1e-2;
        assert!(cfg.validate().is_err());
        cfg.allow_outside_hypothesis = true;
        assert!(cfg.validate().is_ok());
        assert!(ExperimentConfig::new(s.clone(), 0.0, 1.0, 256, 4, 2, 1).is_err());
        assert!(ExperimentConfig::new(s, 0.0, 10.0, 100, 4, 2, 1).is_err());
    }

    #[test]
    fn config_json_uses_null_for_infinite_radius() {
        let s = VerblunskySequence::from_real(&[0.3], params()).unwrap();
        let cfg = ExperimentConfig::new(s, 0.0, f64::INFINITY, 256, 3, 2, 5).unwrap();
        let v = serde_json::to_value(&cfg).unwrap();
        assert_eq!(v["radius_R"], serde_json::Value::Null);
        assert_eq!(v["grid_M"], 256);
        let back: ExperimentConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn zero_perturbation_reduces_to_round_trip() {
        let s = sample_class_member(&params(), 5, 11);
        let cfg = ExperimentConfig::new(s, 0.0, f64::INFINITY, 4096, 7, 3, 1).unwrap();
        let report = run_stability_experiment(&cfg).unwrap();
        assert!(report.issues.is_empty());
        assert_eq!(report.records.len(), 21);
        assert!(report.records.iter().all(|r| r.abs_err <= 1e-6));
        assert_eq!(report.fitted_a0, 0.0);
    }

    #[test]
    fn report_is_deterministic_and_policy_independent() {
        let s = sample_class_member(&params(), 5, 12);
        let cfg = ExperimentConfig::beyond_hypothesis(s, 1e-3, 50.0, 1024, 6, 12, 99).unwrap();
        let a = run_stability_experiment_with(&cfg, Execution::Sequential).unwrap();
        let b = run_stability_experiment_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.fitted_a0.to_bits(), b.fitted_a0.to_bits());
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ca).unwrap();
        b.write_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
        for r in &a.records {
            assert!(r.abs_err <= r.bound_value * (1.0 + 1e-12));
        }
    }

    #[test]
    fn doubling_epsilon_roughly_doubles_the_error() {
        let s = sample_class_member(&params(), 5, 21);
        let median_k1 = |eps: f64| {
            let cfg = ExperimentConfig::beyond_hypothesis(s.clone(), eps, f64::INFINITY, 1024, 3, 60, 5).unwrap();
            run_stability_experiment(&cfg).unwrap().median_abs_err[0]
        };
        let ratio = median_k1(2e-4) / median_k1(1e-4);
        assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn slope_of_exact_exponential() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 3.0 * (0.7 * k as f64).exp())).collect();
        assert_relative_eq!(log_slope(&pts).unwrap(), 0.7, max_relative = 1e-12);
        assert_eq!(log_slope(&pts[..1]), None);
    }
}
