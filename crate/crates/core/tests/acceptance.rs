//! Acceptance suite. Runs as a plain binary (no libtest harness) so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cmvres::grid::node;
use cmvres::harness::RESONANCE_TOL;
use cmvres::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn class() -> ClassParams {
    ClassParams::new(2.0, 2.0, 4.0).unwrap()
}

/// Outcome of one criterion: pass flag plus a one-line summary.
struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let seq = VerblunskySequence::from_real(&[0.5], class()).unwrap();
    let pi = pi_polynomial(&seq);
    let pi_err = (pi.coeff(0) - 1.0).norm().max((pi.coeff(1) - 0.5).norm());
    let set = find_resonances(&pi, RESONANCE_TOL).unwrap();
    let root_err = if set.total_multiplicity() == 1 {
        (set.zeros()[0].location - c(-2.0, 0.0)).norm()
    } else {
        f64::INFINITY
    };
    let c0 = rho_data(&seq).c0;
    let c0_err = (c0 - 2.0 / 3f64.sqrt()).abs();
    let exact_m = |z: Complex64| (1.0 - z / 2.0) / (1.0 + z / 2.0);
    // m through the Schur recursion and through the boundary-value pipeline
    let schur_err = (0..512)
        .map(|j| (m_forward_schur(&seq, node(j, 512)).unwrap() - exact_m(node(j, 512))).norm())
        .fold(0.0, f64::max);
    let psi = pi_on_circle(&set, 512).unwrap().map(|p, _| p * c0);
    let m_grid = m_on_circle(&psi).unwrap();
    let pipe_err = m_grid.values().iter().enumerate()
        .map(|(j, &m)| (m - exact_m(node(j, 512))).norm())
        .fold(0.0, f64::max);
    let t = start.elapsed();
    let ok = pi_err <= 1e-12 && root_err <= 1e-12 && c0_err <= 1e-12 && schur_err <= 1e-10 && pipe_err <= 1e-10 && within(t, 0.1);
    verdict(ok, format!(
        "single coefficient: Pi err {pi_err:.1e}, root err {root_err:.1e}, psi0(0) err {c0_err:.1e}, m err {schur_err:.1e}/{pipe_err:.1e} (forward/boundary), {:.3} s",
        t.as_secs_f64()
    ))
}

fn criterion_2() -> Verdict {
    let seq = VerblunskySequence::from_real(&[0.5, 1.0 / 3.0], class()).unwrap();
    let pi = pi_polynomial(&seq);
    let expected = [1.0, 2.0 / 3.0, 1.0 / 3.0];
    let pi_err = expected.iter().enumerate().map(|(i, &e)| (pi.coeff(i) - e).norm()).fold(0.0, f64::max);
    let set = find_resonances(&pi, RESONANCE_TOL).unwrap();
    let r2 = 2f64.sqrt();
    let mut root_err: f64 = if set.total_multiplicity() == 2 { 0.0 } else { f64::INFINITY };
    for target in [c(-1.0, r2), c(-1.0, -r2)] {
        let d = set.expanded().map(|z| (z - target).norm()).fold(f64::INFINITY, f64::min);
        root_err = root_err.max(d);
    }
    let c0 = psi0_zero_from_pi(&pi_on_circle(&set, 1024).unwrap()).unwrap();
    let c0_err = (c0 - 1.224744871391589).abs();
    let exact_c0_err = (rho_data(&seq).c0 - 1.5f64.sqrt()).abs();
    let ok = pi_err <= 1e-12 && root_err <= 1e-10 && c0_err <= 1e-9 && exact_c0_err <= 1e-12;
    verdict(ok, format!(
        "two coefficients: Pi err {pi_err:.1e}, roots err {root_err:.1e}, C0 from Pi = {c0:.9} (err {c0_err:.1e})"
    ))
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for seed in 0..100u64 {
        let n = 1 + (seed % 8) as usize;
        let seq = sample_class_member(&class(), n, 1000 + seed);
        match round_trip(&seq, 4096, n + 2) {
            Ok(t) => worst = worst.max(t.max_error),
            Err(_) => failures += 1,
        }
    }
    let t = start.elapsed();
    let ok = failures == 0 && worst <= 1e-6 && within(t, 10.0);
    verdict(ok, format!(
        "round trip over 100 members at M = 4096: max error {worst:.2e}, {failures} failures, {:.2} s",
        t.as_secs_f64()
    ))
}

fn criterion_4() -> Verdict {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let seq = sample_class_member(&class(), 1 + (seed % 8) as usize, 2000 + seed);
        for j in 0..512 {
            let z = node(j, 512);
            let psi = jost_function(&seq, z);
            let m = m_forward_schur(&seq, z).unwrap();
            worst = worst.max((psi.norm_sqr() * m.re - 1.0).abs());
        }
    }
    verdict(worst <= 1e-10, format!("circle identity |psi0|^2 Re m = 1: max residual {worst:.2e} over 20 members x 512 points"))
}

fn criterion_5() -> Verdict {
    let radius = resonance_free_radius(&class());
    let mut violations = 0;
    let mut closest = f64::INFINITY;
    let mut errors = 0;
    for seed in 0..1000u64 {
        let seq = sample_class_member(&class(), 1 + (seed % 8) as usize, 3000 + seed);
        match find_resonances(&pi_polynomial(&seq), RESONANCE_TOL) {
            Ok(set) => {
                for z in set.expanded() {
                    closest = closest.min(z.norm());
                    if z.norm() <= radius || z.norm().is_nan() {
                        violations += 1;
                    }
                }
            }
            Err(_) => errors += 1,
        }
    }
    let ok = radius > 1.0 && violations == 0 && errors == 0;
    verdict(ok, format!(
        "resonance-free disk radius {radius:.7}: {violations} violations, {errors} solver errors over 1000 members (closest |z| = {closest:.4})"
    ))
}

fn criterion_6() -> Verdict {
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let n = 2 + (seed % 7) as usize;
        let seq = sample_class_member(&class(), n, 4000 + seed);
        let t = m_taylor_coeffs(&seq, 3).unwrap();
        let a1 = seq.get(1);
        let a2 = seq.get(2);
        let rho1_sq = 1.0 - a1.norm_sqr();
        let d1 = t[1] - (-2.0 * a1.conj());
        let d2 = 2.0 * t[2] - (4.0 * a1.conj() * a1.conj() - 4.0 * rho1_sq * a2.conj());
        worst = worst.max(d1.norm()).max(d2.norm());
    }
    verdict(worst <= 1e-9, format!("Taylor identities m'(0), m''(0): max error {worst:.2e} over 50 members"))
}

fn criterion_7() -> Verdict {
    let params = class();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut growth_v, mut lower_v, mut tail_v) = (0, 0, 0);
    let mut growth_margin = f64::INFINITY;
    let mut lower_max: f64 = 0.0;
    for seed in 0..20u64 {
        let seq = sample_class_member(&params, 1 + (seed % 8) as usize, 5000 + seed);
        let pi = pi_polynomial(&seq);
        for _ in 0..200 {
            let r = rng.random_range(1.0..=10.0);
            let z = Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
            let bound = log_growth_bound(z, &params).unwrap();
            let lhs = pi.eval(z).norm().ln();
            growth_margin = growth_margin.min(bound - lhs);
            if lhs > bound {
                growth_v += 1;
            }
        }
        for j in 0..512 {
            let v = pi.eval(node(j, 512)).norm_sqr().recip();
            lower_max = lower_max.max(v / (params.q() * params.q()));
            if v > params.q() * params.q() {
                lower_v += 1;
            }
        }
        for _ in 0..50 {
            let z = Complex64::from_polar(2.0 * rng.random::<f64>().sqrt(), rng.random_range(0.0..std::f64::consts::TAU));
            let jost = solve_jost(&seq, z, seq.len());
            for k in 0..=seq.len() {
                if jost.deviation(k) > tail_bound(&seq, z, k) * (1.0 + 1e-12) + 1e-15 {
                    tail_v += 1;
                }
            }
        }
    }
    let ok = growth_v + lower_v + tail_v == 0;
    verdict(ok, format!(
        "bounds: growth {growth_v} violations (min margin {growth_margin:.2}), |Pi|^-2 <= Q^2 {lower_v} violations (max ratio {lower_max:.3}), tail {tail_v} violations"
    ))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let params = class();
    let seq = sample_class_member(&params, 5, 8);
    let levels = [1e-4, 1e-3, 1e-2];
    let run = |eps: f64, seed: u64| {
        let cfg = ExperimentConfig::beyond_hypothesis(seq.clone(), eps, f64::INFINITY, 4096, 5, 50, seed).unwrap();
        run_stability_experiment(&cfg).unwrap()
    };
    let mut medians = Vec::new();
    let mut slopes = Vec::new();
    let mut a0_ratios = Vec::new();
    let mut issues = 0;
    for &eps in &levels {
        let a = run(eps, 100);
        let b = run(eps, 200);
        issues += a.issues.len() + b.issues.len();
        medians.push(a.median_abs_err[0]);
        slopes.push(a.log_error_slope.unwrap_or(f64::NEG_INFINITY));
        a0_ratios.push(a.fitted_a0.max(b.fitted_a0) / a.fitted_a0.min(b.fitted_a0));
    }
    let ratios: Vec<f64> = medians.windows(2).map(|w| w[1] / w[0]).collect();
    let slope_cap = (6.0 * params.q() * params.q()).ln() + 0.5;
    let t = start.elapsed();
    let ok = ratios.iter().all(|r| (5.0..=20.0).contains(r))
        && slopes.iter().all(|&s| s <= slope_cap)
        && a0_ratios.iter().all(|&r| r <= 10.0)
        && within(t, 60.0);
    verdict(ok, format!(
        "stability: eps ratios {:.2?}, log-slopes {:.2?} (cap {slope_cap:.2}), A0 batch ratios {:.2?}, {issues} trial issues, {:.1} s",
        ratios, slopes, a0_ratios, t.as_secs_f64()
    ))
}

fn criterion_9() -> Verdict {
    let grids = [512usize, 1024, 2048, 4096];
    let mut cases: Vec<VerblunskySequence> = (0..10u64)
        .map(|s| sample_class_member(&class(), 1 + (s % 8) as usize, 6000 + s))
        .collect();
    // resonance at about 1.03, so the quadrature error is visible above the floor
    let near = ClassParams::new(2.0, 3.0, 200.0).unwrap();
    cases.push(VerblunskySequence::from_real(&[0.97, 0.01], near).unwrap());
    let mut monotone = true;
    let mut near_errs = Vec::new();
    for seq in &cases {
        let errs: Vec<f64> = grids
            .iter()
            .map(|&m| round_trip(seq, m, seq.len() + 2).map(|t| t.max_error).unwrap_or(f64::INFINITY))
            .collect();
        monotone &= errs.windows(2).all(|w| w[1] <= w[0].max(1e-12)) && errs[3] <= 1e-6;
        near_errs = errs;
    }
    verdict(monotone, format!(
        "quadrature convergence over M = 512..4096 for {} sequences; near-circle case errors [{}]",
        cases.len(), near_errs.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(", ")
    ))
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let seq = sample_class_member(&class(), 5, 10);
    let cfg = ExperimentConfig::beyond_hypothesis(seq, 1e-3, 50.0, 1024, 6, 24, 42).unwrap();
    let cfg_path = dir.path().join("exp.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let bin = env!("CARGO_BIN_EXE_cmvres");
    let mut outputs = Vec::new();
    for (i, threads) in ["", "", "1", "2", "3", "8"].iter().enumerate() {
        let out = dir.path().join(format!("report{i}.csv"));
        let mut cmd = Command::new(bin);
        cmd.args(["stability", "--config"]).arg(&cfg_path).arg("--out").arg(&out);
        if threads.is_empty() {
            cmd.env_remove("CMVRES_THREADS");
        } else {
            cmd.env("CMVRES_THREADS", threads);
        }
        let status = cmd.output().unwrap();
        if !status.status.success() {
            return verdict(false, format!("stability subcommand failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        outputs.push(std::fs::read(&out).unwrap());
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    let lib_seq = run_stability_experiment_with(&cfg, Execution::Sequential).unwrap();
    let lib_par = run_stability_experiment_with(&cfg, Execution::Parallel).unwrap();
    let mut csv = Vec::new();
    lib_seq.write_csv(&mut csv).unwrap();
    let same_as_lib = lib_seq.records == lib_par.records && csv == outputs[0];
    verdict(identical && same_as_lib, format!(
        "determinism: {} CLI runs (threads default/1/2/3/8) byte-identical = {identical}, sequential/parallel library match = {same_as_lib}, {} bytes",
        outputs.len(), outputs[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Verdict); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let v = run();
        println!("criterion {id:>2}: {} - {}", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
