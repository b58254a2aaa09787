use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cmvres::{
    harness::RESONANCE_TOL, find_resonances, pi_polynomial, reconstruct, round_trip,
    run_stability_experiment, sample_class_member, validate_class, CircleGrid, ClassParams,
    ExperimentConfig, ResonanceSet, VerblunskySequence,
};

/// Forward and inverse resonance maps for CMV operators.
#[derive(Parser)]
#[command(name = "cmvres", version, about)]
struct Cli {
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, env = "CMVRES_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jost function data: Pi coefficients, psi_0(0) and psi_0 on the unit circle.
    Forward {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of circle samples (power of two).
        #[arg(long, default_value_t = 512)]
        grid: usize,
    },
    /// Resonances of a coefficient sequence (CSV, or JSON if the output ends in .json).
    Resonances {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = RESONANCE_TOL)]
        tol: f64,
    },
    /// Reconstruct coefficients from a resonance set.
    Invert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 12)]
        nmax: usize,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Forward then inverse; exits 0 iff the coefficient error is within --tol.
    Roundtrip {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        /// Defaults to N + 2.
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Seeded perturbation experiment.
    Stability(StabilityArgs),
    /// Draw a random member of the class.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        class: ClassArgs,
    },
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long = "cap-c", default_value_t = 2.0)]
    cap_c: f64,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
}

impl ClassArgs {
    fn params(&self) -> cmvres::Result<ClassParams> {
        ClassParams::new(self.gamma, self.cap_c, self.q)
    }
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    config: PathBuf,
    /// Per-record CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Columns `k median_abs_err bound` for plotting.
    #[arg(long)]
    gnuplot: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Retention radius; `inf` keeps every resonance.
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    allow_outside_hypothesis: bool,
}

#[derive(Serialize)]
struct ForwardDoc {
    alpha: Vec<[f64; 2]>,
    pi: Vec<[f64; 2]>,
    psi0_zero: f64,
    grid_m: usize,
    psi0_on_circle: Vec<[f64; 2]>,
}

fn pairs(values: &[cmvres::Complex64]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn read_sequence(path: &Path) -> anyhow::Result<VerblunskySequence> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let seq: VerblunskySequence = serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))?;
    let report = validate_class(&seq);
    if !report.passed() {
        eprintln!("warning: sequence is outside the declared class: {report:?}");
    }
    Ok(seq)
}

fn read_resonances(path: &Path) -> anyhow::Result<ResonanceSet> {
    let file = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    if is_json(path) {
        Ok(serde_json::from_reader(file)?)
    } else {
        Ok(ResonanceSet::read_csv(file)?)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Forward { input, out, grid } => {
            let seq = read_sequence(&input)?;
            let pi = pi_polynomial(&seq);
            let c0 = cmvres::rho_data(&seq).c0;
            let psi = CircleGrid::from_fn(grid, |z| pi.eval(z) * c0)?;
            let doc = ForwardDoc {
                alpha: pairs(seq.as_slice()),
                pi: pairs(pi.coeffs()),
                psi0_zero: c0,
                grid_m: grid,
                psi0_on_circle: pairs(psi.values()),
            };
            let mut w = open_out(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
            w.flush()?;
        }
        Command::Resonances { input, out, tol } => {
            let seq = read_sequence(&input)?;
            let set = find_resonances(&pi_polynomial(&seq), tol)?;
            let mut w = open_out(out.as_deref())?;
            if out.as_deref().is_some_and(is_json) {
                serde_json::to_writer(&mut w, &set)?;
                writeln!(w)?;
            } else {
                set.write_csv(&mut w)?;
            }
            w.flush()?;
        }
        Command::Invert { input, out, grid, nmax, class } => {
            let set = read_resonances(&input)?;
            let result = reconstruct(&set, grid, nmax, &class.params()?)?;
            let mut w = open_out(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &result)?;
            writeln!(w)?;
            w.flush()?;
            if result.failed() {
                eprintln!("reconstruction stopped early: {:?}", result.stop);
            }
        }
        Command::Roundtrip { input, grid, nmax, tol } => {
            let seq = read_sequence(&input)?;
            let n_max = nmax.unwrap_or(seq.len() + 2);
            let trip = round_trip(&seq, grid, n_max)?;
            println!(
                "resonances: {}  stop: {:?}  max |alpha_hat - alpha| = {:e}",
                trip.resonances.total_multiplicity(),
                trip.result.stop,
                trip.max_error
            );
            if trip.max_error > tol {
                eprintln!("round trip error exceeds tolerance {tol:e}");
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Stability(args) => stability(args)?,
        Command::Sample { n, seed, out, class } => {
            let seq = sample_class_member(&class.params()?, n, seed);
            let mut w = open_out(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &seq)?;
            writeln!(w)?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn stability(args: StabilityArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    // parse without validation first so command-line overrides can fix an invalid field
    let mut cfg: serde_json::Value = serde_json::from_str(&text)?;
    let obj = cfg.as_object_mut().context("config must be a JSON object")?;
    if let Some(v) = args.seed {
        obj.insert("seed".into(), v.into());
    }
    if let Some(v) = args.grid {
        obj.insert("grid_M".into(), v.into());
    }
    if let Some(v) = args.nmax {
        obj.insert("n_max".into(), v.into());
    }
    if let Some(v) = args.eps {
        obj.insert("epsilon".into(), v.into());
    }
    if let Some(v) = args.radius {
        let r = if v.is_infinite() { serde_json::Value::Null } else { v.into() };
        obj.insert("radius_R".into(), r);
    }
    if let Some(v) = args.trials {
        obj.insert("trials".into(), v.into());
    }
    if args.allow_outside_hypothesis {
        obj.insert("allow_outside_hypothesis".into(), true.into());
    }
    let cfg: ExperimentConfig = serde_json::from_value(cfg).context("invalid experiment config")?;
    if !cfg.within_hypothesis() {
        eprintln!(
            "note: epsilon = {} is not below delta/2 = {:e}",
            cfg.epsilon,
            cfg.epsilon_limit()
        );
    }
    let report = run_stability_experiment(&cfg)?;

    let mut w = open_out(args.out.as_deref())?;
    report.write_csv(&mut w)?;
    w.flush()?;
    if let Some(path) = &args.summary {
        std::fs::write(path, report.summary_json()? + "\n")?;
    }
    if let Some(path) = &args.gnuplot {
        report.write_gnuplot(BufWriter::new(File::create(path)?))?;
    }
    if !report.issues.is_empty() {
        eprintln!("{} trial(s) did not complete cleanly", report.issues.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.threads {
        #[cfg(feature = "parallel")]
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => Err(e.into()),
        },
        Some(0) => {
            eprintln!("error: thread count must be positive");
            return ExitCode::from(2);
        }
        _ => run(cli),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
