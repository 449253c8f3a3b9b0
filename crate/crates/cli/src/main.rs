use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use osclab::experiments::{
    default_fixtures, markdown_summary, run_theorem2_battery, run_theorem3_lab, samples_csv, to_json, write_report,
    ExperimentConfig, OutputFormat, Report, Theorem2Battery, Theorem3Report, ToolInfo,
};
use osclab::fit::{
    coefficient_at, fit_leading, local_slopes, sample_series, BoundVerdict, CoefficientProbe, ExponentEstimate, FitOptions,
    FitOutcome,
};
use osclab::polytope::{check_c_nondegenerate, check_r_nondegenerate, NewtonPolytope, NondegeneracyVerdict, PolytopeJson};
use osclab::quadrature::{eval_oscillatory, OscillatorySample, Shape};
use osclab::rlct::{rlct_from_resolution, rlct_homogeneous, rlct_newton_candidate, ResolutionDatum};
use osclab::Error;

#[derive(Parser)]
#[command(name = "osclab", version, about = "Newton polytopes, log canonical thresholds and oscillatory integral asymptotics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Newton polytope, distance, principal faces and nondegeneracy verdicts.
    Polytope(Common),
    /// Real log canonical threshold.
    Rlct {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        method: Option<RlctChoice>,
        /// Resolution data: a JSON array of {"m", "k"} objects, or a path to one.
        #[arg(long)]
        resolution: Option<String>,
    },
    /// Samples I(τ, x^ν η) over the τ grid.
    Oscillate(Common),
    /// Fits the leading exponent, from fresh samples or a CSV table.
    Fit {
        #[command(flatten)]
        common: Common,
        /// CSV with header tau,re,im,abs,err.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Also probe the coefficient of τ^alpha (log τ)^k for k = 0..n−1.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// Fits every bound-battery fixture and compares with −1/d(f, φ).
    #[command(name = "theorem2-battery")]
    Theorem2Battery(Common),
    /// Parity laboratory for a homogeneous phase in even dimension.
    #[command(name = "theorem3-lab")]
    Theorem3Lab(Common),
    /// Re-emits a saved JSON report in another format.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RlctChoice {
    Homogeneous,
    Candidate,
    Resolution,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Product,
    Radial,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Md,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    phase: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated exponents of the monomial weight.
    #[arg(long, value_delimiter = ',')]
    nu: Option<Vec<u32>>,
    /// Cutoff radii a,b with 0 < a < b.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    cutoff: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    shape: Option<ShapeArg>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_count: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

enum Failure {
    Usage(String),
    NonConvergence(String),
    Hypothesis(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::NonConvergence(_) => 2,
            Failure::Hypothesis(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::NonConvergence(m) | Failure::Hypothesis(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Hypothesis(_) | Error::NotConvenient | Error::NotHomogeneous => Failure::Hypothesis(msg),
            Error::BudgetExceeded { .. } | Error::UnbracketedZero(_) | Error::InsufficientSamples { .. } => {
                Failure::NonConvergence(msg)
            }
            _ => Failure::Usage(msg),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn resolve(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            toml::from_str::<ExperimentConfig>(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(p) = &common.phase {
        cfg.phase = p.clone();
    }
    if let Some(d) = common.dim {
        cfg.dim = d;
    }
    if let Some(nu) = &common.nu {
        cfg.nu = Some(nu.clone());
    }
    if let Some(c) = &common.cutoff {
        if c.len() != 2 {
            return Err(Failure::Usage(format!("--cutoff takes two radii a,b, got {} values", c.len())));
        }
        cfg.cutoff = [c[0], c[1]];
    }
    if let Some(s) = common.shape {
        cfg.shape = match s {
            ShapeArg::Product => Shape::Product,
            ShapeArg::Radial => Shape::Radial,
        };
    }
    if let Some(v) = common.tau_min {
        cfg.tau_min = v;
    }
    if let Some(v) = common.tau_max {
        cfg.tau_max = v;
    }
    if let Some(v) = common.tau_count {
        cfg.tau_count = v;
    }
    if let Some(v) = common.tol {
        cfg.tol = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.display().to_string());
    }
    if let Some(f) = common.format {
        cfg.format = match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Md => OutputFormat::Md,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Prints `body` or writes it to `<out>/<name>`.
fn emit(cfg: &ExperimentConfig, name: &str, body: &str) -> Result<(), Failure> {
    match &cfg.out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(dir) => {
            let dir = Path::new(dir);
            std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    Ok(to_json(v)?)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Polytope(c) => polytope(&resolve(&c)?),
        Command::Rlct { common, method, resolution } => rlct(&resolve(&common)?, method, resolution),
        Command::Oscillate(c) => oscillate(&resolve(&c)?),
        Command::Fit { common, input, alpha } => fit(&resolve(&common)?, input, alpha),
        Command::Theorem2Battery(c) => battery(&resolve(&c)?),
        Command::Theorem3Lab(c) => lab(&resolve(&c)?),
        Command::Report { common, input } => report(&resolve(&common)?, &input),
    }
}

#[derive(Serialize)]
struct PolytopeReport {
    kind: &'static str,
    tool: ToolInfo,
    phase: String,
    polytope: PolytopeJson,
    convenient: bool,
    intercepts: Option<Vec<u32>>,
    newton_distance: Option<String>,
    principal_faces: Vec<Vec<String>>,
    pair: Option<PairReport>,
    real_nondegeneracy: NondegeneracyVerdict,
    complex_nondegeneracy: NondegeneracyVerdict,
}

#[derive(Serialize)]
struct PairReport {
    nu: Vec<u32>,
    distance: String,
    r: String,
    r_prime: String,
    bound: String,
    bound_holds: bool,
}

fn polytope(cfg: &ExperimentConfig) -> Outcome {
    let resolved = cfg.validate()?;
    let f = &resolved.f;
    let poly = NewtonPolytope::of_polynomial(f)?;
    let conv = poly.is_convenient();
    let (newton_distance, principal_faces, pair) = if conv.convenient {
        let dist = poly.newton_distance()?;
        let faces = dist.principal.iter().map(|p| p.weights.iter().map(|w| w.to_string()).collect()).collect();
        let radii = poly.pair_distance_and_radii(&NewtonPolytope::of_monomial(&resolved.nu)?)?;
        let pair = PairReport {
            nu: resolved.nu.entries().to_vec(),
            distance: radii.distance.to_string(),
            r: radii.r.to_string(),
            r_prime: radii.r_prime.to_string(),
            bound: radii.bound.to_string(),
            bound_holds: radii.bound_holds(),
        };
        (Some(dist.t0.to_string()), faces, Some(pair))
    } else {
        (None, Vec::new(), None)
    };
    let search = cfg.search_options();
    let report = PolytopeReport {
        kind: "polytope",
        tool: ToolInfo::default(),
        phase: f.to_string(),
        polytope: poly.to_json(),
        convenient: conv.convenient,
        intercepts: conv.intercepts,
        newton_distance,
        principal_faces,
        pair,
        real_nondegeneracy: check_r_nondegenerate(f, &search)?,
        complex_nondegeneracy: check_c_nondegenerate(f, &search)?,
    };
    emit(cfg, "polytope.json", &json(&report)?)?;
    Ok(0)
}

fn rlct(cfg: &ExperimentConfig, method: Option<RlctChoice>, resolution: Option<String>) -> Outcome {
    let search = cfg.search_options();
    let report = match (method, resolution) {
        (Some(RlctChoice::Resolution), None) => {
            return Err(Failure::Usage("--method resolution needs --resolution".into()));
        }
        (None | Some(RlctChoice::Resolution), Some(text)) => {
            let text = if Path::new(&text).is_file() {
                std::fs::read_to_string(&text).map_err(|e| Failure::Usage(format!("{text}: {e}")))?
            } else {
                text
            };
            rlct_from_resolution(&ResolutionDatum::from_json(&text)?)?
        }
        (Some(_), Some(_)) => return Err(Failure::Usage("--resolution only goes with --method resolution".into())),
        (choice, None) => {
            let f = cfg.validate()?.f;
            match choice {
                Some(RlctChoice::Homogeneous) => rlct_homogeneous(&f, &search)?,
                Some(RlctChoice::Candidate) => rlct_newton_candidate(&f, &search)?,
                _ if f.homogeneous_degree()?.is_some() => rlct_homogeneous(&f, &search)?,
                _ => rlct_newton_candidate(&f, &search)?,
            }
        }
    };
    emit(cfg, "rlct.json", &json(&report)?)?;
    Ok(0)
}

#[derive(Serialize, Deserialize)]
struct OscillateReport {
    kind: String,
    tool: ToolInfo,
    config: ExperimentConfig,
    samples: Vec<OscillatorySample>,
    slopes: Vec<Option<f64>>,
}

fn oscillate(cfg: &ExperimentConfig) -> Outcome {
    let resolved = cfg.validate()?;
    let phi = resolved.test_function(cfg.shape);
    let samples = sample_series(&resolved.taus, |tau| eval_oscillatory(&resolved.f, &phi, tau, cfg.tol))?;
    let all_converged = samples.iter().all(|s| s.converged);
    match cfg.format {
        OutputFormat::Csv => emit(cfg, "samples.csv", &samples_csv(&samples))?,
        OutputFormat::Json | OutputFormat::Md => {
            let slopes = local_slopes(&samples);
            let report = OscillateReport { kind: "oscillate".into(), tool: ToolInfo::default(), config: cfg.clone(), samples, slopes };
            emit(cfg, "oscillate.json", &json(&report)?)?;
        }
    }
    Ok(if all_converged { 0 } else { 2 })
}

/// The fit summary with `coeff_hat` as `[re, im]`.
#[derive(Serialize, Deserialize)]
struct FitSummary {
    alpha_hat: Option<f64>,
    k_hat: u32,
    coeff_hat: [f64; 2],
    residual: f64,
    noise_floor: f64,
    converged: bool,
    window: [f64; 2],
    consistent_with_zero: bool,
}

impl From<&ExponentEstimate> for FitSummary {
    fn from(e: &ExponentEstimate) -> Self {
        FitSummary {
            alpha_hat: e.alpha_hat,
            k_hat: e.k_hat,
            coeff_hat: [e.coeff_hat.re, e.coeff_hat.im],
            residual: e.residual,
            noise_floor: e.noise_floor,
            converged: e.converged,
            window: [e.window.0, e.window.1],
            consistent_with_zero: e.outcome == FitOutcome::ConsistentWithZero,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FitReport {
    kind: String,
    tool: ToolInfo,
    config: ExperimentConfig,
    fit: FitSummary,
    estimate: ExponentEstimate,
    probes: Vec<CoefficientProbe>,
    samples: Vec<OscillatorySample>,
}

fn read_samples_csv(path: &Path) -> Result<Vec<OscillatorySample>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("tau,re,im,abs,err") {
        return Err(Failure::Usage(format!("{}: expected the header tau,re,im,abs,err", path.display())));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let fields: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
            match fields {
                Ok(v) if v.len() == 5 => Ok(OscillatorySample {
                    tau: v[0],
                    value: Complex64::new(v[1], v[2]),
                    error_estimate: v[4],
                    converged: true,
                }),
                _ => Err(Failure::Usage(format!("{}: line {}: expected five numbers", path.display(), i + 2))),
            }
        })
        .collect()
}

fn fit(cfg: &ExperimentConfig, input: Option<PathBuf>, alpha: Option<f64>) -> Outcome {
    let samples = match input {
        Some(path) => read_samples_csv(&path)?,
        None => {
            let resolved = cfg.validate()?;
            let phi = resolved.test_function(cfg.shape);
            sample_series(&resolved.taus, |tau| eval_oscillatory(&resolved.f, &phi, tau, cfg.tol))?
        }
    };
    let opts = FitOptions { max_k: cfg.dim.saturating_sub(1) as u32, ..cfg.fit.clone() };
    let estimate = fit_leading(&samples, &opts)?;
    let probes = match alpha {
        Some(a) => (0..cfg.dim as u32).map(|k| coefficient_at(&samples, a, k)).collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let report = FitReport {
        kind: "fit".into(),
        tool: ToolInfo::default(),
        config: cfg.clone(),
        fit: FitSummary::from(&estimate),
        estimate: estimate.clone(),
        probes,
        samples,
    };
    match cfg.format {
        OutputFormat::Csv => emit(cfg, "samples.csv", &samples_csv(&report.samples))?,
        _ => emit(cfg, "fit.json", &json(&report)?)?,
    }
    Ok(if estimate.converged { 0 } else { 2 })
}

fn battery_code(b: &Theorem2Battery) -> u8 {
    if b.passed {
        0
    } else if b.indeterminate > 0 && b.rows.iter().all(|r| r.check.verdict != BoundVerdict::Fail) {
        2
    } else {
        3
    }
}

fn write_or_print(cfg: &ExperimentConfig, report: &Report<'_>) -> Result<(), Failure> {
    match &cfg.out {
        Some(dir) => {
            for path in write_report(report, cfg.format, Path::new(dir))? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        None => match cfg.format {
            OutputFormat::Json => {
                let body = match report {
                    Report::Lab(r) => to_json(r)?,
                    Report::Battery(b) => to_json(b)?,
                };
                print!("{body}");
                Ok(())
            }
            OutputFormat::Md => {
                print!("{}", markdown_summary(report));
                Ok(())
            }
            OutputFormat::Csv => Err(Failure::Usage("CSV output of a report has several tables; pass --out <dir>".into())),
        },
    }
}

fn needs_out_for_csv(cfg: &ExperimentConfig) -> Result<(), Failure> {
    if cfg.format == OutputFormat::Csv && cfg.out.is_none() {
        return Err(Failure::Usage("CSV output of a report has several tables; pass --out <dir>".into()));
    }
    Ok(())
}

fn battery(cfg: &ExperimentConfig) -> Outcome {
    needs_out_for_csv(cfg)?;
    let b = run_theorem2_battery(&default_fixtures(), cfg)?;
    write_or_print(cfg, &Report::Battery(&b))?;
    Ok(battery_code(&b))
}

fn lab(cfg: &ExperimentConfig) -> Outcome {
    needs_out_for_csv(cfg)?;
    let r = run_theorem3_lab(cfg)?;
    write_or_print(cfg, &Report::Lab(&r))?;
    Ok(0)
}

fn report(cfg: &ExperimentConfig, input: &Path) -> Outcome {
    let text = std::fs::read_to_string(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let bad = |e: serde_json::Error| Failure::Usage(format!("{}: {e}", input.display()));
    match value.get("kind").and_then(|k| k.as_str()) {
        Some("theorem3-lab") => {
            let r: Theorem3Report = serde_json::from_value(value).map_err(bad)?;
            write_or_print(cfg, &Report::Lab(&r))?;
        }
        Some("theorem2-battery") => {
            let b: Theorem2Battery = serde_json::from_value(value).map_err(bad)?;
            write_or_print(cfg, &Report::Battery(&b))?;
        }
        Some("oscillate") => {
            let r: OscillateReport = serde_json::from_value(value).map_err(bad)?;
            report_samples(cfg, &r.samples, &r.config)?;
        }
        Some("fit") => {
            let r: FitReport = serde_json::from_value(value).map_err(bad)?;
            report_samples(cfg, &r.samples, &r.config)?;
        }
        other => return Err(Failure::Usage(format!("{}: unknown report kind {other:?}", input.display()))),
    }
    Ok(0)
}

fn report_samples(cfg: &ExperimentConfig, samples: &[OscillatorySample], original: &ExperimentConfig) -> Result<(), Failure> {
    match cfg.format {
        OutputFormat::Csv => emit(cfg, "samples.csv", &samples_csv(samples)),
        OutputFormat::Json => emit(cfg, "samples.json", &json(&samples)?),
        OutputFormat::Md => {
            let mut body = format!("# Samples for f = {}\n\n| tau | re | im | abs | err |\n|---|---|---|---|---|\n", original.phase);
            for s in samples {
                body.push_str(&format!(
                    "| {:.6e} | {:.6e} | {:.6e} | {:.6e} | {:.1e} |\n",
                    s.tau,
                    s.value.re,
                    s.value.im,
                    s.value.norm(),
                    s.error_estimate
                ));
            }
            emit(cfg, "samples.md", &body)
        }
    }
}
