use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Theorem2Battery, Theorem3Report};
use crate::error::{Error, Result};
use crate::fit::BoundVerdict;
use crate::quadrature::OscillatorySample;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    #[serde(alias = "markdown")]
    Md,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Md),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?} (json, csv, md)"))),
        }
    }
}

/// Reports that can be exported.
pub enum Report<'a> {
    Lab(&'a Theorem3Report),
    Battery(&'a Theorem2Battery),
}

/// Pretty-printed JSON with a trailing newline. Field order is fixed by the
/// type definitions, so equal reports give identical bytes.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn samples_csv(samples: &[OscillatorySample]) -> String {
    let mut out = String::from("tau,re,im,abs,err\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.tau,
            s.value.re,
            s.value.im,
            s.value.norm(),
            s.error_estimate
        );
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |v| format!("{v:.6}"))
}

pub fn markdown_summary(report: &Report<'_>) -> String {
    let mut out = String::new();
    match report {
        Report::Lab(r) => {
            let _ = writeln!(out, "# Parity laboratory: f = {}\n", r.f);
            let _ = writeln!(out, "{} {}. n = {}, d = {}, rlct = {} (charts: {}).\n", r.tool.name, r.tool.version, r.n, r.d, r.gamma, r.gamma_from_charts);
            let _ = writeln!(out, "## Hypotheses\n");
            for h in &r.hypotheses {
                let _ = writeln!(out, "- {} {}: {}", if h.passed { "[ok]" } else { "[failed]" }, h.name, h.detail);
            }
            let _ = writeln!(out, "\n## Claims\n");
            for c in &r.claims {
                let _ = writeln!(
                    out,
                    "- [{}] {}: {} (measured {}, expected {}, tolerance {:.1e}, noise floor {:.1e})",
                    c.verdict,
                    c.id,
                    c.statement,
                    opt(c.measured),
                    opt(c.expected),
                    c.tolerance,
                    c.noise_floor
                );
            }
            let _ = writeln!(out, "\n## Consistency\n");
            for c in &r.consistency {
                let _ = writeln!(
                    out,
                    "- {} {}: {:.3e} (tolerance {:.1e})",
                    if c.passed { "[ok]" } else { "[failed]" },
                    c.name,
                    c.measured,
                    c.tolerance
                );
            }
            if let Some(o) = &r.oracle {
                let _ = writeln!(out, "\nSeparable oracle: α = {:.6}, C = {:.10} {:+.10}i", o.alpha, o.coeff.re, o.coeff.im);
            }
        }
        Report::Battery(b) => {
            let _ = writeln!(out, "# Bound battery\n");
            let _ = writeln!(out, "{} {}. Passed: {}.\n", b.tool.name, b.tool.version, b.passed);
            let _ = writeln!(out, "| fixture | phase | nu | rlct | d(f,phi) | r | r' | bound | alpha_hat | verdict |");
            let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|---|");
            for row in &b.rows {
                let c = &row.check;
                let verdict = match c.verdict {
                    BoundVerdict::Pass => "pass",
                    BoundVerdict::Fail => "fail",
                    BoundVerdict::Indeterminate => "indeterminate",
                    BoundVerdict::VacuousPass => "vacuous pass",
                };
                let _ = writeln!(
                    out,
                    "| {} | {} | {:?} | {} | {} | {} | {} | {:.6} | {} | {} |",
                    row.fixture.name,
                    row.fixture.phase,
                    row.fixture.nu,
                    row.rlct,
                    c.distance,
                    c.r,
                    c.r_prime,
                    c.bound_exponent,
                    opt(c.alpha_hat),
                    verdict
                );
            }
        }
    }
    out
}

/// Writes the report under `dir` and returns the paths written. CSV output
/// is one sample table per series.
pub fn write_report(report: &Report<'_>, format: OutputFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files: Vec<(String, String)> = Vec::new();
    match (format, report) {
        (OutputFormat::Json, Report::Lab(r)) => files.push(("theorem3-lab.json".into(), to_json(r)?)),
        (OutputFormat::Json, Report::Battery(b)) => files.push(("theorem2-battery.json".into(), to_json(b)?)),
        (OutputFormat::Md, Report::Lab(_)) => files.push(("theorem3-lab.md".into(), markdown_summary(report))),
        (OutputFormat::Md, Report::Battery(_)) => files.push(("theorem2-battery.md".into(), markdown_summary(report))),
        (OutputFormat::Csv, Report::Lab(r)) => {
            files.push(("chi-prime.csv".into(), samples_csv(&r.chi_prime.samples)));
            files.push(("generic-bump.csv".into(), samples_csv(&r.generic_bump.samples)));
        }
        (OutputFormat::Csv, Report::Battery(b)) => {
            for row in &b.rows {
                files.push((format!("{}.csv", row.fixture.name), samples_csv(&row.samples)));
            }
        }
    }
    files
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}
