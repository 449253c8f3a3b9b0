//! Experiment configuration, the bound battery, the parity laboratory and
//! report export.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{tau_grid, FitOptions};
use crate::polynomial::{parse, ExponentVector, Polynomial};
use crate::polytope::SearchOptions;
use crate::quadrature::{CutoffFunction, Shape, TestFunction};

mod battery;
mod export;
mod lab;

pub use battery::{default_fixtures, run_theorem2_battery, BatteryFixture, BatteryRow, Theorem2Battery};
pub use export::{markdown_summary, samples_csv, to_json, write_report, OutputFormat, Report};
pub use lab::{
    run_theorem3_lab, ChartPoint, ChartSeries, ClaimLine, ConsistencyCheck, HypothesisCheck, SeriesSummary, SweepEntry,
    Theorem3Report, Verdict,
};

pub const TOOL_NAME: &str = "osclab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo { name: TOOL_NAME.into(), version: TOOL_VERSION.into() }
    }
}

/// Settings specific to the parity laboratory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabConfig {
    /// Cutoff `η` used inside `χ′`, as `[a, b]`.
    pub eta: [f64; 2],
    /// Chart overlap of the partition of unity.
    pub epsilon: f64,
    /// τ values at which the signed and absolute chart integrals are tabulated.
    pub chart_taus: Vec<f64>,
    pub chart_tol: f64,
    pub chi_tau_min: f64,
    pub chi_tau_max: f64,
    pub chi_tau_count: usize,
    /// Support radii `b` of the generic bumps `η(a = b/2, b)` in the sweep.
    pub sweep_radii: Vec<f64>,
    pub sweep_count: usize,
    /// Largest `|signed| / |absolute|` counted as vanishing.
    pub vanishing_tol: f64,
    pub exponent_tol: f64,
    /// Relative tolerance for coefficient comparisons with the oracle.
    pub coefficient_tol: f64,
    /// τ at which the chart sum is compared with direct integration of `χ′`.
    pub check_tau: f64,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig {
            eta: [0.5, 1.0],
            epsilon: 0.25,
            chart_taus: vec![1.0, 10.0, 100.0, 1000.0],
            chart_tol: 1e-8,
            chi_tau_min: 1e2,
            chi_tau_max: 3e3,
            chi_tau_count: 10,
            sweep_radii: vec![2.0, 1.0, 0.5],
            sweep_count: 10,
            vanishing_tol: 1e-10,
            exponent_tol: 0.05,
            coefficient_tol: 0.02,
            check_tau: 10.0,
        }
    }
}

/// Everything a run needs. Keys mirror the command-line flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub phase: String,
    pub dim: usize,
    /// Monomial weight `x^ν`; all zeros when absent.
    pub nu: Option<Vec<u32>>,
    /// Bump cutoff `[a, b]`.
    pub cutoff: [f64; 2],
    pub shape: Shape,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_count: usize,
    pub tol: f64,
    /// Tolerance on `α̂` for the bound checks.
    pub exponent_tol: f64,
    pub seed: u64,
    pub out: Option<String>,
    pub format: OutputFormat,
    pub fit: FitOptions,
    pub lab: LabConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            phase: "x1^4 + x2^4".into(),
            dim: 2,
            nu: None,
            cutoff: [1.0, 2.0],
            shape: Shape::Product,
            tau_min: 1e2,
            tau_max: 1e4,
            tau_count: 24,
            tol: 1e-10,
            exponent_tol: 0.05,
            seed: 0x5eed,
            out: None,
            format: OutputFormat::Json,
            fit: FitOptions::default(),
            lab: LabConfig::default(),
        }
    }
}

/// A configuration checked against every precondition, with parsed parts.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub f: Polynomial,
    pub nu: ExponentVector,
    pub cutoff: CutoffFunction,
    pub taus: Vec<f64>,
}

impl ResolvedConfig {
    pub fn test_function(&self, shape: Shape) -> TestFunction {
        TestFunction::new(self.nu.clone(), self.cutoff, shape)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<ResolvedConfig> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        let f = parse(&self.phase, self.dim)?;
        let nu = match &self.nu {
            Some(v) if v.len() != self.dim => return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() }),
            Some(v) => ExponentVector::new(v.clone()),
            None => ExponentVector::zeros(self.dim),
        };
        let cutoff = CutoffFunction::new(self.cutoff[0], self.cutoff[1])?;
        if !(self.tau_min >= 1.0) {
            return Err(Error::InvalidArgument(format!("tau_min must be at least 1, got {}", self.tau_min)));
        }
        let taus = tau_grid(self.tau_min, self.tau_max, self.tau_count)?;
        positive("tol", self.tol)?;
        positive("exponent_tol", self.exponent_tol)?;
        let lab = &self.lab;
        CutoffFunction::new(lab.eta[0], lab.eta[1])?;
        positive("lab.chart_tol", lab.chart_tol)?;
        positive("lab.vanishing_tol", lab.vanishing_tol)?;
        positive("lab.exponent_tol", lab.exponent_tol)?;
        positive("lab.coefficient_tol", lab.coefficient_tol)?;
        positive("lab.check_tau", lab.check_tau)?;
        if lab.chart_taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidArgument("lab.chart_taus must be positive".into()));
        }
        if lab.sweep_radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::InvalidArgument("lab.sweep_radii must be positive".into()));
        }
        tau_grid(lab.chi_tau_min, lab.chi_tau_max, lab.chi_tau_count)?;
        Ok(ResolvedConfig { f, nu, cutoff, taus })
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions { seed: self.seed, ..SearchOptions::default() }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let r = ExperimentConfig::default().validate().unwrap();
        assert_eq!(r.taus.len(), 24);
        assert_eq!(r.nu, ExponentVector::zeros(2));
    }

    #[test]
    fn json_round_trip_fills_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"phase": "x1^2 + x2^2", "lab": {"epsilon": 0.2}}"#).unwrap();
        assert_eq!(c.phase, "x1^2 + x2^2");
        assert_eq!(c.lab.epsilon, 0.2);
        assert_eq!(c.lab.chart_tol, 1e-8);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"phaze": "x1"}"#).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let bad = |f: fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default();
            f(&mut c);
            c.validate().is_err()
        };
        assert!(bad(|c| c.dim = 4));
        assert!(bad(|c| c.phase = "x3".into()));
        assert!(bad(|c| c.nu = Some(vec![1])));
        assert!(bad(|c| c.cutoff = [2.0, 1.0]));
        assert!(bad(|c| c.tau_min = 0.5));
        assert!(bad(|c| c.tau_count = 1));
        assert!(bad(|c| c.tol = 0.0));
        assert!(bad(|c| c.lab.chart_taus = vec![-1.0]));
    }
}
