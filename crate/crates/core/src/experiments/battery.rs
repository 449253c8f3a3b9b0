use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ToolInfo};
use crate::error::{Error, Result};
use crate::fit::{check_theorem2, sample_series, BoundCheck, BoundVerdict};
use crate::polynomial::{parse, rational_string, ExponentVector, Rational};
use crate::polytope::{check_r_nondegenerate, NewtonPolytope, NondegeneracyStatus};
use crate::quadrature::{eval_oscillatory, CutoffFunction, OscillatorySample, TestFunction};
use crate::rlct::{rlct_homogeneous, rlct_newton_candidate, RlctMethod};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryFixture {
    pub name: String,
    pub phase: String,
    pub dim: usize,
    pub nu: Vec<u32>,
}

impl BatteryFixture {
    pub fn new(name: &str, phase: &str, dim: usize, nu: &[u32]) -> Self {
        BatteryFixture { name: name.into(), phase: phase.into(), dim, nu: nu.to_vec() }
    }
}

/// Convenient, nondegenerate phases with monomial weights whose integrals
/// have closed-form leading terms. The last one integrates to zero.
pub fn default_fixtures() -> Vec<BatteryFixture> {
    vec![
        BatteryFixture::new("quartic-pair", "x1^4 + x2^4", 2, &[0, 0]),
        BatteryFixture::new("quadratic-pair", "x1^2 + x2^2", 2, &[0, 0]),
        BatteryFixture::new("mixed-2-4", "x1^2 + x2^4", 2, &[0, 0]),
        BatteryFixture::new("quartic-pair-weighted", "x1^4 + x2^4", 2, &[2, 2]),
        BatteryFixture::new("quadratic-quartic-3d", "x1^2 + x2^2 + x3^4", 3, &[0, 0, 0]),
        BatteryFixture::new("sextic-pair-weighted", "x1^6 + x2^6", 2, &[0, 2]),
        BatteryFixture::new("quartic-pair-odd-weight", "x1^4 + x2^4", 2, &[1, 1]),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryRow {
    pub fixture: BatteryFixture,
    #[serde(with = "rational_string")]
    pub rlct: Rational,
    pub rlct_method: RlctMethod,
    pub likely_r_nondegenerate: bool,
    pub check: BoundCheck,
    pub samples: Vec<OscillatorySample>,
    /// Quadrature failure, when the series could not be computed.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Battery {
    pub kind: String,
    pub tool: ToolInfo,
    pub config: ExperimentConfig,
    pub rows: Vec<BatteryRow>,
    /// Every row passes, vacuous passes included.
    pub passed: bool,
    pub indeterminate: usize,
}

/// Fits every fixture over the configured τ grid and compares `α̂` with
/// `−1/d(f, x^ν)`. The bump is taken from the configuration.
pub fn run_theorem2_battery(fixtures: &[BatteryFixture], cfg: &ExperimentConfig) -> Result<Theorem2Battery> {
    let resolved = cfg.validate()?;
    let search = cfg.search_options();
    let cutoff = CutoffFunction::new(cfg.cutoff[0], cfg.cutoff[1])?;
    let mut rows = Vec::with_capacity(fixtures.len());
    for fx in fixtures {
        let f = parse(&fx.phase, fx.dim)?;
        if fx.nu.len() != fx.dim {
            return Err(Error::DimensionMismatch { expected: fx.dim, got: fx.nu.len() });
        }
        if !NewtonPolytope::of_polynomial(&f)?.is_convenient().convenient {
            return Err(Error::Hypothesis(format!("fixture {}: {} is not convenient", fx.name, fx.phase)));
        }
        let rlct = if f.homogeneous_degree()?.is_some() {
            rlct_homogeneous(&f, &search)?
        } else {
            rlct_newton_candidate(&f, &search)?
        };
        let nondeg = check_r_nondegenerate(&f, &search)?.status == NondegeneracyStatus::LikelyNondegenerate;
        let phi = TestFunction::new(ExponentVector::new(fx.nu.clone()), cutoff, cfg.shape);
        let (samples, error) = match sample_series(&resolved.taus, |tau| eval_oscillatory(&f, &phi, tau, cfg.tol)) {
            Ok(s) => (s, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let fit = crate::fit::FitOptions { max_k: fx.dim.saturating_sub(1) as u32, ..cfg.fit.clone() };
        let check = check_theorem2(&f, &phi, &samples, &fit, cfg.exponent_tol)?;
        rows.push(BatteryRow {
            fixture: fx.clone(),
            rlct: rlct.value,
            rlct_method: rlct.method,
            likely_r_nondegenerate: nondeg,
            check,
            samples,
            error,
        });
    }
    let passed = rows.iter().all(|r| matches!(r.check.verdict, BoundVerdict::Pass | BoundVerdict::VacuousPass));
    let indeterminate = rows.iter().filter(|r| r.check.verdict == BoundVerdict::Indeterminate).count();
    Ok(Theorem2Battery {
        kind: "theorem2-battery".into(),
        tool: ToolInfo::default(),
        config: cfg.clone(),
        rows,
        passed,
        indeterminate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::rat;

    #[test]
    fn small_battery() {
        let cfg = ExperimentConfig { tau_min: 1e2, tau_max: 1e3, tau_count: 8, ..ExperimentConfig::default() };
        let fixtures = vec![
            BatteryFixture::new("mixed", "x1^2 + x2^4", 2, &[0, 0]),
            BatteryFixture::new("odd", "x1^4 + x2^4", 2, &[1, 1]),
        ];
        let b = run_theorem2_battery(&fixtures, &cfg).unwrap();
        assert!(b.passed, "{:#?}", b.rows.iter().map(|r| &r.check).collect::<Vec<_>>());
        assert_eq!(b.rows[0].rlct, rat(3, 4));
        assert_eq!(b.rows[0].rlct_method, RlctMethod::NewtonCandidate);
        assert!((b.rows[0].check.alpha_hat.unwrap() + 0.75).abs() < 1e-2);
        assert_eq!(b.rows[1].check.verdict, BoundVerdict::VacuousPass);
    }

    #[test]
    fn inconvenient_fixture_is_refused() {
        let cfg = ExperimentConfig { tau_count: 8, ..ExperimentConfig::default() };
        let r = run_theorem2_battery(&[BatteryFixture::new("bad", "x1^2*x2^2", 2, &[0, 0])], &cfg);
        assert!(matches!(r, Err(Error::Hypothesis(_))));
    }
}
