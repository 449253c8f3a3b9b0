//! Measured exponents against the Newton-polytope bound, and the
//! cutoff-independence probe.

use serde::{Deserialize, Serialize};

use super::{fit_leading, loglog_slope, sample_series, ExponentEstimate, FitOptions, FitOutcome};
use crate::error::{Error, Result};
use crate::polynomial::{rat_to_f64, rational_string, ExponentVector, Polynomial, Rational};
use crate::polytope::{check_r_nondegenerate, NewtonPolytope, NondegeneracyStatus, SearchOptions};
use crate::quadrature::{eval_oscillatory, CutoffFunction, OscillatorySample, Shape, TestFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVerdict {
    Pass,
    Fail,
    /// The fit did not converge or had too few samples above the noise floor.
    Indeterminate,
    /// The integral is consistent with zero at every sample.
    VacuousPass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    #[serde(with = "rational_string")]
    pub distance: Rational,
    #[serde(with = "rational_string")]
    pub r: Rational,
    #[serde(with = "rational_string")]
    pub r_prime: Rational,
    /// `−1/d(f,φ)`.
    pub bound_exponent: f64,
    /// `−(r′+n)/r`.
    pub radii_exponent: f64,
    /// `d(f,φ) ≤ r/(r′+n)`, exact.
    pub radii_inequality_holds: bool,
    pub alpha_hat: Option<f64>,
    /// `bound_exponent − α̂`; nonnegative when the bound holds.
    pub slack: Option<f64>,
    pub tolerance: f64,
    pub verdict: BoundVerdict,
    pub estimate: Option<ExponentEstimate>,
    pub note: Option<String>,
}

/// Compares the fitted exponent of `samples` (of `I(τ, x^ν η)`) with
/// `−1/d(f, x^ν)`.
pub fn check_theorem2(
    f: &Polynomial,
    phi: &TestFunction,
    samples: &[OscillatorySample],
    opts: &FitOptions,
    tolerance: f64,
) -> Result<BoundCheck> {
    if phi.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: phi.dim() });
    }
    let poly = NewtonPolytope::of_polynomial(f)?;
    let radii = poly.pair_distance_and_radii(&NewtonPolytope::of_monomial(&phi.nu)?)?;
    let n = Rational::from_integer((f.dim() as i64).into());
    let bound_exponent = -1.0 / rat_to_f64(&radii.distance);
    let radii_exponent = -rat_to_f64(&((&radii.r_prime + &n) / &radii.r));

    let (estimate, note) = match fit_leading(samples, opts) {
        Ok(e) => (Some(e), None),
        Err(Error::InsufficientSamples { needed, got }) => {
            (None, Some(format!("only {got} samples above the noise floor, {needed} needed")))
        }
        Err(e) => return Err(e),
    };
    let alpha_hat = estimate.as_ref().and_then(|e| e.alpha_hat);
    let verdict = match &estimate {
        None => BoundVerdict::Indeterminate,
        Some(e) if e.outcome == FitOutcome::ConsistentWithZero => BoundVerdict::VacuousPass,
        Some(e) if !e.converged => BoundVerdict::Indeterminate,
        Some(_) => {
            if alpha_hat.unwrap() <= bound_exponent + tolerance {
                BoundVerdict::Pass
            } else {
                BoundVerdict::Fail
            }
        }
    };
    Ok(BoundCheck {
        radii_inequality_holds: radii.bound_holds(),
        distance: radii.distance,
        r: radii.r,
        r_prime: radii.r_prime,
        bound_exponent,
        radii_exponent,
        alpha_hat,
        slack: alpha_hat.map(|a| bound_exponent - a),
        tolerance,
        verdict,
        estimate,
        note,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffIndependence {
    pub cutoffs: (CutoffFunction, CutoffFunction),
    /// `I(τ, x^ν η₁) − I(τ, x^ν η₂)` with the two error estimates added.
    pub differences: Vec<OscillatorySample>,
    /// Log-log slope over the differences above the noise floor.
    pub slope: Option<f64>,
    pub samples_used: usize,
    pub threshold: f64,
    /// No difference rose above the noise floor.
    pub vacuous: bool,
    pub pass: bool,
}

/// Measures how fast `I(τ, x^ν η₁) − I(τ, x^ν η₂)` decays. A sample counts
/// when the difference exceeds three times its error estimate; with fewer
/// than three such samples the check passes vacuously.
#[allow(clippy::too_many_arguments)]
pub fn cutoff_independence_check(
    f: &Polynomial,
    nu: &ExponentVector,
    first: CutoffFunction,
    second: CutoffFunction,
    taus: &[f64],
    tol: f64,
    threshold: f64,
    search: &SearchOptions,
) -> Result<CutoffIndependence> {
    if nu.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: nu.dim() });
    }
    if !NewtonPolytope::of_polynomial(f)?.is_convenient().convenient {
        return Err(Error::Hypothesis(format!("{f} is not convenient")));
    }
    if check_r_nondegenerate(f, search)?.status != NondegeneracyStatus::LikelyNondegenerate {
        return Err(Error::Hypothesis(format!("{f} is not likely Newton nondegenerate over the reals")));
    }
    let phi1 = TestFunction::new(nu.clone(), first, Shape::Product);
    let phi2 = TestFunction::new(nu.clone(), second, Shape::Product);
    let differences = sample_series(taus, |tau| {
        let a = eval_oscillatory(f, &phi1, tau, tol)?;
        let b = eval_oscillatory(f, &phi2, tau, tol)?;
        Ok(OscillatorySample::new(tau, a.value - b.value, a.error_estimate + b.error_estimate, 2.0 * tol))
    })?;
    let signal: Vec<&OscillatorySample> =
        differences.iter().filter(|s| s.value.norm() > 0.0 && s.value.norm() > 3.0 * s.error_estimate).collect();
    let vacuous = signal.len() < 3;
    let slope = if vacuous {
        None
    } else {
        let taus: Vec<f64> = signal.iter().map(|s| s.tau).collect();
        let mags: Vec<f64> = signal.iter().map(|s| s.value.norm()).collect();
        loglog_slope(&taus, &mags)
    };
    Ok(CutoffIndependence {
        cutoffs: (first, second),
        samples_used: signal.len(),
        pass: vacuous || slope.is_some_and(|s| s <= threshold),
        differences,
        slope,
        threshold,
        vacuous,
    })
}
