//! Leading-exponent estimation for sampled `I(τ) ≈ C τ^α (log τ)^k`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::OscillatorySample;

mod bounds;
pub use bounds::{check_theorem2, cutoff_independence_check, BoundCheck, BoundVerdict, CutoffIndependence};

/// One term `C τ^α (log τ)^k` of the expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTerm {
    pub alpha: f64,
    pub k: u32,
    pub coeff: Complex64,
    /// Uncertainty of `coeff`, propagated by [`deflate`].
    #[serde(default)]
    pub coeff_err: f64,
}

impl AsymptoticTerm {
    pub fn new(alpha: f64, k: u32, coeff: Complex64) -> Self {
        AsymptoticTerm { alpha, k, coeff, coeff_err: 0.0 }
    }

    pub fn scale_at(&self, tau: f64) -> f64 {
        tau.powf(self.alpha) * tau.ln().powi(self.k as i32)
    }

    pub fn eval(&self, tau: f64) -> Complex64 {
        self.coeff * self.scale_at(tau)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitOutcome {
    Exponent,
    /// Every sample is within its error estimate of zero.
    ConsistentWithZero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub outcome: FitOutcome,
    pub alpha_hat: Option<f64>,
    pub k_hat: u32,
    pub coeff_hat: Complex64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// Largest quadrature error estimate among the samples.
    pub noise_floor: f64,
    pub converged: bool,
    pub window: (f64, f64),
    /// Exponents fitted on the lower and upper halves of the window.
    pub half_windows: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOptions {
    /// Largest log power tried.
    pub max_k: u32,
    /// A converged fit has a log-space RMS residual below this.
    pub residual_threshold: f64,
    /// Largest allowed gap between the half-window exponents.
    pub stability: f64,
    /// A sample counts as signal when `|I| > snr · error_estimate`.
    pub snr: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_k: 1, residual_threshold: 1e-2, stability: 2e-2, snr: 3.0 }
    }
}

impl FitOptions {
    pub fn for_dimension(n: usize) -> Self {
        FitOptions { max_k: n.saturating_sub(1) as u32, ..FitOptions::default() }
    }
}

/// Geometric grid of `count` points from `tau_min` to `tau_max`.
pub fn tau_grid(tau_min: f64, tau_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(tau_min > 0.0 && tau_max > tau_min && tau_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < tau_min < tau_max, got [{tau_min}, {tau_max}]")));
    }
    if count < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: count });
    }
    let (l0, l1) = (tau_min.ln(), tau_max.ln());
    Ok((0..count)
        .map(|j| {
            if j == 0 {
                tau_min
            } else if j + 1 == count {
                tau_max
            } else {
                (l0 + (l1 - l0) * j as f64 / (count - 1) as f64).exp()
            }
        })
        .collect())
}

/// Local slopes `Δ log|I| / Δ log τ` by centered differences (one-sided at
/// the ends). `None` where a needed sample is zero.
pub fn local_slopes(samples: &[OscillatorySample]) -> Vec<Option<f64>> {
    let m = samples.len();
    (0..m)
        .map(|j| {
            if m < 2 {
                return None;
            }
            let (a, b) = if j == 0 {
                (0, 1)
            } else if j + 1 == m {
                (m - 2, m - 1)
            } else {
                (j - 1, j + 1)
            };
            let (ia, ib) = (samples[a].value.norm(), samples[b].value.norm());
            if ia == 0.0 || ib == 0.0 || samples[j].value.norm() == 0.0 {
                return None;
            }
            Some((ib.ln() - ia.ln()) / (samples[b].tau.ln() - samples[a].tau.ln()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub samples: Vec<OscillatorySample>,
    pub slopes: Vec<Option<f64>>,
}

/// Samples `eval` on a geometric grid (in parallel, collected in grid
/// order) and attaches local slopes.
pub fn schedule_and_slope<F>(tau_min: f64, tau_max: f64, count: usize, eval: F) -> Result<Schedule>
where
    F: Fn(f64) -> Result<OscillatorySample> + Sync,
{
    if count < 8 {
        return Err(Error::InsufficientSamples { needed: 8, got: count });
    }
    let grid = tau_grid(tau_min, tau_max, count)?;
    let samples = sample_series(&grid, eval)?;
    let slopes = local_slopes(&samples);
    Ok(Schedule { samples, slopes })
}

pub fn sample_series<F>(taus: &[f64], eval: F) -> Result<Vec<OscillatorySample>>
where
    F: Fn(f64) -> Result<OscillatorySample> + Sync,
{
    taus.par_iter().map(|&t| eval(t)).collect()
}

struct LineFit {
    slope: f64,
    rms: f64,
}

fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    LineFit { slope, rms: (ss / n).sqrt() }
}

/// Least-squares slope of `log|I|` against `log τ` with `k · log log τ` removed.
fn fit_with_k(samples: &[&OscillatorySample], k: u32) -> LineFit {
    let x: Vec<f64> = samples.iter().map(|s| s.tau.ln()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.value.norm().ln() - k as f64 * s.tau.ln().ln()).collect();
    line_fit(&x, &y)
}

/// Fits `log|I| = log|C| + α log τ + k log log τ`.
///
/// Each `k ∈ 0..=max_k` is fitted with `k` held fixed; the smallest `k`
/// whose residual is within `2 ·` (log-space noise) of the best is chosen.
/// The fit is converged when the residual is below the threshold and the
/// exponents of the two half windows agree. `Ĉ` is the mean of
/// `I τ^{−α̂} (log τ)^{−k̂}` over the upper half.
pub fn fit_leading(samples: &[OscillatorySample], opts: &FitOptions) -> Result<ExponentEstimate> {
    if samples.len() < 8 {
        return Err(Error::InsufficientSamples { needed: 8, got: samples.len() });
    }
    if samples.iter().any(|s| !(s.tau > 1.0)) {
        return Err(Error::InvalidArgument("fit_leading needs tau > 1 so that log log tau is defined".into()));
    }
    let window = (samples[0].tau, samples[samples.len() - 1].tau);
    let noise_floor = samples.iter().map(|s| s.error_estimate).fold(0.0, f64::max);
    let signal: Vec<&OscillatorySample> =
        samples.iter().filter(|s| s.value.norm() > opts.snr * s.error_estimate && s.value.norm() > 0.0).collect();
    if signal.is_empty() {
        return Ok(ExponentEstimate {
            outcome: FitOutcome::ConsistentWithZero,
            alpha_hat: None,
            k_hat: 0,
            coeff_hat: Complex64::new(0.0, 0.0),
            residual: 0.0,
            noise_floor,
            converged: true,
            window,
            half_windows: None,
        });
    }
    if signal.len() < 8 {
        return Err(Error::InsufficientSamples { needed: 8, got: signal.len() });
    }
    let log_noise = signal.iter().map(|s| s.error_estimate / s.value.norm()).fold(0.0, f64::max);
    let fits: Vec<LineFit> = (0..=opts.max_k).map(|k| fit_with_k(&signal, k)).collect();
    let best = fits.iter().map(|f| f.rms).fold(f64::INFINITY, f64::min);
    let k_hat = fits.iter().position(|f| f.rms <= best + 2.0 * log_noise).unwrap_or(0) as u32;
    let chosen = &fits[k_hat as usize];
    let alpha = chosen.slope;

    let half = signal.len() / 2;
    let lower = fit_with_k(&signal[..half.max(2)], k_hat).slope;
    let upper = fit_with_k(&signal[signal.len() - half.max(2)..], k_hat).slope;
    let term = AsymptoticTerm::new(alpha, k_hat, Complex64::new(1.0, 0.0));
    let top = &signal[half..];
    let coeff_hat = top.iter().map(|s| s.value / term.scale_at(s.tau)).sum::<Complex64>() / top.len() as f64;
    let converged = chosen.rms <= opts.residual_threshold && (lower - upper).abs() <= opts.stability;
    Ok(ExponentEstimate {
        outcome: FitOutcome::Exponent,
        alpha_hat: Some(alpha),
        k_hat,
        coeff_hat,
        residual: chosen.rms,
        noise_floor,
        converged,
        window,
        half_windows: Some((lower, upper)),
    })
}

/// Subtracts `term` from every sample and widens the error estimates by the
/// coefficient uncertainty.
pub fn deflate(samples: &[OscillatorySample], term: &AsymptoticTerm) -> Vec<OscillatorySample> {
    samples
        .iter()
        .map(|s| {
            let scale = term.scale_at(s.tau);
            let mut out = *s;
            out.value = s.value - term.coeff * scale;
            out.error_estimate = s.error_estimate + term.coeff_err * scale.abs();
            out
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientProbe {
    pub alpha: f64,
    pub k: u32,
    pub coeff: Complex64,
    /// Mean normalized quadrature error over the probe window.
    pub noise: f64,
    /// Spread (max − min modulus of differences) of the normalized values.
    pub trend: f64,
    pub consistent_with_zero: bool,
    pub samples_used: usize,
}

/// `Ĉ_{α,k}` as the mean of `I τ^{−α} (log τ)^{−k}` over the top decade of τ.
///
/// The verdict is "consistent with zero" iff `|Ĉ| ≤ 3 (noise + trend)`.
pub fn coefficient_at(samples: &[OscillatorySample], alpha: f64, k: u32) -> Result<CoefficientProbe> {
    let tau_max = samples.iter().map(|s| s.tau).fold(0.0, f64::max);
    let top: Vec<&OscillatorySample> = samples.iter().filter(|s| s.tau >= tau_max / 10.0 && s.tau > 1.0).collect();
    if top.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: top.len() });
    }
    let term = AsymptoticTerm::new(alpha, k, Complex64::new(1.0, 0.0));
    let z: Vec<Complex64> = top.iter().map(|s| s.value / term.scale_at(s.tau)).collect();
    let coeff = z.iter().sum::<Complex64>() / z.len() as f64;
    let noise = top.iter().map(|s| s.error_estimate / term.scale_at(s.tau).abs()).sum::<f64>() / top.len() as f64;
    let mut trend = 0.0f64;
    for a in &z {
        for b in &z {
            trend = trend.max((a - b).norm());
        }
    }
    Ok(CoefficientProbe {
        alpha,
        k,
        coeff,
        noise,
        trend,
        consistent_with_zero: coeff.norm() <= 3.0 * (noise + trend),
        samples_used: top.len(),
    })
}

/// Least-squares slope of `log|values|` against `log τ`.
pub fn loglog_slope(taus: &[f64], magnitudes: &[f64]) -> Option<f64> {
    if taus.len() < 2 || magnitudes.iter().any(|m| !(*m > 0.0)) {
        return None;
    }
    let x: Vec<f64> = taus.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = magnitudes.iter().map(|m| m.ln()).collect();
    Some(line_fit(&x, &y).slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(taus: &[f64], terms: &[AsymptoticTerm]) -> Vec<OscillatorySample> {
        taus.iter()
            .map(|&t| OscillatorySample {
                tau: t,
                value: terms.iter().map(|a| a.eval(t)).sum(),
                error_estimate: 0.0,
                converged: true,
            })
            .collect()
    }

    #[test]
    fn grid_endpoints_and_ratio() {
        let g = tau_grid(1e2, 1e4, 24).unwrap();
        assert_eq!(g.len(), 24);
        assert_eq!(g[0], 1e2);
        assert_eq!(g[23], 1e4);
        let r = g[1] / g[0];
        assert!(g.windows(2).all(|w| (w[1] / w[0] - r).abs() < 1e-12));
        assert!(tau_grid(0.0, 1.0, 8).is_err());
    }

    #[test]
    fn slopes_of_a_pure_power() {
        let g = tau_grid(1e2, 1e4, 16).unwrap();
        let s = synthetic(&g, &[AsymptoticTerm::new(-0.5, 0, Complex64::new(1.0, 0.0))]);
        for slope in local_slopes(&s) {
            assert!((slope.unwrap() + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn slopes_with_a_log() {
        let g = tau_grid(1e2, 1e4, 16).unwrap();
        let s = synthetic(&g, &[AsymptoticTerm::new(-1.0, 1, Complex64::new(1.0, 0.0))]);
        let slopes: Vec<f64> = local_slopes(&s).into_iter().map(Option::unwrap).collect();
        assert!(slopes.windows(2).all(|w| w[1] < w[0]));
        for (sl, t) in slopes[1..15].iter().zip(&g[1..15]) {
            assert!((sl - (-1.0 + 1.0 / t.ln())).abs() < 5e-3);
        }
    }

    #[test]
    fn zero_sample_has_no_slope() {
        let g = tau_grid(1e2, 1e4, 8).unwrap();
        let mut s = synthetic(&g, &[AsymptoticTerm::new(-0.5, 0, Complex64::new(1.0, 0.0))]);
        s[3].value = Complex64::new(0.0, 0.0);
        let slopes = local_slopes(&s);
        assert!(slopes[2].is_none() && slopes[3].is_none() && slopes[4].is_none());
        assert!(slopes[0].is_some());
    }

    #[test]
    fn recovers_a_power_law() {
        let g = tau_grid(1e2, 1e4, 16).unwrap();
        let c = Complex64::new(1.0, 1.0);
        let s = synthetic(&g, &[AsymptoticTerm::new(-0.5, 0, c)]);
        let e = fit_leading(&s, &FitOptions::default()).unwrap();
        assert!((e.alpha_hat.unwrap() + 0.5).abs() < 1e-3);
        assert_eq!(e.k_hat, 0);
        assert!((e.coeff_hat - c).norm() < 1e-9);
        assert!(e.converged);
    }

    #[test]
    fn recovers_a_log_power() {
        let g = tau_grid(1e2, 1e4, 16).unwrap();
        let s = synthetic(&g, &[AsymptoticTerm::new(-1.0, 1, Complex64::new(2.0, 0.0))]);
        let e = fit_leading(&s, &FitOptions::default()).unwrap();
        assert!((e.alpha_hat.unwrap() + 1.0).abs() < 5e-2);
        assert_eq!(e.k_hat, 1);
    }

    #[test]
    fn all_noise_is_consistent_with_zero() {
        let g = tau_grid(1e2, 1e4, 10).unwrap();
        let s: Vec<OscillatorySample> = g
            .iter()
            .map(|&t| OscillatorySample { tau: t, value: Complex64::new(1e-14, 0.0), error_estimate: 1e-12, converged: true })
            .collect();
        let e = fit_leading(&s, &FitOptions::default()).unwrap();
        assert_eq!(e.outcome, FitOutcome::ConsistentWithZero);
        assert!(e.alpha_hat.is_none());
    }

    #[test]
    fn deflation_exposes_the_second_term() {
        let g = tau_grid(1e2, 1e4, 24).unwrap();
        let lead = AsymptoticTerm::new(-0.5, 0, Complex64::new(1.0, 0.0));
        let s = synthetic(&g, &[lead, AsymptoticTerm::new(-1.0, 0, Complex64::new(0.0, 3.0))]);
        let d = deflate(&s, &lead);
        let e = fit_leading(&d, &FitOptions::default()).unwrap();
        assert!((e.alpha_hat.unwrap() + 1.0).abs() < 1e-2);
        let zero = AsymptoticTerm::new(-0.5, 0, Complex64::new(0.0, 0.0));
        assert_eq!(deflate(&s, &zero), s);
    }

    #[test]
    fn coefficient_probe() {
        let g = tau_grid(1e2, 1e4, 24).unwrap();
        let c = Complex64::new(0.3, -1.2);
        let s = synthetic(&g, &[AsymptoticTerm::new(-0.75, 0, c)]);
        let p = coefficient_at(&s, -0.75, 0).unwrap();
        assert!((p.coeff - c).norm() / c.norm() < 1e-3);
        assert!(!p.consistent_with_zero);
        let q = coefficient_at(&s, -0.5, 0).unwrap();
        assert!(q.consistent_with_zero, "{q:?}");
        let zero = synthetic(&g, &[]);
        assert!(coefficient_at(&zero, -0.5, 0).unwrap().consistent_with_zero);
        assert!(coefficient_at(&zero[..2], -0.5, 0).is_err());
    }
}
