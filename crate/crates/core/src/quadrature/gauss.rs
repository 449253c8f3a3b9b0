//! Gauss–Legendre panels with wavelength-limited adaptive bisection.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Main rule order and the lower order used for the error estimate.
pub const HIGH_ORDER: usize = 8;
pub const LOW_ORDER: usize = 6;

struct Rules {
    high: (Vec<f64>, Vec<f64>),
    low: (Vec<f64>, Vec<f64>),
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules { high: gauss_legendre(HIGH_ORDER), low: gauss_legendre(LOW_ORDER) })
}

/// Pairwise summation over an index-ordered binary tree.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n if n <= 8 => values.iter().fold(Complex64::new(0.0, 0.0), |a, &b| a + b),
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

pub fn pairwise_sum_f64(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        n if n <= 8 => values.iter().sum(),
        n => pairwise_sum_f64(&values[..n / 2]) + pairwise_sum_f64(&values[n / 2..]),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    /// Absolute error target for the whole interval.
    pub tol: f64,
    pub max_panels: usize,
    /// Largest phase change allowed across one panel, in radians.
    pub phase_span: f64,
    /// Relative rounding noise of the integrand values. A panel whose error
    /// estimate is below `noise` times its absolute integral is accepted.
    pub noise: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { tol: 1e-10, max_panels: 1_000_000, phase_span: PI / 2.0, noise: 0.0 }
    }
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions { tol, ..QuadOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, panels: 0, converged: true }
    }
}

/// Adaptive integration of `f` over `[lo, hi]`.
///
/// At most `opts.max_panels` panels are evaluated; beyond that the call
/// fails with [`Error::BudgetExceeded`].
///
/// `freq_bound(a, b)` bounds the phase derivative (radians per unit length)
/// on `[a, b]`; panels are split until they span at most
/// `opts.phase_span` radians and until `|Q₈ − Q₆|` is within the panel's
/// share of `opts.tol`. Panel values are summed pairwise in order of
/// position.
pub fn adaptive<F, B>(f: F, freq_bound: B, lo: f64, hi: f64, breakpoints: &[f64], opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
    B: Fn(f64, f64) -> f64,
{
    if hi <= lo {
        return Ok(QuadResult::zero());
    }
    let rules = rules();
    let total = hi - lo;
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > lo && x < hi).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut stack: Vec<(f64, f64)> = Vec::new();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);
    for w in edges.windows(2).rev() {
        stack.push((w[0], w[1]));
    }

    let mut accepted: Vec<(f64, Complex64, f64)> = Vec::new();
    let mut visited = 0usize;
    let mut converged = true;
    while let Some((a, b)) = stack.pop() {
        let w = b - a;
        let tiny = w <= 1e-13 * (1.0 + a.abs().max(b.abs()));
        let span = freq_bound(a, b) * w;
        if !tiny && span > opts.phase_span {
            let pieces = (span / opts.phase_span).ceil().clamp(2.0, 64.0) as usize;
            let step = w / pieces as f64;
            for j in (0..pieces).rev() {
                let lo_j = a + step * j as f64;
                let hi_j = if j + 1 == pieces { b } else { a + step * (j + 1) as f64 };
                stack.push((lo_j, hi_j));
            }
            continue;
        }
        visited += 1;
        if visited > opts.max_panels {
            let error: f64 = accepted.iter().map(|p| p.2).sum();
            return Err(Error::BudgetExceeded { panels: visited, error });
        }
        let c = 0.5 * (a + b);
        let h = 0.5 * w;
        let (high, mass) = rules.high.0.iter().zip(&rules.high.1).fold((Complex64::new(0.0, 0.0), 0.0), |(acc, m), (&x, &wt)| {
            let v = f(c + h * x);
            (acc + v * wt, m + v.norm() * wt)
        });
        let (high, mass) = (high * h, mass * h);
        let low = rules
            .low
            .0
            .iter()
            .zip(&rules.low.1)
            .fold(Complex64::new(0.0, 0.0), |acc, (&x, &wt)| acc + f(c + h * x) * wt)
            * h;
        let err = (high - low).norm();
        if err <= opts.tol * w / total || err <= opts.noise * mass || tiny {
            if tiny && err > opts.tol * w / total {
                converged = false;
            }
            accepted.push((a, high, err));
        } else {
            stack.push((c, b));
            stack.push((a, c));
        }
    }
    // The stack pops panels left to right, so `accepted` is already ordered.
    let values: Vec<Complex64> = accepted.iter().map(|p| p.1).collect();
    let errors: Vec<f64> = accepted.iter().map(|p| p.2).collect();
    let error = pairwise_sum_f64(&errors);
    Ok(QuadResult {
        value: pairwise_sum(&values),
        error,
        panels: accepted.len(),
        converged: converged && error <= opts.tol,
    })
}

/// Adaptive integration of a smooth, non-oscillatory integrand.
pub fn adaptive_smooth<F>(f: F, lo: f64, hi: f64, breakpoints: &[f64], opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    adaptive(f, |_, _| 0.0, lo, hi, breakpoints, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        for n in [1usize, 2, 5, 6, 8, 12] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14, "n={n}");
            for k in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} k={k}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn oscillatory_exponential() {
        // ∫_0^1 e^{iωx} dx = (e^{iω} − 1)/(iω)
        let omega = 2000.0;
        let opts = QuadOptions::with_tol(1e-12);
        let r = adaptive(|x| Complex64::new(0.0, omega * x).exp(), |_, _| omega, 0.0, 1.0, &[], &opts).unwrap();
        let exact = (Complex64::new(0.0, omega).exp() - 1.0) / Complex64::new(0.0, omega);
        assert!((r.value - exact).norm() < 1e-12, "{:?} vs {exact}", r.value);
        assert!(r.converged);
        assert!(r.panels as f64 >= omega / (PI / 2.0));
    }

    #[test]
    fn budget_is_enforced() {
        let opts = QuadOptions { tol: 1e-12, max_panels: 100, ..QuadOptions::default() };
        let r = adaptive(|x| Complex64::new(0.0, 1e6 * x).exp(), |_, _| 1e6, 0.0, 1.0, &[], &opts);
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn pairwise_matches_naive_sum() {
        let v: Vec<Complex64> = (0..1000).map(|k| Complex64::new(k as f64, -(k as f64) * 0.5)).collect();
        let s = pairwise_sum(&v);
        assert_eq!(s, Complex64::new(499500.0, -249750.0));
    }
}
