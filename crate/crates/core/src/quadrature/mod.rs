//! Oscillatory integrals `I(τ, φ) = ∫ e^{iτ f(x)} φ(x) dx` by
//! wavelength-limited adaptive Gauss–Legendre quadrature.

pub mod chart;
pub mod cutoff;
pub mod gauss;
pub mod oracle;
pub mod radial;
pub mod symmetric;

use std::cell::{Cell, RefCell};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{PolyF64, Polynomial, UniPoly};

pub use chart::{chart_parity_integral, ChartWeight, JacobianMode};
pub use cutoff::{CutoffFunction, Shape, TestFunction};
pub use gauss::{adaptive, adaptive_smooth, QuadOptions, QuadResult};
pub use oracle::{erdelyi_leading, separable_leading};
pub use radial::{radial_profile, radial_reduce};
pub use symmetric::{build_symmetric_cutoff, SymmetricCutoff};

/// One evaluation of `I(τ, φ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorySample {
    pub tau: f64,
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
}

impl OscillatorySample {
    pub fn new(tau: f64, value: Complex64, error_estimate: f64, tol: f64) -> Self {
        OscillatorySample { tau, value, error_estimate, converged: error_estimate <= tol }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Absolute error target.
    pub tol: f64,
    pub max_panels: usize,
    /// Skip the separable shortcut and always integrate axis by axis.
    pub force_nested: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { tol: 1e-10, max_panels: 1_000_000, force_nested: false }
    }
}

impl EvalOptions {
    pub fn with_tol(tol: f64) -> Self {
        EvalOptions { tol, ..EvalOptions::default() }
    }

    fn quad(&self, tol: f64) -> QuadOptions {
        QuadOptions { tol, max_panels: self.max_panels, ..QuadOptions::default() }
    }
}

/// `∫_lo^hi e^{iτ p(x)} g(x) dx` for a real polynomial phase `p`.
///
/// Stationary points of `p` inside the interval are added as breakpoints.
pub fn oscillatory_1d<G>(
    phase: &UniPoly,
    tau: f64,
    amplitude: G,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult>
where
    G: Fn(f64) -> f64,
{
    let mut cuts = breakpoints.to_vec();
    if tau != 0.0 && phase.degree() >= 2 {
        cuts.extend(phase.derivative().roots_in(lo, hi, 64));
    }
    // Rounding in `τ p(x)` perturbs the phase by about ε τ |p(x)|.
    let reach = lo.abs().max(hi.abs());
    let phase_max: f64 = phase.coeffs().iter().enumerate().map(|(k, c)| c.abs() * reach.powi(k as i32)).sum();
    let opts = QuadOptions { noise: opts.noise.max(4.0 * f64::EPSILON * (1.0 + tau.abs() * phase_max)), ..opts.clone() };
    adaptive(
        |x| {
            let g = amplitude(x);
            if g == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(g, tau * phase.eval(x))
            }
        },
        |a, b| tau.abs() * phase.derivative_bound(a, b),
        lo,
        hi,
        &cuts,
        &opts,
    )
}

fn check_inputs(f: &Polynomial, dim: usize, tau: f64, tol: f64) -> Result<()> {
    if f.dim() != dim {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: dim });
    }
    if dim == 0 || dim > 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be finite and nonnegative, got {tau}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    Ok(())
}

/// `I(τ, φ)` to absolute tolerance `tol`.
pub fn eval_oscillatory(f: &Polynomial, phi: &TestFunction, tau: f64, tol: f64) -> Result<OscillatorySample> {
    eval_oscillatory_with(f, phi, tau, &EvalOptions::with_tol(tol))
}

pub fn eval_oscillatory_with(
    f: &Polynomial,
    phi: &TestFunction,
    tau: f64,
    opts: &EvalOptions,
) -> Result<OscillatorySample> {
    check_inputs(f, phi.dim(), tau, opts.tol)?;
    if phi.shape == Shape::Product && !opts.force_nested {
        if let Some((c0, parts)) = f.separable_parts() {
            return eval_separable(crate::polynomial::rat_to_f64(&c0), &parts, phi, tau, opts);
        }
    }
    let eta = phi.cutoff;
    let r = eta.support();
    let breaks = [-eta.support(), -eta.plateau(), 0.0, eta.plateau(), eta.support()];
    match phi.shape {
        Shape::Product => eval_amplitude(f, &|x: &[f64]| phi.eval(x), r, &breaks, tau, opts),
        Shape::Radial => {
            let g = PolyF64::new(f);
            let limits = |prefix: &[f64]| {
                let s: f64 = prefix.iter().map(|v| v * v).sum();
                let half = (r * r - s).max(0.0).sqrt();
                let a2 = eta.plateau() * eta.plateau() - s;
                let mut cuts = vec![0.0];
                if a2 > 0.0 {
                    cuts.push(a2.sqrt());
                    cuts.push(-a2.sqrt());
                }
                (half, cuts)
            };
            nested(&g, &|x: &[f64]| phi.eval(x), &limits, tau, opts)
        }
    }
}

/// `∫ e^{iτ f} g` for an arbitrary amplitude supported in the box `[-r, r]ⁿ`.
pub fn eval_amplitude(
    f: &Polynomial,
    amplitude: &dyn Fn(&[f64]) -> f64,
    r: f64,
    breakpoints: &[f64],
    tau: f64,
    opts: &EvalOptions,
) -> Result<OscillatorySample> {
    check_inputs(f, f.dim(), tau, opts.tol)?;
    let g = PolyF64::new(f);
    let cuts = breakpoints.to_vec();
    let limits = |_: &[f64]| (r, cuts.clone());
    nested(&g, amplitude, &limits, tau, opts)
}

type Limits<'a> = dyn Fn(&[f64]) -> (f64, Vec<f64>) + 'a;

struct Nested<'a> {
    f: &'a PolyF64,
    amplitude: &'a dyn Fn(&[f64]) -> f64,
    limits: &'a Limits<'a>,
    tau: f64,
    opts: &'a EvalOptions,
    failure: RefCell<Option<Error>>,
    inner_error: Cell<f64>,
    inner_converged: Cell<bool>,
}

impl Nested<'_> {
    /// Integral over the axes `prefix.len()..n` with the earlier coordinates fixed.
    fn level(&self, prefix: &mut Vec<f64>, tol: f64) -> Result<QuadResult> {
        let n = self.f.dim();
        let k = prefix.len();
        let (half, cuts) = (self.limits)(prefix);
        if half <= 0.0 {
            return Ok(QuadResult::zero());
        }
        let opts = self.opts.quad(tol);
        if k + 1 == n {
            let mut base = prefix.clone();
            base.push(0.0);
            let phase = self.f.along_axis(k, &base);
            let point = RefCell::new(base);
            return oscillatory_1d(
                &phase,
                self.tau,
                |t| {
                    let mut x = point.borrow_mut();
                    x[k] = t;
                    (self.amplitude)(&x)
                },
                -half,
                half,
                &cuts,
                &opts,
            );
        }
        let inner_tol = tol / (4.0 * half);
        let prefix_cell = RefCell::new(std::mem::take(prefix));
        let result = adaptive(
            |t| {
                if self.failure.borrow().is_some() {
                    return Complex64::new(0.0, 0.0);
                }
                let mut p = prefix_cell.borrow_mut();
                p.push(t);
                let r = self.level(&mut p, inner_tol);
                p.pop();
                match r {
                    Ok(q) => {
                        self.inner_error.set(self.inner_error.get().max(q.error * 2.0 * half));
                        if !q.converged {
                            self.inner_converged.set(false);
                        }
                        q.value
                    }
                    Err(e) => {
                        self.failure.borrow_mut().get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            |a, b| {
                let p = prefix_cell.borrow();
                let box_max: Vec<f64> = (0..n)
                    .map(|j| match j.cmp(&k) {
                        std::cmp::Ordering::Less => p[j].abs(),
                        std::cmp::Ordering::Equal => a.abs().max(b.abs()),
                        std::cmp::Ordering::Greater => half,
                    })
                    .collect();
                self.tau * self.f.partial_bound(k, &box_max)
            },
            -half,
            half,
            &cuts,
            &opts,
        );
        *prefix = prefix_cell.into_inner();
        result
    }
}

fn nested(
    f: &PolyF64,
    amplitude: &dyn Fn(&[f64]) -> f64,
    limits: &Limits<'_>,
    tau: f64,
    opts: &EvalOptions,
) -> Result<OscillatorySample> {
    let ctx = Nested {
        f,
        amplitude,
        limits,
        tau,
        opts,
        failure: RefCell::new(None),
        inner_error: Cell::new(0.0),
        inner_converged: Cell::new(true),
    };
    let outer_tol = if f.dim() == 1 { opts.tol } else { opts.tol / 2.0 };
    let r = ctx.level(&mut Vec::new(), outer_tol)?;
    if let Some(e) = ctx.failure.into_inner() {
        return Err(e);
    }
    let error = r.error + ctx.inner_error.get();
    let mut sample = OscillatorySample::new(tau, r.value, error, opts.tol);
    sample.converged &= r.converged && ctx.inner_converged.get();
    Ok(sample)
}

fn eval_separable(
    c0: f64,
    parts: &[UniPoly],
    phi: &TestFunction,
    tau: f64,
    opts: &EvalOptions,
) -> Result<OscillatorySample> {
    let eta = phi.cutoff;
    let b = eta.support();
    let n = parts.len();
    // |∫ x^ν η| ≤ 2 b^{ν+1}/(ν+1) bounds each factor.
    let bounds: Vec<f64> = (0..n)
        .map(|i| {
            let k = phi.nu.get(i) as i32;
            2.0 * b.powi(k + 1) / (k as f64 + 1.0)
        })
        .collect();
    let breaks = [-eta.plateau(), 0.0, eta.plateau()];
    let mut value = Complex64::from_polar(1.0, tau * c0);
    let mut error = 0.0;
    let mut converged = true;
    for (i, p) in parts.iter().enumerate() {
        let others: f64 = bounds.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, m)| m).product();
        let tol = opts.tol / (n as f64 * others.max(1.0));
        let k = phi.nu.get(i) as i32;
        let q = oscillatory_1d(p, tau, |x| eta.eval(x) * x.powi(k), -b, b, &breaks, &opts.quad(tol))?;
        error += q.error * others;
        converged &= q.converged;
        value *= q.value;
    }
    let mut sample = OscillatorySample::new(tau, value, error, opts.tol);
    sample.converged &= converged;
    Ok(sample)
}
