//! Integrals over one chart of the point blowup,
//! `∫_{|v|<1+ε} ∫_ℝ e^{iτ y^d h(v)} J(y) η(y) θ(v) dy dv`,
//! with `J(y) = y^{n−1}` (signed, orientation form) or `|y|^{n−1}`
//! (absolute, Lebesgue measure).

use std::cell::{Cell, RefCell};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gauss::{adaptive_smooth, QuadOptions};
use super::{oscillatory_1d, CutoffFunction, OscillatorySample};
use crate::error::{Error, Result};
use crate::polynomial::{PolyF64, Polynomial, UniPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianMode {
    Signed,
    Absolute,
}

/// A weight `θ(v)` on the chart domain `|v_j| < radius`.
pub struct ChartWeight<'a> {
    eval: Box<dyn Fn(&[f64]) -> f64 + 'a>,
    radius: f64,
    breakpoints: Vec<f64>,
}

impl<'a> ChartWeight<'a> {
    pub fn new<F: Fn(&[f64]) -> f64 + 'a>(eval: F, radius: f64, breakpoints: Vec<f64>) -> Self {
        ChartWeight { eval: Box::new(eval), radius, breakpoints }
    }

    /// `θ ≡ 1` on `|v_j| < radius`.
    pub fn unit(radius: f64) -> ChartWeight<'static> {
        ChartWeight::new(|_| 1.0, radius, vec![0.0])
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        (self.eval)(v)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Chart integral for `h` in `n − 1 ∈ {1, 2}` variables.
#[allow(clippy::too_many_arguments)]
pub fn chart_parity_integral(
    d: u32,
    n: usize,
    h: &Polynomial,
    theta: &ChartWeight<'_>,
    mode: JacobianMode,
    eta: &CutoffFunction,
    tau: f64,
    tol: f64,
) -> Result<OscillatorySample> {
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if h.dim() != n - 1 {
        return Err(Error::DimensionMismatch { expected: n - 1, got: h.dim() });
    }
    if d == 0 || !(tau >= 0.0 && tau.is_finite()) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("need d ≥ 1, tau ≥ 0, tol > 0 (d={d}, tau={tau}, tol={tol})")));
    }
    let ctx = Chart {
        d,
        power: n as i32 - 1,
        h: PolyF64::new(h),
        theta,
        mode,
        eta: *eta,
        tau,
        failure: RefCell::new(None),
        inner_error: Cell::new(0.0),
    };
    let rad = theta.radius();
    let area = (2.0 * rad).powi(n as i32 - 1);
    let inner_tol = tol / (4.0 * area);
    let outer = QuadOptions::with_tol(tol / 2.0);
    let r = if n == 2 {
        let h1 = ctx.h.along_axis(0, &[0.0]);
        let mut cuts = theta.breakpoints.clone();
        cuts.extend(h1.roots_in(-rad, rad, 256));
        adaptive_smooth(|v| ctx.outer_point(&[v], inner_tol), -rad, rad, &cuts, &outer)?
    } else {
        let cuts = theta.breakpoints.clone();
        let mid_tol = tol / (4.0 * 2.0 * rad);
        let inner_err = Cell::new(0.0f64);
        adaptive_smooth(
            |v1| {
                let hv = ctx.h.along_axis(1, &[v1, 0.0]);
                let mut cuts2 = cuts.clone();
                cuts2.extend(hv.roots_in(-rad, rad, 256));
                match adaptive_smooth(|v2| ctx.outer_point(&[v1, v2], inner_tol), -rad, rad, &cuts2, &QuadOptions::with_tol(mid_tol)) {
                    Ok(q) => {
                        inner_err.set(inner_err.get().max(q.error * 2.0 * rad));
                        q.value
                    }
                    Err(e) => {
                        ctx.failure.borrow_mut().get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            },
            -rad,
            rad,
            &cuts,
            &outer,
        )
        .map(|mut q| {
            q.error += inner_err.get();
            q
        })?
    };
    if let Some(e) = ctx.failure.into_inner() {
        return Err(e);
    }
    let error = r.error + ctx.inner_error.get() * area;
    Ok(OscillatorySample::new(tau, r.value, error, tol))
}

struct Chart<'a> {
    d: u32,
    power: i32,
    h: PolyF64,
    theta: &'a ChartWeight<'a>,
    mode: JacobianMode,
    eta: CutoffFunction,
    tau: f64,
    failure: RefCell<Option<Error>>,
    inner_error: Cell<f64>,
}

impl Chart<'_> {
    /// `θ(v) ∫ e^{iτ y^d h(v)} J(y) η(y) dy`, split at `y = 0`.
    fn outer_point(&self, v: &[f64], tol: f64) -> Complex64 {
        let w = self.theta.eval(v);
        if w == 0.0 || self.failure.borrow().is_some() {
            return Complex64::new(0.0, 0.0);
        }
        let phase = UniPoly::monomial(self.h.eval(v), self.d as usize);
        let b = self.eta.support();
        let a = self.eta.plateau();
        let (p, signed) = (self.power, self.mode == JacobianMode::Signed);
        let jac = |y: f64| {
            let m = y.abs().powi(p);
            if signed && y < 0.0 && p % 2 == 1 {
                -m
            } else {
                m
            }
        };
        // |y|^{n−1} is even, so the absolute mode folds onto the half-line:
        // the mirror half is the same integral for d even, its conjugate for d odd.
        let result = if signed {
            oscillatory_1d(&phase, self.tau, |y| jac(y) * self.eta.eval(y), -b, b, &[-a, 0.0, a], &QuadOptions::with_tol(tol / w))
        } else {
            oscillatory_1d(&phase, self.tau, |y| jac(y) * self.eta.eval(y), 0.0, b, &[a], &QuadOptions::with_tol(tol / (2.0 * w))).map(|mut q| {
                q.value = if self.d % 2 == 0 { q.value * 2.0 } else { Complex64::new(2.0 * q.value.re, 0.0) };
                q.error *= 2.0;
                q
            })
        };
        match result {
            Ok(q) => {
                self.inner_error.set(self.inner_error.get().max(q.error * w));
                q.value * w
            }
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse;
    use crate::quadrature::radial_profile;

    #[test]
    fn signed_even_case_vanishes() {
        let h = parse("1 + x1^4", 1).unwrap();
        let eta = CutoffFunction::default();
        for tau in [1.0, 10.0, 100.0] {
            let s = chart_parity_integral(4, 2, &h, &ChartWeight::unit(1.25), JacobianMode::Signed, &eta, tau, 1e-10).unwrap();
            let a = chart_parity_integral(4, 2, &h, &ChartWeight::unit(1.25), JacobianMode::Absolute, &eta, tau, 1e-10).unwrap();
            assert!(s.value.norm() < 1e-10 * a.value.norm(), "tau={tau}: {:?}", s.value);
        }
    }

    #[test]
    fn absolute_unit_h_is_twice_the_profile() {
        let h = Polynomial::constant(1, crate::polynomial::rat_int(1));
        let eta = CutoffFunction::default();
        let tau = 50.0;
        let s = chart_parity_integral(4, 2, &h, &ChartWeight::unit(1.0), JacobianMode::Absolute, &eta, tau, 1e-10).unwrap();
        let r = radial_profile(tau, 1.0, 4, 1, &eta, 1e-12).unwrap();
        // Domain length 2, two half-lines in y.
        assert!((s.value - r.value * 4.0).norm() < 1e-9, "{:?} vs {:?}", s.value, r.value * 4.0);
    }

    #[test]
    fn signed_odd_degree_has_zero_real_part() {
        let h = parse("1 + x1^3", 1).unwrap();
        let eta = CutoffFunction::default();
        for tau in [1.0, 10.0, 100.0] {
            let s = chart_parity_integral(3, 2, &h, &ChartWeight::unit(1.25), JacobianMode::Signed, &eta, tau, 1e-10).unwrap();
            assert!(s.value.re.abs() < 1e-10, "tau={tau}: {:?}", s.value);
            assert!(s.value.im.abs() > 1e-6);
        }
    }

    #[test]
    fn three_dimensional_chart() {
        let h = parse("1 + x1^2 + x2^2", 2).unwrap();
        let eta = CutoffFunction::new(0.5, 1.0).unwrap();
        let s = chart_parity_integral(2, 3, &h, &ChartWeight::unit(0.5), JacobianMode::Signed, &eta, 5.0, 1e-9).unwrap();
        // d even, n odd: y² is even, nothing cancels.
        assert!(s.value.norm() > 1e-3);
        assert!(s.converged);
    }
}
