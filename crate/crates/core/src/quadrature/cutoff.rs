//! Smooth even cutoffs and the monomial-times-bump test functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::ExponentVector;

#[inline]
fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

#[inline]
fn dpsi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp() / (t * t)
    } else {
        0.0
    }
}

/// `η(y)`: 1 on `[−a, a]`, 0 outside `(−b, b)`, `C^∞`, even.
///
/// The transition is `ψ(1−s) / (ψ(1−s) + ψ(s))` with `s = (|y|−a)/(b−a)`
/// and `ψ(t) = e^{−1/t}` for `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffFunction {
    a: f64,
    b: f64,
}

impl CutoffFunction {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::InvalidCutoff { a, b });
        }
        Ok(CutoffFunction { a, b })
    }

    pub fn plateau(&self) -> f64 {
        self.a
    }

    pub fn support(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        let t = y.abs();
        if t <= self.a {
            return 1.0;
        }
        if t >= self.b {
            return 0.0;
        }
        let s = (t - self.a) / (self.b - self.a);
        let p = psi(1.0 - s);
        p / (p + psi(s))
    }

    pub fn derivative(&self, y: f64) -> f64 {
        let t = y.abs();
        if t <= self.a || t >= self.b {
            return 0.0;
        }
        let s = (t - self.a) / (self.b - self.a);
        let (p, q) = (psi(1.0 - s), psi(s));
        let (dp, dq) = (-dpsi(1.0 - s), dpsi(s));
        let ds = (dp * q - p * dq) / ((p + q) * (p + q));
        ds * y.signum() / (self.b - self.a)
    }

    /// `sup |η'|`, sampled on a fine grid of the transition zone.
    pub fn max_derivative(&self) -> f64 {
        (1..2000)
            .map(|k| self.derivative(self.a + (self.b - self.a) * k as f64 / 2000.0).abs())
            .fold(0.0, f64::max)
    }

    /// Same profile with both radii multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        CutoffFunction::new(self.a * s, self.b * s)
    }
}

impl Default for CutoffFunction {
    fn default() -> Self {
        CutoffFunction { a: 1.0, b: 2.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    /// `Π η(xᵢ)`
    Product,
    /// `η(|x|)`
    Radial,
}

/// `φ(x) = x^ν · bump(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub nu: ExponentVector,
    pub cutoff: CutoffFunction,
    pub shape: Shape,
}

impl TestFunction {
    pub fn new(nu: ExponentVector, cutoff: CutoffFunction, shape: Shape) -> Self {
        TestFunction { nu, cutoff, shape }
    }

    pub fn bump(dim: usize, cutoff: CutoffFunction, shape: Shape) -> Self {
        TestFunction::new(ExponentVector::zeros(dim), cutoff, shape)
    }

    pub fn dim(&self) -> usize {
        self.nu.dim()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let bump = match self.shape {
            Shape::Product => x.iter().map(|&xi| self.cutoff.eval(xi)).product(),
            Shape::Radial => self.cutoff.eval(x.iter().map(|v| v * v).sum::<f64>().sqrt()),
        };
        if bump == 0.0 {
            return 0.0;
        }
        bump * self.nu.monomial_f64(x)
    }

    /// Half-width of the coordinate box containing the support.
    pub fn support_radius(&self) -> f64 {
        self.cutoff.support()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_support_and_parity() {
        let eta = CutoffFunction::new(1.0, 2.0).unwrap();
        assert_eq!(eta.eval(0.5), 1.0);
        assert_eq!(eta.eval(3.0), 0.0);
        let mid = eta.eval(1.5);
        assert!(mid > 0.0 && mid < 1.0);
        assert_eq!(eta.eval(-1.5), eta.eval(1.5));
        assert!((mid - 0.5).abs() < 1e-15);
    }

    #[test]
    fn flat_at_the_support_edge() {
        let eta = CutoffFunction::new(1.0, 2.0).unwrap();
        let h = 1e-4;
        let fd = (eta.eval(2.0 + h) - eta.eval(2.0 - h)) / (2.0 * h);
        assert!(fd.abs() < 1e-6);
        let fd = (eta.eval(1.0 + h) - eta.eval(1.0 - h)) / (2.0 * h);
        assert!(fd.abs() < 1e-6);
    }

    #[test]
    fn derivative_matches_differences() {
        let eta = CutoffFunction::new(0.5, 1.5).unwrap();
        let h = 1e-6;
        for &y in &[0.6, 0.9, 1.0, 1.3, -1.2] {
            let fd = (eta.eval(y + h) - eta.eval(y - h)) / (2.0 * h);
            assert!((fd - eta.derivative(y)).abs() < 1e-6, "y={y}");
        }
        let m = eta.max_derivative();
        assert!(m.is_finite() && m > 1.0);
    }

    #[test]
    fn values_in_unit_interval() {
        let eta = CutoffFunction::new(0.3, 0.7).unwrap();
        for k in -100..=100 {
            let v = eta.eval(k as f64 / 100.0);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn invalid_radii() {
        assert!(CutoffFunction::new(2.0, 1.0).is_err());
        assert!(CutoffFunction::new(0.0, 1.0).is_err());
        assert!(CutoffFunction::new(1.0, 1.0).is_err());
    }

    #[test]
    fn test_function_at_origin() {
        let phi = TestFunction::bump(2, CutoffFunction::default(), Shape::Radial);
        assert_eq!(phi.eval(&[0.0, 0.0]), 1.0);
        let phi = TestFunction::new(ExponentVector::new(vec![1, 2]), CutoffFunction::default(), Shape::Product);
        assert_eq!(phi.eval(&[0.5, 0.5]), 0.125);
    }
}
