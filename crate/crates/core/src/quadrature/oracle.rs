//! Closed-form leading terms of one-dimensional and separable integrals.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::fit::AsymptoticTerm;
use crate::polynomial::{rat_to_f64, ExponentVector, Polynomial};

/// Leading term of `∫_0^∞ e^{iτ c u^d} u^{b−1} η(u) du` as `τ → ∞`:
/// `(1/d) Γ(b/d) e^{sgn(c) iπb/(2d)} |c|^{−b/d} τ^{−b/d}`.
pub fn erdelyi_leading(b: f64, d: u32, c: f64, tau: f64) -> Result<Complex64> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidArgument("erdelyi_leading needs a nonzero coefficient".into()));
    }
    if !(b > 0.0) || d == 0 || !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("erdelyi_leading needs b > 0, d ≥ 1, tau > 0 (b={b}, d={d}, tau={tau})")));
    }
    Ok(erdelyi_coefficient(b, d, c) * tau.powf(-b / d as f64))
}

/// The `τ`-independent factor of [`erdelyi_leading`].
fn erdelyi_coefficient(b: f64, d: u32, c: f64) -> Complex64 {
    let d = d as f64;
    let modulus = gamma(b / d) / d * c.abs().powf(-b / d);
    Complex64::from_polar(modulus, c.signum() * PI * b / (2.0 * d))
}

/// Leading term of `∫_ℝⁿ e^{iτ f} x^ν η(x₁)⋯η(xₙ) dx` for `f = Σ cᵢ xᵢ^{dᵢ}`.
///
/// Each factor is the sum of the half-line terms for `u > 0` and `u < 0`:
/// `E(ν+1, d, c) + (−1)^ν E(ν+1, d, (−1)^d c)`. The exponent is
/// `−Σ (νᵢ+1)/dᵢ`; the coefficient may be zero when the two halves cancel.
pub fn separable_leading(f: &Polynomial, nu: &ExponentVector) -> Result<AsymptoticTerm> {
    if nu.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: nu.dim() });
    }
    let mut monomials: Vec<Option<(u32, f64)>> = vec![None; f.dim()];
    for (e, c) in f.terms() {
        let axes: Vec<usize> = (0..f.dim()).filter(|&i| e.get(i) > 0).collect();
        if axes.len() != 1 || monomials[axes[0]].is_some() {
            return Err(Error::InvalidArgument(format!("{f} is not a sum of one monomial per variable")));
        }
        monomials[axes[0]] = Some((e.get(axes[0]), rat_to_f64(c)));
    }
    let mut alpha = 0.0;
    let mut coeff = Complex64::new(1.0, 0.0);
    for (i, m) in monomials.into_iter().enumerate() {
        let (d, c) = m.ok_or_else(|| Error::InvalidArgument(format!("variable x{} is missing from {f}", i + 1)))?;
        let k = nu.get(i);
        let b = k as f64 + 1.0;
        let mirrored = if d % 2 == 0 { c } else { -c };
        let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeff *= erdelyi_coefficient(b, d, c) + parity * erdelyi_coefficient(b, d, mirrored);
        alpha -= b / d as f64;
    }
    Ok(AsymptoticTerm::new(alpha, 0, coeff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse;

    #[test]
    fn linear_phase() {
        let v = erdelyi_leading(1.0, 1, 1.0, 1e3).unwrap();
        assert!((v - Complex64::new(0.0, 1e-3)).norm() < 1e-15);
    }

    #[test]
    fn fresnel_half_line() {
        let tau = 50.0;
        let v = erdelyi_leading(1.0, 2, 1.0, tau).unwrap();
        let expected = Complex64::from_polar(0.5 * PI.sqrt() / tau.sqrt(), PI / 4.0);
        assert!((v - expected).norm() < 1e-14);
    }

    #[test]
    fn negative_coefficient_conjugates() {
        let p = erdelyi_leading(2.0, 4, 1.0, 10.0).unwrap();
        let m = erdelyi_leading(2.0, 4, -1.0, 10.0).unwrap();
        assert!((p.conj() - m).norm() < 1e-15);
        let expected = Complex64::from_polar(0.25 * PI.sqrt() / 10f64.sqrt(), -PI / 4.0);
        assert!((m - expected).norm() < 1e-14);
        assert!(erdelyi_leading(1.0, 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn quartic_pair_coefficient() {
        let f = parse("x1^4 + x2^4", 2).unwrap();
        let t = separable_leading(&f, &ExponentVector::zeros(2)).unwrap();
        let g = gamma(0.25);
        let expected = Complex64::from_polar(0.25 * g * g, PI / 4.0);
        assert!((t.alpha + 0.5).abs() < 1e-15);
        assert!((t.coeff - expected).norm() < 1e-13);
    }

    #[test]
    fn quadratic_pair_coefficient_is_i_pi() {
        let f = parse("x1^2 + x2^2", 2).unwrap();
        let t = separable_leading(&f, &ExponentVector::zeros(2)).unwrap();
        assert!((t.alpha + 1.0).abs() < 1e-15);
        assert!((t.coeff - Complex64::new(0.0, PI)).norm() < 1e-13);
    }

    #[test]
    fn odd_monomial_weight_cancels() {
        let f = parse("x1^4 + x2^4", 2).unwrap();
        let t = separable_leading(&f, &ExponentVector::new(vec![1, 1])).unwrap();
        assert!(t.coeff.norm() < 1e-15);
        assert!(separable_leading(&parse("x1*x2", 2).unwrap(), &ExponentVector::zeros(2)).is_err());
    }
}
