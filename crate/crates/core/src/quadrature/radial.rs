//! Polar reduction for homogeneous phases and radial amplitudes.
//!
//! For `f` homogeneous of degree `d` and `φ = x^ν η(|x|)`,
//! `I(τ) = ∫_{S^{n−1}} ω^ν R(τ, h(ω)) dσ(ω)` with `h = f|_{S^{n−1}}` and
//! `R(τ, c) = ∫_0^b e^{iτ c r^d} r^{n−1+|ν|} η(r) dr`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gauss::{adaptive_smooth, gauss_legendre, pairwise_sum, QuadOptions, QuadResult};
use super::{oscillatory_1d, CutoffFunction, OscillatorySample, Shape, TestFunction};
use crate::error::{Error, Result};
use crate::polynomial::{PolyF64, Polynomial, UniPoly};

/// `∫_0^b e^{iτ c r^d} r^power η(r) dr`.
pub fn radial_profile(tau: f64, c: f64, d: u32, power: u32, eta: &CutoffFunction, tol: f64) -> Result<QuadResult> {
    let phase = UniPoly::monomial(c, d as usize);
    let p = power as i32;
    oscillatory_1d(
        &phase,
        tau,
        |r| eta.eval(r) * r.powi(p),
        0.0,
        eta.support(),
        &[eta.plateau()],
        &QuadOptions::with_tol(tol),
    )
}

const ANGULAR_SAMPLES: usize = 1440;
const MAX_TRAPEZOID: usize = 1 << 14;

/// `I(τ, φ)` through the polar decomposition, for `n ∈ {2, 3}`.
///
/// On the circle the angular integral uses the trapezoid rule with doubling
/// when `h` has no zeros, and adaptive Gauss–Legendre on each arc between
/// sign changes otherwise. On the sphere `h` must not vanish.
pub fn radial_reduce(f: &Polynomial, phi: &TestFunction, tau: f64, tol: f64) -> Result<OscillatorySample> {
    let n = f.dim();
    if phi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: phi.dim() });
    }
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if phi.shape != Shape::Radial {
        return Err(Error::InvalidArgument("radial_reduce needs a radial test function".into()));
    }
    if !(tau >= 0.0 && tau.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("need tau ≥ 0 and tol > 0 (tau={tau}, tol={tol})")));
    }
    let d = f.homogeneous_degree()?.ok_or(Error::NotHomogeneous)?;
    let g = PolyF64::new(f);
    let power = (n as u32 - 1) + phi.nu.degree();
    let eta = phi.cutoff;
    let sphere = Sphere { g: &g, nu: &phi.nu, d, power, eta, tau };
    let (value, error) = if n == 2 { sphere.circle(tol)? } else { sphere.two_sphere(tol)? };
    Ok(OscillatorySample::new(tau, value, error, tol))
}

struct Sphere<'a> {
    g: &'a PolyF64,
    nu: &'a crate::polynomial::ExponentVector,
    d: u32,
    power: u32,
    eta: CutoffFunction,
    tau: f64,
}

impl Sphere<'_> {
    /// `ω^ν R(τ, h(ω))` and the error of the radial integral.
    fn integrand(&self, omega: &[f64], tol: f64) -> Result<(Complex64, f64)> {
        let w = self.nu.monomial_f64(omega);
        if w == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let r = radial_profile(self.tau, self.g.eval(omega), self.d, self.power, &self.eta, tol / w.abs())?;
        Ok((r.value * w, r.error * w.abs()))
    }

    fn h_circle(&self, t: f64) -> f64 {
        self.g.eval(&[t.cos(), t.sin()])
    }

    fn circle(&self, tol: f64) -> Result<(Complex64, f64)> {
        let zeros = self.circle_zeros()?;
        let inner_tol = tol / (4.0 * 2.0 * PI);
        if zeros.is_empty() {
            let mut m = 32;
            let mut prev: Option<Complex64> = None;
            loop {
                let step = 2.0 * PI / m as f64;
                let mut values = Vec::with_capacity(m);
                let mut inner_err = 0.0;
                for k in 0..m {
                    let t = step * k as f64;
                    let (v, e) = self.integrand(&[t.cos(), t.sin()], inner_tol)?;
                    values.push(v);
                    inner_err += e * step;
                }
                let total = pairwise_sum(&values) * step;
                if let Some(p) = prev {
                    let diff = (total - p).norm();
                    if diff <= tol / 2.0 || m >= MAX_TRAPEZOID {
                        return Ok((total, diff + inner_err));
                    }
                }
                prev = Some(total);
                m *= 2;
            }
        }
        // Arcs between consecutive zeros, wrapping around 2π.
        let mut value = Complex64::new(0.0, 0.0);
        let mut error = 0.0;
        let failure = std::cell::RefCell::new(None);
        for (i, &lo) in zeros.iter().enumerate() {
            let hi = if i + 1 < zeros.len() { zeros[i + 1] } else { zeros[0] + 2.0 * PI };
            let opts = QuadOptions::with_tol(tol / 2.0 * (hi - lo) / (2.0 * PI));
            let inner_err = std::cell::Cell::new(0.0f64);
            let r = adaptive_smooth(
                |t| match self.integrand(&[t.cos(), t.sin()], inner_tol) {
                    Ok((v, e)) => {
                        inner_err.set(inner_err.get().max(e));
                        v
                    }
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                },
                lo,
                hi,
                &[],
                &opts,
            )?;
            value += r.value;
            error += r.error + inner_err.get() * (hi - lo);
        }
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok((value, error))
    }

    /// Sign changes of `h` on `[0, 2π)`; zeros without a sign change are an error.
    fn circle_zeros(&self) -> Result<Vec<f64>> {
        let step = 2.0 * PI / ANGULAR_SAMPLES as f64;
        let samples: Vec<f64> = (0..=ANGULAR_SAMPLES).map(|k| self.h_circle(step * k as f64)).collect();
        let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(Error::ZeroPolynomial);
        }
        let mut zeros = Vec::new();
        for k in 0..ANGULAR_SAMPLES {
            let (a, b) = (samples[k], samples[k + 1]);
            if a == 0.0 {
                let prev = samples[(k + ANGULAR_SAMPLES - 1) % ANGULAR_SAMPLES];
                if prev * b < 0.0 {
                    zeros.push(step * k as f64);
                }
            } else if a * b < 0.0 {
                zeros.push(bisect(|t| self.h_circle(t), step * k as f64, step * (k + 1) as f64));
            }
        }
        // A near-zero minimum away from every sign change is a tangential zero.
        for k in 0..ANGULAR_SAMPLES {
            let t = step * k as f64;
            if samples[k].abs() < 1e-6 * scale && zeros.iter().all(|z| (z - t).abs() > 2.0 * step) {
                return Err(Error::UnbracketedZero(t));
            }
        }
        Ok(zeros)
    }

    fn two_sphere(&self, tol: f64) -> Result<(Complex64, f64)> {
        let step_probe = 64;
        let mut scale = 0.0f64;
        let mut min = f64::INFINITY;
        let mut signs = (false, false);
        for i in 0..=step_probe {
            let z = -1.0 + 2.0 * i as f64 / step_probe as f64;
            for j in 0..2 * step_probe {
                let omega = direction(z, PI * j as f64 / step_probe as f64);
                let h = self.g.eval(&omega);
                scale = scale.max(h.abs());
                min = min.min(h.abs());
                if h > 0.0 {
                    signs.0 = true;
                } else if h < 0.0 {
                    signs.1 = true;
                }
            }
        }
        if signs.0 && signs.1 || min < 1e-6 * scale {
            return Err(Error::UnbracketedZero(min));
        }
        let inner_tol = tol / (8.0 * 4.0 * PI);
        let mut prev: Option<Complex64> = None;
        let mut m = 8;
        loop {
            let (nodes, weights) = gauss_legendre(m);
            let azimuth = 2 * m;
            let step = 2.0 * PI / azimuth as f64;
            let mut values = Vec::with_capacity(m * azimuth);
            let mut inner_err = 0.0;
            for (z, wz) in nodes.iter().zip(&weights) {
                for j in 0..azimuth {
                    let (v, e) = self.integrand(&direction(*z, step * j as f64), inner_tol)?;
                    values.push(v * (wz * step));
                    inner_err += e * wz * step;
                }
            }
            let total = pairwise_sum(&values);
            if let Some(p) = prev {
                let diff = (total - p).norm();
                if diff <= tol / 2.0 || m >= 256 {
                    return Ok((total, diff + inner_err));
                }
            }
            prev = Some(total);
            m *= 2;
        }
    }
}

/// Point of `S²` with height `z` and azimuth `t`.
fn direction(z: f64, t: f64) -> [f64; 3] {
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * t.cos(), s * t.sin(), z]
}

fn bisect<F: Fn(f64) -> f64>(h: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = h(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = h(m);
        if fm == 0.0 || b - a < 1e-15 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}
