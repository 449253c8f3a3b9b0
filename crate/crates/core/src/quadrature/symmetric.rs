//! The pushed-down cutoff `χ′ = Σᵢ η(xᵢ) θᵢ` built from a partition of
//! unity on the exceptional divisor of the point blowup.
//!
//! Chart `i` covers the directions with `|x_j| < (1+ε)|x_i|` for all `j`.
//! The weights are `θᵢ = wᵢ / Σ w` with `wᵢ = Π_{j≠i} ρ(|x_j|/|x_i|)`, where
//! `ρ` is 1 on `[0, 1]` and 0 beyond `1 + ε/2`. The coordinate of largest
//! modulus always has `wᵢ = 1`, so the sum never vanishes.

use serde::{Deserialize, Serialize};

use super::chart::ChartWeight;
use super::CutoffFunction;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricCutoff {
    pub n: usize,
    pub epsilon: f64,
    pub eta: CutoffFunction,
    rho: CutoffFunction,
    pub symmetrized: bool,
}

pub fn build_symmetric_cutoff(n: usize, epsilon: f64, eta: CutoffFunction) -> Result<SymmetricCutoff> {
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidArgument(format!("overlap must lie in (0, 1/2), got {epsilon}")));
    }
    let rho = CutoffFunction::new(1.0, 1.0 + epsilon / 2.0)?;
    Ok(SymmetricCutoff { n, epsilon, eta, rho, symmetrized: false })
}

impl SymmetricCutoff {
    /// `(χ′ + ι*χ′)/2`.
    pub fn symmetrize(mut self) -> Self {
        self.symmetrized = true;
        self
    }

    /// Unnormalized weight of chart `i` at direction `x`.
    fn raw(&self, i: usize, x: &[f64]) -> f64 {
        let xi = x[i].abs();
        let mut w = 1.0;
        for (j, xj) in x.iter().enumerate() {
            if j == i {
                continue;
            }
            let xj = xj.abs();
            if xj > xi * self.rho.support() {
                return 0.0;
            }
            w *= self.rho.eval(xj / xi);
        }
        w
    }

    /// Partition weights `θ₁..θₙ` at a nonzero point (they depend on direction only).
    pub fn thetas(&self, x: &[f64]) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.n).map(|i| if x[i] == 0.0 { 0.0 } else { self.raw(i, x) }).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|w| w / s).collect()
    }

    /// `θᵢ` in the coordinates of chart `i`: `x_i = 1`, the others `v`.
    pub fn chart_theta(&self, i: usize, v: &[f64]) -> f64 {
        let mut x = Vec::with_capacity(self.n);
        x.extend_from_slice(&v[..i]);
        x.push(1.0);
        x.extend_from_slice(&v[i..]);
        self.thetas(&x)[i]
    }

    fn chi(&self, x: &[f64]) -> f64 {
        if x.iter().all(|v| v.abs() <= self.eta.plateau()) {
            return 1.0;
        }
        let th = self.thetas(x);
        x.iter().zip(&th).map(|(&xi, t)| if *t == 0.0 { 0.0 } else { self.eta.eval(xi) * t }).sum()
    }

    /// `χ′(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.symmetrized {
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            0.5 * (self.chi(x) + self.chi(&neg))
        } else {
            self.chi(x)
        }
    }

    /// Half-width of a box containing the support of `χ′`.
    pub fn support_radius(&self) -> f64 {
        self.eta.support() * self.rho.support()
    }

    /// Chart coordinates satisfy `|v_j| < 1 + ε` on the support of `θᵢ`.
    pub fn chart_domain(&self) -> f64 {
        1.0 + self.epsilon
    }

    /// `θᵢ` packaged for [`super::chart_parity_integral`].
    pub fn chart_weight(&self, i: usize) -> ChartWeight<'_> {
        let t = self.rho.support();
        ChartWeight::new(
            move |v: &[f64]| self.chart_theta(i, v),
            self.chart_domain(),
            vec![-t, -1.0, 0.0, 1.0, t, -1.0 / t, 1.0 / t],
        )
    }
}
