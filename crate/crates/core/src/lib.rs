//! Numerical laboratory for oscillation indices of real polynomial phases.
//!
//! The crate computes Newton-polytope invariants and real log canonical
//! thresholds exactly, evaluates oscillatory integrals
//! `I(τ,φ) = ∫ e^{iτf(x)} φ(x) dx` by oscillation-resolved quadrature, and
//! estimates their leading asymptotic exponents from sampled values.

pub mod error;
pub mod experiments;
pub mod fit;
pub mod polynomial;
pub mod polytope;
pub mod quadrature;
pub mod rlct;

pub use error::{Error, Result};
