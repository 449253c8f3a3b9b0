//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector, so iteration
//! order (and therefore printing and hashing of derived data) is
//! deterministic. Zero coefficients are never stored.
//!
//! Evaluation goes through [`PolyF64`], a flattened `f64` copy built once
//! per polynomial; the quadrature code calls it millions of times.

mod parse;
mod univariate;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::FaceDescriptor;

pub use parse::parse;
pub use univariate::UniPoly;

pub type Rational = BigRational;

/// Converts a rational to the nearest `f64`.
pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_string {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| serde::de::Error::custom(format!("not a rational: {text}")))
    }
}

/// A multi-index `ν ∈ ℕⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        ExponentVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        ExponentVector(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// `|ν| = Σ νᵢ`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Coordinatewise `self ≤ other`.
    pub fn dominated_by(&self, other: &ExponentVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Exact pairing `w·ν`.
    pub fn pair(&self, weights: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(weights)
            .fold(Rational::zero(), |acc, (&e, w)| acc + w * Rational::from_integer(e.into()))
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(|&e| Rational::from_integer(e.into())).collect()
    }

    /// `x^ν` in floating point.
    pub fn monomial_f64(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .fold(1.0, |acc, (&e, &xi)| if e == 0 { acc } else { acc * xi.powi(e as i32) })
    }
}

/// A real polynomial in `n` variables `x1..xn`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(ExponentVector::zeros(dim), c)
    }

    pub fn variable(dim: usize, i: usize) -> Self {
        Self::monomial(ExponentVector::unit(dim, i), Rational::one())
    }

    pub fn monomial(exp: ExponentVector, coeff: Rational) -> Self {
        let mut p = Polynomial::zero(exp.dim());
        if !coeff.is_zero() {
            p.terms.insert(exp, coeff);
        }
        p
    }

    /// Builds a polynomial from terms, summing repeated exponents.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentVector, Rational)>,
    {
        let mut p = Polynomial::zero(dim);
        for (e, c) in terms {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: e.dim() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: ExponentVector, c: Rational) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
            *slot += c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&e);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExponentVector) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&ExponentVector::zeros(self.dim))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::constant(self.dim, Rational::one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact partial derivative `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e.get(i);
            if k == 0 {
                continue;
            }
            let mut d = e.0.clone();
            d[i] -= 1;
            out.add_term(ExponentVector(d), c * Rational::from_integer(k.into()));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.dim).map(|i| self.partial(i)).collect()
    }

    pub fn to_f64(&self) -> PolyF64 {
        PolyF64::new(self)
    }

    fn check_point(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: len });
        }
        Ok(())
    }

    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        self.check_point(point.len())?;
        Ok(self.to_f64().eval(point))
    }

    /// Value and gradient at `point`, in `f64`.
    pub fn evaluate_and_gradient(&self, point: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_point(point.len())?;
        let pf = self.to_f64();
        Ok((pf.eval(point), pf.gradient(point)))
    }

    pub fn evaluate_complex(&self, point: &[Complex64]) -> Result<Complex64> {
        self.check_point(point.len())?;
        Ok(self.to_f64().eval_complex(point))
    }

    /// Partial sum over the exponents minimising `w·ν` on the support.
    pub fn restrict_to_weights(&self, weights: &[Rational]) -> Polynomial {
        let Some(min) = self.terms.keys().map(|e| e.pair(weights)).min() else {
            return Polynomial::zero(self.dim);
        };
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.pair(weights) == min)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// The face polynomial `f_σ = Σ_{ν∈σ} a_ν x^ν`.
    pub fn restrict_to_face(&self, face: &FaceDescriptor) -> Result<Polynomial> {
        if face.weights.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: face.weights.len() });
        }
        let min = self.terms.keys().map(|e| e.pair(&face.weights)).min();
        match min {
            Some(m) if m == face.value => Ok(self.restrict_to_weights(&face.weights)),
            Some(m) => Err(Error::FaceNotIncident(format!(
                "supporting value {} but polynomial attains {}",
                face.value, m
            ))),
            None => Err(Error::ZeroPolynomial),
        }
    }

    /// Pullback under `x ↦ −x`: multiplies `a_ν` by `(−1)^{|ν|}`.
    pub fn involution_pullback(&self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), if e.degree() % 2 == 1 { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// `Some(d)` when every term has total degree `d`.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>> {
        let mut degrees = self.terms.keys().map(ExponentVector::degree);
        let first = degrees.next().ok_or(Error::ZeroPolynomial)?;
        Ok(degrees.all(|d| d == first).then_some(first))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(ExponentVector::degree).max().unwrap_or(0)
    }

    /// Sets `x_i = value` and drops that variable.
    pub fn substitute_and_drop(&self, i: usize, value: &Rational) -> Result<Polynomial> {
        if i >= self.dim || self.dim < 2 {
            return Err(Error::InvalidArgument(format!(
                "cannot eliminate x{} from a polynomial in {} variables",
                i + 1,
                self.dim
            )));
        }
        let mut out = Polynomial::zero(self.dim - 1);
        for (e, c) in &self.terms {
            let mut rest = e.0.clone();
            let k = rest.remove(i);
            let factor = num_traits::pow(value.clone(), k as usize);
            out.add_term(ExponentVector(rest), c * factor);
        }
        Ok(out)
    }

    /// `true` when every term involves at most one variable.
    pub fn is_separable(&self) -> bool {
        self.terms.keys().all(|e| e.0.iter().filter(|&&k| k > 0).count() <= 1)
    }

    /// Splits a separable polynomial into its per-variable parts and constant.
    pub fn separable_parts(&self) -> Option<(Rational, Vec<UniPoly>)> {
        if !self.is_separable() {
            return None;
        }
        let mut constant = Rational::zero();
        let mut parts: Vec<Vec<f64>> = vec![vec![0.0]; self.dim];
        for (e, c) in &self.terms {
            match e.0.iter().position(|&k| k > 0) {
                None => constant += c,
                Some(i) => {
                    let k = e.0[i] as usize;
                    if parts[i].len() <= k {
                        parts[i].resize(k + 1, 0.0);
                    }
                    parts[i][k] += rat_to_f64(c);
                }
            }
        }
        Some((constant, parts.into_iter().map(UniPoly::new).collect()))
    }

    /// Sum of absolute coefficients, used as a scale for relative checks.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.values().map(|c| rat_to_f64(&c.abs())).sum()
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[n={}]({})", self.dim, self)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, e: &ExponentVector) -> fmt::Result {
    let mut first = true;
    for (i, &k) in e.0.iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "x{}", i + 1)?;
        if k > 1 {
            write!(f, "^{}", k)?;
        }
    }
    Ok(())
}

/// Prints in the parser's grammar, highest total degree first.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| b.degree().cmp(&a.degree()).then_with(|| b.cmp(a)));
        for (idx, (e, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let is_const = e.degree() == 0;
            if is_const {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write_monomial(f, e)?;
            } else {
                write!(f, "{}*", mag)?;
                write_monomial(f, e)?;
            }
        }
        Ok(())
    }
}

/// Flattened `f64` copy of a [`Polynomial`] for fast evaluation.
#[derive(Clone, Debug)]
pub struct PolyF64 {
    dim: usize,
    exps: Vec<u32>,
    coeffs: Vec<f64>,
}

impl PolyF64 {
    pub fn new(p: &Polynomial) -> Self {
        let mut exps = Vec::with_capacity(p.num_terms() * p.dim);
        let mut coeffs = Vec::with_capacity(p.num_terms());
        for (e, c) in p.terms() {
            exps.extend_from_slice(e.entries());
            coeffs.push(rat_to_f64(c));
        }
        PolyF64 { dim: p.dim, exps, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn term_exps(&self, t: usize) -> &[u32] {
        &self.exps[t * self.dim..(t + 1) * self.dim]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (t, &c) in self.coeffs.iter().enumerate() {
            let mut m = c;
            for (&k, &xi) in self.term_exps(t).iter().zip(x) {
                if k > 0 {
                    m *= xi.powi(k as i32);
                }
            }
            s += m;
        }
        s
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for (t, &c) in self.coeffs.iter().enumerate() {
            let e = self.term_exps(t);
            for i in 0..self.dim {
                if e[i] == 0 {
                    continue;
                }
                let mut m = c * e[i] as f64;
                for (j, (&k, &xj)) in e.iter().zip(x).enumerate() {
                    let k = if j == i { k - 1 } else { k };
                    if k > 0 {
                        m *= xj.powi(k as i32);
                    }
                }
                g[i] += m;
            }
        }
        g
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (t, &c) in self.coeffs.iter().enumerate() {
            let mut m = Complex64::new(c, 0.0);
            for (&k, &xi) in self.term_exps(t).iter().zip(x) {
                if k > 0 {
                    m *= xi.powu(k);
                }
            }
            s += m;
        }
        s
    }

    /// Restriction to the line through `base` along coordinate `axis`.
    pub fn along_axis(&self, axis: usize, base: &[f64]) -> UniPoly {
        let mut coeffs = vec![0.0];
        for (t, &c) in self.coeffs.iter().enumerate() {
            let e = self.term_exps(t);
            let mut m = c;
            for (j, (&k, &xj)) in e.iter().zip(base).enumerate() {
                if j != axis && k > 0 {
                    m *= xj.powi(k as i32);
                }
            }
            let k = e[axis] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0.0);
            }
            coeffs[k] += m;
        }
        UniPoly::new(coeffs)
    }

    /// Upper bound on `|∂f/∂x_axis|` over the box `|x_j| ≤ abs_max[j]`.
    pub fn partial_bound(&self, axis: usize, abs_max: &[f64]) -> f64 {
        let mut s = 0.0;
        for (t, &c) in self.coeffs.iter().enumerate() {
            let e = self.term_exps(t);
            if e[axis] == 0 {
                continue;
            }
            let mut m = c.abs() * e[axis] as f64;
            for (j, (&k, &xj)) in e.iter().zip(abs_max).enumerate() {
                let k = if j == axis { k - 1 } else { k };
                if k > 0 {
                    m *= xj.abs().powi(k as i32);
                }
            }
            s += m;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str, n: usize) -> Polynomial {
        parse(text, n).unwrap()
    }

    const SPHERE_SEXTIC: &str = "(x1^2+x2^2+x3^2)^2 + x1^6+x2^6+x3^6";

    #[test]
    fn gradient_at_points() {
        let (v, g) = p("x1^4 + x2^4", 2).evaluate_and_gradient(&[1.0, 1.0]).unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(g, vec![4.0, 4.0]);

        let f = p(SPHERE_SEXTIC, 3);
        let (v, g) = f.evaluate_and_gradient(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, 2.0);
        assert!((g[0] - 10.0).abs() < 1e-12, "{g:?}");
        // central differences, step 1e-6
        let h = 1e-6;
        for i in 0..3 {
            let mut a = [1.0, 0.0, 0.0];
            let mut b = a;
            a[i] += h;
            b[i] -= h;
            let fd = (f.evaluate(&a).unwrap() - f.evaluate(&b).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6, "axis {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn value_and_gradient_at_origin() {
        let f = p("3 + 2*x1 - x2 + x1*x2 + x2^3", 2);
        let (v, g) = f.evaluate_and_gradient(&[0.0, 0.0]).unwrap();
        assert_eq!(v, 3.0);
        assert_eq!(g, vec![2.0, -1.0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let f = p("x1 + x2", 2);
        assert_eq!(
            f.evaluate_and_gradient(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn face_restriction() {
        let f = p("x1^4 + x2^4", 2);
        let edge = FaceDescriptor::from_weights(vec![rat(1, 4), rat(1, 4)], rat_int(1));
        assert_eq!(f.restrict_to_face(&edge).unwrap(), f);
        let vertex = FaceDescriptor::from_weights(vec![rat(1, 4), rat(1, 2)], rat_int(1));
        assert_eq!(f.restrict_to_face(&vertex).unwrap(), p("x1^4", 2));

        let g = p(SPHERE_SEXTIC, 3);
        let facet = FaceDescriptor::from_weights(vec![rat(1, 4); 3], rat_int(1));
        assert_eq!(g.restrict_to_face(&facet).unwrap(), p("(x1^2+x2^2+x3^2)^2", 3));

        let wrong = FaceDescriptor::from_weights(vec![rat(1, 4), rat(1, 4)], rat_int(2));
        assert!(matches!(f.restrict_to_face(&wrong), Err(Error::FaceNotIncident(_))));
    }

    #[test]
    fn involution() {
        assert_eq!(p("x1^2+x2^2", 2).involution_pullback(), p("x1^2+x2^2", 2));
        let cubic = p("x1^3 + 2*x1*x2^2 - x2^3", 2);
        assert_eq!(cubic.involution_pullback(), cubic.neg());
        assert_eq!(p("x1^3 + x1*x2", 2).involution_pullback(), p("-x1^3 + x1*x2", 2));
    }

    #[test]
    fn homogeneity() {
        assert_eq!(p("x1^4+x2^4", 2).homogeneous_degree(), Ok(Some(4)));
        assert_eq!(p("x1^2+x2^4", 2).homogeneous_degree(), Ok(None));
        assert_eq!(p(SPHERE_SEXTIC, 3).homogeneous_degree(), Ok(None));
        assert_eq!(Polynomial::zero(2).homogeneous_degree(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn substitute_builds_chart_polynomial() {
        let f = p("x1^4 + x2^4", 2);
        let h = f.substitute_and_drop(0, &rat_int(1)).unwrap();
        assert_eq!(h, p("1 + x1^4", 1));
    }

    #[test]
    fn separable_detection() {
        assert!(p("x1^2 + x2^4 + 3", 2).is_separable());
        assert!(!p("(x1-x2)^2", 2).is_separable());
        let (c, parts) = p("x1^2 - 2*x2^4 + 3", 2).separable_parts().unwrap();
        assert_eq!(c, rat_int(3));
        assert_eq!(parts[1].eval(2.0), -32.0);
    }

    #[test]
    fn along_axis_matches_full_evaluation() {
        let f = p("x1^3*x2 - 2*x1*x2^2 + x2^5 - 1/3", 2).to_f64();
        let line = f.along_axis(1, &[0.7, 0.0]);
        for &t in &[-1.3, 0.0, 0.4, 2.0] {
            assert!((line.eval(t) - f.eval(&[0.7, t])).abs() < 1e-12);
        }
    }
}
