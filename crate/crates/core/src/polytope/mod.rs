//! Newton polyhedra `Γ₊(f)` in exact rational arithmetic.
//!
//! `Γ₊` is stored in both descriptions. The V-side is the list of
//! generators (the vertices, which are the minimal exponent vectors that
//! are extreme). The H-side is the list of facets `ℓ_j(ν) ≥ 1` with
//! `ℓ_j ≥ 0`; the coordinate inequalities `ν_i ≥ 0` are always implied and
//! are not stored, so facets lying in a coordinate hyperplane (such as the
//! ray `{ν₁ = 0, ν₂ ≥ 4}` of `Γ₊(x₁⁴+x₂⁴)`) do not appear in the list.
//!
//! Facets are found by brute force: every hyperplane through `n` objects
//! drawn from the minimal points and the axis directions is solved exactly
//! and kept when it supports all points. This is `O(C(m+n, n))` and
//! dimension is capped at 4.
//!
//! The sandwich radius `r` of `Γ₊(f) ⊃ {|ν| ≥ r}` is the largest axis
//! intercept: the slice `{|ν| = r}` of the orthant is a simplex whose
//! extreme points are `r·e_i`, so by convexity it lies in `Γ₊(f)` exactly
//! when every `r·e_i` does, i.e. when `r ≥ c_i` for all `i`.

mod linalg;
pub mod nondegeneracy;

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{rat_to_f64, ExponentVector, Polynomial, Rational};

pub use linalg::{rank, solve};
pub use nondegeneracy::{
    check_c_nondegenerate, check_r_nondegenerate, NondegeneracyStatus, NondegeneracyVerdict,
    SearchOptions,
};

pub const MAX_DIM: usize = 4;

/// A facet inequality `ℓ(ν) = Σ wᵢνᵢ ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FaceFunctional {
    pub weights: Vec<Rational>,
    /// LCM of the weight denominators.
    pub denominator: BigInt,
    /// `ℓ(𝟙)`.
    pub diag_value: Rational,
    /// `d_j·ℓ(𝟙)`, always an integer.
    pub r_value: BigInt,
    pub compact: bool,
}

impl FaceFunctional {
    pub fn new(weights: Vec<Rational>) -> Self {
        let denominator = weights
            .iter()
            .fold(BigInt::one(), |acc, w| num_integer::lcm(acc, w.denom().clone()));
        let diag_value = weights.iter().fold(Rational::zero(), |acc, w| acc + w);
        let r_value = (&diag_value * Rational::from_integer(denominator.clone())).to_integer();
        let compact = weights.iter().all(|w| w.is_positive());
        FaceFunctional { weights, denominator, diag_value, r_value, compact }
    }

    pub fn eval(&self, nu: &ExponentVector) -> Rational {
        nu.pair(&self.weights)
    }

    fn eval_rat(&self, point: &[Rational]) -> Rational {
        point.iter().zip(&self.weights).fold(Rational::zero(), |acc, (p, w)| acc + p * w)
    }
}

/// A face given by a supporting functional and its minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDescriptor {
    /// Nonnegative, not all zero; strictly positive for compact faces.
    pub weights: Vec<Rational>,
    /// Minimum of `weights·ν` over the polytope.
    pub value: Rational,
    pub dimension: usize,
    /// Vertices of `Γ₊` on the face.
    pub incident_generators: Vec<ExponentVector>,
    /// Exponents of the polynomial's support on the face.
    pub incident_support: Vec<ExponentVector>,
}

impl FaceDescriptor {
    /// A bare descriptor, enough for [`Polynomial::restrict_to_face`].
    pub fn from_weights(weights: Vec<Rational>, value: Rational) -> Self {
        FaceDescriptor {
            weights,
            value,
            dimension: 0,
            incident_generators: Vec::new(),
            incident_support: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolytope {
    dim: usize,
    generators: Vec<ExponentVector>,
    support: Vec<ExponentVector>,
    facets: Vec<FaceFunctional>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convenience {
    pub convenient: bool,
    /// Axis intercepts `c_i`, present when convenient.
    pub intercepts: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonDistance {
    pub t0: Rational,
    /// Facets attaining `t₀`, in lexicographic weight order.
    pub principal: Vec<FaceFunctional>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRadii {
    pub distance: Rational,
    pub r: Rational,
    pub r_prime: Rational,
    /// `r / (r′ + n)`.
    pub bound: Rational,
}

impl PairRadii {
    pub fn bound_holds(&self) -> bool {
        self.distance <= self.bound
    }
}

fn minimal_points(support: &[ExponentVector]) -> Vec<ExponentVector> {
    let unique: BTreeSet<_> = support.iter().cloned().collect();
    unique
        .iter()
        .filter(|p| !unique.iter().any(|q| q != *p && q.dominated_by(p)))
        .cloned()
        .collect()
}

enum Object<'a> {
    Point(&'a ExponentVector),
    Axis(usize),
}

/// Builds `Γ₊` of a support set.
pub fn build_polytope(support: &[ExponentVector]) -> Result<NewtonPolytope> {
    let first = support.first().ok_or(Error::EmptySupport)?;
    let dim = first.dim();
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    if let Some(bad) = support.iter().find(|e| e.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.dim() });
    }
    let minimal = minimal_points(support);

    let objects: Vec<Object> = minimal
        .iter()
        .map(Object::Point)
        .chain((0..dim).map(Object::Axis))
        .collect();

    let mut facets: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for combo in (0..objects.len()).combinations(dim) {
        if !combo.iter().any(|&k| matches!(objects[k], Object::Point(_))) {
            continue;
        }
        let mut rows = Vec::with_capacity(dim);
        let mut rhs = Vec::with_capacity(dim);
        for &k in &combo {
            match &objects[k] {
                Object::Point(p) => {
                    rows.push(p.to_rationals());
                    rhs.push(Rational::one());
                }
                Object::Axis(i) => {
                    let mut row = vec![Rational::zero(); dim];
                    row[*i] = Rational::one();
                    rows.push(row);
                    rhs.push(Rational::zero());
                }
            }
        }
        let Some(w) = solve(rows, rhs) else { continue };
        if w.iter().any(|x| x.is_negative()) || w.iter().all(|x| x.is_zero()) {
            continue;
        }
        if minimal.iter().all(|p| p.pair(&w) >= Rational::one()) {
            facets.insert(w);
        }
    }
    let facets: Vec<FaceFunctional> = facets.into_iter().map(FaceFunctional::new).collect();

    let generators = minimal
        .iter()
        .filter(|p| {
            let mut normals: Vec<Vec<Rational>> = facets
                .iter()
                .filter(|f| f.eval(p).is_one())
                .map(|f| f.weights.clone())
                .collect();
            for i in 0..dim {
                if p.get(i) == 0 {
                    let mut e = vec![Rational::zero(); dim];
                    e[i] = Rational::one();
                    normals.push(e);
                }
            }
            rank(normals) == dim
        })
        .cloned()
        .collect();

    let support: BTreeSet<_> = support.iter().cloned().collect();
    Ok(NewtonPolytope { dim, generators, support: support.into_iter().collect(), facets })
}

impl NewtonPolytope {
    pub fn of_polynomial(p: &Polynomial) -> Result<NewtonPolytope> {
        if p.is_zero() {
            return Err(Error::EmptySupport);
        }
        build_polytope(&p.support())
    }

    /// `Γ₊` generated by a single exponent.
    pub fn of_monomial(nu: &ExponentVector) -> Result<NewtonPolytope> {
        build_polytope(std::slice::from_ref(nu))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[ExponentVector] {
        &self.generators
    }

    pub fn support(&self) -> &[ExponentVector] {
        &self.support
    }

    pub fn facets(&self) -> &[FaceFunctional] {
        &self.facets
    }

    /// Exact membership test against the facet inequalities.
    pub fn contains(&self, point: &[Rational]) -> bool {
        point.iter().all(|x| !x.is_negative())
            && self.facets.iter().all(|f| f.eval_rat(point) >= Rational::one())
    }

    /// Vertices of `{ν ≥ 0 : ℓ_j(ν) ≥ 1}` recomputed from the H-description.
    pub fn vertices_from_facets(&self) -> Vec<Vec<Rational>> {
        let n = self.dim;
        let mut planes: Vec<(Vec<Rational>, Rational)> =
            self.facets.iter().map(|f| (f.weights.clone(), Rational::one())).collect();
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            planes.push((e, Rational::zero()));
        }
        let mut out = BTreeSet::new();
        for combo in (0..planes.len()).combinations(n) {
            let rows = combo.iter().map(|&k| planes[k].0.clone()).collect();
            let rhs = combo.iter().map(|&k| planes[k].1.clone()).collect();
            if let Some(x) = solve(rows, rhs) {
                if self.contains(&x) {
                    out.insert(x);
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn is_convenient(&self) -> Convenience {
        let mut intercepts = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let hit = self.generators.iter().find(|g| {
                g.entries().iter().enumerate().all(|(j, &k)| j == i || k == 0)
            });
            match hit {
                Some(g) => intercepts.push(g.get(i)),
                None => return Convenience { convenient: false, intercepts: None },
            }
        }
        Convenience { convenient: true, intercepts: Some(intercepts) }
    }

    fn require_convenient(&self) -> Result<Vec<u32>> {
        self.is_convenient().intercepts.ok_or(Error::NotConvenient)
    }

    fn require_facets(&self) -> Result<()> {
        if self.facets.is_empty() {
            return Err(Error::InvalidArgument(
                "polytope is the whole orthant (nonzero constant term)".into(),
            ));
        }
        Ok(())
    }

    /// All compact faces, of every dimension `0..n−1`.
    pub fn compact_faces(&self) -> Result<Vec<FaceDescriptor>> {
        self.require_convenient()?;
        let n = self.dim;
        let mut planes: Vec<(Vec<Rational>, Rational)> =
            self.facets.iter().map(|f| (f.weights.clone(), Rational::one())).collect();
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            planes.push((e, Rational::zero()));
        }
        let on = |plane: &(Vec<Rational>, Rational), g: &ExponentVector| g.pair(&plane.0) == plane.1;

        let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for plane in &planes {
            let s: BTreeSet<usize> =
                (0..self.generators.len()).filter(|&k| on(plane, &self.generators[k])).collect();
            if !s.is_empty() {
                sets.insert(s);
            }
        }
        loop {
            let current: Vec<_> = sets.iter().cloned().collect();
            let mut grew = false;
            for (a, b) in current.iter().tuple_combinations() {
                let s: BTreeSet<usize> = a.intersection(b).cloned().collect();
                if !s.is_empty() && sets.insert(s) {
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }

        let mut faces = Vec::new();
        for s in sets {
            let active: Vec<&(Vec<Rational>, Rational)> = planes
                .iter()
                .filter(|pl| s.iter().all(|&k| on(pl, &self.generators[k])))
                .collect();
            let mut weights = vec![Rational::zero(); n];
            let mut value = Rational::zero();
            for (w, b) in &active {
                for i in 0..n {
                    weights[i] += &w[i];
                }
                value += b;
            }
            if !weights.iter().all(|w| w.is_positive()) {
                continue;
            }
            let verts: Vec<ExponentVector> = s.iter().map(|&k| self.generators[k].clone()).collect();
            let base = verts[0].to_rationals();
            let diffs: Vec<Vec<Rational>> = verts[1..]
                .iter()
                .map(|v| v.to_rationals().iter().zip(&base).map(|(a, b)| a - b).collect())
                .collect();
            let dimension = rank(diffs);
            let incident_support =
                self.support.iter().filter(|e| e.pair(&weights) == value).cloned().collect();
            faces.push(FaceDescriptor {
                weights,
                value,
                dimension,
                incident_generators: verts,
                incident_support,
            });
        }
        faces.sort_by(|a, b| {
            a.dimension
                .cmp(&b.dimension)
                .then_with(|| a.incident_generators.cmp(&b.incident_generators))
        });
        Ok(faces)
    }

    /// Newton distance `t₀ = max_j 1/ℓ_j(𝟙)` and the facets attaining it.
    pub fn newton_distance(&self) -> Result<NewtonDistance> {
        self.require_convenient()?;
        self.require_facets()?;
        let t0 = self
            .facets
            .iter()
            .map(|f| Rational::one() / &f.diag_value)
            .max()
            .expect("facets present");
        let mut principal: Vec<FaceFunctional> = self
            .facets
            .iter()
            .filter(|f| Rational::one() / &f.diag_value == t0)
            .cloned()
            .collect();
        principal.sort_by(|a, b| a.weights.cmp(&b.weights));
        Ok(NewtonDistance { t0, principal })
    }

    /// `d(f,φ)` together with the sandwich radii `r`, `r′`.
    pub fn pair_distance_and_radii(&self, phi: &NewtonPolytope) -> Result<PairRadii> {
        let intercepts = self.require_convenient()?;
        self.require_facets()?;
        if phi.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: phi.dim });
        }
        let ones = ExponentVector::new(vec![1; self.dim]);
        let distance = phi
            .generators
            .iter()
            .flat_map(|g| {
                let shifted = g.add(&ones);
                self.facets.iter().map(move |f| Rational::one() / f.eval(&shifted))
            })
            .max()
            .ok_or(Error::EmptySupport)?;
        let r = Rational::from_integer((*intercepts.iter().max().unwrap()).into());
        let r_prime = phi
            .generators
            .iter()
            .map(|g| Rational::from_integer(g.degree().into()))
            .min()
            .ok_or(Error::EmptySupport)?;
        let bound = &r / (&r_prime + Rational::from_integer((self.dim as i64).into()));
        Ok(PairRadii { distance, r, r_prime, bound })
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            n: self.dim,
            generators: self.generators.iter().map(|g| g.entries().to_vec()).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| FacetJson {
                    weights: f.weights.iter().map(|w| w.to_string()).collect(),
                    dj: f.denominator.to_string().parse().unwrap_or(i64::MAX),
                    rj: f.r_value.to_string().parse().unwrap_or(i64::MAX),
                    compact: f.compact,
                })
                .collect(),
        }
    }
}

/// Wire form: `{n, generators: [[int]], facets: [{weights: ["p/q"], dj, rj, compact}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub n: usize,
    pub generators: Vec<Vec<u32>>,
    pub facets: Vec<FacetJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetJson {
    pub weights: Vec<String>,
    pub dj: i64,
    pub rj: i64,
    pub compact: bool,
}

impl PolytopeJson {
    /// Rebuilds the polytope from the generators and checks the facets agree.
    pub fn to_polytope(&self) -> Result<NewtonPolytope> {
        let support: Vec<ExponentVector> =
            self.generators.iter().map(|g| ExponentVector::new(g.clone())).collect();
        if support.iter().any(|g| g.dim() != self.n) {
            return Err(Error::Format("generator dimension disagrees with n".into()));
        }
        let p = build_polytope(&support)?;
        if p.to_json().facets != self.facets {
            return Err(Error::Format("facet list inconsistent with generators".into()));
        }
        Ok(p)
    }
}

/// Floating-point view of `ℓ(𝟙)`, handy for reports.
pub fn diag_value_f64(f: &FaceFunctional) -> f64 {
    rat_to_f64(&f.diag_value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{parse, rat, rat_int};
    use proptest::prelude::*;

    fn ev(v: &[u32]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    fn poly_polytope(text: &str, n: usize) -> NewtonPolytope {
        NewtonPolytope::of_polynomial(&parse(text, n).unwrap()).unwrap()
    }

    const SPHERE_SEXTIC: &str = "(x1^2+x2^2+x3^2)^2 + x1^6+x2^6+x3^6";

    /// Brute-force H-description oracle for n = 2: every line through two
    /// support points (or a point and an axis direction) that weakly
    /// supports the support set, computed in floating point.
    fn facets_2d_oracle(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut cands = Vec::new();
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                let det = p.0 * q.1 - p.1 * q.0;
                if det.abs() > 1e-12 {
                    cands.push(((q.1 - p.1) / det, (p.0 - q.0) / det));
                }
            }
            if p.0 > 0.0 {
                cands.push((1.0 / p.0, 0.0));
            }
            if p.1 > 0.0 {
                cands.push((0.0, 1.0 / p.1));
            }
        }
        for w in cands {
            if w.0 < -1e-12 || w.1 < -1e-12 {
                continue;
            }
            if points.iter().all(|p| w.0 * p.0 + w.1 * p.1 >= 1.0 - 1e-12)
                && !out.iter().any(|o| (o.0 - w.0).abs() < 1e-12 && (o.1 - w.1).abs() < 1e-12)
            {
                out.push(w);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    #[test]
    fn quartic_facets() {
        let p = poly_polytope("x1^4 + x2^4", 2);
        assert_eq!(p.facets().len(), 1);
        let f = &p.facets()[0];
        assert_eq!(f.weights, vec![rat(1, 4), rat(1, 4)]);
        assert!(f.compact);
        assert_eq!(f.denominator, BigInt::from(4));
        assert_eq!(f.r_value, BigInt::from(2));
        assert_eq!(facets_2d_oracle(&[(4.0, 0.0), (0.0, 4.0)]), vec![(0.25, 0.25)]);

        let q = poly_polytope("x1^2 + x2^2", 2);
        assert_eq!(q.facets()[0].weights, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn facets_match_2d_oracle() {
        let supports: &[&[(u32, u32)]] = &[
            &[(4, 0), (0, 4)],
            &[(2, 0), (0, 4)],
            &[(6, 0), (1, 1), (0, 5)],
            &[(1, 1)],
            &[(3, 0), (2, 1), (0, 3), (1, 3)],
            &[(5, 0), (2, 2), (0, 7), (1, 4)],
        ];
        for s in supports {
            let support: Vec<_> = s.iter().map(|&(a, b)| ev(&[a, b])).collect();
            let p = build_polytope(&support).unwrap();
            let mut got: Vec<(f64, f64)> = p
                .facets()
                .iter()
                .map(|f| (rat_to_f64(&f.weights[0]), rat_to_f64(&f.weights[1])))
                .collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let pts: Vec<_> = s.iter().map(|&(a, b)| (a as f64, b as f64)).collect();
            let want = facets_2d_oracle(&pts);
            assert_eq!(got.len(), want.len(), "{s:?}: {got:?} vs {want:?}");
            for (g, w) in got.iter().zip(&want) {
                assert!((g.0 - w.0).abs() < 1e-12 && (g.1 - w.1).abs() < 1e-12, "{s:?}");
            }
        }
    }

    #[test]
    fn sphere_sextic_polytope() {
        let p = poly_polytope(SPHERE_SEXTIC, 3);
        let facet = p
            .facets()
            .iter()
            .find(|f| f.weights == vec![rat(1, 4); 3])
            .expect("facet nu1+nu2+nu3 = 4");
        assert!(facet.compact);
        assert_eq!(p.facets().len(), 1);
        let c = p.is_convenient();
        assert!(c.convenient);
        assert_eq!(c.intercepts, Some(vec![4, 4, 4]));
        let faces = p.compact_faces().unwrap();
        let top = faces.iter().find(|f| f.dimension == 2).unwrap();
        assert_eq!(top.incident_support.len(), 6);
        assert_eq!(top.incident_generators.len(), 3);
        assert_eq!(p.newton_distance().unwrap().t0, rat(4, 3));
    }

    #[test]
    fn convenience() {
        let c = poly_polytope("x1^4 + x2^4", 2).is_convenient();
        assert_eq!(c, Convenience { convenient: true, intercepts: Some(vec![4, 4]) });
        assert!(!poly_polytope("x1*x2", 2).is_convenient().convenient);
        let nc = poly_polytope("x1*x2", 2);
        assert_eq!(nc.compact_faces(), Err(Error::NotConvenient));
    }

    #[test]
    fn compact_face_counts() {
        for text in ["x1^4 + x2^4", "x1^2 + x2^2"] {
            let faces = poly_polytope(text, 2).compact_faces().unwrap();
            assert_eq!(faces.len(), 3, "{text}");
            assert_eq!(faces.iter().filter(|f| f.dimension == 0).count(), 2);
            assert_eq!(faces.iter().filter(|f| f.dimension == 1).count(), 1);
            assert!(faces.iter().all(|f| f.weights.iter().all(|w| w.is_positive())));
        }
        // Sphere-sextic fixture: 3 vertices, 3 edges, 1 triangle.
        let faces = poly_polytope(SPHERE_SEXTIC, 3).compact_faces().unwrap();
        assert_eq!(faces.len(), 7);
    }

    #[test]
    fn distances() {
        let nd = poly_polytope("x1^4 + x2^4", 2).newton_distance().unwrap();
        assert_eq!(nd.t0, rat_int(2));
        assert_eq!(nd.principal.len(), 1);
        assert_eq!(poly_polytope("x1^2 + x2^2", 2).newton_distance().unwrap().t0, rat_int(1));

        let f = poly_polytope("x1^4 + x2^4", 2);
        let constant = NewtonPolytope::of_monomial(&ev(&[0, 0])).unwrap();
        let pr = f.pair_distance_and_radii(&constant).unwrap();
        assert_eq!(pr.distance, rat_int(2));
        assert_eq!(pr.r, rat_int(4));
        assert_eq!(pr.r_prime, rat_int(0));
        assert_eq!(pr.bound, rat_int(2));
        assert!(pr.bound_holds());

        let mixed = NewtonPolytope::of_monomial(&ev(&[1, 1])).unwrap();
        let pr = f.pair_distance_and_radii(&mixed).unwrap();
        assert_eq!(pr.distance, rat_int(1));
        assert_eq!(pr.r_prime, rat_int(2));
        assert_eq!(pr.bound, rat_int(1));

        let g = poly_polytope("x1^2 + x2^2", 2);
        assert_eq!(g.pair_distance_and_radii(&constant).unwrap().distance, rat_int(1));
    }

    #[test]
    fn principal_ties_are_sorted() {
        // x1^2 + x1 x2 + x2^2 style: two facets through (1,1) attaining t0 = 1
        let p = build_polytope(&[ev(&[3, 0]), ev(&[1, 1]), ev(&[0, 3])]).unwrap();
        let nd = p.newton_distance().unwrap();
        assert_eq!(nd.t0, rat_int(1));
        assert_eq!(nd.principal.len(), 2);
        assert!(nd.principal[0].weights < nd.principal[1].weights);
    }

    #[test]
    fn non_vertex_minimal_points_are_support_only() {
        let p = poly_polytope("(x1 - x2)^2", 2);
        assert_eq!(p.generators(), &[ev(&[0, 2]), ev(&[2, 0])]);
        assert_eq!(p.support().len(), 3);
        let faces = p.compact_faces().unwrap();
        let edge = faces.iter().find(|f| f.dimension == 1).unwrap();
        assert_eq!(edge.incident_support.len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let p = poly_polytope(SPHERE_SEXTIC, 3);
        let json = serde_json::to_string(&p.to_json()).unwrap();
        let back: PolytopeJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_polytope().unwrap().to_json(), p.to_json());
        assert!(json.contains("\"1/4\""));
    }

    #[test]
    fn errors() {
        assert_eq!(build_polytope(&[]), Err(Error::EmptySupport));
        assert_eq!(
            build_polytope(&[ev(&[1, 0, 0, 0, 1])]),
            Err(Error::UnsupportedDimension(5))
        );
    }

    fn arb_support() -> impl Strategy<Value = Vec<ExponentVector>> {
        (1usize..=3).prop_flat_map(|n| {
            prop::collection::vec(prop::collection::vec(0u32..=8, n), 1..10)
                .prop_map(|v| v.into_iter().map(ExponentVector::new).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn dual_description_round_trip(support in arb_support()) {
            let p = build_polytope(&support).unwrap();
            let from_h: Vec<Vec<Rational>> = p.vertices_from_facets();
            let mut from_v: Vec<Vec<Rational>> =
                p.generators().iter().map(|g| g.to_rationals()).collect();
            from_v.sort();
            prop_assert_eq!(from_h, from_v);
            for g in p.generators() {
                prop_assert!(p.facets().iter().all(|f| f.eval(g) >= Rational::one()));
                prop_assert!(p.facets().is_empty() || p.facets().iter().any(|f| f.eval(g).is_one()));
                for h in p.generators() {
                    prop_assert!(g == h || !g.dominated_by(h));
                }
            }
            for f in p.facets() {
                let d = Rational::from_integer(f.denominator.clone());
                prop_assert!(f.weights.iter().all(|w| (w * &d).is_integer()));
            }
        }

        #[test]
        fn up_closure(support in arb_support(), shift in prop::collection::vec(0u32..=5, 3), pick in 0usize..10) {
            let p = build_polytope(&support).unwrap();
            let g = &p.generators()[pick % p.generators().len()];
            let point: Vec<Rational> = g
                .entries()
                .iter()
                .zip(&shift)
                .map(|(&a, &s)| Rational::from_integer((a + s).into()) + rat(1, 3) * rat_int(s as i64 % 2))
                .collect();
            prop_assert!(p.contains(&point));
        }

        #[test]
        fn adding_a_generator_never_increases_t0(extra in prop::collection::vec(0u32..=6, 2)) {
            prop_assume!(extra.iter().any(|&k| k > 0));
            let base = vec![ev(&[6, 0]), ev(&[0, 5]), ev(&[2, 2])];
            let p = build_polytope(&base).unwrap();
            let mut more = base.clone();
            more.push(ExponentVector::new(extra));
            let q = build_polytope(&more).unwrap();
            prop_assert!(q.newton_distance().unwrap().t0 <= p.newton_distance().unwrap().t0);
        }
    }
}
