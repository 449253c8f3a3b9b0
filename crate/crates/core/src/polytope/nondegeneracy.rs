//! Randomised search for Newton-degeneracy witnesses.
//!
//! For each compact face `σ` we look for a point of the torus
//! `(ℝ\{0})ⁿ` (or `(ℂ\{0})ⁿ`) where `∇f_σ` vanishes. `f_σ` is
//! quasi-homogeneous for the face weights `w`, so its critical locus is
//! invariant under `xᵢ ↦ t^{wᵢ} xᵢ`; every iterate is rescaled onto the
//! quasi-sphere `max |xᵢ|^{1/wᵢ} = 1`, which keeps the search bounded
//! and makes the residual comparable between starts.
//!
//! Minimisation is Levenberg–Marquardt on the residual vector `∇f_σ`.
//! The residual reported is `Σ|xᵢ∂ᵢf_σ|² / (Σ|a_ν xᵘ|)²`, which is
//! invariant under every torus rescaling and does not vanish as a point
//! slides towards a coordinate hyperplane. A witness must also keep every
//! `|xᵢ|` above the torus floor.
//! Finding no witness only means *likely* nondegenerate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FaceDescriptor, NewtonPolytope};
use crate::error::Result;
use crate::polynomial::{rat_to_f64, PolyF64, Polynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub starts: usize,
    pub torus_floor: f64,
    pub witness_threshold: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            starts: 200,
            torus_floor: 1e-3,
            witness_threshold: 1e-12,
            max_iterations: 200,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NondegeneracyStatus {
    LikelyNondegenerate,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceDiagnostic {
    pub weights: Vec<String>,
    pub dimension: usize,
    pub best_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyVerdict {
    pub field: Field,
    pub status: NondegeneracyStatus,
    pub witness: Option<Witness>,
    /// Weights of the offending face when degenerate.
    pub face: Option<Vec<String>>,
    pub starts_per_face: usize,
    pub best_residual: f64,
    pub faces: Vec<FaceDiagnostic>,
}

impl NondegeneracyVerdict {
    pub fn is_degenerate(&self) -> bool {
        self.status == NondegeneracyStatus::Degenerate
    }
}

pub fn check_r_nondegenerate(f: &Polynomial, opts: &SearchOptions) -> Result<NondegeneracyVerdict> {
    check(f, opts, Field::Real)
}

pub fn check_c_nondegenerate(f: &Polynomial, opts: &SearchOptions) -> Result<NondegeneracyVerdict> {
    check(f, opts, Field::Complex)
}

fn check(f: &Polynomial, opts: &SearchOptions, field: Field) -> Result<NondegeneracyVerdict> {
    let polytope = NewtonPolytope::of_polynomial(f)?;
    let faces = polytope.compact_faces()?;
    let mut diagnostics = Vec::with_capacity(faces.len());
    let mut best_overall = f64::INFINITY;
    for (face_index, face) in faces.iter().enumerate() {
        let search = FaceSearch::new(f, face)?;
        let results: Vec<(f64, Vec<Complex64>)> = (0..opts.starts)
            .into_par_iter()
            .map(|start| {
                let seed = opts.seed ^ ((face_index as u64) << 32) ^ start as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                search.run(&mut rng, field, opts)
            })
            .collect();
        let mut best: Option<&(f64, Vec<Complex64>)> = None;
        for r in &results {
            if best.is_none_or(|b| r.0 < b.0) {
                best = Some(r);
            }
        }
        let (residual, point) = best.expect("at least one start").clone();
        best_overall = best_overall.min(residual);
        diagnostics.push(FaceDiagnostic {
            weights: face.weights.iter().map(|w| w.to_string()).collect(),
            dimension: face.dimension,
            best_residual: residual,
        });
        if residual < opts.witness_threshold
            && point.iter().all(|z| z.norm() > opts.torus_floor)
        {
            return Ok(NondegeneracyVerdict {
                field,
                status: NondegeneracyStatus::Degenerate,
                witness: Some(Witness {
                    re: point.iter().map(|z| z.re).collect(),
                    im: point.iter().map(|z| z.im).collect(),
                    residual,
                }),
                face: Some(face.weights.iter().map(|w| w.to_string()).collect()),
                starts_per_face: opts.starts,
                best_residual: best_overall,
                faces: diagnostics,
            });
        }
    }
    Ok(NondegeneracyVerdict {
        field,
        status: NondegeneracyStatus::LikelyNondegenerate,
        witness: None,
        face: None,
        starts_per_face: opts.starts,
        best_residual: best_overall,
        faces: diagnostics,
    })
}

/// Evaluates the scaled residual of a candidate witness directly.
pub fn witness_residual(f: &Polynomial, face: &FaceDescriptor, point: &[Complex64]) -> Result<f64> {
    let search = FaceSearch::new(f, face)?;
    Ok(search.residual(point))
}

struct FaceSearch {
    n: usize,
    weights: Vec<f64>,
    grad: Vec<PolyF64>,
    hess: Vec<Vec<PolyF64>>,
    scale: f64,
    /// Exponents and `|a_ν|` of `f_σ`.
    terms: Vec<(Vec<u32>, f64)>,
}

impl FaceSearch {
    fn new(f: &Polynomial, face: &FaceDescriptor) -> Result<Self> {
        let fs = f.restrict_to_face(face)?;
        let grad_polys = fs.gradient();
        let hess = grad_polys
            .iter()
            .map(|g| g.gradient().iter().map(Polynomial::to_f64).collect())
            .collect();
        Ok(FaceSearch {
            n: f.dim(),
            weights: face.weights.iter().map(rat_to_f64).collect(),
            grad: grad_polys.iter().map(Polynomial::to_f64).collect(),
            hess,
            scale: fs.coefficient_l1().max(f64::MIN_POSITIVE),
            terms: fs.terms().map(|(e, c)| (e.entries().to_vec(), rat_to_f64(c).abs())).collect(),
        })
    }

    fn normalize(&self, z: &mut [Complex64]) {
        let t = z
            .iter()
            .zip(&self.weights)
            .map(|(zi, w)| zi.norm().powf(1.0 / w))
            .fold(0.0, f64::max);
        if t > 0.0 && t.is_finite() {
            for (zi, w) in z.iter_mut().zip(&self.weights) {
                *zi /= t.powf(*w);
            }
        }
    }

    fn objective(&self, z: &[Complex64]) -> f64 {
        let mut zn = z.to_vec();
        self.normalize(&mut zn);
        self.grad.iter().map(|g| g.eval_complex(&zn).norm_sqr()).sum::<f64>() / (self.scale * self.scale)
    }

    fn residual(&self, z: &[Complex64]) -> f64 {
        let mass: f64 = self
            .terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(z).map(|(&k, zi)| zi.norm().powi(k as i32)).product::<f64>())
            .sum();
        if !(mass > 0.0) {
            return f64::INFINITY;
        }
        let num: f64 = self.grad.iter().zip(z).map(|(g, zi)| (zi * g.eval_complex(z)).norm_sqr()).sum();
        num / (mass * mass)
    }

    /// Real residual vector and Jacobian in the unknowns `(Re z, Im z)`
    /// (real field: only `Re z`).
    fn system(&self, z: &[Complex64], field: Field) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.n;
        let g: Vec<Complex64> = self.grad.iter().map(|p| p.eval_complex(z)).collect();
        let h: Vec<Vec<Complex64>> = self
            .hess
            .iter()
            .map(|row| row.iter().map(|p| p.eval_complex(z)).collect())
            .collect();
        match field {
            Field::Real => {
                let r = DVector::from_iterator(n, g.iter().map(|c| c.re / self.scale));
                let j = DMatrix::from_fn(n, n, |i, k| h[i][k].re / self.scale);
                (r, j)
            }
            Field::Complex => {
                let r = DVector::from_iterator(
                    2 * n,
                    g.iter().map(|c| c.re).chain(g.iter().map(|c| c.im)).map(|v| v / self.scale),
                );
                let j = DMatrix::from_fn(2 * n, 2 * n, |row, col| {
                    let (i, k) = (row % n, col % n);
                    let hik = h[i][k];
                    let v = match (row < n, col < n) {
                        (true, true) => hik.re,
                        (true, false) => -hik.im,
                        (false, true) => hik.im,
                        (false, false) => hik.re,
                    };
                    v / self.scale
                });
                (r, j)
            }
        }
    }

    fn run(&self, rng: &mut ChaCha8Rng, field: Field, opts: &SearchOptions) -> (f64, Vec<Complex64>) {
        let n = self.n;
        let mut z: Vec<Complex64> = (0..n)
            .map(|_| {
                let mag = 10f64.powf(rng.random_range(-1.5..0.0));
                match field {
                    Field::Real => {
                        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                        Complex64::new(sign * mag, 0.0)
                    }
                    Field::Complex => {
                        Complex64::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU))
                    }
                }
            })
            .collect();
        self.normalize(&mut z);
        let mut s = self.objective(&z);
        let mut mu = 1e-3;
        for _ in 0..opts.max_iterations {
            if s < opts.witness_threshold * 1e-6 {
                break;
            }
            let (r, j) = self.system(&z, field);
            let jt = j.transpose();
            let jtj = &jt * &j;
            let jtr = &jt * &r;
            let mut improved = false;
            for _ in 0..12 {
                let mut a = jtj.clone();
                for d in 0..a.nrows() {
                    a[(d, d)] += mu * (1.0 + jtj[(d, d)]);
                }
                let Some(step) = a.lu().solve(&(-&jtr)) else {
                    mu *= 10.0;
                    continue;
                };
                let mut trial = z.clone();
                for k in 0..n {
                    trial[k].re += step[k];
                    if field == Field::Complex {
                        trial[k].im += step[n + k];
                    }
                }
                self.normalize(&mut trial);
                let st = self.objective(&trial);
                if st < s {
                    z = trial;
                    s = st;
                    mu = (mu * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
                mu *= 10.0;
            }
            if !improved {
                break;
            }
        }
        self.normalize(&mut z);
        // Points collapsing onto the coordinate hyperplanes are not witnesses.
        if z.iter().any(|zi| zi.norm() <= opts.torus_floor) {
            return (f64::INFINITY, z);
        }
        (self.residual(&z), z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse;

    const SPHERE_SEXTIC: &str = "(x1^2+x2^2+x3^2)^2 + x1^6+x2^6+x3^6";

    fn opts() -> SearchOptions {
        SearchOptions { starts: 40, ..SearchOptions::default() }
    }

    #[test]
    fn quartic_is_nondegenerate() {
        let v = check_r_nondegenerate(&parse("x1^4+x2^4", 2).unwrap(), &opts()).unwrap();
        assert_eq!(v.status, NondegeneracyStatus::LikelyNondegenerate);
        assert!(v.witness.is_none());
        assert_eq!(v.faces.len(), 3);
    }

    #[test]
    fn square_of_difference_is_degenerate() {
        let f = parse("(x1-x2)^2", 2).unwrap();
        let v = check_r_nondegenerate(&f, &opts()).unwrap();
        assert_eq!(v.status, NondegeneracyStatus::Degenerate);
        let w = v.witness.unwrap();
        assert!(w.residual < 1e-12);
        assert!((w.re[0] - w.re[1]).abs() < 1e-6, "{w:?}");
        assert!(w.re.iter().all(|x| x.abs() > 1e-3));
        // re-verify by direct evaluation of the face gradient
        let face = NewtonPolytope::of_polynomial(&f)
            .unwrap()
            .compact_faces()
            .unwrap()
            .into_iter()
            .find(|fc| fc.dimension == 1)
            .unwrap();
        let pt: Vec<Complex64> = w.re.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert!(witness_residual(&f, &face, &pt).unwrap() < 1e-12);
    }

    #[test]
    fn sphere_sextic_real_vs_complex() {
        let f = parse(SPHERE_SEXTIC, 3).unwrap();
        let r = check_r_nondegenerate(&f, &opts()).unwrap();
        assert_eq!(r.status, NondegeneracyStatus::LikelyNondegenerate);
        let c = check_c_nondegenerate(&f, &opts()).unwrap();
        assert_eq!(c.status, NondegeneracyStatus::Degenerate);
        let w = c.witness.unwrap();
        assert!(w.residual < 1e-12);
        let z: Vec<Complex64> = w.re.iter().zip(&w.im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        assert!(z.iter().all(|zi| zi.norm() > 1e-3));
    }

    #[test]
    fn deterministic_across_runs() {
        let f = parse("(x1-x2)^2 + x1^3", 2).unwrap();
        let a = check_r_nondegenerate(&f, &opts()).unwrap();
        let b = check_r_nondegenerate(&f, &opts()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn non_convenient_input_is_rejected() {
        let f = parse("x1*x2", 2).unwrap();
        assert!(check_r_nondegenerate(&f, &opts()).is_err());
    }
}
