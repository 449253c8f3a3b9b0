//! Real log canonical thresholds from resolution data, from the point
//! blowup of a homogeneous phase, and as the Newton principal-face
//! candidate.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::{rat_int, rational_string, PolyF64, Polynomial, Rational};
use crate::polytope::{check_r_nondegenerate, NewtonPolytope, NondegeneracyStatus, SearchOptions};

/// One exceptional or strict-transform divisor: `m` is the multiplicity of
/// `π*f`, `k` that of `π*dx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionComponent {
    pub m: u32,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResolutionDatum {
    components: Vec<ResolutionComponent>,
}

impl ResolutionDatum {
    pub fn new(components: Vec<ResolutionComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyResolution);
        }
        if let Some(c) = components.iter().find(|c| c.m == 0) {
            return Err(Error::InvalidResolution(format!("multiplicity m must be at least 1 (got m={}, k={})", c.m, c.k)));
        }
        Ok(ResolutionDatum { components })
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<Self> {
        ResolutionDatum::new(pairs.iter().map(|&(m, k)| ResolutionComponent { m, k }).collect())
    }

    /// Parses a JSON array of `{"m": .., "k": ..}` objects.
    pub fn from_json(text: &str) -> Result<Self> {
        let components: Vec<ResolutionComponent> = serde_json::from_str(text)?;
        ResolutionDatum::new(components)
    }

    pub fn components(&self) -> &[ResolutionComponent] {
        &self.components
    }
}

/// `γ = min_j (k_j + 1)/m_j`.
pub fn gamma_from_resolution(data: &ResolutionDatum) -> Result<Rational> {
    data.components
        .iter()
        .map(|c| Rational::new((c.k as i64 + 1).into(), (c.m as i64).into()))
        .min()
        .ok_or(Error::EmptyResolution)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RlctMethod {
    Resolution,
    Homogeneous,
    NewtonCandidate,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidityFlags {
    pub convenient: Option<bool>,
    pub likely_r_nondegenerate: Option<bool>,
    pub homogeneous: Option<bool>,
    pub value_at_most_one: bool,
    pub value_below_one: bool,
    /// `f ≥ 0` on sampled points near the origin.
    pub nonnegative_sampled: Option<bool>,
    /// Positive minimum of `|f|` on the unit sphere (homogeneous `f` only).
    pub zero_locus_only_origin: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceParity {
    pub weights: Vec<String>,
    pub d_j: String,
    pub r_j: String,
    pub d_even: bool,
    pub r_odd: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RlctReport {
    #[serde(with = "rational_string")]
    pub value: Rational,
    pub method: RlctMethod,
    pub flags: ValidityFlags,
    pub parity: Option<Vec<FaceParity>>,
    pub notes: Vec<String>,
}

pub fn rlct_from_resolution(data: &ResolutionDatum) -> Result<RlctReport> {
    let value = gamma_from_resolution(data)?;
    Ok(RlctReport {
        flags: ValidityFlags {
            value_at_most_one: value <= Rational::one(),
            value_below_one: value < Rational::one(),
            ..ValidityFlags::default()
        },
        value,
        method: RlctMethod::Resolution,
        parity: None,
        notes: vec!["minimum of (k+1)/m over the supplied divisors".into()],
    })
}

fn require_convenient(f: &Polynomial) -> Result<NewtonPolytope> {
    let poly = NewtonPolytope::of_polynomial(f)?;
    if !poly.is_convenient().convenient {
        return Err(Error::NotConvenient);
    }
    Ok(poly)
}

/// `n/d` for `f` homogeneous of degree `d` and convenient.
pub fn rlct_homogeneous(f: &Polynomial, search: &SearchOptions) -> Result<RlctReport> {
    let d = f.homogeneous_degree()?.ok_or(Error::NotHomogeneous)?;
    require_convenient(f)?;
    let n = f.dim();
    let value = Rational::new((n as i64).into(), (d as i64).into());
    let nondeg = check_r_nondegenerate(f, search)?.status == NondegeneracyStatus::LikelyNondegenerate;
    let only_origin = sphere_min_abs(f, search.seed) > 1e-9 * f.coefficient_l1();
    let mut notes = vec![format!("n/d with n = {n}, d = {d} from the exceptional divisor of the point blowup")];
    if !only_origin && value > Rational::one() {
        notes.push("f vanishes away from the origin; the strict transform contributes (k+1)/m = 1 < n/d".into());
    }
    Ok(RlctReport {
        flags: ValidityFlags {
            convenient: Some(true),
            likely_r_nondegenerate: Some(nondeg),
            homogeneous: Some(true),
            value_at_most_one: value <= Rational::one(),
            value_below_one: value < Rational::one(),
            nonnegative_sampled: Some(nonnegative_sampled(f, search.seed)),
            zero_locus_only_origin: Some(only_origin),
        },
        value,
        method: RlctMethod::Homogeneous,
        parity: None,
        notes,
    })
}

/// `1/t₀ = ℓ_j(𝟙)` on the principal faces, reported with the parity of
/// `d_j` and `r_j = d_j ℓ_j(𝟙)` for each principal face. The value is a
/// candidate: it is the threshold only under further hypotheses, which are
/// surfaced as flags rather than checked as preconditions.
pub fn rlct_newton_candidate(f: &Polynomial, search: &SearchOptions) -> Result<RlctReport> {
    let poly = require_convenient(f)?;
    let dist = poly.newton_distance()?;
    let value = Rational::one() / &dist.t0;
    let parity: Vec<FaceParity> = dist
        .principal
        .iter()
        .map(|face| {
            let two = num_bigint::BigInt::from(2);
            FaceParity {
                weights: face.weights.iter().map(|w| w.to_string()).collect(),
                d_j: face.denominator.to_string(),
                r_j: face.r_value.to_string(),
                d_even: (&face.denominator % &two).is_zero(),
                r_odd: !(&face.r_value % &two).is_zero(),
            }
        })
        .collect();
    let nondeg = check_r_nondegenerate(f, search)?.status == NondegeneracyStatus::LikelyNondegenerate;
    let homogeneous = f.homogeneous_degree()?.is_some();
    let mut notes = vec!["candidate value 1/t0 from the principal faces; not asserted as the threshold".to_string()];
    if parity.iter().any(|p| p.d_even && p.r_odd) {
        notes.push("a principal face has d_j even and r_j odd".into());
    }
    Ok(RlctReport {
        flags: ValidityFlags {
            convenient: Some(true),
            likely_r_nondegenerate: Some(nondeg),
            homogeneous: Some(homogeneous),
            value_at_most_one: value <= Rational::one(),
            value_below_one: value < Rational::one(),
            nonnegative_sampled: Some(nonnegative_sampled(f, search.seed)),
            zero_locus_only_origin: if homogeneous { Some(sphere_min_abs(f, search.seed) > 1e-9 * f.coefficient_l1()) } else { None },
        },
        value,
        method: RlctMethod::NewtonCandidate,
        parity: Some(parity),
        notes,
    })
}

/// Chart `i` of the point blowup: `π*f = y_i^d h_i(ŷ)`, `π*dx = y_i^{n−1} dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartRecord {
    pub index: usize,
    /// `f` with `x_i = 1`, in the remaining `n − 1` variables.
    pub h: Polynomial,
    pub f_multiplicity: u32,
    pub jacobian_multiplicity: u32,
}

pub fn blowup_charts(f: &Polynomial) -> Result<Vec<ChartRecord>> {
    let d = f.homogeneous_degree()?.ok_or(Error::NotHomogeneous)?;
    let n = f.dim();
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    (0..n)
        .map(|i| {
            Ok(ChartRecord {
                index: i,
                h: f.substitute_and_drop(i, &rat_int(1))?,
                f_multiplicity: d,
                jacobian_multiplicity: n as u32 - 1,
            })
        })
        .collect()
}

/// The exceptional divisor's multiplicities `(d, n−1)`, one per chart.
pub fn resolution_from_charts(charts: &[ChartRecord]) -> Result<ResolutionDatum> {
    ResolutionDatum::from_pairs(&charts.iter().map(|c| (c.f_multiplicity, c.jacobian_multiplicity)).collect::<Vec<_>>())
}

/// Minimum of `|f|` on the unit sphere, on a deterministic grid refined
/// around the best point.
pub fn sphere_min_abs(f: &Polynomial, seed: u64) -> f64 {
    let g = PolyF64::new(f);
    let n = f.dim();
    match n {
        1 => g.eval(&[1.0]).abs().min(g.eval(&[-1.0]).abs()),
        2 => {
            let m = 7200;
            let step = std::f64::consts::TAU / m as f64;
            let h = |t: f64| g.eval(&[t.cos(), t.sin()]).abs();
            let (mut best, mut arg) = (f64::INFINITY, 0.0);
            for k in 0..m {
                let t = step * k as f64;
                let v = h(t);
                if v < best {
                    best = v;
                    arg = t;
                }
            }
            // golden-section refinement on the neighbouring cells
            let (mut a, mut b) = (arg - step, arg + step);
            let r = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..100 {
                let c = b - r * (b - a);
                let d = a + r * (b - a);
                if h(c) < h(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            best.min(h(0.5 * (a + b)))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best = f64::INFINITY;
            let mut x = vec![0.0; n];
            for _ in 0..200_000 {
                let mut norm: f64 = 0.0;
                for v in x.iter_mut() {
                    *v = rng.random_range(-1.0..1.0);
                    norm += *v * *v;
                }
                if norm < 1e-6 || norm > 1.0 {
                    continue;
                }
                let s = norm.sqrt();
                x.iter_mut().for_each(|v| *v /= s);
                best = best.min(g.eval(&x).abs());
            }
            best
        }
    }
}

/// `f ≥ 0` at sampled points of `[−1, 1]ⁿ`, up to rounding.
pub fn nonnegative_sampled(f: &Polynomial, seed: u64) -> bool {
    let g = PolyF64::new(f);
    let n = f.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let tol = 1e-12 * f.coefficient_l1();
    let mut x = vec![0.0; n];
    (0..20_000).all(|_| {
        x.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        g.eval(&x) >= -tol
    })
}
