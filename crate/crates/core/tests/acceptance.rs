//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Run with `cargo test -p osclab-core --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use osclab::experiments::{run_theorem2_battery, run_theorem3_lab, default_fixtures, ExperimentConfig, Verdict};
use osclab::fit::{cutoff_independence_check, fit_leading, tau_grid, AsymptoticTerm, BoundVerdict, FitOptions};
use osclab::polynomial::{parse, rat, ExponentVector, Rational, UniPoly};
use osclab::polytope::{check_c_nondegenerate, check_r_nondegenerate, NondegeneracyStatus, SearchOptions};
use osclab::quadrature::{
    chart_parity_integral, erdelyi_leading, eval_oscillatory, oscillatory_1d, ChartWeight, CutoffFunction, JacobianMode,
    OscillatorySample, QuadOptions, Shape, TestFunction,
};
use osclab::rlct::{blowup_charts, gamma_from_resolution, resolution_from_charts, rlct_homogeneous, rlct_newton_candidate};

const SPHERE_SEXTIC: &str = "(x1^2+x2^2+x3^2)^2 + x1^6+x2^6+x3^6";

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn exact_rlct() -> Outcome {
    let search = SearchOptions::default();
    let quartic = rlct_homogeneous(&parse("x1^4 + x2^4", 2).map_err(err)?, &search).map_err(err)?.value;
    let sextic = rlct_newton_candidate(&parse(SPHERE_SEXTIC, 3).map_err(err)?, &search).map_err(err)?.value;
    if quartic != rat(1, 2) || sextic != rat(3, 4) {
        return Err(format!("x1^4+x2^4 gave {quartic}, the 3-variable fixture gave {sextic}"));
    }
    let fixtures = [
        ("x1^4 + x2^4", 2, rat(1, 2)),
        ("x1^2 + x2^2", 2, rat(1, 1)),
        ("x1^6 + x1^2*x2^4 + x2^6", 2, rat(1, 3)),
        ("x1^2 + x2^2 + x3^2", 3, rat(3, 2)),
        ("x1^4 + x2^4 + x3^4", 3, rat(3, 4)),
    ];
    for (text, n, expected) in fixtures {
        let f = parse(text, n).map_err(err)?;
        let h = rlct_homogeneous(&f, &search).map_err(err)?.value;
        let c = rlct_newton_candidate(&f, &search).map_err(err)?.value;
        let g: Rational =
            gamma_from_resolution(&resolution_from_charts(&blowup_charts(&f).map_err(err)?).map_err(err)?).map_err(err)?;
        if h != expected || c != expected || g != expected {
            return Err(format!("{text}: homogeneous {h}, candidate {c}, charts {g}, expected {expected}"));
        }
    }
    Ok("1/2 and 3/4 exact; 5 homogeneous fixtures agree across three methods".into())
}

fn parity_vanishing() -> Outcome {
    let h = parse("1 + x1^4", 1).map_err(err)?;
    let eta = CutoffFunction::new(0.5, 1.0).map_err(err)?;
    let theta = ChartWeight::unit(1.25);
    let mut worst: f64 = 0.0;
    for tau in [1.0, 1e1, 1e2, 1e3, 1e4] {
        let signed = chart_parity_integral(4, 2, &h, &theta, JacobianMode::Signed, &eta, tau, 1e-12).map_err(err)?;
        let abs = chart_parity_integral(4, 2, &h, &theta, JacobianMode::Absolute, &eta, tau, 1e-6).map_err(err)?;
        let ratio = signed.value.norm() / abs.value.norm();
        worst = worst.max(ratio);
        if !(ratio < 1e-10) {
            return Err(format!("tau = {tau}: |signed| / |absolute| = {ratio:.3e}"));
        }
    }
    Ok(format!("largest |signed| / |absolute| = {worst:.2e}"))
}

fn oracle_agreement() -> Outcome {
    let eta = CutoffFunction::new(0.5, 1.0).map_err(err)?;
    let tau = 1e4;
    let mut worst: f64 = 0.0;
    for (b, d) in [(1u32, 2u32), (1, 4), (2, 4), (3, 4)] {
        let phase = UniPoly::monomial(1.0, d as usize);
        let q = oscillatory_1d(
            &phase,
            tau,
            |u| u.powi(b as i32 - 1) * eta.eval(u),
            0.0,
            eta.support(),
            &[eta.plateau()],
            &QuadOptions::with_tol(1e-12),
        )
        .map_err(err)?;
        let lead = erdelyi_leading(b as f64, d, 1.0, tau).map_err(err)?;
        let rel = (q.value - lead).norm() / lead.norm();
        worst = worst.max(rel);
        if !(rel < 1e-3) {
            return Err(format!("(b, d) = ({b}, {d}): relative error {rel:.3e}"));
        }
    }
    Ok(format!("largest relative error {worst:.2e}"))
}

fn product_bump(n: usize) -> Result<TestFunction, String> {
    Ok(TestFunction::bump(n, CutoffFunction::new(1.0, 2.0).map_err(err)?, Shape::Product))
}

fn stationary_phase() -> Outcome {
    let f = parse("x1^2 + x2^2", 2).map_err(err)?;
    let s = eval_oscillatory(&f, &product_bump(2)?, 1e3, 1e-12).map_err(err)?;
    let scaled = 1e3 * s.value.norm();
    let rel = (scaled - PI).abs() / PI;
    ensure(rel < 1e-2, format!("tau |I| = {scaled:.8}, relative deviation from pi {rel:.2e}"))
}

fn leading_term() -> Outcome {
    let f = parse("x1^4 + x2^4", 2).map_err(err)?;
    let phi = product_bump(2)?;
    let taus = tau_grid(1e3, 1e4, 12).map_err(err)?;
    let samples: Vec<OscillatorySample> =
        taus.iter().map(|&t| eval_oscillatory(&f, &phi, t, 1e-10)).collect::<Result<_, _>>().map_err(err)?;
    let e = fit_leading(&samples, &FitOptions::for_dimension(2)).map_err(err)?;
    let alpha = e.alpha_hat.ok_or("no exponent fitted")?;
    let expected = Complex64::from_polar(gamma(0.25).powi(2) / 4.0, PI / 4.0);
    let rel = (e.coeff_hat - expected).norm() / expected.norm();
    ensure(
        (alpha + 0.5).abs() <= 0.01 && rel < 0.02,
        format!("alpha_hat = {alpha:.6}, k_hat = {}, coefficient relative error {rel:.2e}", e.k_hat),
    )
}

fn bound_battery() -> Outcome {
    let cfg = ExperimentConfig::default();
    let fixtures = default_fixtures();
    let b = run_theorem2_battery(&fixtures, &cfg).map_err(err)?;
    // d(f, x^ν) by hand: smallest d with d (ν + 𝟙) on or above every facet.
    let expected = [rat(2, 1), rat(1, 1), rat(4, 3), rat(2, 3), rat(4, 5), rat(3, 2), rat(1, 1)];
    let mut genuine = 0;
    for (row, d) in b.rows.iter().zip(expected) {
        let c = &row.check;
        if c.distance != d || !c.radii_inequality_holds {
            return Err(format!("{}: d(f, phi) = {} (expected {d}), radii inequality {}", row.fixture.name, c.distance, c.radii_inequality_holds));
        }
        match c.verdict {
            BoundVerdict::Pass => genuine += 1,
            BoundVerdict::VacuousPass => {}
            _ => return Err(format!("{}: verdict {:?}, alpha_hat {:?}, bound {}", row.fixture.name, c.verdict, c.alpha_hat, c.bound_exponent)),
        }
        if !row.likely_r_nondegenerate {
            return Err(format!("{}: phase not likely nondegenerate", row.fixture.name));
        }
    }
    ensure(
        genuine >= 5 && b.passed,
        format!("{} fixtures, {genuine} with a measured exponent, all within 0.05 of their bound", b.rows.len()),
    )
}

fn cutoff_independence() -> Outcome {
    let f = parse("x1^4 + x2^4", 2).map_err(err)?;
    let taus = tau_grid(1e2, 1e4, 12).map_err(err)?;
    let r = cutoff_independence_check(
        &f,
        &ExponentVector::zeros(2),
        CutoffFunction::new(1.0, 2.0).map_err(err)?,
        CutoffFunction::new(0.5, 1.5).map_err(err)?,
        &taus,
        1e-10,
        -2.0,
        &SearchOptions::default(),
    )
    .map_err(err)?;
    let slope = r.slope.ok_or("difference below the noise floor everywhere")?;
    ensure(!r.vacuous && slope <= -2.0, format!("slope of |I_1 - I_2| = {slope:.3} over {} samples", r.samples_used))
}

fn synthetic_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let taus = tau_grid(1e2, 1e4, 16).map_err(err)?;
    let opts = FitOptions::for_dimension(2);
    let mut good = 0;
    for _ in 0..50 {
        let alpha = rng.random_range(-2.0..-0.25);
        let k = rng.random_range(0..=1u32);
        let coeff = Complex64::from_polar(rng.random_range(0.1..10.0), rng.random_range(0.0..2.0 * PI));
        let term = AsymptoticTerm::new(alpha, k, coeff);
        let samples: Vec<OscillatorySample> = taus
            .iter()
            .map(|&t| {
                let v = term.eval(t) * (1.0 + rng.random_range(-1e-4..1e-4));
                OscillatorySample { tau: t, value: v, error_estimate: 1e-4 * v.norm(), converged: true }
            })
            .collect();
        let e = fit_leading(&samples, &opts).map_err(err)?;
        if e.alpha_hat.is_some_and(|a| (a - alpha).abs() < 1e-2) && e.k_hat == k {
            good += 1;
        }
    }
    ensure(good >= 48, format!("{good}/50 series recovered"))
}

fn nondegeneracy() -> Outcome {
    let opts = SearchOptions::default();
    let square = check_r_nondegenerate(&parse("(x1-x2)^2", 2).map_err(err)?, &opts).map_err(err)?;
    let w = square.witness.as_ref().ok_or("(x1-x2)^2: no witness")?;
    if square.status != NondegeneracyStatus::Degenerate || !(w.residual < 1e-12) {
        return Err(format!("(x1-x2)^2: {:?}, residual {:.3e}", square.status, w.residual));
    }
    let quartic = check_r_nondegenerate(&parse("x1^4 + x2^4", 2).map_err(err)?, &opts).map_err(err)?;
    let sextic = parse(SPHERE_SEXTIC, 3).map_err(err)?;
    let real = check_r_nondegenerate(&sextic, &opts).map_err(err)?;
    let complex = check_c_nondegenerate(&sextic, &opts).map_err(err)?;
    let cw = complex.witness.as_ref().map_or(f64::INFINITY, |w| w.residual);
    ensure(
        quartic.status == NondegeneracyStatus::LikelyNondegenerate
            && real.status == NondegeneracyStatus::LikelyNondegenerate
            && complex.status == NondegeneracyStatus::Degenerate
            && cw < 1e-12,
        format!(
            "(x1-x2)^2 witness residual {:.2e}; quartic {:?}; 3-variable fixture real {:?}, complex {:?} (residual {cw:.2e})",
            w.residual, quartic.status, real.status, complex.status
        ),
    )
}

fn laboratory() -> Outcome {
    let mut notes = Vec::new();
    for phase in ["x1^4 + x2^4", "x1^2 + x2^2"] {
        let cfg = ExperimentConfig { phase: phase.into(), ..ExperimentConfig::default() };
        let r = run_theorem3_lab(&cfg).map_err(err)?;
        let complete = r.claims.len() >= 6
            && r.claims.iter().all(|c| c.tolerance.is_finite() && !c.statement.is_empty() && !c.evidence.is_empty());
        let vanishing = r.claim("signed-chart-integrals-vanish").map(|c| c.verdict);
        let oracle = r.oracle.as_ref().map(|o| o.alpha);
        let n_over_d = -(r.n as f64) / r.d as f64;
        if !complete || vanishing != Some(Verdict::Supports) || oracle.is_none_or(|a| (a - n_over_d).abs() > 1e-12) || !r.internally_consistent() {
            let failed: Vec<&str> = r.consistency.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            return Err(format!(
                "{phase}: complete {complete}, vanishing {vanishing:?}, oracle exponent {oracle:?}, failed checks {failed:?}"
            ));
        }
        let strict = r.claim("chi-prime-strictly-below").map_or("missing".to_string(), |c| c.verdict.to_string());
        notes.push(format!("{phase}: strict claim measured as {strict}"));
    }
    Ok(notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact rlct fixtures", exact_rlct),
        ("parity vanishing of signed chart integrals", parity_vanishing),
        ("1D quadrature against the Gamma-function oracle", oracle_agreement),
        ("stationary phase for x1^2 + x2^2", stationary_phase),
        ("leading term for x1^4 + x2^4", leading_term),
        ("bound battery", bound_battery),
        ("cutoff independence", cutoff_independence),
        ("synthetic fit recovery", synthetic_recovery),
        ("nondegeneracy verdicts", nondegeneracy),
        ("parity laboratory reports", laboratory),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{:.1} s]", i + 1, t.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed in {:.1} s", criteria.len() - failures, criteria.len(), start.elapsed().as_secs_f64());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
