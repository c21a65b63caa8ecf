//! The property suite behind `verify`: every check becomes one report row
//! whose margin must be non-negative.
//!
//! Sample points are drawn from ChaCha8 streams seeded by `--seed` plus a
//! per-check offset, so rows are identical across runs and thread counts.

use crate::commands::{bergman_row, compact_radius, measure_config, status_of, COMPACT_HEIGHT};
use crate::output::emit;
use crate::{CliError, RunConfig, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use supnorm::arithmetic::{coset_count_bruteforce, index_gamma01, index_gamma01_with_phi_m, modular_group};
use supnorm::bounds::{
    auxlem_report, counting_inequality_check, empirical_slope, measure_classical, measure_jacobi, prop1_eqn4_check,
    prop3_eqn5_check, prop3_report, thm11_chain_report, thm11_report, thm4_report, thm6_report, BoundCheck,
    BoundParams, BoundReport,
};
use supnorm::hyperbolic::{displacement, reduce_to_fundamental_domain, GroupElement, UpperHalfPoint};
use supnorm::qseries::{one_dimensional_cusp_form, EvalOptions, PeterssonQuadrature, QuadRule, ONE_DIMENSIONAL_WEIGHTS};
use supnorm::thetajacobi::{
    cauchy_schwarz_chain_check, extract_h_mu, jacobi_inner_4d, jacobi_inner_theta, phi_10_1,
    theta_component_l2_norms_gamma01, theta_sum_bound_check, JacobiFunction, JacobiPoint, JacobiQuadrature, Phi10Product,
};
use supnorm::Complex64;

/// Points per index for the theta-sum bound.
pub const THETA_SAMPLES: usize = 1000;
/// Samples for each imported bound and the counting inequality.
pub const BOUND_SAMPLES: usize = 20;
/// Tail tolerance of the counted sum; the tail is added to the left side.
pub const COUNTING_TAIL_TOL: f64 = 1e-6;
/// Points for the Cauchy–Schwarz chain.
pub const CHAIN_SAMPLES: usize = 50;
/// Largest acceptable log-log slope of the measured sups in k.
pub const SLOPE_THRESHOLD: f64 = 1.7;

/// Quadrature on each coset image for the component norms.
pub const COSET_QUAD: PeterssonQuadrature =
    PeterssonQuadrature { y_max: 12.0, n_xi: 8, n_eta: 8, rule: QuadRule::GaussLegendre(8), tol: 1e-8 };

type Check = fn(&RunConfig, &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError>;

const CHECKS: &[(&str, Check)] = &[
    ("bergman", bergman_oracle),
    ("theta_sum", theta_sum),
    ("index", index),
    ("imported", imported_bounds),
    ("counting", counting),
    ("classical", classical),
    ("jacobi", jacobi),
    ("two_route", two_route),
    ("invariance", invariance),
];

pub fn run_verify(cfg: &RunConfig) -> Result<Status, CliError> {
    let groups: Vec<Vec<BoundReport>> = CHECKS
        .par_iter()
        .enumerate()
        .map(|(i, (name, check))| {
            log::info!("verify: {name}");
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
            check(cfg, &mut rng)
        })
        .collect::<Result<_, CliError>>()?;
    let rows: Vec<BoundReport> = groups.into_iter().flatten().collect();
    let status = status_of(&rows);
    emit(&rows, cfg)?;
    Ok(status)
}

fn digest(cfg: &RunConfig, extra: &str) -> String {
    format!("{};{extra}", cfg.digest())
}

/// The sample with the smallest relative margin.
fn worst(checks: impl IntoIterator<Item = BoundCheck>) -> BoundCheck {
    let rel = |c: &BoundCheck| c.margin / c.rhs.abs().max(f64::MIN_POSITIVE);
    checks
        .into_iter()
        .fold(None, |w: Option<BoundCheck>, c| match w {
            Some(w) if !(rel(&c) < rel(&w)) => Some(w),
            _ => Some(c),
        })
        .expect("non-empty sample set")
}

/// A point of the fundamental domain with η up to `h`.
fn point_in_domain(rng: &mut ChaCha8Rng, h: f64) -> UpperHalfPoint {
    let t = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.87..h)).expect("η > 0");
    reduce_to_fundamental_domain(&t).expect("reduction terminates").0
}

fn bergman_oracle(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    [(0.0, 1.0), (0.0, 2.0), (0.5, 1.2)]
        .iter()
        .map(|&(x, y)| {
            let tau = UpperHalfPoint::new(x, y)?;
            let row = bergman_row(cfg, 12, &tau)?;
            Ok(BoundReport::new(
                format!("bergman_oracle@{tau}"),
                12.0,
                0,
                row.abs_diff.unwrap_or(f64::NAN),
                row.allowed.unwrap_or(f64::NAN),
                row.config_digest,
            ))
        })
        .collect()
}

fn theta_sum(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    (1..=8u32)
        .map(|m| {
            let mut checks = Vec::with_capacity(THETA_SAMPLES);
            for _ in 0..THETA_SAMPLES {
                let tau = point_in_domain(rng, 8.0);
                let p = JacobiPoint::new(tau, Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..tau.eta())));
                checks.push(theta_sum_bound_check(m, &p)?);
            }
            let w = worst(checks);
            Ok(BoundReport::new("theta_sum", 0.0, m, w.lhs, w.rhs, digest(cfg, &format!("samples={THETA_SAMPLES}"))))
        })
        .collect()
}

fn index(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    let mut out = Vec::new();
    for m in 1..=6u64 {
        let formula = index_gamma01(m)?;
        let brute = coset_count_bruteforce(m)?;
        let alt = index_gamma01_with_phi_m(m)?;
        out.push(BoundReport::new(
            "index_gamma01",
            0.0,
            m as u32,
            formula.abs_diff(brute) as f64,
            0.0,
            digest(cfg, &format!("phi4m={formula};bruteforce={brute};phim={alt}")),
        ));
    }
    Ok(out)
}

fn imported_bounds(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    let mut eqn4 = Vec::new();
    let mut eqn5 = Vec::new();
    for _ in 0..BOUND_SAMPLES {
        let k = rng.gen_range(5.0..40.0);
        let r = rng.gen_range(0.1..3.0);
        let d = 0.5 * r + rng.gen_range(0.0..4.0);
        eqn4.push(prop1_eqn4_check(k, d, r)?);
        let k = rng.gen_range(5.0..40.0);
        let a = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..5.0))?;
        let b = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..5.0))?;
        eqn5.push(prop3_eqn5_check(k, &a, &b)?);
    }
    let d = digest(cfg, &format!("samples={BOUND_SAMPLES}"));
    let (w4, w5) = (worst(eqn4), worst(eqn5));
    Ok(vec![
        BoundReport::new("prop1_eqn4", 0.0, 0, w4.lhs, w4.rhs, d.clone()),
        BoundReport::new("prop3_eqn5", 0.0, 0, w5.lhs, w5.rhs, d),
    ])
}

fn counting(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    let g = modular_group();
    let mut checks = Vec::new();
    for _ in 0..BOUND_SAMPLES {
        let k = rng.gen_range(6.0..30.0);
        let tau = point_in_domain(rng, 3.0);
        let delta = g.injectivity_radius * rng.gen_range(0.5..3.0);
        checks.push(counting_inequality_check(k, delta, &tau, g, COUNTING_TAIL_TOL)?);
    }
    let w = worst(checks);
    Ok(vec![BoundReport::new("counting_inequality", 0.0, 0, w.lhs, w.rhs, digest(cfg, &format!("samples={BOUND_SAMPLES}")))])
}

fn classical(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    let mc = measure_config(cfg);
    let g = modular_group();
    let params = BoundParams::default();
    let r_compact = compact_radius()?;
    let mut out = Vec::new();
    let mut pts = Vec::new();
    for &k in ONE_DIMENSIONAL_WEIGHTS.iter() {
        let meas = measure_classical(k, &mc)?;
        let kf = k as f64;
        pts.push((kf, meas.sup.value));
        out.push(prop3_report(kf, g, &meas.sup, &meas.digest)?);
        out.push(thm4_report(kf, g, meas.sup.value, &params, &meas.digest)?);
        out.push(thm6_report(kf, g, r_compact, COMPACT_HEIGHT, meas.sup.value, &params, &meas.digest)?);
    }
    out.push(BoundReport::new(
        "empirical_slope",
        0.0,
        0,
        empirical_slope(&pts)?,
        SLOPE_THRESHOLD,
        digest(cfg, "weights=12,16,18,20,22,26"),
    ));
    Ok(out)
}

fn jacobi(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    let phi = phi_10_1(cfg.trunc)?;
    let meas = measure_jacobi(&phi, &measure_config(cfg))?;
    let g = modular_group();
    let params = BoundParams::default();
    let hvec = meas.components.as_ref().expect("measurement keeps its components");
    let mut checks = Vec::with_capacity(CHAIN_SAMPLES);
    for _ in 0..CHAIN_SAMPLES {
        let tau = point_in_domain(rng, 4.0);
        let p = JacobiPoint::new(tau, Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..tau.eta())));
        checks.push(cauchy_schwarz_chain_check(hvec, &p)?);
    }
    let w = worst(checks);
    let kh = meas.k as f64 - 0.5;
    Ok(vec![
        BoundReport::new("cauchy_schwarz", meas.k as f64, meas.m, w.lhs, w.rhs, digest(cfg, &format!("samples={CHAIN_SAMPLES}"))),
        thm11_chain_report(&meas)?,
        thm11_report(&meas, g, &params, COMPACT_HEIGHT)?,
        auxlem_report(kh, g, meas.leading_exponent, meas.h_sup_weighted, &params, &meas.digest)?,
    ])
}

fn two_route(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    let phi = phi_10_1(cfg.trunc)?;
    let hvec = extract_h_mu(&phi)?;
    let quad = measure_config(cfg).quad;
    let theta = jacobi_inner_theta(&hvec, &hvec, &quad)?.value.re;
    // The direct routes use the product formula, so they also cross-check the coefficients.
    let jq = JacobiQuadrature::default();
    let direct = jacobi_inner_4d(&Phi10Product, &Phi10Product, &jq)?.value.re;
    let norms = theta_component_l2_norms_gamma01(&Phi10Product, &COSET_QUAD)?;
    let want = (4.0 * phi.index() as f64).sqrt() * norms.copies as f64;
    Ok(vec![
        BoundReport::new("two_route_inner", 10.0, 1, (theta - direct).abs() / theta, 1e-5, digest(cfg, &jq.digest())),
        BoundReport::new(
            "normalization_identity",
            10.0,
            1,
            (norms.total / theta - want).abs() / want,
            1e-5,
            digest(cfg, &format!("copies={}", norms.copies)),
        ),
    ])
}

/// S, T^{±1} and TS; images of points with 0.9 ≤ η ≤ 1.2 stay above η = ½.
fn generators() -> Vec<GroupElement> {
    vec![GroupElement::s(), GroupElement::t(1), GroupElement::t(-1), GroupElement::new(1, -1, 1, 0).expect("det 1")]
}

fn invariance(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Vec<BoundReport>, CliError> {
    let mut out = Vec::new();
    let samples = 20;
    let d = digest(cfg, &format!("samples={samples}"));

    let mut worst_disp: f64 = 0.0;
    for _ in 0..samples {
        let a = UpperHalfPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0))?;
        let b = UpperHalfPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0))?;
        let s = displacement(&a, &b);
        for g in generators() {
            let t = displacement(&g.apply(&a), &g.apply(&b));
            worst_disp = worst_disp.max((t - s).abs() / s);
        }
    }
    out.push(BoundReport::new("displacement_invariance", 0.0, 0, worst_disp, 1e-10, d.clone()));

    for &k in ONE_DIMENSIONAL_WEIGHTS.iter() {
        let f = one_dimensional_cusp_form(k)?.qseries(cfg.trunc)?;
        let opts = EvalOptions::for_series(&f);
        let mut worst_mod: f64 = 0.0;
        for _ in 0..samples {
            let tau = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..1.2))?;
            let v = f.eval(&tau, &opts)?.value;
            for g in generators() {
                let w = f.eval(&g.apply(&tau), &opts)?.value * g.cocycle(&tau).powi(-(k as i32));
                worst_mod = worst_mod.max((w - v).norm() / v.norm());
            }
        }
        out.push(BoundReport::new("modularity", k as f64, 0, worst_mod, 1e-9, d.clone()));
    }

    let phi = phi_10_1(cfg.trunc)?;
    let mut worst_jac: f64 = 0.0;
    for _ in 0..samples {
        let tau = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..1.2))?;
        let p = JacobiPoint::new(tau, Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..0.5) * tau.eta()));
        let base = phi.pet_norm(&p)?;
        let mut images: Vec<JacobiPoint> = generators()
            .iter()
            .map(|g| JacobiPoint::new(g.apply(&tau), p.z / g.cocycle(&tau)))
            .collect();
        images.push(JacobiPoint::new(tau, p.z + 1.0));
        images.push(JacobiPoint::new(tau, p.z + tau.to_complex()));
        for q in images {
            worst_jac = worst_jac.max((phi.pet_norm(&q)? - base).abs() / base);
        }
    }
    out.push(BoundReport::new("jacobi_norm_invariance", 10.0, 1, worst_jac, 1e-8, d));
    Ok(out)
}
