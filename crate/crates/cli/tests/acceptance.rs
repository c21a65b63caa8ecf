//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::{Duration, Instant};
use supnorm::arithmetic::{coset_count_bruteforce, index_gamma01, index_gamma01_with_phi_m, modular_group};
use supnorm::bounds::{
    bergman_diag_series, counting_inequality_check, empirical_slope, measure_classical, measure_jacobi,
    prop1_eqn4_check, prop3_eqn5_check, prop3_report, thm11_chain_report, thm11_report, BergmanConfig, BoundParams,
    MeasureConfig,
};
use supnorm::hyperbolic::{displacement, reduce_to_fundamental_domain, GroupElement, UpperHalfPoint};
use supnorm::qseries::{
    delta_eta, one_dimensional_cusp_form, petersson_inner, EvalOptions, PeterssonQuadrature, ONE_DIMENSIONAL_WEIGHTS,
};
use supnorm::thetajacobi::{
    cauchy_schwarz_chain_check, extract_h_mu, jacobi_inner_4d, jacobi_inner_theta, phi_10_1, theta_sum_bound_check,
    JacobiFunction, JacobiPoint, JacobiQuadrature, Phi10Product,
};
use supnorm::Complex64;

type Outcome = Result<String, String>;

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, id: u32, title: &str, start: Instant, outcome: Outcome) {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {id:>2}  {title}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL  {id:>2}  {title}: {detail} [{secs:.1}s]");
            }
        }
    }
}

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

fn bergman_oracle() -> Outcome {
    let f = one_dimensional_cusp_form(12).map_err(err)?.qseries(40).map_err(err)?;
    let norm = petersson_inner(&f, &f, 12.0, &PeterssonQuadrature::default()).map_err(err)?.value.re;
    let cfg = BergmanConfig::new(12.0, 1e-8).map_err(err)?;
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for (x, y) in [(0.0, 1.0), (0.0, 2.0), (0.5, 1.2)] {
        let tau = UpperHalfPoint::new(x, y).map_err(err)?;
        let t = Instant::now();
        let b = bergman_diag_series(&tau, &cfg).map_err(err)?;
        slowest = slowest.max(t.elapsed());
        let want = delta_eta(&tau).norm_sqr() * y.powi(12) / norm;
        let allowed = b.tail_bound + 1e-3 * want;
        let diff = (b.value - want).abs();
        if !(diff <= allowed) {
            return Err(format!("τ = {tau}: series {} vs oracle {want}, allowed {allowed:e}", b.value));
        }
        worst = worst.max(diff / allowed);
    }
    ensure(
        slowest < Duration::from_secs(60),
        format!("3 points, worst |diff|/allowed = {worst:.2e}, slowest point {:.2}s", slowest.as_secs_f64()),
    )
}

fn two_route() -> Outcome {
    let phi = phi_10_1(40).map_err(err)?;
    let h = extract_h_mu(&phi).map_err(err)?;
    let t = Instant::now();
    let theta = jacobi_inner_theta(&h, &h, &PeterssonQuadrature::default()).map_err(err)?.value.re;
    let direct = jacobi_inner_4d(&Phi10Product, &Phi10Product, &JacobiQuadrature::default()).map_err(err)?.value.re;
    let rel = (theta - direct).abs() / theta;
    ensure(
        rel <= 1e-5 && t.elapsed() < Duration::from_secs(600),
        format!("theta route {theta:.10e}, 4-d {direct:.10e}, relative difference {rel:.2e}"),
    )
}

fn theta_grid() -> Outcome {
    let t = Instant::now();
    let n = 10;
    let lo = 3f64.sqrt() / 2.0;
    let mut worst = f64::INFINITY;
    for m in 1..=8u32 {
        let mut points = 0;
        for i in 0..n {
            let xi = -0.5 + (i as f64 + 0.5) / n as f64;
            let floor = (1.0 - xi * xi).sqrt().max(lo);
            for j in 0..n {
                let eta = floor + (6.0 - floor) * j as f64 / (n - 1) as f64;
                for a in 0..n {
                    for b in 0..n {
                        let p = JacobiPoint::from_parts(xi, eta, a as f64 / n as f64, eta * b as f64 / n as f64)
                            .map_err(err)?;
                        let c = theta_sum_bound_check(m, &p).map_err(err)?;
                        if !(c.margin >= 0.0) {
                            return Err(format!("m = {m} at {p:?}: {c:?}"));
                        }
                        worst = worst.min(c.margin);
                        points += 1;
                    }
                }
            }
        }
        if points != 10_000 {
            return Err(format!("grid for m = {m} has {points} points"));
        }
    }
    ensure(
        t.elapsed() < Duration::from_secs(300),
        format!("m = 1..8, 10^4 points each, smallest margin {worst:.4}"),
    )
}

fn index_lemma() -> Outcome {
    let mut rows = Vec::new();
    for m in 1..=6u64 {
        let formula = index_gamma01(m).map_err(err)?;
        let brute = coset_count_bruteforce(m).map_err(err)?;
        let alt = index_gamma01_with_phi_m(m).map_err(err)?;
        if formula != brute {
            return Err(format!("m = {m}: formula {formula}, brute force {brute}"));
        }
        rows.push(format!("{m}:{brute}(φ(m) gives {alt})"));
    }
    Ok(format!("φ(4m) formula = brute force; {}", rows.join(", ")))
}

fn imported_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = modular_group();
    let (mut w4, mut w5, mut wc) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    for _ in 0..20 {
        let (k, r) = (rng.gen_range(5.0..40.0), rng.gen_range(0.1..3.0));
        let d = 0.5 * r + rng.gen_range(0.0..4.0);
        w4 = w4.min(prop1_eqn4_check(k, d, r).map_err(err)?.margin);
        let k = rng.gen_range(5.0..40.0);
        let a = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..5.0)).map_err(err)?;
        let b = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..5.0)).map_err(err)?;
        w5 = w5.min(prop3_eqn5_check(k, &a, &b).map_err(err)?.margin);
        let k = rng.gen_range(6.0..30.0);
        let t = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.87..3.0)).map_err(err)?;
        let (tau, _) = reduce_to_fundamental_domain(&t).map_err(err)?;
        let delta = g.injectivity_radius * rng.gen_range(0.5..3.0);
        wc = wc.min(counting_inequality_check(k, delta, &tau, g, 1e-6).map_err(err)?.margin);
    }
    let min = w4.min(w5).min(wc);
    ensure(
        min >= -1e-10,
        format!("20 samples each; smallest margins: integral {w4:.3e}, horocyclic {w5:.3e}, counting {wc:.3e}"),
    )
}

fn classical_sweep(mc: &MeasureConfig) -> Result<Vec<(f64, f64, f64)>, String> {
    ONE_DIMENSIONAL_WEIGHTS
        .iter()
        .map(|&k| {
            let meas = measure_classical(k, mc).map_err(err)?;
            let r = prop3_report(k as f64, modular_group(), &meas.sup, &meas.digest).map_err(err)?;
            Ok((k as f64, r.lhs(), r.rhs()))
        })
        .collect()
}

fn prop3_sweep(rows: &[(f64, f64, f64)], elapsed: Duration) -> Outcome {
    let bad: Vec<String> = rows.iter().filter(|r| !(r.2 >= r.1)).map(|r| format!("k = {}", r.0)).collect();
    let listing: Vec<String> = rows.iter().map(|r| format!("k={}: {:.3} ≤ {:.1}", r.0, r.1, r.2)).collect();
    ensure(
        bad.is_empty() && elapsed < Duration::from_secs(900),
        format!("{}{}", listing.join(", "), if bad.is_empty() { String::new() } else { format!("; violated at {}", bad.join(", ")) }),
    )
}

fn thm11_chain(mc: &MeasureConfig) -> Outcome {
    let phi = phi_10_1(40).map_err(err)?;
    let meas = measure_jacobi(&phi, mc).map_err(err)?;
    let chain = thm11_chain_report(&meas).map_err(err)?;
    let explicit = thm11_report(&meas, modular_group(), &BoundParams::default(), 2.0).map_err(err)?;
    let hvec = meas.components.as_ref().ok_or("missing components")?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = f64::INFINITY;
    for _ in 0..50 {
        let t = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.87..4.0)).map_err(err)?;
        let (tau, _) = reduce_to_fundamental_domain(&t).map_err(err)?;
        let p = JacobiPoint::new(tau, Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..tau.eta())));
        worst = worst.min(cauchy_schwarz_chain_check(hvec, &p).map_err(err)?.margin);
    }
    ensure(
        chain.margin() >= 0.0 && explicit.margin() >= 0.0 && worst >= 0.0,
        format!(
            "sup {:.4} ≤ measured chain {:.3} ≤ explicit {:.1}; Cauchy–Schwarz smallest margin over 50 points {worst:.2e}",
            meas.sup.value,
            chain.rhs(),
            explicit.rhs()
        ),
    )
}

fn slope(rows: &[(f64, f64, f64)]) -> Outcome {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
    let s = empirical_slope(&pts).map_err(err)?;
    ensure(s <= 1.7, format!("log-log slope {s:.4} (threshold 1.7)"))
}

fn generators() -> [GroupElement; 4] {
    [
        GroupElement::s(),
        GroupElement::t(1),
        GroupElement::t(-1),
        GroupElement::new(1, -1, 1, 0).expect("det 1"),
    ]
}

fn invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst_mod: f64 = 0.0;
    for &k in ONE_DIMENSIONAL_WEIGHTS.iter() {
        let f = one_dimensional_cusp_form(k).map_err(err)?.qseries(40).map_err(err)?;
        let opts = EvalOptions::for_series(&f);
        for _ in 0..25 {
            let tau = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..1.2)).map_err(err)?;
            let v = f.eval(&tau, &opts).map_err(err)?.value;
            for g in generators() {
                let w = f.eval(&g.apply(&tau), &opts).map_err(err)?.value * g.cocycle(&tau).powi(-(k as i32));
                worst_mod = worst_mod.max((w - v).norm() / v.norm());
            }
        }
    }
    let phi = phi_10_1(40).map_err(err)?;
    let mut worst_jac: f64 = 0.0;
    for _ in 0..25 {
        let tau = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.9..1.2)).map_err(err)?;
        let p = JacobiPoint::new(tau, Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..0.5) * tau.eta()));
        let base = phi.pet_norm(&p).map_err(err)?;
        let mut images: Vec<JacobiPoint> =
            generators().iter().map(|g| JacobiPoint::new(g.apply(&tau), p.z / g.cocycle(&tau))).collect();
        images.push(JacobiPoint::new(tau, p.z + 1.0));
        images.push(JacobiPoint::new(tau, p.z + tau.to_complex()));
        for q in images {
            worst_jac = worst_jac.max((phi.pet_norm(&q).map_err(err)? - base).abs() / base);
        }
    }
    let mut worst_disp: f64 = 0.0;
    for _ in 0..100 {
        let a = UpperHalfPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..4.0)).map_err(err)?;
        let b = UpperHalfPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.1..4.0)).map_err(err)?;
        let s = displacement(&a, &b);
        for g in generators() {
            worst_disp = worst_disp.max((displacement(&g.apply(&a), &g.apply(&b)) - s).abs() / s);
        }
    }
    ensure(
        worst_mod <= 1e-9 && worst_jac <= 1e-8 && worst_disp <= 1e-10,
        format!("modularity {worst_mod:.1e} (≤1e-9), Jacobi norm {worst_jac:.1e} (≤1e-8), displacement {worst_disp:.1e} (≤1e-10)"),
    )
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("supnorm-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let mut outputs = Vec::new();
    for run in 0..2 {
        let path = dir.join(format!("verify-{run}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_supnorm"))
            .args(["verify", "--tol", "1e-8", "--seed", "7", "--output"])
            .arg(&path)
            .status()
            .map_err(err)?;
        if !status.success() {
            return Err(format!("verify exited with {status}"));
        }
        outputs.push(std::fs::read(&path).map_err(err)?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    let rows = outputs[0].iter().filter(|&&b| b == b'\n').count().saturating_sub(1);
    ensure(outputs[0] == outputs[1], format!("two runs of verify --seed 7: {rows} rows, byte-identical = {}", outputs[0] == outputs[1]))
}

fn main() {
    let mut report = Report { failures: 0 };
    let mc = MeasureConfig::default();

    let t = Instant::now();
    report.record(1, "Bergman-series oracle", t, bergman_oracle());
    let t = Instant::now();
    report.record(2, "Two-route Petersson identity", t, two_route());
    let t = Instant::now();
    report.record(3, "Theta-sum bound on grids", t, theta_grid());
    let t = Instant::now();
    report.record(4, "Index lemma", t, index_lemma());
    let t = Instant::now();
    report.record(5, "Counting inequality and imported bounds", t, imported_bounds());
    let t = Instant::now();
    let sweep = classical_sweep(&mc);
    let sweep_time = t.elapsed();
    report.record(6, "Cofinite bound dominates measurement", t, sweep.clone().and_then(|r| prop3_sweep(&r, sweep_time)));
    let t = Instant::now();
    report.record(7, "Jacobi chain", t, thm11_chain(&mc));
    let t = Instant::now();
    report.record(8, "Empirical scaling", t, sweep.and_then(|r| slope(&r)));
    let t = Instant::now();
    report.record(9, "Invariance suites", t, invariance());
    let t = Instant::now();
    report.record(10, "Determinism of verify", t, determinism());

    println!("acceptance: {} of 10 criteria passed", 10 - report.failures);
    if report.failures > 0 {
        std::process::exit(1);
    }
}
