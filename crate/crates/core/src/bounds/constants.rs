use super::BoundCheck;
use crate::arithmetic::{jl_lhs, jl_rhs, jl_tail_integral, ln_cosh, ln_sinh, GroupData};
use crate::error::{Error, Result};
use crate::hyperbolic::UpperHalfPoint;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

fn require_k(k: f64) -> Result<()> {
    if !(k >= 5.0) || !k.is_finite() {
        return Err(Error::Precondition(format!("k must be ≥ 5, got {k}")));
    }
    Ok(())
}

fn require_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("radius must be positive, got {r}")));
    }
    Ok(())
}

/// `Γ((k−1)/2)/Γ(k/2)` through log-Gamma.
pub fn gamma_ratio(k: f64) -> Result<f64> {
    if !(k > 1.0) {
        return Err(Error::InvalidInput(format!("Gamma ratio needs k > 1, got {k}")));
    }
    Ok((ln_gamma(0.5 * (k - 1.0)) - ln_gamma(0.5 * k)).exp())
}

/// Terms of the cocompact bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop1Terms {
    /// `(k−1)/(2π)`
    pub leading: f64,
    /// `3(k−1)/π · cosh^{−(k−4)}(r/4) · (1 + sinh^{−2}(r/4))`
    pub hyperbolic: f64,
    pub total: f64,
}

pub fn prop1_terms(k: f64, r: f64) -> Result<Prop1Terms> {
    require_k(k)?;
    require_r(r)?;
    let q = 0.25 * r;
    let leading = (k - 1.0) / (2.0 * PI);
    let decay = (-(k - 4.0) * ln_cosh(q)).exp();
    let hyperbolic = 3.0 * (k - 1.0) / PI * decay * (1.0 + (-2.0 * ln_sinh(q)).exp());
    Ok(Prop1Terms { leading, hyperbolic, total: leading + hyperbolic })
}

/// `(k−1)/(2π) + 3(k−1)/(π cosh^{k−4}(r/4))·(1 + 1/sinh²(r/4))`.
pub fn prop1_rhs(k: f64, r: f64) -> Result<f64> {
    Ok(prop1_terms(k, r)?.total)
}

/// Both sides of the imported integral bound at `(k, δ, r)`.
///
/// The bound holds for δ ≥ r/2, the only case used downstream. For smaller
/// δ it holds when r is small but fails for larger r: at k = 12, δ = 0 the
/// margin turns negative near r = 2.
pub fn prop1_eqn4_check(k: f64, delta: f64, r: f64) -> Result<BoundCheck> {
    require_k(k)?;
    require_r(r)?;
    if !(delta >= 0.0) {
        return Err(Error::Precondition(format!("δ must be ≥ 0, got {delta}")));
    }
    let q = 0.25 * r;
    let inv_s2 = (-2.0 * ln_sinh(q)).exp();
    let lhs = inv_s2 * jl_tail_integral(k, delta, r)?;
    let c = ln_cosh(0.5 * delta);
    let rhs = 4.0 / (k - 2.0) * (-(k - 2.0) * c).exp() * (2.0 + inv_s2)
        + 8.0 / (k - 4.0) * (-(k - 4.0) * c).exp() * inv_s2;
    Ok(BoundCheck::new(lhs, rhs))
}

/// Configurable constants that the proofs leave implicit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Coefficient `C_par` of `(k−1)·Γ((k−1)/2)/Γ(k/2)·Im` in the cusp term.
    pub c_par: f64,
    /// Coefficient `C_ell` of `(k−1)`; `None` uses `Σ(m_j − 1)/(4π)`.
    pub c_ell: Option<f64>,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self { c_par: 2.0 / PI.sqrt(), c_ell: None }
    }
}

impl BoundParams {
    pub fn c_ell_for(&self, group: &GroupData) -> f64 {
        self.c_ell.unwrap_or_else(|| group.elliptic_excess() / (4.0 * PI))
    }

    pub fn digest(&self) -> String {
        match self.c_ell {
            Some(c) => format!("c_par={:.6};c_ell={c:.6}", self.c_par),
            None => format!("c_par={:.6};c_ell=default", self.c_par),
        }
    }
}

/// Terms of the cofinite bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop3Terms {
    pub leading: f64,
    pub hyperbolic: f64,
    /// `(k−1)/(4π)·Σ(m_j − 1)`
    pub elliptic: f64,
    /// `2(k−1)/√π · Γ((k−1)/2)/Γ(k/2) · Σ_j Im(σ_j^{−1}τ)`
    pub parabolic: f64,
    pub total: f64,
}

fn prop3_terms_with(k: f64, group: &GroupData, r: f64, heights: f64, params: &BoundParams) -> Result<Prop3Terms> {
    let p1 = prop1_terms(k, r)?;
    let elliptic = (k - 1.0) * params.c_ell_for(group);
    let parabolic = params.c_par * (k - 1.0) * gamma_ratio(k)? * heights;
    Ok(Prop3Terms {
        leading: p1.leading,
        hyperbolic: p1.hyperbolic,
        elliptic,
        parabolic,
        total: p1.leading + p1.hyperbolic + elliptic + parabolic,
    })
}

/// The cofinite bound at τ, with the group's injectivity radius, elliptic
/// orders and cusp scalings.
pub fn prop3_terms(k: f64, group: &GroupData, tau: &UpperHalfPoint) -> Result<Prop3Terms> {
    require_k(k)?;
    let heights: f64 = group.cusp_scalings.iter().map(|s| s.inverse().apply(tau).eta()).sum();
    prop3_terms_with(k, group, group.injectivity_radius, heights, &BoundParams::default())
}

pub fn prop3_rhs(k: f64, group: &GroupData, tau: &UpperHalfPoint) -> Result<f64> {
    Ok(prop3_terms(k, group, tau)?.total)
}

/// Terms are summed while `|n| ≤ N`; the rest is bounded by an integral.
const EQN5_MAX_TERMS: i64 = 1 << 20;

/// Both sides of the imported horocyclic-sum bound for the cusp at ∞.
///
/// The left side includes a rigorous bound on the omitted terms.
pub fn prop3_eqn5_check(k: f64, tau: &UpperHalfPoint, tau2: &UpperHalfPoint) -> Result<BoundCheck> {
    require_k(k)?;
    let (e1, e2) = (tau.eta(), tau2.eta());
    let dx = tau.xi() - tau2.xi();
    let h2 = (e1 + e2) * (e1 + e2);
    let ln4 = (4.0 * e1 * e2).ln();
    let term = |n: i64| {
        let u = dx - n as f64;
        (0.5 * k * (ln4 - (u * u + h2).ln())).exp()
    };
    let mut n_max = 16i64;
    let mut partial = 0.0;
    let mut done = 0i64;
    let tail = loop {
        for n in done + 1..=n_max {
            partial += term(n) + term(-n);
        }
        done = n_max;
        let a = n_max as f64 - dx.abs();
        let tail = 2.0 * (0.5 * k * ln4 + (1.0 - k) * a.ln()).exp() / (k - 1.0);
        if tail <= 1e-15 * partial || n_max >= EQN5_MAX_TERMS {
            break tail;
        }
        n_max *= 2;
    };
    let lhs = (k - 1.0) / (2.0 * PI) * (partial + tail);
    let rhs = (k - 1.0) / PI.sqrt() * gamma_ratio(k)? * (0.5 * k * ln4 - (k - 1.0) * (e1 + e2).ln()).exp();
    Ok(BoundCheck::new(lhs, rhs))
}

/// Both sides of the counting inequality with `f(ρ) = cosh^{−k}(ρ/2)`; the
/// left side is the enumerated sum plus its certified tail.
///
/// Elements within δ appear on both sides, so the comparison is decided by
/// the part beyond δ. The tail tolerance is tightened to a thousandth of
/// that part of the right side.
pub fn counting_inequality_check(
    k: f64,
    delta: f64,
    tau: &UpperHalfPoint,
    group: &GroupData,
    tail_tol: f64,
) -> Result<BoundCheck> {
    let rhs = jl_rhs(k, delta, group.injectivity_radius, group.center_order, tau, group)?;
    let tol = tail_tol.min(1e-3 * (rhs.boundary + rhs.tail));
    let lhs = jl_lhs(k, tau, group, tol)?;
    Ok(BoundCheck::new(lhs.upper(), rhs.total))
}

/// Height at which the supremum over ℍ is controlled: `max(k/(4π), √3/2)`.
pub fn boundary_height(k: f64) -> f64 {
    (k / (4.0 * PI)).max(3f64.sqrt() / 2.0)
}

/// Explicit `sup ‖B_k‖` bound for a cofinite group: the cofinite bound at
/// the top of the truncated domain of height `k/(4π)`, where the kernel
/// takes its supremum.
pub fn thm4_rhs(k: f64, group: &GroupData, params: &BoundParams) -> Result<Prop3Terms> {
    require_k(k)?;
    let heights = group.num_cusps as f64 * boundary_height(k);
    prop3_terms_with(k, group, group.injectivity_radius, heights, params)
}

/// Explicit bound for L²-normalized forms on a finite-index subgroup of a
/// cofinite group Γ₀, as the larger of two regimes: on the compact part
/// `F_Y`, the cocompact terms with `r_{Γ₀,Y}` (translations included) plus
/// the elliptic term; near the cusps, the cofinite bound with Γ₀'s radius
/// at height `max(Y, k/(4π))`.
pub fn thm6_rhs(k: f64, group: &GroupData, r_compact: f64, y: f64, params: &BoundParams) -> Result<f64> {
    require_k(k)?;
    require_r(r_compact)?;
    if !(y > 0.0) {
        return Err(Error::Precondition(format!("Y must be positive, got {y}")));
    }
    let p1 = prop1_terms(k, r_compact)?;
    let compact = p1.total + (k - 1.0) * params.c_ell_for(group);
    let heights = group.num_cusps as f64 * y.max(boundary_height(k));
    let cusp = prop3_terms_with(k, group, group.injectivity_radius, heights, params)?.total;
    Ok(compact.max(cusp))
}

/// Explicit bound on `sup_F ‖f‖²·η^{½}` for an L²-normalized form whose
/// expansion at ∞ starts at `q^ν`.
///
/// With `Y = max((k+½)/(4πν), 1)`: below height Y the pointwise bound is
/// at most the cofinite bound at Im = Y times `Y^{½}`; above Y the profile
/// `η^{k+½}e^{−4πνη}` decreases and `|f/q^ν|²` is subharmonic, so the
/// supremum is attained on `η = Y`.
pub fn auxlem_rhs(k: f64, group: &GroupData, nu: f64, params: &BoundParams) -> Result<f64> {
    require_k(k)?;
    if !(nu > 0.0) {
        return Err(Error::Precondition(format!("leading exponent must be positive, got {nu}")));
    }
    let y = ((k + 0.5) / (4.0 * PI * nu)).max(1.0);
    let heights = group.num_cusps as f64 * y;
    Ok(prop3_terms_with(k, group, group.injectivity_radius, heights, params)?.total * y.sqrt())
}

/// `c(m)` with `Σ_μ ‖θ_{μ,m}‖² ≤ 2m·η^{½} + c(m)` for η ≥ √3/2:
/// `2√(2m) + (2/√3)^{½}`.
pub fn theta_sum_constant(m: u32) -> f64 {
    2.0 * (2.0 * m as f64).sqrt() + (2.0 / 3f64.sqrt()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::modular_group;
    use crate::hyperbolic::GroupElement;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_ratio_closed_forms() {
        assert!(rel(gamma_ratio(3.0).unwrap(), 2.0 / PI.sqrt()) < 1e-13);
        assert!(rel(gamma_ratio(5.0).unwrap(), 1.0 / (1.5 * 0.5 * PI.sqrt())) < 1e-13);
        for k in [5.0f64, 10.0, 57.0, 400.0, 1e4] {
            let s = k.sqrt() * gamma_ratio(k).unwrap();
            assert!((1.0..=2.0).contains(&s));
        }
        assert!(rel(1e4f64.sqrt() * gamma_ratio(1e4).unwrap(), 2f64.sqrt()) < 0.01);
        assert!(gamma_ratio(1.0).is_err());
    }

    #[test]
    fn prop1_examples() {
        // Direct arithmetic at k = 5, r = 1.
        let (k, r) = (5.0f64, 1.0f64);
        let q = r / 4.0;
        let want = (k - 1.0) / (2.0 * PI) + 3.0 * (k - 1.0) / (PI * q.cosh().powf(k - 4.0)) * (1.0 + 1.0 / q.sinh().powi(2));
        assert!(rel(prop1_rhs(k, r).unwrap(), want) < 1e-13);
        // Large k: only the leading term survives.
        let t = prop1_terms(2000.0, 1.0).unwrap();
        assert!(t.hyperbolic < 1e-20 * t.leading);
        // Decreasing in r.
        let vals: Vec<f64> = [0.2, 0.5, 1.0, 2.0, 4.0].iter().map(|&r| prop1_rhs(12.0, r).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(prop1_rhs(4.0, 1.0).is_err());
        assert!(prop1_rhs(6.0, 0.0).is_err());
    }

    #[test]
    fn prop1_terms_monotone_in_k() {
        let ks = [5.0, 8.0, 12.0, 20.0, 40.0];
        let terms: Vec<Prop1Terms> = ks.iter().map(|&k| prop1_terms(k, 0.96).unwrap()).collect();
        assert!(terms.windows(2).all(|w| w[1].leading > w[0].leading));
        // The cosh^{−(k−4)} factor alone decreases.
        let decay: Vec<f64> = ks.iter().map(|&k| (-(k - 4.0) * ln_cosh(0.24)).exp()).collect();
        assert!(decay.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn eqn4_samples() {
        for (k, d, r) in [(5.0, 0.5, 1.0), (20.0, 0.0, 0.5)] {
            assert!(prop1_eqn4_check(k, d, r).unwrap().margin >= 0.0);
        }
        // Below δ = r/2 the bound can fail once r is large.
        assert!(prop1_eqn4_check(12.0, 0.0, 3.0).unwrap().margin < 0.0);
        let far = prop1_eqn4_check(8.0, 60.0, 1.0).unwrap();
        assert!(far.lhs < 1e-40 && far.rhs < 1e-40 && far.margin >= 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let k = rng.gen_range(5.0..40.0);
            let r = rng.gen_range(0.1..3.0);
            let d = 0.5 * r + rng.gen_range(0.0..4.0);
            let c = prop1_eqn4_check(k, d, r).unwrap();
            assert!(c.margin >= -1e-10, "k={k} d={d} r={r}: {c:?}");
        }
    }

    #[test]
    fn prop3_examples() {
        let g = GroupData::new(0, vec![], 0.8, 2, vec![]).unwrap();
        let tau = UpperHalfPoint::new(0.1, 1.3).unwrap();
        assert!(rel(prop3_rhs(9.0, &g, &tau).unwrap(), prop1_rhs(9.0, 0.8).unwrap()) < 1e-15);
        let sl2 = modular_group();
        let (k, r) = (12.0f64, sl2.injectivity_radius);
        let q = r / 4.0;
        let ratio = (ln_gamma(5.5) - ln_gamma(6.0)).exp();
        let want = 11.0 / (2.0 * PI)
            + 33.0 / (PI * q.cosh().powf(8.0)) * (1.0 + 1.0 / q.sinh().powi(2))
            + 11.0 / (4.0 * PI) * 3.0
            + 22.0 / PI.sqrt() * ratio * 1.0;
        assert!(rel(prop3_rhs(k, sl2, &UpperHalfPoint::i()).unwrap(), want) < 1e-12);
        // The cusp term is linear in Im.
        let p = |y: f64| prop3_terms(k, sl2, &UpperHalfPoint::new(0.0, y).unwrap()).unwrap().parabolic;
        assert!(rel(p(4.0), 2.0 * p(2.0)) < 1e-12);
        // Non-trivial scaling matrix: the cusp 0 of Γ₀(2) via S.
        let g2 = GroupData::new(1, vec![], 0.5, 2, vec![GroupElement::s()]).unwrap();
        let t = prop3_terms(k, &g2, &UpperHalfPoint::new(0.0, 2.0).unwrap()).unwrap();
        assert!(rel(t.parabolic, 22.0 / PI.sqrt() * ratio * 0.5) < 1e-12);
    }

    #[test]
    fn eqn5_samples() {
        let y = 12.0 / (4.0 * PI);
        let t = UpperHalfPoint::new(0.0, y).unwrap();
        assert!(prop3_eqn5_check(12.0, &t, &t).unwrap().margin >= 0.0);
        // Far up the cusp both sides grow like η and their ratio tends to ½.
        let mut prev = 0.0;
        for y in [10.0, 100.0, 1000.0] {
            let hi = UpperHalfPoint::new(0.0, y).unwrap();
            let c = prop3_eqn5_check(12.0, &hi, &hi).unwrap();
            assert!(c.margin >= 0.0 && c.lhs > prev);
            prev = c.lhs;
            assert!((c.lhs / c.rhs - 0.5).abs() < 1.0 / y);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let k = rng.gen_range(5.0..40.0);
            let a = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..5.0)).unwrap();
            let b = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..5.0)).unwrap();
            let c = prop3_eqn5_check(k, &a, &b).unwrap();
            assert!(c.margin >= -1e-10, "{k} {a} {b}: {c:?}");
        }
    }

    #[test]
    fn theorem_constants_dominate_pointwise_bound() {
        let g = modular_group();
        let p = BoundParams::default();
        for k in [12.0, 16.0, 26.0] {
            let top = thm4_rhs(k, g, &p).unwrap().total;
            let at_floor = prop3_rhs(k, g, &UpperHalfPoint::new(0.5, 3f64.sqrt() / 2.0).unwrap()).unwrap();
            assert!(top >= at_floor);
            let t6 = thm6_rhs(k, g, 0.49, 2.0, &p).unwrap();
            assert!(t6 >= top);
            assert!(auxlem_rhs(k, g, 1.0, &p).unwrap() > 0.0);
        }
        let loose = BoundParams { c_par: 10.0, c_ell: Some(1.0) };
        assert!(thm4_rhs(12.0, g, &loose).unwrap().total > thm4_rhs(12.0, g, &p).unwrap().total);
    }

    #[test]
    fn theta_constant_dominates_theta_sums() {
        use crate::thetajacobi::{theta_sum_bound_check, JacobiPoint};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 1..=8u32 {
            for _ in 0..10 {
                let eta = rng.gen_range(0.8661..20.0);
                let p = JacobiPoint::from_parts(rng.gen_range(-0.5..0.5), eta, rng.gen_range(0.0..1.0), rng.gen_range(0.0..eta))
                    .unwrap();
                let c = theta_sum_bound_check(m, &p).unwrap();
                assert!(c.lhs <= 2.0 * m as f64 * eta.sqrt() + theta_sum_constant(m) + 1e-12);
                assert!(c.rhs <= 2.0 * m as f64 * eta.sqrt() + theta_sum_constant(m) + 1e-12);
            }
        }
    }
}
