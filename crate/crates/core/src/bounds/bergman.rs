//! Diagonal of the weight-k Bergman kernel of SL₂(ℤ), as a truncated
//! Poincaré-type series with a certified tail.

use crate::arithmetic::{displacement_tail_bound, enumerate_with_cap, radius_for_tail, DEFAULT_WORK_CAP};
use crate::error::{Error, Result};
use crate::hyperbolic::{reduce_to_fundamental_domain, UpperHalfPoint};
use crate::sum::NeumaierSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BergmanConfig {
    /// Weight; an even integer ≥ 6 (odd weights vanish on SL₂(ℤ)).
    pub k: f64,
    /// Cap on candidate triples examined by the enumeration.
    pub work_cap: u64,
    /// Largest acceptable tail bound.
    pub tail_tol: f64,
}

impl BergmanConfig {
    pub fn new(k: f64, tail_tol: f64) -> Result<Self> {
        let cfg = Self { k, work_cap: DEFAULT_WORK_CAP, tail_tol };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k >= 5.0) {
            return Err(Error::Precondition(format!("k must be ≥ 5, got {}", self.k)));
        }
        if self.k.fract() != 0.0 || self.k as i64 % 2 != 0 {
            return Err(Error::Unsupported(format!(
                "trivial character needs even integral weight, got {}",
                self.k
            )));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidInput(format!("tail_tol must be positive, got {}", self.tail_tol)));
        }
        Ok(())
    }

    pub fn digest(&self) -> String {
        format!("bergman;k={};tail_tol={:e};work_cap={}", self.k, self.tail_tol, self.work_cap)
    }
}

/// `B_k(τ,τ)·η^k` with its tail certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BergmanDiag {
    pub value: f64,
    pub tail_bound: f64,
    /// Displacement up to which all terms were summed.
    pub radius: f64,
    pub terms: usize,
}

/// `(k−1)/(4π)·Σ_γ (2iη)^k·(cτ̄+d)^{−k}·(τ − γτ̄)^{−k}` over γ ∈ PSL₂(ℤ)
/// with σ(τ,γτ) ≤ R, in deterministic enumeration order.
///
/// Each term is `u^{−k}` with `u = (c|τ|² + dτ − aτ̄ − b)/(2iη)` and
/// `|u|² = σ(τ,γτ)`. The pair ±γ contributes once, through the
/// representative with c > 0, or c = 0 and d > 0. The point is first reduced
/// into the fundamental domain, which leaves the weighted diagonal unchanged.
pub fn bergman_diag_series(tau: &UpperHalfPoint, cfg: &BergmanConfig) -> Result<BergmanDiag> {
    cfg.validate()?;
    let (tau, _) = reduce_to_fundamental_domain(tau)?;
    let k = cfg.k;
    let pref = (k - 1.0) / (4.0 * PI);
    // The SL₂(ℤ) tail counts each pair twice.
    let radius = radius_for_tail(&tau, k, 2.0 * cfg.tail_tol / pref)?;
    let en = enumerate_with_cap(&tau, radius, cfg.work_cap)?;
    let z = tau.to_complex();
    let abs2 = z.norm_sqr();
    let two_i_eta = Complex64::new(0.0, 2.0 * tau.eta());
    let ki = k as i32;
    let mut re = NeumaierSum::new();
    let mut terms = 0;
    for e in &en.elements {
        let g = e.element;
        let canonical = g.c() > 0 || (g.c() == 0 && g.d() > 0);
        if !canonical {
            continue;
        }
        let (a, b, c, d) = (g.a() as f64, g.b() as f64, g.c() as f64, g.d() as f64);
        let w = c * abs2 + d * z - a * z.conj() - b;
        let u = w / two_i_eta;
        re.add(u.powi(-ki).re);
        terms += 1;
    }
    let tail_bound = 0.5 * pref * displacement_tail_bound(&tau, radius, k)?;
    if tail_bound > cfg.tail_tol {
        return Err(Error::TailBound { bound: tail_bound, tol: cfg.tail_tol });
    }
    Ok(BergmanDiag { value: pref * re.value(), tail_bound, radius, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{delta_eta, petersson_inner, ClassicalForm, PeterssonQuadrature};
    use std::sync::OnceLock;

    /// ⟨Δ,Δ⟩ by quadrature of the q-series.
    fn delta_norm() -> f64 {
        static N: OnceLock<f64> = OnceLock::new();
        *N.get_or_init(|| {
            let f = ClassicalForm::new(1, 0, 0).qseries(40).unwrap();
            petersson_inner(&f, &f, 12.0, &PeterssonQuadrature::default()).unwrap().value.re
        })
    }

    fn oracle(tau: &UpperHalfPoint) -> f64 {
        delta_eta(tau).norm_sqr() * tau.eta().powi(12) / delta_norm()
    }

    #[test]
    fn matches_delta_oracle() {
        let cfg = BergmanConfig::new(12.0, 1e-6).unwrap();
        for (x, y) in [(0.0, 1.0), (0.0, 2.0), (0.5, 1.2)] {
            let tau = UpperHalfPoint::new(x, y).unwrap();
            let b = bergman_diag_series(&tau, &cfg).unwrap();
            let want = oracle(&tau);
            assert!((b.value - want).abs() <= b.tail_bound + 1e-3 * want, "{tau}: {b:?} vs {want}");
            // Without the (2i)^k factor the series would be off by 2^k.
            assert!((b.value / 4096.0 - want).abs() > 1e-3 * want);
        }
    }

    #[test]
    fn invariant_under_group_and_positive() {
        let cfg = BergmanConfig::new(16.0, 1e-6).unwrap();
        let tau = UpperHalfPoint::new(0.2, 1.1).unwrap();
        let b = bergman_diag_series(&tau, &cfg).unwrap();
        assert!(b.value >= -b.tail_bound);
        let moved = crate::hyperbolic::GroupElement::new(2, 1, 1, 1).unwrap().apply(&tau);
        let b2 = bergman_diag_series(&moved, &cfg).unwrap();
        assert!((b.value - b2.value).abs() < 1e-9 * b.value);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(BergmanConfig::new(4.0, 1e-6).is_err());
        assert!(BergmanConfig::new(13.0, 1e-6).is_err());
        assert!(BergmanConfig::new(12.0, 0.0).is_err());
        let cfg = BergmanConfig { k: 12.0, work_cap: 10, tail_tol: 1e-12 };
        assert!(matches!(
            bergman_diag_series(&UpperHalfPoint::i(), &cfg),
            Err(Error::Truncated { .. })
        ));
    }
}
