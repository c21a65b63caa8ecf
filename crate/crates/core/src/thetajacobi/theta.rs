use crate::bounds::BoundCheck;
use crate::error::{Error, Result};
use crate::hyperbolic::UpperHalfPoint;
use crate::sum::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point (τ, z) of ℍ×ℂ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiPoint {
    pub tau: UpperHalfPoint,
    pub z: Complex64,
}

impl JacobiPoint {
    pub fn new(tau: UpperHalfPoint, z: Complex64) -> Self {
        Self { tau, z }
    }

    pub fn from_parts(xi: f64, eta: f64, x: f64, y: f64) -> Result<Self> {
        Ok(Self { tau: UpperHalfPoint::new(xi, eta)?, z: Complex64::new(x, y) })
    }

    pub fn x(&self) -> f64 {
        self.z.re
    }

    pub fn y(&self) -> f64 {
        self.z.im
    }

    /// `e^{−2πm y²/η}`-exponent: `2πm y²/η`.
    pub fn gaussian_exponent(&self, m: f64) -> f64 {
        2.0 * PI * m * self.z.im * self.z.im / self.tau.eta()
    }
}

/// A theta value with a bound on the dropped terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    pub tail: f64,
    pub terms: usize,
}

/// Largest number of terms on each side of the Gaussian peak.
pub const MAX_THETA_TERMS: i64 = 1_000_000;

/// Gaussian-centred theta sum shared by θ_{μ,m} and the odd theta function.
///
/// Terms are `exp(πi·s·τ·t² + 2πi·z·s·t)` with `t = n + offset`, scaled by
/// `e^{−π s y²/η}`; the scaled modulus of a term is `e^{−π s η (t + y/η)²}`.
/// `sign(n)` multiplies each term. Returns the scaled sum and tail bound.
pub(crate) fn scaled_gaussian_series<S>(
    s: f64,
    offset: f64,
    tau: &UpperHalfPoint,
    z: Complex64,
    tol: f64,
    sign: S,
) -> Result<ThetaValue>
where
    S: Fn(i64) -> f64,
{
    let (xi, eta) = (tau.xi(), tau.eta());
    let (x, y) = (z.re, z.im);
    let a = PI * s * eta;
    // Half-width W with 2e^{−aW²}/(1 − e^{−2aW}) ≤ tol.
    let mut w = ((-(tol / 4.0).ln()) / a).sqrt().max(1.0);
    while 2.0 * (-a * w * w).exp() / (1.0 - (-2.0 * a * w).exp()) > tol {
        w *= 1.1;
    }
    let center = -y / eta - offset;
    let lo = (center - w).ceil() as i64;
    let hi = (center + w).floor() as i64;
    if hi - lo > 2 * MAX_THETA_TERMS {
        return Err(Error::Truncated { radius: w });
    }
    let mut acc = ComplexSum::new();
    for n in lo..=hi {
        let t = n as f64 + offset;
        let u = t + y / eta;
        let re = -a * u * u;
        let im = PI * s * xi * t * t + 2.0 * PI * s * x * t;
        acc.add(Complex64::from_polar(re.exp(), im) * sign(n));
    }
    let tail = 2.0 * (-a * w * w).exp() / (1.0 - (-2.0 * a * w).exp());
    Ok(ThetaValue { value: acc.value(), tail, terms: (hi - lo + 1).max(0) as usize })
}

fn check_mu(mu: u32, m: u32) -> Result<()> {
    if m < 1 {
        return Err(Error::InvalidInput("index m must be ≥ 1".into()));
    }
    if mu >= 2 * m {
        return Err(Error::InvalidInput(format!("μ = {mu} is outside 0..{}", 2 * m)));
    }
    Ok(())
}

/// `θ_{μ,m}(τ,z)·e^{−2πm y²/η}`, the tail bound relative to the same scale.
pub fn theta_eval_scaled(mu: u32, m: u32, p: &JacobiPoint, tol: f64) -> Result<ThetaValue> {
    check_mu(mu, m)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    // exp(2πimτt² + 2πiz·2mt) with t = n − μ/2m, i.e. s = 2m.
    scaled_gaussian_series(2.0 * m as f64, -(mu as f64) / (2.0 * m as f64), &p.tau, p.z, tol, |_| 1.0)
}

/// `θ_{μ,m}(τ,z) = Σ_n exp(2πimτ(n − μ/2m)² + 2πiz(2mn − μ))`.
///
/// The tail bound is `tol` measured against the Gaussian peak scale
/// `e^{2πm y²/η}` of the terms.
pub fn theta_eval(mu: u32, m: u32, p: &JacobiPoint, tol: f64) -> Result<ThetaValue> {
    let s = theta_eval_scaled(mu, m, p, tol)?;
    let g = p.gaussian_exponent(m as f64).exp();
    Ok(ThetaValue { value: s.value * g, tail: s.tail * g, terms: s.terms })
}

/// Default tolerance for theta sums.
pub const THETA_TOL: f64 = 1e-17;

/// Squared norm `|θ_{μ,m}|²·η^{½}·e^{−4πm y²/η}`.
pub fn theta_pet_norm(mu: u32, m: u32, p: &JacobiPoint) -> Result<f64> {
    Ok(theta_eval_scaled(mu, m, p, THETA_TOL)?.value.norm_sqr() * p.tau.eta().sqrt())
}

/// `Σ_μ ‖θ_{μ,m}‖²` against `2m·η^{½}·(1 + 1/√(2mη))²`.
pub fn theta_sum_bound_check(m: u32, p: &JacobiPoint) -> Result<BoundCheck> {
    let mut lhs = 0.0;
    for mu in 0..2 * m {
        lhs += theta_pet_norm(mu, m, p)?;
    }
    let eta = p.tau.eta();
    let rhs = 2.0 * m as f64 * eta.sqrt() * (1.0 + 1.0 / (2.0 * m as f64 * eta).sqrt()).powi(2);
    Ok(BoundCheck::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn jp(xi: f64, eta: f64, x: f64, y: f64) -> JacobiPoint {
        JacobiPoint::from_parts(xi, eta, x, y).unwrap()
    }

    #[test]
    fn classical_value_at_i() {
        let p = jp(0.0, 1.0, 0.0, 0.0);
        let v = theta_eval(0, 1, &p, 1e-17).unwrap();
        let direct: f64 = (-30i64..=30).map(|n| (-2.0 * PI * (n * n) as f64).exp()).sum();
        assert!((v.value.re - direct).abs() < 1e-15);
        let v2 = theta_eval(0, 1, &p, 1e-30).unwrap();
        assert!((v.value - v2.value).norm() < 1e-15);
    }

    #[test]
    fn mu_shift_identity() {
        for &(m, mu) in &[(1u32, 1u32), (3, 2), (4, 5)] {
            for p in [jp(0.2, 0.9, 0.3, 0.4), jp(-0.4, 1.6, 0.7, -0.5)] {
                let lhs = theta_eval(mu, m, &p, 1e-20).unwrap().value;
                let shift = p.tau.to_complex() * (mu as f64 / (2.0 * m as f64));
                let q = JacobiPoint::new(p.tau, p.z - shift);
                let factor = (Complex64::new(0.0, PI) * (mu * mu) as f64 * p.tau.to_complex() / (2.0 * m as f64)
                    - Complex64::new(0.0, 2.0 * PI) * mu as f64 * p.z)
                    .exp();
                let rhs = theta_eval(0, m, &q, 1e-20).unwrap().value * factor;
                assert!((lhs - rhs).norm() < 1e-12 * lhs.norm());
            }
        }
    }

    #[test]
    fn z_translation_by_one() {
        let p = jp(0.1, 1.2, 0.3, 0.2);
        let q = JacobiPoint::new(p.tau, p.z + 1.0);
        for mu in 0..6 {
            let a = theta_eval(mu, 3, &p, 1e-20).unwrap().value;
            let b = theta_eval(mu, 3, &q, 1e-20).unwrap().value;
            let phase = Complex64::from_polar(1.0, -2.0 * PI * mu as f64);
            assert!((b - phase * a).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn norm_closed_form() {
        let (m, mu) = (2u32, 3u32);
        let p = jp(0.3, 1.1, 0.2, 0.7);
        let lhs = theta_pet_norm(mu, m, &p).unwrap();
        let shift = p.tau.to_complex() * (mu as f64 / (2.0 * m as f64));
        let q = JacobiPoint::new(p.tau, p.z - shift);
        let t0 = theta_eval(0, m, &q, 1e-20).unwrap().value;
        let eta = p.tau.eta();
        let g = (-4.0 * PI * m as f64 * (p.y() - mu as f64 * eta / (2.0 * m as f64)).powi(2) / eta).exp();
        let rhs = t0.norm_sqr() * eta.sqrt() * g;
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn single_term_gaussian_bound_on_grid() {
        for m in 1..=4u32 {
            for i in 0..6 {
                for j in 0..6 {
                    let p = jp(-0.5 + 0.2 * i as f64, 0.6 + 0.7 * j as f64, 0.37, 0.3 * j as f64);
                    for mu in 0..2 * m {
                        let n = theta_pet_norm(mu, m, &p).unwrap().sqrt();
                        let eta = p.tau.eta();
                        let b = (1.0 + 1.0 / (2.0 * m as f64 * eta).sqrt()) * eta.powf(0.25);
                        assert!(n <= b * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn bound_examples() {
        assert!(theta_sum_bound_check(1, &jp(0.0, 1.0, 0.0, 0.0)).unwrap().margin >= 0.0);
        assert!(theta_sum_bound_check(4, &jp(0.3, 0.9, 0.2, 0.4)).unwrap().margin >= 0.0);
        // At y = 0 only the μ = 0 peak survives as η grows, so lhs/η^{½} → 1
        // while lhs/(2m·η^{½}) stays below 1/(2m)·(1 + o(1)).
        for m in [1u32, 3] {
            let mut prev = f64::INFINITY;
            for eta in [10.0, 100.0] {
                let c = theta_sum_bound_check(m, &jp(0.1, eta, 0.3, 0.0)).unwrap();
                assert!(c.margin > 0.0);
                let ratio = c.lhs / eta.sqrt();
                assert!(ratio >= 1.0 && ratio < prev);
                prev = ratio;
            }
            assert!(prev - 1.0 < 1e-12);
        }
    }

    #[test]
    fn tail_certificate_is_honest() {
        let p = jp(0.2, 0.7, 0.1, 0.5);
        let coarse = theta_eval_scaled(1, 2, &p, 1e-6).unwrap();
        let fine = theta_eval_scaled(1, 2, &p, 1e-20).unwrap();
        assert!((coarse.value - fine.value).norm() <= coarse.tail);
    }

    proptest! {
        #[test]
        fn lattice_invariance_of_norm_sum(m in 1u32..=8, xi in -0.5f64..0.5, eta in 0.7f64..3.0, x in 0.0f64..1.0, yf in -1.0f64..1.0) {
            let p = jp(xi, eta, x, yf * eta);
            let sum = |q: &JacobiPoint| (0..2 * m).map(|mu| theta_pet_norm(mu, m, q).unwrap()).sum::<f64>();
            let base = sum(&p);
            let moved = [
                JacobiPoint::new(p.tau, p.z + 1.0),
                JacobiPoint::new(p.tau, p.z + p.tau.to_complex()),
                JacobiPoint::new(p.tau.translate(1.0), p.z),
            ];
            for q in moved {
                prop_assert!((sum(&q) - base).abs() <= 1e-10 * base);
            }
        }

        #[test]
        fn halving_tol_stays_within_certificate(mu in 0u32..4, xi in -0.5f64..0.5, eta in 0.5f64..3.0, y in -1.0f64..1.0) {
            let p = jp(xi, eta, 0.3, y);
            let a = theta_eval_scaled(mu, 2, &p, 1e-8).unwrap();
            let b = theta_eval_scaled(mu, 2, &p, 5e-9).unwrap();
            prop_assert!((a.value - b.value).norm() <= a.tail + 1e-15);
        }
    }
}
