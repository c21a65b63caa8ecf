use super::coeffs::{JacobiFormCoeffs, DISCRIMINANT_TOL};
use super::theta::{theta_eval_scaled, JacobiPoint, THETA_TOL};
use super::JacobiFunction;
use crate::error::{Error, Result};
use crate::hyperbolic::UpperHalfPoint;
use crate::qseries::{EvalOptions, QSeries};
use crate::sum::ComplexSum;
use num_complex::Complex64;

/// The components `h_μ`, μ = 0..2m−1, of a theta decomposition
/// `φ = Σ h_μ θ_{μ,m}`, each a q-series with denominator 4m.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaComponentVector {
    m: u32,
    components: Vec<QSeries>,
}

impl ThetaComponentVector {
    pub fn new(m: u32, components: Vec<QSeries>) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidInput("index must be ≥ 1".into()));
        }
        if components.len() != 2 * m as usize {
            return Err(Error::InvalidInput(format!(
                "index {m} needs {} components, got {}",
                2 * m,
                components.len()
            )));
        }
        let w = components[0].weight();
        for h in &components {
            if h.denom() != 4 * m {
                return Err(Error::InvalidInput(format!("component denominator {} ≠ 4m = {}", h.denom(), 4 * m)));
            }
            if h.weight() != w {
                return Err(Error::InvalidInput("components have different weights".into()));
            }
            if h.terms().any(|(n, _)| n <= 0) {
                return Err(Error::InvalidInput("component exponents must be positive".into()));
            }
        }
        Ok(Self { m, components })
    }

    pub fn zero(m: u32, weight: f64, trunc: i64) -> Result<Self> {
        let c = (0..2 * m)
            .map(|_| QSeries::zero(4 * m, trunc, weight, 4 * m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, c)
    }

    pub fn index(&self) -> u32 {
        self.m
    }

    /// Weight of the components, `k − ½`.
    pub fn component_weight(&self) -> f64 {
        self.components[0].weight()
    }

    /// Weight `k` of the assembled Jacobi form.
    pub fn jacobi_weight(&self) -> f64 {
        self.component_weight() + 0.5
    }

    pub fn components(&self) -> &[QSeries] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(QSeries::is_zero)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { m: self.m, components: self.components.iter().map(|h| h.scale(s)).collect() }
    }

    /// Certify every truncation at the lowest point of the fundamental domain.
    pub fn certify(&self) -> Result<()> {
        let floor = UpperHalfPoint::new(0.5, 3f64.sqrt() / 2.0)?;
        for h in &self.components {
            h.eval(&floor, &EvalOptions::for_series(h))?;
        }
        Ok(())
    }

    /// `h_μ(τ)` for all μ.
    pub fn values(&self, tau: &UpperHalfPoint) -> Vec<Complex64> {
        self.components.iter().map(|h| h.partial_sum(tau)).collect()
    }

    /// `Σ_μ |h_μ(τ)|² η^{k−½}`.
    pub fn aggregate_norm(&self, tau: &UpperHalfPoint) -> f64 {
        let w = tau.eta().powf(self.component_weight());
        self.values(tau).iter().map(|v| v.norm_sqr()).sum::<f64>() * w
    }
}

/// The representative of `−μ mod 2m` with the smallest absolute value.
pub(crate) fn minimal_r(mu: u32, m: u32) -> i64 {
    let m2 = 2 * m as i64;
    let r = (-(mu as i64)).rem_euclid(m2);
    if r > m as i64 {
        r - m2
    } else {
        r
    }
}

/// Sort `c(n,r)` by class: `h_μ` collects `c(n,r)` with `r ≡ −μ mod 2m` at
/// exponent `(4mn − r²)/4m`, matching `θ_{μ,m}`'s ζ-exponents `2mn − μ`.
///
/// Stored coefficients landing on the same exponent must agree; absent
/// partners are not treated as zeros. Component μ is truncated where its smallest-|r| representative leaves
/// the stored range.
pub fn extract_h_mu(phi: &JacobiFormCoeffs) -> Result<ThetaComponentVector> {
    let m = phi.index();
    let m2 = 2 * m as i64;
    let weight = phi.weight() as f64 - 0.5;
    let mut comps = (0..2 * m)
        .map(|mu| {
            let r0 = minimal_r(mu, m);
            let trunc = 4 * m as i64 * phi.trunc_n() - r0 * r0 + 1;
            QSeries::zero(4 * m, trunc, weight, 4 * m)
        })
        .collect::<Result<Vec<_>>>()?;
    for ((n, r), c) in phi.terms() {
        let mu = (-r).rem_euclid(m2) as usize;
        let d = phi.discriminant(n, r);
        let h = &mut comps[mu];
        if d >= h.trunc_numerator() {
            continue;
        }
        let prev = h.coeff(d);
        if prev == Complex64::new(0.0, 0.0) {
            h.add_term(d, c)?;
        } else if (prev - c).norm() > DISCRIMINANT_TOL * c.norm() {
            return Err(Error::Inconsistent(format!("discriminant {d}: {prev} vs {c}")));
        }
    }
    ThetaComponentVector::new(m, comps)
}

/// `Σ_μ h_μ(τ) θ_{μ,m}(τ,z) · e^{−2πm y²/η}`.
pub fn assemble_jacobi_scaled(hvec: &ThetaComponentVector, p: &JacobiPoint) -> Result<Complex64> {
    let mut acc = ComplexSum::new();
    for (mu, h) in hvec.components.iter().enumerate() {
        if h.is_zero() {
            continue;
        }
        let th = theta_eval_scaled(mu as u32, hvec.m, p, THETA_TOL)?;
        acc.add(h.partial_sum(&p.tau) * th.value);
    }
    Ok(acc.value())
}

/// `Σ_μ h_μ(τ) θ_{μ,m}(τ,z)`.
pub fn assemble_jacobi(hvec: &ThetaComponentVector, p: &JacobiPoint) -> Result<Complex64> {
    Ok(assemble_jacobi_scaled(hvec, p)? * p.gaussian_exponent(hvec.m as f64).exp())
}

impl JacobiFunction for ThetaComponentVector {
    fn weight(&self) -> f64 {
        self.jacobi_weight()
    }
    fn index(&self) -> u32 {
        self.m
    }
    fn eval_scaled(&self, p: &JacobiPoint) -> Result<Complex64> {
        assemble_jacobi_scaled(self, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thetajacobi::coeffs::phi_10_1;
    use crate::thetajacobi::theta::theta_eval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_form_gives_zero_vector() {
        let phi = JacobiFormCoeffs::new(10, 2, 6).unwrap();
        let h = extract_h_mu(&phi).unwrap();
        assert!(h.is_zero());
        assert_eq!(h.components().len(), 4);
        let p = JacobiPoint::from_parts(0.0, 1.0, 0.3, 0.2).unwrap();
        assert_eq!(assemble_jacobi(&h, &p).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn single_coefficient_sorts_into_h1() {
        let mut phi = JacobiFormCoeffs::new(10, 1, 1).unwrap();
        phi.insert(1, 1, Complex64::new(1.0, 0.0)).unwrap();
        let h = extract_h_mu(&phi).unwrap();
        assert!(h.components()[0].is_zero());
        let terms: Vec<_> = h.components()[1].terms().collect();
        assert_eq!(terms, vec![(3, Complex64::new(1.0, 0.0))]);
        assert_eq!(h.components()[1].denom(), 4);
        assert_eq!(h.component_weight(), 9.5);
    }

    #[test]
    fn single_component_assembles_to_term_times_theta() {
        let mut h0 = QSeries::zero(8, 40, 9.5, 8).unwrap();
        h0.add_term(7, Complex64::new(2.0, -1.0)).unwrap();
        let mut comps = vec![h0.clone()];
        comps.extend((1..4).map(|_| QSeries::zero(8, 40, 9.5, 8).unwrap()));
        let h = ThetaComponentVector::new(2, comps).unwrap();
        let p = JacobiPoint::from_parts(0.2, 1.1, 0.4, 0.3).unwrap();
        let want = h0.partial_sum(&p.tau) * theta_eval(0, 2, &p, 1e-20).unwrap().value;
        assert!((assemble_jacobi(&h, &p).unwrap() - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn phi_10_1_round_trip() {
        let phi = phi_10_1(30).unwrap();
        let h = extract_h_mu(&phi).unwrap();
        h.certify().unwrap();
        assert_eq!(h.components()[1].leading_numerator(), Some(3));
        assert_eq!(h.components()[0].leading_numerator(), Some(4));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let eta = rng.gen_range(0.87..3.0);
            let p = JacobiPoint::from_parts(rng.gen_range(-0.5..0.5), eta, rng.gen_range(0.0..1.0), rng.gen_range(0.0..eta))
                .unwrap();
            let a = assemble_jacobi_scaled(&h, &p).unwrap();
            let b = phi.eval_scaled(&p);
            assert!((a - b).norm() <= 1e-10 * b.norm().max(1e-300), "{a} vs {b}");
        }
    }

    #[test]
    fn aggregate_is_modular_invariant() {
        let h = extract_h_mu(&phi_10_1(40).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let tau = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(1.0..1.6)).unwrap();
            let a = h.aggregate_norm(&tau);
            let s = UpperHalfPoint::from_complex(-1.0 / tau.to_complex()).unwrap();
            assert!((h.aggregate_norm(&s) - a).abs() < 1e-9 * a);
            assert!((h.aggregate_norm(&tau.translate(1.0)) - a).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn rejects_malformed_vectors() {
        assert!(ThetaComponentVector::new(1, vec![QSeries::zero(4, 5, 9.5, 4).unwrap()]).is_err());
        let bad = vec![QSeries::zero(3, 5, 9.5, 4).unwrap(), QSeries::zero(3, 5, 9.5, 4).unwrap()];
        assert!(ThetaComponentVector::new(1, bad).is_err());
    }

    #[test]
    fn minimal_representatives() {
        assert_eq!(minimal_r(0, 1), 0);
        assert_eq!(minimal_r(1, 1), 1);
        assert_eq!(minimal_r(1, 3), -1);
        assert_eq!(minimal_r(3, 3), 3);
        assert_eq!(minimal_r(5, 3), 1);
    }
}
