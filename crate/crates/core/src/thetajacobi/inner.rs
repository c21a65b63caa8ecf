use super::decomposition::{minimal_r, ThetaComponentVector};
use super::theta::JacobiPoint;
use super::JacobiFunction;
use crate::arithmetic::{fundamental_domain_copies, is_member_gamma01};
use crate::error::{Error, Result};
use crate::hyperbolic::{GroupElement, UpperHalfPoint};
use crate::qseries::{InnerProduct, PeterssonQuadrature, QuadRule};
use crate::sum::{ComplexSum, NeumaierSum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::PI;

/// Quadrature on `F × E_τ`: the τ-rule of a [`PeterssonQuadrature`] and a
/// periodic trapezoid grid on the cell `x ∈ [0,1]`, `y ∈ [0,η]`.
///
/// After integrating over x the integrand is η-periodic in y, so the
/// trapezoid rule converges spectrally in both cell directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiQuadrature {
    pub tau: PeterssonQuadrature,
    pub n_x: usize,
    pub n_y: usize,
}

impl Default for JacobiQuadrature {
    fn default() -> Self {
        Self {
            tau: PeterssonQuadrature { y_max: 12.0, n_xi: 10, n_eta: 10, rule: QuadRule::GaussLegendre(8), tol: 1e-6 },
            n_x: 32,
            n_y: 32,
        }
    }
}

impl JacobiQuadrature {
    pub fn validate(&self) -> Result<()> {
        self.tau.validate()?;
        if self.n_x < 4 || self.n_y < 4 {
            return Err(Error::InvalidInput("cell grid needs at least 4 nodes per direction".into()));
        }
        Ok(())
    }

    pub fn halved(&self) -> Self {
        Self { tau: self.tau.halved(), n_x: self.n_x / 2, n_y: self.n_y / 2 }
    }

    pub fn digest(&self) -> String {
        format!("{};cell={}x{}", self.tau.digest(), self.n_x, self.n_y)
    }

    fn integrate<F1, F2>(&self, f: &F1, g: &F2) -> Result<Complex64>
    where
        F1: JacobiFunction + ?Sized,
        F2: JacobiFunction + ?Sized,
    {
        let k = f.weight();
        let nodes = self.tau.nodes();
        let parts: Vec<Result<Complex64>> = nodes
            .par_iter()
            .map(|(tau, w)| {
                let eta = tau.eta();
                let mut acc = ComplexSum::new();
                for i in 0..self.n_x {
                    let x = (i as f64 + 0.5) / self.n_x as f64;
                    for j in 0..self.n_y {
                        let y = (j as f64 + 0.5) * eta / self.n_y as f64;
                        let p = JacobiPoint::new(*tau, Complex64::new(x, y));
                        acc.add(f.eval_scaled(&p)? * g.eval_scaled(&p)?.conj());
                    }
                }
                let cell = eta / (self.n_x * self.n_y) as f64;
                // dxdy dξdη/η³ = (dxdy/η)·(dξdη/η²)
                Ok(acc.value() * (cell * eta.powf(k) / eta * w))
            })
            .collect();
        let mut total = ComplexSum::new();
        for p in parts {
            total.add(p?);
        }
        Ok(total.value())
    }
}

fn check_compatible<F1, F2>(f: &F1, g: &F2) -> Result<()>
where
    F1: JacobiFunction + ?Sized,
    F2: JacobiFunction + ?Sized,
{
    if f.weight() != g.weight() || f.index() != g.index() {
        return Err(Error::InvalidInput(format!(
            "weight/index mismatch: ({}, {}) vs ({}, {})",
            f.weight(),
            f.index(),
            g.weight(),
            g.index()
        )));
    }
    Ok(())
}

/// `⟨φ₁, φ₂⟩ = ∫_F ∫_{E_τ} φ₁φ̄₂ η^k e^{−4πm y²/η} dxdy dξdη/η³` by 4-d
/// quadrature, with a half-resolution error estimate.
pub fn jacobi_inner_4d<F1, F2>(f: &F1, g: &F2, quad: &JacobiQuadrature) -> Result<InnerProduct>
where
    F1: JacobiFunction + ?Sized,
    F2: JacobiFunction + ?Sized,
{
    check_compatible(f, g)?;
    quad.validate()?;
    let value = quad.integrate(f, g)?;
    let coarse = quad.halved().integrate(f, g)?;
    let error_estimate = (value - coarse).norm();
    if error_estimate > quad.tau.tol * value.norm() {
        return Err(Error::Accuracy { estimate: error_estimate, tol: quad.tau.tol * value.norm() });
    }
    Ok(InnerProduct { value, error_estimate })
}

/// `(4m)^{−½} ∫_F Σ_μ h_{μ,1} h̄_{μ,2} η^{k−½} dξdη/η²`.
pub fn jacobi_inner_theta(
    h1: &ThetaComponentVector,
    h2: &ThetaComponentVector,
    quad: &PeterssonQuadrature,
) -> Result<InnerProduct> {
    if h1.index() != h2.index() || h1.component_weight() != h2.component_weight() {
        return Err(Error::InvalidInput("component vectors differ in index or weight".into()));
    }
    h1.certify()?;
    h2.certify()?;
    let w = h1.component_weight();
    let norm = 1.0 / (4.0 * h1.index() as f64).sqrt();
    crate::qseries::integrate_with_estimate(quad, |tau| {
        let (a, b) = (h1.values(tau), h2.values(tau));
        let s: Complex64 = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
        s * tau.eta().powf(w) * norm
    })
}

/// Right coset representatives of `±Γ₀,₁(4m)` in SL₂(ℤ), found by a
/// breadth-first walk on the generators S and T, so the entries stay small.
pub fn gamma01_coset_representatives(m: u32) -> Result<Vec<GroupElement>> {
    if m < 1 {
        return Err(Error::InvalidInput("index must be ≥ 1".into()));
    }
    let n = 4 * m as i64;
    let expected = fundamental_domain_copies(m as u64)? as usize;
    let same_coset = |a: &GroupElement, b: &GroupElement| -> Result<bool> {
        let q = a.mul(&b.inverse())?;
        Ok(is_member_gamma01(&q, n) || is_member_gamma01(&q.neg(), n))
    };
    let gens = [GroupElement::s(), GroupElement::t(1), GroupElement::t(-1)];
    let mut reps = vec![GroupElement::identity()];
    let mut queue = VecDeque::from([GroupElement::identity()]);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let h = g.mul(s)?;
            let mut known = false;
            for r in &reps {
                if same_coset(&h, r)? {
                    known = true;
                    break;
                }
            }
            if !known {
                reps.push(h);
                queue.push_back(h);
            }
        }
        if reps.len() > expected {
            return Err(Error::Inconsistent(format!("found more than {expected} cosets")));
        }
    }
    if reps.len() != expected {
        return Err(Error::Inconsistent(format!("found {} cosets, expected {expected}", reps.len())));
    }
    Ok(reps)
}

/// Per-component `L²(Γ₀,₁(4m)\ℍ)` norms of the theta components of φ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentNorms {
    /// `‖h_μ‖²` for μ = 0..2m−1.
    pub norms: Vec<f64>,
    pub total: f64,
    /// Number of translates of F tiling the quotient.
    pub copies: usize,
}

/// `h_μ(γτ)` for all μ, read off the x-Fourier coefficients of φ(γτ, x)
/// on the real line. φ(γτ, ·) is obtained from φ(τ, ·) by the Jacobi
/// transformation law, so only evaluations with τ in F are needed.
fn components_at_image<F: JacobiFunction + ?Sized>(
    phi: &F,
    g: &GroupElement,
    tau: &UpperHalfPoint,
) -> Result<(Vec<Complex64>, UpperHalfPoint)> {
    let m = phi.index();
    let k = phi.weight();
    let image = g.apply(tau);
    let j = g.cocycle(tau);
    let (c, d) = (g.c() as f64, g.d() as f64);
    let mf = m as f64;
    // Aliasing partners r ± M of |r| ≤ m must be below e^{−50}.
    let need = mf + (mf * mf + 4.0 * mf * 50.0 / (2.0 * PI * image.eta())).sqrt();
    let m2 = 2 * m as usize;
    let n_samples = (((need.ceil() as usize).max(8) + m2 - 1) / m2) * m2;
    let jk = j.powf(k);
    let mut samples = Vec::with_capacity(n_samples);
    for s in 0..n_samples {
        let x = s as f64 / n_samples as f64;
        let p = JacobiPoint::new(*tau, j * x);
        let phase = Complex64::from_polar(1.0, 2.0 * PI * mf * c * x * x * (c * tau.xi() + d));
        samples.push(jk * phase * phi.eval_scaled(&p)?);
    }
    let tp = image.to_complex();
    let out = (0..2 * m)
        .map(|mu| {
            let r = minimal_r(mu, m);
            let mut acc = ComplexSum::new();
            for (s, v) in samples.iter().enumerate() {
                let x = s as f64 / n_samples as f64;
                acc.add(v * Complex64::from_polar(1.0, -2.0 * PI * r as f64 * x));
            }
            let a_r = acc.value() / n_samples as f64;
            a_r * (Complex64::new(0.0, -2.0 * PI) * tp * ((r * r) as f64 / (4.0 * mf))).exp()
        })
        .collect();
    Ok((out, image))
}

/// `‖h_μ‖²_{L²} = Σ_j ∫_F |h_μ(γ_jτ)|² Im(γ_jτ)^{k−½} dξdη/η²` over right coset
/// representatives γ_j of `±Γ₀,₁(4m)`, with `h_μ` extracted from φ itself.
pub fn theta_component_l2_norms_gamma01<F: JacobiFunction + ?Sized>(
    phi: &F,
    quad: &PeterssonQuadrature,
) -> Result<ComponentNorms> {
    quad.validate()?;
    let m = phi.index();
    let reps = gamma01_coset_representatives(m)?;
    let w = phi.weight() - 0.5;
    let nodes = quad.nodes();
    let parts: Vec<Result<Vec<f64>>> = nodes
        .par_iter()
        .map(|(tau, wt)| {
            let mut row = vec![0.0; 2 * m as usize];
            for g in &reps {
                let (vals, image) = components_at_image(phi, g, tau)?;
                let s = image.eta().powf(w) * wt;
                for (r, v) in row.iter_mut().zip(&vals) {
                    *r += v.norm_sqr() * s;
                }
            }
            Ok(row)
        })
        .collect();
    let mut sums: Vec<NeumaierSum> = (0..2 * m).map(|_| NeumaierSum::new()).collect();
    for p in parts {
        for (s, v) in sums.iter_mut().zip(p?) {
            s.add(v);
        }
    }
    let norms: Vec<f64> = sums.iter().map(NeumaierSum::value).collect();
    let total = norms.iter().sum();
    Ok(ComponentNorms { norms, total, copies: reps.len() })
}
