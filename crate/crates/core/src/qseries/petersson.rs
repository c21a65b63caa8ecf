//! Pointwise Petersson norms, Petersson inner products by quadrature over the
//! truncated fundamental domain, and grid-plus-refinement sup-norm search.

use super::{EvalOptions, QSeries};
use crate::error::{Error, Result};
use crate::hyperbolic::{reduce_to_fundamental_domain, UpperHalfPoint};
use crate::quad::{composite_gauss_legendre, composite_midpoint, composite_simpson};
use crate::sum::ComplexSum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Squared pointwise Petersson norm `|f(τ)|²·η^k`.
pub fn petersson_norm_point(f: &QSeries, k: f64, tau: &UpperHalfPoint) -> Result<f64> {
    let v = f.eval(tau, &EvalOptions::for_series(f))?.value;
    Ok(v.norm_sqr() * tau.eta().powf(k))
}

/// One-dimensional composite rule used along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadRule {
    Midpoint,
    Simpson,
    /// Gauss–Legendre with the given number of nodes per panel.
    GaussLegendre(usize),
}

impl QuadRule {
    /// Nodes and weights of the rule with `panels` panels on `[a, b]`.
    pub fn nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        match *self {
            QuadRule::Midpoint => composite_midpoint(a, b, panels),
            QuadRule::Simpson => composite_simpson(a, b, panels),
            QuadRule::GaussLegendre(p) => composite_gauss_legendre(a, b, panels, p),
        }
    }

    /// Order of accuracy in the panel width.
    pub fn order(&self) -> u32 {
        match *self {
            QuadRule::Midpoint => 2,
            QuadRule::Simpson => 4,
            QuadRule::GaussLegendre(p) => 2 * p as u32,
        }
    }
}

/// Two-dimensional quadrature over `{|ξ| ≤ ½, |τ| ≥ 1, η ≤ Y_max}`.
///
/// The outer variable is ξ; the inner variable is `t = ln η`, running from
/// the lower arc to `ln Y_max`, so the panels are logarithmically spaced in η.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeterssonQuadrature {
    pub y_max: f64,
    pub n_xi: usize,
    pub n_eta: usize,
    pub rule: QuadRule,
    /// Relative tolerance on the a-posteriori error estimate.
    pub tol: f64,
}

impl Default for PeterssonQuadrature {
    fn default() -> Self {
        Self { y_max: 12.0, n_xi: 50, n_eta: 50, rule: QuadRule::GaussLegendre(8), tol: 1e-8 }
    }
}

impl PeterssonQuadrature {
    pub fn new(y_max: f64, n_xi: usize, n_eta: usize, rule: QuadRule, tol: f64) -> Result<Self> {
        let q = Self { y_max, n_xi, n_eta, rule, tol };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y_max > 1.0) {
            return Err(Error::InvalidInput(format!("Y_max must exceed 1, got {}", self.y_max)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.n_xi < 1 || self.n_eta < 1 {
            return Err(Error::InvalidInput("quadrature needs at least one panel per axis".into()));
        }
        if let QuadRule::GaussLegendre(0) = self.rule {
            return Err(Error::InvalidInput("Gauss–Legendre order must be ≥ 1".into()));
        }
        Ok(())
    }

    /// The same rule with half as many panels per axis.
    pub fn halved(&self) -> Self {
        Self { n_xi: (self.n_xi / 2).max(1), n_eta: (self.n_eta / 2).max(1), ..*self }
    }

    /// The same rule with twice as many panels per axis.
    pub fn doubled(&self) -> Self {
        Self { n_xi: 2 * self.n_xi, n_eta: 2 * self.n_eta, ..*self }
    }

    pub fn digest(&self) -> String {
        format!(
            "Ymax={};grid={}x{};rule={:?};tol={:e}",
            self.y_max, self.n_xi, self.n_eta, self.rule, self.tol
        )
    }

    /// Nodes and weights of the rule for `dξdη/η²`, column by column.
    pub fn nodes(&self) -> Vec<(UpperHalfPoint, f64)> {
        let t_hi = self.y_max.ln();
        let mut out = Vec::new();
        for (xi, wx) in self.rule.nodes(-0.5, 0.5, self.n_xi) {
            let t_lo = 0.5 * (1.0 - xi * xi).ln();
            for (t, wt) in self.rule.nodes(t_lo, t_hi, self.n_eta) {
                let eta = t.exp();
                out.push((UpperHalfPoint::new(xi, eta).expect("node in ℍ"), wx * wt / eta));
            }
        }
        out
    }

    /// Integrate `density(τ)·dξdη/η²` over the truncated domain.
    ///
    /// Columns are evaluated in parallel and summed in a fixed order.
    pub fn integrate<F>(&self, density: F) -> Complex64
    where
        F: Fn(&UpperHalfPoint) -> Complex64 + Sync,
    {
        let outer = self.rule.nodes(-0.5, 0.5, self.n_xi);
        let t_hi = self.y_max.ln();
        let columns: Vec<Complex64> = outer
            .par_iter()
            .map(|&(xi, wx)| {
                let t_lo = 0.5 * (1.0 - xi * xi).ln();
                let mut acc = ComplexSum::new();
                for (t, wt) in self.rule.nodes(t_lo, t_hi, self.n_eta) {
                    let eta = t.exp();
                    let tau = UpperHalfPoint::new(xi, eta).expect("node in ℍ");
                    acc.add(density(&tau) * (wt / eta));
                }
                acc.value() * wx
            })
            .collect();
        let mut total = ComplexSum::new();
        total.extend(columns);
        total.value()
    }
}

/// A quadrature value with its a-posteriori error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerProduct {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Run a quadrature and its half-resolution companion; fail if they
/// disagree beyond the relative tolerance.
pub fn integrate_with_estimate<F>(quad: &PeterssonQuadrature, density: F) -> Result<InnerProduct>
where
    F: Fn(&UpperHalfPoint) -> Complex64 + Sync,
{
    quad.validate()?;
    let value = quad.integrate(&density);
    let coarse = quad.halved().integrate(&density);
    let error_estimate = (value - coarse).norm();
    if error_estimate > quad.tol * value.norm() {
        return Err(Error::Accuracy { estimate: error_estimate, tol: quad.tol * value.norm() });
    }
    Ok(InnerProduct { value, error_estimate })
}

/// Petersson inner product `∫_F f·ḡ·η^k dξdη/η²` over the truncated domain.
pub fn petersson_inner(f: &QSeries, g: &QSeries, k: f64, quad: &PeterssonQuadrature) -> Result<InnerProduct> {
    let floor = UpperHalfPoint::new(0.5, 3f64.sqrt() / 2.0)?;
    // Certify both truncations at the lowest point of the domain.
    f.eval(&floor, &EvalOptions::for_series(f))?;
    g.eval(&floor, &EvalOptions::for_series(g))?;
    integrate_with_estimate(quad, |tau| {
        f.partial_sum(tau) * g.partial_sum(tau).conj() * tau.eta().powf(k)
    })
}

/// Grid-search settings for sup-norm searches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_xi: usize,
    pub n_eta: usize,
    /// Upper end of the η range; `None` selects max(2, k/(2π)).
    pub height: Option<f64>,
    pub restarts: usize,
    /// Refinement stops once both steps fall below this value.
    pub min_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { n_xi: 48, n_eta: 48, height: None, restarts: 3, min_step: 1e-9 }
    }
}

impl SearchConfig {
    pub fn height_for(&self, k: f64) -> f64 {
        self.height.unwrap_or_else(|| (k / (2.0 * PI)).max(2.0))
    }

    pub fn doubled(&self) -> Self {
        Self { n_xi: 2 * self.n_xi, n_eta: 2 * self.n_eta, ..*self }
    }

    pub fn digest(&self, k: f64) -> String {
        format!(
            "grid={}x{};height={};restarts={};min_step={:e}",
            self.n_xi,
            self.n_eta,
            self.height_for(k),
            self.restarts,
            self.min_step
        )
    }
}

/// Best value found by a search and where it was found.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupSearch {
    pub value: f64,
    pub argmax: UpperHalfPoint,
}

/// Maximize `f(ξ, η)` over a box by a grid scan followed by coordinate
/// descent with halving steps from the best grid points.
pub fn maximize_over_box<F>(f: F, xi: (f64, f64), eta: (f64, f64), cfg: &SearchConfig) -> (f64, f64, f64)
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let nx = cfg.n_xi.max(2);
    let ny = cfg.n_eta.max(2);
    let hx = (xi.1 - xi.0) / nx as f64;
    let hy = (eta.1 - eta.0) / ny as f64;
    let mut grid: Vec<(f64, f64, f64)> = (0..=nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = xi.0 + hx * i as f64;
            let f = &f;
            (0..=ny).map(move |j| {
                let y = eta.0 + hy * j as f64;
                (f(x, y), x, y)
            })
        })
        .collect();
    grid.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2)));
    let starts: Vec<(f64, f64, f64)> = grid.iter().take(cfg.restarts.max(1)).copied().collect();
    let refined: Vec<(f64, f64, f64)> = starts
        .par_iter()
        .map(|&start| coordinate_ascent(&f, start, (hx, hy), xi, eta, cfg.min_step))
        .collect();
    refined
        .into_iter()
        .chain(std::iter::once(grid[0]))
        .fold((f64::NEG_INFINITY, 0.0, 0.0), |best, c| if c.0 > best.0 { c } else { best })
}

fn coordinate_ascent<F>(
    f: &F,
    start: (f64, f64, f64),
    steps: (f64, f64),
    xi: (f64, f64),
    eta: (f64, f64),
    min_step: f64,
) -> (f64, f64, f64)
where
    F: Fn(f64, f64) -> f64,
{
    let (mut v, mut x, mut y) = start;
    let (mut sx, mut sy) = steps;
    for _ in 0..100_000 {
        if sx < min_step && sy < min_step {
            break;
        }
        let cands = [
            ((x + sx).min(xi.1), y),
            ((x - sx).max(xi.0), y),
            (x, (y + sy).min(eta.1)),
            (x, (y - sy).max(eta.0)),
        ];
        let mut best = (v, x, y);
        for (cx, cy) in cands {
            let cv = f(cx, cy);
            if cv > best.0 {
                best = (cv, cx, cy);
            }
        }
        if best.0 > v {
            (v, x, y) = best;
        } else {
            sx *= 0.5;
            sy *= 0.5;
        }
    }
    (v, x, y)
}

/// Sup of `|f|²η^k` over `{|ξ| ≤ ½, √3/2 ≤ η ≤ H}`, which contains the
/// truncated fundamental domain. The result is a lower bound for the true
/// sup; the argmax is returned reduced into the fundamental domain.
pub fn supnorm_search(f: &QSeries, k: f64, cfg: &SearchConfig) -> Result<SupSearch> {
    if f.is_zero() {
        return Ok(SupSearch { value: 0.0, argmax: UpperHalfPoint::i() });
    }
    let h = cfg.height_for(k);
    let lo = 3f64.sqrt() / 2.0;
    let floor = UpperHalfPoint::new(0.5, lo)?;
    f.eval(&floor, &EvalOptions::for_series(f))?;
    let density = |x: f64, y: f64| {
        let tau = UpperHalfPoint::new(x, y).expect("search point in ℍ");
        f.partial_sum(&tau).norm_sqr() * y.powf(k)
    };
    let (value, x, y) = maximize_over_box(density, (-0.5, 0.5), (lo, h), cfg);
    let (argmax, _) = reduce_to_fundamental_domain(&UpperHalfPoint::new(x, y)?)?;
    Ok(SupSearch { value, argmax })
}

/// Maximizer and maximum of `η^{k+½}e^{−4πη}`.
pub fn aux_weight_profile_max(k: f64) -> Result<(f64, f64)> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    let eta0 = (k + 0.5) / (4.0 * PI);
    Ok((eta0, aux_weight_profile(k, eta0)))
}

/// The profile `η^{k+½}e^{−4πη}`.
pub fn aux_weight_profile(k: f64, eta: f64) -> f64 {
    ((k + 0.5) * eta.ln() - 4.0 * PI * eta).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::delta_series;

    #[test]
    fn aux_profile_examples() {
        let (e0, v) = aux_weight_profile_max(11.5).unwrap();
        assert!((e0 - 12.0 / (4.0 * PI)).abs() < 1e-15);
        let h = 1e-5;
        let d = (aux_weight_profile(11.5, e0 + h) - aux_weight_profile(11.5, e0 - h)) / (2.0 * h);
        assert!(d.abs() < 1e-10 * v / e0 * 1e3);
        let mut prev = v;
        for j in 1..50 {
            let p = aux_weight_profile(11.5, e0 + 0.1 * j as f64);
            assert!(p < prev);
            prev = p;
        }
        assert!(aux_weight_profile_max(0.0).is_err());
    }

    #[test]
    fn zero_and_decay() {
        let z = QSeries::zero(1, 10, 12.0, 1).unwrap();
        assert_eq!(petersson_norm_point(&z, 12.0, &UpperHalfPoint::i()).unwrap(), 0.0);
        let d = delta_series(60).unwrap();
        assert!(petersson_norm_point(&d, 12.0, &UpperHalfPoint::new(0.0, 100.0).unwrap()).unwrap() < 1e-100);
        assert_eq!(supnorm_search(&z, 12.0, &SearchConfig::default()).unwrap().value, 0.0);
    }

    #[test]
    fn quadrature_rejects_bad_config() {
        assert!(PeterssonQuadrature::new(1.0, 4, 4, QuadRule::Midpoint, 1e-6).is_err());
        assert!(PeterssonQuadrature::new(12.0, 4, 4, QuadRule::Midpoint, 0.0).is_err());
    }

    #[test]
    fn quadrature_measures_the_domain_area() {
        // Hyperbolic area of F is π/3; truncation at Y removes 1/Y.
        let q = PeterssonQuadrature::default();
        let area = q.integrate(|_| Complex64::new(1.0, 0.0)).re;
        assert!((area - (PI / 3.0 - 1.0 / q.y_max)).abs() < 1e-13);
    }
}
