use super::decomposition::{assemble_jacobi_scaled, ThetaComponentVector};
use super::theta::{theta_eval_scaled, JacobiPoint, THETA_TOL};
use super::JacobiFunction;
use crate::bounds::BoundCheck;
use crate::error::Result;
use crate::hyperbolic::{reduce_to_fundamental_domain, UpperHalfPoint};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Grid and refinement settings for the 4-d sup-norm search.
///
/// τ ranges over `|ξ| ≤ ½, √3/2 ≤ η ≤ H`; z over `x ∈ [0,1)`, `y = sη`
/// with `s ∈ [0, ½]`, which covers E_τ up to `z ↦ −z` and `z ↦ z + τ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiSearchConfig {
    pub n_xi: usize,
    pub n_eta: usize,
    pub n_x: usize,
    pub n_y: usize,
    /// Upper end of the η range; `None` selects max(2, k/(2π)).
    pub height: Option<f64>,
    pub restarts: usize,
    pub min_step: f64,
}

impl Default for JacobiSearchConfig {
    fn default() -> Self {
        Self { n_xi: 12, n_eta: 12, n_x: 16, n_y: 8, height: None, restarts: 4, min_step: 1e-8 }
    }
}

impl JacobiSearchConfig {
    pub fn height_for(&self, k: f64) -> f64 {
        self.height.unwrap_or_else(|| (k / (2.0 * PI)).max(2.0))
    }

    pub fn doubled(&self) -> Self {
        Self { n_xi: 2 * self.n_xi, n_eta: 2 * self.n_eta, n_x: 2 * self.n_x, n_y: 2 * self.n_y, ..*self }
    }

    pub fn digest(&self, k: f64) -> String {
        format!(
            "grid={}x{}x{}x{};height={};restarts={};min_step={:e}",
            self.n_xi,
            self.n_eta,
            self.n_x,
            self.n_y,
            self.height_for(k),
            self.restarts,
            self.min_step
        )
    }
}

/// Best value found and a canonical point where it is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiSupSearch {
    pub value: f64,
    pub argmax: JacobiPoint,
}

/// Move (τ, z) to τ in F and z in the cell `x ∈ [0,1)`, `y ∈ [0, η/2]`
/// using transformations that preserve the pointwise norm.
pub fn canonical_point(p: &JacobiPoint) -> Result<JacobiPoint> {
    let (tau, g) = reduce_to_fundamental_domain(&p.tau)?;
    let mut z = p.z / g.cocycle(&p.tau);
    let t = tau.to_complex();
    let n = (z.im / tau.eta()).floor();
    z -= t * n;
    if z.im > tau.eta() / 2.0 {
        z = t - z;
    }
    z -= z.re.floor();
    Ok(JacobiPoint::new(tau, z))
}

type Coords = [f64; 4];

/// Largest squared pointwise Petersson norm found on the grid and by
/// coordinate ascent from the best grid points.
pub fn jacobi_supnorm_search<F: JacobiFunction + ?Sized>(phi: &F, cfg: &JacobiSearchConfig) -> Result<JacobiSupSearch> {
    let lo = [-0.5, 3f64.sqrt() / 2.0, 0.0, 0.0];
    let hi = [0.5, cfg.height_for(phi.weight()), 1.0, 0.5];
    let eval = |c: &Coords| -> Result<f64> {
        let p = JacobiPoint::from_parts(c[0], c[1], c[2], c[3] * c[1])?;
        phi.pet_norm(&p)
    };
    let dims = [cfg.n_xi.max(2), cfg.n_eta.max(2), cfg.n_x.max(2), cfg.n_y.max(2)];
    let steps: Coords = std::array::from_fn(|i| (hi[i] - lo[i]) / dims[i] as f64);
    let mut grid: Vec<(f64, Coords)> = Vec::new();
    let rows: Vec<Result<Vec<(f64, Coords)>>> = (0..=dims[0])
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in 0..=dims[1] {
                for c in 0..dims[2] {
                    for d in 0..=dims[3] {
                        let pt = [
                            lo[0] + steps[0] * a as f64,
                            lo[1] + steps[1] * b as f64,
                            lo[2] + steps[2] * c as f64,
                            lo[3] + steps[3] * d as f64,
                        ];
                        out.push((eval(&pt)?, pt));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    for r in rows {
        grid.extend(r?);
    }
    grid.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.partial_cmp(&b.1).expect("finite coordinates")));
    if grid[0].0 == 0.0 {
        let argmax = JacobiPoint::new(UpperHalfPoint::i(), Complex64::new(0.0, 0.0));
        return Ok(JacobiSupSearch { value: 0.0, argmax });
    }
    let starts: Vec<(f64, Coords)> = grid.iter().take(cfg.restarts.max(1)).copied().collect();
    let refined: Vec<Result<(f64, Coords)>> =
        starts.par_iter().map(|&s| ascend(&eval, s, steps, lo, hi, cfg.min_step)).collect();
    let mut best = grid[0];
    for r in refined {
        let r = r?;
        if r.0 > best.0 {
            best = r;
        }
    }
    let c = best.1;
    let argmax = canonical_point(&JacobiPoint::from_parts(c[0], c[1], c[2], c[3] * c[1])?)?;
    Ok(JacobiSupSearch { value: best.0, argmax })
}

fn ascend<E>(eval: &E, start: (f64, Coords), mut steps: Coords, lo: Coords, hi: Coords, min_step: f64) -> Result<(f64, Coords)>
where
    E: Fn(&Coords) -> Result<f64>,
{
    let (mut v, mut c) = start;
    for _ in 0..100_000 {
        if steps.iter().all(|&s| s < min_step) {
            break;
        }
        let mut best = (v, c);
        for i in 0..4 {
            for dir in [1.0, -1.0] {
                let mut cand = c;
                cand[i] = (c[i] + dir * steps[i]).clamp(lo[i], hi[i]);
                let cv = eval(&cand)?;
                if cv > best.0 {
                    best = (cv, cand);
                }
            }
        }
        if best.0 > v {
            (v, c) = best;
        } else {
            for s in &mut steps {
                *s *= 0.5;
            }
        }
    }
    Ok((v, c))
}

/// `‖Σ h_μ θ_μ‖²` against `(Σ‖h_μ‖²)(Σ‖θ_μ‖²)` at one point.
pub fn cauchy_schwarz_chain_check(hvec: &ThetaComponentVector, p: &JacobiPoint) -> Result<BoundCheck> {
    let m = hvec.index();
    let eta = p.tau.eta();
    let lhs = assemble_jacobi_scaled(hvec, p)?.norm_sqr() * eta.powf(hvec.jacobi_weight());
    let h_sum = hvec.aggregate_norm(&p.tau);
    let mut t_sum = 0.0;
    for mu in 0..2 * m {
        t_sum += theta_eval_scaled(mu, m, p, THETA_TOL)?.value.norm_sqr() * eta.sqrt();
    }
    Ok(BoundCheck::new(lhs, h_sum * t_sum))
}
