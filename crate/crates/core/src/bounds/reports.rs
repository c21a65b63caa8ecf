use super::constants::{auxlem_rhs, prop3_rhs, theta_sum_constant, thm4_rhs, thm6_rhs, BoundParams};
use super::BoundReport;
use crate::arithmetic::{fundamental_domain_copies, GroupData};
use crate::error::{Error, Result};
use crate::qseries::{
    maximize_over_box, one_dimensional_cusp_form, petersson_inner, supnorm_search, PeterssonQuadrature, SearchConfig,
    SupSearch,
};
use crate::thetajacobi::{
    extract_h_mu, jacobi_inner_theta, jacobi_supnorm_search, JacobiFormCoeffs, JacobiSearchConfig, JacobiSupSearch,
    ThetaComponentVector,
};
use crate::hyperbolic::UpperHalfPoint;
use serde::{Deserialize, Serialize};

/// Quadrature, search and truncation settings shared by the measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub quad: PeterssonQuadrature,
    pub search: SearchConfig,
    pub jacobi_search: JacobiSearchConfig,
    /// Truncation of classical q-series.
    pub trunc: i64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            quad: PeterssonQuadrature::default(),
            search: SearchConfig::default(),
            jacobi_search: JacobiSearchConfig::default(),
            trunc: 40,
        }
    }
}

impl MeasureConfig {
    pub fn digest(&self, k: f64) -> String {
        format!("{};{};trunc={}", self.quad.digest(), self.search.digest(k), self.trunc)
    }

    pub fn jacobi_digest(&self, k: f64) -> String {
        format!("{};{}", self.quad.digest(), self.jacobi_search.digest(k))
    }
}

/// Sup of the squared Petersson norm of the L²-normalized generator of a
/// one-dimensional cusp space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMeasurement {
    pub k: u32,
    pub form: String,
    /// ⟨f,f⟩ of the integral-coefficient generator.
    pub norm: f64,
    /// Sup of `‖f‖²/⟨f,f⟩`.
    pub sup: SupSearch,
    pub digest: String,
}

pub fn measure_classical(k: u32, cfg: &MeasureConfig) -> Result<ClassicalMeasurement> {
    let form = one_dimensional_cusp_form(k)?;
    let f = form.qseries(cfg.trunc)?;
    let kf = k as f64;
    let norm = petersson_inner(&f, &f, kf, &cfg.quad)?.value.re;
    let raw = supnorm_search(&f, kf, &cfg.search)?;
    Ok(ClassicalMeasurement {
        k,
        form: form.name(),
        norm,
        sup: SupSearch { value: raw.value / norm, argmax: raw.argmax },
        digest: cfg.digest(kf),
    })
}

/// Measured quantities of an L²-normalized Jacobi cusp form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JacobiMeasurement {
    pub k: u32,
    pub m: u32,
    /// ⟨φ,φ⟩ of the input form, by the theta route.
    pub norm: f64,
    /// Sup of `‖φ‖²/⟨φ,φ⟩`.
    pub sup: JacobiSupSearch,
    /// Sup over the fundamental domain of `Σ_μ‖h_μ‖²·η^{½}`, normalized.
    pub h_sup_weighted: f64,
    /// Sup over the fundamental domain of `Σ_μ‖h_μ‖²`, normalized.
    pub h_sup: f64,
    /// Smallest leading exponent among the `h_μ`.
    pub leading_exponent: f64,
    /// Components of the normalized form.
    #[serde(skip)]
    pub components: Option<ThetaComponentVector>,
    pub digest: String,
}

/// Normalize, then measure the Jacobi sup and the sups of the aggregate
/// component norms that feed the Cauchy–Schwarz chain.
pub fn measure_jacobi(phi: &JacobiFormCoeffs, cfg: &MeasureConfig) -> Result<JacobiMeasurement> {
    let hvec = extract_h_mu(phi)?;
    if hvec.is_zero() {
        return Err(Error::Precondition("the zero form cannot be normalized".into()));
    }
    let norm = jacobi_inner_theta(&hvec, &hvec, &cfg.quad)?.value.re;
    let raw = jacobi_supnorm_search(phi, &cfg.jacobi_search)?;
    let normalized = hvec.scale((1.0 / norm.sqrt()).into());
    let k = phi.weight() as f64;
    let lo = 3f64.sqrt() / 2.0;
    let hi = cfg.search.height_for(k);
    let agg = |x: f64, y: f64, p: f64| {
        let tau = UpperHalfPoint::new(x, y).expect("search point in ℍ");
        normalized.aggregate_norm(&tau) * y.powf(p)
    };
    let (h_sup_weighted, _, _) = maximize_over_box(|x, y| agg(x, y, 0.5), (-0.5, 0.5), (lo, hi), &cfg.search);
    let (h_sup, _, _) = maximize_over_box(|x, y| agg(x, y, 0.0), (-0.5, 0.5), (lo, hi), &cfg.search);
    let leading_exponent = normalized
        .components()
        .iter()
        .filter_map(|h| h.leading_numerator().map(|n| n as f64 / h.denom() as f64))
        .fold(f64::INFINITY, f64::min);
    Ok(JacobiMeasurement {
        k: phi.weight(),
        m: phi.index(),
        norm,
        sup: JacobiSupSearch { value: raw.value / norm, argmax: raw.argmax },
        h_sup_weighted,
        h_sup,
        leading_exponent,
        components: Some(normalized),
        digest: cfg.jacobi_digest(k),
    })
}

/// Measured sup against the cofinite bound at the measured argmax.
pub fn prop3_report(k: f64, group: &GroupData, measured: &SupSearch, digest: &str) -> Result<BoundReport> {
    let rhs = prop3_rhs(k, group, &measured.argmax)?;
    Ok(BoundReport::new("prop3", k, 0, measured.value, rhs, digest))
}

pub fn thm4_report(k: f64, group: &GroupData, measured_sup: f64, params: &BoundParams, digest: &str) -> Result<BoundReport> {
    let rhs = thm4_rhs(k, group, params)?.total;
    Ok(BoundReport::new("thm4", k, 0, measured_sup, rhs, format!("{digest};{}", params.digest())))
}

/// Same constant as [`thm4_report`]: an L²-normalized form is bounded by the
/// kernel on the diagonal.
pub fn cor5_report(k: f64, group: &GroupData, measured_sup: f64, params: &BoundParams, digest: &str) -> Result<BoundReport> {
    let rhs = thm4_rhs(k, group, params)?.total;
    Ok(BoundReport::new("cor5", k, 0, measured_sup, rhs, format!("{digest};{}", params.digest())))
}

pub fn thm6_report(
    k: f64,
    group: &GroupData,
    r_compact: f64,
    y: f64,
    measured_sup: f64,
    params: &BoundParams,
    digest: &str,
) -> Result<BoundReport> {
    let rhs = thm6_rhs(k, group, r_compact, y, params)?;
    Ok(BoundReport::new(
        "thm6",
        k,
        0,
        measured_sup,
        rhs,
        format!("{digest};r_compact={r_compact:.6};Y={y};{}", params.digest()),
    ))
}

/// `measured` is the sup of `‖h‖²·η^{½}` for an L²-normalized form whose
/// expansion starts at `q^ν`.
pub fn auxlem_report(
    k: f64,
    group: &GroupData,
    nu: f64,
    measured: f64,
    params: &BoundParams,
    digest: &str,
) -> Result<BoundReport> {
    let rhs = auxlem_rhs(k, group, nu, params)?;
    Ok(BoundReport::new("auxlem", k, 0, measured, rhs, format!("{digest};nu={nu};{}", params.digest())))
}

fn theta_norm_total(m: u32) -> Result<f64> {
    Ok((4.0 * m as f64).sqrt() * fundamental_domain_copies(m as u64)? as f64)
}

/// Measured sup against the fully explicit bound: the component sums are
/// bounded by the auxiliary lemma (weighted) and the finite-index bound
/// (unweighted) at weight `k − ½`, each times `Σ_μ‖h_μ‖²_{L²} = √(4m)·[copies]`.
pub fn thm11_report(meas: &JacobiMeasurement, group: &GroupData, params: &BoundParams, y: f64) -> Result<BoundReport> {
    let m = meas.m;
    let kh = meas.k as f64 - 0.5;
    let n = theta_norm_total(m)?;
    let aux = auxlem_rhs(kh, group, meas.leading_exponent, params)?;
    let fin = thm6_rhs(kh, group, group.injectivity_radius, y, params)?;
    let rhs = 2.0 * m as f64 * aux * n + theta_sum_constant(m) * fin * n;
    Ok(BoundReport::new(
        "thm11",
        meas.k as f64,
        m,
        meas.sup.value,
        rhs,
        format!("{};nu={};{}", meas.digest, meas.leading_exponent, params.digest()),
    ))
}

/// Measured sup against the Cauchy–Schwarz chain evaluated with measured
/// component sups: `2m·sup(Σ‖h_μ‖²η^{½}) + c(m)·sup(Σ‖h_μ‖²)`.
pub fn thm11_chain_report(meas: &JacobiMeasurement) -> Result<BoundReport> {
    let m = meas.m;
    let rhs = 2.0 * m as f64 * meas.h_sup_weighted + theta_sum_constant(m) * meas.h_sup;
    Ok(BoundReport::new("thm11_chain", meas.k as f64, m, meas.sup.value, rhs, meas.digest.clone()))
}

/// Least-squares slope of `log v` against `log k`.
pub fn empirical_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("slope needs at least two points".into()));
    }
    if points.iter().any(|&(k, v)| !(k > 0.0 && v > 0.0)) {
        return Err(Error::InvalidInput("slope needs positive abscissae and values".into()));
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(k, v)| (k.ln(), v.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("slope needs distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
