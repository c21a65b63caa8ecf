//! Explicit bound constants, the truncated Bergman-kernel series on the
//! diagonal, and measured-versus-bound reports.

pub mod bergman;
pub mod constants;
pub mod reports;

pub use bergman::{bergman_diag_series, BergmanConfig, BergmanDiag};
pub use constants::{
    auxlem_rhs, counting_inequality_check, gamma_ratio, prop1_eqn4_check, prop1_rhs, prop1_terms, prop3_eqn5_check,
    prop3_rhs, prop3_terms, theta_sum_constant, thm4_rhs, thm6_rhs, BoundParams, Prop1Terms, Prop3Terms,
};
pub use reports::{
    auxlem_report, cor5_report, empirical_slope, measure_classical, measure_jacobi, prop3_report, thm11_chain_report,
    thm11_report, thm4_report, thm6_report, ClassicalMeasurement, JacobiMeasurement, MeasureConfig,
};

use serde::{Deserialize, Serialize};

/// The two sides of an inequality `lhs ≤ rhs` and the margin `rhs − lhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self { lhs, rhs, margin: rhs - lhs }
    }
}

/// A measured quantity next to the bound it should respect.
///
/// The margin is always recomputed from `rhs − lhs`, including when a
/// report is read back from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ReportFields")]
pub struct BoundReport {
    name: String,
    k: f64,
    m: u32,
    lhs: f64,
    rhs: f64,
    margin: f64,
    config_digest: String,
}

#[derive(Deserialize)]
struct ReportFields {
    name: String,
    k: f64,
    m: u32,
    lhs: f64,
    rhs: f64,
    config_digest: String,
}

impl From<ReportFields> for BoundReport {
    fn from(f: ReportFields) -> Self {
        BoundReport::new(f.name, f.k, f.m, f.lhs, f.rhs, f.config_digest)
    }
}

impl BoundReport {
    pub fn new(name: impl Into<String>, k: f64, m: u32, lhs: f64, rhs: f64, config_digest: impl Into<String>) -> Self {
        Self { name: name.into(), k, m, lhs, rhs, margin: rhs - lhs, config_digest: config_digest.into() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn lhs(&self) -> f64 {
        self.lhs
    }
    pub fn rhs(&self) -> f64 {
        self.rhs
    }
    pub fn margin(&self) -> f64 {
        self.margin
    }
    pub fn config_digest(&self) -> &str {
        &self.config_digest
    }

    /// Column order shared by the JSON keys and CSV header.
    pub const COLUMNS: [&'static str; 7] = ["name", "k", "m", "lhs", "rhs", "margin", "config_digest"];

    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
