//! Classical level-one forms: monomials Δ^a E₄^b E₆^c as q-series, and an
//! independent evaluator through Jacobi theta constants and the Dedekind η
//! function that stays accurate close to the real axis.

use super::{delta_int, eisenstein_int, IntSeries, QSeries};
use crate::error::{Error, Result};
use crate::hyperbolic::UpperHalfPoint;
use crate::sum::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Terms whose modulus falls below `SERIES_CUTOFF` times the largest term are dropped.
const SERIES_CUTOFF: f64 = 1e-20;

fn gaussian_sum<F>(tau: &UpperHalfPoint, offset: f64, sign: F) -> Complex64
where
    F: Fn(i64) -> f64,
{
    // Σ_n sign(n) exp(πiτ(n + offset)²)
    let t = tau.to_complex();
    let eta = tau.eta();
    let nmax = ((-SERIES_CUTOFF.ln()) / (PI * eta)).sqrt().ceil() as i64 + 2;
    let mut acc = ComplexSum::new();
    for n in -nmax..=nmax {
        let x = n as f64 + offset;
        acc.add((Complex64::new(0.0, PI) * t * (x * x)).exp() * sign(n));
    }
    acc.value()
}

/// θ₂(τ) = Σ e^{πiτ(n+½)²}.
pub fn theta2(tau: &UpperHalfPoint) -> Complex64 {
    gaussian_sum(tau, 0.5, |_| 1.0)
}

/// θ₃(τ) = Σ e^{πiτn²}.
pub fn theta3(tau: &UpperHalfPoint) -> Complex64 {
    gaussian_sum(tau, 0.0, |_| 1.0)
}

/// θ₄(τ) = Σ (−1)ⁿ e^{πiτn²}.
pub fn theta4(tau: &UpperHalfPoint) -> Complex64 {
    gaussian_sum(tau, 0.0, |n| if n % 2 == 0 { 1.0 } else { -1.0 })
}

/// Dedekind η(τ) = Σ (−1)ⁿ q^{(6n+1)²/24}.
pub fn dedekind_eta(tau: &UpperHalfPoint) -> Complex64 {
    let t = tau.to_complex();
    let eta = tau.eta();
    // exponent 2π·η·(6n+1)²/24 must exceed −ln(cutoff)
    let nmax = (((-SERIES_CUTOFF.ln()) * 12.0 / (PI * eta)).sqrt() / 6.0).ceil() as i64 + 2;
    let mut acc = ComplexSum::new();
    for n in -nmax..=nmax {
        let e = (6 * n + 1) as f64;
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        acc.add((Complex64::new(0.0, 2.0 * PI) * t * (e * e / 24.0)).exp() * s);
    }
    acc.value()
}

/// E₄ = ½(θ₂⁸ + θ₃⁸ + θ₄⁸).
pub fn e4_theta(tau: &UpperHalfPoint) -> Complex64 {
    let (a, b, c) = (theta2(tau), theta3(tau), theta4(tau));
    0.5 * (a.powi(8) + b.powi(8) + c.powi(8))
}

/// E₆ = ½(θ₂⁴ + θ₃⁴)(θ₃⁴ + θ₄⁴)(θ₄⁴ − θ₂⁴).
pub fn e6_theta(tau: &UpperHalfPoint) -> Complex64 {
    let (a, b, c) = (theta2(tau).powi(4), theta3(tau).powi(4), theta4(tau).powi(4));
    0.5 * (a + b) * (b + c) * (c - a)
}

/// Δ = η²⁴.
pub fn delta_eta(tau: &UpperHalfPoint) -> Complex64 {
    dedekind_eta(tau).powi(24)
}

/// The monomial Δ^delta·E₄^e4·E₆^e6.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassicalForm {
    pub delta: u32,
    pub e4: u32,
    pub e6: u32,
}

impl ClassicalForm {
    pub const fn new(delta: u32, e4: u32, e6: u32) -> Self {
        Self { delta, e4, e6 }
    }

    pub fn weight(&self) -> u32 {
        12 * self.delta + 4 * self.e4 + 6 * self.e6
    }

    pub fn is_cusp_form(&self) -> bool {
        self.delta > 0
    }

    /// Short human-readable name such as `ΔE4^2`.
    pub fn name(&self) -> String {
        let part = |s: &str, e: u32| match e {
            0 => String::new(),
            1 => s.to_string(),
            _ => format!("{s}^{e}"),
        };
        let n = format!("{}{}{}", part("Δ", self.delta), part("E4", self.e4), part("E6", self.e6));
        if n.is_empty() {
            "1".into()
        } else {
            n
        }
    }

    /// Exact q-expansion with exponents below `trunc`.
    pub fn qseries(&self, trunc: i64) -> Result<QSeries> {
        if trunc < 1 {
            return Err(Error::InvalidInput("trunc must be ≥ 1".into()));
        }
        let len = trunc as usize;
        let mut acc = IntSeries::one(len);
        let factors = [
            (delta_int(len)?, self.delta),
            (eisenstein_int(4, len)?, self.e4),
            (eisenstein_int(6, len)?, self.e6),
        ];
        let mut exact = true;
        for (f, e) in &factors {
            for _ in 0..*e {
                match acc.checked_mul(f) {
                    Some(p) => acc = p,
                    None => {
                        exact = false;
                        break;
                    }
                }
            }
        }
        if exact {
            return acc.to_qseries(1, 0, trunc, self.weight() as f64, 1);
        }
        log::warn!("{} coefficients overflow 128 bits; using floating point", self.name());
        let mut out = IntSeries::one(len).to_qseries(1, 0, trunc, 0.0, 1)?;
        for (f, e) in &factors {
            let fq = f.to_qseries(1, 0, trunc, 0.0, 1)?;
            for _ in 0..*e {
                out = out.mul(&fq)?;
            }
        }
        Ok(out.with_weight(self.weight() as f64))
    }

    /// Value through theta constants and η; accurate for small Im(τ).
    pub fn eval_theta(&self, tau: &UpperHalfPoint) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        if self.delta > 0 {
            v *= delta_eta(tau).powi(self.delta as i32);
        }
        if self.e4 > 0 {
            v *= e4_theta(tau).powi(self.e4 as i32);
        }
        if self.e6 > 0 {
            v *= e6_theta(tau).powi(self.e6 as i32);
        }
        v
    }
}

/// The generator of the one-dimensional cusp-form space of weight `k`.
pub fn one_dimensional_cusp_form(k: u32) -> Result<ClassicalForm> {
    Ok(match k {
        12 => ClassicalForm::new(1, 0, 0),
        16 => ClassicalForm::new(1, 1, 0),
        18 => ClassicalForm::new(1, 0, 1),
        20 => ClassicalForm::new(1, 2, 0),
        22 => ClassicalForm::new(1, 1, 1),
        26 => ClassicalForm::new(1, 2, 1),
        _ => return Err(Error::Unsupported(format!("no one-dimensional cusp space of weight {k}"))),
    })
}

/// Weights whose cusp-form space is one-dimensional and spanned by a monomial.
pub const ONE_DIMENSIONAL_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];
