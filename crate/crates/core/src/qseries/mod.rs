//! Truncated Fourier expansions in fractional powers of q = e^{2πiτ}.
//!
//! A [`QSeries`] stores coefficients at exponents `n/denom` for integer
//! numerators `n < trunc`. Classical objects (E₄, E₆, Δ, η-powers) are built
//! with exact 128-bit integer arithmetic and converted afterwards.

pub mod classical;
pub mod petersson;

pub use classical::{
    dedekind_eta, delta_eta, e4_theta, e6_theta, one_dimensional_cusp_form, theta2, theta3, theta4, ClassicalForm,
    ONE_DIMENSIONAL_WEIGHTS,
};
pub use petersson::{
    aux_weight_profile, aux_weight_profile_max, integrate_with_estimate, maximize_over_box, petersson_inner,
    petersson_norm_point, supnorm_search, InnerProduct, PeterssonQuadrature, QuadRule, SearchConfig, SupSearch,
};

use crate::error::{Error, Result};
use crate::hyperbolic::UpperHalfPoint;
use crate::sum::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// A truncated q-expansion `Σ_{n < trunc} c_n q^{n/denom}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    denom: u32,
    coeffs: BTreeMap<i64, Complex64>,
    trunc: i64,
    weight: f64,
    level: u32,
}

impl QSeries {
    /// Empty series. `trunc` is the exclusive bound on exponent numerators.
    pub fn zero(denom: u32, trunc: i64, weight: f64, level: u32) -> Result<Self> {
        if denom < 1 || level < 1 {
            return Err(Error::InvalidInput("denominator and level must be ≥ 1".into()));
        }
        Ok(Self { denom, coeffs: BTreeMap::new(), trunc, weight, level })
    }

    /// Build from `(numerator, coefficient)` pairs; zero coefficients are dropped.
    pub fn from_coeffs<I>(denom: u32, trunc: i64, weight: f64, level: u32, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut s = Self::zero(denom, trunc, weight, level)?;
        for (n, c) in coeffs {
            s.add_term(n, c)?;
        }
        Ok(s)
    }

    /// Add `c·q^{n/denom}` to the series.
    pub fn add_term(&mut self, n: i64, c: Complex64) -> Result<()> {
        if n >= self.trunc {
            return Err(Error::InvalidInput(format!(
                "exponent numerator {n} is not below the truncation {}",
                self.trunc
            )));
        }
        if c != Complex64::new(0.0, 0.0) {
            let e = self.coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0));
            *e += c;
            if *e == Complex64::new(0.0, 0.0) {
                self.coeffs.remove(&n);
            }
        }
        Ok(())
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// Exclusive bound on stored exponent numerators.
    pub fn trunc_numerator(&self) -> i64 {
        self.trunc
    }

    /// Truncation order as a real number, `trunc/denom`.
    pub fn trunc_order(&self) -> f64 {
        self.trunc as f64 / self.denom as f64
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }

    /// Coefficient at exponent `n/denom`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest exponent numerator with a nonzero coefficient.
    pub fn leading_numerator(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Re-express over a denominator that is a multiple of the current one.
    pub fn with_denom(&self, denom: u32) -> Result<Self> {
        if denom % self.denom != 0 {
            return Err(Error::InvalidInput(format!(
                "denominator {denom} is not a multiple of {}",
                self.denom
            )));
        }
        let f = (denom / self.denom) as i64;
        Ok(Self {
            denom,
            coeffs: self.coeffs.iter().map(|(&n, &c)| (n * f, c)).collect(),
            trunc: self.trunc * f,
            weight: self.weight,
            level: self.level,
        })
    }

    fn common(&self, other: &Self) -> Result<(Self, Self)> {
        let d = lcm(self.denom as u64, other.denom as u64);
        let d = u32::try_from(d).map_err(|_| Error::Overflow("series denominator"))?;
        Ok((self.with_denom(d)?, other.with_denom(d)?))
    }

    /// Sum, truncated at the smaller order.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.common(other)?;
        let trunc = a.trunc.min(b.trunc);
        let mut out = Self::zero(a.denom, trunc, self.weight, self.level)?;
        for (n, c) in a.terms().chain(b.terms()) {
            if n < trunc {
                out.add_term(n, c)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(&n, &c)| (n, c * s))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        out
    }

    /// Product. The result has denominator lcm(d₁, d₂), weight w₁ + w₂, and
    /// is truncated at the smaller truncation order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.common(other)?;
        let trunc = a.trunc.min(b.trunc);
        let level = lcm(self.level as u64, other.level as u64) as u32;
        let mut acc: BTreeMap<i64, ComplexSum> = BTreeMap::new();
        for (n1, c1) in a.terms() {
            for (n2, c2) in b.terms() {
                let n = n1 + n2;
                if n >= trunc {
                    break;
                }
                acc.entry(n).or_default().add(c1 * c2);
            }
        }
        let mut out = Self::zero(a.denom, trunc, self.weight + other.weight, level)?;
        for (n, s) in acc {
            out.add_term(n, s.value())?;
        }
        Ok(out)
    }

    /// Largest coefficient difference against another series over the
    /// common truncation range.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let (a, b) = self.common(other)?;
        let trunc = a.trunc.min(b.trunc);
        let mut keys: Vec<i64> = a.coeffs.keys().chain(b.coeffs.keys()).copied().filter(|&n| n < trunc).collect();
        keys.sort_unstable();
        keys.dedup();
        Ok(keys.iter().map(|&n| (a.coeff(n) - b.coeff(n)).norm()).fold(0.0, f64::max))
    }

    /// Evaluate at τ with a certified truncation-error bound.
    pub fn eval(&self, tau: &UpperHalfPoint, opts: &EvalOptions) -> Result<Evaluation> {
        if tau.eta() < opts.eta_min {
            return Err(Error::Precondition(format!(
                "Im(τ) = {} is below the evaluation floor {}",
                tau.eta(),
                opts.eta_min
            )));
        }
        let ev = self.eval_unchecked(tau, &opts.cap);
        if ev.tail > opts.tol {
            return Err(Error::TailBound { bound: ev.tail, tol: opts.tol });
        }
        Ok(ev)
    }

    /// Evaluate without enforcing the height floor or tolerance.
    pub fn eval_unchecked(&self, tau: &UpperHalfPoint, cap: &GrowthCap) -> Evaluation {
        Evaluation { value: self.partial_sum(tau), tail: self.tail_bound(tau.eta(), cap) }
    }

    /// The finite sum of stored terms at τ.
    pub fn partial_sum(&self, tau: &UpperHalfPoint) -> Complex64 {
        let d = self.denom as f64;
        let q1 = Complex64::new(0.0, 2.0 * PI / d) * tau.to_complex();
        let step = q1.exp();
        let mut acc = ComplexSum::new();
        let mut cur_n: Option<i64> = None;
        let mut cur = Complex64::new(0.0, 0.0);
        for (&n, &c) in &self.coeffs {
            cur = match cur_n {
                Some(m) if n - m <= 64 => cur * step.powi((n - m) as i32),
                _ => (q1 * n as f64).exp(),
            };
            cur_n = Some(n);
            acc.add(c * cur);
        }
        acc.value()
    }

    /// Bound on `Σ_{n ≥ trunc} |c_n||q^{n/d}|` under the growth cap
    /// `|c_n| ≤ C·(n/d)^p`, via a geometric majorant.
    pub fn tail_bound(&self, eta: f64, cap: &GrowthCap) -> f64 {
        if cap.constant == 0.0 {
            return 0.0;
        }
        let d = self.denom as f64;
        let t = (self.trunc.max(1)) as f64;
        let ratio = (1.0 + 1.0 / t).powf(cap.power) * (-2.0 * PI * eta / d).exp();
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        let first = cap.constant * (t / d).powf(cap.power) * (-2.0 * PI * eta * t / d).exp();
        first / (1.0 - ratio)
    }

    /// Serialize to the JSON interchange format.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&QSeriesFile::from(self))?)
    }

    /// Parse the JSON interchange format.
    pub fn from_json(s: &str) -> Result<Self> {
        let f: QSeriesFile = serde_json::from_str(s)?;
        f.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Growth model `|c_n| ≤ constant·(n/denom)^power` for dropped coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCap {
    pub constant: f64,
    pub power: f64,
}

impl GrowthCap {
    /// Heuristic cap fitted to the stored coefficients with `power = weight`
    /// (at least 1) and a safety factor of 4 on the constant.
    pub fn for_series(f: &QSeries) -> Self {
        let power = f.weight.max(1.0);
        let d = f.denom as f64;
        let constant = f
            .terms()
            .filter(|(n, _)| *n > 0)
            .map(|(n, c)| c.norm() / (n as f64 / d).powf(power))
            .fold(0.0, f64::max);
        let lead = f.coeff(0).norm();
        Self { constant: 4.0 * constant.max(lead), power }
    }
}

/// Options for [`QSeries::eval`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub tol: f64,
    pub eta_min: f64,
    pub cap: GrowthCap,
}

impl EvalOptions {
    /// Defaults: tolerance 1e−12, height floor 0.5, cap fitted to `f`.
    pub fn for_series(f: &QSeries) -> Self {
        Self { tol: 1e-12, eta_min: 0.5, cap: GrowthCap::for_series(f) }
    }
}

/// A value together with an upper bound on its truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail: f64,
}

#[derive(Serialize, Deserialize)]
struct QSeriesFile {
    weight: f64,
    level: u32,
    denom: u32,
    trunc: f64,
    coeffs: Vec<(i64, f64, f64)>,
}

impl From<&QSeries> for QSeriesFile {
    fn from(s: &QSeries) -> Self {
        Self {
            weight: s.weight,
            level: s.level,
            denom: s.denom,
            trunc: s.trunc_order(),
            coeffs: s.terms().map(|(n, c)| (n, c.re, c.im)).collect(),
        }
    }
}

impl TryFrom<QSeriesFile> for QSeries {
    type Error = Error;

    fn try_from(f: QSeriesFile) -> Result<Self> {
        let trunc = (f.trunc * f.denom as f64).round() as i64;
        let mut last = None;
        for &(n, _, _) in &f.coeffs {
            if last.is_some_and(|l| n <= l) {
                return Err(Error::InvalidInput("exponent numerators must be strictly increasing".into()));
            }
            last = Some(n);
        }
        QSeries::from_coeffs(
            f.denom,
            trunc,
            f.weight,
            f.level,
            f.coeffs.into_iter().map(|(n, re, im)| (n, Complex64::new(re, im))),
        )
    }
}

/// Power series in q with exact integer coefficients `c_0, …, c_{len−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSeries {
    pub coeffs: Vec<i128>,
}

impl IntSeries {
    pub fn one(len: usize) -> Self {
        let mut coeffs = vec![0; len];
        if len > 0 {
            coeffs[0] = 1;
        }
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Truncated product, or `None` on overflow.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let len = self.len().min(other.len());
        let mut out = vec![0i128; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = out[i + j].checked_add(a.checked_mul(b)?)?;
            }
        }
        Some(Self { coeffs: out })
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let len = self.len().min(other.len());
        let coeffs = (0..len)
            .map(|i| self.coeffs[i].checked_sub(other.coeffs[i]))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { coeffs })
    }

    /// Exact division by an integer; `None` if some coefficient is not divisible.
    pub fn exact_div(&self, d: i128) -> Option<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| if c % d == 0 { Some(c / d) } else { None })
            .collect::<Option<Vec<_>>>()?;
        Some(Self { coeffs })
    }

    pub fn checked_pow(&self, e: u32) -> Option<Self> {
        let mut out = Self::one(self.len());
        for _ in 0..e {
            out = out.checked_mul(self)?;
        }
        Some(out)
    }

    /// `∏_{n ≥ 1} (1 − qⁿ)^r` through `q^{len−1}`.
    pub fn euler_product_power(r: u32, len: usize) -> Option<Self> {
        // Power series of log-free form: multiply factor by factor.
        let mut out = Self::one(len);
        for n in 1..len {
            for _ in 0..r {
                for j in (n..len).rev() {
                    out.coeffs[j] = out.coeffs[j].checked_sub(out.coeffs[j - n])?;
                }
            }
        }
        Some(out)
    }

    /// Convert to a [`QSeries`] with integral exponents, shifted by `shift/denom`.
    pub fn to_qseries(&self, denom: u32, shift: i64, trunc: i64, weight: f64, level: u32) -> Result<QSeries> {
        let mut s = QSeries::zero(denom, trunc, weight, level)?;
        for (j, &c) in self.coeffs.iter().enumerate() {
            let n = shift + denom as i64 * j as i64;
            if n >= trunc {
                break;
            }
            if c != 0 {
                s.add_term(n, Complex64::new(c as f64, 0.0))?;
            }
        }
        Ok(s)
    }
}

/// Divisor power sum σ_s(n).
pub fn divisor_sigma(s: u32, n: u64) -> i128 {
    let mut total: i128 = 0;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += (d as i128).pow(s);
            let e = n / d;
            if e != d {
                total += (e as i128).pow(s);
            }
        }
        d += 1;
    }
    total
}

/// Exact normalized Eisenstein series `1 + C_k Σ σ_{k−1}(n) qⁿ` for k ∈ {4, 6}.
pub fn eisenstein_int(k: u32, len: usize) -> Result<IntSeries> {
    let c: i128 = match k {
        4 => 240,
        6 => -504,
        _ => return Err(Error::Unsupported(format!("Eisenstein series of weight {k}"))),
    };
    let mut coeffs = vec![0i128; len];
    if len > 0 {
        coeffs[0] = 1;
    }
    for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
        *slot = c * divisor_sigma(k - 1, n as u64);
    }
    Ok(IntSeries { coeffs })
}

/// Exact Δ = (E₄³ − E₆²)/1728 through `q^{len−1}`.
pub fn delta_int(len: usize) -> Result<IntSeries> {
    let e4 = eisenstein_int(4, len)?;
    let e6 = eisenstein_int(6, len)?;
    let num = e4
        .checked_pow(3)
        .and_then(|a| e6.checked_pow(2).and_then(|b| a.checked_sub(&b)))
        .ok_or(Error::Overflow("E4^3 - E6^2"))?;
    num.exact_div(1728)
        .ok_or_else(|| Error::Inconsistent("E4^3 - E6^2 is not divisible by 1728".into()))
}

/// Normalized Eisenstein series E_k (k ∈ {4, 6}) with exponents below `trunc`.
pub fn eisenstein_series(k: u32, trunc: i64) -> Result<QSeries> {
    if trunc < 1 {
        return Err(Error::InvalidInput("trunc must be ≥ 1".into()));
    }
    eisenstein_int(k, trunc as usize)?.to_qseries(1, 0, trunc, k as f64, 1)
}

/// Δ with exponents below `trunc`, built as (E₄³ − E₆²)/1728.
pub fn delta_series(trunc: i64) -> Result<QSeries> {
    if trunc < 2 {
        return Err(Error::InvalidInput("trunc must be ≥ 2".into()));
    }
    delta_int(trunc as usize)?.to_qseries(1, 0, trunc, 12.0, 1)
}

/// η^r with denominator 24 and exponents below `trunc`.
pub fn eta_power(r: u32, trunc: i64) -> Result<QSeries> {
    if r < 1 {
        return Err(Error::InvalidInput("η power must be ≥ 1".into()));
    }
    if trunc < 1 {
        return Err(Error::InvalidInput("trunc must be ≥ 1".into()));
    }
    let len = trunc as usize + 1;
    let trunc_num = 24 * trunc;
    let weight = r as f64 / 2.0;
    match IntSeries::euler_product_power(r, len) {
        Some(p) => p.to_qseries(24, r as i64, trunc_num, weight, 1),
        None => {
            log::warn!("η^{r} coefficients overflow 128 bits; falling back to floating point");
            let eta = IntSeries::euler_product_power(1, len).ok_or(Error::Overflow("η"))?;
            let base = eta.to_qseries(1, 0, len as i64, 0.5, 1)?;
            let mut out = QSeries::from_coeffs(1, len as i64, 0.0, 1, [(0, Complex64::new(1.0, 0.0))])?;
            for _ in 0..r {
                out = out.mul(&base)?;
            }
            let shifted = out.terms().map(|(n, c)| (r as i64 + 24 * n, c)).filter(|(n, _)| *n < trunc_num);
            QSeries::from_coeffs(24, trunc_num, weight, 1, shifted)
        }
    }
}
