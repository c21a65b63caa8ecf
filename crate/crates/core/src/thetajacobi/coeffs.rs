use super::theta::{scaled_gaussian_series, JacobiPoint, THETA_TOL};
use super::JacobiFunction;
use crate::error::{Error, Result};
use crate::hyperbolic::UpperHalfPoint;
use crate::qseries::{dedekind_eta, IntSeries};
use crate::sum::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

/// Tolerance of the discriminant-dependence check.
pub const DISCRIMINANT_TOL: f64 = 1e-10;

/// Truncated Fourier expansion `Σ c(n,r) qⁿ ζ^r` of a Jacobi cusp form.
///
/// Every stored `(n, r)` has `4mn − r² > 0` and `n ≤ trunc_n`; pairs that
/// are absent are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiFormCoeffs {
    weight: u32,
    index: u32,
    trunc_n: i64,
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffsFile {
    weight: u32,
    index: u32,
    trunc_n: i64,
    coeffs: Vec<(i64, i64, f64, f64)>,
}

impl JacobiFormCoeffs {
    pub fn new(weight: u32, index: u32, trunc_n: i64) -> Result<Self> {
        if weight < 5 {
            return Err(Error::InvalidInput(format!("weight must be ≥ 5, got {weight}")));
        }
        if index < 1 {
            return Err(Error::InvalidInput("index must be ≥ 1".into()));
        }
        if trunc_n < 1 {
            return Err(Error::InvalidInput(format!("trunc_n must be ≥ 1, got {trunc_n}")));
        }
        Ok(Self { weight, index, trunc_n, coeffs: BTreeMap::new() })
    }

    pub fn discriminant(&self, n: i64, r: i64) -> i64 {
        4 * self.index as i64 * n - r * r
    }

    /// Store `c(n, r)`; zero values are dropped.
    pub fn insert(&mut self, n: i64, r: i64, c: Complex64) -> Result<()> {
        if self.discriminant(n, r) <= 0 {
            return Err(Error::InvalidInput(format!("(n, r) = ({n}, {r}) is outside the cusp-form support")));
        }
        if n > self.trunc_n {
            return Err(Error::InvalidInput(format!("n = {n} exceeds trunc_n = {}", self.trunc_n)));
        }
        if c != Complex64::new(0.0, 0.0) {
            self.coeffs.insert((n, r), c);
        } else {
            self.coeffs.remove(&(n, r));
        }
        Ok(())
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn trunc_n(&self) -> i64 {
        self.trunc_n
    }

    pub fn coeff(&self, n: i64, r: i64) -> Complex64 {
        self.coeffs.get(&(n, r)).copied().unwrap_or_default()
    }

    /// Stored coefficients in lexicographic `(n, r)` order.
    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= s;
        }
        out
    }

    /// Check that `c(n,r)` depends only on `4mn − r²` and `r mod 2m` among
    /// pairs inside the truncation.
    pub fn check_discriminant_dependence(&self, tol: f64) -> Result<()> {
        let m2 = 2 * self.index as i64;
        let m4 = 4 * self.index as i64;
        let scale = self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for (&(n, r), &c) in &self.coeffs {
            let d = self.discriminant(n, r);
            let max_r = ((m4 * self.trunc_n - d) as f64).sqrt() as i64 + 1;
            let mut r2 = r.rem_euclid(m2) - m2 * ((max_r / m2) + 1);
            while r2 <= max_r {
                let n2 = (d + r2 * r2) / m4;
                if n2 <= self.trunc_n && (n2, r2) != (n, r) {
                    let other = self.coeff(n2, r2);
                    if (other - c).norm() > tol * scale {
                        return Err(Error::Inconsistent(format!(
                            "c({n},{r}) = {c} but c({n2},{r2}) = {other} at discriminant {d}"
                        )));
                    }
                }
                r2 += m2;
            }
        }
        Ok(())
    }

    /// `Σ c(n,r) qⁿ ζ^r · e^{−2πm y²/η}` over the stored terms.
    pub fn eval_scaled(&self, p: &JacobiPoint) -> Complex64 {
        let (xi, eta) = (p.tau.xi(), p.tau.eta());
        let (x, y) = (p.x(), p.y());
        let g = p.gaussian_exponent(self.index as f64);
        let mut acc = ComplexSum::new();
        for (&(n, r), &c) in &self.coeffs {
            let (n, r) = (n as f64, r as f64);
            let re = -2.0 * PI * (n * eta + r * y) - g;
            let im = 2.0 * PI * (n * xi + r * x);
            acc.add(c * Complex64::from_polar(re.exp(), im));
        }
        acc.value()
    }

    /// `Σ c(n,r) qⁿ ζ^r` over the stored terms.
    pub fn eval(&self, p: &JacobiPoint) -> Complex64 {
        self.eval_scaled(p) * p.gaussian_exponent(self.index as f64).exp()
    }

    pub fn to_json(&self) -> Result<String> {
        let f = CoeffsFile {
            weight: self.weight,
            index: self.index,
            trunc_n: self.trunc_n,
            coeffs: self.coeffs.iter().map(|(&(n, r), c)| (n, r, c.re, c.im)).collect(),
        };
        Ok(serde_json::to_string_pretty(&f)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: CoeffsFile = serde_json::from_str(s)?;
        let mut out = Self::new(f.weight, f.index, f.trunc_n)?;
        for (n, r, re, im) in f.coeffs {
            if out.coeffs.contains_key(&(n, r)) {
                return Err(Error::InvalidInput(format!("duplicate coefficient ({n}, {r})")));
            }
            out.insert(n, r, Complex64::new(re, im))?;
        }
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl JacobiFunction for JacobiFormCoeffs {
    fn weight(&self) -> f64 {
        self.weight as f64
    }
    fn index(&self) -> u32 {
        self.index
    }
    fn eval_scaled(&self, p: &JacobiPoint) -> Result<Complex64> {
        Ok(JacobiFormCoeffs::eval_scaled(self, p))
    }
}

/// Odd theta `ϑ(τ,z) = Σ (−1)ⁿ q^{(n+½)²/2} ζ^{n+½}` scaled by `e^{−πy²/η}`.
pub fn odd_theta_scaled(p: &JacobiPoint) -> Result<Complex64> {
    let v = scaled_gaussian_series(1.0, 0.5, &p.tau, p.z, THETA_TOL, |n| if n % 2 == 0 { 1.0 } else { -1.0 })?;
    Ok(v.value)
}

/// The weight-10 index-1 cusp form `ϑ²η¹⁸` evaluated through its product
/// form, which stays accurate wherever the theta and eta series converge.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Phi10Product;

impl JacobiFunction for Phi10Product {
    fn weight(&self) -> f64 {
        10.0
    }
    fn index(&self) -> u32 {
        1
    }
    fn eval_scaled(&self, p: &JacobiPoint) -> Result<Complex64> {
        Ok(odd_theta_scaled(p)?.powi(2) * dedekind_eta(&p.tau).powi(18))
    }
}

/// Fourier coefficients of `ϑ²η¹⁸` up to `qⁿ`, `n ≤ trunc`, normalized so
/// the first nonzero coefficient in `(n, r)` order is 1.
///
/// The construction is accepted only after the support, discriminant and
/// transformation checks pass.
pub fn phi_10_1(trunc: i64) -> Result<JacobiFormCoeffs> {
    if trunc < 3 {
        return Err(Error::InvalidInput(format!("trunc must be ≥ 3, got {trunc}")));
    }
    // Short expansions cannot resolve the transformation checks, so the
    // checks run on a longer expansion that is cut back afterwards.
    let full = build_phi_10_1(trunc.max(VALIDATION_TRUNC))?;
    full.check_discriminant_dependence(DISCRIMINANT_TOL)?;
    validate_transformations(&full)?;
    let mut out = JacobiFormCoeffs::new(10, 1, trunc)?;
    for ((n, r), c) in full.terms().filter(|((n, _), _)| *n <= trunc) {
        out.insert(n, r, c)?;
    }
    Ok(out)
}

/// Expansion length used by the construction-time checks.
const VALIDATION_TRUNC: i64 = 24;

fn build_phi_10_1(trunc: i64) -> Result<JacobiFormCoeffs> {
    let eta18 = IntSeries::euler_product_power(18, trunc as usize + 1)
        .ok_or(Error::Overflow("η¹⁸ coefficients"))?;
    // ϑ² term (n1, n2): q-exponent (a² + b²)/8 with a = 2n1+1, b = 2n2+1,
    // ζ-exponent n1 + n2 + 1, sign (−1)^{n1+n2}. η¹⁸ contributes q^{3/4 + j}.
    let mut acc: BTreeMap<(i64, i64), i128> = BTreeMap::new();
    let nmax = ((8 * trunc) as f64).sqrt() as i64 + 1;
    for n1 in -nmax - 1..=nmax {
        for n2 in -nmax - 1..=nmax {
            let (a, b) = (2 * n1 + 1, 2 * n2 + 1);
            let e24 = 3 * (a * a + b * b) + 18;
            debug_assert_eq!(e24 % 24, 0);
            let base = e24 / 24;
            if base > trunc {
                continue;
            }
            let r = n1 + n2 + 1;
            let sign: i128 = if (n1 + n2).rem_euclid(2) == 0 { 1 } else { -1 };
            for j in 0..=(trunc - base) {
                let c = eta18.coeffs[j as usize];
                if c != 0 {
                    *acc.entry((base + j, r)).or_insert(0) += sign * c;
                }
            }
        }
    }
    let lead = acc.values().copied().find(|&c| c != 0).ok_or_else(|| Error::Inconsistent("ϑ²η¹⁸ vanished".into()))?;
    let mut out = JacobiFormCoeffs::new(10, 1, trunc)?;
    for ((n, r), c) in acc {
        if c != 0 {
            out.insert(n, r, Complex64::new(c as f64 / lead as f64, 0.0))?;
        }
    }
    Ok(out)
}

/// Relative tolerance of the construction-time transformation checks.
const TRANSFORM_TOL: f64 = 1e-8;

fn validate_transformations(phi: &JacobiFormCoeffs) -> Result<()> {
    let samples = [(0.13, 1.07, 0.31, 0.22), (-0.27, 0.93, 0.64, -0.18)];
    for (xi, eta, x, y) in samples {
        let p = JacobiPoint::from_parts(xi, eta, x, y)?;
        let base = phi.pet_norm(&p)?;
        let tau = p.tau.to_complex();
        let s_tau = UpperHalfPoint::from_complex(-1.0 / tau)?;
        let moved = [
            JacobiPoint::new(s_tau, p.z / tau),
            JacobiPoint::new(p.tau.translate(1.0), p.z),
            JacobiPoint::new(p.tau, p.z + tau),
        ];
        for q in moved {
            let v = phi.pet_norm(&q)?;
            if (v - base).abs() > TRANSFORM_TOL * base {
                return Err(Error::Inconsistent(format!(
                    "pointwise norm not invariant: {base} at {p:?} vs {v} at {q:?}"
                )));
            }
        }
    }
    Ok(())
}
