//! Geometry of the upper half-plane: points, unimodular matrices and their
//! Möbius action, the displacement function, hyperbolic distance, and
//! reduction to the standard fundamental domain of SL₂(ℤ).

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Boundary tolerance for membership in the standard fundamental domain.
pub const REDUCTION_TOL: f64 = 1e-12;

/// Hard cap on translation/inversion steps in [`reduce_to_fundamental_domain`].
pub const REDUCTION_CAP: usize = 10_000;

/// A point τ = ξ + iη of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    xi: f64,
    eta: f64,
}

impl UpperHalfPoint {
    pub fn new(xi: f64, eta: f64) -> Result<Self> {
        if !xi.is_finite() || !eta.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite point {xi}+{eta}i")));
        }
        if eta <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "imaginary part must be positive, got {eta}"
            )));
        }
        Ok(Self { xi, eta })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// The point i.
    pub fn i() -> Self {
        Self { xi: 0.0, eta: 1.0 }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.xi, self.eta)
    }

    /// Translate by a real amount (stays in ℍ).
    pub fn translate(&self, t: f64) -> Self {
        Self { xi: self.xi + t, eta: self.eta }
    }
}

impl fmt::Display for UpperHalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_complex(self.to_complex()))
    }
}

impl FromStr for UpperHalfPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_complex(parse_complex(s)?)
    }
}

/// Format a complex number in the `re+imi` literal syntax.
pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parse a complex literal such as `0.5+1.2i`, `-0.3-2i`, `i`, `2i` or `1.5`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex literal {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let parse_imag = |p: &str| -> Result<f64> {
        let body = p.strip_suffix('i').ok_or_else(bad)?;
        match body {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            b => b.parse::<f64>().map_err(|_| bad()),
        }
    };
    if !t.ends_with('i') {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    }
    // Split at the last sign that is not leading and not an exponent sign.
    let bytes = t.as_bytes();
    let mut split = None;
    for j in (1..bytes.len()).rev() {
        if (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E') {
            split = Some(j);
            break;
        }
    }
    let z = match split {
        Some(j) => {
            let re = t[..j].parse::<f64>().map_err(|_| bad())?;
            Complex64::new(re, parse_imag(&t[j..])?)
        }
        None => Complex64::new(0.0, parse_imag(&t)?),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

/// An integer matrix `[[a, b], [c, d]]` with determinant 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self { a, b, c, d })
    }

    pub const fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    /// S = [[0, −1], [1, 0]].
    pub const fn s() -> Self {
        Self { a: 0, b: -1, c: 1, d: 0 }
    }

    /// Tⁿ = [[1, n], [0, 1]].
    pub const fn t(n: i64) -> Self {
        Self { a: 1, b: n, c: 0, d: 1 }
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.entries().iter().map(|e| e.abs()).max().unwrap_or(0)
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn neg(&self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Matrix product `self · other`, or `None` on overflow.
    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let f = |x: i64, y: i64, z: i64, w: i64| x.checked_mul(y)?.checked_add(z.checked_mul(w)?);
        Some(Self {
            a: f(self.a, o.a, self.b, o.c)?,
            b: f(self.a, o.b, self.b, o.d)?,
            c: f(self.c, o.a, self.d, o.c)?,
            d: f(self.c, o.b, self.d, o.d)?,
        })
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.checked_mul(o).ok_or(Error::Overflow("matrix product"))
    }

    /// Möbius action `(aτ + b)/(cτ + d)`.
    pub fn apply(&self, tau: &UpperHalfPoint) -> UpperHalfPoint {
        mobius_apply(self, tau)
    }

    /// The automorphy factor `cτ + d`.
    pub fn cocycle(&self, tau: &UpperHalfPoint) -> Complex64 {
        Complex64::new(self.c as f64 * tau.xi + self.d as f64, self.c as f64 * tau.eta)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Möbius action of `g` on `tau`. The imaginary part is computed as
/// `η/|cτ+d|²`, so it is positive for every input.
pub fn mobius_apply(g: &GroupElement, tau: &UpperHalfPoint) -> UpperHalfPoint {
    let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
    let (x, y) = (tau.xi, tau.eta);
    let den = (c * x + d) * (c * x + d) + c * c * y * y;
    let num_re = (a * x + b) * (c * x + d) + a * c * y * y;
    UpperHalfPoint { xi: num_re / den, eta: y / den }
}

/// `σ(τ,τ′) − 1 = |τ − τ′|²/(4ηη′)`, accurate when the points are close.
pub fn displacement_excess(tau: &UpperHalfPoint, tau2: &UpperHalfPoint) -> f64 {
    let dx = tau.xi - tau2.xi;
    let dy = tau.eta - tau2.eta;
    (dx * dx + dy * dy) / (4.0 * tau.eta * tau2.eta)
}

/// Displacement `σ(τ,τ′) = |τ − τ̄′|²/(4ηη′) = cosh²(dist/2)`.
pub fn displacement(tau: &UpperHalfPoint, tau2: &UpperHalfPoint) -> f64 {
    let dx = tau.xi - tau2.xi;
    let sy = tau.eta + tau2.eta;
    (dx * dx + sy * sy) / (4.0 * tau.eta * tau2.eta)
}

/// Hyperbolic distance, computed as `2·asinh(√(σ − 1))`.
pub fn hyp_distance(tau: &UpperHalfPoint, tau2: &UpperHalfPoint) -> f64 {
    2.0 * displacement_excess(tau, tau2).sqrt().asinh()
}

/// Hyperbolic distance corresponding to a displacement value.
pub fn distance_from_displacement(sigma: f64) -> f64 {
    2.0 * (sigma - 1.0).max(0.0).sqrt().asinh()
}

/// Displacement corresponding to a hyperbolic distance.
pub fn displacement_from_distance(rho: f64) -> f64 {
    let c = (0.5 * rho).cosh();
    c * c
}

/// Membership in the standard fundamental domain `{|ξ| ≤ ½, |τ| ≥ 1}` up to `tol`.
pub fn in_fundamental_domain(tau: &UpperHalfPoint, tol: f64) -> bool {
    tau.xi.abs() <= 0.5 + tol && tau.xi * tau.xi + tau.eta * tau.eta >= 1.0 - tol
}

/// Reduce `tau` into the standard fundamental domain.
///
/// Returns the reduced point and the element `g` with `g·τ = τ_F`. Boundary
/// points (up to [`REDUCTION_TOL`]) are left where they are.
pub fn reduce_to_fundamental_domain(tau: &UpperHalfPoint) -> Result<(UpperHalfPoint, GroupElement)> {
    if !tau.xi.is_finite() || !tau.eta.is_finite() || tau.eta <= 0.0 {
        return Err(Error::InvalidInput(format!("cannot reduce {tau:?}")));
    }
    let mut g = GroupElement::identity();
    let mut z = *tau;
    for _ in 0..REDUCTION_CAP {
        if z.xi.abs() > 0.5 + REDUCTION_TOL {
            let n = z.xi.round();
            if n.abs() > 9.0e15 {
                return Err(Error::Overflow("translation in reduction"));
            }
            let t = GroupElement::t(-(n as i64));
            g = t.mul(&g)?;
            z = UpperHalfPoint { xi: z.xi - n, eta: z.eta };
            continue;
        }
        if z.xi * z.xi + z.eta * z.eta < 1.0 - REDUCTION_TOL {
            g = GroupElement::s().mul(&g)?;
            z = mobius_apply(&GroupElement::s(), &z);
            continue;
        }
        return Ok((z, g));
    }
    Err(Error::ReductionDiverged(REDUCTION_CAP))
}

/// Truncation height Y for `F_Y` and the cusp neighborhoods.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainTruncation {
    y: f64,
}

impl DomainTruncation {
    pub fn new(y: f64) -> Result<Self> {
        if !(y.is_finite() && y > 0.0) {
            return Err(Error::InvalidInput(format!("truncation height must be positive, got {y}")));
        }
        Ok(Self { y })
    }

    pub fn height(&self) -> f64 {
        self.y
    }
}

/// Whether a reduced point lies in the cusp neighborhood `{η ≥ Y}` at ∞.
pub fn in_cusp_neighborhood(tau: &UpperHalfPoint, trunc: &DomainTruncation) -> bool {
    tau.eta >= trunc.y
}
