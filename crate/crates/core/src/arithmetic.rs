//! Arithmetic of SL₂(ℤ) acting on ℍ: enumeration of group elements by
//! displacement, the counting function and its integral inequality,
//! congruence subgroups Γ₀(N) and Γ₀,₁(N), and their indices.

use crate::error::{Error, Result};
use crate::hyperbolic::{
    displacement_excess, displacement_from_distance, mobius_apply, GroupElement, UpperHalfPoint,
};
use crate::quad::{integrate, integrate_semi_infinite};
use crate::sum::NeumaierSum;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Default cap on the number of candidate (c, d, a) triples examined by one enumeration.
pub const DEFAULT_WORK_CAP: u64 = 400_000_000;

/// Completeness budget for [`enumerate_elements`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum EnumerationBudget {
    /// Only matrices with all entries bounded by this value may be produced.
    MaxEntry(i64),
    /// All γ with σ(τ, γτ) at most this value are produced.
    MaxDisplacement(f64),
}

/// A group element together with its displacement excess σ(τ,γτ) − 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Enumerated {
    pub element: GroupElement,
    pub excess: f64,
}

impl Enumerated {
    pub fn displacement(&self) -> f64 {
        1.0 + self.excess
    }

    pub fn distance(&self) -> f64 {
        2.0 * self.excess.sqrt().asinh()
    }
}

/// All γ ∈ SL₂(ℤ) with σ(τ, γτ) ≤ `radius`, sorted by (σ, a, b, c, d).
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub tau: UpperHalfPoint,
    pub elements: Vec<Enumerated>,
    /// Displacement up to which the list is complete.
    pub radius: f64,
}

/// Upper bound on |entries| of any γ with σ(τ, γτ) ≤ `radius`.
///
/// Conjugating γ by τ ↦ (τ − ξ)/η gives a matrix whose squared Frobenius norm
/// is 4σ − 2, which bounds each entry of the conjugate by β = √(4σ − 2).
pub fn entry_bound(tau: &UpperHalfPoint, radius: f64) -> f64 {
    let beta = (4.0 * radius - 2.0).max(0.0).sqrt();
    let (x, y) = (tau.xi().abs(), tau.eta());
    let c = beta / y;
    let ad = x * c + beta;
    let b = y * beta + 2.0 * x * beta + x * x * c;
    c.max(ad).max(b)
}

fn largest_radius_within_entries(tau: &UpperHalfPoint, max_entry: i64) -> Option<f64> {
    let m = max_entry as f64;
    if entry_bound(tau, 1.0) > m {
        return None;
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    while entry_bound(tau, hi) <= m {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if entry_bound(tau, mid) <= m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Enumerate group elements by displacement from `tau`.
///
/// With [`EnumerationBudget::MaxDisplacement`] every γ with σ(τ,γτ) ≤ R is
/// returned. With [`EnumerationBudget::MaxEntry`] the largest R whose entry
/// bound fits is used, and that R is reported as the completeness radius.
pub fn enumerate_elements(tau: &UpperHalfPoint, budget: EnumerationBudget) -> Result<Enumeration> {
    match budget {
        EnumerationBudget::MaxDisplacement(r) => enumerate_with_cap(tau, r, DEFAULT_WORK_CAP),
        EnumerationBudget::MaxEntry(m) => {
            if m < 1 {
                return Err(Error::InvalidInput(format!("max_entry must be ≥ 1, got {m}")));
            }
            let r = largest_radius_within_entries(tau, m).ok_or(Error::Truncated { radius: 1.0 })?;
            enumerate_with_cap(tau, r, DEFAULT_WORK_CAP)
        }
    }
}

/// Enumerate all γ with σ(τ,γτ) ≤ `radius`, examining at most `work_cap`
/// candidate triples. Exceeding the cap yields [`Error::Truncated`] with the
/// largest radius that was fully covered.
pub fn enumerate_with_cap(tau: &UpperHalfPoint, radius: f64, work_cap: u64) -> Result<Enumeration> {
    if !(radius.is_finite() && radius >= 1.0) {
        return Err(Error::InvalidInput(format!("max_displacement must be ≥ 1, got {radius}")));
    }
    let (x, y) = (tau.xi(), tau.eta());
    let beta = (4.0 * radius - 2.0).sqrt();
    let slack = 1e-9 * (1.0 + beta);
    let cmax = (beta / y + slack).floor() as i64;
    let mut out = Vec::new();
    let push = |g: GroupElement, out: &mut Vec<Enumerated>| {
        let e = displacement_excess(tau, &mobius_apply(&g, tau));
        if 1.0 + e <= radius {
            out.push(Enumerated { element: g, excess: e });
        }
    };

    let bmax = (y * beta + slack).floor() as i64;
    let xb = x.round() as i64;
    for s in [1i64, -1] {
        for b in -bmax - xb.abs()..=bmax + xb.abs() {
            push(GroupElement::new(s, b, 0, s)?, &mut out);
        }
    }

    let mut work: u64 = 0;
    // Process |c| in increasing order so a truncation still leaves every
    // element with smaller |c| enumerated.
    for cabs in 1..=cmax {
        for c in [cabs, -cabs] {
            let cx = c as f64 * x;
            let dlo = (-cx - beta - slack).ceil() as i64;
            let dhi = (-cx + beta + slack).floor() as i64;
            let alo = (cx - beta - slack).ceil() as i64;
            let ahi = (cx + beta + slack).floor() as i64;
            let span = (ahi - alo + 1).max(0) as u64;
            for d in dlo..=dhi {
                work += span;
                if work > work_cap {
                    // Elements with |c| < cabs are complete, and |c| ≥ cabs
                    // forces 4σ − 2 ≥ (cabs·y)².
                    let covered = (2.0 + (cabs as f64 * y).powi(2)) / 4.0;
                    return Err(Error::Truncated { radius: covered.max(1.0) });
                }
                for a in alo..=ahi {
                    let ad = a as i128 * d as i128 - 1;
                    if ad % c as i128 != 0 {
                        continue;
                    }
                    let b = ad / c as i128;
                    let b = i64::try_from(b).map_err(|_| Error::Overflow("enumeration"))?;
                    push(GroupElement::new(a, b, c, d)?, &mut out);
                }
            }
        }
    }
    out.sort_by(|p, q| {
        p.excess
            .total_cmp(&q.excess)
            .then_with(|| p.element.entries().cmp(&q.element.entries()))
    });
    out.dedup_by(|p, q| p.element == q.element);
    Ok(Enumeration { tau: *tau, elements: out, radius })
}

/// Majorant for the number of γ ∈ SL₂(ℤ) with σ(τ, γτ) ≤ s.
pub fn lattice_count_upper(tau: &UpperHalfPoint, s: f64) -> f64 {
    if s < 1.0 {
        return 0.0;
    }
    let y = tau.eta();
    let beta = (4.0 * s - 2.0).sqrt();
    let mut n = 2.0 * (2.0 * y * beta + 1.0);
    let cmax = beta / y;
    if cmax >= 1.0 {
        n += 2.0 * (2.0 * beta + 1.0) * (2.0 * beta * (1.0 + cmax.ln()) + cmax);
    }
    n
}

/// Rigorous upper bound for Σ_{σ(τ,γτ) > R} σ(τ,γτ)^{−k/2} over all of SL₂(ℤ).
///
/// Stieltjes integration by parts against [`lattice_count_upper`]; the
/// returned value includes the quadrature error estimate.
pub fn displacement_tail_bound(tau: &UpperHalfPoint, radius: f64, k: f64) -> Result<f64> {
    if k <= 2.0 {
        return Err(Error::InvalidInput(format!("tail bound needs k > 2, got {k}")));
    }
    let h = 0.5 * k;
    // s = R·e^u; the majorant has a jump where β/y = 1.
    let integrand = |u: f64| {
        let s = radius * u.exp();
        lattice_count_upper(tau, s) * h * (-(h) * s.ln()).exp() * s / s
    };
    let y = tau.eta();
    let s_jump = (y * y + 2.0) / 4.0;
    let mut total = 0.0;
    let mut start = 0.0;
    if s_jump > radius {
        let uj = (s_jump / radius).ln();
        let r = integrate(integrand, 0.0, uj, 1e-300, 1e-10)?;
        total += r.value + r.error;
        start = uj;
    }
    let r = integrate_semi_infinite(|u| integrand(start + u), 0.0, 1e-300, 1e-10)?;
    total += r.value + r.error;
    Ok(total * (1.0 + 1e-9))
}

/// Which group elements are removed before counting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exclusion {
    /// Cusp stabilizers, elliptic elements and the center.
    StabilizersAndElliptic,
    /// Elliptic elements and the center only.
    EllipticOnly,
}

/// Cusp, elliptic and injectivity data of a Fuchsian group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupData {
    pub num_cusps: usize,
    pub elliptic_orders: Vec<u32>,
    pub injectivity_radius: f64,
    pub center_order: u32,
    pub cusp_scalings: Vec<GroupElement>,
    /// How `injectivity_radius` was obtained.
    pub radius_provenance: String,
}

impl GroupData {
    pub fn new(
        num_cusps: usize,
        elliptic_orders: Vec<u32>,
        injectivity_radius: f64,
        center_order: u32,
        cusp_scalings: Vec<GroupElement>,
    ) -> Result<Self> {
        if !(injectivity_radius.is_finite() && injectivity_radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "injectivity radius must be positive, got {injectivity_radius}"
            )));
        }
        if !(center_order == 1 || center_order == 2) {
            return Err(Error::InvalidInput(format!("center order must be 1 or 2, got {center_order}")));
        }
        if let Some(o) = elliptic_orders.iter().find(|&&o| o < 2) {
            return Err(Error::InvalidInput(format!("elliptic order must be ≥ 2, got {o}")));
        }
        if cusp_scalings.len() != num_cusps {
            return Err(Error::InvalidInput(format!(
                "{num_cusps} cusps but {} scaling matrices",
                cusp_scalings.len()
            )));
        }
        Ok(Self {
            num_cusps,
            elliptic_orders,
            injectivity_radius,
            center_order,
            cusp_scalings,
            radius_provenance: "supplied".into(),
        })
    }

    /// Σ_j (m_j − 1).
    pub fn elliptic_excess(&self) -> f64 {
        self.elliptic_orders.iter().map(|&m| (m - 1) as f64).sum()
    }

    /// Whether γ is removed from the counting set.
    pub fn is_excluded(&self, g: &GroupElement, exclusion: Exclusion) -> bool {
        let [a, b, c, d] = g.entries();
        if b == 0 && c == 0 && a == d && a.abs() == 1 {
            return true;
        }
        if g.trace().abs() < 2 {
            return true;
        }
        if exclusion == Exclusion::StabilizersAndElliptic {
            for s in &self.cusp_scalings {
                let [p, _, r, _] = s.entries().map(|e| e as i128);
                let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
                let conj_c = -r * (a * p + b * r) + p * (c * p + d * r);
                if conj_c == 0 {
                    return true;
                }
            }
        }
        false
    }
}

static MODULAR_GROUP: OnceLock<GroupData> = OnceLock::new();

/// Grid resolution used for the stored injectivity radius of SL₂(ℤ).
pub const MODULAR_RADIUS_GRID: usize = 41;
/// Truncation height used for the stored injectivity radius of SL₂(ℤ).
pub const MODULAR_RADIUS_HEIGHT: f64 = 2.0;

/// Data for SL₂(ℤ): one cusp with identity scaling, elliptic orders {2, 3},
/// center {±1}, and a numerically computed injectivity radius.
pub fn modular_group() -> &'static GroupData {
    MODULAR_GROUP.get_or_init(|| {
        let skeleton = GroupData {
            num_cusps: 1,
            elliptic_orders: vec![2, 3],
            injectivity_radius: 1.0,
            center_order: 2,
            cusp_scalings: vec![GroupElement::identity()],
            radius_provenance: String::new(),
        };
        let r = injectivity_radius_grid(
            &skeleton,
            MODULAR_RADIUS_HEIGHT,
            MODULAR_RADIUS_GRID,
            Exclusion::StabilizersAndElliptic,
        )
        .expect("injectivity radius grid on F_2");
        GroupData {
            injectivity_radius: r.radius,
            radius_provenance: format!(
                "min over {n}x{n} grid on F_Y, Y={y}, corners included; argmin {} by {}",
                r.argmin,
                r.element,
                n = MODULAR_RADIUS_GRID,
                y = MODULAR_RADIUS_HEIGHT
            ),
            ..skeleton
        }
    })
}

/// Minimum displacement distance found over a grid.
#[derive(Clone, Copy, Debug)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub argmin: UpperHalfPoint,
    pub element: GroupElement,
}

/// Sample points of the truncated domain `{|ξ| ≤ ½, |τ| ≥ 1, η ≤ Y}` on an
/// `n × n` grid that follows the lower arc. Corners are included.
pub fn truncated_domain_grid(y_max: f64, n: usize) -> Vec<UpperHalfPoint> {
    let n = n.max(2);
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        let xi = -0.5 + i as f64 / (n - 1) as f64;
        let lo = (1.0 - xi * xi).sqrt();
        for j in 0..n {
            let eta = lo + (y_max - lo).max(0.0) * j as f64 / (n - 1) as f64;
            pts.push(UpperHalfPoint::new(xi, eta).expect("grid point in ℍ"));
        }
    }
    pts
}

/// Approximate `inf dist(τ, γτ)` over non-excluded γ and grid points of `F_Y`.
///
/// The grid value is an upper estimate of the true infimum.
pub fn injectivity_radius_grid(
    group: &GroupData,
    y_max: f64,
    n: usize,
    exclusion: Exclusion,
) -> Result<RadiusEstimate> {
    let mut best: Option<RadiusEstimate> = None;
    for tau in truncated_domain_grid(y_max, n) {
        // The translation T moves every point of F by σ ≤ 4/3, so a radius of
        // 2 always contains a candidate; grow if nothing survives.
        let mut radius = 2.0;
        loop {
            let en = enumerate_with_cap(&tau, radius, DEFAULT_WORK_CAP)?;
            let hit = en
                .elements
                .iter()
                .find(|e| !group.is_excluded(&e.element, exclusion));
            if let Some(e) = hit {
                let d = e.distance();
                if best.map_or(true, |b| d < b.radius) {
                    best = Some(RadiusEstimate { radius: d, argmin: tau, element: e.element });
                }
                break;
            }
            radius *= 2.0;
            if radius > 1e6 {
                return Err(Error::Inconsistent(format!("no counted element near {tau}")));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidInput("empty grid".into()))
}

impl Enumeration {
    /// Counted elements with hyperbolic distance at most `rho`.
    pub fn counted_within<'a>(
        &'a self,
        rho: f64,
        group: &'a GroupData,
        exclusion: Exclusion,
    ) -> Result<impl Iterator<Item = &'a Enumerated> + 'a> {
        if displacement_from_distance(rho) > self.radius * (1.0 + 1e-12) {
            return Err(Error::Truncated { radius: self.radius });
        }
        Ok(self
            .elements
            .iter()
            .filter(move |e| e.distance() <= rho && !group.is_excluded(&e.element, exclusion)))
    }
}

fn enumeration_for_distance(tau: &UpperHalfPoint, rho: f64) -> Result<Enumeration> {
    let r = displacement_from_distance(rho) * (1.0 + 1e-9) + 1e-12;
    enumerate_with_cap(tau, r, DEFAULT_WORK_CAP)
}

/// `N_Γ(τ; ρ)`: number of γ outside the cusp and elliptic stabilizers and
/// the identity with `dist(τ, γτ) ≤ ρ`. Concrete group: SL₂(ℤ).
pub fn counting_function(tau: &UpperHalfPoint, rho: f64, group: &GroupData) -> Result<usize> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::InvalidInput(format!("ρ must be ≥ 0, got {rho}")));
    }
    let en = enumeration_for_distance(tau, rho)?;
    let count = en.counted_within(rho, group, Exclusion::StabilizersAndElliptic)?.count();
    Ok(count)
}

/// `ln cosh x`, stable for large |x|.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln sinh x` for x > 0.
pub fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
}

/// The three terms of the counting-inequality right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JlRhs {
    pub stieltjes: f64,
    pub boundary: f64,
    pub tail: f64,
    pub total: f64,
}

/// Right-hand side of the counting inequality with `f(ρ) = cosh^{−k}(ρ/2)`.
pub fn jl_rhs(
    k: f64,
    delta: f64,
    r_gamma: f64,
    center_order: u32,
    tau: &UpperHalfPoint,
    group: &GroupData,
) -> Result<JlRhs> {
    if k < 5.0 {
        return Err(Error::Precondition(format!("k must be ≥ 5, got {k}")));
    }
    if !(r_gamma > 0.0) {
        return Err(Error::Precondition(format!("r must be positive, got {r_gamma}")));
    }
    if !(delta >= 0.5 * r_gamma) {
        return Err(Error::Precondition(format!("δ = {delta} is below r/2 = {}", 0.5 * r_gamma)));
    }
    let cent = center_order as f64;
    let q = 0.25 * r_gamma;
    let f = |rho: f64| (-k * ln_cosh(0.5 * rho)).exp();

    let en = enumeration_for_distance(tau, delta)?;
    let mut st = NeumaierSum::new();
    for e in en.counted_within(delta, group, Exclusion::StabilizersAndElliptic)? {
        st.add(f(e.distance()));
    }
    let stieltjes = st.value();
    let boundary = 2.0 * cent * q.cosh() / q.sinh() * delta.sinh() * f(delta);
    let tail = cent / (2.0 * q.sinh().powi(2)) * jl_tail_integral(k, delta, r_gamma)?;
    Ok(JlRhs { stieltjes, boundary, tail, total: stieltjes + boundary + tail })
}

/// `∫_δ^∞ cosh^{−k}(ρ/2)·sinh(ρ + r/2) dρ` by adaptive quadrature.
pub fn jl_tail_integral(k: f64, delta: f64, r: f64) -> Result<f64> {
    let g = |rho: f64| (-k * ln_cosh(0.5 * rho) + ln_sinh(rho + 0.5 * r)).exp();
    Ok(integrate_semi_infinite(g, delta, 1e-12, 1e-13)?.value)
}

/// Left-hand side of the counting inequality: Σ over counted γ of f(dist).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JlLhs {
    /// Sum over counted elements with σ ≤ `radius`.
    pub partial: f64,
    /// Rigorous bound on the remainder.
    pub tail_bound: f64,
    pub radius: f64,
}

impl JlLhs {
    /// Upper estimate of the full sum.
    pub fn upper(&self) -> f64 {
        self.partial + self.tail_bound
    }
}

/// Evaluate the counting-inequality left-hand side at `tau` with the tail
/// below `tail_tol`.
pub fn jl_lhs(k: f64, tau: &UpperHalfPoint, group: &GroupData, tail_tol: f64) -> Result<JlLhs> {
    if k < 5.0 {
        return Err(Error::Precondition(format!("k must be ≥ 5, got {k}")));
    }
    let radius = radius_for_tail(tau, k, tail_tol)?;
    let en = enumerate_with_cap(tau, radius, DEFAULT_WORK_CAP)?;
    let mut s = NeumaierSum::new();
    for e in &en.elements {
        if !group.is_excluded(&e.element, Exclusion::StabilizersAndElliptic) {
            s.add((-0.5 * k * e.displacement().ln()).exp());
        }
    }
    Ok(JlLhs { partial: s.value(), tail_bound: displacement_tail_bound(tau, radius, k)?, radius })
}

/// Smallest radius on a doubling ladder starting at 4 whose tail bound is below `tol`.
pub fn radius_for_tail(tau: &UpperHalfPoint, k: f64, tol: f64) -> Result<f64> {
    let mut radius = 4.0;
    loop {
        let t = displacement_tail_bound(tau, radius, k)?;
        if t <= tol {
            return Ok(radius);
        }
        radius *= 1.5;
        if radius > 1e7 {
            return Err(Error::TailBound { bound: t, tol });
        }
    }
}

/// γ ∈ Γ₀(N): c ≡ 0 mod N.
pub fn is_member_gamma0(g: &GroupElement, n: i64) -> bool {
    n >= 1 && g.c().rem_euclid(n) == 0
}

/// γ ∈ Γ₀,₁(N): c ≡ 0 and d ≡ 1 mod N.
pub fn is_member_gamma01(g: &GroupElement, n: i64) -> bool {
    n >= 1 && g.c().rem_euclid(n) == 0 && (g.d() - 1).rem_euclid(n) == 0
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut ps = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            ps.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        ps.push(n);
    }
    ps
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, p| acc / p * (p - 1))
}

/// `[SL₂(ℤ) : Γ₀(N)] = N·∏_{p|N}(1 + 1/p)`.
pub fn index_gamma0(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, p| acc / p * (p + 1))
}

/// `[SL₂(ℤ) : Γ₀,₁(4m)] = [SL₂(ℤ) : Γ₀(4m)]·φ(4m)`.
pub fn index_gamma01(m: u64) -> Result<u64> {
    if m < 1 {
        return Err(Error::InvalidInput("index m must be ≥ 1".into()));
    }
    Ok(index_gamma0(4 * m) * euler_phi(4 * m))
}

/// The variant with φ(m) in place of φ(4m), kept for comparison only.
pub fn index_gamma01_with_phi_m(m: u64) -> Result<u64> {
    if m < 1 {
        return Err(Error::InvalidInput("index m must be ≥ 1".into()));
    }
    Ok(index_gamma0(4 * m) * euler_phi(m))
}

/// Number of copies of the SL₂(ℤ) fundamental domain tiling one of Γ₀,₁(4m),
/// i.e. the index of its image in PSL₂(ℤ). Since −1 ∉ Γ₀,₁(4m), this is half
/// of [`index_gamma01`].
pub fn fundamental_domain_copies(m: u64) -> Result<u64> {
    Ok(index_gamma01(m)? / 2)
}

/// Largest modulus accepted by the brute-force coset counters.
pub const MAX_BRUTEFORCE_MODULUS: u64 = 64;

/// Number of right cosets `H·g` in SL₂(ℤ/nℤ), where H is the set of
/// elements satisfying `in_subgroup` (assumed to be a subgroup).
pub fn count_right_cosets<P>(n: u64, in_subgroup: P) -> Result<u64>
where
    P: Fn([u64; 4]) -> bool,
{
    if n < 1 || n > MAX_BRUTEFORCE_MODULUS {
        return Err(Error::Unsupported(format!(
            "coset brute force needs 1 ≤ N ≤ {MAX_BRUTEFORCE_MODULUS}, got {n}"
        )));
    }
    let nn = n as usize;
    let idx = |m: [u64; 4]| (((m[0] as usize * nn + m[1] as usize) * nn + m[2] as usize) * nn) + m[3] as usize;
    let mut group = Vec::new();
    let mut subgroup = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if (a * d + n * n - (b * c) % n) % n == 1 % n {
                        let m = [a, b, c, d];
                        group.push(m);
                        if in_subgroup(m) {
                            subgroup.push(m);
                        }
                    }
                }
            }
        }
    }
    let mul = |x: [u64; 4], y: [u64; 4]| {
        [
            (x[0] * y[0] + x[1] * y[2]) % n,
            (x[0] * y[1] + x[1] * y[3]) % n,
            (x[2] * y[0] + x[3] * y[2]) % n,
            (x[2] * y[1] + x[3] * y[3]) % n,
        ]
    };
    let mut seen = vec![false; nn.pow(4)];
    let mut cosets = 0u64;
    for &g in &group {
        if seen[idx(g)] {
            continue;
        }
        cosets += 1;
        for &h in &subgroup {
            seen[idx(mul(h, g))] = true;
        }
    }
    Ok(cosets)
}

/// Index of the image of Γ₀,₁(4m) in SL₂(ℤ/4mℤ), by explicit orbit enumeration.
pub fn coset_count_bruteforce(m: u64) -> Result<u64> {
    if m < 1 {
        return Err(Error::InvalidInput("index m must be ≥ 1".into()));
    }
    let n = 4 * m;
    count_right_cosets(n, |g| g[2] == 0 && g[3] == 1 % n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{displacement, reduce_to_fundamental_domain};
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(x, y).unwrap()
    }

    fn bruteforce(tau: &UpperHalfPoint, radius: f64, e: i64) -> Vec<GroupElement> {
        let mut v = Vec::new();
        for a in -e..=e {
            for b in -e..=e {
                for c in -e..=e {
                    for d in -e..=e {
                        if a * d - b * c != 1 {
                            continue;
                        }
                        let g = GroupElement::new(a, b, c, d).unwrap();
                        if 1.0 + displacement_excess(tau, &g.apply(tau)) <= radius {
                            v.push(g);
                        }
                    }
                }
            }
        }
        v.sort();
        v
    }

    fn sorted(en: &Enumeration) -> Vec<GroupElement> {
        let mut v: Vec<_> = en.elements.iter().map(|e| e.element).collect();
        v.sort();
        v
    }

    #[test]
    fn stabilizer_examples() {
        let en = enumerate_elements(&pt(0.0, 2.0), EnumerationBudget::MaxDisplacement(1.0)).unwrap();
        let mut expect = vec![GroupElement::identity(), GroupElement::identity().neg()];
        expect.sort();
        assert_eq!(sorted(&en), expect);
        let en = enumerate_elements(&UpperHalfPoint::i(), EnumerationBudget::MaxDisplacement(1.0)).unwrap();
        assert!(en.elements.iter().any(|e| e.element == GroupElement::s()));
        assert!(en.elements.iter().any(|e| e.element == GroupElement::s().neg()));
        assert_eq!(en.elements.len(), 4);
    }

    #[test]
    fn matches_bruteforce_at_2i() {
        let tau = pt(0.0, 2.0);
        let en = enumerate_elements(&tau, EnumerationBudget::MaxDisplacement(3.0)).unwrap();
        assert_eq!(sorted(&en), bruteforce(&tau, 3.0, 60));
    }

    #[test]
    fn matches_bruteforce_on_reduced_grid() {
        for tau in truncated_domain_grid(2.5, 5) {
            for r in [1.5, 4.0] {
                let en = enumerate_elements(&tau, EnumerationBudget::MaxDisplacement(r)).unwrap();
                assert_eq!(sorted(&en), bruteforce(&tau, r, 12), "{tau} {r}");
            }
        }
    }

    #[test]
    fn entry_budget_reports_complete_radius() {
        let tau = pt(0.1, 1.3);
        let en = enumerate_elements(&tau, EnumerationBudget::MaxEntry(10)).unwrap();
        assert!(en.radius > 1.0);
        assert!(en.elements.iter().all(|e| e.element.max_abs_entry() <= 10));
        assert_eq!(sorted(&en), bruteforce(&tau, en.radius, 10));
        assert!(matches!(
            enumerate_elements(&pt(0.0, 50.0), EnumerationBudget::MaxEntry(2)),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn work_cap_truncates() {
        let r = enumerate_with_cap(&pt(0.0, 1.0), 50.0, 10);
        assert!(matches!(r, Err(Error::Truncated { .. })));
    }

    #[test]
    fn enumeration_order_is_sorted() {
        let en = enumerate_elements(&pt(0.2, 1.1), EnumerationBudget::MaxDisplacement(6.0)).unwrap();
        for w in en.elements.windows(2) {
            assert!(w[0].excess <= w[1].excess);
        }
        for e in &en.elements {
            let s = displacement(&en.tau, &e.element.apply(&en.tau));
            assert!((s - e.displacement()).abs() < 1e-12 * s);
        }
    }

    #[test]
    fn lattice_majorant_dominates_counts() {
        for tau in truncated_domain_grid(3.0, 4) {
            for s in [1.0, 1.5, 3.0, 10.0, 40.0] {
                let en = enumerate_with_cap(&tau, s, DEFAULT_WORK_CAP).unwrap();
                assert!((en.elements.len() as f64) <= lattice_count_upper(&tau, s));
            }
        }
    }

    #[test]
    fn tail_bound_dominates_direct_tail() {
        let tau = pt(0.3, 1.1);
        let k = 8.0;
        let en = enumerate_with_cap(&tau, 400.0, DEFAULT_WORK_CAP).unwrap();
        let direct: f64 = en
            .elements
            .iter()
            .filter(|e| e.displacement() > 10.0)
            .map(|e| e.displacement().powf(-k / 2.0))
            .sum();
        let bound = displacement_tail_bound(&tau, 10.0, k).unwrap();
        assert!(direct <= bound, "{direct} > {bound}");
    }

    #[test]
    fn modular_group_radius() {
        let g = modular_group();
        // Attained at τ = i by the parabolic element [[1, 0], [1, 1]].
        let expected = 2.0 * 0.5f64.asinh();
        assert!((g.injectivity_radius - expected).abs() < 1e-12, "{}", g.injectivity_radius);
        assert_eq!(g.center_order, 2);
        assert_eq!(g.elliptic_orders, vec![2, 3]);
    }

    #[test]
    fn counting_examples() {
        let g = modular_group();
        assert_eq!(counting_function(&pt(0.1, 1.7), 0.0, g).unwrap(), 0);
        let tau = pt(0.0, 2.0);
        let r_local = {
            let en = enumerate_with_cap(&tau, 50.0, DEFAULT_WORK_CAP).unwrap();
            en.elements
                .iter()
                .filter(|e| !g.is_excluded(&e.element, Exclusion::StabilizersAndElliptic))
                .map(|e| e.distance())
                .fold(f64::INFINITY, f64::min)
        };
        assert_eq!(counting_function(&tau, 0.99 * r_local, g).unwrap(), 0);
        let en = bruteforce(&tau, displacement_from_distance(3.0) * 1.001, 40);
        let oracle = en
            .iter()
            .filter(|h| !g.is_excluded(h, Exclusion::StabilizersAndElliptic))
            .filter(|h| crate::hyperbolic::hyp_distance(&tau, &h.apply(&tau)) <= 3.0)
            .count();
        assert_eq!(counting_function(&tau, 3.0, g).unwrap(), oracle);
        assert!(oracle > 0);
    }

    #[test]
    fn counting_is_monotone() {
        let g = modular_group();
        let tau = pt(0.27, 1.05);
        let mut prev = 0;
        for j in 0..40 {
            let rho = 0.1 * j as f64;
            let n = counting_function(&tau, rho, g).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn jl_rhs_preconditions_and_empty_stieltjes() {
        let g = modular_group();
        let r = g.injectivity_radius;
        let tau = pt(0.0, 2.0);
        assert!(matches!(jl_rhs(8.0, 0.4 * r, r, 2, &tau, g), Err(Error::Precondition(_))));
        let rhs = jl_rhs(8.0, 0.5 * r, r, 2, &tau, g).unwrap();
        assert_eq!(rhs.stieltjes, 0.0);
        assert!((rhs.total - rhs.boundary - rhs.tail).abs() < 1e-15);
    }

    #[test]
    fn jl_tail_matches_refined_quadrature() {
        // k = 6, δ = r/2, r = 1: composite Gauss–Legendre on [δ, 80] at two resolutions.
        let (k, r) = (6.0, 1.0);
        let delta = 0.5 * r;
        let g = |rho: f64| (0.5 * rho).cosh().powf(-k) * (rho + 0.5 * r).sinh();
        let gl = |panels| -> f64 {
            crate::quad::composite_gauss_legendre(delta, 80.0, panels, 10)
                .iter()
                .map(|(x, w)| w * g(*x))
                .sum()
        };
        let (coarse, fine) = (gl(200), gl(400));
        assert!((coarse - fine).abs() < 1e-12 * fine);
        let adaptive = jl_tail_integral(k, delta, r).unwrap();
        assert!((adaptive - fine).abs() < 1e-10 * fine);
    }

    #[test]
    fn membership_examples() {
        for n in 1..10 {
            assert!(is_member_gamma0(&GroupElement::identity(), n));
            assert!(is_member_gamma01(&GroupElement::identity(), n));
            let g = GroupElement::new(1, 0, n, 1).unwrap();
            assert!(is_member_gamma0(&g, n) && is_member_gamma01(&g, n));
            assert!(is_member_gamma01(&GroupElement::t(1), n));
        }
        assert!(!is_member_gamma01(&GroupElement::identity().neg(), 4));
        assert!(is_member_gamma0(&GroupElement::identity().neg(), 4));
        assert!(!is_member_gamma0(&GroupElement::s(), 4));
    }

    #[test]
    fn index_examples() {
        assert_eq!(index_gamma0(4), 6);
        assert_eq!(index_gamma0(8), 12);
        assert_eq!(index_gamma0(12), 24);
        assert_eq!(index_gamma01(1).unwrap(), 12);
        assert_eq!(index_gamma01(2).unwrap(), 48);
        assert_eq!(index_gamma01(3).unwrap(), 96);
        assert!(index_gamma01(0).is_err());
        assert_eq!(index_gamma01_with_phi_m(1).unwrap(), 6);
        assert_eq!(fundamental_domain_copies(1).unwrap(), 6);
    }

    #[test]
    fn coset_counts() {
        assert_eq!(coset_count_bruteforce(1).unwrap(), 12);
        assert_eq!(coset_count_bruteforce(2).unwrap(), 48);
        assert_eq!(count_right_cosets(6, |_| true).unwrap(), 1);
        assert!(coset_count_bruteforce(17).is_err());
    }

    #[test]
    fn reduced_points_have_radius_at_least_grid_value() {
        // Below the stored radius nothing is counted at reduced sample points.
        let g = modular_group();
        for tau in truncated_domain_grid(2.0, 7) {
            let (z, _) = reduce_to_fundamental_domain(&tau).unwrap();
            assert_eq!(counting_function(&z, 0.999 * g.injectivity_radius, g).unwrap(), 0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn counting_steps_are_right_continuous(x in -0.5f64..0.5, y in 0.9f64..2.5) {
            let g = modular_group();
            let tau = pt(x, y);
            let en = enumerate_with_cap(&tau, displacement_from_distance(3.5), DEFAULT_WORK_CAP).unwrap();
            let mut dists: Vec<f64> = en
                .elements
                .iter()
                .filter(|e| !g.is_excluded(&e.element, Exclusion::StabilizersAndElliptic))
                .map(|e| e.distance())
                .filter(|&d| d <= 3.0)
                .collect();
            dists.sort_by(f64::total_cmp);
            for (j, &d) in dists.iter().enumerate() {
                let next = dists.get(j + 1).copied().unwrap_or(f64::INFINITY);
                let prev = if j == 0 { 0.0 } else { dists[j - 1] };
                if next <= d * (1.0 + 1e-9) || prev >= d * (1.0 - 1e-9) {
                    continue;
                }
                let at = en.counted_within(d, g, Exclusion::StabilizersAndElliptic).unwrap().count();
                let above = en.counted_within(d * (1.0 + 1e-10), g, Exclusion::StabilizersAndElliptic).unwrap().count();
                let below = en.counted_within(d * (1.0 - 1e-10), g, Exclusion::StabilizersAndElliptic).unwrap().count();
                prop_assert_eq!(at, above);
                prop_assert_eq!(at, j + 1);
                prop_assert!(below < at);
            }
        }
    }
}
