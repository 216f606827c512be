//! The trapping potential over frequency space, its critical points, and the
//! frequency regimes with their partition of unity.

use rand::Rng;
use serde::Serialize;

use crate::error::{KerrError, Result};
use crate::kerr_geometry::{default_deltas, BlackHoleParams};
use crate::par;

/// Default outer radius R of the certification region, in units of m.
pub const R_OUTER: f64 = 20.0;

/// Ξ = (ξ_τ, ξ_φ̃, Λ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyTriplet {
    pub xi_tau: f64,
    pub xi_phi: f64,
    pub lambda: f64,
}

impl FrequencyTriplet {
    pub const fn new(xi_tau: f64, xi_phi: f64, lambda: f64) -> Self {
        Self {
            xi_tau,
            xi_phi,
            lambda,
        }
    }

    /// Euclidean norm in (ξ_τ, ξ_φ̃, Λ).
    pub fn norm(&self) -> f64 {
        (self.xi_tau * self.xi_tau + self.xi_phi * self.xi_phi + self.lambda * self.lambda).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.xi_tau * s, self.xi_phi * s, self.lambda * s)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.xi_tau, self.xi_phi, self.lambda]
    }

    /// Λ² ≥ max(ξ_φ̃², 2|a ξ_φ̃ ξ_τ|), with a 1e−12 relative slack for points
    /// placed exactly on the boundary.
    pub fn is_admissible(&self, p: &BlackHoleParams) -> bool {
        let l2 = self.lambda * self.lambda;
        let need = (self.xi_phi * self.xi_phi).max(2.0 * (p.a * self.xi_phi * self.xi_tau).abs());
        self.lambda >= 0.0 && l2 >= need * (1.0 - 1e-12) && self.norm().is_finite()
    }

    pub fn check(&self, p: &BlackHoleParams) -> Result<()> {
        if self.is_admissible(p) {
            Ok(())
        } else {
            Err(KerrError::InadmissibleFrequency {
                xi_tau: self.xi_tau,
                xi_phi: self.xi_phi,
                lambda: self.lambda,
            })
        }
    }

    /// −ξ_τ ξ_φ̃.
    #[inline]
    pub fn counter_rotation(&self) -> f64 {
        -self.xi_tau * self.xi_phi
    }
}

/// V = (ΔΛ² − 4amrξ_τξ_φ̃ − a²ξ_φ̃²)/(r²+a²)².
#[inline]
pub fn potential_v(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet) -> f64 {
    let w = p.r2a2(r);
    (p.delta(r) * xi.lambda * xi.lambda
        - 4.0 * p.a * p.m * r * xi.xi_tau * xi.xi_phi
        - p.a * p.a * xi.xi_phi * xi.xi_phi)
        / (w * w)
}

/// G = ξ_τ² − V.
#[inline]
pub fn g_gap(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet) -> f64 {
    xi.xi_tau * xi.xi_tau - potential_v(p, r, xi)
}

/// (r²+a²)³ ∂_r V.
#[inline]
pub fn scaled_first(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet) -> f64 {
    let (m, a) = (p.m, p.a);
    let l2 = xi.lambda * xi.lambda;
    -2.0 * (r * r * r - 3.0 * m * r * r + a * a * r + a * a * m) * l2
        + 4.0 * a * a * r * xi.xi_phi * xi.xi_phi
        + 4.0 * a * m * (3.0 * r * r - a * a) * xi.xi_phi * xi.xi_tau
}

/// d/dr[(r²+a²)³ ∂_r V].
#[inline]
pub fn scaled_second(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet) -> f64 {
    let (m, a) = (p.m, p.a);
    -2.0 * (3.0 * r * r - 6.0 * m * r + a * a) * xi.lambda * xi.lambda
        + 4.0 * a * a * xi.xi_phi * xi.xi_phi
        + 24.0 * a * m * r * xi.xi_tau * xi.xi_phi
}

#[inline]
pub fn dv_dr(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet) -> f64 {
    scaled_first(p, r, xi) / p.r2a2(r).powi(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriticalCase {
    StrictlyDecreasing,
    UniqueMax,
    MinThenMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPointReport {
    pub case: CriticalCase,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub v_at_max: Option<f64>,
}

/// Bisection for a sign change of `f` on [lo, hi]; `left_positive` gives the
/// sign on the left. Exact zeros move the bracket to the right.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, left_positive: bool) -> f64 {
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        let on_left = if left_positive { v >= 0.0 } else { v <= 0.0 };
        if on_left {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Critical-point trichotomy of V on (r₊, ∞).
pub fn critical_points(p: &BlackHoleParams, xi: &FrequencyTriplet) -> Result<CriticalPointReport> {
    if !(xi.lambda > 0.0) {
        return Err(KerrError::InadmissibleFrequency {
            xi_tau: xi.xi_tau,
            xi_phi: xi.xi_phi,
            lambda: xi.lambda,
        });
    }
    let (m, a) = (p.m, p.a);
    let l2 = xi.lambda * xi.lambda;
    let tp = xi.xi_tau * xi.xi_phi;
    let rp = p.r_plus;
    let pf = |r: f64| scaled_first(p, r, xi);

    // Roots of the downward parabola P'.
    let b = 12.0 * m * l2 + 24.0 * a * m * tp;
    let disc = b * b + 24.0 * l2 * (4.0 * a * a * xi.xi_phi * xi.xi_phi - 2.0 * a * a * l2);
    let (r0, r1) = if disc < 0.0 {
        (f64::NEG_INFINITY, f64::NEG_INFINITY)
    } else {
        let s = disc.sqrt();
        ((b - s) / (12.0 * l2), (b + s) / (12.0 * l2))
    };
    if r0 > rp * (1.0 + 1e-12) {
        return Err(KerrError::ClassificationAmbiguous(format!(
            "P' changes sign twice on (r+, inf): roots {r0}, {r1}"
        )));
    }

    let p_plus = pf(rp);
    let outer_bracket = |lo: f64| {
        let mut hi = (2.0 * lo).max(8.0 * m);
        while pf(hi) > 0.0 {
            hi *= 2.0;
        }
        hi
    };

    let (case, r_min, r_max) = if r1 <= rp {
        if p_plus > 0.0 {
            let hi = outer_bracket(rp);
            (CriticalCase::UniqueMax, None, Some(bisect(pf, rp, hi, true)))
        } else {
            (CriticalCase::StrictlyDecreasing, None, None)
        }
    } else if pf(r1) <= 0.0 {
        (CriticalCase::StrictlyDecreasing, None, None)
    } else {
        let hi = outer_bracket(r1);
        let rmax = bisect(pf, r1, hi, true);
        if p_plus >= 0.0 {
            (CriticalCase::UniqueMax, None, Some(rmax))
        } else {
            let rmin = bisect(pf, rp, r1, false);
            (CriticalCase::MinThenMax, Some(rmin), Some(rmax))
        }
    };
    if let Some(r) = r_max {
        if r > 8.0 * m * (1.0 + 1e-12) {
            return Err(KerrError::ClassificationAmbiguous(format!(
                "r_max = {r} exceeds 8m"
            )));
        }
    }
    Ok(CriticalPointReport {
        case,
        r_min,
        r_max,
        v_at_max: r_max.map(|r| potential_v(p, r, xi)),
    })
}

/// ξ_τ(ξ_τ + ω_H ξ_φ̃) < 0.
pub fn is_superradiant(p: &BlackHoleParams, xi: &FrequencyTriplet) -> bool {
    xi.xi_tau * p.k_plus(xi.xi_tau, xi.xi_phi) < 0.0
}

/// Smallest value of G/Λ² on [r_in, r_out], together with where it occurs.
/// G is smallest at an endpoint or at r_max.
pub fn g_min_over(
    p: &BlackHoleParams,
    xi: &FrequencyTriplet,
    crit: &CriticalPointReport,
    r_in: f64,
    r_out: f64,
) -> (f64, f64) {
    let l2 = xi.lambda * xi.lambda;
    let mut best = (g_gap(p, r_in, xi) / l2, r_in);
    let mut consider = |r: f64| {
        let v = g_gap(p, r, xi) / l2;
        if v < best.0 {
            best = (v, r);
        }
    };
    consider(r_out);
    if let Some(r) = crit.r_max {
        if r > r_in && r < r_out {
            consider(r);
        }
    }
    best
}

/// Constants shared by the regime decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeParams {
    pub delta_f: f64,
    /// r₊(1+δ_H′).
    pub r_in: f64,
    /// R.
    pub r_out: f64,
}

impl RegimeParams {
    /// δ_H′ = 1.5 δ_H with the default δ_H, and R = 20m.
    pub fn new(p: &BlackHoleParams, delta_f: f64) -> Self {
        let (dh, _) = default_deltas(p);
        Self {
            delta_f,
            r_in: p.r_plus * (1.0 + 1.5 * dh),
            r_out: R_OUTER * p.m,
        }
    }
}

/// Cutoff margins used by the partition of unity.
mod margins {
    /// Cone margin in ln(Λ²/ξ_τ²).
    pub const E_CONE: f64 = std::f64::consts::LN_2 / 8.0;
    /// Margin on g_min/δ_F².
    pub const E_G: f64 = 1.0 / 32.0;
}

/// s(x)/(s(x)+s(1−x)) with s(x) = e^{−1/x}; 0 for x ≤ 0, 1 for x ≥ 1.
pub fn ramp(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let s0 = (-1.0 / x).exp();
    let s1 = (-1.0 / (1.0 - x)).exp();
    s0 / (s0 + s1)
}

/// Derivative of [`ramp`].
pub fn ramp_d(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let s0 = (-1.0 / x).exp();
    let s1 = (-1.0 / (1.0 - x)).exp();
    let d0 = s0 / (x * x);
    let d1 = -s1 / ((1.0 - x) * (1.0 - x));
    (d0 * (s0 + s1) - s0 * (d0 + d1)) / ((s0 + s1) * (s0 + s1))
}

/// 0 below `lo`, 1 above `hi`.
#[inline]
fn up(x: f64, lo: f64, hi: f64) -> f64 {
    ramp((x - lo) / (hi - lo))
}

#[inline]
fn down(x: f64, lo: f64, hi: f64) -> f64 {
    1.0 - up(x, lo, hi)
}

/// Degree-0 coordinates of Ξ in which the regimes are described.
#[derive(Debug, Clone, Copy)]
struct Shape {
    /// −ξ_τξ_φ̃/(δ_FΛ²).
    u: f64,
    /// ξ_τk₊/(δ_FΛ²).
    w: f64,
    /// ln(Λ²/ξ_τ²).
    s: f64,
    /// ln(1/δ_F).
    l: f64,
}

impl Shape {
    fn new(p: &BlackHoleParams, xi: &FrequencyTriplet, df: f64) -> Self {
        let l2 = xi.lambda * xi.lambda;
        let t2 = xi.xi_tau * xi.xi_tau;
        let (u, w) = if l2 > 0.0 {
            (
                xi.counter_rotation() / (df * l2),
                xi.xi_tau * p.k_plus(xi.xi_tau, xi.xi_phi) / (df * l2),
            )
        } else {
            (0.0, f64::INFINITY)
        };
        Self {
            u,
            w,
            s: (l2 / t2).ln(),
            l: -df.ln(),
        }
    }

    fn in_band(&self) -> bool {
        self.u >= 0.25 && self.w <= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeMembership {
    pub in_sr: bool,
    pub in_a: bool,
    pub in_t: bool,
    pub in_tr: bool,
    pub in_tr1: bool,
    pub in_tr2: bool,
    /// χ₁…χ₅ for G_SR, G_A, G_T, G_TR1, G_TR2.
    pub chi: [f64; 5],
    pub delta_f: f64,
    /// min of (ξ_τ² − V)/Λ² over [r_in, R]; only computed inside G_TR.
    pub g_min: Option<f64>,
}

impl RegimeMembership {
    pub fn any(&self) -> bool {
        self.in_sr || self.in_a || self.in_t || self.in_tr
    }
}

/// Unnormalized weights ψ₁…ψ₅ and the wide TR2 weight used by r_trap.
fn raw_weights(
    p: &BlackHoleParams,
    xi: &FrequencyTriplet,
    rp: &RegimeParams,
    g_min: impl FnOnce() -> f64,
) -> ([f64; 5], f64) {
    use margins::{E_CONE as e, E_G as eg};
    if xi.lambda == 0.0 {
        return ([0.0, 0.0, 1.0, 0.0, 0.0], 0.0);
    }
    let sh = Shape::new(p, xi, rp.delta_f);
    let ln2 = std::f64::consts::LN_2;
    let l = sh.l;

    let sr = up(sh.u, 1.0 / 16.0, 1.0 / 8.0) * down(sh.w, 1.25, 1.5);
    let n1 = down(sh.u, 1.0 / 8.0, 3.0 / 16.0);
    let n2 = up(sh.w, 1.0, 17.0 / 16.0);
    let nu = 1.0 - (1.0 - n1) * (1.0 - n2);

    let t = nu * down(sh.s, -l - 4.0 * e, -l - 2.0 * e);
    let a = nu * up(sh.s, l + 2.0 * e, l + 4.0 * e);
    let tr = nu
        * up(sh.s, -l - ln2 + 2.0 * e, -l - ln2 + 4.0 * e)
        * down(sh.s, l + ln2 - 4.0 * e, l + ln2 - 2.0 * e);

    // the wide TR2 cutoff is nonzero only strictly inside the cone
    let wide_cone = up(sh.s, -l - ln2 + e, -l - ln2 + 2.0 * e)
        * down(sh.s, l + ln2 - 2.0 * e, l + ln2 - e);
    let wide_nu = {
        let m1 = down(sh.u, 3.0 / 16.0, 7.0 / 32.0);
        let m2 = up(sh.w, 33.0 / 32.0, 17.0 / 16.0);
        1.0 - (1.0 - m1) * (1.0 - m2)
    };
    if tr == 0.0 && wide_cone * wide_nu == 0.0 {
        return ([sr, a, t, 0.0, 0.0], 0.0);
    }
    let g = g_min() / (rp.delta_f * rp.delta_f);
    let tr1 = tr * up(g, 0.25 + eg, 0.25 + 2.0 * eg);
    let tr2 = tr * down(g, 0.5 - 2.0 * eg, 0.5 - eg);
    let wide5 = wide_cone * wide_nu * down(g, 0.5 - eg, 0.5);
    ([sr, a, t, tr1, tr2], wide5)
}

/// The regimes and their partition weights, with explicit constants.
pub fn classify_with(
    p: &BlackHoleParams,
    xi: &FrequencyTriplet,
    rp: &RegimeParams,
) -> Result<RegimeMembership> {
    xi.check(p)?;
    let df = rp.delta_f;
    let mut out = RegimeMembership {
        in_sr: false,
        in_a: false,
        in_t: false,
        in_tr: false,
        in_tr1: false,
        in_tr2: false,
        chi: [0.0; 5],
        delta_f: df,
        g_min: None,
    };
    let t2 = xi.xi_tau * xi.xi_tau;
    let l2 = xi.lambda * xi.lambda;
    if l2 == 0.0 {
        out.in_t = t2 > 0.0;
    } else {
        let sh = Shape::new(p, xi, df);
        let band = sh.in_band();
        out.in_sr = sh.u > 0.0 && sh.w < 2.0;
        out.in_a = l2 > t2 / df && !band;
        out.in_t = t2 > l2 / df && !band;
        out.in_tr = 0.5 * df * t2 < l2 && l2 < 2.0 * t2 / df && !band;
    }
    let mut g_cache = None;
    let mut gmin = || -> f64 {
        *g_cache.get_or_insert_with(|| match critical_points(p, xi) {
            Ok(c) => g_min_over(p, xi, &c, rp.r_in, rp.r_out).0,
            Err(_) => f64::NAN,
        })
    };
    if out.in_tr {
        let g = gmin();
        out.g_min = Some(g);
        out.in_tr1 = g > 0.25 * df * df;
        out.in_tr2 = g < 0.5 * df * df;
    }
    out.chi = normalized_weights(p, xi, rp, &mut gmin)?;
    Ok(out)
}

fn normalized_weights(
    p: &BlackHoleParams,
    xi: &FrequencyTriplet,
    rp: &RegimeParams,
    gmin: &mut impl FnMut() -> f64,
) -> Result<[f64; 5]> {
    let (psi, _) = raw_weights(p, xi, rp, gmin);
    let cut = ramp(xi.norm() - 1.0);
    let sum2: f64 = psi.iter().map(|v| v * v).sum();
    if !(sum2 > 0.0) {
        return Err(KerrError::CoverGap {
            xi_tau: xi.xi_tau,
            xi_phi: xi.xi_phi,
            lambda: xi.lambda,
        });
    }
    if cut == 0.0 {
        return Ok([0.0; 5]);
    }
    let n = cut / sum2.sqrt();
    Ok(psi.map(|v| v * n))
}

/// Membership with δ_H′ and R at their defaults.
pub fn classify_regimes(
    p: &BlackHoleParams,
    xi: &FrequencyTriplet,
    delta_f: f64,
) -> Result<RegimeMembership> {
    classify_with(p, xi, &RegimeParams::new(p, delta_f))
}

/// χ₁…χ₅.
pub fn partition_of_unity(p: &BlackHoleParams, xi: &FrequencyTriplet, delta_f: f64) -> Result<[f64; 5]> {
    xi.check(p)?;
    let rp = RegimeParams::new(p, delta_f);
    let mut g = || match critical_points(p, xi) {
        Ok(c) => g_min_over(p, xi, &c, rp.r_in, rp.r_out).0,
        Err(_) => f64::NAN,
    };
    normalized_weights(p, xi, &rp, &mut g)
}

/// The smooth cutoff χ̃₅: supported in G_TR2 and equal to 1 where ψ₅ > 0.
pub fn chi5_wide(p: &BlackHoleParams, xi: &FrequencyTriplet, rp: &RegimeParams) -> f64 {
    let g = || match critical_points(p, xi) {
        Ok(c) => g_min_over(p, xi, &c, rp.r_in, rp.r_out).0,
        Err(_) => f64::NAN,
    };
    raw_weights(p, xi, rp, g).1
}

/// r_trap = 3m(1 − χ̃₅) + χ̃₅ r_max.
pub fn r_trap_with(p: &BlackHoleParams, xi: &FrequencyTriplet, rp: &RegimeParams) -> f64 {
    let w = chi5_wide(p, xi, rp);
    if w == 0.0 {
        return 3.0 * p.m;
    }
    match critical_points(p, xi).ok().and_then(|c| c.r_max) {
        Some(rm) => 3.0 * p.m * (1.0 - w) + w * rm,
        None => 3.0 * p.m,
    }
}

pub fn r_trap(p: &BlackHoleParams, xi: &FrequencyTriplet, delta_f: f64) -> f64 {
    r_trap_with(p, xi, &RegimeParams::new(p, delta_f))
}

/// First radius above the inner region where G drops to `level·Λ²`, searched
/// between the near-horizon start and r_max. `None` if G stays above.
pub fn threshold_radius(
    p: &BlackHoleParams,
    xi: &FrequencyTriplet,
    crit: &CriticalPointReport,
    r_in: f64,
    level: f64,
) -> Option<f64> {
    let l2 = xi.lambda * xi.lambda;
    let h = |r: f64| g_gap(p, r, xi) - level * l2;
    let rmax = crit.r_max?;
    let lo = crit.r_min.unwrap_or(r_in).max(r_in);
    if rmax <= lo || h(rmax) > 0.0 {
        return None;
    }
    if h(lo) <= 0.0 {
        return Some(lo);
    }
    Some(bisect(h, lo, rmax, true))
}

/// Deterministic grid on the admissible part of the unit sphere:
/// ξ_τ = cos α, (ξ_φ̃, Λ) = sin α (cos β, sin β), α ∈ [0, π], β ∈ [π/4, 3π/4].
pub fn xi_grid(p: &BlackHoleParams, n_alpha: usize, n_beta: usize) -> Vec<FrequencyTriplet> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    let mut out = Vec::with_capacity(n_alpha * n_beta);
    for i in 0..n_alpha {
        let al = PI * i as f64 / (n_alpha - 1) as f64;
        let (sa, ca) = al.sin_cos();
        let poles = i == 0 || i == n_alpha - 1;
        for j in 0..n_beta {
            if poles && j > 0 {
                break;
            }
            let be = FRAC_PI_4 + FRAC_PI_2 * j as f64 / (n_beta - 1) as f64;
            let (sb, cb) = be.sin_cos();
            let xi = if poles {
                FrequencyTriplet::new(ca.signum(), 0.0, 0.0)
            } else {
                FrequencyTriplet::new(ca, sa * cb, sa * sb)
            };
            if xi.is_admissible(p) {
                out.push(xi);
            }
        }
    }
    out
}

/// Uniform sample on the admissible part of the unit sphere (rejection).
pub fn sample_unit_xi<R: Rng + ?Sized>(p: &BlackHoleParams, rng: &mut R) -> FrequencyTriplet {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.0..1.0),
        ];
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if !(n2 > 1e-6 && n2 <= 1.0) {
            continue;
        }
        let n = n2.sqrt();
        let xi = FrequencyTriplet::new(v[0] / n, v[1] / n, v[2] / n);
        if xi.is_admissible(p) {
            return xi;
        }
    }
}

/// Fitted quantitative non-trapping on the non-superradiant side:
/// min over the r grid of −(r−r_max)∂_rV r⁴ / (Λ²(r−r_max)²).
pub fn nontrapping_b(p: &BlackHoleParams, xi: &FrequencyTriplet, r_grid: &[f64]) -> Option<f64> {
    let rm = critical_points(p, xi).ok()?.r_max?;
    let l2 = xi.lambda * xi.lambda;
    let mut b = f64::INFINITY;
    for &r in r_grid {
        let d = r - rm;
        if d.abs() < 1e-6 * rm {
            continue;
        }
        b = b.min(-d * dv_dr(p, r, xi) * r.powi(4) / (l2 * d * d));
    }
    Some(b)
}

/// (V(r_max) − ξ_τ²)/Λ², or −∞ without a maximum.
pub fn trapping_gap(p: &BlackHoleParams, xi: &FrequencyTriplet) -> f64 {
    match critical_points(p, xi) {
        Ok(CriticalPointReport {
            v_at_max: Some(v), ..
        }) => (v - xi.xi_tau * xi.xi_tau) / (xi.lambda * xi.lambda),
        _ => f64::NEG_INFINITY,
    }
}

/// Outcome of the δ_F selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaFReport {
    pub delta_f: f64,
    pub k: u32,
    /// Fitted b on {−ξ_φ̃k₊ ≤ δ_FΛ²} ∪ G_SR ∪ G_A.
    pub b_nontrapping: f64,
    /// min (V(r_max) − ξ_τ²)/Λ² over the samples in G_SR ∪ G_A.
    pub sr_a_gap: f64,
    pub samples: usize,
}

/// Per-sample data that does not depend on δ_F.
#[derive(Debug, Clone, Copy)]
struct SampleFacts {
    xi: FrequencyTriplet,
    b: f64,
    gap: f64,
}

/// Largest δ_F = 2⁻ᵏ(1 − a/m), k = 0..12, with δ_F ≤ 1/4 for which, on the
/// given samples, the fitted non-trapping constant (with β = δ_F) is positive
/// and no sample of G_SR ∪ G_A is trapped.
pub fn select_delta_f(p: &BlackHoleParams, samples: &[FrequencyTriplet]) -> Result<DeltaFReport> {
    let rp0 = RegimeParams::new(p, 1.0);
    let n_r = 200;
    let r_grid: Vec<f64> = (0..n_r)
        .map(|i| rp0.r_in + (rp0.r_out - rp0.r_in) * (i as f64 / (n_r - 1) as f64).powi(2))
        .collect();
    let usable: Vec<FrequencyTriplet> = samples
        .iter()
        .copied()
        .filter(|x| x.lambda > 0.0 && x.is_admissible(p))
        .collect();
    let facts: Vec<SampleFacts> = par::map(usable.len(), |i| {
        let xi = usable[i];
        SampleFacts {
            xi,
            b: nontrapping_b(p, &xi, &r_grid).unwrap_or(f64::INFINITY),
            gap: trapping_gap(p, &xi),
        }
    });

    let mut last_fail = String::from("no admissible samples");
    for k in 0..=12u32 {
        let df = (1.0 - p.spin()) * 0.5f64.powi(k as i32);
        if df > 0.25 {
            continue;
        }
        let mut b = f64::INFINITY;
        let mut gap = f64::INFINITY;
        for f in &facts {
            let xi = &f.xi;
            let l2 = xi.lambda * xi.lambda;
            let sh = Shape::new(p, xi, df);
            let in_sr = sh.u > 0.0 && sh.w < 2.0;
            let in_a = l2 > xi.xi_tau * xi.xi_tau / df && !sh.in_band();
            // the SR/A multipliers also need the quantitative maximum
            if in_sr || in_a || -xi.xi_phi * p.k_plus(xi.xi_tau, xi.xi_phi) <= df * l2 {
                b = b.min(f.b);
            }
            if in_sr || in_a {
                gap = gap.min(f.gap);
            }
        }
        if b > 0.0 && gap > 0.0 {
            return Ok(DeltaFReport {
                delta_f: df,
                k,
                b_nontrapping: b,
                sr_a_gap: gap,
                samples: facts.len(),
            });
        }
        last_fail = format!("delta_f={df}: b={b}, sr/a gap={gap}");
    }
    Err(KerrError::ConstantSearchFailed(last_fail))
}

/// Regime membership with the exclusion band measured by −ξ_φ̃k₊, where the band
/// is {¼δ_FΛ² ≤ −ξ_τξ_φ̃ ≤ ω_Hξ_φ̃² + δ_FΛ²} and G_SR is
/// {0 < −ξ_τξ_φ̃ < ω_Hξ_φ̃² + 2δ_FΛ²}. Kept to exhibit why the implemented band
/// tests ξ_τk₊ instead: the literal G_SR admits trapped frequencies.
pub fn literal_regimes(p: &BlackHoleParams, xi: &FrequencyTriplet, delta_f: f64) -> [bool; 4] {
    let l2 = xi.lambda * xi.lambda;
    let t2 = xi.xi_tau * xi.xi_tau;
    let cr = xi.counter_rotation();
    let cap = p.omega_h * xi.xi_phi * xi.xi_phi;
    let band = 0.25 * delta_f * l2 <= cr && cr <= cap + delta_f * l2;
    [
        0.0 < cr && cr < cap + 2.0 * delta_f * l2,
        l2 > t2 / delta_f && !band,
        t2 > l2 / delta_f && !band,
        0.5 * delta_f * t2 < l2 && l2 < 2.0 * t2 / delta_f && !band,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kerr_geometry::new_params;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn xi(t: f64, f: f64, l: f64) -> FrequencyTriplet {
        FrequencyTriplet::new(t, f, l)
    }

    #[test]
    fn schwarzschild_potential() {
        let p = new_params(0.0, 1.0).unwrap();
        assert!((potential_v(&p, 3.0, &xi(0.3, 0.0, 1.0)) - 1.0 / 27.0).abs() < 1e-16);
        assert_eq!(dv_dr(&p, 3.0, &xi(0.0, 0.0, 1.0)), 0.0);
        let c = critical_points(&p, &xi(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(c.case, CriticalCase::UniqueMax);
        assert!((c.r_max.unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn scaled_second_axis() {
        let p = new_params(0.0, 1.0).unwrap();
        for r in [2.0, 3.0, 7.5] {
            let s = scaled_second(&p, r, &xi(0.4, 0.0, 1.3));
            assert!((s + 2.0 * (3.0 * r * r - 6.0 * r) * 1.69).abs() < 1e-12);
            assert!(s <= 0.0);
        }
    }

    #[test]
    fn horizon_gap_is_k_plus_squared() {
        let p = new_params(0.9, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = sample_unit_xi(&p, &mut rng);
            let k = p.k_plus(x.xi_tau, x.xi_phi);
            let g = g_gap(&p, p.r_plus, &x);
            assert!((g - k * k).abs() <= 1e-12 * (k * k).max(1e-3), "{x:?}");
        }
    }

    #[test]
    fn superradiance_examples() {
        let p = new_params(0.0, 1.0).unwrap();
        assert!(!is_superradiant(&p, &xi(-0.3, 1.0, 1.0)));
        let p = new_params(0.6, 1.0).unwrap();
        assert!(is_superradiant(&p, &xi(-0.1, 1.0, 1.0)));
    }

    #[test]
    fn nonsuperradiant_side_has_unique_max() {
        let p = new_params(0.9, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = 0;
        while seen < 200 {
            let x = sample_unit_xi(&p, &mut rng);
            if x.lambda == 0.0 || x.counter_rotation() > p.omega_h * x.xi_phi * x.xi_phi {
                continue;
            }
            seen += 1;
            let c = critical_points(&p, &x).unwrap();
            assert_eq!(c.case, CriticalCase::UniqueMax, "{x:?}");
            assert!(c.r_max.unwrap() > p.r_plus);
        }
    }

    #[test]
    fn regime_examples() {
        let p = new_params(0.0, 1.0).unwrap();
        let m = classify_regimes(&p, &xi(1.0, 0.0, 0.001), 1e-3).unwrap();
        assert!(m.in_t);
        let m = classify_regimes(&p, &xi(0.001, 0.0, 1.0), 1e-3).unwrap();
        assert!(m.in_a);
        assert!(matches!(
            classify_regimes(&p, &xi(1.0, 2.0, 1.0), 0.1),
            Err(KerrError::InadmissibleFrequency { .. })
        ));
    }

    #[test]
    fn partition_examples() {
        let p = new_params(0.5, 1.0).unwrap();
        let df = 1.0 / 64.0;
        assert_eq!(partition_of_unity(&p, &xi(0.3, 0.1, 0.3), df).unwrap(), [0.0; 5]);
        let chi = partition_of_unity(&p, &xi(4.0, 0.0, 1e-3), df).unwrap();
        assert_eq!(chi, [0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn r_trap_defaults_to_three() {
        let p = new_params(0.0, 1.0).unwrap();
        assert_eq!(r_trap(&p, &xi(4.0, 0.0, 0.01), 1.0 / 32.0), 3.0);
        // ξ_τ² = V(3m) = Λ²/27: trapped, inside G_TR2
        let x = xi(1.0, 0.0, 27f64.sqrt());
        let rt = r_trap(&p, &x, 1.0 / 32.0);
        assert!((rt - 3.0).abs() < 1e-10);
        assert!(chi5_wide(&p, &x, &RegimeParams::new(&p, 1.0 / 32.0)) == 1.0);
    }

    #[test]
    fn ramp_properties() {
        assert_eq!(ramp(-0.1), 0.0);
        assert_eq!(ramp(1.2), 1.0);
        assert!((ramp(0.5) - 0.5).abs() < 1e-15);
        let h = 1e-6;
        for x in [0.1, 0.4, 0.8] {
            let fd = (ramp(x + h) - ramp(x - h)) / (2.0 * h);
            assert!((fd - ramp_d(x)).abs() < 1e-7);
        }
    }

    #[test]
    fn literal_band_admits_trapped_frequency() {
        // at a = 0, ξ_τ = −Λ/√27 is trapped at 3m whatever ξ_φ̃ is; a small
        // positive ξ_φ̃ puts it in the literal G_SR for every δ_F
        let p = new_params(0.0, 1.0).unwrap();
        let l = 1.0;
        let df = 1.0 / 64.0;
        let x = xi(-l / 27f64.sqrt(), 0.5 * df * 27f64.sqrt(), l);
        assert!(literal_regimes(&p, &x, df)[0]);
        assert!(trapping_gap(&p, &x).abs() < 1e-12);
        let m = classify_regimes(&p, &x, df).unwrap();
        assert!(!m.in_sr && m.in_tr);
    }

    #[test]
    fn grid_points_are_unit_and_admissible() {
        let p = new_params(0.9, 1.0).unwrap();
        let g = xi_grid(&p, 41, 21);
        assert!(!g.is_empty());
        for x in &g {
            assert!((x.norm() - 1.0).abs() < 1e-14);
            assert!(x.is_admissible(&p));
        }
    }

    #[test]
    fn delta_f_schwarzschild() {
        let p = new_params(0.0, 1.0).unwrap();
        let rep = select_delta_f(&p, &xi_grid(&p, 61, 31)).unwrap();
        // G_A must exclude the trapped cone ξ_τ² = Λ²/27
        assert!(rep.delta_f < 1.0 / 27.0);
        assert!(rep.b_nontrapping > 0.0 && rep.sr_a_gap > 0.0);
    }
}
