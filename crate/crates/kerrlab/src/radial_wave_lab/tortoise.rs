//! Tortoise coordinate dr* = μ⁻¹ dr, normalized by r*(3m) = 0.

use crate::error::{KerrError, Result};
use crate::kerr_geometry::BlackHoleParams;

/// r* up to the additive constant. Uses
/// (r² + a²)/Δ = 1 + A/(r − r₊) + B/(r − r₋), with A = 2m r₊/(r₊ − r₋) and
/// B = −2m r₋/(r₊ − r₋). For a = 0 the second pole is absent.
fn raw(p: &BlackHoleParams, r: f64) -> f64 {
    let (rp, rm) = (p.r_plus, p.r_minus);
    let s = rp - rm;
    let ca = 2.0 * p.m * rp / s;
    let mut v = r + ca * (r - rp).ln();
    if rm > 0.0 {
        v -= 2.0 * p.m * rm / s * (r - rm).ln();
    }
    v
}

/// Same as `raw`, with r − r₊ = eˣ supplied directly so the near-horizon
/// end does not lose digits.
fn raw_log(p: &BlackHoleParams, x: f64) -> f64 {
    let (rp, rm) = (p.r_plus, p.r_minus);
    let s = rp - rm;
    let d = x.exp();
    let mut v = rp + d + 2.0 * p.m * rp / s * x;
    if rm > 0.0 {
        v -= 2.0 * p.m * rm / s * (s + d).ln();
    }
    v
}

pub fn tortoise(p: &BlackHoleParams, r: f64) -> Result<f64> {
    if !(r > p.r_plus) {
        return Err(KerrError::BelowHorizon { r, r_plus: p.r_plus });
    }
    Ok(raw(p, r) - raw(p, 3.0 * p.m))
}

/// Inverse of [`tortoise`]. Solved in x = ln(r − r₊), where r* is smooth,
/// increasing and convex enough for safeguarded Newton.
pub fn inverse_tortoise(p: &BlackHoleParams, r_star: f64) -> Result<f64> {
    if !r_star.is_finite() {
        return Err(KerrError::InvalidParameter(format!("r* = {r_star}")));
    }
    let target = r_star + raw(p, 3.0 * p.m);
    let g = |x: f64| raw_log(p, x) - target;
    // dr*/dx = (r² + a²)/(r − r₋)
    let dg = |x: f64| {
        let r = p.r_plus + x.exp();
        p.r2a2(r) / (r - p.r_minus)
    };
    let (mut lo, mut hi) = (-700.0f64, 1.0f64);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    if g(lo) > 0.0 {
        // r* so negative that r − r₊ underflows
        return Ok(p.r_plus);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x);
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut nx = x - gx / dg(x);
        if !(nx > lo && nx < hi) {
            nx = 0.5 * (lo + hi);
        }
        if (nx - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            x = nx;
            break;
        }
        x = nx;
    }
    Ok(p.r_plus + x.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kerr_geometry::new_params;

    #[test]
    fn normalization_and_schwarzschild_form() {
        let p = new_params(0.0, 1.0).unwrap();
        assert_eq!(tortoise(&p, 3.0).unwrap(), 0.0);
        // r + 2m ln(r/2m − 1) differs from our r* by a constant
        let closed = |r: f64| r + 2.0 * (r / 2.0 - 1.0).ln();
        let d = tortoise(&p, 4.0).unwrap() - tortoise(&p, 7.5).unwrap();
        assert!((d - (closed(4.0) - closed(7.5))).abs() < 1e-13);
        assert!((closed(4.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_is_inverse_mu() {
        let p = new_params(0.9, 1.0).unwrap();
        for r in [1.5, 2.0, 3.3, 10.0] {
            let h = 1e-5;
            let fd = (tortoise(&p, r + h).unwrap() - tortoise(&p, r - h).unwrap()) / (2.0 * h);
            assert!((fd * p.mu(r) - 1.0).abs() < 1e-8, "r={r}");
        }
    }

    #[test]
    fn round_trip_and_horizon_divergence() {
        for a in [0.0, 0.5, 0.99] {
            let p = new_params(a, 1.0).unwrap();
            assert!(tortoise(&p, p.r_plus * (1.0 + 1e-8)).unwrap() < -30.0);
            for r in [p.r_plus * (1.0 + 1e-9), p.r_plus + 0.01, 2.5, 3.0, 17.0, 400.0] {
                let back = inverse_tortoise(&p, tortoise(&p, r).unwrap()).unwrap();
                assert!((back - r).abs() < 1e-10, "a={a} r={r} back={back}");
            }
        }
        let p = new_params(0.3, 1.0).unwrap();
        assert!(matches!(tortoise(&p, p.r_plus), Err(KerrError::BelowHorizon { .. })));
    }
}
