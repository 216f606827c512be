//! Reduced symbol algebra: S₁, S₂, ξ̃_{r*}, the rescaled wave symbol, the
//! reduced Poisson bracket and the bulk/boundary symbols of a multiplier pair
//! (X, E).

use crate::kerr_geometry::{BlackHoleParams, ModFunctions};
use crate::phase_space::{dv_dr, g_gap, FrequencyTriplet};

/// (r, ξ_r, Ξ), optionally with (θ, ξ_θ) from which Λ is reconstructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub r: f64,
    pub xi_r: f64,
    pub xi: FrequencyTriplet,
    pub angular: Option<(f64, f64)>,
}

impl PhasePoint {
    pub fn new(r: f64, xi_r: f64, xi: FrequencyTriplet) -> Self {
        Self {
            r,
            xi_r,
            xi,
            angular: None,
        }
    }

    /// Extended point with Λ² = ξ_θ² + ξ_φ̃²/sin²θ + a²sin²θ ξ_τ².
    pub fn extended(
        p: &BlackHoleParams,
        r: f64,
        theta: f64,
        xi_tau: f64,
        xi_r: f64,
        xi_theta: f64,
        xi_phi: f64,
    ) -> Self {
        let lambda = carter_lambda(p, theta, xi_tau, xi_theta, xi_phi);
        Self {
            r,
            xi_r,
            xi: FrequencyTriplet::new(xi_tau, xi_phi, lambda),
            angular: Some((theta, xi_theta)),
        }
    }

    /// Relative defect of the Λ reconstruction; 0 for reduced points.
    pub fn lambda_defect(&self, p: &BlackHoleParams) -> f64 {
        match self.angular {
            None => 0.0,
            Some((th, xth)) => {
                let l = carter_lambda(p, th, self.xi.xi_tau, xth, self.xi.xi_phi);
                (l - self.xi.lambda).abs() / l.max(f64::MIN_POSITIVE)
            }
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            r: self.r,
            xi_r: self.xi_r * s,
            xi: self.xi.scaled(s),
            angular: self.angular.map(|(th, x)| (th, x * s)),
        }
    }
}

pub fn carter_lambda(p: &BlackHoleParams, theta: f64, xi_tau: f64, xi_theta: f64, xi_phi: f64) -> f64 {
    let s2 = theta.sin().powi(2);
    (xi_theta * xi_theta + xi_phi * xi_phi / s2 + p.a * p.a * s2 * xi_tau * xi_tau).sqrt()
}

/// S₁ = (r²+a²)(1 − μt_mod')ξ_τ + (a − Δφ_mod')ξ_φ̃.
pub fn s1_symbol(p: &BlackHoleParams, mods: &ModFunctions, r: f64, xi: &FrequencyTriplet) -> f64 {
    p.r2a2(r) * (1.0 - p.mu(r) * mods.t_prime(r)) * xi.xi_tau
        + (p.a - p.delta(r) * mods.phi_prime(r)) * xi.xi_phi
}

/// S₂ expanded as a polynomial in (ξ_τ, ξ_φ̃, Λ).
pub fn s2_symbol(p: &BlackHoleParams, mods: &ModFunctions, r: f64, xi: &FrequencyTriplet) -> f64 {
    let (tp, pp) = (mods.t_prime(r), mods.phi_prime(r));
    let (w, delta, a) = (p.r2a2(r), p.delta(r), p.a);
    -xi.lambda * xi.lambda
        - (2.0 * a * (1.0 - tp) - 2.0 * w * pp * (1.0 - p.mu(r) * tp)) * xi.xi_tau * xi.xi_phi
        + (2.0 * w * tp - delta * tp * tp) * xi.xi_tau * xi.xi_tau
        - (delta * pp * pp - 2.0 * a * pp) * xi.xi_phi * xi.xi_phi
}

/// S₂^BL = (r²+a²)²Δ⁻¹(ξ_τ² − V).
pub fn s2_bl(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet) -> f64 {
    p.r2a2(r).powi(2) / p.delta(r) * g_gap(p, r, xi)
}

/// ξ̃_{r*} = μξ_r + S₁/(r²+a²).
pub fn xi_rstar(p: &BlackHoleParams, mods: &ModFunctions, pt: &PhasePoint) -> f64 {
    p.mu(pt.r) * pt.xi_r + s1_symbol(p, mods, pt.r, &pt.xi) / p.r2a2(pt.r)
}

/// Principal symbol of |q|²□: −Δξ_r² − 2S₁ξ_r + S₂.
pub fn wave_symbol(p: &BlackHoleParams, mods: &ModFunctions, pt: &PhasePoint) -> f64 {
    let r = pt.r;
    -p.delta(r) * pt.xi_r * pt.xi_r - 2.0 * s1_symbol(p, mods, r, &pt.xi) * pt.xi_r
        + s2_symbol(p, mods, r, &pt.xi)
}

/// The same symbol written as −μ⁻¹(r²+a²)ξ̃² + S₂^BL; needs Δ ≠ 0.
pub fn wave_symbol_bl(p: &BlackHoleParams, mods: &ModFunctions, pt: &PhasePoint) -> f64 {
    let xt = xi_rstar(p, mods, pt);
    -p.r2a2(pt.r) / p.mu(pt.r) * xt * xt + s2_bl(p, pt.r, &pt.xi)
}

/// A symbol value together with its ∂_r and ∂_{ξ_r}.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub val: f64,
    pub d_r: f64,
    pub d_xir: f64,
}

/// {A, B} = ∂_{ξ_r}A ∂_rB − ∂_rA ∂_{ξ_r}B from analytic jets.
pub fn bracket_of_jets(a: &Jet, b: &Jet) -> f64 {
    a.d_xir * b.d_r - a.d_r * b.d_xir
}

/// Fourth-order central difference of `f` at `x` with step `h`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h)
}

/// Reduced bracket of symbols given as functions of (r, ξ_r) at fixed Ξ, with
/// derivatives by fourth-order central differences.
pub fn poisson_bracket_reduced(
    a: impl Fn(f64, f64) -> f64,
    b: impl Fn(f64, f64) -> f64,
    pt: &PhasePoint,
) -> f64 {
    let (r, x) = (pt.r, pt.xi_r);
    let hr = 1e-5 * r.max(1.0);
    let hx = 1e-5 * x.abs().max(pt.xi.norm()).max(1.0);
    let ja = Jet {
        val: a(r, x),
        d_r: central_diff(|s| a(s, x), r, hr),
        d_xir: central_diff(|s| a(r, s), x, hx),
    };
    let jb = Jet {
        val: b(r, x),
        d_r: central_diff(|s| b(s, x), r, hr),
        d_xir: central_diff(|s| b(r, s), x, hx),
    };
    bracket_of_jets(&ja, &jb)
}

/// (s₀, ∂_rs₀, s₁, ∂_rs₁, e₀) at one phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MultiplierValues {
    pub s0: f64,
    pub ds0: f64,
    pub s1: f64,
    pub ds1: f64,
    pub e0: f64,
}

impl std::ops::Add for MultiplierValues {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            s0: self.s0 + o.s0,
            ds0: self.ds0 + o.ds0,
            s1: self.s1 + o.s1,
            ds1: self.ds1 + o.ds1,
            e0: self.e0 + o.e0,
        }
    }
}

impl std::ops::Mul<MultiplierValues> for f64 {
    type Output = MultiplierValues;
    fn mul(self, v: MultiplierValues) -> MultiplierValues {
        MultiplierValues {
            s0: self * v.s0,
            ds0: self * v.ds0,
            s1: self * v.s1,
            ds1: self * v.ds1,
            e0: self * v.e0,
        }
    }
}

/// s₀, s₁, e₀ as functions of (r, Ξ).
pub trait MultiplierTriple {
    fn eval(&self, r: f64, xi: &FrequencyTriplet) -> MultiplierValues;
}

impl<F: Fn(f64, &FrequencyTriplet) -> MultiplierValues> MultiplierTriple for F {
    fn eval(&self, r: f64, xi: &FrequencyTriplet) -> MultiplierValues {
        self(r, xi)
    }
}

/// Value and radial derivative of a scalar profile.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Profile {
    pub v: f64,
    pub d: f64,
}

impl Profile {
    pub const ZERO: Profile = Profile { v: 0.0, d: 0.0 };
    pub fn new(v: f64, d: f64) -> Self {
        Self { v, d }
    }
}

/// (0, 0, μh).
pub fn triple_h(p: &BlackHoleParams, r: f64, h: Profile) -> MultiplierValues {
    MultiplierValues {
        e0: p.mu(r) * h.v,
        ..Default::default()
    }
}

/// (2y, 0, 2μry/(r²+a²) − ∂_r(μy)).
pub fn triple_y(p: &BlackHoleParams, r: f64, y: Profile) -> MultiplierValues {
    let mu = p.mu(r);
    MultiplierValues {
        s0: 2.0 * y.v,
        ds0: 2.0 * y.d,
        e0: 2.0 * mu * r * y.v / p.r2a2(r) - (p.dmu(r) * y.v + mu * y.d),
        ..Default::default()
    }
}

/// (2f, 0, 2μrf/(r²+a²) − ∂_r(μf) + μ∂_rf).
pub fn triple_f(p: &BlackHoleParams, r: f64, f: Profile) -> MultiplierValues {
    let mu = p.mu(r);
    MultiplierValues {
        s0: 2.0 * f.v,
        ds0: 2.0 * f.d,
        e0: 2.0 * mu * r * f.v / p.r2a2(r) - p.dmu(r) * f.v,
        ..Default::default()
    }
}

/// (0, z, 0) for a degree-one z.
pub fn triple_z(z: Profile) -> MultiplierValues {
    MultiplierValues {
        s1: z.v,
        ds1: z.d,
        ..Default::default()
    }
}

/// σ₂(T_{X,E}) evaluated literally from (s₀, ∂_rs₀, s₁, ∂_rs₁, e₀); needs Δ ≠ 0.
pub fn sigma2_bulk(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    mv: &MultiplierValues,
    pt: &PhasePoint,
) -> f64 {
    let r = pt.r;
    let (m, w, mu) = (p.m, p.r2a2(r), p.mu(r));
    let xt = xi_rstar(p, mods, pt);
    let g = g_gap(p, r, &pt.xi);
    let dv = dv_dr(p, r, &pt.xi);
    let kin = xt * xt - g;
    0.5 * (2.0 * w * mv.ds0 * xt * xt
        + 2.0 * w * mv.ds1 * xt
        + mu * mv.s0
            * ((-4.0 * r / mu + 2.0 * (r - m) / (mu * mu)) * kin - w / mu * dv))
        + w / mu * mv.e0 * kin
}

/// σ_{2,BDR}^{X,E} = −μs₀ξ_rS₁ − s₀S₁²/(r²+a²) − Δs₁ξ_r − s₁S₁ − ½μs₀S₂.
pub fn sigma2_bdr(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    mv: &MultiplierValues,
    pt: &PhasePoint,
) -> f64 {
    let r = pt.r;
    let s1 = s1_symbol(p, mods, r, &pt.xi);
    let s2 = s2_symbol(p, mods, r, &pt.xi);
    let mu = p.mu(r);
    -mu * mv.s0 * pt.xi_r * s1 - mv.s0 * s1 * s1 / p.r2a2(r) - p.delta(r) * mv.s1 * pt.xi_r
        - mv.s1 * s1
        - 0.5 * mu * mv.s0 * s2
}

/// Closed forms of the four bulk currents in terms of ξ̃ = ξ̃_{r*}.
pub mod currents {
    use super::*;

    pub fn q_h(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet, xt: f64, h: f64) -> f64 {
        p.r2a2(r) * h * (xt * xt - g_gap(p, r, xi))
    }

    pub fn q_y(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet, xt: f64, y: Profile) -> f64 {
        p.r2a2(r) * (y.d * xt * xt + y.d * g_gap(p, r, xi) - y.v * dv_dr(p, r, xi))
    }

    pub fn q_f(p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet, xt: f64, f: Profile) -> f64 {
        p.r2a2(r) * (2.0 * f.d * xt * xt - f.v * dv_dr(p, r, xi))
    }

    /// Q^z for z with radial derivative `dz`.
    pub fn q_z(p: &BlackHoleParams, r: f64, xt: f64, dz: f64) -> f64 {
        p.r2a2(r) * dz * xt
    }

    pub fn bdr_y(p: &BlackHoleParams, mods: &ModFunctions, pt: &PhasePoint, y: f64) -> f64 {
        let r = pt.r;
        let s1 = s1_symbol(p, mods, r, &pt.xi);
        let mu = p.mu(r);
        -2.0 * mu * y * pt.xi_r * s1 - 2.0 * y * s1 * s1 / p.r2a2(r)
            - mu * y * s2_symbol(p, mods, r, &pt.xi)
    }

    pub fn bdr_f(p: &BlackHoleParams, mods: &ModFunctions, pt: &PhasePoint, f: f64) -> f64 {
        bdr_y(p, mods, pt, f)
    }

    /// σ_BDR^z = −z(Δξ_r + S₁).
    pub fn bdr_z(p: &BlackHoleParams, mods: &ModFunctions, pt: &PhasePoint, z: f64) -> f64 {
        -z * (p.delta(pt.r) * pt.xi_r + s1_symbol(p, mods, pt.r, &pt.xi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kerr_geometry::new_params;

    fn setup(a: f64) -> (BlackHoleParams, ModFunctions) {
        let p = new_params(a, 1.0).unwrap();
        let m = ModFunctions::defaults(&p).unwrap();
        (p, m)
    }

    #[test]
    fn s1_vanishes_in_bl_window() {
        let (p, m) = setup(0.7);
        let xi = FrequencyTriplet::new(0.4, -0.3, 0.9);
        for r in [3.0, 6.0, 11.5] {
            assert!(s1_symbol(&p, &m, r, &xi).abs() < 1e-13);
        }
    }

    #[test]
    fn horizon_values() {
        let (p, m) = setup(0.6);
        let xi = FrequencyTriplet::new(0.4, -0.3, 0.9);
        let rp = p.r_plus;
        let k = p.k_plus(xi.xi_tau, xi.xi_phi);
        assert!((s1_symbol(&p, &m, rp, &xi) - p.r2a2(rp) * k).abs() < 1e-13);
        for xr in [-2.0, 0.0, 3.0] {
            let pt = PhasePoint::new(rp, xr, xi);
            assert!((xi_rstar(&p, &m, &pt) - k).abs() < 1e-13);
        }
    }

    #[test]
    fn s2_identity_off_horizon() {
        let (p, m) = setup(0.9);
        let xi = FrequencyTriplet::new(0.8, 0.5, 1.1);
        for r in [1.5, 1.6, 2.5, 12.5, 30.0] {
            let lhs = s2_symbol(&p, &m, r, &xi);
            let s1 = s1_symbol(&p, &m, r, &xi);
            let rhs = s2_bl(&p, r, &xi) - s1 * s1 / p.delta(r);
            assert!((lhs - rhs).abs() < 1e-11 * rhs.abs().max(lhs.abs()).max(1.0), "r={r}");
        }
    }

    #[test]
    fn canonical_bracket() {
        let pt = PhasePoint::new(2.5, 0.7, FrequencyTriplet::new(1.0, 0.0, 1.0));
        let b = poisson_bracket_reduced(|_, x| x, |r, _| r, &pt);
        assert!((b - 1.0).abs() < 1e-9);
        let f = |r: f64, x: f64| r * r * x + x.sin();
        assert!(poisson_bracket_reduced(f, f, &pt).abs() < 1e-12);
    }

    #[test]
    fn h_current_has_no_boundary_term() {
        let (p, m) = setup(0.5);
        let pt = PhasePoint::new(4.0, 0.3, FrequencyTriplet::new(0.2, 0.1, 0.7));
        let mv = triple_h(&p, pt.r, Profile::new(1.7, 0.4));
        assert_eq!(sigma2_bdr(&p, &m, &mv, &pt), 0.0);
        let xt = xi_rstar(&p, &m, &pt);
        let q = currents::q_h(&p, pt.r, &pt.xi, xt, 1.7);
        assert!((sigma2_bulk(&p, &m, &mv, &pt) - q).abs() < 1e-12 * q.abs().max(1.0));
    }

    #[test]
    fn bulk_from_bracket() {
        // σ₂ with E = 0 is −½{wave symbol, s₀ξ̃ + s₁}
        let (p, m) = setup(0.6);
        let xi = FrequencyTriplet::new(0.45, 0.3, 0.8);
        let s0 = |r: f64| 1.0 - 3.0 / r;
        let ds0 = |r: f64| 3.0 / (r * r);
        let s1 = |r: f64| (0.2 + 1.0 / r) * xi.xi_tau;
        let ds1 = |r: f64| -xi.xi_tau / (r * r);
        for &(r, xr) in &[(1.95, 0.4), (2.7, -1.1), (9.0, 0.3), (15.0, 2.0)] {
            let pt = PhasePoint::new(r, xr, xi);
            let w = |r: f64, x: f64| wave_symbol(&p, &m, &PhasePoint::new(r, x, xi));
            let xs = |r: f64, x: f64| {
                s0(r) * xi_rstar(&p, &m, &PhasePoint::new(r, x, xi)) + s1(r)
            };
            let br = poisson_bracket_reduced(w, xs, &pt);
            let mv = MultiplierValues {
                s0: s0(r),
                ds0: ds0(r),
                s1: s1(r),
                ds1: ds1(r),
                e0: 0.0,
            };
            let bulk = sigma2_bulk(&p, &m, &mv, &pt);
            assert!(
                (bulk + 0.5 * br).abs() < 1e-6 * bulk.abs().max(1.0),
                "r={r}: bulk={bulk} bracket={br}"
            );
        }
    }
}
