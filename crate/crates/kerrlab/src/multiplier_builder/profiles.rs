//! Radial building blocks for the regime multipliers.

use crate::kerr_geometry::{smoothstep5, smoothstep5_d, BlackHoleParams};
use crate::phase_space::{dv_dr, g_gap, ramp, ramp_d, FrequencyTriplet};
use crate::symbol_calculus::Profile;

/// Normalized exponential template e^{−k/r} mapped to 0 at `r0` and 1 at `r1`.
#[derive(Debug, Clone, Copy)]
pub struct ExpTemplate {
    k: f64,
    r0: f64,
    base: f64,
    norm: f64,
}

impl ExpTemplate {
    pub fn new(k: f64, r0: f64, r1: f64) -> Self {
        let base = (-k / r0).exp();
        Self {
            k,
            r0,
            base,
            norm: (-k / r1).exp() - base,
        }
    }

    pub fn eval(&self, r: f64) -> Profile {
        let e = (-self.k / r).exp();
        Profile::new((e - self.base) / self.norm, self.k / (r * r) * e / self.norm)
    }

    pub fn start(&self) -> f64 {
        self.r0
    }
}

/// Linear-fractional map in x = 1/r: q(ξ) = ξ/(ξ + κ(1−ξ)) with
/// ξ = (1/r0 − 1/r)/(1/r0 − 1/r1), so q(r0) = 0, q(r1) = 1.
#[derive(Debug, Clone, Copy)]
pub struct Mobius {
    r0: f64,
    span: f64,
    kappa: f64,
}

impl Mobius {
    pub fn new(r0: f64, r1: f64, kappa: f64) -> Self {
        Self {
            r0,
            span: 1.0 / r0 - 1.0 / r1,
            kappa,
        }
    }

    /// κ with q(r_mid) = q_mid.
    pub fn through(r0: f64, r1: f64, r_mid: f64, q_mid: f64) -> Self {
        let m = Self::new(r0, r1, 1.0);
        let x = m.xi(r_mid);
        let kappa = x * (1.0 - q_mid) / (q_mid * (1.0 - x));
        Self { kappa, ..m }
    }

    fn xi(&self, r: f64) -> f64 {
        (1.0 / self.r0 - 1.0 / r) / self.span
    }

    pub fn eval(&self, r: f64) -> Profile {
        let x = self.xi(r);
        let den = x + self.kappa * (1.0 - x);
        let dx = 1.0 / (r * r * self.span);
        Profile::new(x / den, self.kappa / (den * den) * dx)
    }
}

/// C^∞ step from 0 at `lo` to 1 at `hi`.
pub fn step(r: f64, lo: f64, hi: f64) -> Profile {
    let w = hi - lo;
    let x = (r - lo) / w;
    Profile::new(ramp(x), ramp_d(x) / w)
}

/// C^∞ bump: 1 on [c − w/2, c + w/2], 0 outside (c − w, c + w).
pub fn plateau(r: f64, c: f64, w: f64) -> Profile {
    let up = step(r, c - w, c - 0.5 * w);
    let down = step(r, c + 0.5 * w, c + w);
    Profile::new(up.v * (1.0 - down.v), up.d * (1.0 - down.v) - up.v * down.d)
}

/// Quintic step from 1 at `lo` to 0 at `hi`.
pub fn fall5(r: f64, lo: f64, hi: f64) -> Profile {
    let w = hi - lo;
    let x = (r - lo) / w;
    Profile::new(1.0 - smoothstep5(x), -smoothstep5_d(x) / w)
}

/// Smooth min(x, 0) and max(x, 0).
#[inline]
fn smin(x: f64, eps: f64) -> f64 {
    0.5 * (x - (x * x + eps * eps).sqrt())
}
#[inline]
fn smax(x: f64, eps: f64) -> f64 {
    0.5 * (x + (x * x + eps * eps).sqrt())
}

/// Monotone envelope G̃ of G = ξ_τ² − V on an interval where G > 0:
/// G̃(r0) = G(r0) and (ln G̃)' is a smoothed min(·, 0) (nonincreasing
/// envelope) or max(·, 0) (nondecreasing) of (ln G)'. ln G̃ is tabulated on
/// nodes uniform in t = ln(r − r₊); between nodes it is integrated again by
/// Simpson's rule, and G̃' uses the exact integrand, so the sign identities
/// the multipliers rely on hold pointwise.
#[derive(Debug, Clone)]
pub struct Envelope {
    p: BlackHoleParams,
    xi: FrequencyTriplet,
    dir: Monotone,
    eps: f64,
    t0: f64,
    dt: f64,
    t_end: f64,
    /// ln G̃ at the nodes.
    l: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotone {
    Nonincreasing,
    Nondecreasing,
}

impl Envelope {
    /// `None` if G fails to be positive on the interval.
    pub fn build(
        p: &BlackHoleParams,
        xi: &FrequencyTriplet,
        r0: f64,
        r1: f64,
        dir: Monotone,
        nodes: usize,
    ) -> Option<Self> {
        let rp = p.r_plus;
        let t0 = (r0 - rp).ln();
        let t1 = (r1 - rp).ln();
        let dt = (t1 - t0) / (nodes - 1) as f64;
        let mut env = Self {
            p: *p,
            xi: *xi,
            dir,
            eps: 0.02 / p.m,
            t0,
            dt,
            t_end: t1,
            l: Vec::with_capacity(nodes),
        };
        let g0 = g_gap(p, r0, xi);
        if !(g0 > 0.0) {
            return None;
        }
        env.l.push(g0.ln());
        for i in 1..nodes {
            let ta = t0 + dt * (i - 1) as f64;
            let inc = env.integrate(ta, ta + dt, 4)?;
            env.l.push(env.l[i - 1] + inc);
        }
        Some(env)
    }

    /// (ln G̃)' in r, or `None` where G ≤ 0.
    fn rate_r(&self, r: f64) -> Option<f64> {
        let g = g_gap(&self.p, r, &self.xi);
        if !(g > 0.0) {
            return None;
        }
        let x = -dv_dr(&self.p, r, &self.xi) / g;
        Some(match self.dir {
            Monotone::Nonincreasing => smin(x, self.eps),
            Monotone::Nondecreasing => smax(x, self.eps),
        })
    }

    /// ∫ d ln G̃ over [ta, tb] in t by composite Simpson with `n` panels.
    fn integrate(&self, ta: f64, tb: f64, n: usize) -> Option<f64> {
        if tb <= ta {
            return Some(0.0);
        }
        let rp = self.p.r_plus;
        let f = |t: f64| -> Option<f64> {
            let x = t.exp();
            Some(self.rate_r(rp + x)? * x)
        };
        let h = (tb - ta) / n as f64;
        let mut acc = f(ta)? + f(tb)?;
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(ta + h * k as f64)?;
        }
        Some(acc * h / 3.0)
    }

    /// (G̃, G̃') at r, frozen outside the tabulated range.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let n = self.l.len();
        let t = (r - self.p.r_plus).max(1e-300).ln();
        if t <= self.t0 {
            return (self.l[0].exp(), 0.0);
        }
        if t >= self.t_end {
            return (self.l[n - 1].exp(), 0.0);
        }
        let i = (((t - self.t0) / self.dt).floor() as usize).min(n - 2);
        let ti = self.t0 + self.dt * i as f64;
        let lv = self.l[i] + self.integrate(ti, t, 4).unwrap_or(f64::NAN);
        let gt = lv.exp();
        (gt, gt * self.rate_r(r).unwrap_or(f64::NAN))
    }
}

/// ∫ from x to 1 of (1 − S5) for the quintic smoothstep, x ∈ [0, 1].
pub fn tail_integral_fall5(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let prim = |x: f64| x.powi(6) - 3.0 * x.powi(5) + 2.5 * x.powi(4);
    (1.0 - x) - (0.5 - prim(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kerr_geometry::new_params;
    use crate::symbol_calculus::central_diff;

    #[test]
    fn template_endpoints_and_derivative() {
        let t = ExpTemplate::new(2.0, 2.1, 20.0);
        assert!(t.eval(2.1).v.abs() < 1e-15);
        assert!((t.eval(20.0).v - 1.0).abs() < 1e-14);
        let fd = central_diff(|r| t.eval(r).v, 5.0, 1e-4);
        assert!((fd - t.eval(5.0).d).abs() < 1e-9);
    }

    #[test]
    fn mobius_through_point() {
        let m = Mobius::through(2.0, 20.0, 3.0, 0.4);
        assert!(m.eval(2.0).v.abs() < 1e-15);
        assert!((m.eval(20.0).v - 1.0).abs() < 1e-14);
        assert!((m.eval(3.0).v - 0.4).abs() < 1e-14);
        let fd = central_diff(|r| m.eval(r).v, 7.0, 1e-4);
        assert!((fd - m.eval(7.0).d).abs() < 1e-9);
    }

    #[test]
    fn bump_and_steps() {
        let b = plateau(3.0, 3.0, 0.4);
        assert_eq!(b.v, 1.0);
        assert_eq!(plateau(3.5, 3.0, 0.4).v, 0.0);
        let fd = central_diff(|r| plateau(r, 3.0, 0.4).v, 2.7, 1e-5);
        assert!((fd - plateau(2.7, 3.0, 0.4).d).abs() < 1e-6);
        let fd = central_diff(|r| fall5(r, 1.0, 2.0).v, 1.3, 1e-5);
        assert!((fd - fall5(1.3, 1.0, 2.0).d).abs() < 1e-8);
        assert!((tail_integral_fall5(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(tail_integral_fall5(1.0), 0.0);
    }

    #[test]
    fn envelope_is_monotone_below_g() {
        let p = new_params(0.5, 1.0).unwrap();
        let xi = FrequencyTriplet::new(0.5, 0.2, 1.2);
        let r0 = p.r_plus * 1.001;
        let env = Envelope::build(&p, &xi, r0, 20.0, Monotone::Nonincreasing, 400).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..500 {
            let r = r0 + (20.0 - r0) * i as f64 / 499.0;
            let (g, dg) = env.eval(r);
            assert!(g <= prev * (1.0 + 1e-9));
            assert!(dg <= 1e-12);
            assert!(g <= g_gap(&p, r, &xi) * (1.0 + 1e-6));
            prev = g;
        }
        let fd = central_diff(|r| env.eval(r).0, 4.0, 1e-4);
        assert!((fd - env.eval(4.0).1).abs() < 1e-5 * fd.abs().max(1e-3));
    }
}
