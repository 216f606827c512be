//! Regime-wise multiplier symbols (f, h, y, z), their square completion,
//! and grid certification of the bulk and boundary sign conditions.
//!
//! Every profile is a function of r with Ξ-dependent shape parameters, so all
//! of f, h, y are homogeneous of degree 0 and z of degree 1 in Ξ.

pub mod certify;
pub mod profiles;
pub mod search;

pub use certify::{certify_boundary, certify_bulk, CertGrid, CertReport};
pub use search::{search_constants, SearchOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::kerr_geometry::{BlackHoleParams, ModFunctions};
use crate::phase_space::{
    critical_points, dv_dr, g_gap, threshold_radius, CriticalCase, CriticalPointReport,
    FrequencyTriplet,
};
use crate::symbol_calculus::{
    sigma2_bdr, triple_f, triple_h, triple_y, triple_z, xi_rstar, MultiplierValues, PhasePoint,
    Profile,
};
use profiles::{fall5, plateau, step, tail_integral_fall5, Envelope, ExpTemplate, Mobius, Monotone};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    SR,
    A,
    T,
    TR1,
    TR2,
}

impl Regime {
    pub const ALL: [Regime; 5] = [Regime::SR, Regime::A, Regime::T, Regime::TR1, Regime::TR2];

    /// Position in the partition χ₁…χ₅.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::SR => "SR",
            Regime::A => "A",
            Regime::T => "T",
            Regime::TR1 => "TR1",
            Regime::TR2 => "TR2",
        }
    }

    pub fn from_index(i: usize) -> Regime {
        Self::ALL[i]
    }
}

/// One point of the constant lattice plus the fixed shape parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// A in z.
    pub a_z: f64,
    /// B in front of the trapping bump of h.
    pub b: f64,
    pub c_prime: f64,
    pub delta_f: f64,
    /// Half-width scale of the h̃₀ bump.
    pub delta0: f64,
    /// Starting value of the adaptive C₀ in G_TR2.
    pub c0: f64,
    /// Rate C₂ of the exponential template e^{−C₂m/r}.
    pub c2: f64,
    /// r₊(1+δ_H′).
    pub r_in: f64,
    /// R.
    pub r_out: f64,
}

impl Constants {
    /// Lattice-independent defaults; `r_in` and `r_out` follow
    /// [`crate::phase_space::RegimeParams`].
    pub fn hint(p: &BlackHoleParams, delta_f: f64) -> Self {
        let rp = crate::phase_space::RegimeParams::new(p, delta_f);
        Self {
            a_z: 4.0,
            b: 4.0,
            c_prime: 0.5,
            delta_f,
            delta0: p.m - p.a,
            c0: 1.0,
            c2: 2.0,
            r_in: rp.r_in,
            r_out: rp.r_out,
        }
    }

    /// b′ = c′/4.
    pub fn b_prime(&self) -> f64 {
        0.25 * self.c_prime
    }

    /// The same constants with the inner boundary at r₊(1 + s·δ_H′).
    pub fn with_inner_scale(&self, p: &BlackHoleParams, s: f64) -> Self {
        let dh = self.r_in / p.r_plus - 1.0;
        Self {
            r_in: p.r_plus * (1.0 + s * dh),
            ..*self
        }
    }
}

/// Profile values at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfileSet {
    pub f: Profile,
    pub h: Profile,
    pub y: Profile,
    /// Degree one.
    pub z: Profile,
    pub chi_z: f64,
}

/// Coefficients of the bulk current Q = Dξ̃² + Lξ̃ + F in ξ̃ = ξ̃_{r*}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub d: f64,
    pub l: f64,
    pub f: f64,
}

impl Quadratic {
    pub fn eval(&self, xt: f64) -> f64 {
        (self.d * xt + self.l) * xt + self.f
    }

    /// η in d(ξ̃ + η)².
    pub fn eta(&self) -> f64 {
        self.l / (2.0 * self.d)
    }

    /// Q − d(ξ̃ + η)², independent of ξ̃.
    pub fn remainder(&self) -> f64 {
        self.f - self.l * self.l / (4.0 * self.d)
    }

    pub fn add_scaled(&mut self, s: f64, o: &Quadratic) {
        self.d += s * o.d;
        self.l += s * o.l;
        self.f += s * o.f;
    }

    pub const ZERO: Quadratic = Quadratic {
        d: 0.0,
        l: 0.0,
        f: 0.0,
    };
}

/// Boundary symbol pieces at the inner boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPieces {
    pub bdr: f64,
    pub rho2: f64,
    pub varpi2: f64,
}

#[derive(Debug, Clone)]
enum Shape {
    /// f = −1 + (2 − m/R)q, h = B(1−b′)h̃₀ − c′m/r², z = A(ξ_τ + χ_zω_Hξ_φ̃).
    SrA {
        f: Mobius,
        r_max: f64,
        d0: f64,
    },
    T {
        tpl: ExpTemplate,
    },
    /// y = (1 − m/R)·tpl·G̃(R)/G̃ with a nonincreasing envelope G̃.
    Tr1 {
        tpl: ExpTemplate,
        env: Envelope,
        g_end: f64,
    },
    /// y = −Ψ/G̃ (G̃ nondecreasing), f = g + g₀σ.
    Tr2(Box<Tr2Data>),
}

#[derive(Debug, Clone)]
struct Tr2Data {
    env: Envelope,
    c0: f64,
    lam2: f64,
    r_b: f64,
    r_rho: f64,
    r_y: f64,
    r_sigma: f64,
    /// g = slope·(ζ − ζ_max) with ζ affine in 1/r.
    g: Mobius,
    g_scale: f64,
    g_shift: f64,
    g0: f64,
}

impl Tr2Data {
    fn psi(&self, r: f64) -> Profile {
        if r >= self.r_y {
            return Profile::ZERO;
        }
        let ell = self.r_y - self.r_rho;
        let (int, rho) = if r <= self.r_rho {
            (self.r_rho - r + 0.5 * ell, 1.0)
        } else {
            let x = (r - self.r_rho) / ell;
            (ell * tail_integral_fall5(x), fall5(r, self.r_rho, self.r_y).v)
        };
        Profile::new(self.c0 * self.lam2 * int, -self.c0 * self.lam2 * rho)
    }

    fn y(&self, r: f64) -> Profile {
        let ps = self.psi(r);
        if ps.v == 0.0 && ps.d == 0.0 {
            return Profile::ZERO;
        }
        let (gt, dgt) = self.env.eval(r);
        Profile::new(-ps.v / gt, -ps.d / gt + ps.v * dgt / (gt * gt))
    }

    fn f(&self, r: f64) -> Profile {
        let q = self.g.eval(r);
        let g = Profile::new(self.g_scale * (q.v - self.g_shift), self.g_scale * q.d);
        if r >= self.r_sigma {
            return g;
        }
        let s = fall5(r, self.r_b, self.r_sigma);
        Profile::new(g.v + self.g0 * s.v, g.d + self.g0 * s.d)
    }
}

/// Multipliers for one regime at one frequency direction.
#[derive(Debug, Clone)]
pub struct MultiplierSet {
    pub regime: Regime,
    pub xi: FrequencyTriplet,
    pub constants: Constants,
    pub r_max: Option<f64>,
    pub r_min: Option<f64>,
    /// Effective C₀ (G_TR2 only).
    pub c0_eff: Option<f64>,
    /// Amplification of h̃₁ = −c′m/r² (test hook; 1 normally).
    pub h1_scale: f64,
    shape: Shape,
}

/// χ(r): 0 for r ≤ 10m, 1 for r ≥ 11m.
fn far_cutoff(p: &BlackHoleParams, r: f64) -> Profile {
    step(r, 10.0 * p.m, 11.0 * p.m)
}

fn invalid(regime: Regime, xi: &FrequencyTriplet, why: &str) -> KerrError {
    KerrError::ConstantSearchFailed(format!(
        "{} multipliers undefined at xi=({}, {}, {}): {why}",
        regime.name(),
        xi.xi_tau,
        xi.xi_phi,
        xi.lambda
    ))
}

/// Builds the multipliers of `regime` at Ξ. The same construction serves
/// every Ξ in the regime's support; failure means Ξ lies outside it.
pub fn build_multipliers(
    p: &BlackHoleParams,
    _mods: &ModFunctions,
    regime: Regime,
    xi: &FrequencyTriplet,
    c: &Constants,
) -> Result<MultiplierSet> {
    xi.check(p)?;
    let m = p.m;
    let (rb, big_r) = (c.r_in, c.r_out);
    // Λ = 0 has no critical points; only G_T reaches it
    let crit = match (regime, critical_points(p, xi)) {
        (_, Ok(cr)) => cr,
        (Regime::T | Regime::TR1, Err(_)) => CriticalPointReport {
            case: CriticalCase::StrictlyDecreasing,
            r_min: None,
            r_max: None,
            v_at_max: None,
        },
        (_, Err(e)) => return Err(e),
    };
    let mut out = MultiplierSet {
        regime,
        xi: *xi,
        constants: *c,
        r_max: crit.r_max,
        r_min: crit.r_min,
        c0_eff: None,
        h1_scale: 1.0,
        shape: Shape::T {
            tpl: ExpTemplate::new(c.c2 * m, rb, big_r),
        },
    };
    match regime {
        Regime::SR | Regime::A => {
            let rm = crit
                .r_max
                .filter(|&r| r > rb && r < big_r)
                .ok_or_else(|| invalid(regime, xi, "no maximum of V inside [r_in, R]"))?;
            if crit.r_min.is_some_and(|r| r > rb) {
                return Err(invalid(regime, xi, "V has an interior minimum"));
            }
            let q_mid = 1.0 / (2.0 - m / big_r);
            out.shape = Shape::SrA {
                f: Mobius::through(rb, big_r, rm, q_mid),
                r_max: rm,
                d0: c.delta0.min(0.5 * (rm - rb)),
            };
        }
        Regime::T => {}
        Regime::TR1 => {
            let env = Envelope::build(p, xi, rb, big_r, Monotone::Nonincreasing, 400)
                .ok_or_else(|| invalid(regime, xi, "G not positive on [r_in, R]"))?;
            let g_end = env.eval(big_r).0;
            out.shape = Shape::Tr1 {
                tpl: ExpTemplate::new(c.c2 * m, rb, big_r),
                env,
                g_end,
            };
        }
        Regime::TR2 => {
            let rm = crit
                .r_max
                .filter(|&r| r > rb && r < big_r)
                .ok_or_else(|| invalid(regime, xi, "no maximum of V inside [r_in, R]"))?;
            let r4 = threshold_radius(p, xi, &crit, rb, 0.5 * c.delta_f * c.delta_f)
                .ok_or_else(|| invalid(regime, xi, "G stays above the TR2 level"))?;
            let r_lo = crit.r_min.unwrap_or(rb).max(rb);
            if !(r4 - r_lo > 1e-6 * m) {
                return Err(invalid(regime, xi, "G already below the TR2 level at r_in"));
            }
            let r_rho = r_lo + 0.25 * (r4 - r_lo);
            let r_y = r_lo + 0.5 * (r4 - r_lo);
            let r_sigma = rb + 0.5 * (r_rho - rb);
            let env = Envelope::build(p, xi, rb, r_y, Monotone::Nondecreasing, 400)
                .ok_or_else(|| invalid(regime, xi, "G not positive below r_y"))?;
            // g linear in 1/r: 0 at r_max, 1 − m/R at R
            let lin = Mobius::new(rb, big_r, 1.0);
            let zm = lin.eval(rm).v;
            let g_scale = (1.0 - m / big_r) / (1.0 - zm);
            let mut data = Tr2Data {
                env,
                c0: c.c0,
                lam2: xi.lambda * xi.lambda,
                r_b: rb,
                r_rho,
                r_y,
                r_sigma,
                g: lin,
                g_scale,
                g_shift: zm,
                g0: g_scale * zm,
            };
            data.c0 = adapt_c0(p, xi, &data, c)
                .ok_or_else(|| invalid(regime, xi, "no C0 makes the near-horizon current positive"))?;
            out.c0_eff = Some(data.c0);
            out.shape = Shape::Tr2(Box::new(data));
        }
    }
    Ok(out)
}

/// Doubles C₀ until, on [r_in, r_y], the y-parts of D and F outweigh twice
/// the negative parts of everything else.
fn adapt_c0(p: &BlackHoleParams, xi: &FrequencyTriplet, d: &Tr2Data, c: &Constants) -> Option<f64> {
    let n = 96;
    let rb = c.r_in;
    let unit = Tr2Data { c0: 1.0, ..d.clone() };
    // (D_y, F_y) at C₀ = 1 and the negative parts of the rest
    let pts: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let r = rb + (d.r_y - rb) * (i as f64 / (n - 1) as f64);
            let w = p.r2a2(r);
            let g = g_gap(p, r, xi);
            let dv = dv_dr(p, r, xi);
            let f = d.f(r);
            let y = unit.y(r);
            [
                w * y.d,
                w * (y.d * g - y.v * dv),
                (w * 2.0 * f.d).min(0.0),
                (-w * f.v * dv).min(0.0),
            ]
        })
        .collect();
    let mut c0 = c.c0;
    for _ in 0..60 {
        let ok = pts
            .iter()
            .all(|v| c0 * v[0] + 2.0 * v[2] >= 0.0 && c0 * v[1] + 2.0 * v[3] >= 0.0);
        if ok {
            return Some(c0);
        }
        c0 *= 2.0;
    }
    None
}

impl MultiplierSet {
    /// Corrupted copy with h̃₁ multiplied by `s`.
    pub fn with_h1_scale(mut self, s: f64) -> Self {
        self.h1_scale = s;
        self
    }

    pub fn profiles(&self, p: &BlackHoleParams, r: f64) -> ProfileSet {
        let c = &self.constants;
        let m = p.m;
        let big_r = c.r_out;
        let end = 1.0 - m / big_r;
        let h1 = Profile::new(
            -self.h1_scale * c.c_prime * m / (r * r),
            2.0 * self.h1_scale * c.c_prime * m / (r * r * r),
        );
        let xi = &self.xi;
        let zt = Profile::new(c.a_z * xi.xi_tau, 0.0);
        match &self.shape {
            Shape::SrA { f, r_max, d0 } => {
                let q = f.eval(r);
                let span = 2.0 - m / big_r;
                let bump = plateau(r, *r_max, *d0);
                let k = c.b * (1.0 - c.b_prime());
                let cut = step(r, r_max - 0.5 * d0, r_max - 0.25 * d0);
                let chi_z = 1.0 - cut.v;
                let oh = p.omega_h * xi.xi_phi;
                ProfileSet {
                    f: Profile::new(-1.0 + span * q.v, span * q.d),
                    h: Profile::new(k * bump.v + h1.v, k * bump.d + h1.d),
                    y: Profile::ZERO,
                    z: Profile::new(c.a_z * (xi.xi_tau + chi_z * oh), -c.a_z * cut.d * oh),
                    chi_z,
                }
            }
            Shape::T { tpl } => {
                let t = tpl.eval(r);
                ProfileSet {
                    f: Profile::ZERO,
                    h: h1,
                    y: Profile::new(end * t.v, end * t.d),
                    z: zt,
                    chi_z: 0.0,
                }
            }
            Shape::Tr1 { tpl, env, g_end } => {
                let t = tpl.eval(r);
                let (gt, dgt) = env.eval(r);
                let s = end * g_end;
                ProfileSet {
                    f: Profile::ZERO,
                    h: h1,
                    y: Profile::new(s * t.v / gt, s * (t.d / gt - t.v * dgt / (gt * gt))),
                    z: zt,
                    chi_z: 0.0,
                }
            }
            Shape::Tr2(d) => {
                let chi = far_cutoff(p, r);
                ProfileSet {
                    f: d.f(r),
                    h: Profile::new(chi.v * h1.v, chi.d * h1.v + chi.v * h1.d),
                    y: d.y(r),
                    z: zt,
                    chi_z: 0.0,
                }
            }
        }
    }

    /// Quadratic form of Q^f + Q^h + Q^y + Q^z in ξ̃_{r*}, at the set's Ξ.
    pub fn quadratic(&self, p: &BlackHoleParams, r: f64) -> Quadratic {
        self.quadratic_at(p, r, &self.xi)
    }

    /// The same at a positive multiple of the set's Ξ.
    pub fn quadratic_at(&self, p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet) -> Quadratic {
        let s = self.profiles(p, r);
        let k = self.scale_of(xi);
        let w = p.r2a2(r);
        let g = g_gap(p, r, xi);
        let dv = dv_dr(p, r, xi);
        Quadratic {
            d: w * (s.h.v + s.y.d + 2.0 * s.f.d),
            l: w * k * s.z.d,
            f: w * ((s.y.d - s.h.v) * g - (s.y.v + s.f.v) * dv),
        }
    }

    fn scale_of(&self, xi: &FrequencyTriplet) -> f64 {
        xi.norm() / self.xi.norm()
    }

    /// (s₀, ∂_rs₀, s₁, ∂_rs₁, e₀) of the combined multiplier at the set's Ξ.
    pub fn triple(&self, p: &BlackHoleParams, r: f64) -> MultiplierValues {
        self.triple_at(p, r, &self.xi)
    }

    pub fn triple_at(&self, p: &BlackHoleParams, r: f64, xi: &FrequencyTriplet) -> MultiplierValues {
        let s = self.profiles(p, r);
        let k = self.scale_of(xi);
        let z = Profile::new(k * s.z.v, k * s.z.d);
        triple_f(p, r, s.f) + triple_h(p, r, s.h) + triple_y(p, r, s.y) + triple_z(z)
    }

    /// d(r, Ξ).
    pub fn d(&self, p: &BlackHoleParams, r: f64) -> f64 {
        self.quadratic(p, r).d
    }

    /// η(r, Ξ).
    pub fn eta(&self, p: &BlackHoleParams, r: f64) -> f64 {
        self.quadratic(p, r).eta()
    }

    /// Σσ_{2,BDR} with the regime's ϱ², ϖ² at the point (normally r = r_in).
    pub fn boundary(&self, p: &BlackHoleParams, mods: &ModFunctions, pt: &PhasePoint) -> BoundaryPieces {
        let r = pt.r;
        let c = &self.constants;
        let bdr = sigma2_bdr(p, mods, &self.triple_at(p, r, &pt.xi), pt);
        let xi = &pt.xi;
        let w = p.r2a2(r);
        let (t, ph) = (xi.xi_tau, xi.xi_phi);
        let kp = p.k_plus(t, ph);
        let a = c.a_z;
        let x = xi.lambda * xi.lambda + 2.0 * p.a * t * ph;
        let (rho2, varpi2) = match &self.shape {
            Shape::SrA { .. } => {
                let base = 0.5 * (a - 2.0) * w * kp * kp;
                (base, base + p.delta(r) * x / w)
            }
            Shape::T { .. } => (0.5 * a * w * t * t, 0.5 * a * w * (t * t + 2.0 * p.omega_h * t * ph)),
            Shape::Tr1 { .. } => {
                let d4 = c.delta_f.powi(4);
                (0.25 * d4 * a * w * t * t, a * w * (t * kp - 0.25 * d4 * t * t))
            }
            Shape::Tr2(_) => {
                let cy = -self.profiles(p, r).y.v;
                let r2 = t * t + p.a * p.a * ph * ph;
                (
                    w * r2,
                    w * (a * t * kp - 2.0 * cy * kp * kp + cy * p.delta(r) * x / (w * w) - r2),
                )
            }
        };
        BoundaryPieces { bdr, rho2, varpi2 }
    }

    /// −y at the inner boundary (G_TR2), the constant c_y.
    pub fn c_y(&self, p: &BlackHoleParams) -> f64 {
        -self.profiles(p, self.constants.r_in).y.v
    }
}

/// Σⱼ χⱼ²(Q^{fⱼ} + Q^{hⱼ} + Q^{yⱼ} + Q^{zⱼ}) at a phase-space point whose Ξ
/// is a positive multiple of each set's Ξ.
pub fn total_bulk_current(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    sets: &[(f64, &MultiplierSet)],
    pt: &PhasePoint,
) -> f64 {
    let xt = xi_rstar(p, mods, pt);
    sets.iter()
        .map(|(chi, set)| chi * chi * set.quadratic_at(p, pt.r, &pt.xi).eval(xt))
        .sum()
}

/// Σⱼ χⱼ²(s₀, ∂_rs₀, s₁, ∂_rs₁, e₀)ⱼ at the point's Ξ.
pub fn total_triple(
    p: &BlackHoleParams,
    sets: &[(f64, &MultiplierSet)],
    r: f64,
    xi: &FrequencyTriplet,
) -> MultiplierValues {
    sets.iter().fold(MultiplierValues::default(), |acc, (chi, set)| {
        acc + (chi * chi) * set.triple_at(p, r, xi)
    })
}
