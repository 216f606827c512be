//! Seeded verification sweeps shared by the command-line tool and the
//! acceptance run. Each sweep draws its sample points sequentially from a
//! ChaCha stream, evaluates them through [`crate::par::map`], and folds the
//! results in index order, so a report depends only on the seed.
//!
//! Relative errors of identities that are sums of several terms are taken
//! against the sum of the term magnitudes; pure cancellation would otherwise
//! make a correct evaluation look wrong.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::kerr_geometry::{
    default_deltas, det4, inverse_metric_normalized, metric_bl, metric_ef, BlackHoleParams, Chart, CoordPoint,
    ModFunctions, THETA_MIN,
};
use crate::multiplier_builder::search::SearchOutcome;
use crate::multiplier_builder::{CertGrid, Constants};
use crate::par;
use crate::radial_wave_lab::scatter::scan;
use crate::radial_wave_lab::{
    evolve, morawetz_experiment, transmission_check, BoundaryKind, Direction, EvolveOptions, InitialData, ModeSpec,
    MorawetzRow, Packet, PacketSpec, RadialGrid, ScatterOptions, ScatterResult, SpectralPoint,
};
use crate::phase_space::{
    classify_regimes, critical_points, dv_dr, g_gap, is_superradiant, potential_v, sample_unit_xi, select_delta_f,
    trapping_gap, FrequencyTriplet,
};
use crate::symbol_calculus::{
    bracket_of_jets, central_diff, currents, Jet, s1_symbol, s2_bl, s2_symbol, sigma2_bdr, sigma2_bulk,
    triple_f, triple_h, triple_y, triple_z, wave_symbol, wave_symbol_bl, xi_rstar, MultiplierValues, PhasePoint,
    Profile,
};

pub const GEOMETRY_SPINS: [f64; 5] = [0.0, 0.3, 0.6, 0.9, 0.99];
pub const SUPERRADIANT_SPINS: [f64; 3] = [0.5, 0.9, 0.96];
pub const CERT_SPINS: [f64; 4] = [0.0, 0.5, 0.9, 0.96];

pub const INVERSE_TOL: f64 = 1e-10;
pub const DET_TOL: f64 = 1e-9;
pub const PHOTON_SPHERE_TOL: f64 = 1e-8;
pub const R_MAX_BOUND: f64 = 8.0;
pub const HORIZON_GAP_TOL: f64 = 1e-12;
pub const DV_TOL: f64 = 1e-6;
pub const SYMBOL_TOL: f64 = 1e-8;
pub const SYMBOL_FD_TOL: f64 = 1e-5;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const PARTITION_TOL: f64 = 1e-12;

/// Largest value and the sample index where it occurred. Ties keep the
/// earlier index; NaN counts as +∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extreme {
    pub value: f64,
    pub index: Option<usize>,
}

impl Extreme {
    fn max_of(vals: impl IntoIterator<Item = f64>) -> Self {
        let mut e = Extreme {
            value: f64::NEG_INFINITY,
            index: None,
        };
        for (i, v) in vals.into_iter().enumerate() {
            let v = if v.is_nan() { f64::INFINITY } else { v };
            if v > e.value {
                e = Extreme { value: v, index: Some(i) };
            }
        }
        e
    }

    fn min_of(vals: impl IntoIterator<Item = f64>) -> Self {
        let e = Self::max_of(vals.into_iter().map(|v| if v.is_nan() { f64::INFINITY } else { -v }));
        Extreme { value: -e.value, ..e }
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn theta_uniform<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(THETA_MIN..std::f64::consts::PI - THETA_MIN)
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------- geometry

#[derive(Debug, Clone, Serialize)]
pub struct ChartDefect {
    pub chart: &'static str,
    pub max_defect: f64,
    pub worst_r: f64,
    pub worst_theta: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    pub spin: f64,
    pub charts: Vec<ChartDefect>,
    /// max |√|det g| − |q|²sinθ| / |q|²sinθ over all charts.
    pub det_max_rel: f64,
    /// Largest g^ττ on the normalized-chart grid; must be negative.
    pub g_tautau_max: f64,
    pub g_tautau_worst_r: f64,
    pub g_tautau_worst_theta: f64,
    /// Relative spacelike margin of the modifier blends.
    pub blend_margin: f64,
    pub pass: bool,
}

/// Inverse defect and determinant identity at `points` random points per
/// chart, and the sign of g^ττ on an `n_r × n_theta` grid. Boyer–Lindquist
/// points have r − r₊ log-uniform on [10⁻²m, 10³m]; the horizon-regular
/// charts start at r₊(1 − δ_H).
pub fn geometry_suite(p: &BlackHoleParams, mods: &ModFunctions, points: usize, n_r: usize, n_theta: usize, seed: u64) -> Result<GeometryReport> {
    let r_in = p.r_plus * (1.0 - mods.delta_h);
    let mut charts = Vec::new();
    let mut det_max = 0.0f64;
    for (k, chart) in [Chart::BoyerLindquist, Chart::IngoingEF, Chart::Normalized].into_iter().enumerate() {
        let mut g = rng(seed, k as u64);
        let pts: Vec<CoordPoint> = (0..points)
            .map(|_| {
                let r = match chart {
                    Chart::BoyerLindquist => p.r_plus + log_uniform(&mut g, 1e-2 * p.m, 1e3 * p.m),
                    _ => r_in + log_uniform(&mut g, 1e-6 * p.m, 1e3 * p.m),
                };
                let th = theta_uniform(&mut g);
                let t = g.gen_range(-10.0..10.0);
                let ph = g.gen_range(0.0..std::f64::consts::TAU);
                CoordPoint::new(chart, t, r, th, ph)
            })
            .collect();
        let res = par::map(pts.len(), |i| {
            let pt = &pts[i];
            let mc = match chart {
                Chart::BoyerLindquist => metric_bl(p, pt),
                Chart::IngoingEF => metric_ef(p, pt),
                Chart::Normalized => inverse_metric_normalized(p, mods, pt),
            }?;
            let expect = p.q2(pt.r(), pt.theta()) * pt.theta().sin();
            let det = (det4(&mc.g).abs().sqrt() - expect).abs() / expect;
            let sd = (mc.sqrt_det - expect).abs() / expect;
            Ok((mc.inverse_defect(), det.max(sd)))
        })
        .into_iter()
        .collect::<Result<Vec<(f64, f64)>>>()?;
        let worst = Extreme::max_of(res.iter().map(|x| x.0));
        det_max = det_max.max(Extreme::max_of(res.iter().map(|x| x.1)).value);
        let at = worst.index.map(|i| pts[i]).unwrap_or(pts[0]);
        charts.push(ChartDefect {
            chart: chart.name(),
            max_defect: worst.value,
            worst_r: at.r(),
            worst_theta: at.theta(),
            points,
        });
    }

    // g^ττ on r − r_in log-spaced to 10⁴m
    let (lo, hi) = ((1e-6 * p.m).ln(), (1e4 * p.m).ln());
    let gtt = par::map(n_r * n_theta, |k| {
        let (i, j) = (k / n_theta, k % n_theta);
        let r = r_in + (lo + (hi - lo) * i as f64 / (n_r - 1).max(1) as f64).exp();
        let th = THETA_MIN + (std::f64::consts::PI - 2.0 * THETA_MIN) * j as f64 / (n_theta - 1).max(1) as f64;
        inverse_metric_normalized(p, mods, &CoordPoint::new(Chart::Normalized, 0.0, r, th, 0.0))
            .map(|m| (m.ginv[0][0], r, th))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let w = Extreme::max_of(gtt.iter().map(|x| x.0));
    let (g_tautau_worst_r, g_tautau_worst_theta) = w.index.map(|i| (gtt[i].1, gtt[i].2)).unwrap_or((f64::NAN, f64::NAN));
    let blend = mods.certify_blends(400, 64);
    let pass = charts.iter().all(|c| c.max_defect < INVERSE_TOL) && det_max < DET_TOL && w.value < 0.0 && blend.margin > 0.0;
    Ok(GeometryReport {
        spin: p.spin(),
        charts,
        det_max_rel: det_max,
        g_tautau_max: w.value,
        g_tautau_worst_r,
        g_tautau_worst_theta,
        blend_margin: blend.margin,
        pass,
    })
}

// --------------------------------------------------------------- potential

#[derive(Debug, Clone, Serialize)]
pub struct PotentialReport {
    pub spin: f64,
    /// |r_max − 3m| at Ξ = (0, 0, 1); only checked at a = 0.
    pub photon_sphere_error: Option<f64>,
    /// Largest r_max/m over the samples that have a maximum.
    pub r_max_largest: f64,
    pub r_max_worst_xi: Option<[f64; 3]>,
    pub with_maximum: usize,
    pub samples: usize,
    /// max |(ξ_τ² − V)(r₊) − k₊²| over the magnitude of the terms of ξ_τ² − V(r₊).
    pub horizon_gap_max_rel: f64,
    /// max |∂_rV − FD| / (|∂_rV| + ε) with ε the FD noise floor.
    pub dv_max_rel: f64,
    pub dv_points: usize,
    pub pass: bool,
}

pub fn potential_suite(p: &BlackHoleParams, samples: usize, dv_points: usize, seed: u64) -> Result<PotentialReport> {
    let photon_sphere_error = if p.a == 0.0 {
        let c = critical_points(p, &FrequencyTriplet::new(0.0, 0.0, 1.0))?;
        Some(c.r_max.map_or(f64::INFINITY, |r| (r - 3.0 * p.m).abs()))
    } else {
        None
    };

    let mut g = rng(seed, 10);
    let xis: Vec<FrequencyTriplet> = (0..samples)
        .map(|_| {
            let mut x = sample_unit_xi(p, &mut g);
            // Λ = 0 has no maximum; keep it away from the pole
            if x.lambda == 0.0 {
                x.lambda = 1e-3;
            }
            x
        })
        .collect();
    let rows = par::map(xis.len(), |i| {
        let xi = &xis[i];
        let c = critical_points(p, xi).ok().and_then(|c| c.r_max);
        let rp = p.r_plus;
        let k = p.k_plus(xi.xi_tau, xi.xi_phi);
        let gap = g_gap(p, rp, xi);
        // magnitudes of the terms of ξ_τ² − V(r₊), with Δ(r₊) spelled out
        let w2 = p.r2a2(rp).powi(2);
        let (a, m) = (p.a, p.m);
        let terms = xi.xi_tau * xi.xi_tau
            + ((rp * rp + 2.0 * m * rp + a * a) * xi.lambda * xi.lambda
                + (4.0 * a * m * rp * xi.xi_tau * xi.xi_phi).abs()
                + a * a * xi.xi_phi * xi.xi_phi)
                / w2;
        let h = rel(gap, k * k, terms.max(k * k));
        (c, h)
    });
    let rm = Extreme::max_of(rows.iter().map(|x| x.0.map_or(f64::NEG_INFINITY, |r| r / p.m)));
    let with_maximum = rows.iter().filter(|x| x.0.is_some()).count();
    let hz = Extreme::max_of(rows.iter().map(|x| x.1));

    let pts: Vec<(f64, FrequencyTriplet)> = (0..dv_points)
        .map(|_| {
            let r = p.r_plus + log_uniform(&mut g, 1e-2 * p.m, 1e3 * p.m);
            let s = log_uniform(&mut g, 0.1, 100.0);
            (r, sample_unit_xi(p, &mut g).scaled(s))
        })
        .collect();
    let dv = par::map(pts.len(), |i| {
        let (r, xi) = pts[i];
        let h = 1e-3 * (r - p.r_plus).min(r);
        let fd = central_diff(|s| potential_v(p, s, &xi), r, h);
        let exact = dv_dr(p, r, &xi);
        // roundoff of the difference quotient: ε|V|/h
        let floor = 1e-16 * (xi.norm().powi(2) / (r * r)) / h;
        (fd - exact).abs() / (exact.abs() + floor)
    });
    let dvw = Extreme::max_of(dv);

    let ok_photon = photon_sphere_error.map_or(true, |e| e < PHOTON_SPHERE_TOL);
    let pass = ok_photon && rm.value <= R_MAX_BOUND && hz.value < HORIZON_GAP_TOL && dvw.value < DV_TOL;
    Ok(PotentialReport {
        spin: p.spin(),
        photon_sphere_error,
        r_max_largest: rm.value,
        r_max_worst_xi: rm.index.map(|i| xis[i].as_array()),
        with_maximum,
        samples,
        horizon_gap_max_rel: hz.value,
        dv_max_rel: dvw.value,
        dv_points,
        pass,
    })
}

/// Sampled (r, V, ∂_rV) on `n` points with r − r₊ log-spaced up to `r_max`.
pub fn potential_profile(p: &BlackHoleParams, xi: &FrequencyTriplet, n: usize, r_max: f64) -> Vec<(f64, f64, f64)> {
    let (lo, hi) = ((1e-3 * p.m).ln(), (r_max - p.r_plus).max(1e-3 * p.m).ln());
    (0..n)
        .map(|i| {
            let r = p.r_plus + (lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).exp();
            (r, potential_v(p, r, xi), dv_dr(p, r, xi))
        })
        .collect()
}

// ----------------------------------------------------------- superradiance

#[derive(Debug, Clone, Serialize)]
pub struct SuperradianceReport {
    pub spin: f64,
    pub samples: usize,
    /// min (V(r_max) − ξ_τ²)/Λ².
    pub min_gap: f64,
    pub worst_xi: Option<[f64; 3]>,
    pub pass: bool,
}

/// A unit-norm admissible Ξ with 0 < −ξ_τξ_φ̃ ≤ ω_Hξ_φ̃².
pub fn sample_superradiant<R: Rng + ?Sized>(p: &BlackHoleParams, rng: &mut R) -> FrequencyTriplet {
    let xp = loop {
        let v: f64 = rng.gen_range(-1.0..1.0);
        if v != 0.0 {
            break v;
        }
    };
    // −ξ_τξ_φ̃ = uω_Hξ_φ̃² with u ∈ (0, 1]
    let u = 1.0 - rng.gen::<f64>();
    let xt = -u * p.omega_h * xp;
    let lmin = (xp * xp).max(2.0 * (p.a * xp * xt).abs()).sqrt();
    let l = lmin + rng.gen_range(0.0..4.0) * lmin.max(0.05);
    let xi = FrequencyTriplet::new(xt, xp, l);
    xi.scaled(1.0 / xi.norm())
}

pub fn superradiance_suite(p: &BlackHoleParams, samples: usize, seed: u64) -> SuperradianceReport {
    let mut g = rng(seed, 20);
    let xis: Vec<FrequencyTriplet> = (0..samples).map(|_| sample_superradiant(p, &mut g)).collect();
    let gaps = par::map(xis.len(), |i| trapping_gap(p, &xis[i]));
    let w = Extreme::min_of(gaps);
    SuperradianceReport {
        spin: p.spin(),
        samples,
        min_gap: w.value,
        worst_xi: w.index.map(|i| xis[i].as_array()),
        pass: samples > 0 && w.value > 0.0,
    }
}

// ----------------------------------------------------------------- symbols

#[derive(Debug, Clone, Serialize)]
pub struct SymbolReport {
    pub spin: f64,
    pub points: usize,
    /// Closed-form Q^h, Q^y, Q^f, Q^z against σ₂ from the triples.
    pub bulk_max_rel: f64,
    /// The same against −½{p, s₀ξ̃ + s₁} − e₀p with ∂_r by differences.
    pub bulk_fd_max_rel: f64,
    /// σ_BDR^y, σ_BDR^f, σ_BDR^z against σ_{2,BDR}.
    pub flux_max_rel: f64,
    /// S₂ = S₂^BL − S₁²/Δ.
    pub s2_max_rel: f64,
    /// wave symbol against its Boyer–Lindquist form.
    pub wave_bl_max_rel: f64,
    /// wave symbol against −|q|²g^{αβ}ξ_αξ_β in the normalized chart.
    pub wave_metric_max_rel: f64,
    pub worst_r: f64,
    pub pass: bool,
}

/// Random smooth test profile c₀ + c₁/r + c₂ sin(r/3).
#[derive(Debug, Clone, Copy)]
struct TestProfile([f64; 3]);

impl TestProfile {
    fn draw<R: Rng>(g: &mut R) -> Self {
        Self([g.gen_range(-2.0..2.0), g.gen_range(-2.0..2.0), g.gen_range(-2.0..2.0)])
    }
    fn v(&self, r: f64) -> f64 {
        self.0[0] + self.0[1] / r + self.0[2] * (r / 3.0).sin()
    }
    fn at(&self, r: f64) -> Profile {
        Profile::new(self.v(r), -self.0[1] / (r * r) + self.0[2] * (r / 3.0).cos() / 3.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct SymbolSample {
    r: f64,
    xi_r: f64,
    xi: FrequencyTriplet,
    theta: f64,
    xi_theta: f64,
    h: TestProfile,
    y: TestProfile,
    f: TestProfile,
    z: TestProfile,
}

/// Σ of the magnitudes of the terms of σ₂.
fn bulk_scale(p: &BlackHoleParams, mv: &MultiplierValues, r: f64, xt: f64, xi: &FrequencyTriplet) -> f64 {
    let (m, w, mu) = (p.m, p.r2a2(r), p.mu(r));
    let kin = xt * xt + g_gap(p, r, xi).abs();
    w * (mv.ds0.abs() * xt * xt + mv.ds1.abs() * xt.abs())
        + mu * mv.s0.abs() * ((4.0 * r / mu + 2.0 * (r - m).abs() / (mu * mu)) * kin + w / mu * dv_dr(p, r, xi).abs())
        + w / mu * mv.e0.abs() * kin
}

fn bdr_scale(p: &BlackHoleParams, mods: &ModFunctions, mv: &MultiplierValues, pt: &PhasePoint) -> f64 {
    let r = pt.r;
    let s1 = s1_symbol(p, mods, r, &pt.xi).abs();
    let s2 = s2_symbol(p, mods, r, &pt.xi).abs();
    let mu = p.mu(r);
    let xr = pt.xi_r.abs();
    mu * mv.s0.abs() * xr * s1 + mv.s0.abs() * s1 * s1 / p.r2a2(r) + p.delta(r).abs() * mv.s1.abs() * xr
        + mv.s1.abs() * s1
        + 0.5 * mu * mv.s0.abs() * s2
}

/// [bulk, bulk FD, flux, S₂, wave BL, wave metric] errors at one point.
fn symbol_errors(p: &BlackHoleParams, mods: &ModFunctions, s: &SymbolSample) -> [f64; 6] {
    let r = s.r;
    let xi = s.xi;
    let pt = PhasePoint::new(r, s.xi_r, xi);
    let xt = xi_rstar(p, mods, &pt);
    let zs = xi.xi_tau + 0.5 * xi.xi_phi - 0.25 * xi.lambda;
    let zp = |r: f64| {
        let b = s.z.at(r);
        Profile::new(b.v * zs, b.d * zs)
    };

    let triples = [
        (triple_h(p, r, s.h.at(r)), currents::q_h(p, r, &xi, xt, s.h.v(r))),
        (triple_y(p, r, s.y.at(r)), currents::q_y(p, r, &xi, xt, s.y.at(r))),
        (triple_f(p, r, s.f.at(r)), currents::q_f(p, r, &xi, xt, s.f.at(r))),
        (triple_z(zp(r)), currents::q_z(p, r, xt, zp(r).d)),
    ];
    let mut bulk = 0.0f64;
    for (mv, q) in &triples {
        bulk = bulk.max(rel(sigma2_bulk(p, mods, mv, &pt), *q, bulk_scale(p, mv, r, xt, &xi)));
    }

    // generic evaluation −½{p, s₀ξ̃ + s₁} − e₀p with every ∂_r taken by
    // differences; both symbols are affine or quadratic in ξ_r, so ∂_{ξ_r}
    // is exact
    let wave = |r: f64| wave_symbol(p, mods, &PhasePoint::new(r, s.xi_r, xi));
    let hd = 1e-4 * (r - p.r_plus).min(1.0);
    let fd = |f: &dyn Fn(f64) -> f64, at: f64| Profile::new(f(at), central_diff(f, at, hd));
    let jp = Jet {
        val: wave(r),
        d_r: central_diff(wave, r, hd),
        d_xir: -2.0 * p.delta(r) * s.xi_r - 2.0 * s1_symbol(p, mods, r, &xi),
    };
    let fd_triples: [(Box<dyn Fn(f64) -> MultiplierValues>, f64); 4] = [
        (Box::new(|r| triple_h(p, r, Profile::new(s.h.v(r), 0.0))), triples[0].1),
        (Box::new(|r| triple_y(p, r, fd(&|t| s.y.v(t), r))), triples[1].1),
        (Box::new(|r| triple_f(p, r, fd(&|t| s.f.v(t), r))), triples[2].1),
        (Box::new(|r| triple_z(Profile::new(s.z.v(r) * zs, 0.0))), triples[3].1),
    ];
    let mut bulk_fd = 0.0f64;
    for (k, (tr, q)) in fd_triples.iter().enumerate() {
        let mv = tr(r);
        let x_sym = |rr: f64| {
            let m = tr(rr);
            m.s0 * xi_rstar(p, mods, &PhasePoint::new(rr, s.xi_r, xi)) + m.s1
        };
        let jx = Jet {
            val: x_sym(r),
            d_r: central_diff(x_sym, r, hd),
            d_xir: mv.s0 * p.mu(r),
        };
        let generic = -0.5 * bracket_of_jets(&jp, &jx) - mv.e0 * jp.val;
        bulk_fd = bulk_fd.max(rel(generic, *q, bulk_scale(p, &triples[k].0, r, xt, &xi)));
    }

    let bd = [
        (triples[1].0, currents::bdr_y(p, mods, &pt, s.y.v(r))),
        (triples[2].0, currents::bdr_f(p, mods, &pt, s.f.v(r))),
        (triples[3].0, currents::bdr_z(p, mods, &pt, zp(r).v)),
    ];
    let mut flux = 0.0f64;
    for (mv, b) in &bd {
        flux = flux.max(rel(sigma2_bdr(p, mods, mv, &pt), *b, bdr_scale(p, mods, mv, &pt)));
    }

    let s1 = s1_symbol(p, mods, r, &xi);
    let s2 = s2_symbol(p, mods, r, &xi);
    let sbl = s2_bl(p, r, &xi);
    let delta = p.delta(r);
    let s2e = rel(s2, sbl - s1 * s1 / delta, s2.abs() + sbl.abs() + s1 * s1 / delta.abs());

    let ws = wave_symbol(p, mods, &pt);
    let wbl = wave_symbol_bl(p, mods, &pt);
    let wscale = delta.abs() * s.xi_r * s.xi_r + 2.0 * (s1 * s.xi_r).abs() + s2.abs()
        + p.r2a2(r) / p.mu(r).abs() * xt * xt
        + sbl.abs();
    let wbe = rel(ws, wbl, wscale);

    let ext = PhasePoint::extended(p, r, s.theta, xi.xi_tau, s.xi_r, s.xi_theta, xi.xi_phi);
    let we = wave_symbol(p, mods, &ext);
    let mc = match inverse_metric_normalized(p, mods, &CoordPoint::new(Chart::Normalized, 0.0, r, s.theta, 0.0)) {
        Ok(m) => m,
        Err(_) => return [f64::NAN; 6],
    };
    let q2 = p.q2(r, s.theta);
    let cov = [xi.xi_tau, s.xi_r, s.xi_theta, xi.xi_phi];
    let (mut contr, mut cscale) = (0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            let t = q2 * mc.ginv[a][b] * cov[a] * cov[b];
            contr += t;
            cscale += t.abs();
        }
    }
    let wme = rel(we, -contr, cscale.max(we.abs()));
    [bulk, bulk_fd, flux, s2e, wbe, wme]
}

/// Symbol identities at `points` random (r, ξ_r, Ξ, θ, ξ_θ) with random
/// smooth profiles, r − r₊ log-uniform on [10⁻²m, 10²m].
pub fn symbol_suite(p: &BlackHoleParams, mods: &ModFunctions, points: usize, seed: u64) -> SymbolReport {
    let mut g = rng(seed, 30);
    let samples: Vec<SymbolSample> = (0..points)
        .map(|_| {
            let r = p.r_plus + log_uniform(&mut g, 1e-2 * p.m, 1e2 * p.m);
            let s = log_uniform(&mut g, 0.1, 10.0);
            let mut xi = sample_unit_xi(p, &mut g).scaled(s);
            xi.lambda = xi.lambda.max(1e-3);
            SymbolSample {
                r,
                xi_r: g.gen_range(-3.0..3.0) * s,
                xi,
                theta: theta_uniform(&mut g),
                xi_theta: g.gen_range(-1.0..1.0) * s,
                h: TestProfile::draw(&mut g),
                y: TestProfile::draw(&mut g),
                f: TestProfile::draw(&mut g),
                z: TestProfile::draw(&mut g),
            }
        })
        .collect();
    let errs = par::map(samples.len(), |i| symbol_errors(p, mods, &samples[i]));
    let col = |k: usize| Extreme::max_of(errs.iter().map(|e| e[k]));
    let cols: Vec<Extreme> = (0..6).map(col).collect();
    let worst = cols
        .iter()
        .zip([SYMBOL_TOL, SYMBOL_FD_TOL, SYMBOL_TOL, IDENTITY_TOL, IDENTITY_TOL, IDENTITY_TOL])
        .max_by(|a, b| (a.0.value / a.1).total_cmp(&(b.0.value / b.1)))
        .and_then(|(e, _)| e.index)
        .map_or(f64::NAN, |i| samples[i].r);
    let pass = cols[0].value < SYMBOL_TOL
        && cols[1].value < SYMBOL_FD_TOL
        && cols[2].value < SYMBOL_TOL
        && cols[3].value < IDENTITY_TOL
        && cols[4].value < IDENTITY_TOL
        && cols[5].value < IDENTITY_TOL;
    SymbolReport {
        spin: p.spin(),
        points,
        bulk_max_rel: cols[0].value,
        bulk_fd_max_rel: cols[1].value,
        flux_max_rel: cols[2].value,
        s2_max_rel: cols[3].value,
        wave_bl_max_rel: cols[4].value,
        wave_metric_max_rel: cols[5].value,
        worst_r: worst,
        pass,
    }
}

// ------------------------------------------------------------------- cover

#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    pub spin: f64,
    pub delta_f: f64,
    pub samples: usize,
    pub uncovered: usize,
    pub first_uncovered: Option<[f64; 3]>,
    /// max |Σχ² − 1| over samples with |Ξ| ≥ 2.
    pub partition_max_defect: f64,
    pub superradiant: usize,
    /// Superradiant samples outside G_SR.
    pub superradiant_outside_sr: usize,
    pub errors: usize,
    pub pass: bool,
}

/// δ_F as selected for the default certification grid.
pub fn default_delta_f(p: &BlackHoleParams) -> Result<f64> {
    Ok(select_delta_f(p, &CertGrid::default().directions(p))?.delta_f)
}

/// Regime cover at `samples` admissible Ξ with |Ξ| log-uniform on [0.1, 100].
pub fn cover_suite(p: &BlackHoleParams, delta_f: f64, samples: usize, seed: u64) -> CoverReport {
    let mut g = rng(seed, 40);
    let xis: Vec<FrequencyTriplet> = (0..samples)
        .map(|_| {
            let s = log_uniform(&mut g, 0.1, 100.0);
            sample_unit_xi(p, &mut g).scaled(s)
        })
        .collect();
    let rows = par::map(xis.len(), |i| {
        let xi = &xis[i];
        match classify_regimes(p, xi, delta_f) {
            Ok(m) => {
                let d = if xi.norm() >= 2.0 {
                    (m.chi.iter().map(|c| c * c).sum::<f64>() - 1.0).abs()
                } else {
                    0.0
                };
                let sr = is_superradiant(p, xi);
                Some((m.any(), d, sr, sr && !m.in_sr))
            }
            Err(_) => None,
        }
    });
    let errors = rows.iter().filter(|r| r.is_none()).count();
    let ok: Vec<(usize, (bool, f64, bool, bool))> = rows.iter().enumerate().filter_map(|(i, r)| r.map(|v| (i, v))).collect();
    let uncovered: Vec<usize> = ok.iter().filter(|(_, v)| !v.0).map(|(i, _)| *i).collect();
    let pd = Extreme::max_of(ok.iter().map(|(_, v)| v.1));
    let superradiant = ok.iter().filter(|(_, v)| v.2).count();
    let outside = ok.iter().filter(|(_, v)| v.3).count();
    CoverReport {
        spin: p.spin(),
        delta_f,
        samples,
        uncovered: uncovered.len(),
        first_uncovered: uncovered.first().map(|&i| xis[i].as_array()),
        partition_max_defect: pd.value.max(0.0),
        superradiant,
        superradiant_outside_sr: outside,
        errors,
        pass: errors == 0 && uncovered.is_empty() && pd.value < PARTITION_TOL && outside == 0,
    }
}

// ----------------------------------------------------------------- solver

pub const ENERGY_DRIFT_TOL: f64 = 1e-6;
pub const FLUX_TOL: f64 = 1e-6;
pub const TRANSMISSION_TOL: f64 = 0.05;
pub const TRAPPING_GAIN: f64 = 3.0;

/// max |E(t) − E(0)|/E(0) for a packet between reflecting walls at a = 0,
/// where E is conserved.
pub fn energy_drift(t_final: f64) -> Result<f64> {
    let p = BlackHoleParams::new(0.0, 1.0)?;
    let mode = ModeSpec::new(0, 6f64.sqrt())?;
    let opts = EvolveOptions {
        boundary: BoundaryKind::Reflecting,
        t_final,
        ..Default::default()
    };
    let init = InitialData::Packet(Packet {
        center: 10.0,
        width: 3.0,
        omega0: 0.6,
        direction: Direction::Ingoing,
        amplitude: 1.0,
    });
    let out = evolve(&p, &mode, &init, &opts)?;
    let e0 = out.series[0].energy;
    Ok(out.series.iter().map(|d| ((d.energy - e0) / e0).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub spin: f64,
    pub mode: ModeSpec,
    pub frequencies: usize,
    pub flux_residual_max: f64,
    pub r2_max: f64,
    pub r2_max_omega: f64,
    /// Largest |R|² over frequencies with ω k₊ < 0, if any were scanned.
    pub r2_max_superradiant: Option<f64>,
}

pub fn summarize_scan(p: &BlackHoleParams, mode: &ModeSpec, rows: &[ScatterResult]) -> ScanSummary {
    let r2 = Extreme::max_of(rows.iter().map(|r| r.r2()));
    let sr: Vec<f64> = rows.iter().filter(|r| r.omega * r.k < 0.0).map(|r| r.r2()).collect();
    ScanSummary {
        spin: p.spin(),
        mode: *mode,
        frequencies: rows.len(),
        flux_residual_max: rows.iter().map(|r| r.flux_residual).fold(0.0, f64::max),
        r2_max: r2.value,
        r2_max_omega: r2.index.map_or(f64::NAN, |i| rows[i].omega),
        r2_max_superradiant: if sr.is_empty() { None } else { Some(sr.into_iter().fold(f64::NEG_INFINITY, f64::max)) },
    }
}

/// Evenly spaced frequencies on [lo, hi] with |ω| below `skip` dropped.
pub fn frequency_list(lo: f64, hi: f64, n: usize, skip: f64) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64)
        .filter(|w| w.abs() >= skip)
        .collect()
}

/// Oracle scans: ℓ = 1, 2 at a = 0 over ω ∈ [0.02, 2], and m_az = 1, Λ₀ = √2
/// at a = 0.9 over the admissible ω ∈ [−1, 1.1], which crosses the
/// superradiant band (−ω_H, 0).
pub fn scattering_scans() -> Result<Vec<ScanSummary>> {
    let mut out = Vec::new();
    let o = ScatterOptions::default();
    let p0 = BlackHoleParams::new(0.0, 1.0)?;
    let w0 = frequency_list(0.02, 2.0, 100, 0.0);
    for l2 in [2.0f64, 6.0] {
        let mode = ModeSpec::new(0, l2.sqrt())?;
        out.push(summarize_scan(&p0, &mode, &scan(&p0, &mode, &w0, &o)?));
    }
    let p = BlackHoleParams::new(0.9, 1.0)?;
    let mode = ModeSpec::new(1, 2f64.sqrt())?;
    let w = frequency_list(-1.0, 1.1, 106, 0.015);
    out.push(summarize_scan(&p, &mode, &scan(&p, &mode, &w, &o)?));
    Ok(out)
}

/// Ingoing packet started at r* = 80, far enough out that the 1/r² tail it
/// has not yet crossed is negligible, compared against the oracle on the
/// same domain.
pub fn transmission_agreement(n_freq: usize) -> Result<Vec<SpectralPoint>> {
    let p = BlackHoleParams::new(0.5, 1.0)?;
    let mode = ModeSpec::new(1, 2f64.sqrt())?;
    let pk = Packet {
        center: 80.0,
        width: 6.0,
        omega0: 0.4,
        direction: Direction::Ingoing,
        amplitude: 1.0,
    };
    let opts = EvolveOptions {
        grid: RadialGrid {
            r_star_min: -80.0,
            r_star_max: 120.0,
            dr_star: 0.05,
        },
        t_final: 230.0,
        ..Default::default()
    };
    transmission_check(&p, &mode, &pk, &opts, n_freq)
}

/// Trapped ℓ ≈ 10 packet standing at the photon sphere of a = 0; returns the
/// row whose trapping gain is M_und(T)/M(T).
pub fn trapping_pair(t_final: f64) -> Result<MorawetzRow> {
    let p = BlackHoleParams::new(0.0, 1.0)?;
    let mode = ModeSpec::new(0, 110f64.sqrt())?;
    let spec = PacketSpec {
        r_center: 3.0,
        width: 1.0,
        omega0: None,
        direction: Direction::Standing,
    };
    let opts = EvolveOptions {
        t_final,
        record_every: 100,
        ..Default::default()
    };
    let rows = morawetz_experiment(&p, &mode, &[spec], &opts)?;
    Ok(rows[0])
}

// ----------------------------------------------------------- certification

#[derive(Debug, Clone, Serialize)]
pub struct CertificationSummary {
    pub spin: f64,
    pub constants: Constants,
    pub delta_f: f64,
    /// c_min of the assembled bulk current against P₀ on the full grid.
    pub c_min: f64,
    /// The same on the even-index subgrid.
    pub c_min_coarse: f64,
    pub monotone: bool,
    pub bulk_pass: bool,
    pub boundary_pass: bool,
    /// Smallest ϖ² radicand over all regimes at δ_H′ and δ_H′/2.
    pub min_radicand: f64,
    pub tried: usize,
    pub pass: bool,
}

impl CertificationSummary {
    pub fn from_outcome(p: &BlackHoleParams, o: &SearchOutcome) -> Self {
        let c = |b: &crate::multiplier_builder::certify::BulkCertification| b.total.as_ref().map_or(f64::NAN, |t| t.c_min);
        let min_radicand = o
            .boundary
            .regimes
            .iter()
            .filter_map(|r| r.margins.get("min_radicand").copied())
            .fold(f64::INFINITY, f64::min);
        let (bulk_pass, boundary_pass) = (o.bulk.pass(), o.boundary.pass());
        let c_min = c(&o.bulk);
        Self {
            spin: p.spin(),
            constants: o.constants,
            delta_f: o.delta_f.delta_f,
            c_min,
            c_min_coarse: c(&o.bulk_coarse),
            monotone: o.monotone(),
            bulk_pass,
            boundary_pass,
            min_radicand,
            tried: o.tried,
            pass: bulk_pass && boundary_pass && o.monotone() && c_min > 0.0 && min_radicand >= -1e-12,
        }
    }
}

/// Modifier functions at the default constants, optionally corrupted.
pub fn default_mods(p: &BlackHoleParams, corruption: f64) -> Result<ModFunctions> {
    let (dh, dbl) = default_deltas(p);
    crate::kerr_geometry::build_mod_functions_with(p, dh, dbl, corruption)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kerr_geometry::new_params;

    #[test]
    fn superradiant_sampler_stays_in_band() {
        let p = new_params(0.9, 1.0).unwrap();
        let mut g = rng(1, 0);
        for _ in 0..1000 {
            let xi = sample_superradiant(&p, &mut g);
            let cr = xi.counter_rotation();
            assert!(cr > 0.0 && cr <= p.omega_h * xi.xi_phi * xi.xi_phi * (1.0 + 1e-12));
            assert!(xi.is_admissible(&p));
            assert!((xi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn small_suites_pass() {
        let p = new_params(0.6, 1.0).unwrap();
        let mods = default_mods(&p, 0.0).unwrap();
        assert!(geometry_suite(&p, &mods, 200, 40, 8, 7).unwrap().pass);
        assert!(potential_suite(&p, 300, 300, 7).unwrap().pass);
        assert!(superradiance_suite(&p, 300, 7).pass);
        let s = symbol_suite(&p, &mods, 300, 7);
        assert!(s.pass, "{s:?}");
    }

    #[test]
    fn reports_are_seed_deterministic() {
        let p = new_params(0.3, 1.0).unwrap();
        let a = superradiance_suite(&p, 200, 3);
        let b = superradiance_suite(&p, 200, 3);
        assert_eq!(a.min_gap, b.min_gap);
        assert_eq!(a.worst_xi, b.worst_xi);
    }
}
