//! Grid certification of the bulk lower bound and the boundary conditions.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{build_multipliers, Constants, MultiplierSet, Quadratic, Regime};
use crate::error::{KerrError, Result, WorstPoint};
use crate::kerr_geometry::{BlackHoleParams, ModFunctions};
use crate::par;
use crate::phase_space::{classify_with, r_trap_with, FrequencyTriplet, RegimeParams};
use crate::symbol_calculus::PhasePoint;

/// Tolerance for c_min (relative to the unit-sphere scale of the samples).
pub const C_MIN_TOL: f64 = 1e-10;

/// r log-spaced in r − r₊ on [r_in, R]; Ξ on an (α, β) parameterization of
/// the admissible unit sphere. Strides > 1 keep every stride-th index of the
/// r axis and of each Ξ axis, so a strided grid is a subset of the full one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CertGrid {
    pub n_r: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub r_stride: usize,
    pub xi_stride: usize,
}

impl Default for CertGrid {
    fn default() -> Self {
        Self {
            n_r: 2000,
            n_alpha: 200,
            n_beta: 200,
            r_stride: 1,
            xi_stride: 1,
        }
    }
}

impl CertGrid {
    pub fn new(n_r: usize, n_alpha: usize, n_beta: usize) -> Self {
        Self {
            n_r,
            n_alpha,
            n_beta,
            r_stride: 1,
            xi_stride: 1,
        }
    }

    /// Every other point of this grid along each axis.
    pub fn coarse(&self) -> Self {
        self.strided(2 * self.r_stride, 2 * self.xi_stride)
    }

    pub fn strided(&self, r_stride: usize, xi_stride: usize) -> Self {
        Self {
            r_stride,
            xi_stride,
            ..*self
        }
    }

    /// Number of (r, Ξ-direction) pairs before admissibility filtering.
    pub fn size(&self) -> usize {
        let n = |k: usize, s: usize| (k + s - 1) / s;
        n(self.n_r, self.r_stride) * n(self.n_alpha, self.xi_stride) * n(self.n_beta, self.xi_stride)
    }

    pub fn radii(&self, p: &BlackHoleParams, c: &Constants) -> Vec<f64> {
        let (lo, hi) = ((c.r_in - p.r_plus).ln(), (c.r_out - p.r_plus).ln());
        let n = self.n_r;
        (0..n)
            .step_by(self.r_stride)
            .map(|i| {
                if i == n - 1 {
                    c.r_out
                } else if i == 0 {
                    c.r_in
                } else {
                    p.r_plus + (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect()
    }

    /// Admissible unit directions. The two poles (Λ = 0, ξ_φ̃ = 0) appear once.
    pub fn directions(&self, p: &BlackHoleParams) -> Vec<FrequencyTriplet> {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
        let (na, nb) = (self.n_alpha, self.n_beta);
        let mut out = Vec::new();
        for i in (0..na).step_by(self.xi_stride) {
            let al = PI * i as f64 / (na - 1) as f64;
            let (sa, ca) = al.sin_cos();
            if i == 0 || i == na - 1 {
                out.push(FrequencyTriplet::new(if i == 0 { 1.0 } else { -1.0 }, 0.0, 0.0));
                continue;
            }
            for j in (0..nb).step_by(self.xi_stride) {
                let be = FRAC_PI_4 + FRAC_PI_2 * j as f64 / (nb - 1) as f64;
                let (sb, cb) = be.sin_cos();
                let xi = FrequencyTriplet::new(ca, sa * cb, sa * sb);
                if xi.is_admissible(p) {
                    out.push(xi);
                }
            }
        }
        out
    }
}

/// Outcome of one certification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub regime: String,
    pub pass: bool,
    pub c_min: f64,
    pub worst_r: f64,
    pub worst_xi: [f64; 3],
    pub grid: CertGrid,
    pub constants: Constants,
    /// Sub-check margins, keyed by name.
    pub margins: BTreeMap<String, f64>,
    /// Number of (r, Ξ) or boundary points examined.
    pub points: usize,
    /// First construction failure, if any.
    pub note: Option<String>,
}

impl CertReport {
    pub fn worst_point(&self) -> WorstPoint {
        WorstPoint {
            r: self.worst_r,
            xi: self.worst_xi,
        }
    }
}

/// Running minimum with its location; ties keep the earlier sample.
#[derive(Debug, Clone, Copy)]
struct Worst {
    v: f64,
    r: f64,
    xi: usize,
    count: usize,
}

impl Worst {
    const NONE: Worst = Worst {
        v: f64::INFINITY,
        r: f64::NAN,
        xi: usize::MAX,
        count: 0,
    };

    fn see(&mut self, v: f64, r: f64, xi: usize) {
        self.count += 1;
        // NaN counts as a failure
        let v = if v.is_nan() { f64::NEG_INFINITY } else { v };
        if v < self.v {
            *self = Worst {
                v,
                r,
                xi,
                count: self.count,
            };
        }
    }

    fn merge(self, o: Worst) -> Worst {
        let count = self.count + o.count;
        let keep = if o.v < self.v || (o.v == self.v && o.xi < self.xi) {
            o
        } else {
            self
        };
        Worst { count, ..keep }
    }
}

/// Which pieces a bulk certification covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkOptions {
    pub regimes: [bool; 5],
    /// Multiplier on h̃₁ (1 normally; the detector test uses 1000).
    pub h1_scale: f64,
}

impl Default for BulkOptions {
    fn default() -> Self {
        Self {
            regimes: [true; 5],
            h1_scale: 1.0,
        }
    }
}

impl BulkOptions {
    pub fn only(list: &[Regime]) -> Self {
        let mut regimes = [false; 5];
        for r in list {
            regimes[r.index()] = true;
        }
        Self {
            regimes,
            h1_scale: 1.0,
        }
    }
}

/// Bulk result per regime plus the assembled total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BulkCertification {
    pub regimes: Vec<CertReport>,
    pub total: Option<CertReport>,
}

impl BulkCertification {
    pub fn pass(&self) -> bool {
        self.regimes.iter().all(|r| r.pass) && self.total.as_ref().map_or(true, |t| t.pass)
    }

    /// The failing report with the smallest c_min, if any.
    pub fn worst_failure(&self) -> Option<&CertReport> {
        self.regimes
            .iter()
            .chain(self.total.iter())
            .filter(|r| !r.pass)
            .min_by(|a, b| a.c_min.total_cmp(&b.c_min))
    }

    pub fn into_result(self) -> Result<Self> {
        match self.worst_failure() {
            None => Ok(self),
            Some(w) => Err(KerrError::PositivityFailure {
                what: format!("{} bulk remainder / P0", w.regime),
                at: w.worst_point(),
                margin: w.c_min,
            }),
        }
    }
}

/// Non-degenerate and trapping-degenerate parts of P₀.
#[inline]
fn p0_parts(r: f64, xi: &FrequencyTriplet) -> (f64, f64) {
    let t2 = xi.xi_tau * xi.xi_tau;
    let ang = xi.xi_phi * xi.xi_phi + xi.lambda * xi.lambda;
    let r2 = r * r;
    (t2 + ang / r2, t2 / r2 + ang / (r2 * r2))
}

/// P₀(r, Ξ) with weights χ₅ and r_trap.
pub fn p0(r: f64, xi: &FrequencyTriplet, chi5: f64, r_trap: f64) -> f64 {
    let (nd, dg) = p0_parts(r, xi);
    let c2 = chi5 * chi5;
    (1.0 - c2) * nd + c2 * (r - r_trap).powi(2) * dg
}

/// Per-direction data shared by the bulk and boundary checks.
struct DirSetup {
    chi: [f64; 5],
    r_trap: f64,
    sets: Vec<(usize, MultiplierSet)>,
    failure: Option<(usize, String)>,
}

fn setup_direction(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    c: &Constants,
    build_c: &Constants,
    xi: &FrequencyTriplet,
    wanted: &[bool; 5],
    h1_scale: f64,
) -> DirSetup {
    let rp = RegimeParams {
        delta_f: c.delta_f,
        r_in: c.r_in,
        r_out: c.r_out,
    };
    let chi = match classify_with(p, &xi.scaled(4.0), &rp) {
        Ok(m) => m.chi,
        Err(e) => {
            return DirSetup {
                chi: [0.0; 5],
                r_trap: 3.0 * p.m,
                sets: vec![],
                failure: Some((usize::MAX, e.to_string())),
            }
        }
    };
    let r_trap = r_trap_with(p, xi, &rp);
    let mut sets = Vec::new();
    let mut failure = None;
    for j in 0..5 {
        if chi[j] == 0.0 || !wanted[j] {
            continue;
        }
        match build_multipliers(p, mods, Regime::from_index(j), xi, build_c) {
            Ok(s) => sets.push((j, s.with_h1_scale(h1_scale))),
            Err(e) => {
                failure.get_or_insert((j, e.to_string()));
            }
        }
    }
    DirSetup {
        chi,
        r_trap,
        sets,
        failure,
    }
}

/// Per-direction minima: five regimes, the total remainder ratio, and the
/// smallest total d.
#[derive(Clone, Copy)]
struct DirMins {
    reg: [Worst; 5],
    total: Worst,
    d_total: Worst,
}

/// Bulk certification: for each grid direction the regime multipliers are
/// built, and at each radius the ξ̃-independent remainder Q − d(ξ̃ + η)² is
/// compared with P₀. Per-regime ratios use the part of P₀ carried by that
/// regime's weight.
pub fn certify_bulk(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    c: &Constants,
    grid: &CertGrid,
    opts: &BulkOptions,
) -> BulkCertification {
    let dirs = grid.directions(p);
    let radii = grid.radii(p, c);
    let all = opts.regimes.iter().all(|&b| b);
    let per: Vec<(DirMins, Option<(usize, String)>)> = par::map(dirs.len(), |k| {
        let xi = &dirs[k];
        let su = setup_direction(p, mods, c, c, xi, &opts.regimes, opts.h1_scale);
        let mut mins = DirMins {
            reg: [Worst::NONE; 5],
            total: Worst::NONE,
            d_total: Worst::NONE,
        };
        if let Some((j, _)) = &su.failure {
            if *j < 5 {
                mins.reg[*j].see(f64::NEG_INFINITY, c.r_in, k);
            }
            mins.total.see(f64::NEG_INFINITY, c.r_in, k);
            return (mins, su.failure);
        }
        let chi5 = su.chi[4];
        for &r in &radii {
            let (nd, dg) = p0_parts(r, xi);
            let mut tot = Quadratic::ZERO;
            for (j, set) in &su.sets {
                let q = set.quadratic(p, r);
                let w = su.chi[*j] * su.chi[*j];
                tot.add_scaled(w, &q);
                let pj = if *j == 4 {
                    (r - su.r_trap).powi(2) * dg
                } else {
                    nd
                };
                let ratio = if q.d <= 0.0 {
                    f64::NEG_INFINITY
                } else if pj <= 1e-14 * nd {
                    continue;
                } else {
                    q.remainder() / pj
                };
                mins.reg[*j].see(ratio, r, k);
            }
            if all {
                let pt = p0(r, xi, chi5, su.r_trap);
                mins.d_total.see(tot.d, r, k);
                let ratio = if tot.d <= 0.0 {
                    f64::NEG_INFINITY
                } else if pt <= 1e-14 * nd {
                    continue;
                } else {
                    tot.remainder() / pt
                };
                mins.total.see(ratio, r, k);
            }
        }
        (mins, None)
    });

    let mut acc = DirMins {
        reg: [Worst::NONE; 5],
        total: Worst::NONE,
        d_total: Worst::NONE,
    };
    let mut first_note: [Option<String>; 6] = Default::default();
    for (m, note) in &per {
        for j in 0..5 {
            acc.reg[j] = acc.reg[j].merge(m.reg[j]);
        }
        acc.total = acc.total.merge(m.total);
        acc.d_total = acc.d_total.merge(m.d_total);
        if let Some((j, s)) = note {
            let slot = (*j).min(5);
            first_note[slot].get_or_insert_with(|| s.clone());
        }
    }
    let report = |name: &str, w: &Worst, extra: BTreeMap<String, f64>, note: Option<String>| {
        let xi = dirs.get(w.xi).map(|x| x.as_array()).unwrap_or([f64::NAN; 3]);
        let c_min = if w.count == 0 { f64::INFINITY } else { w.v };
        CertReport {
            regime: name.to_string(),
            pass: c_min > C_MIN_TOL && extra.values().all(|v| *v > 0.0),
            c_min,
            worst_r: w.r,
            worst_xi: xi,
            grid: *grid,
            constants: *c,
            margins: extra,
            points: w.count,
            note,
        }
    };
    let regimes = (0..5)
        .filter(|&j| opts.regimes[j])
        .map(|j| {
            report(
                Regime::from_index(j).name(),
                &acc.reg[j],
                BTreeMap::new(),
                first_note[j].clone(),
            )
        })
        .collect();
    let total = all.then(|| {
        let mut extra = BTreeMap::new();
        extra.insert("d_min".to_string(), acc.d_total.v);
        report("total", &acc.total, extra, first_note[5].clone())
    });
    BulkCertification { regimes, total }
}

/// Boundary result per regime.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCertification {
    pub regimes: Vec<CertReport>,
}

impl BoundaryCertification {
    pub fn pass(&self) -> bool {
        self.regimes.iter().all(|r| r.pass)
    }

    pub fn into_result(self) -> Result<Self> {
        match self.regimes.iter().find(|r| !r.pass) {
            None => Ok(self),
            Some(w) => Err(KerrError::BoundarySignFailure {
                what: format!("{} boundary", w.regime),
                at: w.worst_point(),
                margin: w.c_min,
            }),
        }
    }
}

/// ξ_r samples (in units of |Ξ|) for the boundary residual.
const XI_R: [f64; 9] = [-10.0, -3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0, 10.0];

/// Boundary data at one inner radius: smallest ϖ² radicand (normalized by
/// (r²+a²)|Ξ|²) and the fitted residual constant C.
fn boundary_scan(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    c: &Constants,
    build_c: &Constants,
    dirs: &[FrequencyTriplet],
) -> Vec<([Worst; 5], [Worst; 5], Option<(usize, String)>)> {
    par::map(dirs.len(), |k| {
        let xi = &dirs[k];
        let su = setup_direction(p, mods, c, build_c, xi, &[true; 5], 1.0);
        let mut rad = [Worst::NONE; 5];
        let mut res = [Worst::NONE; 5];
        if let Some((j, _)) = &su.failure {
            if *j < 5 {
                rad[*j].see(f64::NEG_INFINITY, build_c.r_in, k);
            }
            return (rad, res, su.failure);
        }
        let r = build_c.r_in;
        let mu = p.mu(r);
        let w = p.r2a2(r);
        for (j, set) in &su.sets {
            for &xr in &XI_R {
                let pt = PhasePoint::new(r, xr, *xi);
                let b = set.boundary(p, mods, &pt);
                rad[*j].see(b.varpi2 / w, r, k);
                let n = (xr * xr + 1.0).sqrt();
                let norm = mu.abs() * b.rho2.max(0.0).sqrt() * n + mu * mu * n * n;
                let resid = (b.bdr + b.rho2 + b.varpi2).abs();
                // the fitted C is a maximum; store its negative as a minimum
                res[*j].see(-resid / norm.max(1e-300), r, k);
            }
        }
        (rad, res, None)
    })
}

/// Boundary conditions at r = r₊(1+δ_H′), with the residual constant refitted
/// at δ_H′/2: each regime passes when every ϖ radicand is nonnegative and
/// C(δ_H′/2) ≤ 2C(δ_H′) + 1e−9.
pub fn certify_boundary(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    c: &Constants,
    grid: &CertGrid,
) -> BoundaryCertification {
    let dirs = grid.directions(p);
    let half = c.with_inner_scale(p, 0.5);
    let full_scan = boundary_scan(p, mods, c, c, &dirs);
    let half_scan = boundary_scan(p, mods, c, &half, &dirs);
    let fold = |scan: &Vec<([Worst; 5], [Worst; 5], Option<(usize, String)>)>| {
        let mut rad = [Worst::NONE; 5];
        let mut res = [Worst::NONE; 5];
        let mut notes: [Option<String>; 5] = Default::default();
        for (a, b, n) in scan {
            for j in 0..5 {
                rad[j] = rad[j].merge(a[j]);
                res[j] = res[j].merge(b[j]);
            }
            if let Some((j, s)) = n {
                if *j < 5 {
                    notes[*j].get_or_insert_with(|| s.clone());
                }
            }
        }
        (rad, res, notes)
    };
    let (rad, res, notes) = fold(&full_scan);
    let (rad_h, res_h, _) = fold(&half_scan);
    let regimes = (0..5)
        .map(|j| {
            let c_full = if res[j].count == 0 { 0.0 } else { -res[j].v };
            let c_half = if res_h[j].count == 0 { 0.0 } else { -res_h[j].v };
            let radicand = rad[j].v.min(rad_h[j].v);
            let stable = c_half <= 2.0 * c_full + 1e-9;
            let mut margins = BTreeMap::new();
            margins.insert("residual_C".to_string(), c_full);
            margins.insert("residual_C_half".to_string(), c_half);
            margins.insert("min_radicand".to_string(), radicand);
            let (wr, wx) = if rad[j].count == 0 {
                (c.r_in, [f64::NAN; 3])
            } else {
                (rad[j].r, dirs[rad[j].xi].as_array())
            };
            let c_min = if rad[j].count == 0 { f64::INFINITY } else { radicand };
            CertReport {
                regime: format!("boundary:{}", Regime::from_index(j).name()),
                pass: c_min >= -1e-12 && stable && c_full.is_finite(),
                c_min,
                worst_r: wr,
                worst_xi: wx,
                grid: *grid,
                constants: *c,
                margins,
                points: rad[j].count,
                note: notes[j].clone(),
            }
        })
        .collect();
    BoundaryCertification { regimes }
}
