//! Deterministic lattice search for the multiplier constants.

use serde::Serialize;

use super::certify::{certify_boundary, certify_bulk, BoundaryCertification, BulkCertification, BulkOptions};
use super::{CertGrid, Constants, Regime};
use crate::error::{KerrError, Result};
use crate::kerr_geometry::{BlackHoleParams, ModFunctions};
use crate::phase_space::{select_delta_f, DeltaFReport};

/// Lattice depths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchLimits {
    /// A ∈ {4, 8, …, 2^a_max}.
    pub a_max: u32,
    /// B = A·2ᵏ, k ≤ b_steps.
    pub b_steps: u32,
    /// c′ = 2⁻ᵏ, 1 ≤ k ≤ c_steps.
    pub c_steps: u32,
    /// δ₀ = (m − a)2⁻ᵏ, k ≤ d_steps.
    pub d_steps: u32,
    /// Strides of the search grid relative to the final one.
    pub search_r_stride: usize,
    pub search_xi_stride: usize,
    /// Use this δ_F instead of selecting one from the grid directions.
    pub delta_f: Option<f64>,
    /// Outer radius R in place of the regime default.
    pub r_out: Option<f64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            a_max: 14,
            b_steps: 16,
            c_steps: 16,
            d_steps: 8,
            search_r_stride: 1,
            search_xi_stride: 4,
            delta_f: None,
            r_out: None,
        }
    }
}

/// Accepted constants with the certifications that accepted them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub constants: Constants,
    pub delta_f: DeltaFReport,
    pub bulk: BulkCertification,
    /// Bulk on the coarse (even-index) subgrid, for the monotonicity check.
    pub bulk_coarse: BulkCertification,
    pub boundary: BoundaryCertification,
    /// Number of lattice points tried.
    pub tried: usize,
}

impl SearchOutcome {
    /// c_min on the full grid never exceeds c_min on its subgrid.
    pub fn monotone(&self) -> bool {
        match (&self.bulk.total, &self.bulk_coarse.total) {
            (Some(f), Some(c)) => f.c_min <= c.c_min,
            _ => false,
        }
    }
}

fn fail(msg: String) -> KerrError {
    KerrError::ConstantSearchFailed(msg)
}

/// For c′ descending: G_T, G_TR1, G_TR2 on a strided grid; the smallest A
/// meeting the boundary conditions (found once); δ₀ descending and B = A·2ᵏ
/// ascending on G_SR ∪ G_A on the strided grid, with B raised further on the
/// full grid if needed; then everything on the full grid. Any failing stage
/// moves on to the next c′.
pub fn search_constants(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    grid: &CertGrid,
    limits: &SearchLimits,
) -> Result<SearchOutcome> {
    let dirs = grid.directions(p);
    let df = match limits.delta_f {
        Some(d) if d > 0.0 && d <= 0.25 => DeltaFReport {
            delta_f: d,
            k: 0,
            b_nontrapping: f64::NAN,
            sr_a_gap: f64::NAN,
            samples: 0,
        },
        Some(d) => return Err(KerrError::InvalidParameter(format!("delta_f = {d} outside (0, 1/4]"))),
        None => select_delta_f(p, &dirs)?,
    };
    let mut base = Constants::hint(p, df.delta_f);
    if let Some(r) = limits.r_out {
        if !(r > base.r_in) {
            return Err(KerrError::InvalidParameter(format!("R = {r} not beyond r_in = {}", base.r_in)));
        }
        base.r_out = r;
    }
    let sgrid = grid.strided(limits.search_r_stride, limits.search_xi_stride);
    let mut tried = 0usize;
    let mut last = String::from("empty lattice");

    let no_sr = BulkOptions::only(&[Regime::T, Regime::TR1, Regime::TR2]);
    let sr_a = BulkOptions::only(&[Regime::SR, Regime::A]);
    // the smallest boundary-certified A, found once
    let mut a_z: Option<f64> = None;
    'c: for k_c in 1..=limits.c_steps {
        let mut c = base;
        c.c_prime = 0.5f64.powi(k_c as i32);
        tried += 1;
        let b = certify_bulk(p, mods, &c, &sgrid, &no_sr);
        if !b.pass() {
            last = describe("c'", &c, b.worst_failure().map(|r| (r.regime.clone(), r.c_min)));
            continue;
        }
        if a_z.is_none() {
            for k in 2..=limits.a_max {
                c.a_z = 2f64.powi(k as i32);
                tried += 1;
                let bd = certify_boundary(p, mods, &c, grid);
                if bd.pass() {
                    a_z = Some(c.a_z);
                    break;
                }
                last = describe(
                    "A",
                    &c,
                    bd.regimes.iter().find(|r| !r.pass).map(|r| (r.regime.clone(), r.c_min)),
                );
            }
            if a_z.is_none() {
                break;
            }
        }
        c.a_z = a_z.unwrap_or(c.a_z);
        let mut found = false;
        'db: for kd in 0..=limits.d_steps {
            c.delta0 = (p.m - p.a) * 0.5f64.powi(kd as i32);
            for kb in 0..=limits.b_steps {
                c.b = c.a_z * 2f64.powi(kb as i32);
                tried += 1;
                let b = certify_bulk(p, mods, &c, &sgrid, &sr_a);
                if b.pass() {
                    found = true;
                    break 'db;
                }
                last = describe("B", &c, b.worst_failure().map(|r| (r.regime.clone(), r.c_min)));
            }
        }
        if !found {
            continue 'c;
        }
        // the strided grid can miss the narrow χ_z′ window: raise B on the full grid
        loop {
            tried += 1;
            let b = certify_bulk(p, mods, &c, grid, &sr_a);
            if b.pass() {
                break;
            }
            last = describe("B (full grid)", &c, b.worst_failure().map(|r| (r.regime.clone(), r.c_min)));
            if c.b >= c.a_z * 2f64.powi(limits.b_steps as i32) {
                continue 'c;
            }
            c.b *= 2.0;
        }
        tried += 1;
        let bulk = certify_bulk(p, mods, &c, grid, &BulkOptions::default());
        let boundary = certify_boundary(p, mods, &c, grid);
        if bulk.pass() && boundary.pass() {
            let bulk_coarse = certify_bulk(p, mods, &c, &grid.coarse(), &BulkOptions::default());
            return Ok(SearchOutcome {
                constants: c,
                delta_f: df,
                bulk,
                bulk_coarse,
                boundary,
                tried,
            });
        }
        last = describe(
            "full grid",
            &c,
            bulk.worst_failure()
                .or_else(|| boundary.regimes.iter().find(|r| !r.pass))
                .map(|r| (r.regime.clone(), r.c_min)),
        );
    }
    Err(fail(last))
}

fn describe(stage: &str, c: &Constants, w: Option<(String, f64)>) -> String {
    match w {
        Some((reg, m)) => format!(
            "{stage} stage: {reg} margin {m:e} at A={}, B={}, c'={}, delta0={}",
            c.a_z, c.b, c.c_prime, c.delta0
        ),
        None => format!("{stage} stage failed"),
    }
}
