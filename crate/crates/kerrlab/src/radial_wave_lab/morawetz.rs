//! Energy and Morawetz ratios over a set of packets.

use serde::{Deserialize, Serialize};

use super::evolve::{evolve, Direction, EvolveOptions, InitialData, Packet};
use super::tortoise::tortoise;
use super::ModeSpec;
use crate::error::Result;
use crate::kerr_geometry::BlackHoleParams;
use crate::phase_space::critical_points;

/// A Gaussian packet placed at Boyer–Lindquist radius `r_center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub r_center: f64,
    pub width: f64,
    /// Carrier; `None` means the trapped frequency √V(r_max).
    #[serde(default)]
    pub omega0: Option<f64>,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorawetzRow {
    pub omega0: f64,
    pub r_center: f64,
    pub r_trap: f64,
    /// ξ_τ(ξ_τ + ω_H ξ_φ̃) at the carrier.
    pub superradiance_sign: f64,
    pub e0: f64,
    pub sup_energy_ratio: f64,
    pub sup_surrogate_ratio: f64,
    pub morawetz_ratio: f64,
    pub morawetz_undegenerate_ratio: f64,
}

impl MorawetzRow {
    /// Undegenerate over degenerate accumulator.
    pub fn trapping_gain(&self) -> f64 {
        self.morawetz_undegenerate_ratio / self.morawetz_ratio
    }
}

/// √V(r_max) for the mode at ω, found as the fixed point ω² = V(r_max(ω); ω).
pub fn trapped_frequency(p: &BlackHoleParams, mode: &ModeSpec) -> Option<f64> {
    let mut om = mode.lambda0 / (27f64.sqrt() * p.m);
    for _ in 0..100 {
        let c = critical_points(p, &mode.triplet(om)).ok()?;
        let v = mode.potential(p, c.r_max?, om);
        if !(v > 0.0) {
            return None;
        }
        let next = v.sqrt();
        if (next - om).abs() < 1e-13 {
            return Some(next);
        }
        om = next;
    }
    Some(om)
}

/// Evolve every packet and summarize sup E/E(0) and M(T)/E(0). Independent
/// runs go through the parallel map.
pub fn morawetz_experiment(
    p: &BlackHoleParams,
    mode: &ModeSpec,
    packets: &[PacketSpec],
    opts: &EvolveOptions,
) -> Result<Vec<MorawetzRow>> {
    crate::par::map(packets.len(), |i| run_one(p, mode, &packets[i], opts))
        .into_iter()
        .collect()
}

fn run_one(p: &BlackHoleParams, mode: &ModeSpec, spec: &PacketSpec, opts: &EvolveOptions) -> Result<MorawetzRow> {
    let omega0 = match spec.omega0 {
        Some(w) => w,
        None => trapped_frequency(p, mode).ok_or_else(|| {
            crate::error::KerrError::InvalidParameter("mode has no trapped frequency".into())
        })?,
    };
    let init = InitialData::Packet(Packet {
        center: tortoise(p, spec.r_center)?,
        width: spec.width,
        omega0,
        direction: spec.direction,
        amplitude: 1.0,
    });
    let opts = EvolveOptions {
        trap_omega: Some(omega0),
        ..opts.clone()
    };
    let out = evolve(p, mode, &init, &opts)?;
    let first = out.series[0];
    let last = *out.series.last().unwrap_or(&first);
    let e0 = first.energy;
    let s0 = first.energy_surrogate;
    let sup_e = out.series.iter().map(|d| d.energy).fold(f64::NEG_INFINITY, f64::max);
    let sup_s = out.series.iter().map(|d| d.energy_surrogate).fold(f64::NEG_INFINITY, f64::max);
    Ok(MorawetzRow {
        omega0,
        r_center: spec.r_center,
        r_trap: out.r_trap,
        superradiance_sign: omega0 * mode.k_horizon(p, omega0),
        e0,
        sup_energy_ratio: sup_e / e0,
        sup_surrogate_ratio: sup_s / s0,
        morawetz_ratio: last.morawetz / e0,
        morawetz_undegenerate_ratio: last.morawetz_undegenerate / e0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kerr_geometry::new_params;

    #[test]
    fn trapped_frequency_schwarzschild() {
        let p = new_params(0.0, 1.0).unwrap();
        let mode = ModeSpec::new(0, 3.0).unwrap();
        // V(3) = Λ²/27 at a = 0
        let w = trapped_frequency(&p, &mode).unwrap();
        assert!((w - 3.0 / 27f64.sqrt()).abs() < 1e-10);
    }
}
