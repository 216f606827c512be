//! Transmission read off a time-domain run, for comparison with the oracle.

use num_complex::Complex64;
use serde::Serialize;

use super::evolve::{evolve, Direction, EvolveOptions, InitialData, Packet};
use super::scatter::{scattering_oracle, ScatterOptions};
use super::ModeSpec;
use crate::error::{KerrError, Result};
use crate::kerr_geometry::BlackHoleParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub omega: f64,
    /// |Û_L(ω)|/|Â(ω)| from the time-domain run.
    pub t_time_domain: f64,
    /// |T(ω)| from the oracle.
    pub t_oracle: f64,
}

impl SpectralPoint {
    pub fn rel_error(&self) -> f64 {
        (self.t_time_domain / self.t_oracle - 1.0).abs()
    }
}

/// (1/2π) Σ f_j e^{iωs_j} Δs, the transform convention with f = ∫ f̂ e^{−iωs} dω.
fn transform(s: &[f64], f: &[Complex64], omega: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..s.len() {
        let ds = if j + 1 < s.len() { s[j + 1] - s[j] } else { s[j] - s[j - 1] };
        acc += f[j] * Complex64::from_polar(ds, omega * s[j]);
    }
    acc / (2.0 * std::f64::consts::PI)
}

/// Send an ingoing Gaussian packet of the given width in from `center` and
/// compare the spectrum of the field at the left end with |T(ω)| over the
/// central half of the band where |Â| exceeds half its peak.
///
/// In the free zone the packet is F(t + r*); each component e^{−iω(t + r*)}
/// reaches the left end as T(ω) e^{−iωt − ik r*}, so |Û_L| = |T||Â|.
pub fn transmission_check(
    p: &BlackHoleParams,
    mode: &ModeSpec,
    packet: &Packet,
    opts: &EvolveOptions,
    n_freq: usize,
) -> Result<Vec<SpectralPoint>> {
    if packet.direction != Direction::Ingoing {
        return Err(KerrError::InvalidParameter("transmission check needs an ingoing packet".into()));
    }
    let out = evolve(p, mode, &InitialData::Packet(*packet), opts)?;
    let xs: Vec<f64> = (0..opts.grid.len()).map(|i| opts.grid.x(i)).collect();
    let u0: Vec<Complex64> = xs.iter().map(|&x| packet.sample(x).0).collect();

    // Gaussian band: |Â| ≥ ½ max within ω₀ ± √(2 ln 2)/σ; keep the central half
    let half = (2.0 * std::f64::consts::LN_2).sqrt() / packet.width;
    let (lo, hi) = (packet.omega0 - 0.5 * half, packet.omega0 + 0.5 * half);
    let sc = ScatterOptions {
        r_star_min: opts.grid.r_star_min,
        r_star_max: opts.grid.r_star_max,
        ..Default::default()
    };
    let omegas: Vec<f64> = (0..n_freq)
        .map(|i| lo + (hi - lo) * i as f64 / (n_freq.max(2) - 1) as f64)
        .filter(|&w| w != 0.0)
        .collect();
    omegas
        .iter()
        .map(|&w| {
            let a = transform(&xs, &u0, w).norm();
            let ul = transform(&out.times, &out.left_signal, w).norm();
            let t = scattering_oracle(p, mode, w, &sc)?.transmission.norm();
            Ok(SpectralPoint {
                omega: w,
                t_time_domain: ul / a,
                t_oracle: t,
            })
        })
        .collect()
}
