//! Separated-mode wave laboratory.
//!
//! A single azimuthal mode with frozen angular eigenvalue Λ₀ obeys
//! ∂_t²u − ∂_{r*}²u + V_c u − iW ∂_t u = 0, so that u = e^{−iωt}v(r*)
//! reduces to v″ + (ω² − V)v = 0 with the trapping potential V at
//! Ξ = (ω, m_az, Λ₀). [`evolve`] integrates the time-dependent problem,
//! [`scatter`] the stationary one.

pub mod evolve;
pub mod morawetz;
pub mod scatter;
pub mod spectral;
pub mod tortoise;

use serde::{Deserialize, Serialize};

use crate::error::{KerrError, Result};
use crate::kerr_geometry::BlackHoleParams;
use crate::phase_space::FrequencyTriplet;

pub use evolve::{evolve, BoundaryKind, Diagnostics, Direction, Drive, EvolveOutput, EvolveOptions, InitialData, Packet, RadialGrid, WaveState};
pub use morawetz::{morawetz_experiment, MorawetzRow, PacketSpec};
pub use scatter::{scattering_oracle, ScatterOptions, ScatterResult};
pub use spectral::{transmission_check, SpectralPoint};
pub use tortoise::{inverse_tortoise, tortoise};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub m_az: i32,
    #[serde(rename = "Lambda0")]
    pub lambda0: f64,
}

impl ModeSpec {
    pub fn new(m_az: i32, lambda0: f64) -> Result<Self> {
        let s = Self { m_az, lambda0 };
        s.check()?;
        Ok(s)
    }

    /// Λ₀² ≥ m_az², the ξ_τ-free part of the admissibility bound.
    pub fn check(&self) -> Result<()> {
        if !(self.lambda0.is_finite() && self.lambda0 >= (self.m_az as f64).abs()) {
            return Err(KerrError::InvalidParameter(format!(
                "Lambda0 = {} below |m_az| = {}",
                self.lambda0,
                self.m_az.abs()
            )));
        }
        Ok(())
    }

    /// Whether ω also satisfies the full bound Λ₀² ≥ 2|a m_az ω|.
    pub fn admits(&self, p: &BlackHoleParams, omega: f64) -> bool {
        self.triplet(omega).is_admissible(p)
    }

    pub fn triplet(&self, omega: f64) -> FrequencyTriplet {
        FrequencyTriplet::new(omega, self.m_az as f64, self.lambda0)
    }

    /// V_c = (ΔΛ₀² − a²m_az²)/(r² + a²)².
    pub fn v_c(&self, p: &BlackHoleParams, r: f64) -> f64 {
        let w = p.r2a2(r);
        let m = self.m_az as f64;
        (p.delta(r) * self.lambda0 * self.lambda0 - p.a * p.a * m * m) / (w * w)
    }

    /// W = 4amr·m_az/(r² + a²)².
    pub fn w(&self, p: &BlackHoleParams, r: f64) -> f64 {
        let w = p.r2a2(r);
        4.0 * p.a * p.m * r * self.m_az as f64 / (w * w)
    }

    /// V(r; ω) = V_c − ωW.
    pub fn potential(&self, p: &BlackHoleParams, r: f64, omega: f64) -> f64 {
        self.v_c(p, r) - omega * self.w(p, r)
    }

    /// Horizon wavenumber k = ω + m_az ω_H.
    pub fn k_horizon(&self, p: &BlackHoleParams, omega: f64) -> f64 {
        p.k_plus(omega, self.m_az as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kerr_geometry::new_params;
    use crate::phase_space::potential_v;

    #[test]
    fn split_potential_matches_symbol() {
        let p = new_params(0.7, 1.0).unwrap();
        let mode = ModeSpec::new(2, 3.1).unwrap();
        for (r, om) in [(1.8, 0.4), (3.0, -0.2), (12.0, 1.3)] {
            let v = potential_v(&p, r, &mode.triplet(om));
            assert!((mode.potential(&p, r, om) - v).abs() < 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn rejects_small_lambda() {
        assert!(ModeSpec::new(2, 1.5).is_err());
        assert!(ModeSpec::new(-1, 1.0).is_ok());
    }

    #[test]
    fn horizon_limit_is_shifted_frequency() {
        // ω² − V → k² at r₊
        let p = new_params(0.9, 1.0).unwrap();
        let mode = ModeSpec::new(1, 2.0).unwrap();
        let om = 0.3;
        let k = mode.k_horizon(&p, om);
        let g = om * om - mode.potential(&p, p.r_plus, om);
        assert!((g - k * k).abs() < 1e-12);
    }
}
