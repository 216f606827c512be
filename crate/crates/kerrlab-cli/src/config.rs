//! Run configuration: one JSON document, `"schema": 1`, unknown keys rejected.
//! Physical quantities are in units of m; `mass` is recorded but every
//! length and frequency in the document is already scaled by it.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use kerrlab::radial_wave_lab::{EvolveOptions, ModeSpec, ScatterOptions};

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    /// a/m.
    #[serde(default)]
    pub spin: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub constants: ConstantOverrides,
    #[serde(default)]
    pub geometry: GeometrySizes,
    #[serde(default)]
    pub symbols: SymbolSizes,
    #[serde(default)]
    pub cover: CoverSizes,
    #[serde(default)]
    pub potential: Option<PotentialScan>,
    #[serde(default)]
    pub mode: Option<ModeSpec>,
    /// `Packet` objects for wave-evolve (superposed), `PacketSpec` objects
    /// for wave-morawetz.
    #[serde(default)]
    pub packets: Vec<serde_json::Value>,
    #[serde(default)]
    pub evolve: Option<EvolveOptions>,
    #[serde(default)]
    pub scan: Option<OmegaScan>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantOverrides {
    pub delta_h: Option<f64>,
    pub delta_bl: Option<f64>,
    pub delta_f: Option<f64>,
    /// Outer certification radius R.
    pub r_out: Option<f64>,
    /// Certification grid: radii and the two direction axes.
    pub n_r: Option<usize>,
    pub n_alpha: Option<usize>,
    pub n_beta: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySizes {
    pub points: usize,
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for GeometrySizes {
    fn default() -> Self {
        Self {
            points: 10_000,
            n_r: 2000,
            n_theta: 128,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymbolSizes {
    pub points: usize,
}

impl Default for SymbolSizes {
    fn default() -> Self {
        Self { points: 10_000 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoverSizes {
    pub samples: usize,
}

impl Default for CoverSizes {
    fn default() -> Self {
        Self { samples: 100_000 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialScan {
    /// (ξ_τ, ξ_φ, Λ) triplets.
    pub xi: Vec<[f64; 3]>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
}

fn default_points() -> usize {
    2000
}

fn default_r_max() -> f64 {
    50.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaScan {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n: usize,
    /// Frequencies with |ω| below this are dropped.
    #[serde(default)]
    pub skip: f64,
    #[serde(default)]
    pub options: Option<ScatterOptions>,
}

impl RunConfig {
    pub fn empty() -> Self {
        serde_json::from_str(r#"{"schema": 1}"#).expect("minimal config parses")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::Config(format!("unsupported schema {} (expected {SCHEMA})", cfg.schema)));
        }
        Ok(cfg)
    }

    /// Range and size checks that do not need the black hole.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !self.spin.is_finite() {
            return bad(format!("spin {} is not finite", self.spin));
        }
        let c = &self.constants;
        for (name, v) in [("delta_h", c.delta_h), ("delta_bl", c.delta_bl), ("delta_f", c.delta_f), ("r_out", c.r_out)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return bad(format!("constants.{name} = {v} must be positive"));
                }
            }
        }
        for (name, v) in [("n_r", c.n_r), ("n_alpha", c.n_alpha), ("n_beta", c.n_beta)] {
            if v.is_some_and(|n| n < 3) {
                return bad(format!("constants.{name} must be at least 3"));
            }
        }
        if self.geometry.points == 0 || self.geometry.n_r < 2 || self.geometry.n_theta < 2 {
            return bad("geometry sizes too small".into());
        }
        if self.symbols.points == 0 || self.cover.samples == 0 {
            return bad("sample counts must be positive".into());
        }
        if let Some(s) = &self.potential {
            if s.points < 2 || !(s.r_max.is_finite()) {
                return bad("potential.points must be at least 2 and r_max finite".into());
            }
        }
        if let Some(s) = &self.scan {
            if s.n == 0 || !(s.omega_min.is_finite() && s.omega_max.is_finite()) {
                return bad("scan needs n > 0 and a finite range".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<RunConfig, _> = serde_json::from_str(r#"{"schema": 1, "spinn": 0.5}"#);
        assert!(r.is_err());
        let r: Result<RunConfig, _> = serde_json::from_str(r#"{"schema": 1, "constants": {"R": 20}}"#);
        assert!(r.is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::empty();
        assert_eq!(c.mass, 1.0);
        assert_eq!(c.spin, 0.0);
        assert_eq!(c.geometry.n_theta, 128);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn payload_sections_parse() {
        let c: RunConfig = serde_json::from_str(
            r#"{"schema": 1, "spin": 0.9,
                "mode": {"m_az": 1, "Lambda0": 1.5},
                "scan": {"omega_min": -1, "omega_max": 1, "n": 11, "skip": 0.01},
                "potential": {"xi": [[0, 0, 1]]}}"#,
        )
        .unwrap();
        assert_eq!(c.mode.unwrap().m_az, 1);
        assert_eq!(c.potential.unwrap().points, 2000);
    }
}
