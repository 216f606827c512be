//! Numerical laboratory for energy-Morawetz constructions on subextremal Kerr.
//!
//! The crate is organised bottom-up: [`kerr_geometry`] provides the metric in
//! three charts, [`phase_space`] the trapping potential and the frequency
//! regimes, [`symbol_calculus`] the reduced symbol algebra, and
//! [`multiplier_builder`] assembles and certifies the regime-wise multipliers.
//! [`radial_wave_lab`] is an independent separated-mode solver used to look at
//! the same phenomena in the time and frequency domains.
//!
//! Units are geometric with `m` carried explicitly; everything downstream of
//! [`kerr_geometry::BlackHoleParams`] is written for general `m` but only
//! exercised at `m = 1`.

pub mod error;
pub mod kerr_geometry;
pub mod multiplier_builder;
pub mod par;
pub mod phase_space;
pub mod radial_wave_lab;
pub mod suites;
pub mod symbol_calculus;

pub use error::{KerrError, Result};
pub use kerr_geometry::BlackHoleParams;
pub use phase_space::FrequencyTriplet;
