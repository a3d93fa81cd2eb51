//! Eigenvalue spectra, degrees of freedom and orthogonal patterns of
//! electromagnetic concentration operators.
//!
//! The pipeline is grid → kernel assembly → symmetric eigendecomposition →
//! DoF counts and patterns. The [`channel`] module adds a two-region
//! transfer operator with truncation checks, and [`scenarios`] drives
//! complete experiments from JSON configs.

pub mod channel;
pub mod dof;
pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod scenarios;
pub mod spectrum;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavenumber `2 pi f / c` for a frequency in Hz.
pub fn wavenumber(frequency_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * frequency_hz / SPEED_OF_LIGHT
}
