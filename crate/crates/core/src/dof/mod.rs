//! Degree-of-freedom counts: closed-form asymptotics, threshold counts and
//! spectrum summaries.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::spectrum::Spectrum;

/// Default thresholds for [`DofReport`], applied on the normalized scale.
pub const DEFAULT_EPSILONS: [f64; 4] = [0.3, 0.1, 0.03, 0.01];

/// Which eigenvalue scale a count is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Raw,
    #[default]
    Normalized,
}

/// Asymptotic DoF of a band/region pair: `2 Omega T / pi` in time,
/// `K^2 A / (4 pi)` in the plane, `V k0^3 / (6 pi^2)` for a ball and
/// `V (k0^3 - k1^3) / (6 pi^2)` for a shell. `region_measure` is `2T`, `A`
/// or `V` respectively.
pub fn asymptotic_dof(spec: &KernelSpec, region_measure: f64) -> Result<f64> {
    if !(region_measure > 0.0 && region_measure.is_finite()) {
        return Err(Error::InvalidRegion(format!(
            "region measure must be positive, got {region_measure}"
        )));
    }
    match *spec {
        KernelSpec::Time1d { omega } => Ok(omega * region_measure / PI),
        KernelSpec::Disk2d { k } => Ok(k * k * region_measure / (4.0 * PI)),
        KernelSpec::Ball3d { k0 } => Ok(region_measure * k0.powi(3) / (6.0 * PI * PI)),
        KernelSpec::Shell3d { k0, k1 } => {
            Ok(region_measure * (k0.powi(3) - k1.powi(3)) / (6.0 * PI * PI))
        }
        _ => Err(Error::Unsupported(format!(
            "no asymptotic DoF formula for the {} kernel",
            spec.name()
        ))),
    }
}

/// `#{i : lambda_i >= eps^2}` on the requested scale.
pub fn fdof(spectrum: &Spectrum, eps: f64, scale: Scale) -> usize {
    let threshold = eps * eps;
    match scale {
        Scale::Raw => spectrum
            .eigenvalues()
            .iter()
            .filter(|&&v| v >= threshold)
            .count(),
        Scale::Normalized => spectrum
            .normalized()
            .iter()
            .filter(|&&v| v >= threshold)
            .count(),
    }
}

/// Count of eigenvalues at or above half the leading one, and its offset
/// from the asymptotic value.
pub fn shannon_check(spectrum: &Spectrum, asymptotic: f64) -> (usize, f64) {
    let count = shannon_count(spectrum);
    (count, count as f64 - asymptotic)
}

fn shannon_count(spectrum: &Spectrum) -> usize {
    let half = 0.5 * spectrum.lambda_max();
    spectrum
        .eigenvalues()
        .iter()
        .filter(|&&v| v >= half)
        .count()
}

/// Summary of one spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DofReport {
    /// Absent for kernels without a closed-form asymptotic count.
    pub asymptotic: Option<f64>,
    pub shannon_count: usize,
    pub scale: Scale,
    /// Keys are the thresholds formatted as decimal strings.
    pub fdof_at: BTreeMap<String, usize>,
    pub trace: f64,
    pub lambda_max: f64,
    pub modes: usize,
}

impl DofReport {
    pub fn new(
        spectrum: &Spectrum,
        spec: &KernelSpec,
        region_measure: f64,
        epsilons: &[f64],
        scale: Scale,
    ) -> Result<Self> {
        for &e in epsilons {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::config(format!(
                    "threshold eps must lie in (0, 1), got {e}"
                )));
            }
        }
        let asymptotic = match asymptotic_dof(spec, region_measure) {
            Ok(v) => Some(v),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
        let fdof_at = epsilons
            .iter()
            .map(|&e| (e.to_string(), fdof(spectrum, e, scale)))
            .collect();
        Ok(DofReport {
            asymptotic,
            shannon_count: shannon_count(spectrum),
            scale,
            fdof_at,
            trace: spectrum.trace(),
            lambda_max: spectrum.lambda_max(),
            modes: spectrum.len(),
        })
    }
}
