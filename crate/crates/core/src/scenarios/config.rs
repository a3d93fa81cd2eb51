use serde::{Deserialize, Serialize};

use crate::dof::{Scale, DEFAULT_EPSILONS};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::{AxisRule, SphereCap};
use crate::{wavenumber, SPEED_OF_LIGHT};

/// One experiment: a kernel, a region, a grid and the outputs to produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub kernel: KernelConfig,
    pub region: RegionConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_cap: Option<usize>,
}

/// Kernel parameters in physical units. Frequencies are in Hz and converted
/// to wavenumbers with `k = 2 pi f / c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    /// `omega` is the angular band edge in rad/s.
    Time1d {
        omega: f64,
    },
    Disk2d {
        frequency_hz: f64,
    },
    Ball3d {
        frequency_hz: f64,
    },
    /// Band `[f - bandwidth, f]`, or `[min_frequency, f]`; give exactly one.
    Shell3d {
        frequency_hz: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bandwidth_hz: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min_frequency_hz: Option<f64>,
    },
    Sphere3d {
        frequency_hz: f64,
    },
    /// `c` defaults to the vacuum speed of light.
    Spacetime {
        frequency_hz: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
    },
    /// `r0` in metres. `frequency_hz` scales unit-vector grids.
    DualBall {
        r0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frequency_hz: Option<f64>,
    },
    DualCuboid {
        half_extents: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frequency_hz: Option<f64>,
    },
}

impl KernelConfig {
    /// Highest frequency of the band, if the kernel has one.
    pub fn max_frequency_hz(&self) -> Option<f64> {
        match *self {
            KernelConfig::Time1d { .. } => None,
            KernelConfig::Disk2d { frequency_hz }
            | KernelConfig::Ball3d { frequency_hz }
            | KernelConfig::Shell3d { frequency_hz, .. }
            | KernelConfig::Sphere3d { frequency_hz }
            | KernelConfig::Spacetime { frequency_hz, .. } => Some(frequency_hz),
            KernelConfig::DualBall { frequency_hz, .. }
            | KernelConfig::DualCuboid { frequency_hz, .. } => frequency_hz,
        }
    }

    /// Converts to a kernel in rad/m and validates its parameters.
    pub fn resolve(&self) -> Result<KernelSpec> {
        let spec = match *self {
            KernelConfig::Time1d { omega } => KernelSpec::Time1d { omega },
            KernelConfig::Disk2d { frequency_hz } => KernelSpec::Disk2d {
                k: wavenumber(frequency_hz),
            },
            KernelConfig::Ball3d { frequency_hz } => KernelSpec::Ball3d {
                k0: wavenumber(frequency_hz),
            },
            KernelConfig::Shell3d {
                frequency_hz,
                bandwidth_hz,
                min_frequency_hz,
            } => {
                let f_lo =
                    match (bandwidth_hz, min_frequency_hz) {
                        (Some(bw), None) => frequency_hz - bw,
                        (None, Some(lo)) => lo,
                        _ => return Err(Error::config(
                            "kernel: shell3d needs exactly one of bandwidth_hz or min_frequency_hz",
                        )),
                    };
                KernelSpec::Shell3d {
                    k0: wavenumber(frequency_hz),
                    k1: wavenumber(f_lo),
                }
            }
            KernelConfig::Sphere3d { frequency_hz } => KernelSpec::Sphere3d {
                k0: wavenumber(frequency_hz),
            },
            KernelConfig::Spacetime { frequency_hz, c } => KernelSpec::Spacetime {
                k0: wavenumber(frequency_hz),
                c: c.unwrap_or(SPEED_OF_LIGHT),
            },
            KernelConfig::DualBall { r0, frequency_hz } => KernelSpec::DualBall {
                r0,
                k0: frequency_hz.map(wavenumber),
            },
            KernelConfig::DualCuboid {
                half_extents,
                frequency_hz,
            } => KernelSpec::DualCuboid {
                half_extents,
                k0: frequency_hz.map(wavenumber),
            },
        };
        spec.validate()
            .map_err(|e| Error::config(format!("kernel: {}", strip_prefix(&e))))?;
        Ok(spec)
    }
}

/// Units of box extents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    #[default]
    Metres,
    /// Multiples of the wavelength at the kernel's maximum frequency.
    Wavelengths,
}

/// Where the operator lives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionConfig {
    /// Axis-aligned box with 1 to 3 axes.
    Box {
        extents: Vec<[f64; 2]>,
        #[serde(default)]
        units: LengthUnit,
    },
    /// Unit-sphere directions, optionally restricted to a cap.
    Sphere {
        #[serde(default = "full_cap")]
        cap: SphereCap,
    },
    /// Wavenumber vectors with `|k|` in a range and direction in a cap.
    /// Give the range either in rad/m or in Hz.
    WavenumberSector {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k_range: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frequency_range_hz: Option<[f64; 2]>,
        #[serde(default = "full_cap")]
        cap: SphereCap,
    },
    /// Segment `[0, length]` (metres) times `[-half_window, half_window]`
    /// (seconds).
    SpaceTime { length: f64, half_window: f64 },
}

fn full_cap() -> SphereCap {
    SphereCap::FULL
}

/// Spacing between nodes along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Metres(f64),
    Wavelengths(f64),
}

/// Grid resolution. Boxes take either `counts` or `spacing` per axis; other
/// regions take `counts` only: `[n_polar, n_azimuth]` for spheres,
/// `[n_radial, n_polar, n_azimuth]` for sectors and `[n_x, n_t]` for
/// space-time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub rule: AxisRule,
    /// Per-axis override of `rule` (boxes only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<Vec<AxisRule>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<Vec<Spacing>>,
}

/// Which artifacts to emit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub spectrum: bool,
    /// Number of leading patterns to write.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patterns: Option<usize>,
    /// Size of the pattern correlation table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<usize>,
    /// Thresholds for the DoF counts.
    pub dof: Vec<f64>,
    pub scale: Scale,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            spectrum: true,
            patterns: None,
            correlation: None,
            dof: DEFAULT_EPSILONS.to_vec(),
            scale: Scale::Normalized,
        }
    }
}

impl OutputConfig {
    /// Whether eigenvectors are needed.
    pub fn needs_patterns(&self) -> bool {
        self.patterns.is_some() || self.correlation.is_some()
    }
}

/// Wavelength `c / f`.
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// Midpoint-cell count for an axis: `round(extent / spacing)`, at least 1.
pub fn count_for_spacing(extent: f64, spacing: f64) -> usize {
    ((extent / spacing).round() as usize).max(1)
}

impl ScenarioConfig {
    /// Parses a single config object or an array of them.
    pub fn parse_many(text: &str) -> Result<Vec<ScenarioConfig>> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::config(format!("config is not valid JSON: {e}")))?;
        let configs = if value.is_array() {
            serde_json::from_value::<Vec<ScenarioConfig>>(value)
        } else {
            serde_json::from_value::<ScenarioConfig>(value).map(|c| vec![c])
        }
        .map_err(|e| Error::config(format!("config: {e}")))?;
        for c in &configs {
            c.validate()?;
        }
        Ok(configs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Wavelength at the maximum frequency, if the kernel has one.
    pub fn wavelength(&self) -> Option<f64> {
        self.kernel.max_frequency_hz().map(wavelength)
    }

    /// Checks cross-field constraints that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        let ctx = |msg: String| Error::config(format!("scenario `{}`: {msg}", self.name));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(ctx(
                "name must be non-empty and must not contain path separators".into(),
            ));
        }
        if let Some(f) = self.kernel.max_frequency_hz() {
            if !(f > 0.0 && f.is_finite()) {
                return Err(ctx(format!(
                    "kernel.frequency_hz must be positive, got {f}"
                )));
            }
        }
        self.kernel.resolve().map_err(|e| ctx(strip_prefix(&e)))?;
        let needs_wavelength = matches!(
            self.region,
            RegionConfig::Box {
                units: LengthUnit::Wavelengths,
                ..
            }
        ) || self
            .grid
            .spacing
            .as_ref()
            .is_some_and(|s| s.iter().any(|x| matches!(x, Spacing::Wavelengths(_))));
        if needs_wavelength && self.wavelength().is_none() {
            return Err(ctx(
                "lengths in wavelengths need a kernel with a maximum frequency".into(),
            ));
        }
        match (&self.grid.counts, &self.grid.spacing) {
            (Some(_), Some(_)) => {
                return Err(ctx("grid: give either counts or spacing, not both".into()))
            }
            (None, None) => return Err(ctx("grid: counts or spacing is required".into())),
            _ => {}
        }
        let axes = match &self.region {
            RegionConfig::Box { extents, .. } => extents.len(),
            RegionConfig::Sphere { .. } => 2,
            RegionConfig::WavenumberSector { .. } => 3,
            RegionConfig::SpaceTime { .. } => 2,
        };
        if !matches!(self.region, RegionConfig::Box { .. }) {
            if self.grid.spacing.is_some() {
                return Err(ctx("grid.spacing is only supported on box regions".into()));
            }
            if self.grid.rules.is_some() {
                return Err(ctx("grid.rules is only supported on box regions".into()));
            }
        }
        if let RegionConfig::Sphere { .. } | RegionConfig::WavenumberSector { .. } = self.region {
            if self.grid.rule != AxisRule::Uniform {
                return Err(ctx(
                    "grid.rule is fixed for direction grids (Gauss-Legendre in cos theta, midpoint in phi); omit it".into(),
                ));
            }
        }
        if let RegionConfig::WavenumberSector {
            k_range,
            frequency_range_hz,
            ..
        } = &self.region
        {
            if k_range.is_some() == frequency_range_hz.is_some() {
                return Err(ctx(
                    "region: wavenumber_sector needs exactly one of k_range or frequency_range_hz"
                        .into(),
                ));
            }
        }
        let region_err =
            |msg: String| Error::InvalidRegion(format!("scenario `{}`: {msg}", self.name));
        match &self.region {
            RegionConfig::Box { extents, .. } => {
                if extents.is_empty() || extents.len() > 3 {
                    return Err(region_err(format!(
                        "region.extents needs 1 to 3 axes, got {}",
                        extents.len()
                    )));
                }
                for (i, [lo, hi]) in extents.iter().enumerate() {
                    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                        return Err(region_err(format!(
                            "region.extents[{i}] = [{lo}, {hi}] must be finite and increasing"
                        )));
                    }
                }
            }
            RegionConfig::SpaceTime {
                length,
                half_window,
            } if !(*length > 0.0
                && length.is_finite()
                && *half_window > 0.0
                && half_window.is_finite()) =>
            {
                return Err(region_err(format!(
                    "region.length ({length}) and region.half_window ({half_window}) must be positive"
                )));
            }
            _ => {}
        }
        let check_len = |field: &str, len: usize| {
            if len == axes {
                Ok(())
            } else {
                Err(ctx(format!(
                    "grid.{field} has {len} entries, region needs {axes}"
                )))
            }
        };
        if let Some(c) = &self.grid.counts {
            check_len("counts", c.len())?;
            if c.contains(&0) {
                return Err(ctx("grid.counts entries must be at least 1".into()));
            }
        }
        if let Some(s) = &self.grid.spacing {
            check_len("spacing", s.len())?;
            for x in s {
                let (Spacing::Metres(v) | Spacing::Wavelengths(v)) = *x;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(ctx(format!(
                        "grid.spacing entries must be positive, got {v}"
                    )));
                }
            }
        }
        if let Some(r) = &self.grid.rules {
            check_len("rules", r.len())?;
        }
        for &e in &self.outputs.dof {
            if !(e > 0.0 && e < 1.0) {
                return Err(ctx(format!(
                    "outputs.dof thresholds must lie in (0, 1), got {e}"
                )));
            }
        }
        for (field, v) in [
            ("patterns", self.outputs.patterns),
            ("correlation", self.outputs.correlation),
        ] {
            if v == Some(0) {
                return Err(ctx(format!("outputs.{field} must be at least 1")));
            }
        }
        if self.node_cap == Some(0) {
            return Err(ctx("node_cap must be at least 1".into()));
        }
        Ok(())
    }
}

/// Drops the "configuration error: " prefix of a nested error message.
fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}
