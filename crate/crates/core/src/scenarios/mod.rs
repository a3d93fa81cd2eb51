//! Config-driven experiments: build the grid, assemble, decompose, count
//! and write plot-ready tables.

mod builtin;
mod config;
mod output;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dof::DofReport;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::{
    box_grid, space_time_grid, sphere_grid, wavenumber_sector_grid, AxisRule, DomainTag, Grid,
    DEFAULT_NODE_CAP,
};
use crate::spectrum::{assemble_with_cap, correlation_matrix, eigendecompose, eigenvalues};
use crate::spectrum::{PatternSet, Spectrum, SquareMatrix};
use crate::wavenumber;

pub use builtin::{builtin, builtin_configs, builtin_names};
pub use config::{
    count_for_spacing, wavelength, GridConfig, KernelConfig, LengthUnit, OutputConfig,
    RegionConfig, ScenarioConfig, Spacing,
};
pub use output::{write_outputs, TableFormat};

/// How the concentration kernels are normalized; echoed in every summary.
pub const NORMALIZATION_NOTE: &str = "Kernels use the (2 pi)^-n Fourier convention, so the \
diagonal times the region measure is the asymptotic DoF. The space-time kernel counts both light-cone \
sheets, so its t = t' slice is twice the ball kernel. Normalized spectra are lambda / lambda_1 with \
values in [-1e-9, 0) reported as 0.";

/// Discretization convention; echoed in every summary.
pub const GRID_NOTE: &str =
    "Uniform axes use midpoint cells of equal width (count = round(extent / \
spacing) when a spacing is given). Gauss-Legendre axes use the affine image of the n-point rule. \
Rules are applied per axis independently.";

/// Grid actually used by a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedGrid {
    pub domain: DomainTag,
    pub counts: Vec<usize>,
    /// Empty for direction grids, whose rule is fixed.
    pub rules: Vec<AxisRule>,
    /// Box extents in metres after unit conversion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extents: Option<Vec<[f64; 2]>>,
    pub node_count: usize,
    /// Sum of the quadrature weights.
    pub measure: f64,
    /// Sum of the weights the patterns are orthonormal under (includes the
    /// radial Jacobian on sector grids).
    pub effective_measure: f64,
}

/// Everything a scenario run produces.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub kernel: KernelSpec,
    pub grid: Grid,
    pub resolved: ResolvedGrid,
    pub spectrum: Spectrum,
    pub dof: DofReport,
    pub patterns: Option<PatternSet>,
    pub correlation: Option<SquareMatrix>,
    pub runtime_seconds: f64,
}

impl ScenarioResult {
    pub fn name(&self) -> &str {
        &self.config.name
    }
}

/// Builds the grid described by a config.
pub fn build_grid(cfg: &ScenarioConfig, node_cap: usize) -> Result<(Grid, ResolvedGrid)> {
    let ctx = |e: Error| match e {
        Error::Config(m) => Error::Config(format!("scenario `{}`: grid: {m}", cfg.name)),
        Error::InvalidRegion(m) => {
            Error::InvalidRegion(format!("scenario `{}`: region: {m}", cfg.name))
        }
        other => other,
    };
    let lambda = cfg.wavelength();
    let mut extents_out = None;
    let (grid, counts, rules) = match &cfg.region {
        RegionConfig::Box { extents, units } => {
            let scale = match units {
                LengthUnit::Metres => 1.0,
                LengthUnit::Wavelengths => lambda.ok_or_else(|| {
                    Error::config(format!(
                        "scenario `{}`: extents in wavelengths need a frequency",
                        cfg.name
                    ))
                })?,
            };
            let ext: Vec<[f64; 2]> = extents
                .iter()
                .map(|e| [e[0] * scale, e[1] * scale])
                .collect();
            let counts: Vec<usize> = match (&cfg.grid.counts, &cfg.grid.spacing) {
                (Some(c), _) => c.clone(),
                (None, Some(s)) => ext
                    .iter()
                    .zip(s)
                    .map(|(e, sp)| {
                        let metres = match *sp {
                            Spacing::Metres(v) => v,
                            Spacing::Wavelengths(v) => v * lambda.unwrap_or(f64::NAN),
                        };
                        count_for_spacing(e[1] - e[0], metres)
                    })
                    .collect(),
                (None, None) => return Err(Error::config("grid: counts or spacing is required")),
            };
            let rules = cfg
                .grid
                .rules
                .clone()
                .unwrap_or_else(|| vec![cfg.grid.rule; ext.len()]);
            let grid = box_grid(&ext, &counts, &rules, node_cap).map_err(ctx)?;
            extents_out = Some(ext);
            (grid, counts, rules)
        }
        RegionConfig::Sphere { cap } => {
            let c = cfg.grid.counts.clone().unwrap_or_default();
            let grid = sphere_grid(c[0], c[1], *cap, node_cap).map_err(ctx)?;
            (grid, c, Vec::new())
        }
        RegionConfig::WavenumberSector {
            k_range,
            frequency_range_hz,
            cap,
        } => {
            let [k_lo, k_hi] = match (k_range, frequency_range_hz) {
                (Some(k), _) => *k,
                (None, Some(f)) => [wavenumber(f[0]), wavenumber(f[1])],
                (None, None) => return Err(Error::config("region: sector range is required")),
            };
            let c = cfg.grid.counts.clone().unwrap_or_default();
            let grid = wavenumber_sector_grid(k_lo, k_hi, c[0], c[1], c[2], *cap, node_cap)
                .map_err(ctx)?;
            (grid, c, Vec::new())
        }
        RegionConfig::SpaceTime {
            length,
            half_window,
        } => {
            let c = cfg.grid.counts.clone().unwrap_or_default();
            let grid = space_time_grid(*length, c[0], *half_window, c[1], cfg.grid.rule, node_cap)
                .map_err(ctx)?;
            (grid, c, vec![cfg.grid.rule; 2])
        }
    };
    let resolved = ResolvedGrid {
        domain: grid.domain(),
        counts,
        rules,
        extents: extents_out,
        node_count: grid.len(),
        measure: grid.measure(),
        effective_measure: 0.0,
    };
    Ok((grid, resolved))
}

/// Runs one scenario under an optional node-cap override.
pub fn run_scenario_with_cap(
    cfg: &ScenarioConfig,
    node_cap: Option<usize>,
) -> Result<ScenarioResult> {
    let start = Instant::now();
    cfg.validate()?;
    let cap = node_cap.or(cfg.node_cap).unwrap_or(DEFAULT_NODE_CAP);
    let kernel = cfg.kernel.resolve()?;
    let (grid, mut resolved) = build_grid(cfg, cap)?;
    let op = assemble_with_cap(&kernel, &grid, cap).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("scenario `{}`: {m}", cfg.name)),
        other => other,
    })?;
    resolved.effective_measure = op.measure();

    let (spectrum, mut patterns) = if cfg.outputs.needs_patterns() {
        let (s, p) = eigendecompose(&op)?;
        (s, Some(p))
    } else {
        (eigenvalues(&op)?, None)
    };
    let correlation = match (cfg.outputs.correlation, &patterns) {
        (Some(n), Some(p)) => Some(correlation_matrix(p, n.min(p.n_modes()))?),
        _ => None,
    };
    if let Some(p) = patterns.as_mut() {
        let keep = cfg
            .outputs
            .patterns
            .unwrap_or(0)
            .max(cfg.outputs.correlation.unwrap_or(0));
        p.truncate(keep);
    }
    let dof = DofReport::new(
        &spectrum,
        &kernel,
        resolved.measure,
        &cfg.outputs.dof,
        cfg.outputs.scale,
    )?;
    Ok(ScenarioResult {
        config: cfg.clone(),
        kernel,
        grid,
        resolved,
        spectrum,
        dof,
        patterns,
        correlation,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs one scenario with the config's own node cap.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    run_scenario_with_cap(cfg, None)
}

/// Runs independent scenarios, results in input order. With `fail_fast`
/// the sweep runs in order and stops after the first failure; otherwise
/// scenarios run concurrently and every failure is collected.
pub fn run_sweep(
    configs: &[ScenarioConfig],
    node_cap: Option<usize>,
    fail_fast: bool,
) -> Vec<Result<ScenarioResult>> {
    if fail_fast {
        let mut out = Vec::with_capacity(configs.len());
        for cfg in configs {
            let r = run_scenario_with_cap(cfg, node_cap);
            let failed = r.is_err();
            out.push(r);
            if failed {
                break;
            }
        }
        out
    } else {
        configs
            .par_iter()
            .map(|cfg| run_scenario_with_cap(cfg, node_cap))
            .collect()
    }
}
