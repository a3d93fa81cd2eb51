use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ResolvedGrid, ScenarioConfig, ScenarioResult, GRID_NOTE, NORMALIZATION_NOTE};
use crate::dof::DofReport;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

/// Table encoding. The summary is always JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

impl TableFormat {
    fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        }
    }
}

#[derive(Serialize)]
struct Notes {
    normalization: &'static str,
    grid: &'static str,
    scale: &'static str,
}

#[derive(Serialize)]
struct Summary<'a> {
    name: &'a str,
    config: &'a ScenarioConfig,
    kernel: &'a KernelSpec,
    grid: &'a ResolvedGrid,
    dof: &'a DofReport,
    trace: f64,
    eigenvalue_sum: f64,
    lambda_max: f64,
    runtime_seconds: f64,
    files: Vec<String>,
    notes: Notes,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_table(
    path: &Path,
    format: TableFormat,
    header: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
            w.write_record(header).map_err(csv_error)?;
            for row in rows {
                w.write_record(&row).map_err(csv_error)?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .map(|row| {
                    header
                        .iter()
                        .zip(row)
                        .map(|(h, v)| {
                            let value = v
                                .parse::<f64>()
                                .ok()
                                .and_then(|x| {
                                    serde_json::Number::from_f64(x).map(serde_json::Value::Number)
                                })
                                .unwrap_or(serde_json::Value::String(v));
                            (h.clone(), value)
                        })
                        .collect()
                })
                .collect();
            let text =
                serde_json::to_string_pretty(&records).map_err(|e| Error::Io(e.to_string()))?;
            fs::write(path, text)?;
        }
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    // Shortest representation that round-trips, in scientific notation.
    format!("{v:e}")
}

/// Writes the tables requested by the config plus `<name>.summary.json`
/// into `dir`, returning the paths written.
pub fn write_outputs(
    result: &ScenarioResult,
    dir: &Path,
    format: TableFormat,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = result.name();
    let ext = format.extension();
    let mut files = Vec::new();

    if result.config.outputs.spectrum {
        let path = dir.join(format!("{name}.spectrum.{ext}"));
        let normalized = result.spectrum.normalized();
        let header = ["index", "lambda", "lambda_normalized"].map(String::from);
        let rows = result
            .spectrum
            .eigenvalues()
            .iter()
            .zip(&normalized)
            .enumerate()
            .map(|(i, (l, n))| vec![(i + 1).to_string(), fmt(*l), fmt(*n)]);
        write_table(&path, format, &header, rows)?;
        files.push(path);
    }

    if let (Some(n), Some(p)) = (result.config.outputs.patterns, &result.patterns) {
        let path = dir.join(format!("{name}.patterns.{ext}"));
        let dim = p.grid().dim();
        let mut header = vec!["mode".to_string(), "node".to_string()];
        header.extend((0..dim).map(|d| format!("x{d}")));
        header.push("value".into());
        let modes = n.min(p.n_modes());
        let rows = (0..modes).flat_map(|m| {
            p.grid().nodes().enumerate().map(move |(j, x)| {
                let mut row = vec![(m + 1).to_string(), j.to_string()];
                row.extend(x.iter().map(|c| fmt(*c)));
                row.push(fmt(p.value(m, j)));
                row
            })
        });
        write_table(&path, format, &header, rows)?;
        files.push(path);
    }

    if let Some(c) = &result.correlation {
        let path = dir.join(format!("{name}.correlation.{ext}"));
        let header = ["i", "j", "value"].map(String::from);
        let n = c.n();
        let rows = (0..n).flat_map(|i| {
            (0..n).map(move |j| vec![(i + 1).to_string(), (j + 1).to_string(), fmt(c.get(i, j))])
        });
        write_table(&path, format, &header, rows)?;
        files.push(path);
    }

    let summary_path = dir.join(format!("{name}.summary.json"));
    let summary = Summary {
        name,
        config: &result.config,
        kernel: &result.kernel,
        grid: &result.resolved,
        dof: &result.dof,
        trace: result.spectrum.trace(),
        eigenvalue_sum: result.spectrum.sum(),
        lambda_max: result.spectrum.lambda_max(),
        runtime_seconds: result.runtime_seconds,
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
        notes: Notes {
            normalization: NORMALIZATION_NOTE,
            grid: GRID_NOTE,
            scale:
                "DoF counts use the scale named in dof.scale; plotted spectra use lambda / lambda_1",
        },
    };
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&summary_path, text)?;
    files.push(summary_path);
    Ok(files)
}
