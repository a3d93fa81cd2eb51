//! Transfer operators between a transmit and a receive region, truncation
//! counts, and a randomized check that the truncation rank of a
//! band-limited channel is controlled by the DoF of its two end regions.
//!
//! A channel is sampled as `G(y_j, x_i)` on a receive grid `y` and a
//! transmit grid `x`. In the weighted form `M = sqrt(W_rx) G sqrt(W_tx)` the
//! discrete operator norm, Hilbert–Schmidt norm and singular values match
//! those of the continuous operator under the quadrature inner products.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dof::{fdof, Scale, DEFAULT_EPSILONS};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::{uniform_box_grid, Grid, DEFAULT_NODE_CAP};
use crate::spectrum::{assemble, eigenvalues};

/// Sampled channel kernel between two grids.
#[derive(Debug, Clone)]
pub struct ChannelOperator {
    tx_grid: Grid,
    rx_grid: Grid,
    samples: Vec<f64>,
    weighted: Vec<f64>,
}

impl ChannelOperator {
    /// `samples` is row-major `n_rx x n_tx`, entry `(j, i)` = `G(y_j, x_i)`.
    pub fn new(tx_grid: Grid, rx_grid: Grid, samples: Vec<f64>) -> Result<Self> {
        let (n_tx, n_rx) = (tx_grid.len(), rx_grid.len());
        if samples.len() != n_rx * n_tx {
            return Err(Error::config(format!(
                "{} kernel samples do not match {n_rx} receive x {n_tx} transmit nodes",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("channel kernel samples must be finite"));
        }
        let wt: Vec<f64> = tx_grid.weights().iter().map(|w| w.sqrt()).collect();
        let wr: Vec<f64> = rx_grid.weights().iter().map(|w| w.sqrt()).collect();
        let weighted = samples
            .chunks_exact(n_tx)
            .zip(&wr)
            .flat_map(|(row, r)| row.iter().zip(&wt).map(move |(g, t)| r * g * t))
            .collect();
        Ok(ChannelOperator {
            tx_grid,
            rx_grid,
            samples,
            weighted,
        })
    }

    /// Samples `G(y, x) = spec.eval(y, x)`.
    pub fn from_kernel(spec: &KernelSpec, tx_grid: Grid, rx_grid: Grid) -> Result<Self> {
        spec.validate()?;
        let n_tx = tx_grid.len();
        let mut samples = vec![0.0; rx_grid.len() * n_tx];
        samples
            .par_chunks_mut(n_tx)
            .enumerate()
            .for_each(|(j, row)| {
                let y = rx_grid.node(j);
                for (i, v) in row.iter_mut().enumerate() {
                    *v = spec.eval(y, tx_grid.node(i));
                }
            });
        Self::new(tx_grid, rx_grid, samples)
    }

    pub fn tx_grid(&self) -> &Grid {
        &self.tx_grid
    }

    pub fn rx_grid(&self) -> &Grid {
        &self.rx_grid
    }

    pub fn n_tx(&self) -> usize {
        self.tx_grid.len()
    }

    pub fn n_rx(&self) -> usize {
        self.rx_grid.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Row-major `n_rx x n_tx` weighted matrix.
    pub fn weighted(&self) -> &[f64] {
        &self.weighted
    }

    pub fn weighted_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n_rx(), self.n_tx(), &self.weighted)
    }
}

/// Quadrature norm `sqrt(sum_j w_j g_j^2)` of a field sampled on `grid`.
pub fn field_norm(grid: &Grid, g: &[f64]) -> f64 {
    grid.weights()
        .iter()
        .zip(g)
        .map(|(w, v)| w * v * v)
        .sum::<f64>()
        .sqrt()
}

/// Hilbert–Schmidt norm `sqrt(sum_ij w_rx_j w_tx_i G_ji^2)`.
pub fn hs_norm(p: &ChannelOperator) -> f64 {
    p.weighted.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(P g)(y_j) = sum_i w_tx_i G_ji g_i`.
pub fn apply(p: &ChannelOperator, g: &[f64]) -> Result<Vec<f64>> {
    if g.len() != p.n_tx() {
        return Err(Error::config(format!(
            "field has {} samples, transmit grid has {} nodes",
            g.len(),
            p.n_tx()
        )));
    }
    let wg: Vec<f64> = p
        .tx_grid
        .weights()
        .iter()
        .zip(g)
        .map(|(w, v)| w * v)
        .collect();
    Ok(p.samples
        .chunks_exact(p.n_tx())
        .map(|row| row.iter().zip(&wg).map(|(a, b)| a * b).sum())
        .collect())
}

/// Singular values of the weighted matrix, descending.
pub fn singular_values(p: &ChannelOperator) -> Vec<f64> {
    let mut sv: Vec<f64> = p
        .weighted_matrix()
        .singular_values()
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `#{i : sigma_i > delta}` for descending singular values.
pub fn cdof_from_singular_values(sv: &[f64], delta: f64) -> usize {
    sv.iter().filter(|&&s| s > delta).count()
}

/// Smallest rank whose truncation error in operator norm is at most `delta`.
pub fn cdof(p: &ChannelOperator, delta: f64) -> Result<usize> {
    if !(delta > 0.0) {
        return Err(Error::config(format!(
            "delta must be positive, got {delta}"
        )));
    }
    Ok(cdof_from_singular_values(&singular_values(p), delta))
}

/// `sigma_{n+1}`, i.e. the optimal rank-`n` truncation error; zero past the
/// end of the list.
pub fn truncation_error(sv: &[f64], n: usize) -> f64 {
    sv.get(n).copied().unwrap_or(0.0)
}

/// Outcome of one (eps1, eps2) pair of the rank bound check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankBoundRecord {
    pub eps1: f64,
    pub eps2: f64,
    pub n1: usize,
    pub n2: usize,
    /// `|P| eps1 + |P| (1 + eps1) eps2` with the Hilbert–Schmidt norm.
    pub delta: f64,
    /// Truncation error at rank `max(n1, n2)`.
    pub achieved_error: f64,
    pub holds: bool,
    /// Exploratory: whether rank `min(n1, n2)` already meets `delta`.
    pub within_min: bool,
    pub cdof_at_delta: usize,
}

/// Norms, singular values and the rank bound outcome for one channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelReport {
    pub hs_norm: f64,
    pub singular_values: Vec<f64>,
    /// `cdof(eps * hs_norm)` keyed by `eps`.
    pub cdof_at: BTreeMap<String, usize>,
    pub rank_bound: RankBoundRecord,
}

/// Ranges for the randomized geometries. Box extents and the transmit-to-
/// receive offset are in metres, `k0` in rad/m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarnessConfig {
    pub extent_range: [f64; 2],
    pub k0_range: [f64; 2],
    pub count_range: [usize; 2],
    pub offset_range: [f64; 2],
    /// Random input fields per geometry for the norm inequality check.
    pub norm_fields: usize,
    pub node_cap: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            extent_range: [0.2, 1.0],
            k0_range: [2.0 * PI, 20.0 * PI],
            count_range: [2, 9],
            offset_range: [-0.5, 0.5],
            norm_fields: 1000,
            node_cap: DEFAULT_NODE_CAP,
        }
    }
}

impl HarnessConfig {
    fn validate(&self) -> Result<()> {
        let [e0, e1] = self.extent_range;
        if !(e0 > 0.0 && e1 >= e0 && e1.is_finite()) {
            return Err(Error::InvalidRegion(format!(
                "extent range [{e0}, {e1}] must be positive and ordered"
            )));
        }
        let [k0, k1] = self.k0_range;
        if !(k0 > 0.0 && k1 >= k0 && k1.is_finite()) {
            return Err(Error::config(format!(
                "k0 range [{k0}, {k1}] must be positive and ordered"
            )));
        }
        let [c0, c1] = self.count_range;
        if !(c0 >= 1 && c1 >= c0) {
            return Err(Error::config(format!(
                "count range [{c0}, {c1}] must be ordered and >= 1"
            )));
        }
        let [o0, o1] = self.offset_range;
        if !(o1 >= o0 && o0.is_finite() && o1.is_finite()) {
            return Err(Error::config(format!(
                "offset range [{o0}, {o1}] must be ordered"
            )));
        }
        Ok(())
    }
}

/// Random geometry drawn for one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialGeometry {
    pub k0: f64,
    pub tx_extents: [[f64; 2]; 3],
    pub rx_extents: [[f64; 2]; 3],
    pub tx_counts: [usize; 3],
    pub rx_counts: [usize; 3],
}

/// Norm inequality `|P g| <= |P|_HS |g|` over random fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBoundCheck {
    pub fields: usize,
    /// Largest `|P g| / (|P|_HS |g|)` seen.
    pub max_ratio: f64,
    pub holds: bool,
}

/// Everything computed for one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub geometry: TrialGeometry,
    pub norm_bound: NormBoundCheck,
    pub reports: Vec<ChannelReport>,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn draw_geometry(cfg: &HarnessConfig, rng: &mut ChaCha20Rng) -> TrialGeometry {
    let mut span = |lo: f64, hi: f64| {
        if hi > lo {
            rng.random_range(lo..hi)
        } else {
            lo
        }
    };
    let k0 = span(cfg.k0_range[0], cfg.k0_range[1]);
    let mut tx_extents = [[0.0; 2]; 3];
    let mut rx_extents = [[0.0; 2]; 3];
    for e in &mut tx_extents {
        *e = [0.0, span(cfg.extent_range[0], cfg.extent_range[1])];
    }
    for e in &mut rx_extents {
        let o = span(cfg.offset_range[0], cfg.offset_range[1]);
        *e = [o, o + span(cfg.extent_range[0], cfg.extent_range[1])];
    }
    let [c0, c1] = cfg.count_range;
    let mut counts = || [0; 3].map(|_: usize| rng.random_range(c0..=c1));
    let tx_counts = counts();
    let rx_counts = counts();
    TrialGeometry {
        k0,
        tx_extents,
        rx_extents,
        tx_counts,
        rx_counts,
    }
}

fn rank_record(sv: &[f64], hs: f64, n1: usize, n2: usize, eps1: f64, eps2: f64) -> RankBoundRecord {
    let delta = hs * eps1 + hs * (1.0 + eps1) * eps2;
    let achieved_error = truncation_error(sv, n1.max(n2));
    RankBoundRecord {
        eps1,
        eps2,
        n1,
        n2,
        delta,
        achieved_error,
        holds: achieved_error <= delta,
        within_min: truncation_error(sv, n1.min(n2)) <= delta,
        cdof_at_delta: cdof_from_singular_values(sv, delta),
    }
}

fn run_trial(
    cfg: &HarnessConfig,
    pairs: &[(f64, f64)],
    seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let mut rng = trial_rng(seed, trial);
    let geometry = draw_geometry(cfg, &mut rng);
    let spec = KernelSpec::Ball3d { k0: geometry.k0 };
    let tx_grid = uniform_box_grid(&geometry.tx_extents, &geometry.tx_counts, cfg.node_cap)?;
    let rx_grid = uniform_box_grid(&geometry.rx_extents, &geometry.rx_counts, cfg.node_cap)?;

    let tx_spectrum = eigenvalues(&assemble(&spec, &tx_grid)?)?;
    let rx_spectrum = eigenvalues(&assemble(&spec, &rx_grid)?)?;
    let channel = ChannelOperator::from_kernel(&spec, tx_grid, rx_grid)?;
    let hs = hs_norm(&channel);
    let sv = singular_values(&channel);

    let mut max_ratio: f64 = 0.0;
    for _ in 0..cfg.norm_fields {
        let g: Vec<f64> = (0..channel.n_tx())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let out = apply(&channel, &g)?;
        let denom = hs * field_norm(channel.tx_grid(), &g);
        if denom > 0.0 {
            max_ratio = max_ratio.max(field_norm(channel.rx_grid(), &out) / denom);
        }
    }
    let norm_bound = NormBoundCheck {
        fields: cfg.norm_fields,
        max_ratio,
        holds: max_ratio <= 1.0 + 1e-12,
    };

    let cdof_at: BTreeMap<String, usize> = DEFAULT_EPSILONS
        .iter()
        .map(|&e| (e.to_string(), cdof_from_singular_values(&sv, e * hs)))
        .collect();
    let reports = pairs
        .iter()
        .map(|&(e1, e2)| {
            let n1 = fdof(&tx_spectrum, e1, Scale::Raw);
            let n2 = fdof(&rx_spectrum, e2, Scale::Raw);
            ChannelReport {
                hs_norm: hs,
                singular_values: sv.clone(),
                cdof_at: cdof_at.clone(),
                rank_bound: rank_record(&sv, hs, n1, n2, e1, e2),
            }
        })
        .collect();
    Ok(TrialOutcome {
        trial,
        geometry,
        norm_bound,
        reports,
    })
}

/// Runs `trials` random geometries, evaluating every `(eps1, eps2)` pair on
/// each. Trial `t` draws from a stream keyed by `(seed, t)`, so results do
/// not depend on scheduling.
pub fn run_rank_bound_trials(
    cfg: &HarnessConfig,
    pairs: &[(f64, f64)],
    trials: u64,
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::config("at least one trial is required"));
    }
    for &(e1, e2) in pairs {
        if !(e1 > 0.0 && e1 < 1.0 && e2 > 0.0 && e2 < 1.0) {
            return Err(Error::config(format!(
                "eps pair ({e1}, {e2}) must lie in (0, 1)"
            )));
        }
    }
    (0..trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, pairs, seed, t))
        .collect()
}

/// Single-pair form of [`run_rank_bound_trials`], one report per trial.
pub fn verify_rank_bound(
    cfg: &HarnessConfig,
    eps1: f64,
    eps2: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<ChannelReport>> {
    Ok(run_rank_bound_trials(cfg, &[(eps1, eps2)], trials, seed)?
        .into_iter()
        .flat_map(|t| t.reports)
        .collect())
}
