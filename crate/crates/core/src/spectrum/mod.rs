//! Nyström assembly, dense eigendecomposition and pattern recovery.
//!
//! The discrete operator is the symmetrized form `M_ij = s_i D(p_i, p_j) s_j`
//! with `s_i = sqrt(w_i)`, or `s_i = k_i sqrt(w_i)` on wavenumber-sector
//! grids where the radial `k^2` Jacobian is part of the measure. Patterns are
//! recovered as `f_i(p_j) = v_ij / s_j`, which makes them orthonormal under
//! the effective node measure `s_j^2`.

mod eigen;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::quadrature::{compensated_sum, Grid, DEFAULT_NODE_CAP};

pub use eigen::{symmetric_eigen, SymmetricEigen};

/// Relative floor below which small negative eigenvalues are treated as
/// quadrature noise in normalized output.
pub const SIGN_FLOOR: f64 = 1e-9;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::config(format!(
                "{} entries cannot form a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn trace(&self) -> f64 {
        compensated_sum((0..self.n).map(|i| self.get(i, i)))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Symmetric Nyström matrix of a kernel on a grid.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    matrix: SquareMatrix,
    grid: Grid,
    spec: KernelSpec,
    radial_jacobian_applied: bool,
    scales: Vec<f64>,
}

impl DiscreteOperator {
    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn radial_jacobian_applied(&self) -> bool {
        self.radial_jacobian_applied
    }

    pub fn len(&self) -> usize {
        self.matrix.n
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.n == 0
    }

    /// Per-node measure the patterns are orthonormal under: the grid weight,
    /// times `k^2` when the radial Jacobian is applied.
    pub fn effective_weights(&self) -> Vec<f64> {
        self.scales.iter().map(|s| s * s).collect()
    }

    /// Effective measure of the region.
    pub fn measure(&self) -> f64 {
        compensated_sum(self.scales.iter().map(|s| s * s))
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }
}

/// Assembles `spec` on `grid` under the default node cap.
pub fn assemble(spec: &KernelSpec, grid: &Grid) -> Result<DiscreteOperator> {
    assemble_with_cap(spec, grid, DEFAULT_NODE_CAP)
}

/// Assembles `spec` on `grid`, rejecting grids with more than `node_cap`
/// nodes. Rows are filled in parallel; each entry depends only on its node
/// pair, so the result does not depend on the thread count.
pub fn assemble_with_cap(
    spec: &KernelSpec,
    grid: &Grid,
    node_cap: usize,
) -> Result<DiscreteOperator> {
    spec.validate()?;
    spec.check_grid(grid)?;
    let n = grid.len();
    if n > node_cap {
        return Err(Error::Capacity {
            requested: n,
            cap: node_cap,
        });
    }
    let radial = spec.uses_radial_jacobian(grid);
    let scales: Vec<f64> = grid
        .nodes()
        .zip(grid.weights())
        .map(|(p, &w)| {
            let s = w.sqrt();
            if radial {
                s * p.iter().map(|c| c * c).sum::<f64>().sqrt()
            } else {
                s
            }
        })
        .collect();

    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let p = grid.node(i);
        let si = scales[i];
        for j in i..n {
            row[j] = si * spec.eval(p, grid.node(j)) * scales[j];
        }
    });
    for i in 1..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
    if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
        return Err(Error::Numeric {
            routine: "assemble",
            index: pos / n,
            detail: format!(
                "kernel {} produced a non-finite entry at ({}, {})",
                spec.name(),
                pos / n,
                pos % n
            ),
        });
    }
    Ok(DiscreteOperator {
        matrix: SquareMatrix { n, data },
        grid: grid.clone(),
        spec: *spec,
        radial_jacobian_applied: radial,
        scales,
    })
}

/// Descending eigenvalues together with the operator trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    trace: f64,
}

impl Spectrum {
    /// Builds a spectrum from arbitrary values; they are sorted descending
    /// with a stable sort.
    pub fn from_eigenvalues(mut values: Vec<f64>, trace: f64) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Spectrum {
            eigenvalues: values,
            trace,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.eigenvalues.iter().copied())
    }

    /// `lambda_i / lambda_1`, with values in `[-SIGN_FLOOR, 0)` clamped to
    /// zero. All zeros if the leading eigenvalue is not positive.
    pub fn normalized(&self) -> Vec<f64> {
        let l1 = self.lambda_max();
        if !(l1 > 0.0) {
            return vec![0.0; self.eigenvalues.len()];
        }
        self.eigenvalues
            .iter()
            .map(|&v| {
                let r = v / l1;
                if (-SIGN_FLOOR..0.0).contains(&r) {
                    0.0
                } else {
                    r
                }
            })
            .collect()
    }
}

/// Eigenfunction samples at the grid nodes, one row per mode.
#[derive(Debug, Clone)]
pub struct PatternSet {
    n_modes: usize,
    grid: Grid,
    measure: Vec<f64>,
    values: Vec<f64>,
}

impl PatternSet {
    /// Builds a pattern set from `n_modes` rows of `grid.len()` samples,
    /// orthogonality measured with `measure` (one weight per node).
    pub fn from_rows(grid: Grid, measure: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if measure.len() != n || !values.len().is_multiple_of(n) {
            return Err(Error::config(format!(
                "pattern table of {} values and {} weights does not fit a {n}-node grid",
                values.len(),
                measure.len()
            )));
        }
        Ok(PatternSet {
            n_modes: values.len() / n,
            grid,
            measure,
            values,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn mode(&self, i: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn value(&self, mode: usize, node: usize) -> f64 {
        self.values[mode * self.grid.len() + node]
    }

    /// Weighted inner product of two modes.
    pub fn inner(&self, i: usize, k: usize) -> f64 {
        self.mode(i)
            .iter()
            .zip(self.mode(k))
            .zip(&self.measure)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }

    /// Keeps only the first `n` modes.
    pub fn truncate(&mut self, n: usize) {
        if n < self.n_modes {
            self.values.truncate(n * self.grid.len());
            self.n_modes = n;
        }
    }
}

/// Full eigendecomposition of the operator.
pub fn eigendecompose(op: &DiscreteOperator) -> Result<(Spectrum, PatternSet)> {
    let n = op.len();
    if n == 0 {
        return Err(Error::config("cannot decompose an empty operator"));
    }
    let eig = symmetric_eigen(op.matrix.data.clone(), n, true)?;
    let mut values = eig.vectors.expect("vectors were requested");
    for row in values.chunks_exact_mut(n) {
        for (v, s) in row.iter_mut().zip(&op.scales) {
            *v /= s;
        }
    }
    let spectrum = Spectrum {
        eigenvalues: eig.values,
        trace: op.trace(),
    };
    let patterns = PatternSet {
        n_modes: n,
        grid: op.grid.clone(),
        measure: op.effective_weights(),
        values,
    };
    Ok((spectrum, patterns))
}

/// Eigenvalues only; skips the eigenvector accumulation.
pub fn eigenvalues(op: &DiscreteOperator) -> Result<Spectrum> {
    let n = op.len();
    if n == 0 {
        return Err(Error::config("cannot decompose an empty operator"));
    }
    let eig = symmetric_eigen(op.matrix.data.clone(), n, false)?;
    Ok(Spectrum {
        eigenvalues: eig.values,
        trace: op.trace(),
    })
}

/// Normalized weighted Gram matrix `<f_i, f_k> / (|f_i| |f_k|)` of the first
/// `n_modes` patterns. For orthonormal patterns this is the plain Gram
/// matrix.
pub fn correlation_matrix(patterns: &PatternSet, n_modes: usize) -> Result<SquareMatrix> {
    if n_modes == 0 || n_modes > patterns.n_modes {
        return Err(Error::config(format!(
            "correlation needs 1..={} modes, got {n_modes}",
            patterns.n_modes
        )));
    }
    let norms: Vec<f64> = (0..n_modes).map(|i| patterns.inner(i, i).sqrt()).collect();
    let mut out = SquareMatrix::zeros(n_modes);
    for i in 0..n_modes {
        for k in i..n_modes {
            let denom = norms[i] * norms[k];
            let v = if denom > 0.0 {
                patterns.inner(i, k) / denom
            } else {
                0.0
            };
            out.data[i * n_modes + k] = v;
            out.data[k * n_modes + i] = v;
        }
    }
    Ok(out)
}
