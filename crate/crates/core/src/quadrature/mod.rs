//! Quadrature grids over intervals, boxes, spheres, wavenumber sectors and
//! space-time products.
//!
//! Every grid stores its nodes as a flat coordinate array together with a
//! strictly positive weight per node. Multi-axis grids are tensor products
//! ordered with the last axis varying fastest.

mod legendre;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use legendre::{gauss_legendre_interval, gauss_legendre_rule, legendre_pair, MAX_RULE_SIZE};

/// Default upper bound on the number of nodes in a grid.
pub const DEFAULT_NODE_CAP: usize = 5000;

/// Which kind of region a grid discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Interval,
    Box,
    SphereSurface,
    SphericalCap,
    WavenumberBallSector,
    SpaceTime,
}

/// One-dimensional rule applied along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AxisRule {
    /// Midpoint cells of equal width.
    #[default]
    Uniform,
    GaussLegendre,
}

/// Angular extent on the unit sphere: `theta` is the polar angle, `phi` the
/// azimuth, both in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereCap {
    pub theta: [f64; 2],
    pub phi: [f64; 2],
}

impl SphereCap {
    pub const FULL: SphereCap = SphereCap {
        theta: [0.0, PI],
        phi: [0.0, 2.0 * PI],
    };

    pub fn is_full(&self) -> bool {
        self.theta[0] == 0.0 && self.theta[1] == PI && self.phi[1] - self.phi[0] == 2.0 * PI
    }

    /// Surface area `(phi_hi - phi_lo)(cos theta_lo - cos theta_hi)`.
    pub fn area(&self) -> f64 {
        (self.phi[1] - self.phi[0]) * (self.theta[0].cos() - self.theta[1].cos())
    }

    fn validate(&self) -> Result<()> {
        let [t0, t1] = self.theta;
        let [p0, p1] = self.phi;
        if !(t0.is_finite() && t1.is_finite() && p0.is_finite() && p1.is_finite()) {
            return Err(Error::InvalidRegion(
                "sphere cap bounds must be finite".into(),
            ));
        }
        if !(0.0 <= t0 && t0 < t1 && t1 <= PI) {
            return Err(Error::InvalidRegion(format!(
                "polar range [{t0}, {t1}] must satisfy 0 <= lo < hi <= pi"
            )));
        }
        let span = p1 - p0;
        if !(span > 0.0 && span <= 2.0 * PI) {
            return Err(Error::InvalidRegion(format!(
                "azimuth span {span} must lie in (0, 2 pi]"
            )));
        }
        Ok(())
    }
}

/// Quadrature nodes and positive weights over a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: DomainTag,
}

impl Grid {
    /// Builds a grid from raw parts. `nodes` holds `weights.len()` points of
    /// `dim` coordinates each.
    pub fn from_parts(
        dim: usize,
        nodes: Vec<f64>,
        weights: Vec<f64>,
        domain: DomainTag,
    ) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::config(format!("grid dimension {dim} outside 1..=4")));
        }
        if nodes.len() != dim * weights.len() {
            return Err(Error::config(format!(
                "{} coordinates do not describe {} nodes of dimension {dim}",
                nodes.len(),
                weights.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::config("grid has no nodes"));
        }
        if let Some(i) = weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::config(format!(
                "weight {i} is not a positive finite number"
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("grid node coordinates must be finite"));
        }
        Ok(Grid {
            dim,
            nodes,
            weights,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.nodes.chunks_exact(self.dim)
    }

    /// Flat coordinate storage, `dim` values per node.
    pub fn coordinates(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total weight, i.e. the discretized measure of the region.
    pub fn measure(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }
}

/// Neumaier-compensated summation.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn check_cap(requested: usize, cap: usize) -> Result<()> {
    if requested > cap {
        Err(Error::Capacity { requested, cap })
    } else {
        Ok(())
    }
}

/// Nodes and weights of one axis.
pub fn axis_rule(lo: f64, hi: f64, count: usize, rule: AxisRule) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(Error::InvalidRegion(format!(
            "axis [{lo}, {hi}] must have hi > lo"
        )));
    }
    if count == 0 {
        return Err(Error::config("axis node count must be at least 1"));
    }
    match rule {
        AxisRule::Uniform => {
            let h = (hi - lo) / count as f64;
            let nodes = (0..count).map(|i| lo + h * (i as f64 + 0.5)).collect();
            Ok((nodes, vec![h; count]))
        }
        AxisRule::GaussLegendre => gauss_legendre_interval(count, lo, hi),
    }
}

/// Tensor product of per-axis rules, last axis fastest.
fn tensor_product(axes: &[(Vec<f64>, Vec<f64>)], domain: DomainTag) -> Result<Grid> {
    let dim = axes.len();
    let total: usize = axes.iter().map(|a| a.0.len()).product();
    let mut nodes = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut index = vec![0usize; dim];
    for _ in 0..total {
        let mut w = 1.0;
        for (axis, &k) in axes.iter().zip(&index) {
            nodes.push(axis.0[k]);
            w *= axis.1[k];
        }
        weights.push(w);
        for a in (0..dim).rev() {
            index[a] += 1;
            if index[a] < axes[a].0.len() {
                break;
            }
            index[a] = 0;
        }
    }
    Grid::from_parts(dim, nodes, weights, domain)
}

/// Box grid with an independent rule per axis.
pub fn box_grid(
    extents: &[[f64; 2]],
    counts: &[usize],
    rules: &[AxisRule],
    node_cap: usize,
) -> Result<Grid> {
    let dim = extents.len();
    if !(1..=3).contains(&dim) {
        return Err(Error::config(format!(
            "box grids support 1 to 3 axes, got {dim}"
        )));
    }
    if counts.len() != dim || rules.len() != dim {
        return Err(Error::config(format!(
            "box grid has {dim} extents but {} counts and {} rules",
            counts.len(),
            rules.len()
        )));
    }
    if counts.contains(&0) {
        return Err(Error::config("axis node count must be at least 1"));
    }
    let requested = counts
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .unwrap_or(usize::MAX);
    check_cap(requested, node_cap)?;
    let axes = extents
        .iter()
        .zip(counts)
        .zip(rules)
        .map(|((e, &c), &r)| axis_rule(e[0], e[1], c, r))
        .collect::<Result<Vec<_>>>()?;
    let domain = if dim == 1 {
        DomainTag::Interval
    } else {
        DomainTag::Box
    };
    tensor_product(&axes, domain)
}

/// Midpoint lattice over a box.
pub fn uniform_box_grid(extents: &[[f64; 2]], counts: &[usize], node_cap: usize) -> Result<Grid> {
    box_grid(
        extents,
        counts,
        &vec![AxisRule::Uniform; extents.len()],
        node_cap,
    )
}

/// Gauss–Legendre product grid over a box.
pub fn gl_box_grid(extents: &[[f64; 2]], counts: &[usize], node_cap: usize) -> Result<Grid> {
    box_grid(
        extents,
        counts,
        &vec![AxisRule::GaussLegendre; extents.len()],
        node_cap,
    )
}

/// Angular product rule: Gauss–Legendre in `u = cos(theta)`, midpoint in phi.
/// Returns unit vectors (flattened) and weights, polar index major.
fn angular_rule(n_polar: usize, n_azimuth: usize, cap: &SphereCap) -> Result<(Vec<f64>, Vec<f64>)> {
    cap.validate()?;
    if n_polar == 0 || n_azimuth == 0 {
        return Err(Error::config(
            "sphere grid needs at least one polar and one azimuth node",
        ));
    }
    let (u, wu) = gauss_legendre_interval(n_polar, cap.theta[1].cos(), cap.theta[0].cos())?;
    let (phi, wphi) = axis_rule(cap.phi[0], cap.phi[1], n_azimuth, AxisRule::Uniform)?;
    let mut dirs = Vec::with_capacity(3 * n_polar * n_azimuth);
    let mut weights = Vec::with_capacity(n_polar * n_azimuth);
    for (&ui, &wi) in u.iter().zip(&wu) {
        let s = (1.0 - ui * ui).max(0.0).sqrt();
        for (&pj, &wj) in phi.iter().zip(&wphi) {
            dirs.extend_from_slice(&[s * pj.cos(), s * pj.sin(), ui]);
            weights.push(wi * wj);
        }
    }
    Ok((dirs, weights))
}

/// Product grid on the unit sphere or a spherical cap.
pub fn sphere_grid(
    n_polar: usize,
    n_azimuth: usize,
    cap: SphereCap,
    node_cap: usize,
) -> Result<Grid> {
    check_cap(n_polar.saturating_mul(n_azimuth), node_cap)?;
    let (dirs, weights) = angular_rule(n_polar, n_azimuth, &cap)?;
    let domain = if cap.is_full() {
        DomainTag::SphereSurface
    } else {
        DomainTag::SphericalCap
    };
    Grid::from_parts(3, dirs, weights, domain)
}

/// Product of a radial Gauss–Legendre rule on `[k_lo, k_hi]` with an angular
/// rule. Nodes are wavenumber vectors `k * khat`; weights carry `dk dS` only,
/// the `k^2` Jacobian is applied at operator assembly.
pub fn wavenumber_sector_grid(
    k_lo: f64,
    k_hi: f64,
    n_radial: usize,
    n_polar: usize,
    n_azimuth: usize,
    cap: SphereCap,
    node_cap: usize,
) -> Result<Grid> {
    if !(k_lo >= 0.0 && k_hi > k_lo && k_hi.is_finite()) {
        return Err(Error::InvalidRegion(format!(
            "radial wavenumber range [{k_lo}, {k_hi}] must satisfy 0 <= lo < hi"
        )));
    }
    let requested = n_radial.saturating_mul(n_polar).saturating_mul(n_azimuth);
    check_cap(requested, node_cap)?;
    if n_radial == 0 {
        return Err(Error::config("sector grid needs at least one radial node"));
    }
    let (kr, wr) = gauss_legendre_interval(n_radial, k_lo, k_hi)?;
    let (dirs, wa) = angular_rule(n_polar, n_azimuth, &cap)?;
    let mut nodes = Vec::with_capacity(3 * requested);
    let mut weights = Vec::with_capacity(requested);
    for (&k, &wk) in kr.iter().zip(&wr) {
        for (d, &w) in dirs.chunks_exact(3).zip(&wa) {
            nodes.extend(d.iter().map(|c| k * c));
            weights.push(wk * w);
        }
    }
    Grid::from_parts(3, nodes, weights, DomainTag::WavenumberBallSector)
}

/// Product grid over `[0, length] x [-half_window, half_window]`; nodes are
/// `(x, t)` pairs with time last, space index major.
pub fn space_time_grid(
    length: f64,
    n_x: usize,
    half_window: f64,
    n_t: usize,
    rule: AxisRule,
    node_cap: usize,
) -> Result<Grid> {
    if !(half_window > 0.0) {
        return Err(Error::InvalidRegion(format!(
            "time half-window {half_window} must be positive"
        )));
    }
    check_cap(n_x.saturating_mul(n_t), node_cap)?;
    let xs = axis_rule(0.0, length, n_x, rule)?;
    let ts = axis_rule(-half_window, half_window, n_t, rule)?;
    tensor_product(&[xs, ts], DomainTag::SpaceTime)
}
