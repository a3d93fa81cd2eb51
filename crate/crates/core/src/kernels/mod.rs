//! Closed-form concentration kernels.
//!
//! All space-domain kernels are the inverse Fourier transform of the
//! indicator of a wavenumber set, with the `(2 pi)^-n` convention, so the
//! diagonal value times the region measure is the asymptotic DoF. The dual
//! kernels swap the roles: they are transforms of a spatial region indicator
//! evaluated at a wavenumber difference.
//!
//! Removable singularities are evaluated through series in the
//! dimensionless argument. Where the closed form suffers cancellation
//! (`sin u - u cos u`) the series is kept over a wider range than the
//! leading-order limit would need, so both branches agree to roughly
//! machine precision at the switchover.

mod bessel;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{DomainTag, Grid};

pub use bessel::{bessel_j1, bessel_j1_over_z};

/// Which kernel to evaluate and its physical parameters. Rates are in rad/s,
/// wavenumbers in rad/m, lengths in metres, speeds in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// Band `[-omega, omega]` observed on a time interval.
    Time1d { omega: f64 },
    /// Disk `|k| <= k` in the plane.
    Disk2d { k: f64 },
    /// Solid ball `|k| <= k0`.
    Ball3d { k0: f64 },
    /// Shell `k1 <= |k| <= k0`.
    Shell3d { k0: f64, k1: f64 },
    /// Sphere surface `|k| = k0` (single frequency).
    Sphere3d { k0: f64 },
    /// Ball `|k| <= k0` with both light-cone sheets `w = +/- c |k|`.
    Spacetime { k0: f64, c: f64 },
    /// Spatial ball of radius `r0`, evaluated on wavenumber nodes. On a
    /// direction grid `k0` scales the unit vectors; on a sector grid it
    /// must be absent.
    DualBall {
        r0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k0: Option<f64>,
    },
    /// Spatial cuboid `|x_i| <= a_i`, evaluated on wavenumber nodes.
    DualCuboid {
        half_extents: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k0: Option<f64>,
    },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl KernelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Time1d { .. } => "time1d",
            KernelSpec::Disk2d { .. } => "disk2d",
            KernelSpec::Ball3d { .. } => "ball3d",
            KernelSpec::Shell3d { .. } => "shell3d",
            KernelSpec::Sphere3d { .. } => "sphere3d",
            KernelSpec::Spacetime { .. } => "spacetime",
            KernelSpec::DualBall { .. } => "dual_ball",
            KernelSpec::DualCuboid { .. } => "dual_cuboid",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Time1d { omega } => positive("omega", omega),
            KernelSpec::Disk2d { k } => positive("k", k),
            KernelSpec::Ball3d { k0 } | KernelSpec::Sphere3d { k0 } => positive("k0", k0),
            KernelSpec::Shell3d { k0, k1 } => {
                positive("k0", k0)?;
                positive("k1", k1)?;
                if k1 >= k0 {
                    return Err(Error::config(format!(
                        "shell needs k1 < k0, got k1={k1}, k0={k0}"
                    )));
                }
                Ok(())
            }
            KernelSpec::Spacetime { k0, c } => {
                positive("k0", k0)?;
                positive("c", c)
            }
            KernelSpec::DualBall { r0, k0 } => {
                positive("r0", r0)?;
                k0.map_or(Ok(()), |k| positive("k0", k))
            }
            KernelSpec::DualCuboid { half_extents, k0 } => {
                for (axis, a) in ["a_x", "a_y", "a_z"].iter().zip(half_extents) {
                    positive(axis, a)?;
                }
                k0.map_or(Ok(()), |k| positive("k0", k))
            }
        }
    }

    /// Checks that this kernel can be assembled on `grid`.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        let tag = grid.domain();
        let dim = grid.dim();
        let ok = match self {
            KernelSpec::Time1d { .. } => tag == DomainTag::Interval && dim == 1,
            KernelSpec::Disk2d { .. } => tag == DomainTag::Box && dim == 2,
            KernelSpec::Ball3d { .. }
            | KernelSpec::Shell3d { .. }
            | KernelSpec::Sphere3d { .. } => tag == DomainTag::Box && dim == 3,
            KernelSpec::Spacetime { .. } => tag == DomainTag::SpaceTime && dim >= 2,
            KernelSpec::DualBall { k0, .. } | KernelSpec::DualCuboid { k0, .. } => match tag {
                DomainTag::SphereSurface | DomainTag::SphericalCap => {
                    if k0.is_none() {
                        return Err(Error::config(format!(
                            "{} on a direction grid needs k0 to scale the unit vectors",
                            self.name()
                        )));
                    }
                    true
                }
                DomainTag::WavenumberBallSector => {
                    if k0.is_some() {
                        return Err(Error::config(format!(
                            "{} on a wavenumber sector grid takes its radius from the nodes; remove k0",
                            self.name()
                        )));
                    }
                    true
                }
                _ => false,
            },
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "kernel {} cannot be assembled on a {dim}-dimensional {tag:?} grid",
                self.name()
            )))
        }
    }

    /// Evaluates `D(p, q)`. Coordinates follow the grid conventions: space
    /// vectors, `(x.., t)` for space-time, wavenumber or unit vectors for
    /// the dual kernels.
    pub fn eval(&self, p: &[f64], q: &[f64]) -> f64 {
        match *self {
            KernelSpec::Time1d { omega } => eval_time1d(omega, p[0], q[0]),
            KernelSpec::Disk2d { k } => eval_disk2d(k, p, q),
            KernelSpec::Ball3d { k0 } => eval_ball3d(k0, p, q),
            KernelSpec::Shell3d { k0, k1 } => eval_shell3d(k0, k1, p, q),
            KernelSpec::Sphere3d { k0 } => eval_sphere3d(k0, p, q),
            KernelSpec::Spacetime { k0, c } => eval_spacetime(k0, c, p, q),
            KernelSpec::DualBall { r0, k0 } => {
                let s = k0.unwrap_or(1.0);
                dual_ball_at_distance(r0, s * distance(p, q))
            }
            KernelSpec::DualCuboid { half_extents, k0 } => {
                let s = k0.unwrap_or(1.0);
                half_extents
                    .iter()
                    .zip(p.iter().zip(q))
                    .map(|(&a, (&pi, &qi))| sine_factor(a, s * (pi - qi)))
                    .product()
            }
        }
    }

    /// Diagonal value `D(p, p)`, constant for every kernel here.
    pub fn diagonal(&self) -> f64 {
        match *self {
            KernelSpec::Time1d { omega } => omega / PI,
            KernelSpec::Disk2d { k } => k * k / (4.0 * PI),
            KernelSpec::Ball3d { k0 } => ball_at_distance(k0, 0.0),
            KernelSpec::Shell3d { k0, k1 } => ball_at_distance(k0, 0.0) - ball_at_distance(k1, 0.0),
            KernelSpec::Sphere3d { k0 } => k0 * k0 / (2.0 * PI * PI),
            KernelSpec::Spacetime { k0, .. } => k0.powi(3) / (3.0 * PI * PI),
            KernelSpec::DualBall { r0, .. } => r0.powi(3) / (6.0 * PI * PI),
            KernelSpec::DualCuboid { half_extents, .. } => {
                half_extents.iter().map(|a| a / PI).product()
            }
        }
    }

    /// Whether assembly on `grid` folds the `k^2` radial Jacobian into the
    /// matrix.
    pub fn uses_radial_jacobian(&self, grid: &Grid) -> bool {
        grid.domain() == DomainTag::WavenumberBallSector
    }
}

pub fn distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `sin(u)/u`.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        let u2 = u * u;
        1.0 - u2 / 6.0 * (1.0 - u2 / 20.0)
    } else {
        u.sin() / u
    }
}

/// `(sin u - u cos u) / u^3`, even in `u`, equal to 1/3 at the origin.
///
/// Series `sum_{n>=1} (-1)^(n+1) 2n u^(2n-2) / (2n+1)!` below `|u| = 0.5`.
pub fn ball_profile(u: f64) -> f64 {
    let a = u.abs();
    if a < 0.5 {
        let u2 = a * a;
        let mut sum = 0.0;
        let mut power = 1.0;
        let mut fact = 6.0; // (2n+1)! for n = 1
        for n in 1..=9 {
            let nf = n as f64;
            let term = 2.0 * nf * power / fact;
            sum += if n % 2 == 1 { term } else { -term };
            power *= u2;
            fact *= (2.0 * nf + 2.0) * (2.0 * nf + 3.0);
        }
        sum
    } else {
        let (s, c) = a.sin_cos();
        (s - a * c) / (a * a * a)
    }
}

/// `int_0^1 s^m cos(x s) ds` for `m` in {2, 4}.
fn cosine_moment(m: u32, x: f64) -> f64 {
    let a = x.abs();
    if a <= 2.0 {
        let x2 = a * a;
        let mut sum = 0.0;
        let mut term = 1.0; // x^(2j) / (2j)!
        for j in 0..20 {
            let jf = j as f64;
            let contrib = term / (m as f64 + 2.0 * jf + 1.0);
            sum += if j % 2 == 0 { contrib } else { -contrib };
            if term < 1e-18 {
                break;
            }
            term *= x2 / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
        }
        sum
    } else {
        let (s, c) = a.sin_cos();
        match m {
            2 => (a * a * s + 2.0 * a * c - 2.0 * s) / a.powi(3),
            4 => {
                s / a + 4.0 * c / (a * a) - 12.0 * s / a.powi(3) - 24.0 * c / a.powi(4)
                    + 24.0 * s / a.powi(5)
            }
            _ => unreachable!("only even moments 2 and 4 are used"),
        }
    }
}

fn ball_at_distance(k0: f64, d: f64) -> f64 {
    k0.powi(3) / (2.0 * PI * PI) * ball_profile(k0 * d)
}

fn dual_ball_at_distance(r0: f64, g: f64) -> f64 {
    r0.powi(3) / (2.0 * PI * PI) * ball_profile(r0 * g)
}

/// `sin(a delta) / (pi delta)` with the limit `a / pi`.
fn sine_factor(a: f64, delta: f64) -> f64 {
    a / PI * sinc(a * delta)
}

/// `sin(omega (t - t')) / (pi (t - t'))`.
pub fn eval_time1d(omega: f64, t: f64, t2: f64) -> f64 {
    let u = omega * (t - t2);
    if u.abs() < 1e-8 {
        omega / PI * (1.0 - u * u / 6.0 * (1.0 - u * u / 20.0))
    } else {
        u.sin() / (PI * (t - t2))
    }
}

/// `K J1(K d) / (2 pi d)`.
pub fn eval_disk2d(k: f64, x: &[f64], x2: &[f64]) -> f64 {
    let u = k * distance(x, x2);
    k * k / (2.0 * PI) * bessel_j1_over_z(u)
}

/// `(sin k0 d / d^3 - k0 cos k0 d / d^2) / (2 pi^2)`.
pub fn eval_ball3d(k0: f64, x: &[f64], x2: &[f64]) -> f64 {
    ball_at_distance(k0, distance(x, x2))
}

/// Difference of two ball kernels.
pub fn eval_shell3d(k0: f64, k1: f64, x: &[f64], x2: &[f64]) -> f64 {
    let d = distance(x, x2);
    ball_at_distance(k0, d) - ball_at_distance(k1, d)
}

/// `k0 sin(k0 d) / (2 pi^2 d)`.
pub fn eval_sphere3d(k0: f64, x: &[f64], x2: &[f64]) -> f64 {
    k0 * k0 / (2.0 * PI * PI) * sinc(k0 * distance(x, x2))
}

/// `S(a) = int_0^k0 k sin(k a) dk = k0^2 * x * ball_profile(x)`, `x = k0 a`.
fn radial_sine(k0: f64, a: f64) -> f64 {
    let x = k0 * a;
    k0 * k0 * x * ball_profile(x)
}

/// Space-time kernel `(2 pi)^-3 int_0^k0 4 pi sinc(k d) 2 cos(c k tau) k^2 dk`
/// with `d = |x - x'|` and `tau = t - t'`; the last coordinate is time.
///
/// Closed form `(2 pi)^-3 (4 pi / d) [S(d + c tau) + S(d - c tau)]`. For
/// `k0 d` below 1e-3 the bracket is replaced by its Taylor expansion in `d`,
/// `2 d S'(b) + d^3 S'''(b) / 3` with `b = c tau`.
pub fn eval_spacetime(k0: f64, c: f64, p: &[f64], q: &[f64]) -> f64 {
    let n = p.len();
    let d = distance(&p[..n - 1], &q[..n - 1]);
    let b = c * (p[n - 1] - q[n - 1]);
    let norm = 1.0 / (8.0 * PI.powi(3));
    if k0 * d >= 1e-3 {
        norm * 4.0 * PI / d * (radial_sine(k0, d + b) + radial_sine(k0, d - b))
    } else {
        let x = k0 * b;
        let s1 = k0.powi(3) * cosine_moment(2, x);
        let s3 = -k0.powi(5) * cosine_moment(4, x);
        norm * 8.0 * PI * (s1 + d * d * s3 / 6.0)
    }
}

/// Dual ball kernel between wavenumber vectors.
pub fn eval_dual_ball(r0: f64, k: &[f64], k2: &[f64]) -> f64 {
    dual_ball_at_distance(r0, distance(k, k2))
}

/// Dual cuboid kernel between wavenumber vectors.
pub fn eval_dual_cuboid(half_extents: [f64; 3], k: &[f64], k2: &[f64]) -> f64 {
    (0..3)
        .map(|i| sine_factor(half_extents[i], k[i] - k2[i]))
        .product()
}
