//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = KRONROD_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        kronrod += KRONROD_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive 7/15-point Gauss–Kronrod quadrature of `f` over
/// `[a, b]`: the panel with the largest error estimate is bisected until
/// the summed estimate drops below `tol` (or below the rounding floor of
/// the running total). The interval starts split into `pieces` panels so
/// oscillatory integrands begin from a reasonable partition.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, pieces: usize) -> f64 {
    let f: &dyn Fn(f64) -> f64 = &f;
    let h = (b - a) / pieces as f64;
    let mut panels: Vec<(f64, f64, f64, f64)> = (0..pieces)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == pieces { b } else { lo + h };
            let (v, e) = gk15(f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    for _ in 0..5000 {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= tol.max(1e-15 * total.abs()) {
            break;
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].3.total_cmp(&panels[j].3))
            .unwrap();
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let m = 0.5 * (lo + hi);
        let (l, el) = gk15(f, lo, m);
        let (r, er) = gk15(f, m, hi);
        panels.push((lo, m, l, el));
        panels.push((m, hi, r, er));
    }
    let mut parts: Vec<f64> = panels.iter().map(|p| p.2).collect();
    parts.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    parts.iter().sum()
}

/// `J1(z) = (1 / 2 pi) int_0^{2 pi} cos(t - z sin t) dt` by the trapezoid
/// rule, which converges geometrically for periodic analytic integrands.
pub fn j1_trapezoid(z: f64) -> f64 {
    let n = 64 + 4 * z.abs().ceil() as usize;
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|i| {
            let t = h * i as f64;
            (t - z * t.sin()).cos()
        })
        .sum::<f64>()
        / n as f64
}

/// `J0(z)` by the same trapezoid representation.
pub fn j0_trapezoid(z: f64) -> f64 {
    let n = 64 + 4 * z.abs().ceil() as usize;
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|i| (z * (h * i as f64).sin()).cos())
        .sum::<f64>()
        / n as f64
}

/// `sin(x) / x` without any series branch; callers keep `x` away from 0.
pub fn naive_sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut ChaCha8Rng, dim: usize, half: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-half..half)).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Row-major `n x n` dense product.
pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Oracles for each kernel, written directly as the defining band integral
/// and evaluated with [`integrate`]. Arguments are the pair separation
/// `d` (or per-axis offsets) rather than the points themselves.
pub mod oracle {
    use super::{integrate, j0_trapezoid, naive_sinc};
    use std::f64::consts::PI;

    /// `(2 pi)^-1 int_{-omega}^{omega} cos(w tau) dw`.
    pub fn time1d(omega: f64, tau: f64) -> f64 {
        integrate(|w| (w * tau).cos(), -omega, omega, 1e-15 * omega, 8) / (2.0 * PI)
    }

    /// `(2 pi)^-2 int_0^K int_0^{2 pi} cos(k d cos phi) k dphi dk`.
    pub fn disk2d(k: f64, d: f64) -> f64 {
        integrate(|kk| kk * j0_trapezoid(kk * d), 0.0, k, 1e-15 * k * k, 16) / (2.0 * PI)
    }

    /// `(2 pi)^-3 int_{lo}^{hi} 4 pi k^2 sinc(k d) dk`, the radial form of a
    /// ball or shell indicator transform.
    pub fn radial(lo: f64, hi: f64, d: f64) -> f64 {
        let v = integrate(
            |k| k * k * naive_sinc(k * d),
            lo,
            hi,
            1e-14 * hi.powi(3),
            16,
        );
        4.0 * PI * v / (8.0 * PI.powi(3))
    }

    /// `(2 pi)^-3 k0^2 int_{S^2} cos(k0 d cos theta) dOmega`.
    pub fn sphere(k0: f64, d: f64) -> f64 {
        let polar = integrate(
            |th| (k0 * d * th.cos()).cos() * th.sin(),
            0.0,
            PI,
            1e-15,
            16,
        );
        k0 * k0 * 2.0 * PI * polar / (8.0 * PI.powi(3))
    }

    /// Ball transform times the two-sided temporal band `|w| = c |k|`.
    pub fn spacetime(k0: f64, c: f64, d: f64, tau: f64) -> f64 {
        let f = |k: f64| 4.0 * PI * naive_sinc(k * d) * 2.0 * (c * k * tau).cos() * k * k;
        integrate(f, 0.0, k0, 1e-14 * k0.powi(3), 32) / (8.0 * PI.powi(3))
    }

    /// `(2 pi)^-3 int_{|r| <= r0} cos(g . r) dr` in radial form.
    pub fn dual_ball(r0: f64, g: f64) -> f64 {
        let v = integrate(
            |s| s * s * naive_sinc(g * s),
            0.0,
            r0,
            1e-16 * r0.powi(3),
            16,
        );
        4.0 * PI * v / (8.0 * PI.powi(3))
    }

    /// Product over axes of `(2 pi)^-1 int_{-a}^{a} cos(delta x) dx`.
    pub fn dual_cuboid(a: [f64; 3], delta: [f64; 3]) -> f64 {
        (0..3)
            .map(|i| integrate(|x| (delta[i] * x).cos(), -a[i], a[i], 1e-16, 8) / (2.0 * PI))
            .product()
    }
}
