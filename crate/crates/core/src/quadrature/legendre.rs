use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest rule size accepted by [`gauss_legendre_rule`].
pub const MAX_RULE_SIZE: usize = 10_000;

const MAX_NEWTON_ITERATIONS: usize = 100;

/// Evaluates `(P_n(x), P_{n-1}(x))` with the three-term recurrence.
pub fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Derivative of `P_n` at an interior point, from the pair returned by
/// [`legendre_pair`].
fn legendre_derivative(n: usize, x: f64, pn: f64, pn1: f64) -> f64 {
    n as f64 * (x * pn - pn1) / (x * x - 1.0)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Nodes are the zeros of `P_n`, found by Newton iteration started from the
/// Chebyshev-angle estimate `cos(pi (i - 1/4) / (n + 1/2))`. Weights use
/// `A_k = 2 / (n P_{n-1}(x_k) P_n'(x_k))`.
pub fn gauss_legendre_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > MAX_RULE_SIZE {
        return Err(Error::config(format!(
            "Gauss-Legendre rule size must be in 1..={MAX_RULE_SIZE}, got {n}"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    // Roots come in +/- pairs; solve the positive half and mirror.
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut converged = false;
        for _ in 0..MAX_NEWTON_ITERATIONS {
            let (pn, pn1) = legendre_pair(n, x);
            if pn.abs() <= 1e-15 {
                converged = true;
                break;
            }
            let dp = legendre_derivative(n, x, pn, pn1);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() <= 2.0 * f64::EPSILON * x.abs().max(f64::EPSILON) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numeric {
                routine: "gauss_legendre_rule",
                index: i,
                detail: format!("Newton iteration for root {i} of P_{n} did not converge"),
            });
        }
        // Odd n: the middle root is exactly zero by symmetry.
        if n % 2 == 1 && i == half - 1 {
            x = 0.0;
        }
        let (pn, pn1) = legendre_pair(n, x);
        let dp = legendre_derivative(n, x, pn, pn1);
        let w = 2.0 / (nf * pn1 * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    Ok((nodes, weights))
}

/// Affine image of the `n`-point rule on `[lo, hi]`.
pub fn gauss_legendre_interval(n: usize, lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (x, w) = gauss_legendre_rule(n)?;
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    Ok((
        x.iter().map(|&xi| mid + half * xi).collect(),
        w.iter().map(|&wi| half * wi).collect(),
    ))
}
