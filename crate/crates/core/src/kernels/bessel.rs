use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Switchover between the power series and the Hankel expansion.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order one.
///
/// Power series for `|z| <= 12`, Hankel asymptotic expansion beyond. Odd
/// symmetry is exact: the magnitude is computed for `|z|` and the sign
/// restored afterwards.
pub fn bessel_j1(z: f64) -> f64 {
    let a = z.abs();
    let v = if a <= SERIES_LIMIT {
        j1_series(a)
    } else {
        j1_hankel(a)
    };
    if z < 0.0 {
        -v
    } else {
        v
    }
}

/// `J1(z) / z`, well-behaved at the origin.
pub fn bessel_j1_over_z(z: f64) -> f64 {
    let a = z.abs();
    if a < 1e-8 {
        0.5 * (1.0 - a * a / 8.0)
    } else if a <= SERIES_LIMIT {
        j1_series(a) / a
    } else {
        j1_hankel(a) / a
    }
}

fn j1_series(z: f64) -> f64 {
    let half = 0.5 * z;
    let q = -half * half;
    let mut term = half;
    let mut sum = term;
    for m in 1..80 {
        let mf = m as f64;
        term *= q / (mf * (mf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn j1_hankel(z: f64) -> f64 {
    // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k z^k), mu = 4.
    let mu = 4.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..100 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= last || next.abs() < 1e-17 {
            break;
        }
        last = next.abs();
        term = next;
        // Terms alternate between Q (odd k) and P (even k) with sign (-1)^floor(k/2).
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
    }
    let (s, c) = z.sin_cos();
    let cos_w = (s - c) * FRAC_1_SQRT_2;
    let sin_w = -(s + c) * FRAC_1_SQRT_2;
    (2.0 / (PI * z)).sqrt() * (p * cos_w - q * sin_w)
}
