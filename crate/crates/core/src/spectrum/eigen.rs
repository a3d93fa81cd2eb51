//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! the implicit QL method with Wilkinson-style shifts (the EISPACK
//! tred2/tql2 pair).
//!
//! The working array is kept transposed relative to the textbook layout so
//! that every inner loop walks contiguous memory; on exit row `j` of the
//! array is the eigenvector belonging to `values[j]`.

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 64;

/// Eigenpairs sorted by descending eigenvalue. When vectors were requested,
/// `vectors[j * n..(j + 1) * n]` is the unit eigenvector of `values[j]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub n: usize,
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
}

/// Decomposes the symmetric row-major `n x n` matrix `a`. Only the lower
/// triangle is read.
pub fn symmetric_eigen(mut a: Vec<f64>, n: usize, want_vectors: bool) -> Result<SymmetricEigen> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    if n == 0 {
        return Ok(SymmetricEigen {
            n,
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }
    // `a` is symmetric, so it already equals its transpose; index it as
    // v(r, c) = a[c * n + r] and walk the textbook lower triangle.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut a, n, &mut d, &mut e);
    if want_vectors {
        accumulate(&mut a, n, &mut d, &mut e);
    } else {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = a[j * n + j];
        }
        e[0] = 0.0;
    }
    ql_implicit(&mut d, &mut e, n, want_vectors.then_some(&mut a[..]))?;

    let mut order: Vec<usize> = (0..n).collect();
    // Stable: equal eigenvalues keep the solver's output order.
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            out.extend_from_slice(&a[i * n..(i + 1) * n]);
        }
        out
    });
    Ok(SymmetricEigen { n, values, vectors })
}

/// Householder reduction to tridiagonal form. On exit `e[1..]` holds the
/// sub-diagonal and the reflectors are stored in `z`.
fn tridiagonalize(z: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = z[j * n + (n - 1)];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = z[j * n + (i - 1)];
                z[j * n + i] = 0.0;
                z[i * n + j] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);

            for j in 0..i {
                let f = d[j];
                z[i * n + j] = f;
                let col = &z[j * n..j * n + i];
                let mut g = e[j] + col[j] * f;
                for k in j + 1..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let col = &mut z[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = z[j * n + (i - 1)];
                z[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }
}

/// Forms the orthogonal transformation from the stored reflectors and
/// extracts the tridiagonal diagonal into `d`.
fn accumulate(z: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for i in 0..n - 1 {
        z[i * n + (n - 1)] = z[i * n + i];
        z[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            let (head, tail) = z.split_at_mut((i + 1) * n);
            let reflector = &tail[..=i];
            for k in 0..=i {
                d[k] = reflector[k] / h;
            }
            for j in 0..=i {
                let col = &mut head[j * n..j * n + i + 1];
                let g: f64 = reflector.iter().zip(col.iter()).map(|(r, c)| r * c).sum();
                for (ck, dk) in col.iter_mut().zip(&d[..=i]) {
                    *ck -= g * dk;
                }
            }
        }
        for k in 0..=i {
            z[(i + 1) * n + k] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = z[j * n + (n - 1)];
        z[j * n + (n - 1)] = 0.0;
    }
    z[(n - 1) * n + (n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL iteration on the tridiagonal `(d, e)`. If `z` is given the
/// rotations are applied to its rows.
fn ql_implicit(d: &mut [f64], e: &mut [f64], n: usize, mut z: Option<&mut [f64]>) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::Numeric {
                        routine: "symmetric_eigen",
                        index: l,
                        detail: format!(
                            "QL iteration did not converge after {MAX_QL_ITERATIONS} sweeps"
                        ),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let row_i = &mut lo[i * n..];
                        let row_i1 = &mut hi[..n];
                        for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
