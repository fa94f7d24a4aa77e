//! Dense symmetric eigendecomposition: Householder tridiagonalization
//! followed by the implicit-shift QL iteration, with eigenvectors
//! accumulated along the way. This is the classic EISPACK tred2/tql2 pair.
//!
//! The 2-norm helper is written as sqrt(a*a + b*b) on purpose: it commutes
//! exactly with power-of-two scaling of the input matrix, which downstream
//! scale-invariance guarantees rely on. The magnitudes seen here (channel
//! covariances) are far from overflow.

use crate::error::{Error, Result};
use ndarray::Array2;

/// Eigendecomposition of a symmetric matrix: A = V diag(values) V^T.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEig {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// `vectors.column(i)` is the unit eigenvector for `values[i]`.
    pub vectors: Array2<f64>,
}

fn pythag(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// Householder reduction to tridiagonal form; returns (diagonal,
/// subdiagonal) with the accumulated orthogonal transform left in `v`,
/// a flat row-major n x n buffer. Flat slices keep the hot loops free of
/// multidimensional index arithmetic; this routine dominates the cost of
/// every adaptive beamformer pixel.
fn tred2(v: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            // Rows 0..i mutate while row i is read-only, so split once.
            let (lo, hi) = v.split_at_mut(i * n);
            let vi = &mut hi[..n];
            let scale: f64 = vi[..=l].iter().map(|x| x.abs()).sum();
            if scale == 0.0 {
                e[i] = vi[l];
            } else {
                for x in &mut vi[..=l] {
                    *x /= scale;
                }
                for &x in &vi[..=l] {
                    h += x * x;
                }
                let f = vi[l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                vi[l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    lo[j * n + i] = vi[j] / h;
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += lo[j * n + k] * vi[k];
                    }
                    for k in (j + 1)..=l {
                        g_acc += lo[k * n + j] * vi[k];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * vi[j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = vi[j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    let row_j = &mut lo[j * n..j * n + j + 1];
                    for (k, rjk) in row_j.iter_mut().enumerate() {
                        let upd = f * e[k] + g * vi[k];
                        *rjk -= upd;
                    }
                }
            }
        } else {
            e[i] = v[i * n + l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;

    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += v[i * n + k] * v[k * n + j];
                }
                for k in 0..i {
                    let upd = g * v[k * n + i];
                    v[k * n + j] -= upd;
                }
            }
        }
        d[i] = v[i * n + i];
        v[i * n + i] = 1.0;
        for j in 0..i {
            v[j * n + i] = 0.0;
            v[i * n + j] = 0.0;
        }
    }
    (d, e)
}

/// Implicit-shift QL on the tridiagonal (d, e). `vt` holds the transform
/// TRANSPOSED (row i of `vt` is eigenvector candidate i), so each plane
/// rotation touches two contiguous rows instead of two strided columns.
/// On return d holds the eigenvalues (unordered).
fn tql2(d: &mut [f64], e: &mut [f64], vt: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Numerical(format!(
                    "eigensolver failed to converge at index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = pythag(g, 1.0);
            let sign_r = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (lo, hi) = vt.split_at_mut((i + 1) * n);
                let row_i = &mut lo[i * n..];
                let row_i1 = &mut hi[..n];
                for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                    f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eig(a: &Array2<f64>) -> Result<SymEig> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::InvalidParameter(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical(
            "eigendecomposition input has non-finite entries".into(),
        ));
    }
    let mut v: Vec<f64> = a.iter().copied().collect();
    let (mut d, mut e) = tred2(&mut v, n);

    // QL rotates fastest over matrix columns, so hand it the transpose and
    // flip back at the end; the two n^2 copies are noise next to the O(n^3)
    // reduction. Transposition changes storage only, never the arithmetic.
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            vt[i * n + k] = v[k * n + i];
        }
    }
    tql2(&mut d, &mut e, &mut vt)?;

    // Insertion sort ascending, dragging eigenvector rows along; stable so
    // repeated eigenvalues keep a deterministic order.
    for i in 1..n {
        let mut j = i;
        while j > 0 && d[j - 1] > d[j] {
            d.swap(j - 1, j);
            let (a, b) = vt.split_at_mut(j * n);
            a[(j - 1) * n..].swap_with_slice(&mut b[..n]);
            j -= 1;
        }
    }
    let vectors = Array2::from_shape_fn((n, n), |(k, i)| vt[i * n + k]);
    Ok(SymEig {
        values: d,
        vectors,
    })
}
