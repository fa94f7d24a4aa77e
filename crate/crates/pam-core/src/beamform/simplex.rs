//! Dense revised simplex for small equality-form linear programs.
//!
//! Solves max c'x subject to Ax = b, x >= 0 from a caller-supplied feasible
//! starting basis. The basis inverse is kept explicitly and updated in
//! product form, with periodic refactorization to shed accumulated error.
//! Pricing uses Dantzig's rule with a lexicographic ratio-test tie-break,
//! which walks degenerate vertices in a few thousand pivots where plain
//! index tie-breaking crawls for tens of thousands and drifts into
//! ill-conditioned bases. A Bland's-rule fallback engages after a long run
//! of non-improving pivots and disengages on the next strict improvement;
//! Bland phases cannot cycle and the objective never decreases, so the
//! combination terminates.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};

/// Reduced costs below this are treated as non-improving.
const PRICE_TOL: f64 = 1e-9;
/// Direction entries below this cannot serve as pivots.
const PIVOT_TOL: f64 = 1e-11;
/// Consecutive non-improving pivots before the Bland fallback engages. Set
/// well above the longest degenerate plateau the lexicographic rule has been
/// observed to need, so the fallback only fires on genuine cycling.
const STALL_LIMIT: usize = 5_000;
/// Pivots between basis refactorizations.
const REFRESH_EVERY: usize = 256;

/// Equality-form LP: columns of `cols` are the constraint columns of the
/// variables, `b` the right-hand side, `c` the objective (maximized).
pub struct SimplexProblem<'a> {
    pub cols: &'a Array2<f64>,
    pub b: &'a Array1<f64>,
    pub c: &'a Array1<f64>,
}

/// Feasible starting basis: variable indices plus the inverse of the matrix
/// formed by their columns. `binv.dot(b)` must be nonnegative.
pub struct WarmBasis {
    pub basis: Vec<usize>,
    pub binv: Array2<f64>,
}

pub struct LpSolution {
    pub objective: f64,
    /// Simplex multipliers c_B' B^-1; one entry per constraint row.
    pub y: Array1<f64>,
    /// Full primal solution, zero on nonbasic variables.
    pub x: Array1<f64>,
    pub iterations: usize,
}

pub enum LpOutcome {
    Optimal(LpSolution),
    /// An improving direction with no blocking constraint; the objective is
    /// unbounded above. Carries the entering variable index.
    Unbounded { entering: usize },
}

pub fn solve_max(p: &SimplexProblem, start: WarmBasis) -> Result<LpOutcome> {
    let (m, n) = p.cols.dim();
    if p.b.len() != m || p.c.len() != n {
        return Err(Error::InvalidParameter(format!(
            "simplex shape mismatch: cols {m}x{n}, b {}, c {}",
            p.b.len(),
            p.c.len()
        )));
    }
    if start.basis.len() != m || start.binv.dim() != (m, m) {
        return Err(Error::InvalidParameter(
            "simplex starting basis must have one column per constraint row".into(),
        ));
    }
    if start.basis.iter().any(|&j| j >= n) {
        return Err(Error::InvalidParameter(
            "simplex starting basis indexes a nonexistent column".into(),
        ));
    }

    let mut basis = start.basis;
    let mut in_basis = vec![false; n];
    for &j in &basis {
        in_basis[j] = true;
    }

    // The pivot loop runs tens of thousands of times per solve on hard
    // instances, so everything it touches lives in flat row-major buffers:
    // `at` holds the constraint matrix transposed (one variable per row,
    // making the pricing dots contiguous) and `binv` the basis inverse.
    let at_owned = p.cols.t().as_standard_layout().to_owned();
    let at = at_owned.as_slice().expect("standard layout");
    let b: Vec<f64> = p.b.iter().copied().collect();
    let c: Vec<f64> = p.c.iter().copied().collect();
    let mut binv: Vec<f64> = start.binv.iter().copied().collect();

    let mut xb = vec![0.0; m];
    let mut y = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot_row = vec![0.0; m];

    let feas_tol = 1e-7 * (1.0 + b.iter().fold(0.0f64, |a, v| a.max(v.abs())));
    let max_iters = 20 * n + 50_000;
    let mut bland = false;
    let mut stall = 0usize;
    let mut prev_obj = f64::NEG_INFINITY;

    for iter in 0..max_iters {
        if iter > 0 && iter % REFRESH_EVERY == 0 {
            refactorize(at, &basis, &mut binv)?;
        }

        for (i, v) in xb.iter_mut().enumerate() {
            *v = dot(&binv[i * m..(i + 1) * m], &b);
        }
        if xb.iter().any(|&v| v < -feas_tol) {
            return Err(Error::Numerical(
                "simplex lost basic feasibility; problem is poorly scaled".into(),
            ));
        }
        // y = c_B' B^-1 and the objective; both skip zero-cost basic
        // variables, which are the vast majority in the intended problems.
        let mut obj = 0.0;
        y.fill(0.0);
        for (i, &j) in basis.iter().enumerate() {
            let ci = c[j];
            if ci != 0.0 {
                obj += ci * xb[i];
                let row = &binv[i * m..(i + 1) * m];
                for (yk, &rk) in y.iter_mut().zip(row) {
                    *yk += ci * rk;
                }
            }
        }

        // Pricing over nonbasic columns: Dantzig takes the best reduced
        // cost, the Bland fallback the first improving index.
        let mut entering = None;
        let mut best = PRICE_TOL;
        for (j, col) in at.chunks_exact(m).enumerate() {
            if in_basis[j] {
                continue;
            }
            let r = c[j] - dot(&y, col);
            if r > best {
                best = r;
                entering = Some(j);
                if bland {
                    break;
                }
            }
        }
        let Some(enter) = entering else {
            let mut x = Array1::zeros(n);
            for (i, &j) in basis.iter().enumerate() {
                x[j] = xb[i].max(0.0);
            }
            return Ok(LpOutcome::Optimal(LpSolution {
                objective: obj,
                y: Array1::from(y),
                x,
                iterations: iter,
            }));
        };

        let col_e = &at[enter * m..(enter + 1) * m];
        for (i, v) in d.iter_mut().enumerate() {
            *v = dot(&binv[i * m..(i + 1) * m], col_e);
        }
        let mut theta = f64::INFINITY;
        for i in 0..m {
            if d[i] > PIVOT_TOL {
                theta = theta.min(xb[i].max(0.0) / d[i]);
            }
        }
        if !theta.is_finite() {
            return Ok(LpOutcome::Unbounded { entering: enter });
        }
        let mut tied: Vec<usize> = (0..m)
            .filter(|&i| d[i] > PIVOT_TOL && xb[i].max(0.0) / d[i] < theta + PIVOT_TOL)
            .collect();
        let leave = if tied.len() == 1 {
            tied[0]
        } else if bland {
            // Smallest basis index preserves Bland's anti-cycling guarantee.
            tied.into_iter().min_by_key(|&i| basis[i]).expect("nonempty")
        } else {
            // Lexicographic rule: scan inverse columns (last one first, an
            // order under which identity-like warm bases and warm bases
            // whose trailing row leads with negative entries both stay
            // lexicographically positive), keeping the rows that attain the
            // column minimum until one remains. Keeps degenerate walks out
            // of ill-conditioned bases.
            let mut inv_d: Vec<f64> = tied.iter().map(|&i| 1.0 / d[i]).collect();
            let mut scaled = vec![0.0; tied.len()];
            for k in std::iter::once(m - 1).chain(0..m - 1) {
                if tied.len() == 1 {
                    break;
                }
                let mut low = f64::INFINITY;
                for (t, &i) in tied.iter().enumerate() {
                    scaled[t] = binv[i * m + k] * inv_d[t];
                    low = low.min(scaled[t]);
                }
                let keep_tol = 1e-12 * (1.0 + low.abs());
                let mut w = 0;
                for t in 0..tied.len() {
                    if scaled[t] <= low + keep_tol {
                        tied[w] = tied[t];
                        inv_d[w] = inv_d[t];
                        w += 1;
                    }
                }
                tied.truncate(w);
                inv_d.truncate(w);
                scaled.truncate(w);
            }
            tied[0]
        };

        // Product-form update of the basis inverse.
        let pivot = d[leave];
        let src = &binv[leave * m..(leave + 1) * m];
        for (pv, &sv) in pivot_row.iter_mut().zip(src) {
            *pv = sv / pivot;
        }
        for i in 0..m {
            if i == leave {
                continue;
            }
            let factor = d[i];
            if factor != 0.0 {
                let row = &mut binv[i * m..(i + 1) * m];
                for (rv, &pv) in row.iter_mut().zip(&pivot_row) {
                    *rv -= factor * pv;
                }
            }
        }
        binv[leave * m..(leave + 1) * m].copy_from_slice(&pivot_row);
        in_basis[basis[leave]] = false;
        in_basis[enter] = true;
        basis[leave] = enter;

        if obj > prev_obj + 1e-13 * (1.0 + prev_obj.abs()) {
            stall = 0;
            bland = false;
        } else {
            stall += 1;
            if stall > STALL_LIMIT {
                bland = true;
            }
        }
        prev_obj = obj;
    }
    Err(Error::Numerical(format!(
        "simplex hit the iteration cap ({max_iters}) without converging"
    )))
}

/// Four-accumulator dot product: a fixed deterministic summation order that
/// the compiler can vectorize without reassociating on its own.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut ia = a.chunks_exact(4);
    let mut ib = b.chunks_exact(4);
    for (ca, cb) in (&mut ia).zip(&mut ib) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in ia.remainder().iter().zip(ib.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Rebuilds the basis inverse in place by Gauss-Jordan elimination with
/// partial pivoting. `at` is the flat transposed constraint matrix (one
/// variable per row of length `binv.len().sqrt()`).
fn refactorize(at: &[f64], basis: &[usize], binv: &mut [f64]) -> Result<()> {
    let m = basis.len();
    let mut a = vec![0.0; m * m];
    for (k, &j) in basis.iter().enumerate() {
        let col = &at[j * m..(j + 1) * m];
        for i in 0..m {
            a[i * m + k] = col[i];
        }
    }
    binv.fill(0.0);
    for i in 0..m {
        binv[i * m + i] = 1.0;
    }
    for col in 0..m {
        let mut pivot_row = col;
        let mut pivot_val = a[col * m + col].abs();
        for r in col + 1..m {
            if a[r * m + col].abs() > pivot_val {
                pivot_val = a[r * m + col].abs();
                pivot_row = r;
            }
        }
        if pivot_val <= PIVOT_TOL {
            return Err(Error::Numerical(
                "simplex basis became numerically singular during refactorization".into(),
            ));
        }
        if pivot_row != col {
            for k in 0..m {
                a.swap(col * m + k, pivot_row * m + k);
                binv.swap(col * m + k, pivot_row * m + k);
            }
        }
        let p = a[col * m + col];
        for k in 0..m {
            a[col * m + k] /= p;
            binv[col * m + k] /= p;
        }
        for r in 0..m {
            if r == col {
                continue;
            }
            let f = a[r * m + col];
            if f != 0.0 {
                for k in 0..m {
                    a[r * m + k] -= f * a[col * m + k];
                    binv[r * m + k] -= f * binv[col * m + k];
                }
            }
        }
    }
    Ok(())
}
