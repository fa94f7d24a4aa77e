//! Sample covariance of the delayed signals: R = dt * sum_t s(t) s(t)^T.

use super::stack::DelayedStack;
use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array2};

/// Channel covariance for one pixel. Symmetric by construction (the two
/// triangles are averaged to identical bits) and positive semidefinite up
/// to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    pub r: Array2<f64>,
}

impl CovMatrix {
    pub fn n(&self) -> usize {
        self.r.nrows()
    }
}

/// Accumulates R = dt * sum_t s(t) s(t)^T over the stack's window. Columns
/// past `stack.valid` are identically zero, so the reduction stops there
/// without changing the result.
pub fn sample_covariance(stack: &DelayedStack) -> CovMatrix {
    let n = stack.n_channels();
    let mut r = Array2::zeros((n, n));
    if stack.valid > 0 {
        let sig = stack.s.slice(s![.., ..stack.valid]);
        general_mat_mul(stack.dt, &sig, &sig.t(), 0.0, &mut r);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (r[[i, j]] + r[[j, i]]);
            r[[i, j]] = v;
            r[[j, i]] = v;
        }
    }
    CovMatrix { r }
}
