//! Discrete `(1 - eps^2 d_xx)^{-1}` with homogeneous Neumann conditions.
//!
//! The second difference uses mirrored ghost cells, so the matrix
//! `I - eps^2 D2` is symmetric, strictly diagonally dominant, and has unit
//! row (and column) sums. Constants are fixed points and the solve preserves
//! `dx * sum(u)`. The Thomas factorisation is computed once per
//! `(grid, eps)` and reused by every solve.

use crate::error::{Error, Field, Result};
use crate::grid::{check_finite, Grid};
use crate::model::{Params, State};

#[derive(Debug, Clone)]
pub struct HelmholtzOperator {
    grid: Grid,
    epsilon: f64,
    /// `eps^2 / dx^2`, the magnitude of the off-diagonals.
    coupling: f64,
    /// Modified super-diagonal of the forward sweep.
    upper: Vec<f64>,
    /// Reciprocal pivots of the forward sweep.
    inv_pivot: Vec<f64>,
}

impl HelmholtzOperator {
    pub fn new(grid: &Grid, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon,
                reason: "smoothing needs epsilon > 0",
            });
        }
        let n = grid.n_cells();
        let k = epsilon * epsilon / (grid.dx() * grid.dx());
        let off = -k;
        let mut upper = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        for i in 0..n {
            let diag = if i == 0 || i + 1 == n {
                1.0 + k
            } else {
                1.0 + 2.0 * k
            };
            let pivot = if i == 0 {
                diag
            } else {
                diag - off * upper[i - 1]
            };
            inv_pivot[i] = 1.0 / pivot;
            upper[i] = if i + 1 < n { off / pivot } else { 0.0 };
        }
        Ok(Self {
            grid: grid.clone(),
            epsilon,
            coupling: k,
            upper,
            inv_pivot,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `(diagonal, off_diagonal)` of row `i`.
    pub fn row(&self, i: usize) -> (f64, f64) {
        let n = self.grid.n_cells();
        let diag = if i == 0 || i + 1 == n {
            1.0 + self.coupling
        } else {
            1.0 + 2.0 * self.coupling
        };
        (diag, -self.coupling)
    }

    /// Applies `I - eps^2 D2` (the forward operator).
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let k = self.coupling;
        (0..n)
            .map(|i| {
                let left = if i == 0 { u[0] } else { u[i - 1] };
                let right = if i + 1 == n { u[n - 1] } else { u[i + 1] };
                u[i] - k * (right - 2.0 * u[i] + left)
            })
            .collect()
    }

    /// Solves `(I - eps^2 D2) U = u`.
    pub fn solve(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(u)?;
        check_finite(u)?;
        let mut out = vec![0.0; u.len()];
        self.solve_into(u, &mut out);
        Ok(out)
    }

    /// Unchecked solve into a caller-owned buffer.
    pub(crate) fn solve_into(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        debug_assert_eq!(n, self.inv_pivot.len());
        let off = -self.coupling;
        out[0] = u[0] * self.inv_pivot[0];
        for i in 1..n {
            out[i] = (u[i] - off * out[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            out[i] -= self.upper[i] * out[i + 1];
        }
    }
}

/// Convenience wrapper around [`HelmholtzOperator::solve`].
pub fn helmholtz_solve(op: &HelmholtzOperator, u: &[f64]) -> Result<Vec<f64>> {
    op.solve(u)
}

/// Regularised initial data `f = S f0 + eps`, `g = S g0 + eps` at `t = 0`,
/// where `S` is the smoother. With `eps = 0` the data are passed through.
pub fn regularize_initial_data(f0: &[f64], g0: &[f64], params: &Params, grid: &Grid) -> Result<State> {
    for (field, u) in [(Field::F, f0), (Field::G, g0)] {
        grid.check_len(u)?;
        check_finite(u)?;
        if let Some(index) = u.iter().position(|&v| v < 0.0) {
            return Err(Error::Negative {
                field,
                index,
                value: u[index],
            });
        }
    }
    let eps = params.epsilon;
    if eps == 0.0 {
        return Ok(State::new(f0.to_vec(), g0.to_vec(), 0.0));
    }
    let op = HelmholtzOperator::new(grid, eps)?;
    let lift = |u: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        op.solve_into(u, &mut out);
        out.iter_mut().for_each(|v| *v += eps);
        out
    };
    Ok(State::new(lift(f0), lift(g0), 0.0))
}
