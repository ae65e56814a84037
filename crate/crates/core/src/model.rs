//! Physical parameters and the two-layer state.

use crate::error::{Error, Field, Result};
use crate::grid::{check_finite, Grid};

/// Absolute tolerance for the lower-barrier checks `f, g >= epsilon`.
pub const TOL_BARRIER: f64 = 1e-10;

/// Density ratio `R`, mobility ratio `R_mu`, and the regularisation
/// parameter `epsilon` (zero selects the degenerate system).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub r: f64,
    pub r_mu: f64,
    pub epsilon: f64,
}

impl Params {
    pub fn new(r: f64, r_mu: f64, epsilon: f64) -> Result<Self> {
        let p = Self { r, r_mu, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn degenerate(r: f64, r_mu: f64) -> Result<Self> {
        Self::new(r, r_mu, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::InvalidParameter {
                name: "R",
                value: self.r,
                reason: "must be finite and > 0",
            });
        }
        if !(self.r_mu.is_finite() && self.r_mu > 0.0) {
            return Err(Error::InvalidParameter {
                name: "R_mu",
                value: self.r_mu,
                reason: "must be finite and > 0",
            });
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
                reason: "must lie in [0, 1)",
            });
        }
        Ok(())
    }

    pub fn is_regularized(&self) -> bool {
        self.epsilon > 0.0
    }
}

/// Cell averages of the lower-layer height `f` and the upper-layer
/// thickness `g = h - f` at one instant. `h` is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub time: f64,
}

impl State {
    pub fn new(f: Vec<f64>, g: Vec<f64>, time: f64) -> Self {
        Self { f, g, time }
    }

    pub fn flat(grid: &Grid, f: f64, g: f64) -> Self {
        let n = grid.n_cells();
        Self::new(vec![f; n], vec![g; n], 0.0)
    }

    /// Upper interface height `h = f + g`.
    pub fn h(&self) -> Vec<f64> {
        self.f.iter().zip(&self.g).map(|(a, b)| a + b).collect()
    }

    /// Lengths match the grid, entries finite, and `f, g >= -TOL_BARRIER`.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        for (field, u) in [(Field::F, &self.f), (Field::G, &self.g)] {
            grid.check_len(u)?;
            check_finite(u)?;
            if let Some(index) = u.iter().position(|&v| v < -TOL_BARRIER) {
                return Err(Error::Negative {
                    field,
                    index,
                    value: u[index],
                });
            }
        }
        if !(self.time.is_finite() && self.time >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "time",
                value: self.time,
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    /// Checks `f, g >= barrier - tol` everywhere.
    pub fn check_barrier(&self, barrier: f64, tol: f64) -> Result<()> {
        for (field, u) in [(Field::F, &self.f), (Field::G, &self.g)] {
            if let Some(index) = u.iter().position(|&v| v < barrier - tol) {
                return Err(Error::BarrierViolation {
                    field,
                    index,
                    value: u[index],
                    barrier,
                });
            }
        }
        Ok(())
    }

    pub fn min_f(&self) -> f64 {
        self.f.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_g(&self) -> f64 {
        self.g.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Same state with the roles of `f` and `g` exchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.g.clone(), self.f.clone(), self.time)
    }

    /// Mirror image about the domain midpoint.
    pub fn reflected(&self) -> Self {
        let rev = |u: &[f64]| u.iter().rev().copied().collect::<Vec<_>>();
        Self::new(rev(&self.f), rev(&self.g), self.time)
    }
}
