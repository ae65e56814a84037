//! Energy functionals, dissipation integrands, distances to the flat
//! equilibrium, the Lyapunov functional, and exponential decay fits.
//!
//! All integrals are midpoint sums over cells (`dx * sum`) and all gradient
//! integrals are sums over the `n - 1` interior faces, matching the flux
//! discretisation in [`crate::dynamics`].

use crate::dynamics::face_mobility;
use crate::error::{Error, Field, Result};
use crate::grid::{grad_l2_norm, mass_unchecked, Grid};
use crate::model::{Params, State};
use crate::smoother::HelmholtzOperator;

/// One row of the diagnostics time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub mass_f: f64,
    pub mass_g: f64,
    pub e1: f64,
    pub e2: f64,
    pub d1_rate: f64,
    pub d2_rate: f64,
    pub min_f: f64,
    pub min_g: f64,
    pub clamp_mass_cum: f64,
    pub dist2_f: f64,
    pub dist2_g: f64,
    pub grad_f_l2: f64,
    pub grad_g_l2: f64,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str = "time,mass_f,mass_g,e1,e2,d1_rate,d2_rate,min_f,min_g,clamp_mass_cum,dist2_f,dist2_g,grad_f_l2,grad_g_l2";

    pub fn compute(
        state: &State,
        params: &Params,
        grid: &Grid,
        eq: &EquilibriumPair,
        clamp_mass_cum: f64,
    ) -> Result<Self> {
        state.validate(grid)?;
        let dx = grid.dx();
        let (dist2_f, dist2_g) = dist2_to_equilibrium(state, eq, grid);
        Ok(Self {
            time: state.time,
            mass_f: mass_unchecked(&state.f, dx),
            mass_g: mass_unchecked(&state.g, dx),
            e1: energy_e1(state, params, grid)?,
            e2: energy_e2(state, params, grid),
            d1_rate: dissipation_d1(state, params, grid),
            d2_rate: dissipation_d2(state, params, grid),
            min_f: state.min_f(),
            min_g: state.min_g(),
            clamp_mass_cum,
            dist2_f,
            dist2_g,
            grad_f_l2: grad_l2_norm(&state.f, grid),
            grad_g_l2: grad_l2_norm(&state.g, grid),
        })
    }

    pub fn dist2(&self) -> f64 {
        self.dist2_f + self.dist2_g
    }

    pub fn values(&self) -> [f64; 14] {
        [
            self.time,
            self.mass_f,
            self.mass_g,
            self.e1,
            self.e2,
            self.d1_rate,
            self.d2_rate,
            self.min_f,
            self.min_g,
            self.clamp_mass_cum,
            self.dist2_f,
            self.dist2_g,
            self.grad_f_l2,
            self.grad_g_l2,
        ]
    }
}

/// `z ln z - z + 1`, continuous on `[0, inf)` with value 1 at 0.
#[inline]
pub fn entropy_density(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z * z.ln() - z + 1.0
    }
}

/// Relative entropy density `z ln(z / a) - z + a` with `0 ln 0 = 0`.
#[inline]
pub fn relative_entropy_density(z: f64, a: f64) -> f64 {
    if z == 0.0 {
        a
    } else {
        z * (z / a).ln() - z + a
    }
}

fn reject_negative(state: &State) -> Result<()> {
    for (field, u) in [(Field::F, &state.f), (Field::G, &state.g)] {
        if let Some(index) = u.iter().position(|&v| v < 0.0) {
            return Err(Error::Negative {
                field,
                index,
                value: u[index],
            });
        }
    }
    Ok(())
}

/// Entropy `E1 = int (f ln f - f + 1) + (R / R_mu)(g ln g - g + 1) dx`.
pub fn energy_e1(state: &State, params: &Params, grid: &Grid) -> Result<f64> {
    reject_negative(state)?;
    let w = params.r / params.r_mu;
    let s: f64 = state
        .f
        .iter()
        .zip(&state.g)
        .map(|(&f, &g)| entropy_density(f) + w * entropy_density(g))
        .sum();
    Ok(grid.dx() * s)
}

/// Quadratic energy `E2 = int f^2 + R (f + g)^2 dx`.
pub fn energy_e2(state: &State, params: &Params, grid: &Grid) -> f64 {
    let s: f64 = state
        .f
        .iter()
        .zip(&state.g)
        .map(|(&f, &g)| f * f + params.r * (f + g) * (f + g))
        .sum();
    grid.dx() * s
}

/// Dissipation integrand bounding the decay of `E1`:
/// `int 1/2 |f_x|^2 + R / (1 + 2R) |g_x|^2 dx`.
pub fn dissipation_d1(state: &State, params: &Params, grid: &Grid) -> f64 {
    let dx = grid.dx();
    let wg = params.r / (1.0 + 2.0 * params.r);
    let s: f64 = (0..state.f.len() - 1)
        .map(|i| {
            let fx = (state.f[i + 1] - state.f[i]) / dx;
            let gx = (state.g[i + 1] - state.g[i]) / dx;
            0.5 * fx * fx + wg * gx * gx
        })
        .sum();
    dx * s
}

/// Dissipation integrand of `E2`:
/// `int f ((1+R) f_x + R g_x)^2 + R R_mu g (f_x + g_x)^2 dx`, with face
/// mobilities.
pub fn dissipation_d2(state: &State, params: &Params, grid: &Grid) -> f64 {
    let dx = grid.dx();
    let (r, r_mu) = (params.r, params.r_mu);
    let s: f64 = (0..state.f.len() - 1)
        .map(|i| {
            let fx = (state.f[i + 1] - state.f[i]) / dx;
            let gx = (state.g[i + 1] - state.g[i]) / dx;
            let mf = face_mobility(state.f[i], state.f[i + 1]);
            let mg = face_mobility(state.g[i], state.g[i + 1]);
            let a = (1.0 + r) * fx + r * gx;
            let b = fx + gx;
            mf * a * a + r * r_mu * mg * b * b
        })
        .sum();
    dx * s
}

/// `(d1, d2, ||f_x||^2 + ||g_x||^2)` in one sweep; the time integrals are
/// accumulated every step, so this sits on the hot path.
pub(crate) fn rates(state: &State, params: &Params, grid: &Grid) -> (f64, f64, f64) {
    let inv_dx = 1.0 / grid.dx();
    let (r, r_mu) = (params.r, params.r_mu);
    let wg = r / (1.0 + 2.0 * r);
    let (f, g) = (&state.f, &state.g);
    let (mut d1, mut d2, mut grad) = (0.0, 0.0, 0.0);
    for i in 0..f.len() - 1 {
        let fx = (f[i + 1] - f[i]) * inv_dx;
        let gx = (g[i + 1] - g[i]) * inv_dx;
        let a = (1.0 + r) * fx + r * gx;
        let b = fx + gx;
        d1 += 0.5 * fx * fx + wg * gx * gx;
        d2 += face_mobility(f[i], f[i + 1]) * a * a + r * r_mu * face_mobility(g[i], g[i + 1]) * b * b;
        grad += fx * fx + gx * gx;
    }
    let dx = grid.dx();
    (dx * d1, dx * d2, dx * grad)
}

/// Flat state `(mass_f / L, mass_g / L)` selected by mass conservation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPair {
    pub f_flat: f64,
    pub g_flat: f64,
}

pub fn flat_equilibrium(state0: &State, grid: &Grid) -> EquilibriumPair {
    let dx = grid.dx();
    let l = grid.length();
    EquilibriumPair {
        f_flat: mass_unchecked(&state0.f, dx) / l,
        g_flat: mass_unchecked(&state0.g, dx) / l,
    }
}

/// Squared discrete L2 distances `(||f - A||^2, ||g - B||^2)`.
pub fn dist2_to_equilibrium(state: &State, eq: &EquilibriumPair, grid: &Grid) -> (f64, f64) {
    let sq = |u: &[f64], a: f64| grid.dx() * u.iter().map(|v| (v - a) * (v - a)).sum::<f64>();
    (sq(&state.f, eq.f_flat), sq(&state.g, eq.g_flat))
}

fn require_positive(eq: &EquilibriumPair) -> Result<()> {
    if !(eq.f_flat > 0.0) {
        return Err(Error::ZeroEquilibrium {
            field: Field::F,
            value: eq.f_flat,
        });
    }
    if !(eq.g_flat > 0.0) {
        return Err(Error::ZeroEquilibrium {
            field: Field::G,
            value: eq.g_flat,
        });
    }
    Ok(())
}

/// The two parts of the Lyapunov functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovParts {
    /// `int (f ln(f/A) - f + A) + (R/R_mu)(g ln(g/B) - g + B) dx`
    pub entropy: f64,
    /// `1/2 int (f-A)^2 + R[(f-A)^2 + (g-B)^2 + (g-B)(F-A) + (f-A)(G-B)] dx`
    pub quadratic: f64,
}

impl LyapunovParts {
    pub fn total(&self) -> f64 {
        self.entropy + self.quadratic
    }
}

/// Relative entropy plus quadratic distance to `eq`. `F, G` are the
/// smoothed fields when `op` is given and `f, g` themselves otherwise.
pub fn lyapunov_parts(
    state: &State,
    params: &Params,
    grid: &Grid,
    eq: &EquilibriumPair,
    op: Option<&HelmholtzOperator>,
) -> Result<LyapunovParts> {
    require_positive(eq)?;
    reject_negative(state)?;
    let (a, b) = (eq.f_flat, eq.g_flat);
    let (r, w) = (params.r, params.r / params.r_mu);
    let smoothed;
    let (big_f, big_g): (&[f64], &[f64]) = match op {
        Some(op) => {
            smoothed = (op.solve(&state.f)?, op.solve(&state.g)?);
            (&smoothed.0, &smoothed.1)
        }
        None => (&state.f, &state.g),
    };
    let mut entropy = 0.0;
    let mut quadratic = 0.0;
    for i in 0..state.f.len() {
        let (f, g) = (state.f[i], state.g[i]);
        entropy += relative_entropy_density(f, a) + w * relative_entropy_density(g, b);
        let (df, dg) = (f - a, g - b);
        quadratic += df * df + r * (df * df + dg * dg + dg * (big_f[i] - a) + df * (big_g[i] - b));
    }
    let dx = grid.dx();
    Ok(LyapunovParts {
        entropy: dx * entropy,
        quadratic: 0.5 * dx * quadratic,
    })
}

pub fn lyapunov_f(
    state: &State,
    params: &Params,
    grid: &Grid,
    eq: &EquilibriumPair,
    op: Option<&HelmholtzOperator>,
) -> Result<f64> {
    Ok(lyapunov_parts(state, params, grid, eq, op)?.total())
}

/// Constant in the comparison `dist2_f + dist2_g >= c * entropy part`:
/// `c = min(A, R_mu B / R)`.
pub fn entropy_distance_constant(params: &Params, eq: &EquilibriumPair) -> f64 {
    eq.f_flat.min(params.r_mu * eq.g_flat / params.r)
}

/// Which samples enter a decay fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayWindow {
    /// Samples with `dist2 <= floor` are round-off.
    pub floor: f64,
    /// Samples with `dist2 >= ceil` are still nonlinear.
    pub ceil: f64,
    /// Samples before this time are skipped.
    pub t_min: f64,
}

impl Default for DecayWindow {
    fn default() -> Self {
        Self {
            floor: 1e-20,
            ceil: 1e-2,
            t_min: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Rate in `dist2 ~ amplitude * exp(-omega t)`.
    pub omega: f64,
    pub amplitude: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
    pub samples: usize,
}

/// Least-squares line through `(t, ln(dist2_f + dist2_g))` over the samples
/// inside `window`.
pub fn fit_decay_rate(series: &[DiagnosticsRecord], window: &DecayWindow) -> Result<DecayFit> {
    let points: Vec<(f64, f64)> = series
        .iter()
        .filter(|r| r.time >= window.t_min)
        .map(|r| (r.time, r.dist2()))
        .filter(|&(_, d)| d > window.floor && d < window.ceil)
        .map(|(t, d)| (t, d.ln()))
        .collect();
    fit_log_linear(&points)
}

/// Least-squares fit of `y = c + slope * t`; returns `omega = -slope`.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<DecayFit> {
    const REQUIRED: usize = 3;
    if points.len() < REQUIRED {
        return Err(Error::InsufficientSamples {
            found: points.len(),
            required: REQUIRED,
        });
    }
    let n = points.len() as f64;
    let t_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for &(t, y) in points {
        let (dt, dy) = (t - t_mean, y - y_mean);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(Error::InsufficientSamples {
            found: 1,
            required: REQUIRED,
        });
    }
    let slope = sty / stt;
    let intercept = y_mean - slope * t_mean;
    let ss_res: f64 = points
        .iter()
        .map(|&(t, y)| {
            let e = y - (intercept + slope * t);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let t_lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayFit {
        omega: -slope,
        amplitude: intercept.exp(),
        window: (t_lo, t_hi),
        r_squared,
        samples: points.len(),
    })
}

/// Predicted decay rate of `dist2` for small perturbations of the flat
/// state `(A, B)`: linearising gives `d_t (df, dg) = M d_xx (df, dg)` with
/// `M = [[(1+R)A, RA], [R_mu B, R_mu B]]`, and the slowest Neumann mode
/// decays like `exp(-2 lambda_min(M) k1^2 t)` in squared norm, where `k1^2`
/// is the discrete first eigenvalue of the mirrored Laplacian.
pub fn linearized_decay_rate(params: &Params, eq: &EquilibriumPair, grid: &Grid) -> Result<f64> {
    require_positive(eq)?;
    let lambda = smallest_mobility_eigenvalue(params, eq);
    Ok(2.0 * lambda * grid.neumann_eigenvalue(1))
}

/// Smaller eigenvalue of `M`, via trace and determinant.
pub fn smallest_mobility_eigenvalue(params: &Params, eq: &EquilibriumPair) -> f64 {
    let (a, b, r, r_mu) = (eq.f_flat, eq.g_flat, params.r, params.r_mu);
    let m11 = (1.0 + r) * a;
    let m22 = r_mu * b;
    let trace = m11 + m22;
    // det = (1+R) A R_mu B - R A R_mu B = A R_mu B
    let det = a * r_mu * b;
    let disc = (trace * trace - 4.0 * det).max(0.0);
    // Stable form of (trace - sqrt(disc)) / 2.
    2.0 * det / (trace + disc.sqrt())
}
