//! Conservative finite-volume right-hand sides and the explicit stepper.
//!
//! Every right-hand side has the form `du_i = (Phi_{i+1/2} - Phi_{i-1/2}) / dx`
//! with zero flux through both boundary faces, so `dx * sum(du)` telescopes
//! to zero and the scheme conserves both masses up to round-off.

use crate::error::{Error, Field, Result};
use crate::grid::{mass_unchecked, Grid};
use crate::model::{Params, State};
use crate::smoother::HelmholtzOperator;

/// Which system is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// The degenerate system in `(f, g)` variables.
    Degenerate,
    /// The smoothed, lifted system with `epsilon > 0`.
    Regularized,
    /// `f` frozen at zero; `g` solves the porous medium equation.
    PmeG,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Degenerate => "degenerate",
            Mode::Regularized => "regularized",
            Mode::PmeG => "pme_g",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "degenerate" => Ok(Mode::Degenerate),
            "regularized" => Ok(Mode::Regularized),
            "pme_g" => Ok(Mode::PmeG),
            other => Err(format!(
                "unknown mode '{other}' (expected degenerate, regularized or pme_g)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeControls {
    pub cfl_safety: f64,
    pub dt_max: f64,
    /// Undershoots above `-clamp_tol * max(1, max u)` are zeroed.
    pub clamp_tol: f64,
    /// Largest clamped mass per step, relative to the field's mass.
    pub clamp_abort_fraction: f64,
}

impl Default for SchemeControls {
    fn default() -> Self {
        Self {
            cfl_safety: 0.4,
            dt_max: 1e-2,
            clamp_tol: 1e-12,
            clamp_abort_fraction: 1e-8,
        }
    }
}

impl SchemeControls {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, reason| Err(Error::InvalidParameter { name, value, reason });
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return bad("controls.cfl_safety", self.cfl_safety, "must lie in (0, 1]");
        }
        if !(self.dt_max.is_finite() && self.dt_max > 0.0) {
            return bad("controls.dt_max", self.dt_max, "must be finite and > 0");
        }
        if !(self.clamp_tol.is_finite() && self.clamp_tol >= 0.0) {
            return bad("controls.clamp_tol", self.clamp_tol, "must be finite and >= 0");
        }
        if !(self.clamp_abort_fraction.is_finite() && self.clamp_abort_fraction >= 0.0) {
            return bad(
                "controls.clamp_abort_fraction",
                self.clamp_abort_fraction,
                "must be finite and >= 0",
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub state: State,
    pub dt_used: f64,
    /// Mass added to `f` and `g` together by clamping in this step.
    pub clamp_mass_step: f64,
}

/// Arithmetic mean of the two neighbouring values, clipped at zero.
#[inline]
pub fn face_mobility(u_left: f64, u_right: f64) -> f64 {
    (0.5 * (u_left + u_right)).max(0.0)
}

/// Coefficients of one equation of the degenerate system:
/// `du/dt = d_x(u (a d_x u + b d_x v))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxCoefficients {
    pub self_coef: f64,
    pub cross_coef: f64,
}

impl FluxCoefficients {
    pub fn for_f(params: &Params) -> Self {
        Self {
            self_coef: 1.0 + params.r,
            cross_coef: params.r,
        }
    }

    pub fn for_g(params: &Params) -> Self {
        Self {
            self_coef: params.r_mu,
            cross_coef: params.r_mu,
        }
    }
}

/// Flux kernel shared by the degenerate and PME modes:
/// `Phi = m(u) (a du + b dv) / dx` on interior faces, zero on the boundary.
fn degenerate_divergence(u: &[f64], v: &[f64], c: FluxCoefficients, dx: f64, out: &mut [f64]) {
    let n = u.len();
    let inv_dx2 = 1.0 / (dx * dx);
    let mut flux_left = 0.0;
    for i in 0..n - 1 {
        let m = face_mobility(u[i], u[i + 1]);
        let flux_right = m * (c.self_coef * (u[i + 1] - u[i]) + c.cross_coef * (v[i + 1] - v[i]));
        out[i] = (flux_right - flux_left) * inv_dx2;
        flux_left = flux_right;
    }
    out[n - 1] = -flux_left * inv_dx2;
}

/// Regularised kernel:
/// `Phi = a m(u) du / dx + b m(u - eps) dV / dx`, with `V` the smoothed partner.
fn regularized_divergence(
    u: &[f64],
    smooth_v: &[f64],
    c: FluxCoefficients,
    eps: f64,
    dx: f64,
    out: &mut [f64],
) {
    let n = u.len();
    let inv_dx2 = 1.0 / (dx * dx);
    let mut flux_left = 0.0;
    for i in 0..n - 1 {
        let m_self = face_mobility(u[i], u[i + 1]);
        let m_cross = face_mobility(u[i] - eps, u[i + 1] - eps);
        let flux_right =
            c.self_coef * m_self * (u[i + 1] - u[i]) + c.cross_coef * m_cross * (smooth_v[i + 1] - smooth_v[i]);
        out[i] = (flux_right - flux_left) * inv_dx2;
        flux_left = flux_right;
    }
    out[n - 1] = -flux_left * inv_dx2;
}

/// Right-hand side of a single degenerate equation with mobility and
/// primary unknown `u`, partner `v`, and coefficients `c`.
pub fn equation_rhs(u: &[f64], v: &[f64], c: FluxCoefficients, grid: &Grid) -> Result<Vec<f64>> {
    grid.check_len(u)?;
    grid.check_len(v)?;
    let mut out = vec![0.0; u.len()];
    degenerate_divergence(u, v, c, grid.dx(), &mut out);
    Ok(out)
}

/// `(df, dg)` for the degenerate system. `params.epsilon` is ignored.
pub fn rhs_degenerate(state: &State, params: &Params, grid: &Grid) -> Result<(Vec<f64>, Vec<f64>)> {
    state.validate(grid)?;
    let n = grid.n_cells();
    let (mut df, mut dg) = (vec![0.0; n], vec![0.0; n]);
    degenerate_divergence(&state.f, &state.g, FluxCoefficients::for_f(params), grid.dx(), &mut df);
    degenerate_divergence(&state.g, &state.f, FluxCoefficients::for_g(params), grid.dx(), &mut dg);
    Ok((df, dg))
}

/// `(df, dg)` for the regularised system with smoother `op`.
pub fn rhs_regularized(
    state: &State,
    params: &Params,
    grid: &Grid,
    op: &HelmholtzOperator,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if params.epsilon <= 0.0 {
        return Err(Error::ModeMismatch {
            mode: "regularized",
            requirement: "epsilon > 0 (use rhs_degenerate for epsilon = 0)",
        });
    }
    check_operator(op, params, grid)?;
    state.validate(grid)?;
    let n = grid.n_cells();
    let (mut smooth_f, mut smooth_g) = (vec![0.0; n], vec![0.0; n]);
    op.solve_into(&state.f, &mut smooth_f);
    op.solve_into(&state.g, &mut smooth_g);
    let (mut df, mut dg) = (vec![0.0; n], vec![0.0; n]);
    let eps = params.epsilon;
    regularized_divergence(&state.f, &smooth_g, FluxCoefficients::for_f(params), eps, grid.dx(), &mut df);
    regularized_divergence(&state.g, &smooth_f, FluxCoefficients::for_g(params), eps, grid.dx(), &mut dg);
    Ok((df, dg))
}

fn check_operator(op: &HelmholtzOperator, params: &Params, grid: &Grid) -> Result<()> {
    if op.epsilon() != params.epsilon || op.grid() != grid {
        return Err(Error::ModeMismatch {
            mode: "regularized",
            requirement: "a smoother built for the same grid and epsilon",
        });
    }
    Ok(())
}

/// Largest total diffusion coefficient over faces and both equations.
fn max_diffusivity(f: &[f64], g: &[f64], params: &Params) -> f64 {
    let cf = 1.0 + 2.0 * params.r;
    let cg = 2.0 * params.r_mu;
    let mut mu = 0.0_f64;
    for i in 0..f.len() - 1 {
        mu = mu
            .max(cf * face_mobility(f[i], f[i + 1]))
            .max(cg * face_mobility(g[i], g[i + 1]));
    }
    mu
}

/// `min(dt_max, cfl_safety dx^2 / (2 mu_max))`, or `dt_max` when every
/// mobility vanishes.
pub fn stable_dt(state: &State, params: &Params, grid: &Grid, controls: &SchemeControls) -> f64 {
    let mu = max_diffusivity(&state.f, &state.g, params);
    if mu <= 0.0 {
        return controls.dt_max;
    }
    let dx = grid.dx();
    controls.dt_max.min(controls.cfl_safety * dx * dx / (2.0 * mu))
}

/// Outcome of one in-place step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    pub dt_used: f64,
    pub clamp_mass_f: f64,
    pub clamp_mass_g: f64,
}

/// Reusable stepper that owns the scratch buffers and, in regularised mode,
/// the cached smoother. One stepper drives one trajectory.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    params: Params,
    controls: SchemeControls,
    mode: Mode,
    op: Option<HelmholtzOperator>,
    df: Vec<f64>,
    dg: Vec<f64>,
    smooth_f: Vec<f64>,
    smooth_g: Vec<f64>,
    zeros: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &Grid, params: &Params, controls: &SchemeControls, mode: Mode) -> Result<Self> {
        let op = match mode {
            Mode::Regularized => Some(HelmholtzOperator::new(grid, params.epsilon)?),
            _ => None,
        };
        Self::build(grid, params, controls, mode, op)
    }

    pub fn with_operator(
        grid: &Grid,
        params: &Params,
        controls: &SchemeControls,
        op: HelmholtzOperator,
    ) -> Result<Self> {
        check_operator(&op, params, grid)?;
        Self::build(grid, params, controls, Mode::Regularized, Some(op))
    }

    fn build(
        grid: &Grid,
        params: &Params,
        controls: &SchemeControls,
        mode: Mode,
        op: Option<HelmholtzOperator>,
    ) -> Result<Self> {
        params.validate()?;
        controls.validate()?;
        match mode {
            Mode::Regularized if params.epsilon <= 0.0 => {
                return Err(Error::ModeMismatch {
                    mode: "regularized",
                    requirement: "epsilon > 0",
                })
            }
            Mode::Degenerate | Mode::PmeG if params.epsilon != 0.0 => {
                return Err(Error::ModeMismatch {
                    mode: mode.name(),
                    requirement: "epsilon = 0",
                })
            }
            _ => {}
        }
        let n = grid.n_cells();
        Ok(Self {
            grid: grid.clone(),
            params: *params,
            controls: *controls,
            mode,
            op,
            df: vec![0.0; n],
            dg: vec![0.0; n],
            smooth_f: vec![0.0; n],
            smooth_g: vec![0.0; n],
            zeros: vec![0.0; n],
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn operator(&self) -> Option<&HelmholtzOperator> {
        self.op.as_ref()
    }

    pub fn stable_dt(&self, state: &State) -> f64 {
        stable_dt(state, &self.params, &self.grid, &self.controls)
    }

    /// Advances `state` by one forward-Euler step of length
    /// `min(stable_dt, dt_cap)`. When the cap is binding the new time is set
    /// to `old + dt_cap` exactly as requested by the caller's schedule.
    pub fn advance(&mut self, state: &mut State, dt_cap: f64) -> Result<StepInfo> {
        if self.mode == Mode::PmeG && state.f.iter().any(|&v| v != 0.0) {
            return Err(Error::ModeMismatch {
                mode: "pme_g",
                requirement: "f identically zero",
            });
        }
        let dt = self.stable_dt(state).min(dt_cap);
        let dx = self.grid.dx();

        match self.mode {
            Mode::Degenerate => {
                degenerate_divergence(&state.f, &state.g, FluxCoefficients::for_f(&self.params), dx, &mut self.df);
                degenerate_divergence(&state.g, &state.f, FluxCoefficients::for_g(&self.params), dx, &mut self.dg);
            }
            Mode::PmeG => {
                self.df.iter_mut().for_each(|v| *v = 0.0);
                degenerate_divergence(&state.g, &self.zeros, FluxCoefficients::for_g(&self.params), dx, &mut self.dg);
            }
            Mode::Regularized => {
                let op = self.op.as_ref().expect("regularized stepper owns a smoother");
                let eps = self.params.epsilon;
                op.solve_into(&state.f, &mut self.smooth_f);
                op.solve_into(&state.g, &mut self.smooth_g);
                regularized_divergence(&state.f, &self.smooth_g, FluxCoefficients::for_f(&self.params), eps, dx, &mut self.df);
                regularized_divergence(&state.g, &self.smooth_f, FluxCoefficients::for_g(&self.params), eps, dx, &mut self.dg);
            }
        }

        let new_time = state.time + dt;
        for (u, du) in state.f.iter_mut().zip(&self.df) {
            *u += dt * du;
        }
        for (u, du) in state.g.iter_mut().zip(&self.dg) {
            *u += dt * du;
        }
        let clamp_mass_f = clamp(&mut state.f, Field::F, new_time, dx, &self.controls)?;
        let clamp_mass_g = clamp(&mut state.g, Field::G, new_time, dx, &self.controls)?;
        state.time = new_time;
        Ok(StepInfo {
            dt_used: dt,
            clamp_mass_f,
            clamp_mass_g,
        })
    }
}

/// Zeroes truncation-level undershoots and returns the mass added. The
/// budget is relative to the (conserved) mass of the field.
fn clamp(u: &mut [f64], field: Field, time: f64, dx: f64, controls: &SchemeControls) -> Result<f64> {
    let (mut lo, mut scale, mut finite) = (f64::INFINITY, 1.0_f64, true);
    for &v in u.iter() {
        lo = lo.min(v);
        scale = scale.max(v);
        finite &= v.is_finite();
    }
    if finite && lo >= 0.0 {
        return Ok(0.0);
    }
    let threshold = -controls.clamp_tol * scale;
    let mut added = 0.0;
    for (index, v) in u.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < threshold || !v.is_finite() {
                return Err(Error::PositivityFailure {
                    time,
                    field,
                    index,
                    value: *v,
                });
            }
            added -= *v * dx;
            *v = 0.0;
        } else if !v.is_finite() {
            return Err(Error::PositivityFailure {
                time,
                field,
                index,
                value: *v,
            });
        }
    }
    if added == 0.0 {
        return Ok(0.0);
    }
    let budget = controls.clamp_abort_fraction * mass_unchecked(u, dx);
    if added > budget {
        return Err(Error::ClampBudgetExceeded {
            time,
            field,
            clamped: added,
            budget,
        });
    }
    Ok(added)
}

/// One forward-Euler step at the stable time step.
///
/// In regularised mode `op` may be supplied to reuse a cached factorisation;
/// otherwise one is built for this call.
pub fn step(
    state: &State,
    params: &Params,
    grid: &Grid,
    controls: &SchemeControls,
    mode: Mode,
    op: Option<&HelmholtzOperator>,
) -> Result<StepResult> {
    state.validate(grid)?;
    let mut stepper = match (mode, op) {
        (Mode::Regularized, Some(op)) => Stepper::with_operator(grid, params, controls, op.clone())?,
        _ => Stepper::new(grid, params, controls, mode)?,
    };
    let mut next = state.clone();
    let info = stepper.advance(&mut next, f64::INFINITY)?;
    Ok(StepResult {
        state: next,
        dt_used: info.dt_used,
        clamp_mass_step: info.clamp_mass_f + info.clamp_mass_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_params() -> Params {
        Params::new(1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn mobility_examples() {
        assert_eq!(face_mobility(1.0, 3.0), 2.0);
        assert_eq!(face_mobility(0.0, 0.0), 0.0);
        assert_eq!(face_mobility(-0.01, 0.005), 0.0);
    }

    #[test]
    fn flat_states_are_equilibria() {
        let grid = Grid::new(12, 1.0).unwrap();
        let s = State::flat(&grid, 0.7, 1.3);
        let (df, dg) = rhs_degenerate(&s, &unit_params(), &grid).unwrap();
        assert!(df.iter().chain(&dg).all(|&v| v == 0.0));
    }

    #[test]
    fn stable_dt_examples() {
        let grid = Grid::new(10, 1.0).unwrap();
        let controls = SchemeControls {
            dt_max: 1.0,
            ..SchemeControls::default()
        };
        let p = unit_params();
        assert_eq!(stable_dt(&State::flat(&grid, 0.0, 0.0), &p, &grid, &controls), 1.0);

        let dt = stable_dt(&State::flat(&grid, 1.0, 0.0), &p, &grid, &controls);
        // mu_max = (1 + 2R) * 1 = 3 for f, 2 R_mu * 0 for g
        assert_relative_eq!(dt, 0.4 * 0.01 / 6.0, max_relative = 1e-15);

        let s = State::new(grid.sample(|x| 1.0 + x), grid.sample(|x| 2.0 - x), 0.0);
        let s2 = State::new(s.f.iter().map(|v| 2.0 * v).collect(), s.g.iter().map(|v| 2.0 * v).collect(), 0.0);
        let a = stable_dt(&s, &p, &grid, &controls);
        let b = stable_dt(&s2, &p, &grid, &controls);
        assert_relative_eq!(b, a / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn step_on_flat_state_only_advances_time() {
        let grid = Grid::new(8, 1.0).unwrap();
        let s = State::flat(&grid, 1.0, 2.0);
        let r = step(&s, &unit_params(), &grid, &SchemeControls::default(), Mode::Degenerate, None).unwrap();
        assert_eq!(r.state.f, s.f);
        assert_eq!(r.state.g, s.g);
        assert_eq!(r.state.time, r.dt_used);
        assert_eq!(r.clamp_mass_step, 0.0);
    }

    #[test]
    fn epsilon_state_is_fixed_by_regularised_step() {
        let grid = Grid::new(16, 1.0).unwrap();
        let p = Params::new(1.5, 0.7, 0.05).unwrap();
        let s = State::flat(&grid, 0.05, 0.05);
        let r = step(&s, &p, &grid, &SchemeControls::default(), Mode::Regularized, None).unwrap();
        assert_eq!(r.state.f, s.f);
        assert_eq!(r.state.g, s.g);
    }

    #[test]
    fn mode_epsilon_consistency() {
        let grid = Grid::new(4, 1.0).unwrap();
        let c = SchemeControls::default();
        assert!(Stepper::new(&grid, &Params::new(1.0, 1.0, 0.1).unwrap(), &c, Mode::Degenerate).is_err());
        assert!(Stepper::new(&grid, &unit_params(), &c, Mode::Regularized).is_err());
        assert!(Stepper::new(&grid, &Params::new(1.0, 1.0, 0.1).unwrap(), &c, Mode::PmeG).is_err());
        let s = State::flat(&grid, 1.0, 1.0);
        assert!(matches!(
            rhs_regularized(&s, &unit_params(), &grid, &HelmholtzOperator::new(&grid, 0.1).unwrap()),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn pme_mode_requires_zero_f() {
        let grid = Grid::new(4, 1.0).unwrap();
        let s = State::flat(&grid, 1.0, 1.0);
        let err = step(&s, &unit_params(), &grid, &SchemeControls::default(), Mode::PmeG, None).unwrap_err();
        assert!(matches!(err, Error::ModeMismatch { mode: "pme_g", .. }));
    }

    #[test]
    fn large_undershoot_aborts() {
        let c = SchemeControls::default();
        let mut u = vec![1.0, -1e-6, 0.5, 0.0];
        let err = clamp(&mut u, Field::G, 0.5, 0.25, &c).unwrap_err();
        assert!(matches!(err, Error::PositivityFailure { field: Field::G, index: 1, .. }));
        assert!(err.is_runtime_abort());
    }

    #[test]
    fn tiny_undershoot_is_clamped_and_logged() {
        let c = SchemeControls {
            clamp_abort_fraction: 1.0,
            ..SchemeControls::default()
        };
        let mut u = vec![1.0, -1e-13, 0.5, 0.0];
        let added = clamp(&mut u, Field::F, 0.0, 0.25, &c).unwrap();
        assert_eq!(u[1], 0.0);
        assert_relative_eq!(added, 0.25e-13);

        let strict = SchemeControls::default();
        let mut u = vec![1e-20, -1e-13, 0.0, 0.0];
        let err = clamp(&mut u, Field::F, 0.0, 0.25, &strict).unwrap_err();
        assert!(matches!(err, Error::ClampBudgetExceeded { .. }));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("pme_g".parse::<Mode>().unwrap(), Mode::PmeG);
        assert_eq!(Mode::Regularized.to_string(), "regularized");
        assert!("implicit".parse::<Mode>().is_err());
    }
}
