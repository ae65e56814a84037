//! Time integration from `t = 0` to `t_end` with sampled diagnostics.

use crate::config::RunConfig;
use crate::diagnostics::{flat_equilibrium, rates, DiagnosticsRecord, EquilibriumPair};
use crate::dynamics::{Mode, SchemeControls, Stepper};
use crate::error::Result;
use crate::grid::Grid;
use crate::initial::build_initial;
use crate::model::{Params, State};
use crate::smoother::{regularize_initial_data, HelmholtzOperator};

/// When to stop and look at the state.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub t_end: f64,
    pub sample_dt: f64,
    pub snapshot_times: Vec<f64>,
}

impl Schedule {
    pub fn new(t_end: f64, sample_dt: f64) -> Self {
        Self {
            t_end,
            sample_dt,
            snapshot_times: Vec::new(),
        }
    }

    /// Sorted stops: samples at `k * sample_dt` and at `t_end`, merged with
    /// the snapshot times.
    fn stops(&self) -> Vec<Stop> {
        let tol = 1e-12 * self.t_end.max(f64::MIN_POSITIVE);
        let mut stops: Vec<Stop> = Vec::new();
        let mut k = 0u64;
        loop {
            let t = k as f64 * self.sample_dt;
            if t >= self.t_end - tol {
                break;
            }
            stops.push(Stop::sample(t));
            k += 1;
        }
        stops.push(Stop::sample(self.t_end));
        for (index, &t) in self.snapshot_times.iter().enumerate() {
            match stops.iter_mut().find(|s| (s.time - t).abs() <= tol) {
                Some(stop) => stop.snapshots.push(index),
                None => stops.push(Stop {
                    time: t,
                    sample: false,
                    snapshots: vec![index],
                }),
            }
        }
        stops.sort_by(|a, b| a.time.total_cmp(&b.time));
        stops
    }
}

#[derive(Debug, Clone)]
struct Stop {
    time: f64,
    sample: bool,
    snapshots: Vec<usize>,
}

impl Stop {
    fn sample(time: f64) -> Self {
        Self {
            time,
            sample: true,
            snapshots: Vec::new(),
        }
    }
}

/// Left Riemann sums `sum dt * rate` accumulated step by step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DissipationIntegrals {
    /// Integral of [`dissipation_d1`].
    pub d1: f64,
    /// Integral of [`dissipation_d2`].
    pub d2: f64,
    /// Integral of `||f_x||^2 + ||g_x||^2`.
    pub grad_sq: f64,
}

/// What an observer sees at each scheduled stop.
#[derive(Debug)]
pub struct Checkpoint<'a> {
    pub state: &'a State,
    pub record: Option<&'a DiagnosticsRecord>,
    /// Indices into `Schedule::snapshot_times` that land on this stop.
    pub snapshots: &'a [usize],
    pub integrals: DissipationIntegrals,
    pub steps: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: State,
    pub series: Vec<DiagnosticsRecord>,
    pub integrals: DissipationIntegrals,
    pub equilibrium: EquilibriumPair,
    pub steps: u64,
}

/// A configured solver for one `(grid, params, mode, controls)` tuple.
#[derive(Debug, Clone)]
pub struct Simulation {
    grid: Grid,
    params: Params,
    mode: Mode,
    controls: SchemeControls,
    op: Option<HelmholtzOperator>,
}

impl Simulation {
    pub fn new(grid: &Grid, params: &Params, mode: Mode, controls: &SchemeControls) -> Result<Self> {
        let stepper = Stepper::new(grid, params, controls, mode)?;
        Ok(Self {
            grid: grid.clone(),
            params: *params,
            mode,
            controls: *controls,
            op: stepper.operator().cloned(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The smoother in regularised mode.
    pub fn operator(&self) -> Option<&HelmholtzOperator> {
        self.op.as_ref()
    }

    /// Turns raw initial data into the state integrated by this mode: the
    /// smoothed and lifted data when regularised, `f = 0` for `pme_g`.
    pub fn initial_state(&self, f0: &[f64], g0: &[f64]) -> Result<State> {
        let mut state = regularize_initial_data(f0, g0, &self.params, &self.grid)?;
        if self.mode == Mode::PmeG {
            state.f.iter_mut().for_each(|v| *v = 0.0);
        }
        state.validate(&self.grid)?;
        Ok(state)
    }

    pub fn evolve(&self, initial: State, schedule: &Schedule) -> Result<RunOutput> {
        self.evolve_observed(initial, schedule, |_| Ok(()))
    }

    /// Integrates `initial` through `schedule`, calling `observer` at every
    /// stop (including `t = 0`).
    pub fn evolve_observed<F>(&self, initial: State, schedule: &Schedule, mut observer: F) -> Result<RunOutput>
    where
        F: FnMut(Checkpoint<'_>) -> Result<()>,
    {
        initial.validate(&self.grid)?;
        let mut stepper = match &self.op {
            Some(op) => Stepper::with_operator(&self.grid, &self.params, &self.controls, op.clone())?,
            None => Stepper::new(&self.grid, &self.params, &self.controls, self.mode)?,
        };
        let eq = flat_equilibrium(&initial, &self.grid);
        let mut state = initial;
        let mut series = Vec::new();
        let mut integrals = DissipationIntegrals::default();
        let mut clamp_cum = 0.0;
        let mut steps = 0u64;

        for stop in schedule.stops() {
            while state.time < stop.time {
                let cap = stop.time - state.time;
                let (d1, d2, grad_sq) = rates(&state, &self.params, &self.grid);
                let info = stepper.advance(&mut state, cap)?;
                if info.dt_used >= cap {
                    state.time = stop.time;
                }
                integrals.d1 += info.dt_used * d1;
                integrals.d2 += info.dt_used * d2;
                integrals.grad_sq += info.dt_used * grad_sq;
                clamp_cum += info.clamp_mass_f + info.clamp_mass_g;
                steps += 1;
            }
            let record = if stop.sample {
                let r = DiagnosticsRecord::compute(&state, &self.params, &self.grid, &eq, clamp_cum)?;
                series.push(r);
                Some(r)
            } else {
                None
            };
            observer(Checkpoint {
                state: &state,
                record: record.as_ref(),
                snapshots: &stop.snapshots,
                integrals,
                steps,
            })?;
        }
        Ok(RunOutput {
            final_state: state,
            series,
            integrals,
            equilibrium: eq,
            steps,
        })
    }
}

/// Builds the initial data described by `config` and integrates it.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    run_observed(config, |_| Ok(()))
}

pub fn run_observed<F>(config: &RunConfig, observer: F) -> Result<RunOutput>
where
    F: FnMut(Checkpoint<'_>) -> Result<()>,
{
    config.validate()?;
    let grid = config.grid()?;
    let (f0, g0) = build_initial(&config.initial, &grid, config.seed)?;
    let sim = Simulation::new(&grid, &config.params, config.mode, &config.controls)?;
    let initial = sim.initial_state(&f0, &g0)?;
    sim.evolve_observed(initial, &config.schedule(), observer)
}
