//! Finite-volume simulation of two stacked thin films in a porous medium.
//!
//! The unknowns are the layer heights `f >= 0` (lower) and `g >= 0` (upper)
//! on `(0, L)` with no-flux boundaries. Two models are integrated:
//!
//! - the degenerate system
//!   `f_t = (1+R)(f f_x)_x + R(f g_x)_x`,
//!   `g_t = R_mu (g f_x)_x + R_mu (g g_x)_x`;
//! - its regularisation, where the cross terms see the smoothed fields
//!   `F = S f`, `G = S g` with `S = (1 - eps^2 d_xx)^{-1}` and the mobilities
//!   are shifted by `eps`.
//!
//! Diagnostics cover mass, the entropy `E1`, the quadratic energy `E2`,
//! their dissipation rates, a Lyapunov functional and exponential decay
//! fits. See the `examples/` directory for one program per capability.

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod initial;
pub mod model;
pub mod output;
pub mod simulation;
pub mod smoother;

pub use config::{parse_config, ConfigError, InitialSpec, Profile, RunConfig, Shape};
pub use diagnostics::{
    dissipation_d1, dissipation_d2, energy_e1, energy_e2, fit_decay_rate, flat_equilibrium, linearized_decay_rate,
    lyapunov_f, lyapunov_parts, DecayFit, DecayWindow, DiagnosticsRecord, EquilibriumPair, LyapunovParts,
};
pub use dynamics::{step, Mode, SchemeControls, StepResult, Stepper};
pub use error::{Error, Field, Result};
pub use grid::{discrete_mass, Grid};
pub use harness::{run_sweep, run_to_dir, SweepAxis, SweepOptions, SweepRow, SweepSummary};
pub use model::{Params, State};
pub use simulation::{run, Schedule, Simulation};
pub use smoother::{helmholtz_solve, regularize_initial_data, HelmholtzOperator};
