//! File-producing runs and parameter sweeps.
//!
//! A run writes into its own `output_dir`:
//!
//! - `config.txt`: the effective configuration,
//! - `diagnostics.csv`: one row per sample,
//! - `snapshot_NNN.csv`: one file per entry of `snapshot_times`.
//!
//! A sweep runs one child per value, each in `<output_dir>/<axis>_<value>/`,
//! and writes `<output_dir>/sweep_<axis>.csv` after every child finished.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{ConfigError, RunConfig};
use crate::diagnostics::{fit_decay_rate, DecayWindow};
use crate::dynamics::Mode;
use crate::error::{Error, Result};
use crate::grid::{l2_norm, Grid};
use crate::model::State;
use crate::output::{format_f64, write_diagnostics, write_snapshot};
use crate::simulation::{run_observed, RunOutput};

pub fn snapshot_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("snapshot_{index:03}.csv"))
}

/// Runs `config` and writes its files under `config.output_dir`.
pub fn run_to_dir(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let dir = config.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let cfg_path = dir.join("config.txt");
    fs::write(&cfg_path, config.to_config_string()).map_err(|e| Error::io(&cfg_path, e))?;
    let grid = config.grid()?;
    let result = run_observed(config, |cp| {
        for &index in cp.snapshots {
            write_snapshot(cp.state, &grid, snapshot_path(&dir, index))?;
        }
        Ok(())
    });
    // Whatever was sampled before an abort is still worth keeping, but the
    // series is only available on success.
    let out = result?;
    write_diagnostics(&out.series, dir.join("diagnostics.csv"))?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Epsilon,
    NCells,
    R,
    RMu,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::NCells => "n_cells",
            SweepAxis::R => "R",
            SweepAxis::RMu => "R_mu",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "epsilon" => Ok(SweepAxis::Epsilon),
            "n_cells" => Ok(SweepAxis::NCells),
            "R" => Ok(SweepAxis::R),
            "R_mu" => Ok(SweepAxis::RMu),
            other => Err(format!("unknown sweep axis '{other}' (expected epsilon, n_cells, R or R_mu)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Upper bound on concurrently running children.
    pub jobs: usize,
    /// Write per-child files and the summary CSV.
    pub write_files: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            write_files: true,
        }
    }
}

/// One row of the sweep summary. Quantities that could not be computed are
/// `None` and written as `nan`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `None` on success, the abort or validation message otherwise.
    pub error: Option<String>,
    pub final_e1: Option<f64>,
    pub final_e2: Option<f64>,
    pub omega: Option<f64>,
    pub final_dist2: Option<f64>,
    pub max_clamp: Option<f64>,
    /// `epsilon`: `||f_eps(T) - f_deg(T)||_2` against the degenerate run.
    /// `n_cells`: `||f_n(T) - restrict(f_next(T))||_2` against the next
    /// finer grid in the list.
    pub diff_f_l2: Option<f64>,
    /// `n_cells` only: `log(e_prev / e_this) / log(refinement)`.
    pub observed_order: Option<f64>,
}

impl SweepRow {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    pub const CSV_HEADER: &'static str =
        "value,status,final_e1,final_e2,omega,final_dist2,max_clamp,diff_f_l2,observed_order";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_else(|| "nan".into());
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            let status = match &r.error {
                None => "ok".to_string(),
                Some(msg) => format!("error: {}", msg.replace([',', '\n', '\r'], ";")),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                format_f64(r.value),
                status,
                opt(r.final_e1),
                opt(r.final_e2),
                opt(r.omega),
                opt(r.final_dist2),
                opt(r.max_clamp),
                opt(r.diff_f_l2),
                opt(r.observed_order)
            );
        }
        s
    }
}

fn value_label(v: f64) -> String {
    format!("{v:?}")
}

/// Config of the child run at `value` along `axis`.
pub fn child_config(base: &RunConfig, axis: SweepAxis, value: f64) -> std::result::Result<RunConfig, ConfigError> {
    let mut c = base.clone();
    match axis {
        SweepAxis::Epsilon => {
            c.params.epsilon = value;
            c.mode = if value > 0.0 {
                Mode::Regularized
            } else if base.mode == Mode::PmeG {
                Mode::PmeG
            } else {
                Mode::Degenerate
            };
        }
        SweepAxis::NCells => {
            if !(value.fract() == 0.0 && value >= 2.0 && value <= u32::MAX as f64) {
                return Err(ConfigError::InvalidValue {
                    key: "grid.n_cells".into(),
                    value: value.to_string(),
                    message: "sweep values must be integers >= 2".into(),
                });
            }
            c.n_cells = value as usize;
        }
        SweepAxis::R => c.params.r = value,
        SweepAxis::RMu => c.params.r_mu = value,
    }
    c.output_dir = base.output_dir.join(format!("{}_{}", axis.name(), value_label(value)));
    c.validate()?;
    Ok(c)
}

struct ChildOutcome {
    grid: Option<Grid>,
    result: std::result::Result<RunOutput, String>,
}

fn run_child(config: std::result::Result<RunConfig, ConfigError>, write_files: bool) -> ChildOutcome {
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            return ChildOutcome {
                grid: None,
                result: Err(e.to_string()),
            }
        }
    };
    let grid = config.grid().ok();
    let result = if write_files {
        run_to_dir(&config)
    } else {
        crate::simulation::run(&config)
    };
    ChildOutcome {
        grid,
        result: result.map_err(|e| e.to_string()),
    }
}

/// Runs `base` once per value of `axis`. Child failures are recorded in
/// their rows; the sweep itself only fails on I/O for the summary or when
/// the thread pool cannot be built.
pub fn run_sweep(base: &RunConfig, axis: SweepAxis, values: &[f64], options: &SweepOptions) -> Result<SweepSummary> {
    let mut configs: Vec<_> = values.iter().map(|&v| child_config(base, axis, v)).collect();
    // The epsilon axis is compared against the degenerate run.
    let with_reference = axis == SweepAxis::Epsilon;
    if with_reference {
        let mut reference = base.clone();
        reference.params.epsilon = 0.0;
        reference.mode = if base.mode == Mode::PmeG {
            Mode::PmeG
        } else {
            Mode::Degenerate
        };
        reference.output_dir = base.output_dir.join("epsilon_reference");
        configs.push(reference.validate().map(|_| reference));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs.max(1))
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    let mut outcomes: Vec<ChildOutcome> = pool.install(|| {
        configs
            .into_par_iter()
            .map(|c| run_child(c, options.write_files))
            .collect()
    });
    let reference = if with_reference { outcomes.pop() } else { None };

    let mut rows: Vec<SweepRow> = values
        .iter()
        .zip(&outcomes)
        .map(|(&value, o)| summarise(value, o))
        .collect();

    match axis {
        SweepAxis::Epsilon => {
            if let Some(ChildOutcome {
                result: Ok(ref_out), ..
            }) = &reference
            {
                for (row, o) in rows.iter_mut().zip(&outcomes) {
                    if let (Ok(out), Some(grid)) = (&o.result, &o.grid) {
                        row.diff_f_l2 = Some(l2_diff(&out.final_state.f, &ref_out.final_state.f, grid));
                    }
                }
            }
        }
        SweepAxis::NCells => refinement_columns(&mut rows, &outcomes),
        SweepAxis::R | SweepAxis::RMu => {}
    }

    let summary = SweepSummary { axis, rows };
    if options.write_files {
        let dir = &base.output_dir;
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(format!("sweep_{}.csv", axis.name()));
        fs::write(&path, summary.to_csv()).map_err(|e| Error::io(&path, e))?;
    }
    Ok(summary)
}

fn summarise(value: f64, o: &ChildOutcome) -> SweepRow {
    match &o.result {
        Ok(out) => {
            let last = out.series.last();
            SweepRow {
                value,
                error: None,
                final_e1: last.map(|r| r.e1),
                final_e2: last.map(|r| r.e2),
                omega: fit_decay_rate(&out.series, &DecayWindow::default())
                    .ok()
                    .map(|f| f.omega),
                final_dist2: last.map(|r| r.dist2()),
                max_clamp: out
                    .series
                    .iter()
                    .map(|r| r.clamp_mass_cum)
                    .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))),
                diff_f_l2: None,
                observed_order: None,
            }
        }
        Err(msg) => SweepRow {
            value,
            error: Some(msg.clone()),
            final_e1: None,
            final_e2: None,
            omega: None,
            final_dist2: None,
            max_clamp: None,
            diff_f_l2: None,
            observed_order: None,
        },
    }
}

fn l2_diff(a: &[f64], b: &[f64], grid: &Grid) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    l2_norm(&d, grid)
}

/// Averages a fine cell field onto a coarse grid whose cells are unions of
/// `ratio` fine cells.
pub fn restrict(fine: &[f64], ratio: usize) -> Vec<f64> {
    fine.chunks_exact(ratio)
        .map(|c| c.iter().sum::<f64>() / ratio as f64)
        .collect()
}

/// Differences between successive grids (in the order given) and the
/// observed order from consecutive differences.
fn refinement_columns(rows: &mut [SweepRow], outcomes: &[ChildOutcome]) {
    let mut prev: Option<(f64, f64)> = None; // (difference, refinement ratio)
    for k in 0..rows.len().saturating_sub(1) {
        let (a, b) = (&outcomes[k], &outcomes[k + 1]);
        let diff = match (&a.result, &b.result, &a.grid, &b.grid) {
            (Ok(coarse), Ok(fine), Some(cg), Some(fg)) if fg.n_cells() % cg.n_cells() == 0 && fg.n_cells() > cg.n_cells() => {
                let ratio = fg.n_cells() / cg.n_cells();
                Some((l2_diff(&coarse.final_state.f, &restrict(&fine.final_state.f, ratio), cg), ratio as f64))
            }
            _ => None,
        };
        rows[k].diff_f_l2 = diff.map(|d| d.0);
        if let (Some((e_prev, _)), Some((e_this, ratio))) = (prev, diff) {
            if e_prev > 0.0 && e_this > 0.0 {
                rows[k].observed_order = Some((e_prev / e_this).ln() / ratio.ln());
            }
        }
        prev = diff;
    }
}

/// `||a - b||_2` between the `f` fields of two states on the same grid.
pub fn state_f_distance(a: &State, b: &State, grid: &Grid) -> f64 {
    l2_diff(&a.f, &b.f, grid)
}
