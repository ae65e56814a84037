//! The regularised system keeps both films above eps, even from data that
//! vanish on whole intervals.

use twofilm::{Grid, Mode, Params, Schedule, SchemeControls, Simulation};

fn main() -> twofilm::Result<()> {
    let grid = Grid::new(128, 1.0)?;
    let cap = |lo: f64, hi: f64, h: f64| {
        move |x: f64| {
            let s = (2.0 * x - lo - hi) / (hi - lo);
            if s.abs() < 1.0 { h * (1.0 - s * s) } else { 0.0 }
        }
    };
    let f0 = grid.sample(cap(0.1, 0.5, 1.0));
    let g0 = grid.sample(cap(0.4, 0.9, 0.8));
    for eps in [0.1, 0.05, 0.02] {
        let params = Params::new(1.0, 1.0, eps)?;
        let sim = Simulation::new(&grid, &params, Mode::Regularized, &SchemeControls::default())?;
        let out = sim.evolve(sim.initial_state(&f0, &g0)?, &Schedule::new(0.2, 0.01))?;
        let min_f = out.series.iter().map(|r| r.min_f).fold(f64::INFINITY, f64::min);
        let min_g = out.series.iter().map(|r| r.min_g).fold(f64::INFINITY, f64::min);
        println!("eps = {eps:<5} min f = {min_f:.6}  min g = {min_g:.6}  ({} steps)", out.steps);
    }
    Ok(())
}
