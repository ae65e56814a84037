//! Relaxation of the degenerate system from cosine data: masses stay put,
//! both energies fall and the state approaches the flat pair.

use std::f64::consts::PI;

use twofilm::{Grid, Mode, Params, Schedule, SchemeControls, Simulation};

fn main() -> twofilm::Result<()> {
    let grid = Grid::new(128, 1.0)?;
    let params = Params::degenerate(1.0, 1.0)?;
    let sim = Simulation::new(&grid, &params, Mode::Degenerate, &SchemeControls::default())?;
    let f0 = grid.sample(|x| 1.0 + 0.3 * (PI * x).cos());
    let g0 = grid.sample(|x| 1.0 + 0.3 * (2.0 * PI * x).cos());
    let out = sim.evolve(sim.initial_state(&f0, &g0)?, &Schedule::new(0.5, 0.05))?;

    println!("{:>6} {:>14} {:>14} {:>12} {:>12} {:>10}", "t", "mass_f", "mass_g", "E1", "E2", "dist2");
    for r in &out.series {
        println!(
            "{:>6.2} {:>14.10} {:>14.10} {:>12.6e} {:>12.6e} {:>10.3e}",
            r.time, r.mass_f, r.mass_g, r.e1, r.e2, r.dist2()
        );
    }
    let eq = out.equilibrium;
    println!("{} steps, equilibrium (A, B) = ({}, {})", out.steps, eq.f_flat, eq.g_flat);
    println!("int d2 dt = {:.6e}, int d1 dt = {:.6e}", out.integrals.d2, out.integrals.d1);
    Ok(())
}
