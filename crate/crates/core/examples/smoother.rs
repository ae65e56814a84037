//! Properties of the Helmholtz smoother `U = (1 - eps^2 d_xx)^{-1} u` on a
//! rough input: mass, bounds and the gradient contractions.

use twofilm::grid::{grad_l2_norm, l2_norm, second_difference};
use twofilm::{discrete_mass, Grid, HelmholtzOperator};

fn main() -> twofilm::Result<()> {
    let grid = Grid::new(200, 1.0)?;
    // A step with a spike: the worst case for a smoother.
    let u = grid.sample(|x| if x < 0.5 { 1.0 } else { 0.2 } + if (0.7..0.72).contains(&x) { 3.0 } else { 0.0 });
    let du = grad_l2_norm(&u, &grid);
    println!("{:>8} {:>12} {:>10} {:>10} {:>12} {:>12}", "eps", "mass diff", "min", "max", "|U_x|/|u_x|", "eps|U_xx|/|u_x|");
    for eps in [0.3, 0.1, 0.03, 0.01, 0.003] {
        let op = HelmholtzOperator::new(&grid, eps)?;
        let big_u = op.solve(&u)?;
        let mass = discrete_mass(&big_u, &grid)? - discrete_mass(&u, &grid)?;
        let lo = big_u.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = big_u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let d2 = l2_norm(&second_difference(&big_u, &grid), &grid);
        println!(
            "{eps:>8} {mass:>12.2e} {lo:>10.5} {hi:>10.5} {:>12.5} {:>12.5}",
            grad_l2_norm(&big_u, &grid) / du,
            eps * d2 / du
        );
    }
    Ok(())
}
