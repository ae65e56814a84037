//! Self-convergence under grid refinement: each grid is compared with the
//! next finer one after block averaging.

use twofilm::{InitialSpec, Mode, Params, Profile, RunConfig, SweepAxis, SweepOptions, run_sweep};

fn main() -> twofilm::Result<()> {
    let initial = InitialSpec {
        f: Profile::cosine(1.0, 0.3, 1),
        g: Profile::cosine(1.0, 0.3, 2),
    };
    let base = RunConfig::new(32, 1.0, Params::degenerate(1.0, 1.0)?, Mode::Degenerate, initial, 0.05);
    let options = SweepOptions { jobs: 2, write_files: false };
    let summary = run_sweep(&base, SweepAxis::NCells, &[32.0, 64.0, 128.0, 256.0], &options)?;
    println!("{:>6} {:>12} {:>8}", "n", "|f_n - f_2n|", "order");
    for row in &summary.rows {
        let fmt = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |v| format!("{v:.p$e}"));
        println!("{:>6} {:>12} {:>8}", row.value, fmt(row.diff_f_l2, 3), fmt(row.observed_order, 2));
    }
    Ok(())
}
