//! Sweep the regularisation parameter and watch the regularised solution
//! approach the degenerate one.

use twofilm::{InitialSpec, Mode, Params, Profile, RunConfig, SweepAxis, SweepOptions, run_sweep};

fn main() -> twofilm::Result<()> {
    let initial = InitialSpec {
        f: Profile::cosine(1.0, 0.3, 1),
        g: Profile::cosine(1.0, 0.3, 2),
    };
    let mut base = RunConfig::new(128, 1.0, Params::degenerate(1.0, 1.0)?, Mode::Degenerate, initial, 0.2);
    base.sample_dt = 0.05;
    let options = SweepOptions { jobs: 4, write_files: false };
    let summary = run_sweep(&base, SweepAxis::Epsilon, &[0.1, 0.05, 0.025, 0.0125], &options)?;
    print!("{}", summary.to_csv());
    Ok(())
}
