//! Run a config file and write its outputs, as `twofilm run` does.
//!
//! ```text
//! cargo run --release --example from_config -- crates/core/examples/configs/relax.cfg
//! ```

use std::process::ExitCode;

use twofilm::{parse_config, run_to_dir};

fn main() -> ExitCode {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/relax.cfg").into());
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::from(1);
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::from(1);
        }
    };
    match run_to_dir(&config) {
        Ok(out) => {
            let last = out.series.last().unwrap();
            println!("wrote {} ({} samples, final dist2 {:.3e})", config.output_dir.display(), out.series.len(), last.dist2());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
