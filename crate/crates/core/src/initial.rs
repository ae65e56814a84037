//! Initial data generators.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{InitialSpec, Profile, Shape};
use crate::error::{Error, Field, Result};
use crate::grid::{check_finite, Grid};
use crate::output::read_snapshot;

/// Builds `(f0, g0)` on `grid`. Deterministic in `(spec, grid, seed)`: the
/// random profiles draw from one ChaCha stream seeded by `seed`, `f` first.
pub fn build_initial(spec: &InitialSpec, grid: &Grid, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = build_profile(&spec.f, Field::F, grid, &mut rng)?;
    let g0 = build_profile(&spec.g, Field::G, grid, &mut rng)?;
    Ok((f0, g0))
}

fn build_profile(p: &Profile, field: Field, grid: &Grid, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let l = grid.length();
    let mut u = match &p.shape {
        Shape::Flat { value } => vec![*value; grid.n_cells()],
        Shape::CosinePerturbation { base, amplitude, mode } => {
            let k = *mode as f64 * PI / l;
            grid.sample(|x| base + amplitude * (k * x).cos())
        }
        Shape::Bump {
            center,
            width,
            height,
            base,
        } => grid.sample(|x| {
            let s = (x - center) / width;
            base + height * (-s * s).exp()
        }),
        Shape::CompactSupport { lo, hi, height } => {
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            grid.sample(|x| {
                let s = (x - mid) / half;
                if s.abs() < 1.0 {
                    height * (1.0 - s * s)
                } else {
                    0.0
                }
            })
        }
        Shape::RandomFourier {
            base,
            amplitude,
            n_modes,
        } => {
            let coeffs: Vec<f64> = (1..=*n_modes)
                .map(|k| rng.gen_range(-1.0..=1.0) * amplitude / k as f64)
                .collect();
            grid.sample(|x| {
                base + coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a * ((i + 1) as f64 * PI * x / l).cos())
                    .sum::<f64>()
            })
        }
        Shape::FromFile { path } => {
            let (state, _) = read_snapshot(path)?;
            let column = match field {
                Field::F => state.f,
                Field::G => state.g,
            };
            grid.check_len(&column)?;
            column
        }
    };
    for v in &mut u {
        *v = v.max(p.floor);
    }
    check_finite(&u)?;
    if let Some(index) = u.iter().position(|&v| v < 0.0) {
        return Err(Error::Negative {
            field,
            index,
            value: u[index],
        });
    }
    Ok(u)
}
