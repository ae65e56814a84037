use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use twofilm::diagnostics::{dist2_to_equilibrium, entropy_distance_constant, fit_log_linear, smallest_mobility_eigenvalue};
use twofilm::dynamics::rhs_degenerate;
use twofilm::*;

fn case() -> impl Strategy<Value = (Grid, Vec<f64>, Vec<f64>, f64, f64)> {
    (2usize..120, 0.05f64..5.0, 0.05f64..5.0).prop_flat_map(|(n, r, r_mu)| {
        (
            Just(Grid::new(n, 1.0).unwrap()),
            prop::collection::vec(0.0f64..3.0, n),
            prop::collection::vec(0.0f64..3.0, n),
            Just(r),
            Just(r_mu),
        )
    })
}

fn with_mass(state: &State, grid: &Grid) -> bool {
    let eq = flat_equilibrium(state, grid);
    eq.f_flat > 0.0 && eq.g_flat > 0.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn energies_are_nonnegative_and_vanish_only_where_expected((grid, f, g, r, r_mu) in case()) {
        let p = Params::degenerate(r, r_mu).unwrap();
        let s = State::new(f, g, 0.0);
        prop_assert!(energy_e1(&s, &p, &grid).unwrap() >= 0.0);
        prop_assert!(energy_e2(&s, &p, &grid) >= 0.0);
        prop_assert!(dissipation_d1(&s, &p, &grid) >= 0.0);
        prop_assert!(dissipation_d2(&s, &p, &grid) >= 0.0);
        let ones = State::flat(&grid, 1.0, 1.0);
        prop_assert_eq!(energy_e1(&ones, &p, &grid).unwrap(), 0.0);
    }

    // Along the semi-discrete flow, dE2/dt = -2 d2 holds exactly: summation
    // by parts with zero boundary flux and the same face mobilities.
    #[test]
    fn e2_decays_at_twice_the_d2_rate((grid, f, g, r, r_mu) in case()) {
        let p = Params::degenerate(r, r_mu).unwrap();
        let s = State::new(f, g, 0.0);
        let (ft, gt) = rhs_degenerate(&s, &p, &grid).unwrap();
        let de2: f64 = 2.0 * grid.dx() * (0..s.f.len())
            .map(|i| ((1.0 + r) * s.f[i] + r * s.g[i]) * ft[i] + r * (s.f[i] + s.g[i]) * gt[i])
            .sum::<f64>();
        let d2 = dissipation_d2(&s, &p, &grid);
        let scale: f64 = 2.0 * grid.dx() * (0..s.f.len())
            .map(|i| (((1.0 + r) * s.f[i] + r * s.g[i]) * ft[i]).abs() + (r * (s.f[i] + s.g[i]) * gt[i]).abs())
            .sum::<f64>();
        prop_assert!((de2 + 2.0 * d2).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE), "{} vs {}", de2, -2.0 * d2);
    }

    #[test]
    fn lyapunov_is_nonnegative((grid, f, g, r, r_mu) in case(), eps in 0.001f64..0.5) {
        let p = Params::degenerate(r, r_mu).unwrap();
        let s = State::new(f, g, 0.0);
        prop_assume!(with_mass(&s, &grid));
        let eq = flat_equilibrium(&s, &grid);
        let op = HelmholtzOperator::new(&grid, eps).unwrap();
        for op in [None, Some(&op)] {
            let parts = lyapunov_parts(&s, &p, &grid, &eq, op).unwrap();
            prop_assert!(parts.entropy >= -1e-14);
            prop_assert!(parts.quadratic >= -1e-14 * (1.0 + parts.quadratic.abs()));
        }
        let at_eq = State::flat(&grid, eq.f_flat, eq.g_flat);
        prop_assert!(lyapunov_f(&at_eq, &p, &grid, &eq, Some(&op)).unwrap().abs() <= 1e-13);
    }

    // z ln(z/a) - z + a <= (z - a)^2 / a, so the distance controls the entropy.
    #[test]
    fn distance_controls_relative_entropy((grid, f, g, r, r_mu) in case()) {
        let p = Params::degenerate(r, r_mu).unwrap();
        let s = State::new(f, g, 0.0);
        prop_assume!(with_mass(&s, &grid));
        let eq = flat_equilibrium(&s, &grid);
        let (df, dg) = dist2_to_equilibrium(&s, &eq, &grid);
        let entropy = lyapunov_parts(&s, &p, &grid, &eq, None).unwrap().entropy;
        let c = entropy_distance_constant(&p, &eq);
        prop_assert!(df + dg >= c * entropy * (1.0 - 1e-12) - 1e-15);
    }

    #[test]
    fn log_linear_fit_is_exact_on_exponentials(
        omega in -5.0f64..20.0,
        amp in 1e-8f64..10.0,
        t0 in 0.0f64..3.0,
        n in 3usize..50,
    ) {
        let points: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let t = t0 + 0.1 * k as f64;
                (t, (amp * (-omega * t).exp()).ln())
            })
            .collect();
        let fit = fit_log_linear(&points).unwrap();
        prop_assert!((fit.omega - omega).abs() <= 1e-10 * (1.0 + omega.abs()));
        prop_assert!((fit.amplitude / amp - 1.0).abs() <= 1e-9);
        prop_assert!(fit.r_squared >= 1.0 - 1e-12);
        prop_assert_eq!(fit.samples, n);
    }

    #[test]
    fn mobility_eigenvalue_is_a_root_of_the_characteristic_polynomial(
        r in 0.01f64..10.0,
        r_mu in 0.01f64..10.0,
        a in 0.01f64..5.0,
        b in 0.01f64..5.0,
    ) {
        let p = Params::degenerate(r, r_mu).unwrap();
        let eq = EquilibriumPair { f_flat: a, g_flat: b };
        let l = smallest_mobility_eigenvalue(&p, &eq);
        let (m11, m12, m21, m22) = ((1.0 + r) * a, r * a, r_mu * b, r_mu * b);
        let char_poly = (m11 - l) * (m22 - l) - m12 * m21;
        prop_assert!(l > 0.0 && l <= m11.min(m22) * (1.0 + 1e-12));
        prop_assert!(char_poly.abs() <= 1e-10 * (m11 + m22).powi(2));
    }
}

#[test]
fn golden_ratio_rate_for_unit_coefficients() {
    let grid = Grid::new(100, 1.0).unwrap();
    let p = Params::degenerate(1.0, 1.0).unwrap();
    let eq = EquilibriumPair { f_flat: 1.0, g_flat: 1.0 };
    let rate = linearized_decay_rate(&p, &eq, &grid).unwrap();
    assert_relative_eq!(rate, (3.0 - 5f64.sqrt()) * grid.neumann_eigenvalue(1), max_relative = 1e-14);
}

#[test]
fn fitted_rate_matches_linearisation_on_a_coarse_grid() {
    let grid = Grid::new(64, 1.0).unwrap();
    let p = Params::degenerate(2.0, 0.5).unwrap();
    let sim = Simulation::new(&grid, &p, Mode::Degenerate, &SchemeControls::default()).unwrap();
    let v = grid.sample(|x| 1e-3 * (PI * x).cos());
    let f0: Vec<f64> = v.iter().map(|d| 1.0 + d).collect();
    let g0: Vec<f64> = v.iter().map(|d| 1.0 - d).collect();
    let init = sim.initial_state(&f0, &g0).unwrap();
    let out = sim.evolve(init, &Schedule::new(2.0, 0.02)).unwrap();
    let fit = fit_decay_rate(&out.series, &DecayWindow::default()).unwrap();
    let oracle = linearized_decay_rate(&p, &out.equilibrium, &grid).unwrap();
    assert!(fit.r_squared > 0.999, "r2 {}", fit.r_squared);
    assert!((fit.omega / oracle - 1.0).abs() < 0.05, "fit {} oracle {oracle}", fit.omega);
}

#[test]
fn e1_and_e2_do_not_grow_along_a_run() {
    let grid = Grid::new(64, 1.0).unwrap();
    let p = Params::degenerate(1.5, 0.7).unwrap();
    let sim = Simulation::new(&grid, &p, Mode::Degenerate, &SchemeControls::default()).unwrap();
    let f0 = grid.sample(|x| 1.0 + 0.5 * (PI * x).cos());
    let g0 = grid.sample(|x| 0.6 + 0.4 * (3.0 * PI * x).cos());
    let out = sim.evolve(sim.initial_state(&f0, &g0).unwrap(), &Schedule::new(0.5, 0.01)).unwrap();
    for w in out.series.windows(2) {
        assert!(w[1].e1 <= w[0].e1 + 1e-12, "E1 rose at t = {}", w[1].time);
        assert!(w[1].e2 <= w[0].e2 + 1e-12, "E2 rose at t = {}", w[1].time);
    }
    // The accumulated dissipation accounts for the drop in E2.
    let drop = out.series[0].e2 - out.series.last().unwrap().e2;
    assert_relative_eq!(drop, 2.0 * out.integrals.d2, max_relative = 1e-2);
}
