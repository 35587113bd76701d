use proptest::prelude::*;
use qgles_core::operators::max_speed;
use qgles_core::rng::{member_rng, white_noise_dirichlet};
use qgles_core::sgs::SgsDiagnoser;
use qgles_core::*;

fn noise(n: usize, seed: u64, member: u64) -> Field {
    white_noise_dirichlet(Grid::unit_square(n).unwrap(), &mut member_rng(seed, member))
}

fn smooth(n: usize, seed: u64, width: f64, norm: f64) -> Field {
    let q = gaussian_filter(&noise(n, seed, 0), FilterSpec::new(width).unwrap()).unwrap();
    q.scaled(norm / l2_norm(&q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jacobian_identities(seed in any::<u64>(), n in prop::sample::select(vec![5usize, 9, 17, 33])) {
        let f = noise(n, seed, 0);
        let g = noise(n, seed, 1);
        let jfg = arakawa_jacobian(&f, &g).unwrap();
        let jgf = arakawa_jacobian(&g, &f).unwrap();
        let nj = l2_norm(&jfg).unwrap();
        prop_assert!(l2_norm(&(&jfg + &jgf)).unwrap() <= 1e-13 * nj);
        prop_assert!(inner_product(&jfg, &g).unwrap().abs() <= 1e-12 * nj * l2_norm(&g).unwrap());
        prop_assert!(inner_product(&jfg, &f).unwrap().abs() <= 1e-12 * nj * l2_norm(&f).unwrap());
        prop_assert!(jfg.is_dirichlet());
    }

    #[test]
    fn poisson_inverts_laplacian(seed in any::<u64>(), n in prop::sample::select(vec![5usize, 12, 33, 65])) {
        let psi = noise(n, seed, 0);
        let back = solve_poisson(&laplacian(&psi)).unwrap();
        prop_assert!(l2_norm(&(&back - &psi)).unwrap() <= 1e-10 * l2_norm(&psi).unwrap());
    }

    #[test]
    fn filter_is_contractive_and_restricts(seed in any::<u64>(), cells in 0.5f64..8.0) {
        let f = noise(33, seed, 0);
        let spec = FilterSpec::new(cells / 32.0).unwrap();
        let g = gaussian_filter(&f, spec).unwrap();
        prop_assert!(l2_norm(&g).unwrap() <= l2_norm(&f).unwrap());
        let coarse = f.grid().coarsened(4).unwrap();
        prop_assert!(restrict(&g, &coarse).unwrap().is_dirichlet());
    }
}

#[test]
fn inviscid_run_conserves_enstrophy_and_energy() {
    let q0 = smooth(33, 3, 0.15, 5.0);
    let grid = *q0.grid();
    let model = Model::new(PhysicalParams::inviscid(0.0), Field::zeros(grid)).unwrap();
    let dt = 0.1 * grid.dx() / max_speed(&solve_poisson(&q0).unwrap());
    let traj = model
        .run(&q0, None, &StepperConfig::new(dt, 400.0 * dt, 50).unwrap())
        .unwrap();
    let d = traj.diagnostics();
    for s in d {
        assert!((s.enstrophy / d[0].enstrophy - 1.0).abs() < 1e-8);
        assert!((s.energy / d[0].energy - 1.0).abs() < 1e-8);
    }
}

#[test]
fn rk4_is_fourth_order_on_the_nonlinear_system() {
    let q0 = smooth(33, 4, 0.1, 20.0);
    let grid = *q0.grid();
    let model = Model::new(
        PhysicalParams::new(50.0, 2e-3, 0.2).unwrap(),
        double_gyre_forcing(grid, 5.0),
    )
    .unwrap();
    let dt0 = 0.4 * grid.dx() / max_speed(&solve_poisson(&q0).unwrap());
    let fin = |dt: f64| {
        let st = StepperConfig::new(dt, 40.0 * dt0, 1000).unwrap().with_cfl_safety(1.0);
        model.run(&q0, None, &st).unwrap().last().unwrap().clone()
    };
    let (a, b, c) = (fin(dt0), fin(dt0 / 2.0), fin(dt0 / 4.0));
    let order = (l2_norm(&(&a - &b)).unwrap() / l2_norm(&(&b - &c)).unwrap()).log2();
    assert!((3.5..=4.5).contains(&order), "{order}");
}

#[test]
fn dissipative_run_respects_enstrophy_bound() {
    let q0 = smooth(33, 5, 0.1, 30.0);
    let grid = *q0.grid();
    let params = PhysicalParams::new(0.0, 1e-3, 0.5).unwrap();
    let model = Model::new(params, double_gyre_forcing(grid, 10.0)).unwrap();
    let traj = model
        .run(&q0, None, &StepperConfig::new(2e-3, 1.0, 10).unwrap())
        .unwrap();
    for s in traj.diagnostics() {
        assert!(s.enstrophy <= s.lemma1_bound * (1.0 + 1e-12), "{s:?}");
    }
    let bound = dynamics::trajectory_enstrophy_bound(&traj, &params).unwrap();
    assert!(bound.iter().all(|b| b.enstrophy <= b.bound * (1.0 + 1e-12)));
}

fn resolved() -> (Model, Trajectory) {
    let q0 = smooth(33, 6, 0.08, 10.0);
    let grid = *q0.grid();
    let model = Model::new(
        PhysicalParams::new(0.0, 1e-3, 0.5).unwrap(),
        double_gyre_forcing(grid, 10.0),
    )
    .unwrap();
    let traj = model
        .run(&q0, None, &StepperConfig::new(4e-3, 0.8, 4).unwrap())
        .unwrap();
    (model, traj)
}

#[test]
fn runs_are_deterministic() {
    let (_, a) = resolved();
    let (_, b) = resolved();
    assert_eq!(a.snapshots(), b.snapshots());
    assert_eq!(a.diagnostics(), b.diagnostics());
}

#[test]
fn stochastic_closures_are_square_integrable_over_many_seeds() {
    let (model, traj) = resolved();
    let coarse = model.grid().coarsened(4).unwrap();
    let delta = 4.0 * model.grid().dx();
    let series = diagnose_sgs(&traj, delta, &coarse).unwrap();
    let stats = estimate_stats(&series, 0.0).unwrap();
    let stepper = StepperConfig::new(0.016, 0.8, 1).unwrap();
    let steps = stepper.n_steps();
    let q = Field::zeros(coarse);
    let bound = 4.0 * 0.8 * stats.expected_norm_sq();
    let mut total = 0.0;
    for seed in 0..32 {
        let mut c = make_closure(&ClosureSpec::ar1_matched(&stats, seed), &stepper).unwrap();
        let mut integral = 0.0;
        for n in 0..steps {
            let s = c.sample(stepper.time(n), &q).unwrap();
            assert!(s.is_dirichlet());
            integral += s.norm_sq() * stepper.dt;
        }
        total += integral;
    }
    assert!(total / 32.0 <= bound, "{} > {bound}", total / 32.0);
}

#[test]
fn diagnosed_stress_vanishes_for_a_single_mode_trajectory() {
    let grid = Grid::unit_square(33).unwrap();
    let pi = std::f64::consts::PI;
    let q = Field::dirichlet_from_fn(grid, |x, y| (2.0 * pi * x).sin() * (pi * y).sin());
    let d = SgsDiagnoser::new(grid, 0.1).unwrap();
    assert!(d.stress(&q).unwrap().max_abs() < 1e-12);
}
