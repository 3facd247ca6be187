use fuzzy_pmp::bvp::{caputo_ivp, residual_norm, solve_level, BvpError};
use fuzzy_pmp::frac::gamma;
use fuzzy_pmp::fuzzy::LevelGrid;
use fuzzy_pmp::problems::{builtin, parse_problem};
use fuzzy_pmp::*;

fn solve(name: &str, beta: f64, mesh: usize, threads: usize) -> SolutionBundle {
    let mut p = builtin(name).unwrap();
    p.beta = beta;
    let spec = p.to_spec(&LevelGrid::new(vec![0.0, 0.5, 1.0]).unwrap()).unwrap();
    solve_problem(&spec, &SolveConfig { mesh, threads, ..SolveConfig::default() }).unwrap()
}

fn constant_spec(beta: f64, c: f64) -> ProblemSpec {
    let text = format!(
        "name = still\nt0 = 0\nt1 = 1\nbeta = {beta}\ncost = u^2\ndynamics.x1 = 0\nx1.t0 = ({c}, {c}, {c})\nx1.t1 = ({c}, {c}, {c})\n"
    );
    parse_problem(&text).unwrap().to_spec(&LevelGrid::uniform(3).unwrap()).unwrap()
}

#[test]
fn mesh_refinement_changes_solution_little() {
    let coarse = solve("ex51-case1", 1.0, 201, 0);
    let fine = solve("ex51-case1", 1.0, 401, 0);
    let c = coarse.level(0.5).unwrap();
    let f = fine.level(0.5).unwrap().restrict_to(&c.time).unwrap();
    assert!(c.max_difference(&f) < 1e-4, "{}", c.max_difference(&f));
}

#[test]
fn levels_are_independent_of_scheduling() {
    for beta in [1.0, 0.8] {
        let serial = solve("ex52", beta, 101, 0);
        let parallel = solve("ex52", beta, 101, 3);
        for (a, b) in serial.solutions.iter().zip(&parallel.solutions) {
            assert_eq!(a.r, b.r);
            assert_eq!(a.x, b.x);
            assert_eq!(a.u, b.u);
            assert_eq!(a.p, b.p);
        }
        // a single level alone gives the same curves as inside the bundle
        let spec = {
            let mut p = builtin("ex52").unwrap();
            p.beta = beta;
            p.to_spec(&LevelGrid::new(vec![0.0, 0.5, 1.0]).unwrap()).unwrap()
        };
        let alone = solve_level(&assemble_pmp_system(&spec, 0.5).unwrap(), &SolveConfig { mesh: 101, ..Default::default() })
            .unwrap();
        assert_eq!(alone.x, serial.level(0.5).unwrap().x);
    }
}

#[test]
fn caputo_ivp_matches_power_law() {
    for beta in [0.3, 0.5, 0.8] {
        let time = TimeGrid::uniform(0.0, 1.0, 1 << 10).unwrap();
        let order = FracOrder::new(beta).unwrap();
        let x = caputo_ivp(&time, order, &[0.0], |_, _| Ok(vec![1.0])).unwrap();
        let err = time
            .nodes()
            .iter()
            .zip(&x)
            .map(|(&t, v)| (v[0] - t.powf(beta) / gamma(beta + 1.0)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "beta {beta}: {err}");
    }
}

#[test]
fn caputo_ivp_relaxation_tracks_mittag_leffler_at_one() {
    // beta = 1 limit of D x = -x is exp(-t)
    let time = TimeGrid::uniform(0.0, 1.0, 513).unwrap();
    let x = caputo_ivp(&time, FracOrder::new(0.999).unwrap(), &[1.0], |_, x| Ok(vec![-x[0]])).unwrap();
    let err = time.nodes().iter().zip(&x).map(|(&t, v)| (v[0] - (-t).exp()).abs()).fold(0.0, f64::max);
    assert!(err < 5e-3, "{err}");
}

#[test]
fn trivial_systems_are_constant() {
    for beta in [1.0, 0.5] {
        let spec = constant_spec(beta, 1.5);
        let bundle = solve_problem(&spec, &SolveConfig { mesh: 51, ..Default::default() }).unwrap();
        assert!(bundle.all_converged());
        for s in &bundle.solutions {
            assert!(s.x_low(0).iter().chain(s.x_up(0)).all(|v| (v - 1.5).abs() < 1e-12));
            assert!(s.u_low(0).iter().chain(s.u_up(0)).all(|v| v.abs() < 1e-12));
            assert!(s.residuals.max() < 1e-10, "{:?}", s.residuals);
        }
    }
}

#[test]
fn perturbation_is_detected_by_residuals() {
    for beta in [1.0, 0.7] {
        let mut p = builtin("ex52").unwrap();
        p.beta = beta;
        let spec = p.to_spec(&LevelGrid::new(vec![0.0, 1.0]).unwrap()).unwrap();
        let system = assemble_pmp_system(&spec, 1.0).unwrap();
        let config = SolveConfig { mesh: 201, ..Default::default() };
        let mut s = solve_level(&system, &config).unwrap();
        assert!(s.residuals.within(1e-6), "{:?}", s.residuals);
        let clean = residual_norm(&s, &system).unwrap();
        assert!(clean.max() <= 1e-6);
        s.x[0][100] += 0.1;
        let dirty = residual_norm(&s, &system).unwrap();
        assert!(dirty.state >= 0.01, "beta {beta}: {:?}", dirty);
    }
}

#[test]
fn fractional_solution_converges_with_small_residuals() {
    let bundle = solve("ex52", 0.6, 201, 0);
    assert!(bundle.all_converged());
    assert!(bundle.worst_residuals().max() <= 1e-6, "{:?}", bundle.worst_residuals());
    // boundary nodes always carry valid fuzzy numbers
    for verdicts in bundle.stacking() {
        assert!(verdicts.first().unwrap().is_valid() && verdicts.last().unwrap().is_valid());
    }
}

#[test]
fn fractional_refinement_is_consistent() {
    // The costate behaves like (b - t)^(beta - 1) near b, so its terminal node
    // value depends on the mesh; states converge everywhere, and costates and
    // controls converge away from b. The singularity also lowers the rate.
    let runs: Vec<SolutionBundle> = [201, 401, 801].iter().map(|&m| solve("ex51-case1", 0.7, m, 0)).collect();
    let coarse = runs[0].level(0.5).unwrap().clone();
    let gaps: Vec<(f64, f64)> = runs
        .windows(2)
        .map(|w| {
            let a = w[0].level(0.5).unwrap().restrict_to(&coarse.time).unwrap();
            let b = w[1].level(0.5).unwrap().restrict_to(&coarse.time).unwrap();
            let interior = coarse.time.nodes().iter().take_while(|&&t| t <= 1.9).count();
            let gap = |curves: Vec<(&Vec<f64>, &Vec<f64>)>, upto: usize| {
                curves
                    .into_iter()
                    .flat_map(|(p, q)| p[..upto].iter().zip(&q[..upto]).map(|(u, v)| (u - v).abs()))
                    .fold(0.0, f64::max)
            };
            let state = gap(a.x.iter().zip(&b.x).collect(), a.time.len());
            let rest = gap(a.u.iter().zip(&b.u).chain(a.p.iter().zip(&b.p)).collect(), interior);
            (state, rest)
        })
        .collect();
    assert!(gaps[1].0 < gaps[0].0 && gaps[0].0 < 5e-3, "{gaps:?}");
    assert!(gaps[1].1 < gaps[0].1 && gaps[0].1 < 5e-3, "{gaps:?}");
}

#[test]
fn invalid_configs_are_rejected() {
    let spec = constant_spec(1.0, 0.0);
    for config in [
        SolveConfig { mesh: 2, ..Default::default() },
        SolveConfig { tolerance: 2.0, ..Default::default() },
        SolveConfig { max_newton: 0, ..Default::default() },
    ] {
        assert!(matches!(solve_problem(&spec, &config), Err(BvpError::InvalidConfig(_))));
    }
}
