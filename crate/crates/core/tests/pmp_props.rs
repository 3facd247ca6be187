use fuzzy_pmp::fuzzy::{GhCase, LevelGrid};
use fuzzy_pmp::pmp::{FeasibilityVerdict, GradientMode, Hamiltonian};
use fuzzy_pmp::problems::{builtin, parse_problem};
use fuzzy_pmp::{check_diameter_feasibility, crisp_reduce, ProblemSpec};
use proptest::prelude::*;

fn spec(name: &str) -> ProblemSpec {
    builtin(name).unwrap().to_spec(&LevelGrid::default()).unwrap()
}

fn point(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn analytic_gradient_matches_finite_differences(
        which in 0usize..4,
        z in point(8),
        p in point(4),
        s in 0.0..1.0f64,
    ) {
        let name = ["ex51-case1", "ex51-case2", "ex52", "remark42-variational"][which];
        let spec = spec(name);
        let layout = spec.layout();
        let (z, p) = (&z[..layout.len()], &p[..2 * layout.n_states]);
        let t = spec.a + s * (spec.b - spec.a);
        let analytic = Hamiltonian::new(spec.model.clone(), spec.cases.clone(), GradientMode::Analytic);
        let numeric = Hamiltonian::new(spec.model.clone(), spec.cases.clone(), GradientMode::FiniteDifference);
        let ga = analytic.gradient(z, p, t).unwrap();
        let gn = numeric.gradient(z, p, t).unwrap();
        for (a, n) in ga.iter().zip(&gn) {
            prop_assert!((a - n).abs() <= 1e-5 * a.abs().max(1.0), "{} vs {} in {}", a, n, name);
        }
    }

    #[test]
    fn cases_agree_on_crisp_points(x in -3.0..3.0f64, u in -3.0..3.0f64, p in point(2), s in 0.0..1.0f64) {
        let spec = spec("ex51-case1");
        let t = 1.0 + s;
        let z = [x, x, u, u];
        let one = Hamiltonian::new(spec.model.clone(), vec![GhCase::Case1], GradientMode::Analytic);
        let two = Hamiltonian::new(spec.model.clone(), vec![GhCase::Case2], GradientMode::Analytic);
        prop_assert!((one.value(&z, &p, t).unwrap() - two.value(&z, &p, t).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn cases_agree_for_state_free_dynamics(z in point(4), p in point(2), t in 0.0..1.0f64) {
        let text = "name = forced\nt0 = 0\nt1 = 1\nbeta = 1\ncost = u^2\ndynamics.x1 = sin(t) + t^2\nx1.t0 = (0, 1, 2)\nx1.t1 = (1, 2, 3)\n";
        let spec = parse_problem(text).unwrap().to_spec(&LevelGrid::default()).unwrap();
        let one = Hamiltonian::new(spec.model.clone(), vec![GhCase::Case1], GradientMode::Analytic);
        let two = Hamiltonian::new(spec.model.clone(), vec![GhCase::Case2], GradientMode::Analytic);
        prop_assert!((one.value(&z, &p, t).unwrap() - two.value(&z, &p, t).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn crisp_boundaries_are_never_refuted(a in -3.0..3.0f64, c in -3.0..3.0f64, x0 in -5.0..5.0f64, x1 in -5.0..5.0f64) {
        let text = format!(
            "name = crisp\nt0 = 0\nt1 = 1\nbeta = 1\npairing = interval\ncost = u^2\n\
             dynamics.x1 = {a}*x1 + {c}*u\nx1.t0 = ({x0}, {x0}, {x0})\nx1.t1 = ({x1}, {x1}, {x1})\n"
        );
        let spec = parse_problem(&text).unwrap().to_spec(&LevelGrid::default()).unwrap();
        prop_assert!(!check_diameter_feasibility(&spec).unwrap().is_infeasible());
    }
}

#[test]
fn crisp_reduce_is_idempotent() {
    for name in ["ex51-case2", "ex52", "ex53"] {
        let once = crisp_reduce(&spec(name));
        let twice = crisp_reduce(&once);
        assert_eq!(once.name, twice.name);
        assert_eq!(once.cases, twice.cases);
        assert_eq!(once.boundary_a, twice.boundary_a);
        assert_eq!(once.boundary_b, twice.boundary_b);
        assert!(once.boundary_a.iter().chain(&once.boundary_b).all(|x| x.is_crisp()));
    }
    let reduced = crisp_reduce(&spec("ex52"));
    assert_eq!(reduced.boundary_a[0].core(), (2.0, 2.0));
    assert_eq!(reduced.boundary_b[1].core(), (0.0, 0.0));
}

#[test]
fn feasibility_verdicts_for_builtins() {
    assert!(check_diameter_feasibility(&spec("ex53")).unwrap().is_infeasible());
    assert_eq!(check_diameter_feasibility(&spec("ex53-crisp")).unwrap(), FeasibilityVerdict::Feasible);
    assert!(matches!(check_diameter_feasibility(&spec("ex51-case1")).unwrap(), FeasibilityVerdict::NotApplicable { .. }));
    assert!(matches!(check_diameter_feasibility(&spec("ex52")).unwrap(), FeasibilityVerdict::NotApplicable { .. }));
}

#[test]
fn unequal_diameters_are_not_refuted() {
    let mut p = builtin("ex53").unwrap();
    p.boundary_t1[0] = fuzzy_pmp::problems::Triple(-0.5, 0.0, 0.5);
    let spec = p.to_spec(&LevelGrid::default()).unwrap();
    assert_eq!(check_diameter_feasibility(&spec).unwrap(), FeasibilityVerdict::Feasible);
}

#[test]
fn negative_coefficients_shrink_the_certificate() {
    // a(t) = 1 - t is positive only on [0, 1)
    let text = "name = shrink\nt0 = 0\nt1 = 2\nbeta = 1\npairing = interval\ncost = u^2\n\
                dynamics.x1 = (1 - t)*x1 + u\nx1.t0 = (1, 2, 3)\nx1.t1 = (-1, 0, 1)\n";
    let spec = parse_problem(text).unwrap().to_spec(&LevelGrid::default()).unwrap();
    match check_diameter_feasibility(&spec).unwrap() {
        FeasibilityVerdict::Infeasible { interval: (lo, hi), .. } => {
            assert!(lo.abs() < 1e-9 && (hi - 1.0).abs() < 1e-6, "({lo}, {hi})");
        }
        other => panic!("{other:?}"),
    }
}
