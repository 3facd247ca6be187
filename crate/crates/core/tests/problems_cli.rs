use std::process::Command;

use fuzzy_pmp::fuzzy::{GhCase, LevelGrid};
use fuzzy_pmp::pmp::Pairing;
use fuzzy_pmp::problems::csv::HEADER;
use fuzzy_pmp::problems::expr::Env;
use fuzzy_pmp::problems::svg::render_svgs;
use fuzzy_pmp::problems::{
    builtin, load_problem, parse_expression, parse_problem, render_csv, run, FileError, OutputFormat, RunOptions,
    RunOutcome, Triple, BUILTINS,
};
use fuzzy_pmp::SolveConfig;
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fuzzy-pmp"))
}

fn options(levels: usize, mesh: usize) -> RunOptions {
    RunOptions {
        config: SolveConfig { mesh, ..SolveConfig::default() },
        levels: LevelGrid::uniform(levels).unwrap(),
        ..RunOptions::default()
    }
}

#[test]
fn builtins_match_hand_written_fields() {
    let e = |s: &str| parse_expression(s).unwrap();
    let ex51 = builtin("ex51-case1").unwrap();
    assert_eq!((ex51.t0, ex51.t1, ex51.beta, ex51.pairing), (1.0, 2.0, 1.0, Pairing::Aligned));
    assert_eq!(ex51.cases, vec![GhCase::Case1]);
    assert_eq!(ex51.cost, e("u^2"));
    assert_eq!(ex51.dynamics, vec![e("(2*t - 1)*x1 - sin(t)*u")]);
    assert_eq!(ex51.boundary_t0, vec![Triple(0.0, 1.0, 2.0)]);
    assert_eq!(ex51.boundary_t1, vec![Triple(-2.0, -1.0, 1.0)]);
    assert_eq!(builtin("ex51-case2").unwrap().cases, vec![GhCase::Case2]);

    let ex52 = builtin("ex52").unwrap();
    assert_eq!((ex52.t0, ex52.t1, ex52.pairing), (0.0, 1.0, Pairing::Interval));
    assert_eq!(ex52.cases, vec![GhCase::Case1, GhCase::Case2]);
    assert_eq!(ex52.dynamics, vec![e("-2*x2 + u"), e("2*x1")]);
    assert_eq!(ex52.boundary_t0, vec![Triple(1.0, 2.0, 3.0); 2]);
    assert_eq!(ex52.boundary_t1, vec![Triple(-0.5, 0.0, 0.5); 2]);

    let ex53 = builtin("ex53").unwrap();
    assert_eq!((ex53.t0, ex53.t1), (0.0, 2.0));
    assert_eq!(ex53.dynamics, vec![e("(2*t - 1)*x1 + sin(t)*u")]);
    assert_eq!(builtin("ex53-crisp").unwrap().boundary_t1, vec![Triple(0.0, 0.0, 0.0)]);
    assert_eq!(builtin("remark42-variational").unwrap().dynamics, vec![e("u")]);
}

#[test]
fn builtins_round_trip() {
    for b in BUILTINS {
        let p = parse_problem(b.text).unwrap();
        assert_eq!(parse_problem(&p.to_string()).unwrap(), p, "{}", b.name);
        assert_eq!(p.name, b.name);
    }
}

#[test]
fn expression_examples() {
    let e = parse_expression("(2*t - 1)*x1 - sin(t)*u").unwrap();
    assert_eq!(e.eval(&Env { t: 1.0, x: &[2.0], u: 0.0 }).unwrap(), 2.0);
    assert_eq!(parse_expression("u^2").unwrap().eval(&Env { t: 0.0, x: &[], u: 3.0 }).unwrap(), 9.0);
    assert_eq!(parse_expression("2^3^2").unwrap().eval(&Env { t: 0.0, x: &[], u: 0.0 }).unwrap(), 512.0);
    assert_eq!(parse_expression("8 - 3 - 2").unwrap().eval(&Env { t: 0.0, x: &[], u: 0.0 }).unwrap(), 3.0);
    assert_eq!(parse_expression("-2^2").unwrap().eval(&Env { t: 0.0, x: &[], u: 0.0 }).unwrap(), -4.0);
}

#[test]
fn file_errors_carry_keys_and_lines() {
    let text = "name = a\nt0 = 0\nt1 = 1\nbeta = 1\ndynamics.x1 = u\nx1.t0 = (0, 1, 2)\nx1.t1 = (0, 1, 2)\n";
    match parse_problem(text) {
        Err(FileError::MissingKey { key, .. }) => assert_eq!(key, "cost"),
        other => panic!("{other:?}"),
    }
    let dup = format!("{text}cost = u^2\ncost = u\n");
    assert!(matches!(parse_problem(&dup), Err(FileError::DuplicateKey { line: 9, first: 8, .. })));
    let bad = text.replace("(0, 1, 2)\nx1.t1", "(2, 1, 0)\nx1.t1").replace("beta = 1\n", "beta = 1\ncost = u^2\n");
    assert!(matches!(parse_problem(&bad), Err(FileError::MalformedTriple { line: 7, .. })));
    let cases = text.replace("beta = 1\n", "beta = 1\ncost = u^2\ncase = 1, 2\n");
    assert!(matches!(parse_problem(&cases), Err(FileError::CaseCountMismatch { line: 6, .. })));
}

#[test]
fn csv_layout_and_values() {
    let outcome = run(&builtin("ex51-case1").unwrap(), &options(3, 101)).unwrap();
    let csv = render_csv(outcome.bundle().unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], HEADER);
    assert_eq!(lines.len() - 1, 101 * 3);
    assert!(!csv.contains('\r') && csv.ends_with('\n'));
    // first row: t = 1, r = 0
    assert!(lines[1].starts_with("1,0,1,0,2,"), "{}", lines[1]);
    let rows: Vec<Vec<f64>> =
        lines[1..].iter().map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    let keys: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r[2], r[1], r[0])).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));

    let outcome = run(&builtin("ex52").unwrap(), &options(3, 101)).unwrap();
    let csv = render_csv(outcome.bundle().unwrap());
    assert_eq!(csv.lines().count() - 1, 101 * 3 * 2);
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        if v[1] == 1.0 && v[2] == 1.0 {
            assert!((v[7] - 2.0 * v[5]).abs() <= 1e-7 * (1.0 + v[7].abs()), "{line}");
        }
    }
}

#[test]
fn constant_solution_rows_are_flat() {
    let text = "name = still\nt0 = 0\nt1 = 1\nbeta = 1\ncost = u^2\ndynamics.x1 = 0\nx1.t0 = (3, 3, 3)\nx1.t1 = (3, 3, 3)\n";
    let outcome = run(&parse_problem(text).unwrap(), &options(2, 21)).unwrap();
    let bundle = outcome.bundle().unwrap();
    for line in render_csv(bundle).lines().skip(1) {
        let v: Vec<&str> = line.split(',').collect();
        assert_eq!((v[3], v[4]), ("3", "3"), "{line}");
    }
    for (_, svg) in render_svgs(bundle) {
        let lines: Vec<&str> = svg.lines().filter(|l| l.contains("<polyline") && l.contains("data-r=\"1\"")).collect();
        assert_eq!(lines.len(), 2);
        let points = |l: &str| l.split("points=\"").nth(1).unwrap().to_owned();
        assert_eq!(points(lines[0]), points(lines[1]));
    }
}

#[test]
fn svg_files_per_quantity() {
    let dir = tempfile::tempdir().unwrap();
    for (name, count) in [("ex51-case1", 2), ("ex52", 3)] {
        let opts = RunOptions { out_dir: Some(dir.path().to_owned()), format: OutputFormat::Svg, ..options(3, 201) };
        let RunOutcome::Solved { files, .. } = run(&builtin(name).unwrap(), &opts).unwrap() else { panic!() };
        assert_eq!(files.len(), count, "{name}");
        let first: Vec<String> = files.iter().map(|f| std::fs::read_to_string(f).unwrap()).collect();
        assert!(first.iter().all(|s| s.starts_with("<svg") && s.contains("stroke-dasharray")));
        run(&builtin(name).unwrap(), &opts).unwrap();
        let second: Vec<String> = files.iter().map(|f| std::fs::read_to_string(f).unwrap()).collect();
        assert_eq!(first, second);
    }
}

#[test]
fn infeasible_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions { out_dir: Some(dir.path().to_owned()), ..options(3, 51) };
    let outcome = run(&builtin("ex53").unwrap(), &opts).unwrap();
    assert_eq!(outcome.exit_code(), 2);
    assert!(outcome.bundle().is_none());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn load_problem_reads_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    std::fs::write(&path, builtin("ex52").unwrap().to_string()).unwrap();
    assert_eq!(load_problem(path.to_str().unwrap()).unwrap(), builtin("ex52").unwrap());
    assert_eq!(load_problem("no-such-thing").unwrap_err().exit_code(), 4);
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let list = bin().arg("list").output().unwrap();
    assert_eq!(list.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&list.stdout).lines().count(), BUILTINS.len());

    let solved = bin().args(["solve", "ex52-crisp", "--levels", "2", "--mesh", "201", "--out", out]).output().unwrap();
    assert_eq!(solved.status.code(), Some(0), "{}", String::from_utf8_lossy(&solved.stderr));
    assert!(dir.path().join("ex52-crisp.csv").exists());

    let both = bin()
        .args(["solve", "ex51-case1", "--levels", "2", "--mesh", "51", "--beta", "0.8", "--format", "both", "--out", out])
        .output()
        .unwrap();
    assert_eq!(both.status.code(), Some(0));
    assert!(dir.path().join("ex51-case1_u.svg").exists() && dir.path().join("ex51-case1.csv").exists());

    let infeasible = bin().args(["solve", "ex53"]).output().unwrap();
    assert_eq!(infeasible.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&infeasible.stderr).contains("infeasible"));
    assert_eq!(bin().args(["check", "ex52"]).output().unwrap().status.code(), Some(0));

    // an unreachable tolerance makes every level fail
    let failed = bin().args(["solve", "ex51-case1", "--levels", "2", "--mesh", "21", "--tol", "1e-15"]).output().unwrap();
    assert_eq!(failed.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("FAILED"));

    for args in [
        vec!["solve", "missing-problem"],
        vec!["solve", "ex52", "--beta", "1.5"],
        vec!["solve", "ex52", "--case", "1"],
        vec!["solve", "ex52", "--case", "1,7"],
        vec!["solve", "ex52", "--mesh", "2"],
        vec!["solve", "ex52", "--bogus"],
        vec!["frobnicate"],
    ] {
        assert_eq!(bin().args(&args).output().unwrap().status.code(), Some(4), "{args:?}");
    }
    let blocked = dir.path().join("file");
    std::fs::write(&blocked, "").unwrap();
    let unwritable = bin().args(["solve", "ex52-crisp", "--levels", "2", "--mesh", "51", "--out"]).arg(&blocked).output().unwrap();
    assert_eq!(unwritable.status.code(), Some(4));
}

#[test]
fn thread_variable_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = Vec::new();
    for threads in ["0", "4"] {
        let out = dir.path().join(threads);
        let status = bin()
            .args(["solve", "ex52", "--levels", "5", "--mesh", "201", "--out"])
            .arg(&out)
            .env("FUZZY_PMP_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        csv.push(std::fs::read(out.join("ex52.csv")).unwrap());
    }
    assert_eq!(csv[0], csv[1]);
}

// Randomized expressions, evaluated directly from the generator tree as an oracle.

#[derive(Debug, Clone)]
enum Gen {
    Num(f64),
    Var(usize),
    Neg(Box<Gen>),
    Bin(char, Box<Gen>, Box<Gen>),
    Pow(Box<Gen>, u32),
    Call(&'static str, Box<Gen>),
}

const VARS: [&str; 4] = ["t", "x1", "x2", "u"];

impl Gen {
    fn text(&self) -> String {
        match self {
            Gen::Num(v) => format!("{v}"),
            Gen::Var(i) => VARS[*i].to_owned(),
            Gen::Neg(a) => format!("-({})", a.text()),
            Gen::Bin(op, a, b) => format!("({}) {op} ({})", a.text(), b.text()),
            Gen::Pow(a, k) => format!("({})^{k}", a.text()),
            Gen::Call(f, a) => format!("{f}({})", a.text()),
        }
    }

    fn value(&self, vals: &[f64; 4]) -> f64 {
        match self {
            Gen::Num(v) => *v,
            Gen::Var(i) => vals[*i],
            Gen::Neg(a) => -a.value(vals),
            Gen::Bin(op, a, b) => {
                let (a, b) = (a.value(vals), b.value(vals));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    _ => a / b,
                }
            }
            Gen::Pow(a, k) => a.value(vals).powf(*k as f64),
            Gen::Call(f, a) => {
                let v = a.value(vals);
                match *f {
                    "sin" => v.sin(),
                    "cos" => v.cos(),
                    _ => v.exp(),
                }
            }
        }
    }
}

fn gen_expr() -> impl Strategy<Value = Gen> {
    let leaf = prop_oneof![(-5.0..5.0f64).prop_map(|v| Gen::Num((v * 100.0).round() / 100.0)), (0usize..4).prop_map(Gen::Var)];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Gen::Neg(Box::new(a))),
            (prop::sample::select(vec!['+', '-', '*', '/']), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Gen::Bin(op, Box::new(a), Box::new(b))),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| Gen::Pow(Box::new(a), k)),
            (prop::sample::select(vec!["sin", "cos", "exp"]), inner).prop_map(|(f, a)| Gen::Call(f, Box::new(a))),
        ]
    })
}

fn agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn compiled_and_tree_evaluation_agree(g in gen_expr(), vals in prop::array::uniform4(-2.0..2.0f64)) {
        let oracle = g.value(&vals);
        prop_assume!(oracle.is_finite() && oracle.abs() < 1e12);
        let expr = parse_expression(&g.text()).unwrap();
        let env = Env { t: vals[0], x: &vals[1..3], u: vals[3] };
        let tree = expr.eval(&env);
        let compiled = expr.compile().eval(&env);
        match (tree, compiled) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.to_bits(), b.to_bits());
                prop_assert!(agree(a, oracle), "{} vs {}", a, oracle);
                let reparsed = parse_expression(&expr.to_string()).unwrap();
                prop_assert!(agree(reparsed.eval(&env).unwrap(), a));
            }
            // a zero divisor somewhere in a branch the oracle also hits
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "tree {:?}, compiled {:?}", a, b),
        }
    }

    #[test]
    fn random_problem_files_round_trip(
        a in gen_expr(),
        c in gen_expr(),
        beta in 0.01..1.0f64,
        lo in -3.0..3.0f64,
        spread in 0.0..2.0f64,
        cases in prop::sample::select(vec!["1, 1", "1, 2", "2, 1", "2, 2"]),
        interval in any::<bool>(),
    ) {
        let p = format!("({lo}, {}, {})", lo + spread, lo + 2.0 * spread);
        let pairing = if interval { "interval" } else { "aligned" };
        let text = format!(
            "name = random\nt0 = 0\nt1 = 2\nbeta = {beta}\npairing = {pairing}\ncase = {cases}\ncost = u^2\n\
             dynamics.x1 = {}\ndynamics.x2 = {}\nx1.t0 = {p}\nx1.t1 = {p}\nx2.t0 = {p}\nx2.t1 = {p}\n",
            a.text(),
            c.text()
        );
        let parsed = parse_problem(&text).unwrap();
        prop_assert_eq!(parse_problem(&parsed.to_string()).unwrap(), parsed);
    }
}
