//! Shooting on the terminal costates for `0 < beta < 1`.
//!
//! One residual evaluation alternates
//! 1. a backward sweep of the right-derivative adjoint equations, solved node
//!    by node with the L1 table (the equations are linear in `p`),
//! 2. pointwise stationary solves for the controls,
//! 3. a forward predictor-corrector sweep of the state equations in integral
//!    form (rectangle predictor, product-trapezoid corrector),
//!
//! until successive trajectories agree. Newton then updates `p(b)` against
//! the state boundary values at `t = b`.

use nalgebra::{DMatrix, DVector};

use super::newton::{damped_newton, NewtonOptions};
use super::ode::{finish, shoot, Sweep};
use super::{residual_norm, transpose, BvpError, Convergence, LevelSolution, Method, SolveConfig};
use crate::frac::{CaputoWeights, FracOrder, QuadratureWeights};
use crate::fuzzy::TimeGrid;
use crate::pmp::PmpSystem;

const CORRECTOR_TOL: f64 = 1e-14;
const CORRECTOR_MAX: usize = 200;

struct Tables {
    trapezoid: QuadratureWeights,
    rectangle: QuadratureWeights,
    right: CaputoWeights,
}

impl Tables {
    fn new(time: &TimeGrid, beta: FracOrder) -> Self {
        Self {
            trapezoid: QuadratureWeights::left(time, beta),
            rectangle: QuadratureWeights::rectangle_left(time, beta),
            right: CaputoWeights::right(time, beta),
        }
    }
}

fn forward(
    time: &TimeGrid,
    tables: &Tables,
    x0: &[f64],
    mut rhs: impl FnMut(usize, f64, &[f64]) -> Result<Vec<f64>, BvpError>,
) -> Result<Vec<Vec<f64>>, BvpError> {
    let t = time.nodes();
    let dim = x0.len();
    let mut xs = vec![x0.to_vec()];
    let mut fs = vec![rhs(0, t[0], x0)?];
    for k in 1..t.len() {
        let (_, trap) = tables.trapezoid.row(k);
        let (_, rect) = tables.rectangle.row(k);
        let mut history = x0.to_vec();
        let mut x = x0.to_vec();
        for (j, f) in fs.iter().enumerate() {
            for c in 0..dim {
                history[c] += trap[j] * f[c];
                x[c] += rect[j] * f[c];
            }
        }
        let w = trap[k];
        for _ in 0..CORRECTOR_MAX {
            let f = rhs(k, t[k], &x)?;
            let next: Vec<f64> = history.iter().zip(&f).map(|(h, v)| h + w * v).collect();
            let change = next.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let size = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            x = next;
            if !change.is_finite() {
                return Err(BvpError::NonFinite { t: t[k] });
            }
            if change <= CORRECTOR_TOL * (1.0 + size) {
                break;
            }
        }
        fs.push(rhs(k, t[k], &x)?);
        xs.push(x);
    }
    Ok(xs)
}

/// Solves `aD_t^beta x = f(t, x)` with `x(a) = x0` by the predictor-corrector
/// scheme. Returns node values `[node][component]`.
pub fn caputo_ivp(
    time: &TimeGrid,
    beta: FracOrder,
    x0: &[f64],
    mut f: impl FnMut(f64, &[f64]) -> Result<Vec<f64>, BvpError>,
) -> Result<Vec<Vec<f64>>, BvpError> {
    let tables = Tables::new(time, beta);
    forward(time, &tables, x0, |_, t, x| f(t, x))
}

fn backward(
    system: &PmpSystem,
    time: &TimeGrid,
    tables: &Tables,
    p_b: &[f64],
    x: &[Vec<f64>],
    u: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, BvpError> {
    let t = time.nodes();
    let n = t.len();
    let dim = p_b.len();
    let mut p = vec![vec![0.0; dim]; n];
    p[n - 1] = p_b.to_vec();
    for k in (0..n - 1).rev() {
        let (_, w) = tables.right.row(k);
        let (g, m) = system.adjoint_linearization(&x[k], &u[k], t[k])?;
        let s = tables.right.terminal_coefficient(k);
        let mut rhs = DVector::from_iterator(dim, (0..dim).map(|c| g[c] + w[0] * p[k + 1][c] - p_b[c] * s));
        for (i, wi) in w.iter().enumerate().skip(1) {
            for c in 0..dim {
                rhs[c] += wi * (p[k + i + 1][c] - p[k + i][c]);
            }
        }
        let a = DMatrix::<f64>::identity(dim, dim) * w[0] - m;
        let sol = a.lu().solve(&rhs).ok_or(BvpError::NonFinite { t: t[k] })?;
        if sol.iter().any(|v| !v.is_finite()) {
            return Err(BvpError::NonFinite { t: t[k] });
        }
        p[k] = sol.iter().copied().collect();
    }
    Ok(p)
}

fn max_change(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

fn max_abs(a: &[Vec<f64>]) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Linear interpolation of the boundary data with zero controls.
fn initial_guess(system: &PmpSystem, time: &TimeGrid) -> Sweep {
    let (a, b) = (system.a, system.b);
    let x = time
        .nodes()
        .iter()
        .map(|&t| {
            let s = (t - a) / (b - a);
            system.x_a.iter().zip(&system.x_b).map(|(xa, xb)| xa + s * (xb - xa)).collect()
        })
        .collect();
    let nu = 2 * system.layout().n_controls;
    Sweep { x, u: vec![vec![0.0; nu]; time.len()], p: vec![vec![0.0; system.x_a.len()]; time.len()] }
}

fn sweeps(
    system: &PmpSystem,
    config: &SolveConfig,
    time: &TimeGrid,
    tables: &Tables,
    p_b: &[f64],
    start: Sweep,
    count: &mut usize,
) -> Result<Sweep, BvpError> {
    let mut cur = start;
    let mut previous = f64::INFINITY;
    let mut growing = 0;
    let mut change = f64::INFINITY;
    for _ in 0..config.max_sweeps {
        *count += 1;
        let p = backward(system, time, tables, p_b, &cur.x, &cur.u)?;
        let nu = 2 * system.layout().n_controls;
        let mut u = vec![vec![0.0; nu]; time.len()];
        let x = forward(time, tables, &system.x_a, |k, t, x| {
            let uk = system.controls(x, &p[k], t)?;
            let f = system.state_rhs(x, &uk, t)?;
            u[k] = uk;
            Ok(f)
        })?;
        let next = Sweep { x, u, p };
        change = max_change(&next.x, &cur.x).max(max_change(&next.p, &cur.p));
        let scale = 1.0 + max_abs(&next.x).max(max_abs(&next.p));
        cur = next;
        if !change.is_finite() {
            return Err(BvpError::NonFinite { t: system.b });
        }
        if change <= config.sweep_tolerance * scale {
            return Ok(cur);
        }
        if change > previous {
            growing += 1;
            if growing >= 5 {
                return Err(BvpError::NonContraction { sweeps: *count, change });
            }
        } else {
            growing = 0;
        }
        previous = change;
    }
    Err(BvpError::SweepLimit { sweeps: config.max_sweeps, change })
}

fn solve_at(
    system: &PmpSystem,
    config: &SolveConfig,
    time: &TimeGrid,
    p_b: Vec<f64>,
) -> Result<LevelSolution, BvpError> {
    let tables = Tables::new(time, system.beta);
    let scale = 1.0 + system.x_b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let options = NewtonOptions {
        max_iterations: config.max_newton,
        min_damping: config.min_damping,
        target: 1e-12 * scale,
    };
    let mut count = 0usize;
    let outcome = damped_newton(p_b, &options, |q, warm: Option<&Sweep>| {
        let start = match warm {
            Some(s) => Sweep { x: s.x.clone(), u: s.u.clone(), p: s.p.clone() },
            None => initial_guess(system, time),
        };
        let sweep = sweeps(system, config, time, &tables, q, start, &mut count)?;
        let last = sweep.x.last().expect("non-empty grid");
        let f = last.iter().zip(&system.x_b).map(|(a, b)| a - b).collect();
        Ok((f, sweep))
    })?;
    let sweep = outcome.state;
    let mut solution = LevelSolution {
        r: system.r,
        time: time.clone(),
        x: transpose(&sweep.x),
        u: transpose(&sweep.u),
        p: transpose(&sweep.p),
        residuals: Default::default(),
        convergence: Convergence {
            converged: false,
            method: Method::FractionalSweeps,
            newton_iterations: outcome.iterations,
            sweeps: count,
            final_step_norm: outcome.step_norm,
            homotopy: Vec::new(),
            message: outcome.message,
        },
    };
    solution.residuals = residual_norm(&solution, system)?;
    finish(&mut solution, config);
    Ok(solution)
}

/// Orders visited by the continuation from `beta = 1` down to `target`.
fn homotopy_path(target: f64, step: f64) -> Vec<f64> {
    let mut path = vec![1.0];
    let mut k = 1;
    loop {
        let b = 1.0 - k as f64 * step;
        if b <= target + 1e-12 {
            break;
        }
        path.push(b);
        k += 1;
    }
    path.push(target);
    path
}

/// Fractional shooting; falls back to continuation in `beta` from the
/// classical solve when the direct attempt fails.
pub fn solve_bvp_fractional(system: &PmpSystem, config: &SolveConfig) -> Result<LevelSolution, BvpError> {
    config.validate()?;
    if system.beta.is_integer() {
        return Err(BvpError::InvalidConfig("the fractional solver needs beta < 1".into()));
    }
    let time = TimeGrid::uniform(system.a, system.b, config.mesh)?;
    let direct = solve_at(system, config, &time, vec![0.0; system.x_a.len()]);
    let failure = match direct {
        Ok(s) if s.convergence.converged => return Ok(s),
        Ok(s) => Ok(s),
        Err(e @ BvpError::Pmp(crate::pmp::PmpError::Evaluator { .. })) => return Err(e),
        Err(e) => Err(e),
    };

    let path = homotopy_path(system.beta.value(), config.homotopy_step);
    let mut stage = system.clone();
    stage.beta = FracOrder::ONE;
    let mut current = shoot(&stage, config, &time, vec![0.0; system.x_a.len()])?;
    for &b in &path[1..] {
        if !current.convergence.converged {
            break;
        }
        stage.beta = FracOrder::new(b)?;
        let p_b: Vec<f64> = current.p.iter().map(|c| *c.last().expect("non-empty")).collect();
        current = match solve_at(&stage, config, &time, p_b) {
            Ok(s) => s,
            Err(e) => {
                // report the direct attempt when the continuation also breaks down
                return match failure {
                    Ok(mut s) => {
                        s.convergence.message = Some(format!("continuation failed at beta = {b}: {e}"));
                        Ok(s)
                    }
                    Err(_) => Err(e),
                };
            }
        };
    }
    let reached = stage.beta == system.beta;
    current.convergence.homotopy = path;
    if reached && current.convergence.converged {
        return Ok(current);
    }
    match failure {
        Ok(mut s) => {
            s.convergence.homotopy = current.convergence.homotopy;
            if s.convergence.message.is_none() {
                s.convergence.message = Some("continuation in beta did not converge".into());
            }
            Ok(s)
        }
        Err(_) if reached => Ok(current),
        Err(e) => Err(e),
    }
}
