//! RK4 shooting for the classical (`beta = 1`) systems.

use super::newton::{damped_newton, NewtonOptions};
use super::{residual_norm, transpose, BvpError, Convergence, LevelSolution, Method, SolveConfig};
use crate::fuzzy::TimeGrid;
use crate::pmp::PmpSystem;

/// Node values of a trajectory, `[node][component]`.
pub(crate) struct Sweep {
    pub x: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
}

fn derivative(system: &PmpSystem, t: f64, y: &[f64]) -> Result<(Vec<f64>, Vec<f64>), BvpError> {
    let ns = 2 * system.layout().n_states;
    let (x, p) = y.split_at(ns);
    let u = system.controls(x, p, t)?;
    let mut dy = system.state_rhs(x, &u, t)?;
    dy.extend(system.adjoint_rhs(x, &u, p, t)?.into_iter().map(|v| -v));
    if dy.iter().any(|v| !v.is_finite()) {
        return Err(BvpError::NonFinite { t });
    }
    Ok((dy, u))
}

/// Integrates states and costates from `t = a` with costates `p0`.
fn integrate(system: &PmpSystem, time: &TimeGrid, p0: &[f64]) -> Result<Sweep, BvpError> {
    let t = time.nodes();
    let mut y: Vec<f64> = system.x_a.iter().chain(p0).copied().collect();
    let ns = system.x_a.len();
    let mut out = Sweep { x: Vec::with_capacity(t.len()), u: Vec::with_capacity(t.len()), p: Vec::with_capacity(t.len()) };
    let axpy = |y: &[f64], k: &[f64], h: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    for step in 0..t.len() {
        let (k1, u) = derivative(system, t[step], &y)?;
        out.x.push(y[..ns].to_vec());
        out.p.push(y[ns..].to_vec());
        out.u.push(u);
        if step + 1 == t.len() {
            break;
        }
        let h = t[step + 1] - t[step];
        let tm = t[step] + 0.5 * h;
        let (k2, _) = derivative(system, tm, &axpy(&y, &k1, 0.5 * h))?;
        let (k3, _) = derivative(system, tm, &axpy(&y, &k2, 0.5 * h))?;
        let (k4, _) = derivative(system, t[step + 1], &axpy(&y, &k3, h))?;
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(out)
}

pub(crate) fn shoot(
    system: &PmpSystem,
    config: &SolveConfig,
    time: &TimeGrid,
    p0: Vec<f64>,
) -> Result<LevelSolution, BvpError> {
    let scale = 1.0 + system.x_b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let options = NewtonOptions {
        max_iterations: config.max_newton,
        min_damping: config.min_damping,
        target: 1e-12 * scale,
    };
    let outcome = damped_newton(p0, &options, |q, _| {
        let sweep = integrate(system, time, q)?;
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
            method: Method::Shooting,
            newton_iterations: outcome.iterations,
            sweeps: 0,
            final_step_norm: outcome.step_norm,
            homotopy: Vec::new(),
            message: outcome.message,
        },
    };
    solution.residuals = residual_norm(&solution, system)?;
    finish(&mut solution, config);
    Ok(solution)
}

/// Marks the solution converged when every residual family is within tolerance.
pub(crate) fn finish(solution: &mut LevelSolution, config: &SolveConfig) {
    let ok = solution.residuals.within(config.tolerance);
    solution.convergence.converged = ok;
    if ok {
        solution.convergence.message = None;
    } else if solution.convergence.message.is_none() {
        solution.convergence.message = Some(format!(
            "residuals above tolerance {:e}: state {:e}, adjoint {:e}, stationary {:e}, boundary {:e}",
            config.tolerance,
            solution.residuals.state,
            solution.residuals.adjoint,
            solution.residuals.stationary,
            solution.residuals.boundary
        ));
    }
}

/// Shooting on the costates at `t = a` with RK4 integration.
pub fn solve_bvp_ode(system: &PmpSystem, config: &SolveConfig) -> Result<LevelSolution, BvpError> {
    config.validate()?;
    if !system.beta.is_integer() {
        return Err(BvpError::InvalidConfig("the shooting solver needs beta = 1".into()));
    }
    let time = TimeGrid::uniform(system.a, system.b, config.mesh)?;
    shoot(system, config, &time, vec![0.0; system.x_a.len()])
}
