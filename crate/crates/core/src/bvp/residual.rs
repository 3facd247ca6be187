//! Residuals of solved curves, recomputed with the `frac` operators.

use super::{BvpError, LevelSolution, ResidualReport};
use crate::frac::{fd_derivative, rl_derivative_right, rl_integral_left};
use crate::pmp::PmpSystem;

fn defect(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

/// Max-norm defects of the state, adjoint, stationary and boundary equations.
///
/// At `beta = 1` derivatives come from five-point finite differences. For
/// `beta < 1` the state equations are checked in integral form
/// `x = x(a) + aI^beta psi` and the adjoint equations at every node but `t = b`,
/// where the right derivative is singular.
pub fn residual_norm(solution: &LevelSolution, system: &PmpSystem) -> Result<ResidualReport, BvpError> {
    let time = &solution.time;
    let n = time.len();
    let nodes = time.nodes();
    let ns = solution.x.len();
    let at = |curves: &[Vec<f64>], k: usize| curves.iter().map(|c| c[k]).collect::<Vec<f64>>();

    let mut psi = vec![Vec::with_capacity(n); ns];
    let mut dhdx = vec![Vec::with_capacity(n); ns];
    let mut stationary = 0.0f64;
    for k in 0..n {
        let (x, u, p) = (at(&solution.x, k), at(&solution.u, k), at(&solution.p, k));
        let f = system.state_rhs(&x, &u, nodes[k])?;
        let g = system.adjoint_rhs(&x, &u, &p, nodes[k])?;
        for c in 0..ns {
            psi[c].push(f[c]);
            dhdx[c].push(g[c]);
        }
        for v in system.stationary_residual(&x, &u, &p, nodes[k])? {
            stationary = stationary.max(defect(v, 0.0));
        }
    }

    let beta = system.beta;
    let mut state = 0.0f64;
    let mut adjoint = 0.0f64;
    for c in 0..ns {
        let x = &solution.x[c];
        if beta.is_integer() {
            let dx = fd_derivative(time, x)?;
            for k in 0..n {
                state = state.max(defect(dx[k], psi[c][k]));
            }
        } else {
            let integral = rl_integral_left(time, &psi[c], beta)?;
            for k in 0..n {
                state = state.max(defect(x[k], x[0] + integral[k]));
            }
        }
        let dp = rl_derivative_right(time, &solution.p[c], beta)?;
        let last = if beta.is_integer() { n } else { n - 1 };
        for k in 0..last {
            adjoint = adjoint.max(defect(dp[k], dhdx[c][k]));
        }
    }

    let mut boundary = 0.0f64;
    for c in 0..ns {
        boundary = boundary.max(defect(solution.x[c][0], system.x_a[c]));
        boundary = boundary.max(defect(solution.x[c][n - 1], system.x_b[c]));
    }
    Ok(ResidualReport { state, adjoint, stationary, boundary })
}
