//! Damped Newton iteration with a forward-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use super::BvpError;

pub(crate) struct NewtonOutcome<S> {
    pub state: S,
    pub iterations: usize,
    pub step_norm: f64,
    pub message: Option<String>,
}

pub(crate) struct NewtonOptions {
    pub max_iterations: usize,
    pub min_damping: f64,
    /// Stop once the residual max-norm is at or below this.
    pub target: f64,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::INFINITY })
}

/// Drives `eval(q) = (residual, state)` to zero. Evaluation failures at trial
/// points shrink the step; a failure at the starting point is returned.
pub(crate) fn damped_newton<S>(
    q0: Vec<f64>,
    options: &NewtonOptions,
    mut eval: impl FnMut(&[f64], Option<&S>) -> Result<(Vec<f64>, S), BvpError>,
) -> Result<NewtonOutcome<S>, BvpError> {
    let mut q = q0;
    let (mut f, mut state) = eval(&q, None)?;
    let mut norm = max_norm(&f);
    let n = q.len();
    let mut step_norm = 0.0;
    let mut message = None;
    let mut iterations = 0;
    while norm > options.target {
        if iterations == options.max_iterations {
            message = Some(format!("Newton stopped after {iterations} iterations"));
            break;
        }
        iterations += 1;
        let mut jac = DMatrix::<f64>::zeros(f.len(), n);
        for j in 0..n {
            let h = 1e-7 * q[j].abs().max(1.0);
            let mut qj = q.clone();
            qj[j] += h;
            let (fj, _) = eval(&qj, Some(&state))?;
            for i in 0..f.len() {
                jac[(i, j)] = (fj[i] - f[i]) / h;
            }
        }
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
        let delta = if f.len() == n { jac.clone().lu().solve(&rhs) } else { None };
        let delta = match delta {
            Some(d) => d,
            None => match jac.svd(true, true).solve(&rhs, 1e-14) {
                Ok(d) => d,
                Err(e) => {
                    message = Some(format!("singular shooting Jacobian: {e}"));
                    break;
                }
            },
        };
        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda >= options.min_damping {
            let trial: Vec<f64> = q.iter().zip(delta.iter()).map(|(a, d)| a + lambda * d).collect();
            if let Ok((ft, st)) = eval(&trial, Some(&state)) {
                let nt = max_norm(&ft);
                if nt < norm {
                    accepted = Some((trial, ft, st, nt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((trial, ft, st, nt)) = accepted else {
            message = Some("line search found no decrease".into());
            break;
        };
        step_norm = lambda * delta.amax();
        q = trial;
        f = ft;
        state = st;
        norm = nt;
        if step_norm <= 1e-15 * (1.0 + max_norm(&q)) {
            break;
        }
    }
    Ok(NewtonOutcome { state, iterations, step_norm, message })
}
