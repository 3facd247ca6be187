//! Two-point boundary value solvers for the per-level Pontryagin systems.
//!
//! At `beta = 1` the state and costate ODEs are integrated with RK4 and the
//! unknown costates at `t = a` are found by damped Newton shooting. For
//! `0 < beta < 1` the unknowns are the costates at `t = b`; each residual
//! evaluation runs forward/backward sweeps until the trajectories settle.

mod fractional;
mod newton;
mod ode;
mod residual;

use rayon::prelude::*;
use thiserror::Error;

use crate::frac::FracError;
use crate::fuzzy::{FuzzyError, FuzzyTrajectory, LevelGrid, StackingVerdict, TimeGrid};
use crate::pmp::{assemble_pmp_system, PmpError, PmpSystem, ProblemSpec};

pub use fractional::{caputo_ivp, solve_bvp_fractional};
pub use ode::solve_bvp_ode;
pub use residual::residual_norm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BvpError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("fixed-point sweeps stopped contracting after {sweeps} sweeps (change {change:e})")]
    NonContraction { sweeps: usize, change: f64 },
    #[error("fixed-point sweeps did not settle within {sweeps} sweeps (change {change:e})")]
    SweepLimit { sweeps: usize, change: f64 },
    #[error("non-finite value during integration at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Pmp(#[from] PmpError),
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Number of time nodes.
    pub mesh: usize,
    /// Largest accepted residual in every family.
    pub tolerance: f64,
    pub max_newton: usize,
    /// Smallest Newton step fraction tried by the line search.
    pub min_damping: f64,
    pub max_sweeps: usize,
    pub sweep_tolerance: f64,
    /// Step of the continuation in `beta` used after a failed fractional solve.
    pub homotopy_step: f64,
    /// Level parallelism; `0` solves levels sequentially.
    pub threads: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            mesh: 401,
            tolerance: 1e-6,
            max_newton: 100,
            min_damping: 1.0 / 1024.0,
            max_sweeps: 200,
            sweep_tolerance: 1e-12,
            homotopy_step: 0.1,
            threads: 0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<(), BvpError> {
        let bad = |m: &str| Err(BvpError::InvalidConfig(m.into()));
        if self.mesh < 5 {
            return bad("mesh needs at least 5 nodes");
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad("tolerance must lie in (0, 1)");
        }
        if self.max_newton == 0 || self.max_sweeps == 0 {
            return bad("iteration limits must be positive");
        }
        if !(self.min_damping > 0.0 && self.min_damping <= 1.0) {
            return bad("minimum damping must lie in (0, 1]");
        }
        if !(self.sweep_tolerance > 0.0) || !(self.homotopy_step > 0.0 && self.homotopy_step < 1.0) {
            return bad("sweep tolerance and homotopy step must be positive");
        }
        Ok(())
    }
}

/// Max-norm defects of each equation family.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualReport {
    pub state: f64,
    pub adjoint: f64,
    pub stationary: f64,
    pub boundary: f64,
}

impl ResidualReport {
    /// Largest of the state and adjoint residuals.
    pub fn dynamics(&self) -> f64 {
        self.state.max(self.adjoint)
    }

    pub fn max(&self) -> f64 {
        self.dynamics().max(self.stationary).max(self.boundary)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Shooting,
    FractionalSweeps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub converged: bool,
    pub method: Method,
    pub newton_iterations: usize,
    pub sweeps: usize,
    pub final_step_norm: f64,
    /// Orders visited by the continuation, empty when none was needed.
    pub homotopy: Vec<f64>,
    pub message: Option<String>,
}

/// Solution curves at one level. State and costate curves are indexed
/// `[x_low_1..x_low_n, x_up_1..x_up_n]`, controls `[u_low.., u_up..]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSolution {
    pub r: f64,
    pub time: TimeGrid,
    pub x: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub residuals: ResidualReport,
    pub convergence: Convergence,
}

impl LevelSolution {
    pub fn n_states(&self) -> usize {
        self.x.len() / 2
    }

    pub fn n_controls(&self) -> usize {
        self.u.len() / 2
    }

    pub fn x_low(&self, i: usize) -> &[f64] {
        &self.x[i]
    }

    pub fn x_up(&self, i: usize) -> &[f64] {
        &self.x[self.n_states() + i]
    }

    pub fn u_low(&self, k: usize) -> &[f64] {
        &self.u[k]
    }

    pub fn u_up(&self, k: usize) -> &[f64] {
        &self.u[self.n_controls() + k]
    }

    pub fn p1(&self, i: usize) -> &[f64] {
        &self.p[i]
    }

    pub fn p2(&self, i: usize) -> &[f64] {
        &self.p[self.n_states() + i]
    }

    /// Largest pointwise difference of states, controls and costates.
    pub fn max_difference(&self, other: &LevelSolution) -> f64 {
        fn diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
            a.iter()
                .zip(b)
                .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
                .fold(0.0, f64::max)
        }
        diff(&self.x, &other.x).max(diff(&self.u, &other.u))
    }

    /// Samples of every curve at the nodes of a coarser grid whose nodes are
    /// a subset of this grid's nodes.
    pub fn restrict_to(&self, coarse: &TimeGrid) -> Option<LevelSolution> {
        let fine = self.time.nodes();
        let map: Option<Vec<usize>> = coarse
            .nodes()
            .iter()
            .map(|&t| fine.iter().position(|&s| (s - t).abs() <= 1e-12 * (1.0 + t.abs())))
            .collect();
        let map = map?;
        let pick = |curves: &[Vec<f64>]| curves.iter().map(|c| map.iter().map(|&k| c[k]).collect()).collect();
        Some(LevelSolution {
            time: coarse.clone(),
            x: pick(&self.x),
            u: pick(&self.u),
            p: pick(&self.p),
            ..self.clone()
        })
    }
}

pub(crate) fn transpose(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

/// Solves one level with the method matching its order.
pub fn solve_level(system: &PmpSystem, config: &SolveConfig) -> Result<LevelSolution, BvpError> {
    if system.beta.is_integer() {
        solve_bvp_ode(system, config)
    } else {
        solve_bvp_fractional(system, config)
    }
}

/// Per-level solutions of a whole problem, ordered by level.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBundle {
    pub name: String,
    pub beta: f64,
    pub levels: LevelGrid,
    pub time: TimeGrid,
    pub solutions: Vec<LevelSolution>,
}

impl SolutionBundle {
    pub fn all_converged(&self) -> bool {
        self.solutions.iter().all(|s| s.convergence.converged)
    }

    pub fn n_states(&self) -> usize {
        self.solutions[0].n_states()
    }

    pub fn n_controls(&self) -> usize {
        self.solutions[0].n_controls()
    }

    pub fn level(&self, r: f64) -> Option<&LevelSolution> {
        self.levels.index_of(r).map(|i| &self.solutions[i])
    }

    fn trajectory(&self, low: impl Fn(&LevelSolution) -> &[f64], up: impl Fn(&LevelSolution) -> &[f64]) -> FuzzyTrajectory {
        let lows: Vec<Vec<f64>> = self.solutions.iter().map(|s| low(s).to_vec()).collect();
        let ups: Vec<Vec<f64>> = self.solutions.iter().map(|s| up(s).to_vec()).collect();
        FuzzyTrajectory::from_level_curves(self.time.clone(), self.levels.clone(), &lows, &ups)
            .expect("level solutions share the bundle grids")
    }

    pub fn state(&self, i: usize) -> FuzzyTrajectory {
        self.trajectory(|s| s.x_low(i), |s| s.x_up(i))
    }

    pub fn control(&self, k: usize) -> FuzzyTrajectory {
        self.trajectory(|s| s.u_low(k), |s| s.u_up(k))
    }

    /// Stacking verdict of every state at every node, `[state][node]`.
    pub fn stacking(&self) -> Vec<Vec<StackingVerdict>> {
        (0..self.n_states()).map(|i| self.state(i).stacking()).collect()
    }

    pub fn worst_residuals(&self) -> ResidualReport {
        self.solutions.iter().fold(ResidualReport::default(), |acc, s| ResidualReport {
            state: acc.state.max(s.residuals.state),
            adjoint: acc.adjoint.max(s.residuals.adjoint),
            stationary: acc.stationary.max(s.residuals.stationary),
            boundary: acc.boundary.max(s.residuals.boundary),
        })
    }
}

/// Assembles and solves every level of `spec`.
///
/// With `config.threads > 0` levels run on a pool of that many threads; the
/// result order is the level order either way.
pub fn solve_problem(spec: &ProblemSpec, config: &SolveConfig) -> Result<SolutionBundle, BvpError> {
    config.validate()?;
    let levels = spec.levels().clone();
    let systems = levels
        .levels()
        .iter()
        .map(|&r| assemble_pmp_system(spec, r))
        .collect::<Result<Vec<_>, _>>()?;
    let solutions: Vec<LevelSolution> = if config.threads == 0 {
        systems.iter().map(|s| solve_level(s, config)).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| BvpError::InvalidConfig(e.to_string()))?;
        pool.install(|| systems.par_iter().map(|s| solve_level(s, config)).collect::<Result<_, _>>())?
    };
    let time = solutions[0].time.clone();
    Ok(SolutionBundle { name: spec.name.clone(), beta: spec.beta.value(), levels, time, solutions })
}
