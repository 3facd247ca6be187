//! Pontryagin-type necessary conditions for fuzzy fractional optimal control.
//!
//! Costates are stored as `p = [p1 (n), p2 (n)]`. For a Case 1 state `i`
//! the Hamiltonian pairs `p1_i` with `phi_low_i` and `p2_i` with `phi_up_i`;
//! Case 2 swaps the two dynamics endpoints. The adjoint equations read
//! `tD_b^beta p1_i = dH/dx_low_i` and `tD_b^beta p2_i = dH/dx_up_i`, and the
//! state equations `aD_t^beta x_low = psi1`, `aD_t^beta x_up = psi2` where
//! `psi` is the paired dynamics vector.

mod feasibility;
pub mod model;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frac::{FracError, FracOrder};
use crate::fuzzy::{FuzzyError, FuzzyNumber, GhCase, LevelGrid};

pub use feasibility::{check_diameter_feasibility, FeasibilityVerdict};
pub use model::{EndpointModel, Layout, ModelError, Pairing};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PmpError {
    #[error("evaluator failed at t = {t} with arguments {args:?}: {message}")]
    Evaluator { message: String, t: f64, args: Vec<f64> },
    #[error("invalid problem: {0}")]
    InvalidSpec(String),
    #[error("level {0} is not on the level grid")]
    InvalidLevel(f64),
    #[error("stationary solve did not converge at t = {t} after {iterations} iterations (gradient norm {residual:e}, last iterate {last:?})")]
    StationaryFailure { t: f64, iterations: usize, last: Vec<f64>, residual: f64 },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Frac(#[from] FracError),
}

fn evaluator_error(e: ModelError, z: &[f64], t: f64) -> PmpError {
    PmpError::Evaluator { message: e.0, t, args: z.to_vec() }
}

/// Source of Hamiltonian partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMode {
    /// Model callbacks where provided, central differences otherwise.
    #[default]
    Analytic,
    /// Central differences only.
    FiniteDifference,
}

/// A fuzzy fractional optimal control problem in Lagrange form with fixed
/// fuzzy boundary data at both ends.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub beta: FracOrder,
    pub model: Arc<dyn EndpointModel>,
    pub boundary_a: Vec<FuzzyNumber>,
    pub boundary_b: Vec<FuzzyNumber>,
    pub cases: Vec<GhCase>,
    pub gradient: GradientMode,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("beta", &self.beta)
            .field("layout", &self.model.layout())
            .field("boundary_a", &self.boundary_a)
            .field("boundary_b", &self.boundary_b)
            .field("cases", &self.cases)
            .field("gradient", &self.gradient)
            .finish()
    }
}

impl ProblemSpec {
    pub fn layout(&self) -> Layout {
        self.model.layout()
    }

    pub fn levels(&self) -> &LevelGrid {
        self.boundary_a[0].grid()
    }

    pub fn validate(&self) -> Result<(), PmpError> {
        let n = self.layout().n_states;
        let bad = |m: String| Err(PmpError::InvalidSpec(m));
        if !(self.a < self.b) {
            return bad(format!("t0 = {} must be below t1 = {}", self.a, self.b));
        }
        if n == 0 {
            return bad("problem has no states".into());
        }
        if self.boundary_a.len() != n || self.boundary_b.len() != n {
            return bad(format!(
                "{} states but {} initial and {} terminal boundary values",
                n,
                self.boundary_a.len(),
                self.boundary_b.len()
            ));
        }
        if self.cases.len() != n {
            return bad(format!("{} states but {} differentiability cases", n, self.cases.len()));
        }
        let grid = self.levels();
        for x in self.boundary_a.iter().chain(&self.boundary_b) {
            if x.grid() != grid {
                return bad("boundary values use different level grids".into());
            }
            if let crate::fuzzy::StackingVerdict::Violation(v) = x.validate_stacking() {
                return Err(PmpError::Fuzzy(FuzzyError::NotStacked(v)));
            }
        }
        Ok(())
    }

    /// Changes the fractional order, keeping everything else.
    pub fn with_beta(&self, beta: FracOrder) -> Self {
        Self { beta, ..self.clone() }
    }
}

/// Paired pieces of the Hamiltonian at one point.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    /// Gradient of `L_low + L_up` over the endpoint vector.
    pub cost_gradient: Vec<f64>,
    /// Paired dynamics `psi` (length `2n`).
    pub psi: Vec<f64>,
    /// Jacobian of `psi` over the endpoint vector, one row per entry of `psi`.
    pub psi_jacobian: Vec<Vec<f64>>,
}

/// `H = -(L_low + L_up) + p . psi`.
#[derive(Clone)]
pub struct Hamiltonian {
    model: Arc<dyn EndpointModel>,
    cases: Vec<GhCase>,
    mode: GradientMode,
    layout: Layout,
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hamiltonian")
            .field("layout", &self.layout)
            .field("cases", &self.cases)
            .field("mode", &self.mode)
            .finish()
    }
}

fn fd_step(v: f64, rel: f64) -> f64 {
    rel * v.abs().max(1.0)
}

pub fn build_hamiltonian(spec: &ProblemSpec) -> Result<Hamiltonian, PmpError> {
    spec.validate()?;
    Ok(Hamiltonian::new(spec.model.clone(), spec.cases.clone(), spec.gradient))
}

impl Hamiltonian {
    pub fn new(model: Arc<dyn EndpointModel>, cases: Vec<GhCase>, mode: GradientMode) -> Self {
        let layout = model.layout();
        Self { model, cases, mode, layout }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn cases(&self) -> &[GhCase] {
        &self.cases
    }

    pub fn mode(&self) -> GradientMode {
        self.mode
    }

    /// Paired dynamics `psi = [psi1, psi2]`: Case 1 keeps `(phi_low, phi_up)`,
    /// Case 2 swaps them.
    pub fn paired_dynamics(&self, z: &[f64], t: f64) -> Result<Vec<f64>, PmpError> {
        let n = self.layout.n_states;
        let mut low = vec![0.0; n];
        let mut up = vec![0.0; n];
        self.model.dynamics(z, t, &mut low, &mut up).map_err(|e| evaluator_error(e, z, t))?;
        let mut psi = vec![0.0; 2 * n];
        for i in 0..n {
            let (a, b) = match self.cases[i] {
                GhCase::Case1 => (low[i], up[i]),
                GhCase::Case2 => (up[i], low[i]),
            };
            psi[i] = a;
            psi[n + i] = b;
        }
        Ok(psi)
    }

    fn cost_sum(&self, z: &[f64], t: f64) -> Result<f64, PmpError> {
        let (l, u) = self.model.cost(z, t).map_err(|e| evaluator_error(e, z, t))?;
        Ok(l + u)
    }

    pub fn value(&self, z: &[f64], p: &[f64], t: f64) -> Result<f64, PmpError> {
        let psi = self.paired_dynamics(z, t)?;
        Ok(-self.cost_sum(z, t)? + p.iter().zip(&psi).map(|(a, b)| a * b).sum::<f64>())
    }

    fn analytic_enabled(&self) -> bool {
        self.mode == GradientMode::Analytic
    }

    fn cost_gradient(&self, z: &[f64], t: f64) -> Result<Vec<f64>, PmpError> {
        let mut g = vec![0.0; z.len()];
        if self.analytic_enabled() {
            if let Some(res) = self.model.cost_gradient(z, t, &mut g) {
                res.map_err(|e| evaluator_error(e, z, t))?;
                return Ok(g);
            }
        }
        let mut w = z.to_vec();
        for j in 0..z.len() {
            let h = fd_step(z[j], 1e-6);
            w[j] = z[j] + h;
            let fp = self.cost_sum(&w, t)?;
            w[j] = z[j] - h;
            let fm = self.cost_sum(&w, t)?;
            w[j] = z[j];
            g[j] = (fp - fm) / (2.0 * h);
        }
        Ok(g)
    }

    fn psi_jacobian(&self, z: &[f64], t: f64) -> Result<Vec<Vec<f64>>, PmpError> {
        let n = self.layout.n_states;
        let width = z.len();
        if self.analytic_enabled() {
            let mut low = vec![vec![0.0; width]; n];
            let mut up = vec![vec![0.0; width]; n];
            if let Some(res) = self.model.dynamics_jacobian(z, t, &mut low, &mut up) {
                res.map_err(|e| evaluator_error(e, z, t))?;
                let mut jac = vec![Vec::new(); 2 * n];
                for (i, (l, u)) in low.into_iter().zip(up).enumerate() {
                    let (a, b) = match self.cases[i] {
                        GhCase::Case1 => (l, u),
                        GhCase::Case2 => (u, l),
                    };
                    jac[i] = a;
                    jac[n + i] = b;
                }
                return Ok(jac);
            }
        }
        let mut jac = vec![vec![0.0; width]; 2 * n];
        let mut w = z.to_vec();
        for j in 0..width {
            let h = fd_step(z[j], 1e-6);
            w[j] = z[j] + h;
            let fp = self.paired_dynamics(&w, t)?;
            w[j] = z[j] - h;
            let fm = self.paired_dynamics(&w, t)?;
            w[j] = z[j];
            for i in 0..2 * n {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        Ok(jac)
    }

    pub fn parts(&self, z: &[f64], t: f64) -> Result<HamiltonianParts, PmpError> {
        Ok(HamiltonianParts {
            cost_gradient: self.cost_gradient(z, t)?,
            psi: self.paired_dynamics(z, t)?,
            psi_jacobian: self.psi_jacobian(z, t)?,
        })
    }

    /// Gradient of `H` over the endpoint vector.
    pub fn gradient(&self, z: &[f64], p: &[f64], t: f64) -> Result<Vec<f64>, PmpError> {
        let cg = self.cost_gradient(z, t)?;
        let jac = self.psi_jacobian(z, t)?;
        Ok((0..z.len())
            .map(|j| -cg[j] + jac.iter().zip(p).map(|(row, pi)| row[j] * pi).sum::<f64>())
            .collect())
    }

    /// `dH/du` at the controls only.
    pub fn control_gradient(&self, z: &[f64], p: &[f64], t: f64) -> Result<Vec<f64>, PmpError> {
        let g = self.gradient(z, p, t)?;
        Ok(g[self.layout.controls()].to_vec())
    }
}

/// Options of the pointwise stationary solve.
#[derive(Debug, Clone, Copy)]
pub struct StationaryOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self { max_iterations: 50, tolerance: 1e-14 }
    }
}

/// Solves `dH/du_low = dH/du_up = 0` for all controls by damped Newton from
/// the zero seed; `x` holds `[x_low, x_up]`. Returns `[u_low, u_up]`.
pub fn stationary_solve(
    h: &Hamiltonian,
    p: &[f64],
    x: &[f64],
    t: f64,
    options: StationaryOptions,
) -> Result<Vec<f64>, PmpError> {
    let ly = h.layout();
    let nu = 2 * ly.n_controls;
    let mut z = vec![0.0; ly.len()];
    z[ly.states()].copy_from_slice(x);
    if nu == 0 {
        return Ok(Vec::new());
    }
    let off = 2 * ly.n_states;
    let scale = 1.0 + p.iter().chain(x).fold(0.0f64, |m, v| m.max(v.abs()));
    let norm = |g: &[f64]| g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut g = h.control_gradient(&z, p, t)?;
    for _ in 0..options.max_iterations {
        if norm(&g) <= options.tolerance * scale {
            return Ok(z[off..].to_vec());
        }
        // Hessian by central differences of the gradient
        let mut hess = nalgebra::DMatrix::<f64>::zeros(nu, nu);
        let mut w = z.clone();
        for j in 0..nu {
            let step = fd_step(z[off + j], 1e-4);
            w[off + j] = z[off + j] + step;
            let gp = h.control_gradient(&w, p, t)?;
            w[off + j] = z[off + j] - step;
            let gm = h.control_gradient(&w, p, t)?;
            w[off + j] = z[off + j];
            for i in 0..nu {
                hess[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        let rhs = nalgebra::DVector::from_iterator(nu, g.iter().map(|v| -v));
        let Some(delta) = hess.lu().solve(&rhs) else {
            break;
        };
        let g0 = norm(&g);
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> =
                z.iter().enumerate().map(|(i, v)| if i >= off { v + lambda * delta[i - off] } else { *v }).collect();
            let gt = h.control_gradient(&trial, p, t)?;
            if norm(&gt) < g0 || lambda < 1e-8 {
                z = trial;
                g = gt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        let step_norm = lambda * delta.amax();
        if !accepted || step_norm <= 1e-16 * (1.0 + norm(&z[off..])) {
            break;
        }
    }
    let residual = norm(&g);
    if residual <= 1e-9 * scale {
        Ok(z[off..].to_vec())
    } else {
        Err(PmpError::StationaryFailure {
            t,
            iterations: options.max_iterations,
            last: z[off..].to_vec(),
            residual,
        })
    }
}

/// Counts of the equations in a per-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquationCounts {
    pub adjoint: usize,
    pub stationary: usize,
    pub state: usize,
    pub boundary: usize,
}

/// The two-point boundary value problem at one level `r`.
#[derive(Debug, Clone)]
pub struct PmpSystem {
    pub r: f64,
    pub level_index: usize,
    pub a: f64,
    pub b: f64,
    pub beta: FracOrder,
    pub hamiltonian: Hamiltonian,
    /// `[x_low, x_up]` at `t = a`.
    pub x_a: Vec<f64>,
    /// `[x_low, x_up]` at `t = b`.
    pub x_b: Vec<f64>,
    pub stationary: StationaryOptions,
}

pub fn assemble_pmp_system(spec: &ProblemSpec, r: f64) -> Result<PmpSystem, PmpError> {
    let hamiltonian = build_hamiltonian(spec)?;
    let level_index = spec.levels().index_of(r).ok_or(PmpError::InvalidLevel(r))?;
    let stack = |xs: &[FuzzyNumber]| {
        let (low, up): (Vec<f64>, Vec<f64>) = xs.iter().map(|x| x.level(level_index)).unzip();
        [low, up].concat()
    };
    Ok(PmpSystem {
        r: spec.levels().levels()[level_index],
        level_index,
        a: spec.a,
        b: spec.b,
        beta: spec.beta,
        hamiltonian,
        x_a: stack(&spec.boundary_a),
        x_b: stack(&spec.boundary_b),
        stationary: StationaryOptions::default(),
    })
}

impl PmpSystem {
    pub fn layout(&self) -> Layout {
        self.hamiltonian.layout()
    }

    pub fn counts(&self) -> EquationCounts {
        let ly = self.layout();
        EquationCounts {
            adjoint: 2 * ly.n_states,
            stationary: 2 * ly.n_controls,
            state: 2 * ly.n_states,
            boundary: 4 * ly.n_states,
        }
    }

    fn point(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        [x, u].concat()
    }

    /// Right side of the state equations `aD_t^beta [x_low, x_up]`.
    pub fn state_rhs(&self, x: &[f64], u: &[f64], t: f64) -> Result<Vec<f64>, PmpError> {
        self.hamiltonian.paired_dynamics(&self.point(x, u), t)
    }

    /// Right side of the adjoint equations `tD_b^beta [p1, p2] = dH/dx`.
    pub fn adjoint_rhs(&self, x: &[f64], u: &[f64], p: &[f64], t: f64) -> Result<Vec<f64>, PmpError> {
        let g = self.hamiltonian.gradient(&self.point(x, u), p, t)?;
        Ok(g[self.layout().states()].to_vec())
    }

    /// `dH/dx = g + M p` with `(g, M)` independent of `p`.
    pub fn adjoint_linearization(
        &self,
        x: &[f64],
        u: &[f64],
        t: f64,
    ) -> Result<(Vec<f64>, nalgebra::DMatrix<f64>), PmpError> {
        let parts = self.hamiltonian.parts(&self.point(x, u), t)?;
        let ns = 2 * self.layout().n_states;
        let g = parts.cost_gradient[..ns].iter().map(|v| -v).collect();
        let m = nalgebra::DMatrix::from_fn(ns, ns, |i, j| parts.psi_jacobian[j][i]);
        Ok((g, m))
    }

    /// `[dH/du_low, dH/du_up]`.
    pub fn stationary_residual(&self, x: &[f64], u: &[f64], p: &[f64], t: f64) -> Result<Vec<f64>, PmpError> {
        self.hamiltonian.control_gradient(&self.point(x, u), p, t)
    }

    /// Controls `[u_low, u_up]` from the stationary conditions.
    pub fn controls(&self, x: &[f64], p: &[f64], t: f64) -> Result<Vec<f64>, PmpError> {
        stationary_solve(&self.hamiltonian, p, x, t, self.stationary)
    }
}

/// Replaces boundary data by their cores and resets every state to Case 1.
pub fn crisp_reduce(spec: &ProblemSpec) -> ProblemSpec {
    let grid = spec.levels().clone();
    let core = |xs: &[FuzzyNumber]| {
        xs.iter()
            .map(|x| {
                let (lo, hi) = x.core();
                FuzzyNumber::crisp(0.5 * (lo + hi), &grid)
            })
            .collect::<Vec<_>>()
    };
    let name = if spec.name.ends_with("-crisp") { spec.name.clone() } else { format!("{}-crisp", spec.name) };
    ProblemSpec {
        name,
        boundary_a: core(&spec.boundary_a),
        boundary_b: core(&spec.boundary_b),
        cases: vec![GhCase::Case1; spec.cases.len()],
        ..spec.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::model::{coefficient, constant, CrispFunction, DynamicsForm, LinearDynamics, StandardModel};
    use super::*;

    fn ex51(case: GhCase) -> ProblemSpec {
        let layout = Layout::new(1, 1);
        let cost = CrispFunction::new(|_, u, _| Ok(u[0] * u[0])).with_gradient(|_, u, _, g| {
            g[0] = 0.0;
            g[1] = 2.0 * u[0];
            Ok(())
        });
        let lin = LinearDynamics {
            a: vec![vec![coefficient(|t| 2.0 * t - 1.0)]],
            c: vec![vec![coefficient(|t: f64| -t.sin())]],
            d: vec![constant(0.0)],
            pairing: Pairing::Aligned,
        };
        let model = StandardModel::new(layout, cost, DynamicsForm::Linear(lin)).unwrap();
        let g = LevelGrid::default();
        ProblemSpec {
            name: "ex51".into(),
            a: 1.0,
            b: 2.0,
            beta: FracOrder::ONE,
            model: Arc::new(model),
            boundary_a: vec![FuzzyNumber::triangular(0.0, 1.0, 2.0, &g).unwrap()],
            boundary_b: vec![FuzzyNumber::triangular(-2.0, -1.0, 1.0, &g).unwrap()],
            cases: vec![case],
            gradient: GradientMode::Analytic,
        }
    }

    #[test]
    fn hamiltonian_matches_closed_form() {
        for case in [GhCase::Case1, GhCase::Case2] {
            let h = build_hamiltonian(&ex51(case)).unwrap();
            let (xl, xu, ul, uu, p1, p2, t) = (0.3, 1.7, -0.4, 0.9, 1.3, -0.6, 1.4f64);
            let z = [xl, xu, ul, uu];
            let (fl, fu) = ((2.0 * t - 1.0) * xl - t.sin() * ul, (2.0 * t - 1.0) * xu - t.sin() * uu);
            let expected = match case {
                GhCase::Case1 => -(ul * ul + uu * uu) + p1 * fl + p2 * fu,
                GhCase::Case2 => -(ul * ul + uu * uu) + p1 * fu + p2 * fl,
            };
            assert!((h.value(&z, &[p1, p2], t).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn system_counts_and_boundary_rows() {
        let sys = assemble_pmp_system(&ex51(GhCase::Case1), 1.0).unwrap();
        assert_eq!(sys.counts(), EquationCounts { adjoint: 2, stationary: 2, state: 2, boundary: 4 });
        assert_eq!(sys.x_a, vec![1.0, 1.0]);
        assert_eq!(sys.x_b, vec![-1.0, -1.0]);
        assert!(matches!(assemble_pmp_system(&ex51(GhCase::Case1), 0.33), Err(PmpError::InvalidLevel(_))));
    }

    #[test]
    fn adjoint_right_side_at_reference_point() {
        let mut spec = ex51(GhCase::Case1);
        let sys = assemble_pmp_system(&spec, 1.0).unwrap();
        let rhs = sys.adjoint_rhs(&[0.2, 0.5], &[0.1, 0.3], &[1.0, 0.0], 1.5).unwrap();
        assert!((rhs[0] - 2.0).abs() < 1e-14);
        spec.gradient = GradientMode::FiniteDifference;
        let sys = assemble_pmp_system(&spec, 1.0).unwrap();
        let rhs = sys.adjoint_rhs(&[0.2, 0.5], &[0.1, 0.3], &[1.0, 0.0], 1.5).unwrap();
        assert!((rhs[0] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn stationary_closed_forms() {
        let sys = assemble_pmp_system(&ex51(GhCase::Case1), 0.5).unwrap();
        let t = 1.3f64;
        let u = sys.controls(&[0.1, 0.9], &[0.7, -1.1], t).unwrap();
        assert!((u[0] + 0.7 * t.sin() / 2.0).abs() < 1e-13);
        assert!((u[1] - 1.1 * t.sin() / 2.0).abs() < 1e-13);
        let u = sys.controls(&[0.1, 0.9], &[0.0, 0.0], t).unwrap();
        assert_eq!(u, vec![0.0, 0.0]);
        let sys = assemble_pmp_system(&ex51(GhCase::Case2), 0.5).unwrap();
        let u = sys.controls(&[0.1, 0.9], &[0.7, -1.1], t).unwrap();
        assert!((u[0] - 1.1 * t.sin() / 2.0).abs() < 1e-13);
        assert!((u[1] + 0.7 * t.sin() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn zero_problem_has_zero_hamiltonian() {
        let model = StandardModel::new(
            Layout::new(1, 1),
            CrispFunction::new(|_, _, _| Ok(0.0)),
            DynamicsForm::Aligned(vec![CrispFunction::new(|_, _, _| Ok(0.0))]),
        )
        .unwrap();
        let h = Hamiltonian::new(Arc::new(model), vec![GhCase::Case1], GradientMode::Analytic);
        let z = [0.4, 0.8, -1.0, 2.0];
        assert_eq!(h.value(&z, &[3.0, -2.0], 0.5).unwrap(), 0.0);
        assert!(h.gradient(&z, &[3.0, -2.0], 0.5).unwrap().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn crisp_reduce_uses_cores() {
        let spec = crisp_reduce(&ex51(GhCase::Case2));
        assert!(spec.boundary_a[0].is_crisp() && spec.boundary_a[0].core() == (1.0, 1.0));
        assert!(spec.boundary_b[0].core() == (-1.0, -1.0));
        assert_eq!(spec.cases, vec![GhCase::Case1]);
        let again = crisp_reduce(&spec);
        assert_eq!(again.boundary_a, spec.boundary_a);
        assert_eq!(again.name, spec.name);
    }
}
