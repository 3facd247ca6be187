//! Endpoint evaluators for cost and dynamics.
//!
//! All evaluators take the flat endpoint vector
//! `z = [x_low (n), x_up (n), u_low (m), u_up (m)]` and the time `t`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct ModelError(pub String);

/// Sizes of the flat endpoint vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n_states: usize,
    pub n_controls: usize,
}

impl Layout {
    pub fn new(n_states: usize, n_controls: usize) -> Self {
        Self { n_states, n_controls }
    }

    pub fn len(&self) -> usize {
        2 * (self.n_states + self.n_controls)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_low(&self, i: usize) -> usize {
        i
    }

    pub fn x_up(&self, i: usize) -> usize {
        self.n_states + i
    }

    pub fn u_low(&self, k: usize) -> usize {
        2 * self.n_states + k
    }

    pub fn u_up(&self, k: usize) -> usize {
        2 * self.n_states + self.n_controls + k
    }

    /// Index range of all state endpoints.
    pub fn states(&self) -> std::ops::Range<usize> {
        0..2 * self.n_states
    }

    /// Index range of all control endpoints.
    pub fn controls(&self) -> std::ops::Range<usize> {
        2 * self.n_states..self.len()
    }

    /// Packs endpoint blocks into a flat vector.
    pub fn pack(&self, x_low: &[f64], x_up: &[f64], u_low: &[f64], u_up: &[f64]) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.len());
        z.extend_from_slice(x_low);
        z.extend_from_slice(x_up);
        z.extend_from_slice(u_low);
        z.extend_from_slice(u_up);
        z
    }
}

/// Pairing of endpoints when evaluating fuzzy dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Lower endpoints feed the lower value: `phi_low = phi(x_low, u_low, t)`.
    #[default]
    Aligned,
    /// Interval arithmetic on linear dynamics: a negative coefficient swaps
    /// which endpoint of its operand enters each bound.
    Interval,
}

impl Pairing {
    pub fn tag(self) -> &'static str {
        match self {
            Pairing::Aligned => "aligned",
            Pairing::Interval => "interval",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "aligned" => Some(Pairing::Aligned),
            "interval" => Some(Pairing::Interval),
            _ => None,
        }
    }
}

/// Dynamics coefficients of linear systems
/// `phi_i = sum_j a_ij(t) x_j + sum_k c_ik(t) u_k + d_i(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCoefficients {
    pub a: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub d: Vec<f64>,
}

/// Evaluator of the fuzzy problem's endpoint functions.
pub trait EndpointModel: Send + Sync {
    fn layout(&self) -> Layout;

    /// `(L_low, L_up)`.
    fn cost(&self, z: &[f64], t: f64) -> Result<(f64, f64), ModelError>;

    /// Writes `phi_low` and `phi_up` for every state.
    fn dynamics(&self, z: &[f64], t: f64, low: &mut [f64], up: &mut [f64]) -> Result<(), ModelError>;

    /// Gradient of `L_low + L_up` with respect to `z`, if available.
    fn cost_gradient(&self, _z: &[f64], _t: f64, _out: &mut [f64]) -> Option<Result<(), ModelError>> {
        None
    }

    /// Jacobians of `phi_low` and `phi_up` (row `i` is state `i`, columns follow `z`).
    fn dynamics_jacobian(
        &self,
        _z: &[f64],
        _t: f64,
        _low: &mut [Vec<f64>],
        _up: &mut [Vec<f64>],
    ) -> Option<Result<(), ModelError>> {
        None
    }

    /// Coefficients at `t` when the dynamics are linear, with the pairing used.
    fn linear_coefficients(&self, _t: f64) -> Option<(Pairing, Result<LinearCoefficients, ModelError>)> {
        None
    }
}

pub type CrispValueFn = Arc<dyn Fn(&[f64], &[f64], f64) -> Result<f64, ModelError> + Send + Sync>;
pub type CrispGradientFn =
    Arc<dyn Fn(&[f64], &[f64], f64, &mut [f64]) -> Result<(), ModelError> + Send + Sync>;
pub type CoefficientFn = Arc<dyn Fn(f64) -> Result<f64, ModelError> + Send + Sync>;

/// Crisp scalar function `f(x, u, t)` with an optional gradient over `(x, u)`.
#[derive(Clone)]
pub struct CrispFunction {
    pub value: CrispValueFn,
    pub gradient: Option<CrispGradientFn>,
}

impl CrispFunction {
    pub fn new(value: impl Fn(&[f64], &[f64], f64) -> Result<f64, ModelError> + Send + Sync + 'static) -> Self {
        Self { value: Arc::new(value), gradient: None }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64], &[f64], f64, &mut [f64]) -> Result<(), ModelError> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }
}

impl fmt::Debug for CrispFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CrispFunction").field("gradient", &self.gradient.is_some()).finish()
    }
}

/// Linear dynamics with time-dependent coefficients.
#[derive(Clone)]
pub struct LinearDynamics {
    pub a: Vec<Vec<CoefficientFn>>,
    pub c: Vec<Vec<CoefficientFn>>,
    pub d: Vec<CoefficientFn>,
    pub pairing: Pairing,
}

impl fmt::Debug for LinearDynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearDynamics")
            .field("n_states", &self.a.len())
            .field("n_controls", &self.c.first().map_or(0, Vec::len))
            .field("pairing", &self.pairing)
            .finish()
    }
}

pub fn constant(value: f64) -> CoefficientFn {
    Arc::new(move |_| Ok(value))
}

pub fn coefficient(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> CoefficientFn {
    Arc::new(move |t| Ok(f(t)))
}

impl LinearDynamics {
    pub fn evaluate(&self, t: f64) -> Result<LinearCoefficients, ModelError> {
        let row = |fs: &Vec<CoefficientFn>| fs.iter().map(|f| f(t)).collect::<Result<Vec<_>, _>>();
        Ok(LinearCoefficients {
            a: self.a.iter().map(row).collect::<Result<_, _>>()?,
            c: self.c.iter().map(row).collect::<Result<_, _>>()?,
            d: self.d.iter().map(|f| f(t)).collect::<Result<_, _>>()?,
        })
    }
}

/// Form of the dynamics in a [`StandardModel`].
#[derive(Debug, Clone)]
pub enum DynamicsForm {
    Linear(LinearDynamics),
    /// One crisp function per state, evaluated with aligned endpoints.
    Aligned(Vec<CrispFunction>),
}

/// Model built from a crisp cost (always evaluated with aligned endpoints)
/// and either linear or aligned dynamics.
#[derive(Debug, Clone)]
pub struct StandardModel {
    layout: Layout,
    cost: CrispFunction,
    dynamics: DynamicsForm,
}

impl StandardModel {
    pub fn new(layout: Layout, cost: CrispFunction, dynamics: DynamicsForm) -> Result<Self, ModelError> {
        let (n, m) = (layout.n_states, layout.n_controls);
        match &dynamics {
            DynamicsForm::Linear(lin) => {
                if lin.a.len() != n
                    || lin.a.iter().any(|r| r.len() != n)
                    || lin.c.len() != n
                    || lin.c.iter().any(|r| r.len() != m)
                    || lin.d.len() != n
                {
                    return Err(ModelError("linear coefficient shapes do not match the layout".into()));
                }
            }
            DynamicsForm::Aligned(fs) if fs.len() != n => {
                return Err(ModelError(format!("{} dynamics functions for {} states", fs.len(), n)));
            }
            DynamicsForm::Aligned(_) => {}
        }
        Ok(Self { layout, cost, dynamics })
    }

    pub fn dynamics_form(&self) -> &DynamicsForm {
        &self.dynamics
    }

    fn split<'a>(&self, z: &'a [f64], upper: bool) -> (&'a [f64], &'a [f64]) {
        let (n, m) = (self.layout.n_states, self.layout.n_controls);
        let (xs, us) = z.split_at(2 * n);
        if upper {
            (&xs[n..], &us[m..])
        } else {
            (&xs[..n], &us[..m])
        }
    }
}

impl EndpointModel for StandardModel {
    fn layout(&self) -> Layout {
        self.layout
    }

    fn cost(&self, z: &[f64], t: f64) -> Result<(f64, f64), ModelError> {
        let (xl, ul) = self.split(z, false);
        let (xu, uu) = self.split(z, true);
        Ok(((self.cost.value)(xl, ul, t)?, (self.cost.value)(xu, uu, t)?))
    }

    fn dynamics(&self, z: &[f64], t: f64, low: &mut [f64], up: &mut [f64]) -> Result<(), ModelError> {
        let ly = self.layout;
        match &self.dynamics {
            DynamicsForm::Aligned(fs) => {
                let (xl, ul) = self.split(z, false);
                let (xu, uu) = self.split(z, true);
                for (i, f) in fs.iter().enumerate() {
                    low[i] = (f.value)(xl, ul, t)?;
                    up[i] = (f.value)(xu, uu, t)?;
                }
            }
            DynamicsForm::Linear(lin) => {
                let coef = lin.evaluate(t)?;
                for i in 0..ly.n_states {
                    let (mut lo, mut hi) = (coef.d[i], coef.d[i]);
                    let terms = coef.a[i]
                        .iter()
                        .enumerate()
                        .map(|(j, &a)| (a, z[ly.x_low(j)], z[ly.x_up(j)]))
                        .chain(coef.c[i].iter().enumerate().map(|(k, &c)| (c, z[ly.u_low(k)], z[ly.u_up(k)])));
                    for (w, vl, vu) in terms {
                        match lin.pairing {
                            Pairing::Aligned => {
                                lo += w * vl;
                                hi += w * vu;
                            }
                            Pairing::Interval if w >= 0.0 => {
                                lo += w * vl;
                                hi += w * vu;
                            }
                            Pairing::Interval => {
                                lo += w * vu;
                                hi += w * vl;
                            }
                        }
                    }
                    low[i] = lo;
                    up[i] = hi;
                }
            }
        }
        Ok(())
    }

    fn cost_gradient(&self, z: &[f64], t: f64, out: &mut [f64]) -> Option<Result<(), ModelError>> {
        let grad = self.cost.gradient.as_ref()?;
        let ly = self.layout;
        let (n, m) = (ly.n_states, ly.n_controls);
        let mut run = || -> Result<(), ModelError> {
            let mut g = vec![0.0; n + m];
            for upper in [false, true] {
                let (x, u) = self.split(z, upper);
                grad(x, u, t, &mut g)?;
                for j in 0..n {
                    out[if upper { ly.x_up(j) } else { ly.x_low(j) }] = g[j];
                }
                for k in 0..m {
                    out[if upper { ly.u_up(k) } else { ly.u_low(k) }] = g[n + k];
                }
            }
            Ok(())
        };
        Some(run())
    }

    fn dynamics_jacobian(
        &self,
        z: &[f64],
        t: f64,
        low: &mut [Vec<f64>],
        up: &mut [Vec<f64>],
    ) -> Option<Result<(), ModelError>> {
        let ly = self.layout;
        let (n, m) = (ly.n_states, ly.n_controls);
        for row in low.iter_mut().chain(up.iter_mut()) {
            row.iter_mut().for_each(|v| *v = 0.0);
        }
        match &self.dynamics {
            DynamicsForm::Aligned(fs) => {
                if fs.iter().any(|f| f.gradient.is_none()) {
                    return None;
                }
                let mut run = || -> Result<(), ModelError> {
                    let mut g = vec![0.0; n + m];
                    for (i, f) in fs.iter().enumerate() {
                        let grad = f.gradient.as_ref().expect("checked above");
                        for upper in [false, true] {
                            let (x, u) = self.split(z, upper);
                            grad(x, u, t, &mut g)?;
                            let row = if upper { &mut up[i] } else { &mut low[i] };
                            for j in 0..n {
                                row[if upper { ly.x_up(j) } else { ly.x_low(j) }] = g[j];
                            }
                            for k in 0..m {
                                row[if upper { ly.u_up(k) } else { ly.u_low(k) }] = g[n + k];
                            }
                        }
                    }
                    Ok(())
                };
                Some(run())
            }
            DynamicsForm::Linear(lin) => {
                let coef = match lin.evaluate(t) {
                    Ok(c) => c,
                    Err(e) => return Some(Err(e)),
                };
                for i in 0..n {
                    let cols = (0..n)
                        .map(|j| (coef.a[i][j], ly.x_low(j), ly.x_up(j)))
                        .chain((0..m).map(|k| (coef.c[i][k], ly.u_low(k), ly.u_up(k))));
                    for (w, cl, cu) in cols {
                        let swap = lin.pairing == Pairing::Interval && w < 0.0;
                        if swap {
                            low[i][cu] = w;
                            up[i][cl] = w;
                        } else {
                            low[i][cl] = w;
                            up[i][cu] = w;
                        }
                    }
                }
                Some(Ok(()))
            }
        }
    }

    fn linear_coefficients(&self, t: f64) -> Option<(Pairing, Result<LinearCoefficients, ModelError>)> {
        match &self.dynamics {
            DynamicsForm::Linear(lin) => Some((lin.pairing, lin.evaluate(t))),
            DynamicsForm::Aligned(_) => None,
        }
    }
}
