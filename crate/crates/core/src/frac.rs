//! Discrete fractional operators on a [`TimeGrid`].
//!
//! * Left Riemann–Liouville integral: product-trapezoidal rule (the integrand
//!   is interpolated piecewise linearly and integrated exactly against the
//!   kernel `(x - t)^(alpha - 1)`).
//! * Left Caputo derivative: L1 scheme, i.e. cellwise difference quotients
//!   integrated exactly against `(t - s)^(-alpha)`.
//! * Right Riemann–Liouville derivative: mirrored L1 Caputo part plus the
//!   exact contribution `p(b) (b - t)^(-alpha) / Gamma(1 - alpha)` of the
//!   terminal value.
//!
//! At `alpha = 1` the derivatives use classical five-point finite differences
//! and the right derivative is `-dp/dt`, so the costate equation reduces to
//! `p' = -dH/dx`.

use thiserror::Error;

use crate::fuzzy::{
    classify_endpoint_pair, fd_weights, stencil_window, FuzzyError, FuzzyNumber, FuzzyTrajectory,
    GhCase, TimeGrid,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("fractional order {0} outside (0, 1]")]
    InvalidOrder(f64),
    #[error("{got} samples for a grid of {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("grid has {got} nodes, at least {needed} required")]
    GridTooShort { needed: usize, got: usize },
    #[error("trajectory is not gH-Caputo differentiable at node {node}")]
    NotGhCaputoDifferentiable { node: usize },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

/// Order of a fractional operator, `0 < alpha <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub const ONE: FracOrder = FracOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self, FracError> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(FracError::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 == 1.0
    }
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Which end of the interval the operator integrates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `a` to `t`; tables are lower triangular.
    Left,
    /// `t` to `b`; tables are upper triangular.
    Right,
}

/// Triangular table stored row by row with the column offset of each row.
#[derive(Debug, Clone)]
struct Triangular {
    side: Side,
    rows: Vec<Vec<f64>>,
}

impl Triangular {
    /// First column present in row `k`.
    fn offset(&self, k: usize) -> usize {
        match self.side {
            Side::Left => 0,
            Side::Right => k,
        }
    }
}

fn check_len(time: &TimeGrid, samples: &[f64]) -> Result<(), FracError> {
    if samples.len() == time.len() {
        Ok(())
    } else {
        Err(FracError::LengthMismatch { expected: time.len(), got: samples.len() })
    }
}

/// Exact integrals of the kernel `sigma^(alpha - 1)` against the two linear
/// hat pieces of a cell, where `sigma` runs over `[near, far]` (distances from
/// the evaluation point). Returns `(weight_far_end, weight_near_end)`, i.e.
/// the weights for the sample whose distance is `far` and the one at `near`.
fn hat_integrals(far: f64, near: f64, alpha: f64) -> (f64, f64) {
    let h = far - near;
    let pa = far.powf(alpha) - near.powf(alpha);
    let pa1 = far.powf(alpha + 1.0) - near.powf(alpha + 1.0);
    // integral of sigma^(alpha-1) * (sigma - near) / h, the hat peaking at `far`
    let at_far = (pa1 / (alpha + 1.0) - near * pa / alpha) / h;
    // integral of sigma^(alpha-1) * (far - sigma) / h, the hat peaking at `near`
    let at_near = (far * pa / alpha - pa1 / (alpha + 1.0)) / h;
    (at_far, at_near)
}

/// Product-trapezoidal weights of a Riemann–Liouville fractional integral.
///
/// Row `k` applied to samples gives the integral at node `k`. Each row
/// integrates constants exactly: the left row sums to
/// `(t_k - a)^alpha / Gamma(alpha + 1)`.
#[derive(Debug, Clone)]
pub struct QuadratureWeights {
    time: TimeGrid,
    alpha: FracOrder,
    table: Triangular,
}

impl QuadratureWeights {
    pub fn new(time: &TimeGrid, alpha: FracOrder, side: Side) -> Self {
        let t = time.nodes();
        let n = t.len();
        let a = alpha.value();
        let g = gamma(a);
        let rows = (0..n)
            .map(|k| match side {
                Side::Left => {
                    let mut row = vec![0.0; k + 1];
                    for j in 0..k {
                        let (w_j, w_j1) = hat_integrals(t[k] - t[j], t[k] - t[j + 1], a);
                        row[j] += w_j / g;
                        row[j + 1] += w_j1 / g;
                    }
                    row
                }
                Side::Right => {
                    let mut row = vec![0.0; n - k];
                    for j in k..n - 1 {
                        let (w_j1, w_j) = hat_integrals(t[j + 1] - t[k], t[j] - t[k], a);
                        row[j - k] += w_j / g;
                        row[j + 1 - k] += w_j1 / g;
                    }
                    row
                }
            })
            .collect();
        Self { time: time.clone(), alpha, table: Triangular { side, rows } }
    }

    pub fn left(time: &TimeGrid, alpha: FracOrder) -> Self {
        Self::new(time, alpha, Side::Left)
    }

    pub fn right(time: &TimeGrid, alpha: FracOrder) -> Self {
        Self::new(time, alpha, Side::Right)
    }

    /// Left rectangle (product Euler) weights: row `k` integrates the
    /// piecewise constant interpolant `f(t) = f_j` on `[t_j, t_{j+1})`.
    /// The diagonal entry is zero, so these serve as an explicit predictor.
    pub fn rectangle_left(time: &TimeGrid, alpha: FracOrder) -> Self {
        let t = time.nodes();
        let a = alpha.value();
        let g = gamma(a + 1.0);
        let rows = (0..t.len())
            .map(|k| {
                let mut row: Vec<f64> =
                    (0..k).map(|j| ((t[k] - t[j]).powf(a) - (t[k] - t[j + 1]).powf(a)) / g).collect();
                row.push(0.0);
                row
            })
            .collect();
        Self { time: time.clone(), alpha, table: Triangular { side: Side::Left, rows } }
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn side(&self) -> Side {
        self.table.side
    }

    /// Weights of row `k` and the index of its first column.
    pub fn row(&self, k: usize) -> (usize, &[f64]) {
        (self.table.offset(k), &self.table.rows[k])
    }

    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>, FracError> {
        check_len(&self.time, f)?;
        Ok((0..f.len())
            .map(|k| {
                let (off, row) = self.row(k);
                row.iter().zip(&f[off..]).map(|(w, v)| w * v).sum()
            })
            .collect())
    }
}

/// L1 difference weights of a Caputo derivative.
///
/// Left row `k` holds `w[k][j]` for cells `j < k` with
/// `D x(t_k) = sum_j w[k][j] (x[j+1] - x[j])`. Right row `k` holds the weights
/// for cells `j >= k` with `D p(t_k) = -sum_j w[k][j] (p[j+1] - p[j])`.
#[derive(Debug, Clone)]
pub struct CaputoWeights {
    time: TimeGrid,
    alpha: FracOrder,
    table: Triangular,
    /// `(b - t_k)^(-alpha) / Gamma(1 - alpha)` for `k < n - 1` (right side only).
    terminal: Vec<f64>,
}

impl CaputoWeights {
    pub fn new(time: &TimeGrid, alpha: FracOrder, side: Side) -> Self {
        let t = time.nodes();
        let n = t.len();
        let a = alpha.value();
        let e = 1.0 - a;
        let g = gamma(2.0 - a);
        let cell = |far: f64, near: f64, h: f64| {
            if a == 1.0 {
                // limit: only the cell adjacent to the evaluation point remains
                if near == 0.0 {
                    1.0 / h
                } else {
                    0.0
                }
            } else {
                (far.powf(e) - near.powf(e)) / (h * g)
            }
        };
        let rows = (0..n)
            .map(|k| match side {
                Side::Left => (0..k).map(|j| cell(t[k] - t[j], t[k] - t[j + 1], t[j + 1] - t[j])).collect(),
                Side::Right => (k..n - 1)
                    .map(|j| cell(t[j + 1] - t[k], t[j] - t[k], t[j + 1] - t[j]))
                    .collect(),
            })
            .collect();
        let terminal = match side {
            Side::Right if a < 1.0 => {
                let g1 = gamma(1.0 - a);
                (0..n - 1).map(|k| (time.b() - t[k]).powf(-a) / g1).collect()
            }
            _ => vec![0.0; n.saturating_sub(1)],
        };
        Self { time: time.clone(), alpha, table: Triangular { side, rows }, terminal }
    }

    pub fn left(time: &TimeGrid, alpha: FracOrder) -> Self {
        Self::new(time, alpha, Side::Left)
    }

    pub fn right(time: &TimeGrid, alpha: FracOrder) -> Self {
        Self::new(time, alpha, Side::Right)
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    /// Cell weights of row `k` and the index of its first cell.
    pub fn row(&self, k: usize) -> (usize, &[f64]) {
        (self.table.offset(k), &self.table.rows[k])
    }

    /// Coefficient of `p(b)` in the right Riemann–Liouville derivative at node `k < n - 1`.
    pub fn terminal_coefficient(&self, k: usize) -> f64 {
        self.terminal[k]
    }

    /// Left L1 Caputo derivative at every node (zero at `t = a`).
    pub fn caputo_left(&self, x: &[f64]) -> Result<Vec<f64>, FracError> {
        check_len(&self.time, x)?;
        Ok((0..x.len())
            .map(|k| {
                let (_, row) = self.row(k);
                row.iter().enumerate().map(|(j, w)| w * (x[j + 1] - x[j])).sum()
            })
            .collect())
    }

    /// Right L1 Caputo part `-sum w (p[j+1] - p[j])` at every node.
    pub fn caputo_right(&self, p: &[f64]) -> Result<Vec<f64>, FracError> {
        check_len(&self.time, p)?;
        Ok((0..p.len())
            .map(|k| {
                let (off, row) = self.row(k);
                -row.iter().enumerate().map(|(i, w)| w * (p[off + i + 1] - p[off + i])).sum::<f64>()
            })
            .collect())
    }
}

/// Trapezoidal rule over the full grid.
pub fn trapezoid(time: &TimeGrid, f: &[f64]) -> Result<f64, FracError> {
    check_len(time, f)?;
    let t = time.nodes();
    Ok(t.windows(2).zip(f.windows(2)).map(|(tw, fw)| 0.5 * (tw[1] - tw[0]) * (fw[0] + fw[1])).sum())
}

/// Classical first derivative from five-point finite-difference stencils
/// (centred in the interior, one-sided near the ends).
pub fn fd_derivative(time: &TimeGrid, f: &[f64]) -> Result<Vec<f64>, FracError> {
    check_len(time, f)?;
    if time.len() < 3 {
        return Err(FracError::GridTooShort { needed: 3, got: time.len() });
    }
    let t = time.nodes();
    Ok((0..t.len())
        .map(|k| {
            let window = stencil_window(k, t.len(), 5);
            let w = fd_weights(t[k], &t[window.clone()]);
            window.zip(w).map(|(j, wj)| wj * f[j]).sum()
        })
        .collect())
}

/// Left Riemann–Liouville integral `aI^alpha f` at every node.
pub fn rl_integral_left(time: &TimeGrid, f: &[f64], alpha: FracOrder) -> Result<Vec<f64>, FracError> {
    QuadratureWeights::left(time, alpha).apply(f)
}

/// Right Riemann–Liouville integral `I_b^alpha f` at every node.
pub fn rl_integral_right(time: &TimeGrid, f: &[f64], alpha: FracOrder) -> Result<Vec<f64>, FracError> {
    QuadratureWeights::right(time, alpha).apply(f)
}

/// Left Caputo derivative of order `alpha` at every node.
pub fn caputo_left(time: &TimeGrid, f: &[f64], alpha: FracOrder) -> Result<Vec<f64>, FracError> {
    check_len(time, f)?;
    if time.len() < 3 {
        return Err(FracError::GridTooShort { needed: 3, got: time.len() });
    }
    if alpha.is_integer() {
        return fd_derivative(time, f);
    }
    CaputoWeights::left(time, alpha).caputo_left(f)
}

/// Evaluates the right Riemann–Liouville derivative given precomputed weights.
///
/// The value at `t = b` is `0` when `p(b) = 0` and infinite otherwise.
pub fn rl_derivative_right_with(weights: &CaputoWeights, p: &[f64]) -> Result<Vec<f64>, FracError> {
    let mut d = weights.caputo_right(p)?;
    let n = p.len();
    let p_b = p[n - 1];
    for (k, dk) in d.iter_mut().enumerate().take(n - 1) {
        *dk += p_b * weights.terminal_coefficient(k);
    }
    d[n - 1] = if p_b == 0.0 { 0.0 } else { f64::INFINITY.copysign(p_b) };
    Ok(d)
}

/// Right Riemann–Liouville derivative `tD_b^alpha p` at every node.
///
/// At `alpha = 1` this is `-dp/dt`.
pub fn rl_derivative_right(time: &TimeGrid, p: &[f64], alpha: FracOrder) -> Result<Vec<f64>, FracError> {
    check_len(time, p)?;
    if time.len() < 3 {
        return Err(FracError::GridTooShort { needed: 3, got: time.len() });
    }
    if alpha.is_integer() {
        return Ok(fd_derivative(time, p)?.into_iter().map(|v| -v).collect());
    }
    rl_derivative_right_with(&CaputoWeights::right(time, alpha), p)
}

/// Fuzzy Caputo gH derivative: levelwise `[min, max]` of the endpoint Caputo
/// derivatives, with the differentiability case at every node.
///
/// A node where every level ties is reported as Case 1.
pub fn fuzzy_caputo_gh(
    x: &FuzzyTrajectory,
    beta: FracOrder,
) -> Result<(FuzzyTrajectory, Vec<GhCase>), FracError> {
    let time = x.time();
    let grid = x.levels().clone();
    let m = grid.len();
    let weights = (!beta.is_integer()).then(|| CaputoWeights::left(time, beta));
    let derive = |curve: Vec<f64>| -> Result<Vec<f64>, FracError> {
        match &weights {
            Some(w) => w.caputo_left(&curve),
            None => caputo_left(time, &curve, beta),
        }
    };
    let mut d_low = Vec::with_capacity(m);
    let mut d_up = Vec::with_capacity(m);
    for i in 0..m {
        d_low.push(derive(x.low_curve(i))?);
        d_up.push(derive(x.up_curve(i))?);
    }
    let mut values = Vec::with_capacity(time.len());
    let mut cases = Vec::with_capacity(time.len());
    for k in 0..time.len() {
        let lows: Vec<f64> = d_low.iter().map(|c| c[k]).collect();
        let ups: Vec<f64> = d_up.iter().map(|c| c[k]).collect();
        let (case, low, up) = classify_endpoint_pair(lows, ups, 1e-9)
            .ok_or(FracError::NotGhCaputoDifferentiable { node: k })?;
        values.push(FuzzyNumber::from_levels(grid.clone(), low, up)?);
        cases.push(case);
    }
    Ok((FuzzyTrajectory::new(time.clone(), values)?, cases))
}

/// Defect of the fractional integration-by-parts identity
/// `int p * (aD^beta x) dt = int x * (tD_b^beta p) dt` for `x` vanishing at
/// both ends.
///
/// The right-hand integrand's singular part `p(b) x(t) (b - t)^(-beta) /
/// Gamma(1 - beta)` is integrated with product-trapezoidal weights; the rest
/// with the trapezoidal rule.
pub fn integration_by_parts_residual(
    time: &TimeGrid,
    p: &[f64],
    x: &[f64],
    beta: FracOrder,
) -> Result<f64, FracError> {
    check_len(time, p)?;
    check_len(time, x)?;
    if time.len() < 3 {
        return Err(FracError::GridTooShort { needed: 3, got: time.len() });
    }
    let dx = caputo_left(time, x, beta)?;
    let lhs_integrand: Vec<f64> = p.iter().zip(&dx).map(|(a, b)| a * b).collect();
    let lhs = trapezoid(time, &lhs_integrand)?;
    let rhs = if beta.is_integer() {
        let dp = rl_derivative_right(time, p, beta)?;
        let integrand: Vec<f64> = x.iter().zip(&dp).map(|(a, b)| a * b).collect();
        trapezoid(time, &integrand)?
    } else {
        let weights = CaputoWeights::right(time, beta);
        let regular = weights.caputo_right(p)?;
        let integrand: Vec<f64> = x.iter().zip(&regular).map(|(a, b)| a * b).collect();
        let n = time.len();
        // int_a^b x(s) (b - s)^(-beta) ds / Gamma(1 - beta) = (aI^(1-beta) x)(b)
        let order = FracOrder::new(1.0 - beta.value())?;
        let left = QuadratureWeights::left(time, order);
        let (_, row) = left.row(n - 1);
        let singular: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
        trapezoid(time, &integrand)? + p[n - 1] * singular
    };
    Ok((lhs - rhs).abs())
}
