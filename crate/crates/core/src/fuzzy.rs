//! Fuzzy numbers represented by their r-level cuts on a finite level grid.
//!
//! A [`FuzzyNumber`] is a stack of closed intervals `[low(r), up(r)]`, one per
//! membership level of a shared [`LevelGrid`]. Arithmetic is levelwise interval
//! arithmetic. The stacking conditions (lower endpoints nondecreasing in `r`,
//! upper endpoints nonincreasing, `low(1) <= up(1)`) are checked explicitly by
//! [`FuzzyNumber::validate_stacking`]; the continuity conditions of the
//! continuous characterization are vacuous on a finite grid.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Absolute tolerance used by stacking and ordering checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error("invalid level grid: {0}")]
    InvalidLevelGrid(String),
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
    #[error("invalid triangular number ({p}, {q}, {s}): expected p <= q <= s")]
    InvalidTriangular { p: f64, q: f64, s: f64 },
    #[error("endpoint arrays have length {low}/{up}, level grid has {levels} levels")]
    LengthMismatch { low: usize, up: usize, levels: usize },
    #[error("operands live on different level grids")]
    GridMismatch,
    #[error("level r = {0} is not on the level grid")]
    NoSuchLevel(f64),
    #[error("interval family is not a fuzzy number: {0}")]
    NotStacked(StackingViolation),
    #[error("gH-difference does not exist as a fuzzy number: {0}")]
    GhDifferenceNonexistent(StackingViolation),
    #[error("trajectory is not gH-differentiable at node {node}: endpoint derivatives change order across levels")]
    NotGhDifferentiable { node: usize },
    #[error("trajectory needs at least {needed} time nodes, got {got}")]
    TrajectoryTooShort { needed: usize, got: usize },
    #[error("node index {index} out of range for {len} nodes")]
    NodeOutOfRange { index: usize, len: usize },
}

/// Ordered membership levels `0 = r_0 < r_1 < ... < r_m = 1`.
#[derive(Clone, PartialEq)]
pub struct LevelGrid {
    levels: Arc<[f64]>,
}

impl LevelGrid {
    pub fn new(levels: Vec<f64>) -> Result<Self, FuzzyError> {
        if levels.len() < 2 {
            return Err(FuzzyError::InvalidLevelGrid(format!(
                "need at least 2 levels, got {}",
                levels.len()
            )));
        }
        if levels[0] != 0.0 || *levels.last().unwrap() != 1.0 {
            return Err(FuzzyError::InvalidLevelGrid(
                "first level must be 0 and last level must be 1".into(),
            ));
        }
        if levels.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(FuzzyError::InvalidLevelGrid("levels must be strictly increasing".into()));
        }
        Ok(Self { levels: levels.into() })
    }

    /// `count` equally spaced levels including 0 and 1.
    pub fn uniform(count: usize) -> Result<Self, FuzzyError> {
        if count < 2 {
            return Err(FuzzyError::InvalidLevelGrid(format!(
                "need at least 2 levels, got {count}"
            )));
        }
        let last = (count - 1) as f64;
        let mut levels: Vec<f64> = (0..count).map(|i| i as f64 / last).collect();
        levels[count - 1] = 1.0;
        Self::new(levels)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of `r` on the grid, matched within [`DEFAULT_TOLERANCE`].
    pub fn index_of(&self, r: f64) -> Option<usize> {
        self.levels.iter().position(|&l| (l - r).abs() <= DEFAULT_TOLERANCE)
    }
}

impl Default for LevelGrid {
    fn default() -> Self {
        Self::uniform(11).expect("11 uniform levels")
    }
}

impl fmt::Debug for LevelGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("LevelGrid").field(&&*self.levels).finish()
    }
}

/// Strictly increasing time nodes from `a` to `b`.
#[derive(Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Arc<[f64]>,
}

impl TimeGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self, FuzzyError> {
        if nodes.len() < 2 {
            return Err(FuzzyError::InvalidTimeGrid(format!(
                "need at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(FuzzyError::InvalidTimeGrid("nodes must be finite".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(FuzzyError::InvalidTimeGrid("nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes: nodes.into() })
    }

    /// `count` equally spaced nodes on `[a, b]`, endpoints exact.
    pub fn uniform(a: f64, b: f64, count: usize) -> Result<Self, FuzzyError> {
        if !(a < b) {
            return Err(FuzzyError::InvalidTimeGrid(format!("need a < b, got [{a}, {b}]")));
        }
        if count < 2 {
            return Err(FuzzyError::InvalidTimeGrid(format!(
                "need at least 2 nodes, got {count}"
            )));
        }
        let n = (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|i| a + (b - a) * (i as f64 / n)).collect();
        nodes[0] = a;
        nodes[count - 1] = b;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    pub fn b(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }
}

impl fmt::Debug for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimeGrid([{}, {}], {} nodes)", self.a(), self.b(), self.len())
    }
}

/// Which endpoint pairing a gH derivative uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GhCase {
    /// `[D x]^r = [d low, d up]`.
    #[default]
    Case1,
    /// `[D x]^r = [d up, d low]`.
    Case2,
}

impl GhCase {
    pub fn tag(self) -> &'static str {
        match self {
            GhCase::Case1 => "case1",
            GhCase::Case2 => "case2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "case1" | "(1)" => Some(GhCase::Case1),
            "2" | "case2" | "(2)" => Some(GhCase::Case2),
            _ => None,
        }
    }
}

impl fmt::Display for GhCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Which stacking condition failed and where.
#[derive(Debug, Clone, PartialEq)]
pub enum StackingViolation {
    /// `low(r) > up(r)` at a single level.
    Inverted { level: usize },
    /// `low(r_i) > low(r_j)` for `i < j`.
    LowerDecreasing { from: usize, to: usize },
    /// `up(r_i) < up(r_j)` for `i < j`.
    UpperIncreasing { from: usize, to: usize },
}

impl fmt::Display for StackingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StackingViolation::Inverted { level } => {
                write!(f, "lower endpoint exceeds upper endpoint at level index {level}")
            }
            StackingViolation::LowerDecreasing { from, to } => {
                write!(f, "lower endpoint decreases between level indices ({from}, {to})")
            }
            StackingViolation::UpperIncreasing { from, to } => {
                write!(f, "upper endpoint increases between level indices ({from}, {to})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StackingVerdict {
    Valid,
    Violation(StackingViolation),
}

impl StackingVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, StackingVerdict::Valid)
    }
}

/// Result of [`FuzzyNumber::compare`] in the levelwise partial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzyOrdering {
    Precedes,
    StrictlyPrecedes,
    Succeeds,
    Equivalent,
    Noncomparable,
}

/// Family of level intervals on a shared [`LevelGrid`].
///
/// Construction only checks shapes; a family that violates the stacking
/// conditions can exist (it is what a failed gH-difference or a numerical
/// trajectory can produce) and is reported by
/// [`validate_stacking`](Self::validate_stacking).
#[derive(Clone, PartialEq)]
pub struct FuzzyNumber {
    grid: LevelGrid,
    low: Vec<f64>,
    up: Vec<f64>,
}

impl FuzzyNumber {
    pub fn from_levels(grid: LevelGrid, low: Vec<f64>, up: Vec<f64>) -> Result<Self, FuzzyError> {
        if low.len() != grid.len() || up.len() != grid.len() {
            return Err(FuzzyError::LengthMismatch {
                low: low.len(),
                up: up.len(),
                levels: grid.len(),
            });
        }
        Ok(Self { grid, low, up })
    }

    /// Like [`from_levels`](Self::from_levels) but rejects families that are not stacked.
    pub fn new(grid: LevelGrid, low: Vec<f64>, up: Vec<f64>) -> Result<Self, FuzzyError> {
        let x = Self::from_levels(grid, low, up)?;
        match x.validate_stacking() {
            StackingVerdict::Valid => Ok(x),
            StackingVerdict::Violation(v) => Err(FuzzyError::NotStacked(v)),
        }
    }

    /// Triangular number `<p, q, s>` with core `q` and support `[p, s]`.
    pub fn triangular(p: f64, q: f64, s: f64, grid: &LevelGrid) -> Result<Self, FuzzyError> {
        if !(p <= q && q <= s) {
            return Err(FuzzyError::InvalidTriangular { p, q, s });
        }
        let low = grid.levels().iter().map(|&r| q - (1.0 - r) * (q - p)).collect();
        let up = grid.levels().iter().map(|&r| q + (1.0 - r) * (s - q)).collect();
        Ok(Self { grid: grid.clone(), low, up })
    }

    pub fn crisp(c: f64, grid: &LevelGrid) -> Self {
        Self { grid: grid.clone(), low: vec![c; grid.len()], up: vec![c; grid.len()] }
    }

    pub fn grid(&self) -> &LevelGrid {
        &self.grid
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn up(&self) -> &[f64] {
        &self.up
    }

    /// `(low, up)` at level index `i`.
    pub fn level(&self, i: usize) -> (f64, f64) {
        (self.low[i], self.up[i])
    }

    /// The interval at membership `r`, which must lie on the grid.
    pub fn cut(&self, r: f64) -> Result<(f64, f64), FuzzyError> {
        let i = self.grid.index_of(r).ok_or(FuzzyError::NoSuchLevel(r))?;
        Ok(self.level(i))
    }

    /// Core interval `[low(1), up(1)]`.
    pub fn core(&self) -> (f64, f64) {
        self.level(self.grid.len() - 1)
    }

    pub fn is_crisp(&self) -> bool {
        let c = self.low[0];
        self.low.iter().chain(&self.up).all(|&v| v == c)
    }

    pub fn validate_stacking(&self) -> StackingVerdict {
        self.validate_stacking_with(DEFAULT_TOLERANCE)
    }

    /// Stacking check using absolute tolerance `tol` on every comparison.
    ///
    /// Monotonicity is checked on adjacent levels, which on a grid is
    /// equivalent to the check over all pairs.
    pub fn validate_stacking_with(&self, tol: f64) -> StackingVerdict {
        let m = self.grid.len();
        for i in 0..m {
            if self.low[i] > self.up[i] + tol {
                return StackingVerdict::Violation(StackingViolation::Inverted { level: i });
            }
        }
        for i in 0..m - 1 {
            if self.low[i] > self.low[i + 1] + tol {
                return StackingVerdict::Violation(StackingViolation::LowerDecreasing {
                    from: i,
                    to: i + 1,
                });
            }
            if self.up[i] + tol < self.up[i + 1] {
                return StackingVerdict::Violation(StackingViolation::UpperIncreasing {
                    from: i,
                    to: i + 1,
                });
            }
        }
        StackingVerdict::Valid
    }

    fn same_grid(&self, other: &Self) -> Result<(), FuzzyError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(FuzzyError::GridMismatch)
        }
    }

    fn zip_levels(
        &self,
        other: &Self,
        f: impl Fn((f64, f64), (f64, f64)) -> (f64, f64),
    ) -> Result<Self, FuzzyError> {
        self.same_grid(other)?;
        let (low, up) = (0..self.grid.len())
            .map(|i| f(self.level(i), other.level(i)))
            .unzip();
        Ok(Self { grid: self.grid.clone(), low, up })
    }

    pub fn add(&self, other: &Self) -> Result<Self, FuzzyError> {
        self.zip_levels(other, |(xl, xu), (yl, yu)| (xl + yl, xu + yu))
    }

    pub fn scale(&self, lambda: f64) -> Self {
        let (low, up) = self
            .low
            .iter()
            .zip(&self.up)
            .map(|(&l, &u)| if lambda >= 0.0 { (lambda * l, lambda * u) } else { (lambda * u, lambda * l) })
            .unzip();
        Self { grid: self.grid.clone(), low, up }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, FuzzyError> {
        self.zip_levels(other, |(xl, xu), (yl, yu)| {
            let products = [xl * yl, xl * yu, xu * yl, xu * yu];
            let lo = products.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
    }

    /// Generalized Hukuhara difference `self ⊖_gH other`.
    pub fn gh_difference(&self, other: &Self) -> Result<Self, FuzzyError> {
        let z = self.zip_levels(other, |(xl, xu), (yl, yu)| {
            let (dl, du) = (xl - yl, xu - yu);
            (dl.min(du), dl.max(du))
        })?;
        match z.validate_stacking() {
            StackingVerdict::Valid => Ok(z),
            StackingVerdict::Violation(v) => Err(FuzzyError::GhDifferenceNonexistent(v)),
        }
    }

    /// Hausdorff distance restricted to the grid levels.
    pub fn hausdorff_distance(&self, other: &Self) -> Result<f64, FuzzyError> {
        self.same_grid(other)?;
        Ok((0..self.grid.len())
            .map(|i| (self.low[i] - other.low[i]).abs().max((self.up[i] - other.up[i]).abs()))
            .fold(0.0, f64::max))
    }

    /// `self ⪯ other`: both endpoints below at every level (within tolerance).
    pub fn precedes(&self, other: &Self) -> Result<bool, FuzzyError> {
        self.same_grid(other)?;
        let tol = DEFAULT_TOLERANCE;
        Ok((0..self.grid.len())
            .all(|i| self.low[i] <= other.low[i] + tol && self.up[i] <= other.up[i] + tol))
    }

    pub fn compare(&self, other: &Self) -> Result<FuzzyOrdering, FuzzyError> {
        let fwd = self.precedes(other)?;
        let bwd = other.precedes(self)?;
        let tol = DEFAULT_TOLERANCE;
        Ok(match (fwd, bwd) {
            (true, true) => FuzzyOrdering::Equivalent,
            (true, false) => {
                let strict = (0..self.grid.len()).any(|i| {
                    self.low[i] + tol < other.low[i] && self.up[i] + tol < other.up[i]
                });
                if strict {
                    FuzzyOrdering::StrictlyPrecedes
                } else {
                    FuzzyOrdering::Precedes
                }
            }
            (false, true) => FuzzyOrdering::Succeeds,
            (false, false) => FuzzyOrdering::Noncomparable,
        })
    }

    /// Width `up(r) - low(r)` of the cut at `r`.
    pub fn diameter(&self, r: f64) -> Result<f64, FuzzyError> {
        let (l, u) = self.cut(r)?;
        Ok(u - l)
    }
}

impl fmt::Debug for FuzzyNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FuzzyNumber").field("low", &self.low).field("up", &self.up).finish()
    }
}

/// Fuzzy values on a time grid, all sharing one level grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyTrajectory {
    time: TimeGrid,
    values: Vec<FuzzyNumber>,
}

impl FuzzyTrajectory {
    pub fn new(time: TimeGrid, values: Vec<FuzzyNumber>) -> Result<Self, FuzzyError> {
        if values.len() != time.len() {
            return Err(FuzzyError::InvalidTimeGrid(format!(
                "{} values for {} time nodes",
                values.len(),
                time.len()
            )));
        }
        if let Some(first) = values.first() {
            if values.iter().any(|v| v.grid != first.grid) {
                return Err(FuzzyError::GridMismatch);
            }
        }
        Ok(Self { time, values })
    }

    /// Builds a trajectory from endpoint curves `low[level][node]`, `up[level][node]`.
    pub fn from_level_curves(
        time: TimeGrid,
        grid: LevelGrid,
        low: &[Vec<f64>],
        up: &[Vec<f64>],
    ) -> Result<Self, FuzzyError> {
        if low.len() != grid.len() || up.len() != grid.len() {
            return Err(FuzzyError::LengthMismatch { low: low.len(), up: up.len(), levels: grid.len() });
        }
        if low.iter().chain(up).any(|c| c.len() != time.len()) {
            return Err(FuzzyError::InvalidTimeGrid("level curve length differs from time grid".into()));
        }
        let values = (0..time.len())
            .map(|k| {
                FuzzyNumber::from_levels(
                    grid.clone(),
                    low.iter().map(|c| c[k]).collect(),
                    up.iter().map(|c| c[k]).collect(),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(time, values)
    }

    /// Samples a closure `f(t) -> FuzzyNumber` on every node.
    pub fn sample(time: TimeGrid, f: impl Fn(f64) -> FuzzyNumber) -> Result<Self, FuzzyError> {
        let values = time.nodes().iter().map(|&t| f(t)).collect();
        Self::new(time, values)
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn values(&self) -> &[FuzzyNumber] {
        &self.values
    }

    pub fn levels(&self) -> &LevelGrid {
        self.values[0].grid()
    }

    /// Lower endpoint curve at level index `i`.
    pub fn low_curve(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v.low[i]).collect()
    }

    pub fn up_curve(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v.up[i]).collect()
    }

    /// Stacking verdict at every time node.
    pub fn stacking(&self) -> Vec<StackingVerdict> {
        self.values.iter().map(FuzzyNumber::validate_stacking).collect()
    }
}

/// Result of numerically gH-differentiating a trajectory at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct GhDerivative {
    pub value: FuzzyNumber,
    pub case: GhCase,
    pub stacking: StackingVerdict,
}

/// Finite-difference weights for the first derivative at `x0` from `points`
/// (Fornberg's recursion, exact for polynomials of degree `< points.len()`).
pub(crate) fn fd_weights(x0: f64, points: &[f64]) -> Vec<f64> {
    let n = points.len();
    // c[j][k]: weight of point j for derivative order k (k = 0, 1).
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = points[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = points[i] - x0;
        for j in 0..i {
            let c3 = points[i] - points[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// Index window of `width` nodes used for the derivative at node `k`:
/// centred where possible, shifted one-sided at the ends.
pub(crate) fn stencil_window(k: usize, len: usize, width: usize) -> std::ops::Range<usize> {
    let width = width.min(len);
    let half = width / 2;
    let start = k.saturating_sub(half).min(len - width);
    start..start + width
}

/// Second-order finite-difference derivative of `samples` at node `k`.
fn three_point_derivative(nodes: &[f64], samples: &[f64], k: usize) -> f64 {
    let window = stencil_window(k, nodes.len(), 3);
    let w = fd_weights(nodes[k], &nodes[window.clone()]);
    window.zip(w).map(|(j, wj)| wj * samples[j]).sum()
}

/// Numeric gH derivative of a trajectory at node `k`.
///
/// Endpoint derivatives use three-point stencils (central in the interior,
/// one-sided at the ends). Case 1 is reported when `d low <= d up` at every
/// level, which includes crisp derivatives; Case 2 when the order is reversed
/// at every level.
pub fn gh_derivative_numeric(x: &FuzzyTrajectory, k: usize) -> Result<GhDerivative, FuzzyError> {
    let len = x.time.len();
    if len < 3 {
        return Err(FuzzyError::TrajectoryTooShort { needed: 3, got: len });
    }
    if k >= len {
        return Err(FuzzyError::NodeOutOfRange { index: k, len });
    }
    let grid = x.levels().clone();
    let nodes = x.time.nodes();
    let mut d_low = Vec::with_capacity(grid.len());
    let mut d_up = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        d_low.push(three_point_derivative(nodes, &x.low_curve(i), k));
        d_up.push(three_point_derivative(nodes, &x.up_curve(i), k));
    }
    let (case, low, up) = classify_endpoint_pair(d_low, d_up, DEFAULT_TOLERANCE * 1e3)
        .ok_or(FuzzyError::NotGhDifferentiable { node: k })?;
    let value = FuzzyNumber::from_levels(grid, low, up)?;
    let stacking = value.validate_stacking();
    Ok(GhDerivative { value, case, stacking })
}

/// Orders a pair of endpoint derivative families into a gH case.
///
/// Returns `(case, low, up)` or `None` when the order flips across levels.
pub(crate) fn classify_endpoint_pair(
    d_low: Vec<f64>,
    d_up: Vec<f64>,
    tol: f64,
) -> Option<(GhCase, Vec<f64>, Vec<f64>)> {
    let scale = |a: f64, b: f64| tol * (1.0 + a.abs().max(b.abs()));
    if d_low.iter().zip(&d_up).all(|(&l, &u)| l <= u + scale(l, u)) {
        Some((GhCase::Case1, d_low, d_up))
    } else if d_low.iter().zip(&d_up).all(|(&l, &u)| u <= l + scale(l, u)) {
        Some((GhCase::Case2, d_up, d_low))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> LevelGrid {
        LevelGrid::default()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn level_grid_rejects_bad_input() {
        assert!(LevelGrid::new(vec![0.0]).is_err());
        assert!(LevelGrid::new(vec![0.1, 1.0]).is_err());
        assert!(LevelGrid::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert_eq!(LevelGrid::uniform(3).unwrap().levels(), &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn triangular_endpoint_formulas() {
        let g = grid();
        let x = FuzzyNumber::triangular(0.0, 1.0, 2.0, &g).unwrap();
        let rs = g.levels();
        assert_close(x.low(), rs, 1e-15);
        assert_close(x.up(), &rs.iter().map(|r| 2.0 - r).collect::<Vec<_>>(), 1e-15);

        let y = FuzzyNumber::triangular(-2.0, -1.0, 1.0, &g).unwrap();
        assert_close(y.low(), &rs.iter().map(|r| -2.0 + r).collect::<Vec<_>>(), 1e-15);
        assert_close(y.up(), &rs.iter().map(|r| 1.0 - 2.0 * r).collect::<Vec<_>>(), 1e-15);

        let c = FuzzyNumber::triangular(3.0, 3.0, 3.0, &g).unwrap();
        assert!(c.is_crisp());
        assert!(matches!(
            FuzzyNumber::triangular(1.0, 0.0, 2.0, &g),
            Err(FuzzyError::InvalidTriangular { .. })
        ));
        assert!(FuzzyNumber::triangular(0.0, 3.0, 2.0, &g).is_err());
    }

    #[test]
    fn stacking_verdicts() {
        let g = grid();
        assert!(FuzzyNumber::triangular(0.0, 1.0, 2.0, &g).unwrap().validate_stacking().is_valid());
        assert!(FuzzyNumber::triangular(1.0, 2.0, 3.0, &g).unwrap().validate_stacking().is_valid());
        let g2 = LevelGrid::new(vec![0.0, 1.0]).unwrap();
        let bad = FuzzyNumber::from_levels(g2, vec![0.0, -0.5], vec![1.0, 1.0]).unwrap();
        assert_eq!(
            bad.validate_stacking(),
            StackingVerdict::Violation(StackingViolation::LowerDecreasing { from: 0, to: 1 })
        );
    }

    #[test]
    fn gh_difference_examples() {
        let g = grid();
        let a = FuzzyNumber::triangular(1.0, 2.0, 3.0, &g).unwrap();
        let b = FuzzyNumber::triangular(0.0, 1.0, 2.0, &g).unwrap();
        let z = a.gh_difference(&a).unwrap();
        assert!(z.low().iter().chain(z.up()).all(|&v| v == 0.0));

        let z = a.gh_difference(&b).unwrap();
        assert_close(z.low(), &vec![1.0; g.len()], 1e-15);
        assert_close(z.up(), &vec![1.0; g.len()], 1e-15);

        let z = b.gh_difference(&FuzzyNumber::crisp(1.0, &g)).unwrap();
        assert_close(z.low(), &g.levels().iter().map(|r| r - 1.0).collect::<Vec<_>>(), 1e-15);
        assert_close(z.up(), &g.levels().iter().map(|r| 1.0 - r).collect::<Vec<_>>(), 1e-15);
    }

    #[test]
    fn gh_difference_nonexistent() {
        // Levelwise differences are [0, 1] at r = 0 and [0, 2] at r = 1: upper endpoint grows.
        let g = LevelGrid::new(vec![0.0, 1.0]).unwrap();
        let x = FuzzyNumber::from_levels(g.clone(), vec![0.0, 0.0], vec![3.0, 2.0]).unwrap();
        let y = FuzzyNumber::from_levels(g, vec![0.0, 0.0], vec![2.0, 0.0]).unwrap();
        assert!(matches!(x.gh_difference(&y), Err(FuzzyError::GhDifferenceNonexistent(_))));
    }

    #[test]
    fn arithmetic_examples() {
        let g = grid();
        let x = FuzzyNumber::triangular(0.0, 1.0, 2.0, &g).unwrap();
        let reflected = FuzzyNumber::triangular(-2.0, -1.0, 0.0, &g).unwrap();
        assert!(x.scale(-1.0).hausdorff_distance(&reflected).unwrap() < 1e-15);
        let p = FuzzyNumber::crisp(2.0, &g)
            .multiply(&FuzzyNumber::triangular(1.0, 2.0, 3.0, &g).unwrap())
            .unwrap();
        let expected = FuzzyNumber::triangular(2.0, 4.0, 6.0, &g).unwrap();
        assert!(p.hausdorff_distance(&expected).unwrap() < 1e-14);
        let s = x.add(&FuzzyNumber::triangular(-2.0, -1.0, 1.0, &g).unwrap()).unwrap();
        assert_close(s.low(), &g.levels().iter().map(|r| -2.0 + 2.0 * r).collect::<Vec<_>>(), 1e-15);
        assert_close(s.up(), &g.levels().iter().map(|r| 3.0 - 3.0 * r).collect::<Vec<_>>(), 1e-15);
        assert!(matches!(
            x.add(&FuzzyNumber::crisp(0.0, &LevelGrid::uniform(3).unwrap())),
            Err(FuzzyError::GridMismatch)
        ));
    }

    #[test]
    fn hausdorff_and_compare() {
        let g = grid();
        let a = FuzzyNumber::triangular(0.0, 1.0, 2.0, &g).unwrap();
        let b = FuzzyNumber::triangular(1.0, 2.0, 3.0, &g).unwrap();
        assert_eq!(a.hausdorff_distance(&a).unwrap(), 0.0);
        assert!((a.hausdorff_distance(&b).unwrap() - 1.0).abs() < 1e-15);
        let z = FuzzyNumber::crisp(0.0, &g);
        let w = FuzzyNumber::triangular(-1.0, 0.0, 1.0, &g).unwrap();
        assert!((z.hausdorff_distance(&w).unwrap() - 1.0).abs() < 1e-15);

        assert_eq!(a.compare(&b).unwrap(), FuzzyOrdering::StrictlyPrecedes);
        assert_eq!(b.compare(&a).unwrap(), FuzzyOrdering::Succeeds);
        assert_eq!(a.compare(&a).unwrap(), FuzzyOrdering::Equivalent);
        // Wider interval around the same core is not comparable.
        assert_eq!(z.compare(&w).unwrap(), FuzzyOrdering::Noncomparable);
    }

    #[test]
    fn diameter_examples() {
        let g = grid();
        let x = FuzzyNumber::triangular(1.0, 2.0, 3.0, &g).unwrap();
        for &r in g.levels() {
            assert!((x.diameter(r).unwrap() - (2.0 - 2.0 * r)).abs() < 1e-15);
        }
        assert_eq!(FuzzyNumber::crisp(4.0, &g).diameter(0.3).unwrap(), 0.0);
        let y = FuzzyNumber::triangular(-2.0, -1.0, 1.0, &g).unwrap();
        assert_eq!(y.diameter(0.0).unwrap(), 3.0);
        assert_eq!(y.diameter(0.33), Err(FuzzyError::NoSuchLevel(0.33)));
    }

    #[test]
    fn fd_weights_are_exact_for_polynomials() {
        let pts = [0.0, 0.1, 0.25, 0.4, 0.7];
        let w = fd_weights(0.25, &pts);
        let d: f64 = pts.iter().zip(&w).map(|(x, wi)| wi * (x * x * x - 2.0 * x)).sum();
        assert!((d - (3.0 * 0.0625 - 2.0)).abs() < 1e-11);
        let w = fd_weights(0.0, &[0.0, 0.5, 1.0]);
        assert_close(&w, &[-3.0, 4.0, -1.0], 1e-14);
    }

    #[test]
    fn gh_derivative_cases() {
        let g = grid();
        let time = TimeGrid::uniform(0.0, 1.0, 21).unwrap();
        let constant = FuzzyTrajectory::sample(time.clone(), |_| {
            FuzzyNumber::triangular(0.0, 1.0, 2.0, &g).unwrap()
        })
        .unwrap();
        let d = gh_derivative_numeric(&constant, 5).unwrap();
        assert_eq!(d.case, GhCase::Case1);
        assert!(d.value.low().iter().chain(d.value.up()).all(|v| v.abs() < 1e-12));

        let tri = FuzzyNumber::triangular(0.0, 1.0, 2.0, &g).unwrap();
        let growing = FuzzyTrajectory::sample(time.clone(), |t| tri.scale(t)).unwrap();
        for k in [0, 7, 20] {
            let d = gh_derivative_numeric(&growing, k).unwrap();
            assert_eq!(d.case, GhCase::Case1);
            assert!(d.value.hausdorff_distance(&tri).unwrap() < 1e-12);
            assert!(d.stacking.is_valid());
        }

        let shrinking = FuzzyTrajectory::sample(time, |t| {
            FuzzyNumber::triangular(-(1.0 - t), 0.0, 1.0 - t, &g).unwrap()
        })
        .unwrap();
        let d = gh_derivative_numeric(&shrinking, 10).unwrap();
        assert_eq!(d.case, GhCase::Case2);
        let (l0, u0) = d.value.level(0);
        assert!((l0 + 1.0).abs() < 1e-12 && (u0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gh_derivative_mixed_orders_fail() {
        let g = LevelGrid::new(vec![0.0, 1.0]).unwrap();
        let time = TimeGrid::uniform(0.0, 1.0, 5).unwrap();
        // level 0 widens, level 1 narrows
        let x = FuzzyTrajectory::sample(time, |t| {
            FuzzyNumber::from_levels(g.clone(), vec![-1.0 - t, -0.5 + 0.5 * t], vec![1.0 + t, 0.5 - 0.5 * t]).unwrap()
        })
        .unwrap();
        assert_eq!(gh_derivative_numeric(&x, 2), Err(FuzzyError::NotGhDifferentiable { node: 2 }));
    }
}
