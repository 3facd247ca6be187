//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! name = ex51-case1
//! t0 = 1
//! t1 = 2
//! beta = 1
//! pairing = aligned
//! case = 1
//! cost = u^2
//! [dynamics]
//! x1 = (2*t - 1)*x1 - sin(t)*u
//! [x1]
//! t0 = (0, 1, 2)
//! t1 = (-2, -1, 1)
//! ```
//!
//! A `[section]` header prefixes the following keys with `section.`, so
//! `dynamics.x1 = ...` may also be written without the header.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use super::expr::{parse_expression, Compiled, Env, Expr, ExprError, Var};
use crate::frac::FracOrder;
use crate::fuzzy::{FuzzyNumber, GhCase, LevelGrid};
use crate::pmp::model::{CoefficientFn, CrispFunction, DynamicsForm, LinearDynamics, StandardModel};
use crate::pmp::{GradientMode, Layout, ModelError, Pairing, PmpError, ProblemSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FileError {
    #[error("line {line}: expected `key = value` or `[section]`")]
    Syntax { line: usize },
    #[error("line {line}: missing key `{key}`")]
    MissingKey { key: String, line: usize },
    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    DuplicateKey { key: String, line: usize, first: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: malformed triple `{text}`, expected `(p, q, s)` with p <= q <= s")]
    MalformedTriple { line: usize, text: String },
    #[error("line {line}: {cases} cases listed for {states} states")]
    CaseCountMismatch { line: usize, cases: usize, states: usize },
    #[error("line {line}: invalid value for `{key}`: {message}")]
    InvalidValue { line: usize, key: String, message: String },
    #[error("line {line}: in `{key}`: {source}")]
    Expression { line: usize, key: String, source: ExprError },
}

/// Boundary triple `(p, q, s)` of a triangular fuzzy number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple(pub f64, pub f64, pub f64);

impl Triple {
    pub fn fuzzy(&self, grid: &LevelGrid) -> Result<FuzzyNumber, PmpError> {
        Ok(FuzzyNumber::triangular(self.0, self.1, self.2, grid)?)
    }

    pub fn is_crisp(&self) -> bool {
        self.0 == self.1 && self.1 == self.2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub name: String,
    pub t0: f64,
    pub t1: f64,
    pub beta: f64,
    pub pairing: Pairing,
    pub cases: Vec<GhCase>,
    pub cost: Expr,
    pub dynamics: Vec<Expr>,
    pub boundary_t0: Vec<Triple>,
    pub boundary_t1: Vec<Triple>,
}

fn parse_triple(text: &str, line: usize) -> Result<Triple, FileError> {
    let bad = || FileError::MalformedTriple { line, text: text.to_owned() };
    let inner = text.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
    let parts: Vec<f64> = inner
        .split(',')
        .map(|p| p.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(bad)?;
    match parts[..] {
        [p, q, s] if p <= q && q <= s => Ok(Triple(p, q, s)),
        _ => Err(bad()),
    }
}

struct Entry {
    value: String,
    line: usize,
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, FileError> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    let mut section = String::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(FileError::Syntax { line });
            }
            section = name.to_owned();
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(FileError::Syntax { line })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(FileError::Syntax { line });
        }
        let key = if section.is_empty() { key.to_owned() } else { format!("{section}.{key}") };
        if let Some(first) = entries.get(&key) {
            return Err(FileError::DuplicateKey { key, line, first: first.line });
        }
        entries.insert(key, Entry { value: value.trim().to_owned(), line });
    }

    let end = last_line.max(1);
    let mut take = |key: &str| entries.remove(key);
    let require = |e: Option<Entry>, key: &str| e.ok_or(FileError::MissingKey { key: key.to_owned(), line: end });
    let number = |e: &Entry, key: &str| {
        e.value.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| FileError::InvalidValue {
            line: e.line,
            key: key.to_owned(),
            message: format!("`{}` is not a number", e.value),
        })
    };
    let expression = |e: &Entry, key: &str| {
        parse_expression(&e.value).map_err(|source| FileError::Expression { line: e.line, key: key.to_owned(), source })
    };

    let name = require(take("name"), "name")?;
    if name.value.is_empty() {
        return Err(FileError::InvalidValue { line: name.line, key: "name".into(), message: "empty name".into() });
    }
    let t0e = require(take("t0"), "t0")?;
    let t1e = require(take("t1"), "t1")?;
    let (t0, t1) = (number(&t0e, "t0")?, number(&t1e, "t1")?);
    if !(t0 < t1) {
        return Err(FileError::InvalidValue { line: t1e.line, key: "t1".into(), message: format!("t1 = {t1} must exceed t0 = {t0}") });
    }
    let betae = require(take("beta"), "beta")?;
    let beta = number(&betae, "beta")?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(FileError::InvalidValue { line: betae.line, key: "beta".into(), message: "beta must lie in (0, 1]".into() });
    }
    let pairing = match take("pairing") {
        None => Pairing::Aligned,
        Some(e) => Pairing::parse(&e.value).ok_or_else(|| FileError::InvalidValue {
            line: e.line,
            key: "pairing".into(),
            message: format!("`{}` is neither `aligned` nor `interval`", e.value),
        })?,
    };
    let coste = require(take("cost"), "cost")?;
    let cost = expression(&coste, "cost")?;

    let mut dynamics = Vec::new();
    while let Some(e) = take(&format!("dynamics.x{}", dynamics.len() + 1)) {
        dynamics.push(expression(&e, &format!("dynamics.x{}", dynamics.len() + 1))?);
    }
    if dynamics.is_empty() {
        return Err(FileError::MissingKey { key: "dynamics.x1".into(), line: end });
    }
    let n = dynamics.len();
    for (key, e) in [("cost", &cost)].into_iter().chain(dynamics.iter().map(|d| ("dynamics", d))) {
        if e.max_state() > n {
            let line = if key == "cost" { coste.line } else { end };
            return Err(FileError::Expression { line, key: key.into(), source: ExprError::MissingState { index: e.max_state() } });
        }
    }

    let cases = match take("case") {
        None => vec![GhCase::Case1; n],
        Some(e) => {
            let tags: Vec<&str> = e.value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            let cases = tags
                .iter()
                .map(|s| GhCase::parse(s))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| FileError::InvalidValue { line: e.line, key: "case".into(), message: format!("bad case list `{}`", e.value) })?;
            if cases.len() != n {
                return Err(FileError::CaseCountMismatch { line: e.line, cases: cases.len(), states: n });
            }
            cases
        }
    };

    let mut boundary_t0 = Vec::with_capacity(n);
    let mut boundary_t1 = Vec::with_capacity(n);
    for i in 1..=n {
        for (end_key, out) in [("t0", &mut boundary_t0), ("t1", &mut boundary_t1)] {
            let key = format!("x{i}.{end_key}");
            let e = require(take(&key), &key)?;
            out.push(parse_triple(&e.value, e.line)?);
        }
    }

    if let Some((key, e)) = entries.into_iter().min_by_key(|(_, e)| e.line) {
        return Err(FileError::UnknownKey { key, line: e.line });
    }

    Ok(ProblemFile { name: name.value, t0, t1, beta, pairing, cases, cost, dynamics, boundary_t0, boundary_t1 })
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:?}");
    s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "t0 = {}", fmt_num(self.t0));
        let _ = writeln!(out, "t1 = {}", fmt_num(self.t1));
        let _ = writeln!(out, "beta = {}", fmt_num(self.beta));
        let _ = writeln!(out, "pairing = {}", self.pairing.tag());
        let cases: Vec<&str> = self.cases.iter().map(|c| c.tag()).collect();
        let _ = writeln!(out, "case = {}", cases.join(", "));
        let _ = writeln!(out, "cost = {}", self.cost);
        let _ = writeln!(out, "\n[dynamics]");
        for (i, d) in self.dynamics.iter().enumerate() {
            let _ = writeln!(out, "x{} = {}", i + 1, d);
        }
        let triple = |t: &Triple| format!("({}, {}, {})", fmt_num(t.0), fmt_num(t.1), fmt_num(t.2));
        for i in 0..self.dynamics.len() {
            let _ = writeln!(out, "\n[x{}]", i + 1);
            let _ = writeln!(out, "t0 = {}", triple(&self.boundary_t0[i]));
            let _ = writeln!(out, "t1 = {}", triple(&self.boundary_t1[i]));
        }
        f.write_str(&out)
    }
}

fn model_error(e: ExprError) -> ModelError {
    ModelError(e.to_string())
}

/// Compiled expression in `(x, u, t)` with its compiled gradient.
fn crisp_function(e: &Expr, n: usize) -> Result<CrispFunction, ExprError> {
    let value = e.compile();
    let partials: Vec<Compiled> = (0..n)
        .map(Var::X)
        .chain([Var::U])
        .map(|v| e.derivative(v).map(|d| d.compile()))
        .collect::<Result<_, _>>()?;
    let value = Arc::new(value);
    let partials = Arc::new(partials);
    Ok(CrispFunction::new(move |x, u, t| value.eval(&Env { t, x, u: u[0] }).map_err(model_error)).with_gradient(
        move |x, u, t, g| {
            let env = Env { t, x, u: u[0] };
            for (slot, d) in g.iter_mut().zip(partials.iter()) {
                *slot = d.eval(&env).map_err(model_error)?;
            }
            Ok(())
        },
    ))
}

fn coefficient_fn(e: &Expr) -> CoefficientFn {
    let c = e.compile();
    Arc::new(move |t| c.eval(&Env { t, x: &[], u: 0.0 }).map_err(model_error))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("dynamics of x{state} are not linear in the states and control, as interval pairing requires")]
    NotLinear { state: usize },
    #[error("{0}")]
    Expression(#[from] ExprError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pmp(#[from] PmpError),
}

impl ProblemFile {
    pub fn n_states(&self) -> usize {
        self.dynamics.len()
    }

    pub fn to_spec(&self, grid: &LevelGrid) -> Result<ProblemSpec, SpecError> {
        let n = self.n_states();
        let layout = Layout::new(n, 1);
        let cost = crisp_function(&self.cost, n)?;
        let dynamics = match self.pairing {
            Pairing::Aligned => {
                DynamicsForm::Aligned(self.dynamics.iter().map(|d| crisp_function(d, n)).collect::<Result<_, _>>()?)
            }
            Pairing::Interval => {
                let mut a = Vec::with_capacity(n);
                let mut c = Vec::with_capacity(n);
                let mut d = Vec::with_capacity(n);
                for (i, e) in self.dynamics.iter().enumerate() {
                    let lin = e.linear_form(n)?.ok_or(SpecError::NotLinear { state: i + 1 })?;
                    a.push(lin.state.iter().map(coefficient_fn).collect());
                    c.push(vec![coefficient_fn(&lin.control)]);
                    d.push(coefficient_fn(&lin.offset));
                }
                DynamicsForm::Linear(LinearDynamics { a, c, d, pairing: Pairing::Interval })
            }
        };
        let model = StandardModel::new(layout, cost, dynamics)?;
        let fuzzy = |ts: &[Triple]| ts.iter().map(|t| t.fuzzy(grid)).collect::<Result<Vec<_>, _>>();
        let spec = ProblemSpec {
            name: self.name.clone(),
            a: self.t0,
            b: self.t1,
            beta: FracOrder::new(self.beta).map_err(PmpError::from)?,
            model: Arc::new(model),
            boundary_a: fuzzy(&self.boundary_t0)?,
            boundary_b: fuzzy(&self.boundary_t1)?,
            cases: self.cases.clone(),
            gradient: GradientMode::Analytic,
        };
        spec.validate()?;
        Ok(spec)
    }
}
