//! Diameter argument against fuzzy extremals of scalar linear problems.
//!
//! For `D x = a(t) x + c(t) u` with interval pairing and Case 1
//! differentiability, equal boundary diameters force the diameter of the
//! right side to vanish. Where `a > 0` and `c > 0` that makes both the state
//! and control diameters vanish, which contradicts fuzzy boundary data.

use std::fmt;

use super::{Pairing, PmpError, ProblemSpec};
use crate::fuzzy::GhCase;

const SAMPLES: usize = 2001;
const DIAMETER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityVerdict {
    /// Not refuted by the diameter argument. This is not an existence claim.
    Feasible,
    Infeasible { certificate: String, interval: (f64, f64), closed_right: bool },
    NotApplicable { reason: String },
}

impl FeasibilityVerdict {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, FeasibilityVerdict::Infeasible { .. })
    }
}

impl fmt::Display for FeasibilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasibilityVerdict::Feasible => write!(f, "feasible (not refuted by the diameter test)"),
            FeasibilityVerdict::Infeasible { certificate, .. } => write!(f, "infeasible: {certificate}"),
            FeasibilityVerdict::NotApplicable { reason } => write!(f, "diameter test not applicable: {reason}"),
        }
    }
}

fn not_applicable(reason: &str) -> Result<FeasibilityVerdict, PmpError> {
    Ok(FeasibilityVerdict::NotApplicable { reason: reason.into() })
}

pub fn check_diameter_feasibility(spec: &ProblemSpec) -> Result<FeasibilityVerdict, PmpError> {
    spec.validate()?;
    let layout = spec.layout();
    let model = spec.model.as_ref();
    let Some((pairing, _)) = model.linear_coefficients(spec.a) else {
        return not_applicable("dynamics are not linear");
    };
    if pairing != Pairing::Interval {
        return not_applicable("dynamics use aligned endpoint pairing, not interval arithmetic");
    }
    if layout.n_states != 1 || layout.n_controls != 1 {
        return not_applicable("the test covers one state and one control");
    }
    if spec.cases[0] != GhCase::Case1 {
        return not_applicable("the test covers Case 1 differentiability");
    }

    let (xa, xb) = (&spec.boundary_a[0], &spec.boundary_b[0]);
    let diam = |x: &crate::fuzzy::FuzzyNumber, i: usize| {
        let (lo, hi) = x.level(i);
        hi - lo
    };
    let levels = spec.levels().len();
    if (0..levels).all(|i| diam(xa, i) <= DIAMETER_TOL && diam(xb, i) <= DIAMETER_TOL) {
        return Ok(FeasibilityVerdict::Feasible);
    }
    if (0..levels).any(|i| (diam(xa, i) - diam(xb, i)).abs() > DIAMETER_TOL) {
        return Ok(FeasibilityVerdict::Feasible);
    }

    let positive = |t: f64| -> Result<bool, PmpError> {
        let (_, coef) = model.linear_coefficients(t).expect("linear model");
        let coef = coef.map_err(|e| PmpError::Evaluator { message: e.0, t, args: Vec::new() })?;
        Ok(coef.a[0][0] > 0.0 && coef.c[0][0] > 0.0)
    };
    let h = (spec.b - spec.a) / (SAMPLES - 1) as f64;
    let ts: Vec<f64> = (0..SAMPLES)
        .map(|k| if k == SAMPLES - 1 { spec.b } else { spec.a + k as f64 * h })
        .collect();
    let flags = ts.iter().map(|&t| positive(t)).collect::<Result<Vec<_>, _>>()?;

    // longest run of consecutive positive samples
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (k, &f) in flags.iter().enumerate() {
        match (f, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                if best.is_none_or(|(bs, be)| k - 1 - s > be - bs) {
                    best = Some((s, k - 1));
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        if best.is_none_or(|(bs, be)| SAMPLES - 1 - s > be - bs) {
            best = Some((s, SAMPLES - 1));
        }
    }
    let Some((s, e)) = best else {
        return Ok(FeasibilityVerdict::Feasible);
    };

    // bisect the sign changes between neighbouring samples
    let refine = |mut inside: f64, mut outside: f64| -> Result<f64, PmpError> {
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if positive(mid)? {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(outside)
    };
    let (lo, closed_left) = if s == 0 { (spec.a, true) } else { (refine(ts[s], ts[s - 1])?, false) };
    let (hi, closed_right) = if e == SAMPLES - 1 { (spec.b, true) } else { (refine(ts[e], ts[e + 1])?, false) };
    let interval_text = format!(
        "{}{}, {}{}",
        if closed_left { "[" } else { "(" },
        fmt_g(lo),
        fmt_g(hi),
        if closed_right { "]" } else { ")" }
    );
    let certificate = format!(
        "diam x(t0) = diam x(t1) at every level, so the right side of the dynamics has zero diameter; \
         a(t) > 0 and c(t) > 0 on {interval_text}, hence diam x = diam u = 0 there, \
         contradicting the non-crisp boundary data"
    );
    Ok(FeasibilityVerdict::Infeasible { certificate, interval: (lo, hi), closed_right })
}

fn fmt_g(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    let s = format!("{r}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}
