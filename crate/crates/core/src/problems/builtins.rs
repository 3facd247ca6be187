//! Registry of built-in example problems.

use super::file::{parse_problem, ProblemFile};

pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin {
        name: "ex51-case1",
        description: "time-varying scalar system, state [(1)-gH] differentiable",
        text: "\
name = ex51-case1
t0 = 1
t1 = 2
beta = 1
pairing = aligned
case = 1
cost = u^2

[dynamics]
x1 = (2*t - 1)*x1 - sin(t)*u

[x1]
t0 = (0, 1, 2)
t1 = (-2, -1, 1)
",
    },
    Builtin {
        name: "ex51-case2",
        description: "time-varying scalar system, state [(2)-gH] differentiable",
        text: "\
name = ex51-case2
t0 = 1
t1 = 2
beta = 1
pairing = aligned
case = 2
cost = u^2

[dynamics]
x1 = (2*t - 1)*x1 - sin(t)*u

[x1]
t0 = (0, 1, 2)
t1 = (-2, -1, 1)
",
    },
    Builtin {
        name: "ex52",
        description: "two-state oscillator, x1 [(1)-gH] and x2 [(2)-gH] differentiable",
        text: "\
name = ex52
t0 = 0
t1 = 1
beta = 1
pairing = interval
case = 1, 2
cost = u^2

[dynamics]
x1 = -2*x2 + u
x2 = 2*x1

[x1]
t0 = (1, 2, 3)
t1 = (-0.5, 0, 0.5)

[x2]
t0 = (1, 2, 3)
t1 = (-0.5, 0, 0.5)
",
    },
    Builtin {
        name: "ex52-crisp",
        description: "crisp counterpart of ex52",
        text: "\
name = ex52-crisp
t0 = 0
t1 = 1
beta = 1
pairing = interval
case = 1, 1
cost = u^2

[dynamics]
x1 = -2*x2 + u
x2 = 2*x1

[x1]
t0 = (2, 2, 2)
t1 = (0, 0, 0)

[x2]
t0 = (2, 2, 2)
t1 = (0, 0, 0)
",
    },
    Builtin {
        name: "ex53",
        description: "scalar system with equal boundary diameters, refuted by the diameter test",
        text: "\
name = ex53
t0 = 0
t1 = 2
beta = 1
pairing = interval
case = 1
cost = u^2

[dynamics]
x1 = (2*t - 1)*x1 + sin(t)*u

[x1]
t0 = (1, 2, 3)
t1 = (-1, 0, 1)
",
    },
    Builtin {
        name: "ex53-crisp",
        description: "crisp counterpart of ex53",
        text: "\
name = ex53-crisp
t0 = 0
t1 = 2
beta = 1
pairing = interval
case = 1
cost = u^2

[dynamics]
x1 = (2*t - 1)*x1 + sin(t)*u

[x1]
t0 = (2, 2, 2)
t1 = (0, 0, 0)
",
    },
    Builtin {
        name: "remark42-variational",
        description: "variational problem written as control problem with dynamics x1' = u",
        text: "\
name = remark42-variational
t0 = 0
t1 = 1
beta = 1
pairing = aligned
case = 1
cost = u^2

[dynamics]
x1 = u

[x1]
t0 = (0, 1, 2)
t1 = (1, 2, 4)
",
    },
];

pub fn builtin_text(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|b| b.name == name).map(|b| b.text)
}

/// Parsed builtin problem.
pub fn builtin(name: &str) -> Option<ProblemFile> {
    builtin_text(name).map(|text| parse_problem(text).expect("builtin problems parse"))
}
