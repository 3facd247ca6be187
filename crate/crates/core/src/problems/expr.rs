//! Arithmetic expressions over `t`, `x1..x9`, `u` with `sin`, `cos`, `exp`.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := atom ("^" factor)? | "-" factor
//! atom   := number | ident | ident "(" expr ")" | "(" expr ")"
//! ```

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: expected {}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<&'static str> },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("division by zero in `{expr}`")]
    DivisionByZero { expr: String },
    #[error("invalid power in `{expr}`")]
    InvalidPower { expr: String },
    #[error("variable x{index} is not available")]
    MissingState { index: usize },
    #[error("power `{expr}` has a non-constant exponent")]
    NonConstantExponent { expr: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    /// State `x{i+1}`.
    X(usize),
    U,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => write!(f, "t"),
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::U => write!(f, "u"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Variable values for evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub t: f64,
    pub x: &'a [f64],
    pub u: f64,
}

impl Env<'_> {
    fn get(&self, v: Var) -> Result<f64, ExprError> {
        match v {
            Var::T => Ok(self.t),
            Var::U => Ok(self.u),
            Var::X(i) => self.x.get(i).copied().ok_or(ExprError::MissingState { index: i + 1 }),
        }
    }
}

fn binary(op: BinOp, a: f64, b: f64, node: &dyn Fn() -> String) -> Result<f64, ExprError> {
    match op {
        BinOp::Add => Ok(a + b),
        BinOp::Sub => Ok(a - b),
        BinOp::Mul => Ok(a * b),
        BinOp::Div if b == 0.0 => Err(ExprError::DivisionByZero { expr: node() }),
        BinOp::Div => Ok(a / b),
        BinOp::Pow => {
            let v = a.powf(b);
            if v.is_nan() && !a.is_nan() && !b.is_nan() {
                Err(ExprError::InvalidPower { expr: node() })
            } else if a == 0.0 && b < 0.0 {
                Err(ExprError::DivisionByZero { expr: node() })
            } else {
                Ok(v)
            }
        }
    }
}

impl Expr {
    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    fn bin(op: BinOp, a: Expr, b: Expr) -> Self {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    /// Tree-walking evaluation.
    pub fn eval(&self, env: &Env) -> Result<f64, ExprError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(v) => env.get(*v),
            Expr::Neg(e) => Ok(-e.eval(env)?),
            Expr::Call(f, e) => Ok(f.apply(e.eval(env)?)),
            Expr::Bin(op, a, b) => binary(*op, a.eval(env)?, b.eval(env)?, &|| self.to_string()),
        }
    }

    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on(v),
            Expr::Bin(_, a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    /// Largest state index referenced (1-based), or 0.
    pub fn max_state(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(Var::X(i)) => i + 1,
            Expr::Var(_) => 0,
            Expr::Neg(e) | Expr::Call(_, e) => e.max_state(),
            Expr::Bin(_, a, b) => a.max_state().max(b.max_state()),
        }
    }

    /// Symbolic partial derivative, simplified.
    pub fn derivative(&self, v: Var) -> Result<Expr, ExprError> {
        if !self.depends_on(v) {
            return Ok(Expr::Num(0.0));
        }
        let d = match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(w) => Expr::Num(if *w == v { 1.0 } else { 0.0 }),
            Expr::Neg(e) => Expr::Neg(Box::new(e.derivative(v)?)),
            Expr::Call(f, e) => {
                let inner = e.derivative(v)?;
                let outer = match f {
                    Func::Sin => Expr::Call(Func::Cos, e.clone()),
                    Func::Cos => Expr::Neg(Box::new(Expr::Call(Func::Sin, e.clone()))),
                    Func::Exp => self.clone(),
                };
                Expr::bin(BinOp::Mul, outer, inner)
            }
            Expr::Bin(op, a, b) => {
                let (da, db) = (a.derivative(v)?, b.derivative(v)?);
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinOp::Add => Expr::bin(BinOp::Add, da, db),
                    BinOp::Sub => Expr::bin(BinOp::Sub, da, db),
                    BinOp::Mul => Expr::bin(BinOp::Add, Expr::bin(BinOp::Mul, da, b.clone()), Expr::bin(BinOp::Mul, a, db)),
                    BinOp::Div => Expr::bin(
                        BinOp::Div,
                        Expr::bin(BinOp::Sub, Expr::bin(BinOp::Mul, da, b.clone()), Expr::bin(BinOp::Mul, a, db)),
                        Expr::bin(BinOp::Pow, b, Expr::Num(2.0)),
                    ),
                    BinOp::Pow => {
                        if b.depends_on(v) {
                            return Err(ExprError::NonConstantExponent { expr: self.to_string() });
                        }
                        // d(a^b) = b * a^(b-1) * da
                        Expr::bin(
                            BinOp::Mul,
                            Expr::bin(BinOp::Mul, b.clone(), Expr::bin(BinOp::Pow, a, Expr::bin(BinOp::Sub, b, Expr::Num(1.0)))),
                            da,
                        )
                    }
                }
            }
        };
        Ok(d.simplify())
    }

    /// Constant folding and removal of neutral elements.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(e) => match e.simplify() {
                Expr::Num(v) => Expr::Num(-v),
                Expr::Neg(inner) => *inner,
                s => Expr::Neg(Box::new(s)),
            },
            Expr::Call(f, e) => match e.simplify() {
                Expr::Num(v) => Expr::Num(f.apply(v)),
                s => Expr::Call(*f, Box::new(s)),
            },
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (op, &a, &b) {
                    (_, Expr::Num(x), Expr::Num(y)) => match binary(*op, *x, *y, &|| String::new()) {
                        Ok(v) => Expr::Num(v),
                        Err(_) => Expr::bin(*op, a, b),
                    },
                    (BinOp::Add, Expr::Num(z), _) if *z == 0.0 => b,
                    (BinOp::Add | BinOp::Sub, _, Expr::Num(z)) if *z == 0.0 => a,
                    (BinOp::Sub, Expr::Num(z), _) if *z == 0.0 => Expr::Neg(Box::new(b)).simplify(),
                    (BinOp::Mul, Expr::Num(z), _) | (BinOp::Mul, _, Expr::Num(z)) if *z == 0.0 => Expr::Num(0.0),
                    (BinOp::Mul, Expr::Num(o), _) if *o == 1.0 => b,
                    (BinOp::Mul | BinOp::Div, _, Expr::Num(o)) if *o == 1.0 => a,
                    (BinOp::Div, Expr::Num(z), _) if *z == 0.0 => Expr::Num(0.0),
                    (BinOp::Pow, _, Expr::Num(o)) if *o == 1.0 => a,
                    (BinOp::Pow, _, Expr::Num(z)) if *z == 0.0 => Expr::Num(1.0),
                    _ => Expr::bin(*op, a, b),
                }
            }
        }
    }

    pub fn compile(&self) -> Compiled {
        let mut code = Vec::new();
        self.emit(&mut code);
        Compiled { code, source: self.to_string() }
    }

    fn emit(&self, code: &mut Vec<Op>) {
        match self {
            Expr::Num(v) => code.push(Op::Push(*v)),
            Expr::Var(v) => code.push(Op::Load(*v)),
            Expr::Neg(e) => {
                e.emit(code);
                code.push(Op::Neg);
            }
            Expr::Call(f, e) => {
                e.emit(code);
                code.push(Op::Call(*f));
            }
            Expr::Bin(op, a, b) => {
                a.emit(code);
                b.emit(code);
                code.push(Op::Bin(*op));
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Num(v) if *v < 0.0 => 3,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
            Expr::Neg(_) => 3,
            Expr::Bin(op, ..) => op.precedence(),
        }
    }
}

fn fmt_number(v: f64) -> String {
    if v.is_finite() {
        let s = format!("{v:?}");
        s.strip_suffix(".0").map(str::to_owned).unwrap_or(s)
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Expr {
    /// Prints with the minimal parentheses needed to reparse the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, need: bool| {
            if need {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "-{}", fmt_number(-v)),
            Expr::Num(v) => write!(f, "{}", fmt_number(*v)),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Neg(e) => {
                write!(f, "-")?;
                wrap(f, e, e.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = op.precedence();
                match op {
                    BinOp::Pow => {
                        // left operand must be an atom; the right may be another power or a negation
                        wrap(f, a, a.precedence() <= p)?;
                        write!(f, "^")?;
                        wrap(f, b, b.precedence() < 3)
                    }
                    _ => {
                        wrap(f, a, a.precedence() < p)?;
                        write!(f, " {} ", op.symbol())?;
                        wrap(f, b, b.precedence() <= p)
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Push(f64),
    Load(Var),
    Neg,
    Call(Func),
    Bin(BinOp),
}

/// Stack bytecode form of an expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    code: Vec<Op>,
    source: String,
}

impl Compiled {
    pub fn eval(&self, env: &Env) -> Result<f64, ExprError> {
        let mut stack: Vec<f64> = Vec::with_capacity(8);
        for op in &self.code {
            match *op {
                Op::Push(v) => stack.push(v),
                Op::Load(v) => stack.push(env.get(v)?),
                Op::Neg => {
                    let v = stack.pop().expect("well-formed bytecode");
                    stack.push(-v);
                }
                Op::Call(f) => {
                    let v = stack.pop().expect("well-formed bytecode");
                    stack.push(f.apply(v));
                }
                Op::Bin(b) => {
                    let y = stack.pop().expect("well-formed bytecode");
                    let x = stack.pop().expect("well-formed bytecode");
                    stack.push(binary(b, x, y, &|| self.source.clone())?);
                }
            }
        }
        Ok(stack.pop().expect("well-formed bytecode"))
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

/// Decomposition `e = sum_j a_j x_j + c u + d` with coefficients in `t` only.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub state: Vec<Expr>,
    pub control: Expr,
    pub offset: Expr,
}

impl Expr {
    /// Splits an expression that is affine in the states and the control.
    /// Returns `None` when it is not.
    pub fn linear_form(&self, n_states: usize) -> Result<Option<LinearForm>, ExprError> {
        let vars: Vec<Var> = (0..n_states).map(Var::X).chain([Var::U]).collect();
        if self.max_state() > n_states {
            return Err(ExprError::MissingState { index: self.max_state() });
        }
        let mut coefs = Vec::with_capacity(vars.len());
        for &v in &vars {
            let c = self.derivative(v)?;
            if vars.iter().any(|&w| c.depends_on(w)) {
                return Ok(None);
            }
            coefs.push(c);
        }
        let mut offset = self.clone();
        for &v in &vars {
            offset = offset.substitute(v, 0.0);
        }
        let control = coefs.pop().expect("control coefficient");
        Ok(Some(LinearForm { state: coefs, control, offset: offset.simplify() }))
    }

    fn substitute(&self, v: Var, value: f64) -> Expr {
        match self {
            Expr::Var(w) if *w == v => Expr::Num(value),
            Expr::Num(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(v, value))),
            Expr::Call(f, e) => Expr::Call(*f, Box::new(e.substitute(v, value))),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.substitute(v, value), b.substitute(v, value)),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

const EXPECT_OPERAND: &[&str] = &["number", "identifier", "'('", "'-'"];

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: &[&'static str]) -> ExprError {
        ExprError::Syntax { offset: self.pos, expected: expected.to_vec() }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::bin(if c == b'+' { BinOp::Add } else { BinOp::Sub }, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::bin(if c == b'*' { BinOp::Mul } else { BinOp::Div }, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.factor()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error(&["')'", "operator"]));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            _ => Err(self.error(EXPECT_OPERAND)),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.error(&["digit"]));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.error(&["exponent digits"]));
            }
            debug_assert!(mark > start);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Expr::Num).map_err(|_| ExprError::Syntax { offset: start, expected: vec!["number"] })
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let func = match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        };
        if let Some(f) = func {
            if self.peek() != Some(b'(') {
                return Err(self.error(&["'('"]));
            }
            self.pos += 1;
            let arg = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.error(&["')'", "operator"]));
            }
            self.pos += 1;
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        let var = match name.as_bytes() {
            b"t" => Some(Var::T),
            b"u" => Some(Var::U),
            [b'x', d @ b'1'..=b'9'] => Some(Var::X((d - b'1') as usize)),
            _ => None,
        };
        var.map(Expr::Var).ok_or(ExprError::UnknownIdentifier { name: name.to_owned(), offset: start })
    }
}

pub fn parse_expression(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}
