//! Closed-form coordinate expressions.
//!
//! Every input field of a scene is written as an [`Expr`] over the interval
//! coordinate `s` and the leaf coordinates `x1`..`x9`. Expressions are parsed
//! once, are immutable afterwards, and can be differentiated symbolically.
//! The symbolic derivative is the exact reference that all grid derivative
//! operators are checked against.

mod parser;

use std::fmt;

use thiserror::Error;

/// Coordinate values indexed by [`Var::index`]: slot 0 is `s`, slot `i` is `x_i`.
pub type Point = [f64; 10];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("'{name}' takes {expected} argument(s), found {found} (offset {offset})")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
}

/// A coordinate variable: `s` (index 0) or `x1`..`x9` (index 1..=9).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u8);

impl Var {
    pub const S: Var = Var(0);

    pub fn leaf(i: usize) -> Option<Var> {
        (1..=9).contains(&i).then_some(Var(i as u8))
    }

    pub fn from_index(i: usize) -> Option<Var> {
        (i <= 9).then_some(Var(i as u8))
    }

    pub fn from_name(name: &str) -> Option<Var> {
        if name == "s" {
            return Some(Var::S);
        }
        let rest = name.strip_prefix('x')?;
        if rest.len() != 1 {
            return None;
        }
        let d = rest.parse::<usize>().ok()?;
        Var::leaf(d)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> String {
        if self.0 == 0 {
            "s".to_string()
        } else {
            format!("x{}", self.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Tanh,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

pub fn parse(text: &str) -> Result<Expr, ExprError> {
    parser::Parser::parse(text)
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    /// Evaluates at `p`. Errors on log/sqrt of invalid arguments, division by
    /// zero, and non-integer powers of negative numbers.
    pub fn eval(&self, p: &Point) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(v) => p[v.index()],
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Expr::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Expr::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Expr::Div(a, b) => {
                let den = b.eval(p)?;
                if den == 0.0 {
                    return Err(ExprError::Domain(format!("division by zero in {self}")));
                }
                a.eval(p)? / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(p)?;
                let exp = b.eval(p)?;
                if base < 0.0 && exp.fract() != 0.0 {
                    return Err(ExprError::Domain(format!(
                        "non-integer power {exp} of negative base {base}"
                    )));
                }
                if base == 0.0 && exp < 0.0 {
                    return Err(ExprError::Domain("negative power of zero".into()));
                }
                base.powf(exp)
            }
            Expr::Call(f, a) => {
                let x = a.eval(p)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Tanh => x.tanh(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(ExprError::Domain(format!("log of non-positive {x}")));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(ExprError::Domain(format!("sqrt of negative {x}")));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        Ok(v)
    }

    /// Convenience evaluation from named coordinates `(s, [x1, x2, ...])`.
    pub fn eval_at(&self, s: f64, x: &[f64]) -> Result<f64, ExprError> {
        let mut p = [0.0; 10];
        p[0] = s;
        for (i, xi) in x.iter().enumerate().take(9) {
            p[i + 1] = *xi;
        }
        self.eval(&p)
    }

    /// Exact partial derivative with respect to `var`.
    pub fn diff(&self, var: Var) -> Expr {
        use Expr::*;
        match self {
            Const(_) | Pi => Const(0.0),
            Var(v) => Const(if *v == var { 1.0 } else { 0.0 }),
            Neg(a) => neg(a.diff(var)),
            Add(a, b) => add(a.diff(var), b.diff(var)),
            Sub(a, b) => sub(a.diff(var), b.diff(var)),
            Mul(a, b) => add(
                mul(a.diff(var), (**b).clone()),
                mul((**a).clone(), b.diff(var)),
            ),
            Div(a, b) => {
                // (a'b - ab') / b^2
                let num = sub(
                    mul(a.diff(var), (**b).clone()),
                    mul((**a).clone(), b.diff(var)),
                );
                div(num, pow((**b).clone(), Const(2.0)))
            }
            Pow(a, b) => {
                if !b.depends_on_any() {
                    // n a^(n-1) a'
                    let n = (**b).clone();
                    let reduced = pow((**a).clone(), sub(n.clone(), Const(1.0)));
                    mul(mul(n, reduced), a.diff(var))
                } else {
                    // a^b (b' log a + b a'/a)
                    let t1 = mul(b.diff(var), call(Func::Log, (**a).clone()));
                    let t2 = div(mul((**b).clone(), a.diff(var)), (**a).clone());
                    mul(self.clone(), add(t1, t2))
                }
            }
            Call(f, a) => {
                let da = a.diff(var);
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Exp => call(Func::Exp, inner),
                    Func::Log => div(Const(1.0), inner),
                    Func::Tanh => sub(Const(1.0), pow(call(Func::Tanh, inner), Const(2.0))),
                    Func::Sqrt => div(Const(0.5), call(Func::Sqrt, inner)),
                };
                mul(outer, da)
            }
        }
    }

    /// Partial derivative by coordinate name (`"s"`, `"x1"`, ...).
    pub fn diff_by_name(&self, name: &str) -> Result<Expr, ExprError> {
        let v = Var::from_name(name).ok_or_else(|| ExprError::UnknownVariable(name.into()))?;
        Ok(self.diff(v))
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) | Expr::Pi => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on(var),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
        }
    }

    fn depends_on_any(&self) -> bool {
        (0..10).any(|i| self.depends_on(Var(i)))
    }

    /// Value if the expression contains no variables.
    pub fn as_constant(&self) -> Option<f64> {
        if self.depends_on_any() {
            return None;
        }
        self.eval(&[0.0; 10]).ok()
    }

    /// Highest leaf index `i` such that `x_i` appears.
    pub fn max_leaf_var(&self) -> usize {
        (1..10).rev().find(|&i| self.depends_on(Var(i as u8))).unwrap_or(0)
    }
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

// Smart constructors used by `diff`: they fold constants and drop neutral
// elements so derivative trees stay small.
fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        _ if is_const(&a, 0.0) => b,
        _ if is_const(&b, 0.0) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        _ if is_const(&b, 0.0) => a,
        _ if is_const(&a, 0.0) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        _ if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(0.0),
        _ if is_const(&a, 1.0) => b,
        _ if is_const(&b, 1.0) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) if *y != 0.0 => Expr::Const(x / y),
        _ if is_const(&a, 0.0) => Expr::Const(0.0),
        _ if is_const(&b, 1.0) => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(x), Expr::Const(y)) if *x > 0.0 || y.fract() == 0.0 => Expr::Const(x.powf(*y)),
        _ if is_const(&b, 1.0) => a,
        _ if is_const(&b, 0.0) => Expr::Const(1.0),
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "({c:?})")
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Pi => write!(f, "pi"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A leaf direction along which an expression is not periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicityWarning {
    pub var: Var,
    pub mismatch: f64,
}

/// Sampled periodicity lint: compares the value at `x_i = 0` and `x_i = L_i`
/// on a small deterministic set of base points. Directions whose mismatch
/// exceeds `1e-10` are reported.
pub fn periodicity_lint(e: &Expr, s_range: f64, circumferences: &[f64]) -> Vec<PeriodicityWarning> {
    const SAMPLES: [f64; 5] = [0.0, 0.137, 0.391, 0.618, 0.853];
    let mut out = Vec::new();
    for (i, &len) in circumferences.iter().enumerate() {
        let var = Var((i + 1) as u8);
        if !e.depends_on(var) {
            continue;
        }
        let mut worst = 0.0f64;
        for (k, frac) in SAMPLES.iter().enumerate() {
            let mut p = [0.0; 10];
            p[0] = frac * s_range;
            for (j, &lj) in circumferences.iter().enumerate() {
                p[j + 1] = SAMPLES[(k + j + 1) % SAMPLES.len()] * lj;
            }
            p[i + 1] = 0.0;
            let a = e.eval(&p);
            p[i + 1] = len;
            let b = e.eval(&p);
            if let (Ok(a), Ok(b)) = (a, b) {
                worst = worst.max((a - b).abs());
            }
        }
        if worst > 1e-10 {
            log::warn!("expression {e} is not periodic in {} (mismatch {worst:e})", var.name());
            out.push(PeriodicityWarning { var, mismatch: worst });
        }
    }
    out
}
