//! Closed-form coordinate expressions.
//!
//! Connection coefficients, curves and one-forms are all carried as [`Expr`]
//! trees over the chart coordinates. Trees are immutable once built; every
//! derivative is produced symbolically by [`Expr::diff`], or in Taylor form by
//! [`Expr::eval_jet`], so no quantity downstream is finite-differenced unless a
//! caller asks for it explicitly.

mod jet;
mod parse;

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

pub use jet::{Jet, JetBasis};
pub use parse::parse;

/// Elementary functions admitted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Atan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "atan" => Func::Atan,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> Result<f64> {
        let y = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => {
                if x.cos().abs() < 1e-300 {
                    return Err(Error::Domain(format!("tan pole at {x}")));
                }
                x.tan()
            }
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive value {x}")));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative value {x}")));
                }
                x.sqrt()
            }
            Func::Atan => x.atan(),
        };
        Ok(y)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Neg(Expr),
    Call(Func, Expr),
}

/// Arithmetic expression over coordinate slots `0..n`.
///
/// Cloning is cheap: subtrees are shared.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn node(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn num(v: f64) -> Expr {
        Expr::node(Node::Num(v))
    }

    pub fn zero() -> Expr {
        Expr::num(0.0)
    }

    pub fn one() -> Expr {
        Expr::num(1.0)
    }

    pub fn var(index: usize) -> Expr {
        Expr::node(Node::Var(index))
    }

    pub fn as_num(&self) -> Option<f64> {
        match *self.0 {
            Node::Num(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num() == Some(0.0)
    }

    pub fn add(&self, other: &Expr) -> Expr {
        match (self.as_num(), other.as_num()) {
            (Some(a), Some(b)) => Expr::num(a + b),
            (Some(a), _) if a == 0.0 => other.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Expr::node(Node::Add(self.clone(), other.clone())),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        match (self.as_num(), other.as_num()) {
            (Some(a), Some(b)) => Expr::num(a - b),
            (Some(a), _) if a == 0.0 => other.neg(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => Expr::node(Node::Sub(self.clone(), other.clone())),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        match (self.as_num(), other.as_num()) {
            (Some(a), Some(b)) => Expr::num(a * b),
            (Some(a), _) if a == 0.0 => Expr::zero(),
            (_, Some(b)) if b == 0.0 => Expr::zero(),
            (Some(a), _) if a == 1.0 => other.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            (Some(a), _) if a == -1.0 => other.neg(),
            (_, Some(b)) if b == -1.0 => self.neg(),
            _ => Expr::node(Node::Mul(self.clone(), other.clone())),
        }
    }

    pub fn div(&self, other: &Expr) -> Expr {
        match (self.as_num(), other.as_num()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::num(a / b),
            (Some(a), _) if a == 0.0 => Expr::zero(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => Expr::node(Node::Div(self.clone(), other.clone())),
        }
    }

    pub fn powi(&self, k: i32) -> Expr {
        match (self.as_num(), k) {
            (_, 0) => Expr::one(),
            (_, 1) => self.clone(),
            (Some(a), _) if a != 0.0 || k > 0 => Expr::num(a.powi(k)),
            _ => Expr::node(Node::Pow(self.clone(), k)),
        }
    }

    pub fn neg(&self) -> Expr {
        match &*self.0 {
            Node::Num(a) => Expr::num(-a),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::node(Node::Neg(self.clone())),
        }
    }

    pub fn call(f: Func, arg: &Expr) -> Expr {
        if let Some(a) = arg.as_num() {
            if let Ok(v) = f.apply(a) {
                // only fold values that are exact in the usual sense
                if a == 0.0 {
                    return Expr::num(v);
                }
            }
        }
        Expr::node(Node::Call(f, arg.clone()))
    }

    pub fn scale(&self, c: f64) -> Expr {
        Expr::num(c).mul(self)
    }

    /// Largest variable slot referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match &*self.0 {
            Node::Num(_) => None,
            Node::Var(i) => Some(*i),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Node::Pow(a, _) | Node::Neg(a) | Node::Call(_, a) => a.max_var(),
        }
    }

    /// IEEE evaluation at a point. Domain violations are errors, never NaN.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let v = match &*self.0 {
            Node::Num(v) => *v,
            Node::Var(i) => *point.get(*i).ok_or_else(|| {
                Error::Dimension(format!("variable slot {i} outside point of length {}", point.len()))
            })?,
            Node::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Node::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Node::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Node::Div(a, b) => {
                let d = b.eval(point)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval(point)? / d
            }
            Node::Pow(a, k) => {
                let base = a.eval(point)?;
                if base == 0.0 && *k < 0 {
                    return Err(Error::Domain("negative power of zero".into()));
                }
                base.powi(*k)
            }
            Node::Neg(a) => -a.eval(point)?,
            Node::Call(f, a) => f.apply(a.eval(point)?)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite value {v}")))
        }
    }

    /// Exact symbolic partial derivative with respect to slot `var`.
    pub fn diff(&self, var: usize) -> Expr {
        match &*self.0 {
            Node::Num(_) => Expr::zero(),
            Node::Var(i) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => a.diff(var).add(&b.diff(var)),
            Node::Sub(a, b) => a.diff(var).sub(&b.diff(var)),
            Node::Mul(a, b) => a.diff(var).mul(b).add(&a.mul(&b.diff(var))),
            Node::Div(a, b) => {
                let da = a.diff(var);
                let db = b.diff(var);
                if db.is_zero() {
                    da.div(b)
                } else {
                    da.mul(b).sub(&a.mul(&db)).div(&b.powi(2))
                }
            }
            Node::Pow(a, k) => Expr::num(*k as f64)
                .mul(&a.powi(k - 1))
                .mul(&a.diff(var)),
            Node::Neg(a) => a.diff(var).neg(),
            Node::Call(f, a) => {
                let da = a.diff(var);
                if da.is_zero() {
                    return Expr::zero();
                }
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, a),
                    Func::Cos => Expr::call(Func::Sin, a).neg(),
                    Func::Tan => Expr::one().add(&Expr::call(Func::Tan, a).powi(2)),
                    Func::Exp => Expr::call(Func::Exp, a),
                    Func::Log => Expr::one().div(a),
                    Func::Sqrt => Expr::one().div(&Expr::num(2.0).mul(&Expr::call(Func::Sqrt, a))),
                    Func::Atan => Expr::one().div(&Expr::one().add(&a.powi(2))),
                };
                outer.mul(&da)
            }
        }
    }

    /// Evaluate with each variable replaced by a jet; yields the truncated
    /// Taylor expansion of the expression around the jets' base point.
    pub fn eval_jet(&self, vars: &[Jet]) -> Result<Jet> {
        let basis = vars
            .first()
            .map(|j| j.basis().clone())
            .ok_or_else(|| Error::Dimension("jet evaluation needs at least one variable".into()))?;
        self.eval_jet_in(vars, &basis)
    }

    fn eval_jet_in(&self, vars: &[Jet], basis: &Arc<JetBasis>) -> Result<Jet> {
        Ok(match &*self.0 {
            Node::Num(v) => Jet::constant(basis, *v),
            Node::Var(i) => vars
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::Dimension(format!("variable slot {i} has no jet")))?,
            Node::Add(a, b) => &a.eval_jet_in(vars, basis)? + &b.eval_jet_in(vars, basis)?,
            Node::Sub(a, b) => &a.eval_jet_in(vars, basis)? - &b.eval_jet_in(vars, basis)?,
            Node::Mul(a, b) => &a.eval_jet_in(vars, basis)? * &b.eval_jet_in(vars, basis)?,
            Node::Div(a, b) => {
                let num = a.eval_jet_in(vars, basis)?;
                let den = b.eval_jet_in(vars, basis)?;
                &num * &den.recip()?
            }
            Node::Pow(a, k) => a.eval_jet_in(vars, basis)?.powi(*k)?,
            Node::Neg(a) => -&a.eval_jet_in(vars, basis)?,
            Node::Call(f, a) => a.eval_jet_in(vars, basis)?.apply(*f)?,
        })
    }

    /// Substitute each variable slot `i` by `subs[i]`.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        match &*self.0 {
            Node::Num(_) => self.clone(),
            Node::Var(i) => subs.get(*i).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(a, b) => a.substitute(subs).add(&b.substitute(subs)),
            Node::Sub(a, b) => a.substitute(subs).sub(&b.substitute(subs)),
            Node::Mul(a, b) => a.substitute(subs).mul(&b.substitute(subs)),
            Node::Div(a, b) => a.substitute(subs).div(&b.substitute(subs)),
            Node::Pow(a, k) => a.substitute(subs).powi(*k),
            Node::Neg(a) => a.substitute(subs).neg(),
            Node::Call(f, a) => Expr::call(*f, &a.substitute(subs)),
        }
    }

    /// Render with the given coordinate names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> DisplayExpr<'a> {
        DisplayExpr { expr: self, names }
    }

    fn precedence(&self) -> u8 {
        match &*self.0 {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(..) => 3,
            Node::Pow(..) => 4,
            Node::Num(v) if *v < 0.0 => 3,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "(")?;
                e.write(f, names)?;
                write!(f, ")")
            } else {
                e.write(f, names)
            }
        };
        match &*self.0 {
            Node::Num(v) => write!(f, "{v}"),
            Node::Var(i) => match names.get(*i) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "_{i}"),
            },
            Node::Add(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " + ")?;
                wrap(f, b, 2)
            }
            Node::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " - ")?;
                wrap(f, b, 2)
            }
            Node::Mul(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "*")?;
                wrap(f, b, 3)
            }
            Node::Div(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "/")?;
                wrap(f, b, 3)
            }
            Node::Pow(a, k) => {
                wrap(f, a, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 3)
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, names)?;
                write!(f, ")")
            }
        }
    }
}

pub struct DisplayExpr<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for DisplayExpr<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, self.names)
    }
}

/// Derivative with respect to a named coordinate.
pub fn diff_by_name(e: &Expr, coord: &str, coords: &[String]) -> Result<Expr> {
    let idx = coords
        .iter()
        .position(|c| c == coord)
        .ok_or_else(|| Error::UnknownIdentifier {
            name: coord.to_string(),
            offset: 0,
        })?;
    Ok(e.diff(idx))
}
