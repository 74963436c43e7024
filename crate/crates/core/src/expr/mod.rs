//! Expression trees over the plane coordinates `x`, `y` with exact partial
//! derivatives.
//!
//! Besides the elementary nodes there is one opaque leaf, [`Potential`]: a
//! scalar reconstructed from a known gradient by a line integral from a base
//! point. Its value is computed by quadrature, its partials are the gradient
//! components themselves, so trees containing it keep exact derivatives.

mod complex;
mod parse;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Point;
use crate::quadrature::integrate_adaptive;

pub use complex::CExpr;
pub use parse::{parse_complex, parse_real};

/// Denominators smaller than this in modulus are reported as singular.
pub const SINGULARITY_EPS: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

#[derive(Debug)]
pub enum Node {
    Const(f64),
    X,
    Y,
    Neg(Expr),
    Add(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Powi(Expr, i32),
    Exp(Expr),
    Sin(Expr),
    Cos(Expr),
    Potential(Arc<Potential>),
}

/// Scalar `phi` with `phi(base) = offset` and gradient `(grad_x, grad_y)`,
/// evaluated along the path that first runs vertically from the base point
/// to the target height and then horizontally to the target.
#[derive(Debug)]
pub struct Potential {
    pub grad_x: Expr,
    pub grad_y: Expr,
    pub base: Point,
    pub offset: f64,
}

impl Potential {
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let Point { x: x0, y: y0 } = self.base;
        let vertical = integrate_adaptive(|t| self.grad_y.eval(x0, t), y0, y)?;
        let horizontal = integrate_adaptive(|t| self.grad_x.eval(t, y), x0, x)?;
        Ok(self.offset + vertical + horizontal)
    }
}

impl Expr {
    fn node(n: Node) -> Self {
        Expr(Arc::new(n))
    }

    pub fn kind(&self) -> &Node {
        &self.0
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn x() -> Self {
        Self::node(Node::X)
    }

    pub fn y() -> Self {
        Self::node(Node::Y)
    }

    pub fn potential(grad_x: Expr, grad_y: Expr, base: Point, offset: f64) -> Self {
        if let (Some(a), Some(b)) = (grad_x.as_const(), grad_y.as_const()) {
            let lin = Expr::x()
                .add(&Expr::constant(-base.x))
                .scale(a)
                .add(&Expr::y().add(&Expr::constant(-base.y)).scale(b));
            return lin.add(&Expr::constant(offset));
        }
        Self::node(Node::Potential(Arc::new(Potential {
            grad_x,
            grad_y,
            base,
            offset,
        })))
    }

    pub fn as_const(&self) -> Option<f64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn neg(&self) -> Self {
        match self.kind() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::node(Node::Neg(self.clone())),
        }
    }

    pub fn add(&self, other: &Expr) -> Self {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            (Some(0.0), _) => other.clone(),
            (_, Some(0.0)) => self.clone(),
            _ => Self::node(Node::Add(self.clone(), other.clone())),
        }
    }

    pub fn sub(&self, other: &Expr) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Expr) -> Self {
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(0.0), _) => Self::zero(),
            (_, Some(0.0)) => Self::zero(),
            (Some(1.0), _) => other.clone(),
            (_, Some(1.0)) => self.clone(),
            (Some(-1.0), _) => other.neg(),
            (_, Some(-1.0)) => self.neg(),
            _ => Self::node(Node::Mul(self.clone(), other.clone())),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::constant(c).mul(self)
    }

    pub fn div(&self, other: &Expr) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if other.is_one() {
            return self.clone();
        }
        match (self.as_const(), other.as_const()) {
            (Some(a), Some(b)) if b.abs() >= SINGULARITY_EPS => Self::constant(a / b),
            _ => Self::node(Node::Div(self.clone(), other.clone())),
        }
    }

    pub fn powi(&self, n: i32) -> Self {
        match (n, self.as_const()) {
            (0, _) => Self::one(),
            (1, _) => self.clone(),
            (_, Some(c)) if n > 0 || c.abs() >= SINGULARITY_EPS => Self::constant(c.powi(n)),
            _ => Self::node(Node::Powi(self.clone(), n)),
        }
    }

    pub fn square(&self) -> Self {
        self.powi(2)
    }

    pub fn exp(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.exp()),
            None => Self::node(Node::Exp(self.clone())),
        }
    }

    pub fn sin(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.sin()),
            None => Self::node(Node::Sin(self.clone())),
        }
    }

    pub fn cos(&self) -> Self {
        match self.as_const() {
            Some(c) => Self::constant(c.cos()),
            None => Self::node(Node::Cos(self.clone())),
        }
    }

    pub fn cosh(&self) -> Self {
        self.exp().add(&self.neg().exp()).scale(0.5)
    }

    pub fn sinh(&self) -> Self {
        self.exp().sub(&self.neg().exp()).scale(0.5)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(match self.kind() {
            Node::Const(c) => *c,
            Node::X => x,
            Node::Y => y,
            Node::Neg(a) => -a.eval(x, y)?,
            Node::Add(a, b) => a.eval(x, y)? + b.eval(x, y)?,
            Node::Mul(a, b) => a.eval(x, y)? * b.eval(x, y)?,
            Node::Div(a, b) => {
                let d = b.eval(x, y)?;
                if d.abs() < SINGULARITY_EPS {
                    return Err(Error::Singularity(Point { x, y }));
                }
                a.eval(x, y)? / d
            }
            Node::Powi(a, n) => {
                let v = a.eval(x, y)?;
                if *n < 0 && v.abs() < SINGULARITY_EPS {
                    return Err(Error::Singularity(Point { x, y }));
                }
                v.powi(*n)
            }
            Node::Exp(a) => a.eval(x, y)?.exp(),
            Node::Sin(a) => a.eval(x, y)?.sin(),
            Node::Cos(a) => a.eval(x, y)?.cos(),
            Node::Potential(p) => p.eval(x, y)?,
        })
    }

    pub fn diff(&self, var: Var) -> Expr {
        match self.kind() {
            Node::Const(_) => Self::zero(),
            Node::X => Self::constant(if var == Var::X { 1.0 } else { 0.0 }),
            Node::Y => Self::constant(if var == Var::Y { 1.0 } else { 0.0 }),
            Node::Neg(a) => a.diff(var).neg(),
            Node::Add(a, b) => a.diff(var).add(&b.diff(var)),
            Node::Mul(a, b) => a.diff(var).mul(b).add(&a.mul(&b.diff(var))),
            Node::Div(a, b) => {
                let da = a.diff(var);
                let db = b.diff(var);
                da.div(b).sub(&a.mul(&db).div(&b.square()))
            }
            Node::Powi(a, n) => Self::constant(f64::from(*n))
                .mul(&a.powi(n - 1))
                .mul(&a.diff(var)),
            Node::Exp(a) => self.mul(&a.diff(var)),
            Node::Sin(a) => a.cos().mul(&a.diff(var)),
            Node::Cos(a) => a.sin().neg().mul(&a.diff(var)),
            Node::Potential(p) => match var {
                Var::X => p.grad_x.clone(),
                Var::Y => p.grad_y.clone(),
            },
        }
    }

    /// True when no [`Potential`] leaf occurs in the tree.
    pub fn is_closed_form(&self) -> bool {
        match self.kind() {
            Node::Const(_) | Node::X | Node::Y => true,
            Node::Neg(a) | Node::Powi(a, _) | Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => {
                a.is_closed_form()
            }
            Node::Add(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.is_closed_form() && b.is_closed_form()
            }
            Node::Potential(_) => false,
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Node::Const(c) => write!(f, "{c}"),
            Node::X => write!(f, "x"),
            Node::Y => write!(f, "y"),
            Node::Neg(a) => write!(f, "-({a})"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Mul(a, b) => write!(f, "{a}*{b}"),
            Node::Div(a, b) => write!(f, "({a})/({b})"),
            Node::Powi(a, n) => write!(f, "({a})^{n}"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Sin(a) => write!(f, "sin({a})"),
            Node::Cos(a) => write!(f, "cos({a})"),
            Node::Potential(p) => write!(
                f,
                "potential[base=({}, {}), offset={}]",
                p.base.x, p.base.y, p.offset
            ),
        }
    }
}
