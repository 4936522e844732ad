use std::fmt;
use std::sync::Arc;

use super::dual::{Dual, DualScalar, Real};
use super::expr::{self, EvalError, Expr, ParseError};

/// Ordered coordinate names of a chart, shared by every field on it.
pub type Coordinates = Arc<[String]>;

pub fn coordinates<S: AsRef<str>>(names: &[S]) -> Coordinates {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// A point of the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Point, EvalError> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(Point(coords))
        } else {
            Err(EvalError::NonFinite)
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl From<&[f64]> for Point {
    fn from(c: &[f64]) -> Point {
        Point(c.to_vec())
    }
}

/// Differentiable real-valued function of the chart coordinates.
#[derive(Debug, Clone)]
pub struct ScalarField {
    expr: Arc<Expr>,
    names: Coordinates,
}

impl ScalarField {
    pub fn parse(text: &str, names: &Coordinates) -> Result<ScalarField, ParseError> {
        Ok(ScalarField {
            expr: Arc::new(expr::parse(text, names)?),
            names: names.clone(),
        })
    }

    pub fn constant(v: f64, names: &Coordinates) -> ScalarField {
        ScalarField {
            expr: Arc::new(Expr::Num(v)),
            names: names.clone(),
        }
    }

    pub fn from_expr(expr: Expr, names: &Coordinates) -> ScalarField {
        ScalarField {
            expr: Arc::new(expr),
            names: names.clone(),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn names(&self) -> &Coordinates {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// True when both fields share one tree or have structurally equal trees.
    pub fn same_as(&self, other: &ScalarField) -> bool {
        Arc::ptr_eq(&self.expr, &other.expr) || self.expr == other.expr
    }

    fn check_dim(&self, p: &Point) -> Result<(), EvalError> {
        if p.dim() != self.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim(),
                found: p.dim(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        self.check_dim(p)?;
        self.expr.eval(p.coords())
    }

    pub fn eval_generic<T: Real>(&self, x: &[T]) -> Result<T, EvalError> {
        if x.len() != self.dim() {
            return Err(EvalError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        self.expr.eval(x)
    }

    /// `(f(p), ∂f/∂x^j(p))` by dual-number propagation.
    pub fn eval_with_derivative(&self, p: &Point, j: usize) -> Result<DualScalar, EvalError> {
        self.check_dim(p)?;
        let x = seed(p, j)?;
        self.expr.eval(&x)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr.display(&self.names))
    }
}

/// Coordinates of `p` as duals seeded along coordinate `j`.
pub fn seed(p: &Point, j: usize) -> Result<Vec<DualScalar>, EvalError> {
    if j >= p.dim() {
        return Err(EvalError::IndexOutOfRange {
            index: j,
            dim: p.dim(),
        });
    }
    Ok(p.coords()
        .iter()
        .enumerate()
        .map(|(m, &c)| Dual::new(c, if m == j { 1.0 } else { 0.0 }))
        .collect())
}

/// Coordinates of `p` as nested duals: inner seed `j`, outer seed `k`.
pub fn seed_nested(p: &Point, j: usize, k: usize) -> Vec<Dual<DualScalar>> {
    p.coords()
        .iter()
        .enumerate()
        .map(|(m, &c)| {
            let inner = Dual::new(c, if m == j { 1.0 } else { 0.0 });
            let outer = Dual::constant(if m == k { 1.0 } else { 0.0 });
            Dual::new(inner, outer)
        })
        .collect()
}
