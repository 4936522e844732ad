//! Expression parsing and exact first-order differentiation of scalar
//! fields on a chart.

mod dual;
mod expr;
mod field;

pub use dual::{Dual, DualScalar, Real};
pub use expr::{parse, EvalError, Expr, ExprDisplay, Func, ParseError};
pub use field::{coordinates, seed, seed_nested, Coordinates, Point, ScalarField};

/// Parses `text` into a field over `coord_names`.
pub fn parse_expression(text: &str, coord_names: &[String]) -> Result<ScalarField, ParseError> {
    ScalarField::parse(text, &coordinates(coord_names))
}

/// `(f(p), ∂f/∂x^j(p))`, computed by dual-number propagation.
pub fn eval_with_derivative(f: &ScalarField, p: &Point, j: usize) -> Result<DualScalar, EvalError> {
    f.eval_with_derivative(p, j)
}
