//! Numerical substrate: expression trees with forward-mode differentiation,
//! fixed-step RK4 and composite Simpson quadrature.

mod dual;
mod expr;
mod grid;
mod ode;
mod parse;
mod quad;

pub use dual::{Dual2, DualValue, Scalar};
pub use expr::{Expression, Node};
pub use grid::{GridCurve, Interpolation};
pub use ode::rk4_solve;
pub use parse::parse_expression;
pub use quad::{simpson, simpson_on};

/// Failure while evaluating an expression.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("domain violation at `{node}`: {reason}")]
    Domain { node: String, reason: &'static str },
    #[error("point has {found} coordinates, expression needs {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("point excluded from chart domain: {0}")]
    Excluded(String),
    #[error("non-finite value")]
    NonFinite,
}

/// Exact forward-mode gradient of `expr` at `x`.
pub fn differentiate(expr: &Expression, x: &[f64]) -> Result<Vec<f64>, EvalError> {
    Ok(expr.eval_with(&DualValue::seed(x), 0.0)?.partials)
}

/// Value, gradient and Hessian of `expr` at `x`.
pub fn second_order(expr: &Expression, x: &[f64]) -> Result<Dual2, EvalError> {
    expr.eval_with(&Dual2::seed(x), 0.0)
}

/// Gradient at `(x, t)` for time-dependent expressions.
pub fn differentiate_at(expr: &Expression, x: &[f64], t: f64) -> Result<Vec<f64>, EvalError> {
    Ok(expr.eval_with(&DualValue::seed(x), t)?.partials)
}
