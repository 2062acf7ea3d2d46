use nalgebra::DMatrix;

use crate::numerics::{DualValue, EvalError, Expression};
use crate::Result;

/// A 1-form with expression components `α = Σ α_i dx_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm(Vec<Expression>);

/// A vector field with expression components `X = Σ X^i ∂_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldExpr(Vec<Expression>);

fn eval_all(comps: &[Expression], x: &[f64], t: f64) -> Result<Vec<f64>, EvalError> {
    comps.iter().map(|c| c.eval_at(x, t)).collect()
}

fn jacobian(comps: &[Expression], x: &[f64], t: f64) -> Result<(Vec<f64>, DMatrix<f64>), EvalError> {
    let seeds = DualValue::seed(x);
    let mut vals = Vec::with_capacity(comps.len());
    let mut jac = DMatrix::zeros(comps.len(), x.len());
    for (i, c) in comps.iter().enumerate() {
        let d = c.eval_with(&seeds, t)?;
        vals.push(d.value);
        for (k, p) in d.partials.iter().enumerate() {
            jac[(i, k)] = *p;
        }
    }
    Ok((vals, jac))
}

impl OneForm {
    pub fn new(components: Vec<Expression>) -> Self {
        OneForm(components)
    }

    /// `df` on a chart of dimension `dim`.
    pub fn exact(f: &Expression, dim: usize) -> Self {
        OneForm((0..dim).map(|i| f.derivative(i)).collect())
    }

    pub fn constant(values: &[f64]) -> Self {
        OneForm(values.iter().map(|v| Expression::constant(*v)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        OneForm(vec![Expression::zero(); dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Expression] {
        &self.0
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Result<Vec<f64>, EvalError> {
        eval_all(&self.0, x, t)
    }

    /// Values and `∂_k α_i` at `(x, t)`.
    pub fn value_and_jacobian(&self, x: &[f64], t: f64) -> Result<(Vec<f64>, DMatrix<f64>), EvalError> {
        jacobian(&self.0, x, t)
    }

    pub fn scale(&self, f: &Expression) -> Self {
        OneForm(self.0.iter().map(|c| c.mul(f)).collect())
    }

    pub fn add(&self, other: &OneForm) -> Self {
        OneForm(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    /// `α(X)` as an expression.
    pub fn pair(&self, field: &VectorFieldExpr) -> Expression {
        Expression::sum(self.0.iter().zip(&field.0).map(|(a, v)| a.mul(v)))
    }

    pub fn substitute(&self, coords: &[Expression], time: Option<&Expression>) -> Self {
        OneForm(self.0.iter().map(|c| c.substitute(coords, time)).collect())
    }
}

impl VectorFieldExpr {
    pub fn new(components: Vec<Expression>) -> Self {
        VectorFieldExpr(components)
    }

    pub fn zero(dim: usize) -> Self {
        VectorFieldExpr(vec![Expression::zero(); dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Expression] {
        &self.0
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        eval_all(&self.0, x, 0.0)
    }

    /// Values and `jac[(i, k)] = ∂_k X^i`.
    pub fn value_and_jacobian(&self, x: &[f64], t: f64) -> Result<(Vec<f64>, DMatrix<f64>), EvalError> {
        jacobian(&self.0, x, t)
    }

    /// `X(f) = Σ X^i ∂_i f`.
    pub fn apply(&self, f: &Expression) -> Expression {
        Expression::sum(self.0.iter().enumerate().map(|(i, v)| v.mul(&f.derivative(i))))
    }

    pub fn scale(&self, c: f64) -> Self {
        VectorFieldExpr(self.0.iter().map(|e| e.scale(c)).collect())
    }

    pub fn add(&self, other: &VectorFieldExpr) -> Self {
        VectorFieldExpr(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    /// `Σ c_k X_k`.
    pub fn linear_combination(fields: &[VectorFieldExpr], coeffs: &[f64], dim: usize) -> Self {
        VectorFieldExpr(
            (0..dim)
                .map(|i| {
                    Expression::sum(
                        fields.iter().zip(coeffs).filter(|(_, c)| **c != 0.0).map(|(f, c)| f.0[i].scale(*c)),
                    )
                })
                .collect(),
        )
    }

    /// `(L_X β)_k = X^i ∂_i β_k + β_i ∂_k X^i`.
    pub fn lie_derivative_form(&self, beta: &OneForm) -> OneForm {
        let n = self.0.len();
        OneForm(
            (0..n)
                .map(|k| {
                    Expression::sum((0..n).flat_map(|i| {
                        [
                            self.0[i].mul(&beta.0[k].derivative(i)),
                            beta.0[i].mul(&self.0[i].derivative(k)),
                        ]
                    }))
                })
                .collect(),
        )
    }

    /// `[X, Y]^i = X^k ∂_k Y^i − Y^k ∂_k X^i` at `x`.
    pub fn lie_bracket_at(&self, other: &VectorFieldExpr, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        let (xv, xj) = self.value_and_jacobian(x, 0.0)?;
        let (yv, yj) = other.value_and_jacobian(x, 0.0)?;
        let n = xv.len();
        Ok((0..n).map(|i| (0..n).map(|k| xv[k] * yj[(i, k)] - yv[k] * xj[(i, k)]).sum()).collect())
    }
}
