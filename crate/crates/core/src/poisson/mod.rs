//! Poisson structures on a single coordinate chart.
//!
//! Sign conventions, fixed once for the whole crate:
//!
//! * `{f, g} = Σ ∂_i f Π^{ij} ∂_j g`;
//! * `♯(α)^i = Σ_j Π^{ij} α_j`, so `♯(df) = X_f` with `X_f(g) = {g, f}`;
//! * the Koszul bracket satisfies `[df, dg] = d{f, g}`;
//! * a nondegenerate chart carries the 2-form with matrix `Π^{-1}`, i.e.
//!   `ω(u, v) = uᵀ Π^{-1} v`.

mod constructors;
mod forms;

use nalgebra::DMatrix;

use crate::numerics::{second_order, DualValue, EvalError, Expression};
use crate::{Error, Result};

pub use forms::{OneForm, VectorFieldExpr};

/// Points removed from the chart domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Exclusion {
    /// Excludes points whose listed coordinates all lie within `tol` of zero.
    Zero { coords: Vec<usize>, tol: f64 },
}

impl Exclusion {
    fn excludes(&self, x: &[f64]) -> bool {
        match self {
            Exclusion::Zero { coords, tol } => coords.iter().all(|&i| x.get(i).is_some_and(|v| v.abs() <= *tol)),
        }
    }
}

/// A Poisson bivector on a chart of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoissonManifold {
    name: String,
    dim: usize,
    /// Entries `Π^{ij}` for `i < j`, row-major over the strict upper triangle.
    upper: Vec<Expression>,
    exclusions: Vec<Exclusion>,
    /// Coordinate periods for charts covering compact factors (torus angles).
    periods: Vec<Option<f64>>,
}

/// Bivector value and first derivatives at a point.
#[derive(Debug, Clone)]
pub struct BivectorJet {
    pub pi: DMatrix<f64>,
    /// `dpi[k][(i, j)] = ∂_k Π^{ij}`.
    pub dpi: Vec<DMatrix<f64>>,
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < dim);
    i * dim - i * (i + 1) / 2 + (j - i - 1)
}

impl ChartPoissonManifold {
    /// Builds from a full matrix of expressions; rejects non-antisymmetric input
    /// (checked structurally on the diagonal and by evaluation at `probe`).
    pub fn from_matrix(name: impl Into<String>, entries: Vec<Vec<Expression>>) -> Result<Self> {
        let dim = entries.len();
        if entries.iter().any(|r| r.len() != dim) {
            return Err(Error::Invalid("bivector matrix must be square".into()));
        }
        let mut probe: Vec<f64> = (0..dim).map(|i| 0.3 + 0.17 * i as f64).collect();
        probe.iter_mut().for_each(|v| *v = v.sin() + 0.5);
        for i in 0..dim {
            if let Ok(v) = entries[i][i].eval(&probe) {
                if v.abs() > 1e-12 {
                    return Err(Error::Invalid(format!("diagonal entry ({i},{i}) is nonzero")));
                }
            }
            for j in i + 1..dim {
                let (a, b) = (entries[i][j].eval(&probe), entries[j][i].eval(&probe));
                if let (Ok(a), Ok(b)) = (a, b) {
                    if (a + b).abs() > 1e-12 * (1.0 + a.abs()) {
                        return Err(Error::Invalid(format!("entries ({i},{j}) and ({j},{i}) are not antisymmetric")));
                    }
                }
            }
        }
        let upper = (0..dim).flat_map(|i| (i + 1..dim).map(move |j| (i, j))).map(|(i, j)| entries[i][j].clone()).collect();
        Ok(Self::from_upper(name, dim, upper))
    }

    /// Builds from the strict upper triangle, row-major.
    pub fn from_upper(name: impl Into<String>, dim: usize, upper: Vec<Expression>) -> Self {
        assert_eq!(upper.len(), dim * dim.saturating_sub(1) / 2, "upper triangle length");
        ChartPoissonManifold { name: name.into(), dim, upper, exclusions: Vec::new(), periods: vec![None; dim] }
    }

    pub fn with_exclusion(mut self, exclusion: Exclusion) -> Self {
        self.exclusions.push(exclusion);
        self
    }

    pub fn with_periods(mut self, periods: Vec<Option<f64>>) -> Self {
        assert_eq!(periods.len(), self.dim);
        self.periods = periods;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exclusions(&self) -> &[Exclusion] {
        &self.exclusions
    }

    pub fn periods(&self) -> &[Option<f64>] {
        &self.periods
    }

    /// `Π^{ij}` as an expression.
    pub fn entry(&self, i: usize, j: usize) -> Expression {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => Expression::zero(),
            Less => self.upper[upper_index(self.dim, i, j)].clone(),
            Greater => self.upper[upper_index(self.dim, j, i)].neg(),
        }
    }

    /// Fails when `x` has the wrong length or is excluded from the chart.
    pub fn check_point(&self, x: &[f64]) -> Result<(), EvalError> {
        if x.len() != self.dim {
            return Err(EvalError::Dimension { expected: self.dim, found: x.len() });
        }
        if let Some(e) = self.exclusions.iter().find(|e| e.excludes(x)) {
            return Err(EvalError::Excluded(format!("{x:?} excluded by {e:?} on chart `{}`", self.name)));
        }
        Ok(())
    }

    /// Difference of two chart points, reduced modulo coordinate periods.
    pub fn displacement(&self, from: &[f64], to: &[f64]) -> Vec<f64> {
        from.iter()
            .zip(to)
            .zip(&self.periods)
            .map(|((a, b), p)| {
                let d = b - a;
                match p {
                    Some(p) => d - p * (d / p).round(),
                    None => d,
                }
            })
            .collect()
    }

    /// Reduces periodic coordinates into `[0, period)`.
    pub fn wrap(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.periods)
            .map(|(v, p)| match p {
                Some(p) => v.rem_euclid(*p),
                None => *v,
            })
            .collect()
    }

    pub fn pi_at(&self, x: &[f64]) -> Result<DMatrix<f64>, EvalError> {
        self.check_point(x)?;
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = self.upper[upper_index(n, i, j)].eval(x)?;
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        Ok(m)
    }

    pub fn jet_at(&self, x: &[f64]) -> Result<BivectorJet, EvalError> {
        self.check_point(x)?;
        let n = self.dim;
        let seeds = DualValue::seed(x);
        let mut pi = DMatrix::zeros(n, n);
        let mut dpi = vec![DMatrix::zeros(n, n); n];
        for i in 0..n {
            for j in i + 1..n {
                let d = self.upper[upper_index(n, i, j)].eval_with(&seeds, 0.0)?;
                pi[(i, j)] = d.value;
                pi[(j, i)] = -d.value;
                for (k, dk) in dpi.iter_mut().enumerate() {
                    dk[(i, j)] = d.partials[k];
                    dk[(j, i)] = -d.partials[k];
                }
            }
        }
        Ok(BivectorJet { pi, dpi })
    }

    fn gradient(&self, f: &Expression, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        Ok(f.eval_with(&DualValue::seed(x), 0.0)?.partials)
    }

    /// `{f, g}(x) = df(x)ᵀ Π(x) dg(x)`.
    pub fn bracket(&self, f: &Expression, g: &Expression, x: &[f64]) -> Result<f64> {
        let pi = self.pi_at(x)?;
        let (df, dg) = (self.gradient(f, x)?, self.gradient(g, x)?);
        // Summing over i < j keeps the result exactly antisymmetric in (f, g).
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                s += pi[(i, j)] * (df[i] * dg[j] - df[j] * dg[i]);
            }
        }
        Ok(s)
    }

    /// `♯(a)` for a covector value `a` at `x`.
    pub fn sharp_covector(&self, x: &[f64], a: &[f64]) -> Result<Vec<f64>> {
        if a.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: a.len() });
        }
        let pi = self.pi_at(x)?;
        Ok((0..self.dim).map(|i| (0..self.dim).map(|j| pi[(i, j)] * a[j]).sum()).collect())
    }

    /// `♯(α)(x) = Π(x) α(x)`.
    pub fn sharp(&self, alpha: &OneForm, x: &[f64]) -> Result<Vec<f64>> {
        self.check_form(alpha.len())?;
        let a = alpha.eval(x, 0.0)?;
        self.sharp_covector(x, &a)
    }

    /// `♯(α)` as a vector field of expressions.
    pub fn sharp_expr(&self, alpha: &OneForm) -> Result<VectorFieldExpr> {
        self.check_form(alpha.len())?;
        let n = self.dim;
        Ok(VectorFieldExpr::new(
            (0..n)
                .map(|i| Expression::sum((0..n).map(|j| self.entry(i, j).mul(&alpha.components()[j]))))
                .collect(),
        ))
    }

    /// `X_f = ♯(df)`, as expressions.
    pub fn hamiltonian_vector_field(&self, f: &Expression) -> VectorFieldExpr {
        self.sharp_expr(&OneForm::exact(f, self.dim)).expect("exact form has chart dimension")
    }

    /// `Π(α, β) = Σ α_i Π^{ij} β_j` as an expression.
    pub fn pairing_expr(&self, alpha: &OneForm, beta: &OneForm) -> Expression {
        let n = self.dim;
        Expression::sum((0..n).flat_map(|i| {
            (0..n).filter(move |&j| j != i).map(move |j| {
                Expression::product([alpha.components()[i].clone(), self.entry(i, j), beta.components()[j].clone()])
            })
        }))
    }

    /// `{{f,g},h} + {{g,h},f} + {{h,f},g}` at `x`, from second-order jets of
    /// `f, g, h` and first derivatives of `Π`.
    pub fn jacobiator(&self, f: &Expression, g: &Expression, h: &Expression, x: &[f64]) -> Result<f64> {
        let jet = self.jet_at(x)?;
        let (jf, jg, jh) = (second_order(f, x)?, second_order(g, x)?, second_order(h, x)?);
        let n = self.dim;
        // Gradient of {a, b} at x.
        let grad_bracket = |a: &crate::numerics::Dual2, b: &crate::numerics::Dual2| -> Vec<f64> {
            (0..n)
                .map(|c| {
                    let mut s = 0.0;
                    for p in 0..n {
                        for q in 0..n {
                            s += a.hessian(c, p) * jet.pi[(p, q)] * b.grad[q]
                                + a.grad[p] * jet.dpi[c][(p, q)] * b.grad[q]
                                + a.grad[p] * jet.pi[(p, q)] * b.hessian(c, q);
                        }
                    }
                    s
                })
                .collect()
        };
        let term = |a, b, c: &crate::numerics::Dual2| bilinear(&jet.pi, &grad_bracket(a, b), &c.grad);
        Ok(term(&jf, &jg, &jh) + term(&jg, &jh, &jf) + term(&jh, &jf, &jg))
    }

    /// Max |jacobiator| over coordinate-function triples at `x`.
    pub fn coordinate_jacobiator(&self, x: &[f64]) -> Result<f64> {
        let jet = self.jet_at(x)?;
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let cyc = |a: usize, b: usize, c: usize| -> f64 {
                        (0..n).map(|m| jet.pi[(a, m)] * jet.dpi[m][(b, c)]).sum()
                    };
                    let r = cyc(i, j, k) + cyc(j, k, i) + cyc(k, i, j);
                    worst = worst.max(r.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Cotangent-algebroid bracket `[α, β] = L_{♯β} α − L_{♯α} β − dΠ(α, β)`,
    /// normalized so that `[df, dg] = d{f, g}` under `♯(df) = X_f`.
    pub fn koszul_bracket(&self, alpha: &OneForm, beta: &OneForm) -> Result<OneForm> {
        self.check_form(alpha.len())?;
        self.check_form(beta.len())?;
        let sa = self.sharp_expr(alpha)?;
        let sb = self.sharp_expr(beta)?;
        let l_sb_alpha = sb.lie_derivative_form(alpha);
        let l_sa_beta = sa.lie_derivative_form(beta);
        let p = self.pairing_expr(alpha, beta);
        Ok(OneForm::new(
            (0..self.dim)
                .map(|k| {
                    Expression::sum([
                        l_sb_alpha.components()[k].clone(),
                        l_sa_beta.components()[k].neg(),
                        p.derivative(k).neg(),
                    ])
                })
                .collect(),
        ))
    }

    /// `(L_X Π)^{ij} = X(Π^{ij}) − Π^{kj} ∂_k X^i − Π^{ik} ∂_k X^j` at `x`.
    pub fn lie_derivative_bivector(&self, field: &VectorFieldExpr, x: &[f64]) -> Result<DMatrix<f64>> {
        if field.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: field.len() });
        }
        let jet = self.jet_at(x)?;
        let (xv, jac) = field.value_and_jacobian(x, 0.0)?;
        let n = self.dim;
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let transport: f64 = (0..n).map(|k| xv[k] * jet.dpi[k][(i, j)]).sum();
            let stretch: f64 = (0..n).map(|k| jet.pi[(k, j)] * jac[(i, k)] + jet.pi[(i, k)] * jac[(j, k)]).sum();
            transport - stretch
        }))
    }

    /// Negated bivector.
    pub fn opposite(&self) -> Self {
        let mut m = self.clone();
        m.upper = m.upper.iter().map(|e| e.neg()).collect();
        m.name = format!("{}-opposite", self.name);
        m
    }

    /// `count` reproducible points in the box `[-1.5, 1.5]^d`, kept at distance
    /// at least `0.3` from every excluded set.
    pub fn random_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let near = self.exclusions.iter().any(|Exclusion::Zero { coords, .. }| {
                coords.iter().map(|&i| p[i] * p[i]).sum::<f64>().sqrt() < 0.3
            });
            if !near {
                out.push(p);
            }
        }
        out
    }

    /// Rank of `Π(x)` by singular values above `1e-8` relative to the largest.
    pub fn leaf_rank(&self, x: &[f64]) -> Result<usize> {
        Ok(numerical_rank(&self.pi_at(x)?, 1e-8))
    }

    fn check_form(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: len });
        }
        Ok(())
    }
}

pub(crate) fn bilinear(m: &DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..b.len() {
            s += a[i] * m[(i, j)] * b[j];
        }
    }
    s
}

/// Rank by singular values above `rel_tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * top).count()
}

#[cfg(test)]
mod tests;
