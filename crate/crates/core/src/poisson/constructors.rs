use nalgebra::DMatrix;

use super::{ChartPoissonManifold, Exclusion};
use crate::actions::LieAlgebra;
use crate::numerics::Expression;
use crate::{Error, Result};

fn x(i: usize) -> Expression {
    Expression::coord(i)
}

fn check_antisymmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Invalid(format!("{what} must be square")));
    }
    let asym = (m + m.transpose()).amax();
    if asym > 1e-12 {
        return Err(Error::Invalid(format!("{what} is not antisymmetric (|M + Mᵀ| = {asym:e})")));
    }
    Ok(())
}

impl ChartPoissonManifold {
    /// The zero bracket on `R^d`.
    pub fn zero(dim: usize) -> Self {
        Self::from_upper(format!("zero{dim}"), dim, vec![Expression::zero(); dim * dim.saturating_sub(1) / 2])
    }

    /// `R^{2n}` with coordinates `(q_1, p_1, …, q_n, p_n)` and `{q_k, p_k} = 1`.
    pub fn standard_symplectic(dim: usize) -> Result<Self> {
        if !dim.is_multiple_of(2) || dim == 0 {
            return Err(Error::Invalid(format!("symplectic dimension must be even and positive, got {dim}")));
        }
        let mut m = vec![vec![Expression::zero(); dim]; dim];
        for k in 0..dim / 2 {
            m[2 * k][2 * k + 1] = Expression::one();
            m[2 * k + 1][2 * k] = Expression::constant(-1.0);
        }
        Self::from_matrix(format!("symplectic{dim}"), m)
    }

    /// The constant bivector `Π = Ω^{-1}` of a constant nondegenerate 2-form.
    pub fn from_symplectic_form(name: impl Into<String>, omega: &DMatrix<f64>) -> Result<Self> {
        check_antisymmetric(omega, "symplectic form")?;
        let inv = omega
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Invalid("symplectic form is degenerate".into()))?;
        let n = omega.nrows();
        let m = (0..n).map(|i| (0..n).map(|j| Expression::constant(inv[(i, j)])).collect()).collect();
        Self::from_matrix(name, m)
    }

    /// Lie-Poisson structure `{x_i, x_j} = Σ_k c^k_{ij} x_k` on the dual of `algebra`.
    pub fn lie_poisson(algebra: &LieAlgebra) -> Self {
        let n = algebra.dim();
        let upper = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                Expression::sum(
                    (0..n)
                        .filter(|&k| algebra.structure_constant(i, j, k) != 0.0)
                        .map(|k| x(k).scale(algebra.structure_constant(i, j, k))),
                )
            })
            .collect();
        Self::from_upper(format!("lie-poisson-{}", algebra.name()), n, upper)
    }

    /// Affine Poisson structure `Π = Π_lin + c` with `c_{ij} = c(e_i, e_j)`.
    pub fn affine(algebra: &LieAlgebra, c: &DMatrix<f64>) -> Result<Self> {
        check_antisymmetric(c, "cocycle c")?;
        let n = algebra.dim();
        if c.nrows() != n {
            return Err(Error::Dimension { expected: n, found: c.nrows() });
        }
        let lin = Self::lie_poisson(algebra);
        let upper = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| lin.entry(i, j).add(&Expression::constant(c[(i, j)])))
            .collect();
        Ok(Self::from_upper(format!("affine-{}", algebra.name()), n, upper))
    }

    /// Real form of the holomorphic quadratic bracket `{z_i, z_j} = a_ij z_i z_j`
    /// on `C^{n+1} \ {0}` with coordinates `(u_0, v_0, …, u_n, v_n)`, `z = u + i v`.
    ///
    /// The mixed relations are `{z_i, z̄_j} = -½ a_ij z_i z̄_j`; this is the
    /// choice under which the torus-invariant ratios `|z_i|² / Σ|z_l|²`
    /// reproduce the simplex bracket `(a_ij − Σ_l (a_il + a_lj) μ_l) μ_i μ_j`.
    pub fn quadratic_complex(a: &DMatrix<f64>) -> Result<Self> {
        Self::quadratic_complex_mixed(a, -0.5)
    }

    /// As [`Self::quadratic_complex`] with `{z_i, z̄_j} = mixing · a_ij z_i z̄_j`.
    /// Any real `mixing` yields a Poisson structure (log-canonical in `z, z̄`).
    pub fn quadratic_complex_mixed(a: &DMatrix<f64>, mixing: f64) -> Result<Self> {
        check_antisymmetric(a, "quadratic coefficient matrix")?;
        let n1 = a.nrows();
        let dim = 2 * n1;
        let u = |k: usize| x(2 * k);
        let v = |k: usize| x(2 * k + 1);
        let mut m = vec![vec![Expression::zero(); dim]; dim];
        for i in 0..n1 {
            for j in 0..n1 {
                if i == j || a[(i, j)] == 0.0 {
                    continue;
                }
                let aij = a[(i, j)];
                let b = mixing * aij;
                let re_zw = u(i).mul(&u(j)).sub(&v(i).mul(&v(j)));
                let re_zwbar = u(i).mul(&u(j)).add(&v(i).mul(&v(j)));
                let im_zw = u(i).mul(&v(j)).add(&v(i).mul(&u(j)));
                let im_zbar_w = u(i).mul(&v(j)).sub(&v(i).mul(&u(j)));
                m[2 * i][2 * j] = Expression::sum([re_zw.scale(0.5 * aij), re_zwbar.scale(0.5 * b)]);
                m[2 * i][2 * j + 1] = Expression::sum([im_zw.scale(0.5 * aij), im_zbar_w.scale(0.5 * b)]);
                m[2 * i + 1][2 * j] = Expression::sum([im_zw.scale(0.5 * aij), im_zbar_w.scale(-0.5 * b)]);
                m[2 * i + 1][2 * j + 1] = Expression::sum([re_zw.scale(-0.5 * aij), re_zwbar.scale(0.5 * b)]);
            }
        }
        Ok(Self::from_matrix(format!("quadratic-complex{}", n1 - 1), m)?
            .with_exclusion(Exclusion::Zero { coords: (0..dim).collect(), tol: 0.0 }))
    }

    /// Flat torus chart `(θ_1, θ_2)` with `ω = dθ_1 ∧ dθ_2`, both angles `2π`-periodic.
    pub fn torus_symplectic() -> Self {
        let omega = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        Self::from_symplectic_form("torus", &omega)
            .expect("nondegenerate")
            .with_periods(vec![Some(std::f64::consts::TAU); 2])
    }

    /// `C² \ {0}` with coordinates `(u_z, v_z, u_w, v_w)` and
    /// `ω = du_z ∧ dv_z + du_w ∧ dv_w`.
    pub fn c2_symplectic() -> Self {
        let mut omega = DMatrix::zeros(4, 4);
        for k in 0..2 {
            omega[(2 * k, 2 * k + 1)] = 1.0;
            omega[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self::from_symplectic_form("c2-minus-origin", &omega)
            .expect("nondegenerate")
            .with_exclusion(Exclusion::Zero { coords: vec![0, 1, 2, 3], tol: 0.0 })
    }

    /// Block-diagonal product; coordinates of `second` are shifted after `first`'s.
    pub fn product(first: &Self, second: &Self) -> Self {
        let (d1, d2) = (first.dim, second.dim);
        let dim = d1 + d2;
        let shift: Vec<Expression> = (0..d2).map(|i| x(i + d1)).collect();
        let upper = (0..dim)
            .flat_map(|i| (i + 1..dim).map(move |j| (i, j)))
            .map(|(i, j)| {
                if j < d1 {
                    first.entry(i, j)
                } else if i >= d1 {
                    second.entry(i - d1, j - d1).substitute(&shift, None)
                } else {
                    Expression::zero()
                }
            })
            .collect();
        let mut m = Self::from_upper(format!("{}x{}", first.name, second.name), dim, upper);
        m.periods = first.periods.iter().chain(&second.periods).cloned().collect();
        for e in &first.exclusions {
            m.exclusions.push(e.clone());
        }
        for Exclusion::Zero { coords, tol } in &second.exclusions {
            m.exclusions.push(Exclusion::Zero { coords: coords.iter().map(|c| c + d1).collect(), tol: *tol });
        }
        m
    }
}
