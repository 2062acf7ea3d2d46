use nalgebra::DMatrix;

use crate::{Error, Result};

/// A finite-dimensional Lie algebra given by structure constants
/// `[e_i, e_j] = Σ_k c^k_{ij} e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    /// `c[(i * n + j) * n + k] = c^k_{ij}`.
    c: Vec<f64>,
    /// Faithful matrix realization of the basis, when known.
    matrices: Option<Vec<DMatrix<f64>>>,
}

impl LieAlgebra {
    /// Builds from the nonzero brackets `(i, j, k, c^k_{ij})` with `i < j`;
    /// antisymmetry is filled in. Rejects algebras failing the Jacobi identity.
    pub fn new(name: impl Into<String>, dim: usize, brackets: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = vec![0.0; dim * dim * dim];
        for &(i, j, k, v) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Invalid(format!("structure constant index out of range for dim {dim}")));
            }
            if i == j && v != 0.0 {
                return Err(Error::Invalid(format!("[e{i}, e{i}] must vanish")));
            }
            c[(i * dim + j) * dim + k] += v;
            c[(j * dim + i) * dim + k] -= v;
        }
        let alg = LieAlgebra { name: name.into(), dim, c, matrices: None };
        let r = alg.jacobi_residual();
        if r > 1e-10 {
            return Err(Error::Invalid(format!("structure constants violate Jacobi (residual {r:e})")));
        }
        Ok(alg)
    }

    /// Structure constants of the span of `basis` under the matrix commutator.
    pub fn from_matrices(name: impl Into<String>, basis: Vec<DMatrix<f64>>) -> Result<Self> {
        let dim = basis.len();
        let m = basis[0].nrows();
        // Columns are the flattened basis matrices.
        let flat = DMatrix::from_fn(m * m, dim, |r, col| basis[col][(r / m, r % m)]);
        let svd = flat.clone().svd(true, true);
        if svd.rank(1e-12) != dim {
            return Err(Error::Invalid("matrix basis is linearly dependent".into()));
        }
        let mut c = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let comm = &basis[i] * &basis[j] - &basis[j] * &basis[i];
                let rhs = DMatrix::from_fn(m * m, 1, |r, _| comm[(r / m, r % m)]);
                let coeffs = svd.solve(&rhs, 1e-14).map_err(|e| Error::Invalid(e.to_string()))?;
                let back = &flat * &coeffs;
                if (back - &rhs).amax() > 1e-10 {
                    return Err(Error::Invalid("matrix basis is not closed under commutators".into()));
                }
                for k in 0..dim {
                    // Snap least-squares noise so rational constants come out exact.
                    let snapped = (coeffs[k] * 1e9).round() / 1e9;
                    let v = if (snapped - coeffs[k]).abs() < 1e-11 { snapped } else { coeffs[k] };
                    c[(i * dim + j) * dim + k] = v;
                }
            }
        }
        Ok(LieAlgebra { name: name.into(), dim, c, matrices: Some(basis) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn matrices(&self) -> Option<&[DMatrix<f64>]> {
        self.matrices.as_deref()
    }

    pub fn bracket(&self, xi: &[f64], eta: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let w = xi[i] * eta[j];
                if w == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.structure_constant(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `ad_ξ = [ξ, ·]` in the basis.
    pub fn ad(&self, xi: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, j| (0..n).map(|i| xi[i] * self.structure_constant(i, j, k)).sum())
    }

    /// `max |Σ_m c^m_{ij} c^l_{mk} + c^m_{jk} c^l_{mi} + c^m_{ki} c^l_{mj}|`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let c = |i, j, k| self.structure_constant(i, j, k);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s: f64 = (0..n)
                            .map(|m| c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l))
                            .sum();
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|v| *v == 0.0)
    }

    /// so(3) with `[e_i, e_j] = ε_{ijk} e_k`, realized by infinitesimal rotations.
    pub fn so3() -> Self {
        let basis = (0..3)
            .map(|i| DMatrix::from_fn(3, 3, |r, s| -levi_civita(i, r, s)))
            .collect();
        Self::from_matrices("so3", basis).expect("so(3) realization")
    }

    /// Heisenberg algebra `[X, Y] = Z` realized by strictly upper triangular 3×3 matrices.
    pub fn heisenberg() -> Self {
        let e = |r, s| DMatrix::from_fn(3, 3, |a, b| if (a, b) == (r, s) { 1.0 } else { 0.0 });
        Self::from_matrices("heisenberg", vec![e(0, 1), e(1, 2), e(0, 2)]).expect("heisenberg realization")
    }

    /// gl(2) in the basis `E11, E12, E21, E22`.
    pub fn gl2() -> Self {
        let e = |r, s| DMatrix::from_fn(2, 2, |a, b| if (a, b) == (r, s) { 1.0 } else { 0.0 });
        Self::from_matrices("gl2", vec![e(0, 0), e(0, 1), e(1, 0), e(1, 1)]).expect("gl(2) realization")
    }

    /// Abelian algebra of dimension `n` (diagonal realization).
    pub fn abelian(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| DMatrix::from_fn(n, n, |a, b| if a == i && b == i { 1.0 } else { 0.0 }))
            .collect();
        let mut alg = Self::from_matrices(format!("r{n}"), basis).expect("abelian realization");
        alg.name = format!("abelian{n}");
        alg
    }

    /// Three-dimensional solvable algebra `[e0, e1] = e1`, `[e0, e2] = e2`.
    /// The involution `e2 ↦ -e2` is an automorphism with fixed subalgebra span(e0, e1).
    pub fn solvable3() -> Self {
        LieAlgebra::new("solvable3", 3, &[(0, 1, 1, 1.0), (0, 2, 2, 1.0)]).expect("solvable3")
    }
}

pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}
