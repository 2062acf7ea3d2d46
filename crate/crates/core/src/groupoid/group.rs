use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};

use crate::actions::LieAlgebra;
use crate::{Error, Result};

/// Tolerance on group membership.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Which matrix group an element belongs to; selects the membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    /// `gᵀg = I`, `det g = 1`.
    Rotation,
    /// Upper triangular with unit diagonal.
    Unipotent,
    /// Any invertible matrix.
    General,
}

impl GroupKind {
    pub fn membership_residual(self, m: &DMatrix<f64>) -> f64 {
        let n = m.nrows();
        match self {
            GroupKind::Rotation => {
                let orth = (m.transpose() * m - DMatrix::identity(n, n)).amax();
                orth.max((m.determinant() - 1.0).abs())
            }
            GroupKind::Unipotent => (0..n)
                .flat_map(|i| (0..=i).map(move |j| (i, j)))
                .map(|(i, j)| if i == j { (m[(i, i)] - 1.0).abs() } else { m[(i, j)].abs() })
                .fold(0.0, f64::max),
            GroupKind::General => {
                if m.determinant().abs() > MEMBERSHIP_TOL {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGroupElement {
    matrix: DMatrix<f64>,
    kind: GroupKind,
}

impl MatrixGroupElement {
    pub fn new(matrix: DMatrix<f64>, kind: GroupKind) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Invalid("group elements must be square matrices".into()));
        }
        let r = kind.membership_residual(&matrix);
        if r > MEMBERSHIP_TOL {
            return Err(Error::Invalid(format!("matrix is not in the {kind:?} group (residual {r:e})")));
        }
        Ok(MatrixGroupElement { matrix, kind })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn mul(&self, other: &Self) -> Self {
        MatrixGroupElement { matrix: &self.matrix * &other.matrix, kind: self.kind }
    }

    pub fn inverse(&self) -> Self {
        let matrix = match self.kind {
            GroupKind::Rotation => self.matrix.transpose(),
            _ => self.matrix.clone().try_inverse().expect("group elements are invertible"),
        };
        MatrixGroupElement { matrix, kind: self.kind }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).amax()
    }
}

/// A connected matrix group, given by a faithful realization of its Lie algebra.
#[derive(Debug, Clone)]
pub struct MatrixGroup {
    algebra: LieAlgebra,
    kind: GroupKind,
    /// Pseudo-inverse of the matrix whose columns are the flattened basis.
    coords: DMatrix<f64>,
}

impl MatrixGroup {
    pub fn new(algebra: LieAlgebra, kind: GroupKind) -> Result<Self> {
        let basis = algebra
            .matrices()
            .ok_or_else(|| Error::Invalid(format!("algebra {} has no matrix realization", algebra.name())))?;
        let m = basis[0].nrows();
        let flat = DMatrix::from_fn(m * m, basis.len(), |r, c| basis[c][(r / m, r % m)]);
        let coords = flat.pseudo_inverse(1e-12).map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(MatrixGroup { algebra, kind, coords })
    }

    /// SO(3) with the rotation-generator basis of so(3).
    pub fn rotations() -> Self {
        Self::new(LieAlgebra::so3(), GroupKind::Rotation).expect("so(3) has matrices")
    }

    /// Unipotent upper triangular 3×3 matrices.
    pub fn heisenberg() -> Self {
        Self::new(LieAlgebra::heisenberg(), GroupKind::Unipotent).expect("heisenberg has matrices")
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn matrix_size(&self) -> usize {
        self.basis()[0].nrows()
    }

    fn basis(&self) -> &[DMatrix<f64>] {
        self.algebra.matrices().expect("checked in new")
    }

    pub fn identity(&self) -> MatrixGroupElement {
        let n = self.matrix_size();
        MatrixGroupElement { matrix: DMatrix::identity(n, n), kind: self.kind }
    }

    /// Wraps a matrix after checking membership and size.
    pub fn element(&self, matrix: DMatrix<f64>) -> Result<MatrixGroupElement> {
        if matrix.nrows() != self.matrix_size() {
            return Err(Error::Dimension { expected: self.matrix_size(), found: matrix.nrows() });
        }
        MatrixGroupElement::new(matrix, self.kind)
    }

    /// `Σ ξ_i E_i`.
    pub fn hat(&self, xi: &[f64]) -> DMatrix<f64> {
        let n = self.matrix_size();
        self.basis().iter().zip(xi).fold(DMatrix::zeros(n, n), |acc, (b, x)| acc + b * *x)
    }

    /// Coordinates of a matrix in the algebra basis (least squares).
    pub fn vee(&self, m: &DMatrix<f64>) -> Vec<f64> {
        let n = self.matrix_size();
        let flat = DVector::from_fn(n * n, |r, _| m[(r / n, r % n)]);
        (&self.coords * flat).as_slice().to_vec()
    }

    pub fn exp(&self, xi: &[f64]) -> MatrixGroupElement {
        MatrixGroupElement { matrix: self.hat(xi).exp(), kind: self.kind }
    }

    /// Matrix of `Ad_g ξ = g ξ g⁻¹` in the algebra basis.
    pub fn adjoint(&self, g: &MatrixGroupElement) -> DMatrix<f64> {
        let inv = g.inverse();
        let d = self.dim();
        let mut ad = DMatrix::zeros(d, d);
        for (j, b) in self.basis().iter().enumerate() {
            let img = self.vee(&(g.matrix() * b * inv.matrix()));
            for (i, v) in img.into_iter().enumerate() {
                ad[(i, j)] = v;
            }
        }
        ad
    }

    /// Left coadjoint action `Ad*_g = (Ad_{g⁻¹})ᵀ` on dual-basis components.
    pub fn coadjoint(&self, g: &MatrixGroupElement) -> DMatrix<f64> {
        self.adjoint(&g.inverse()).transpose()
    }

    /// `exp(ξ)` for `ξ` uniform in `[-scale, scale]^d`.
    pub fn random_elements(&self, count: usize, scale: f64, seed: u64) -> Vec<MatrixGroupElement> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let xi: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-scale..scale)).collect();
                self.exp(&xi)
            })
            .collect()
    }

    /// `max |d/ds Ad*_{exp(sξ)} − (−ad_ξ)ᵀ|` over basis `ξ`, by central differences.
    /// Small values confirm that [`Self::coadjoint`] is the left coadjoint action.
    pub fn coadjoint_convention_residual(&self) -> f64 {
        let h = 1e-6;
        let d = self.dim();
        (0..d)
            .map(|i| {
                let mut xi = vec![0.0; d];
                xi[i] = h;
                let plus = self.coadjoint(&self.exp(&xi));
                xi[i] = -h;
                let minus = self.coadjoint(&self.exp(&xi));
                let fd = (plus - minus) / (2.0 * h);
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                (fd + self.algebra.ad(&e).transpose()).amax()
            })
            .fold(0.0, f64::max)
    }
}
