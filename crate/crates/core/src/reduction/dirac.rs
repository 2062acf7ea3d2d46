use nalgebra::{DMatrix, DVector};

use crate::numerics::Expression;
use crate::poisson::{numerical_rank, ChartPoissonManifold, OneForm};
use crate::{Error, Result};

const MEMBERSHIP_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-8;

/// Choice of complement `E` with `T_x M = T_x N ⊕ E`.
#[derive(Debug, Clone, PartialEq)]
pub enum Complement {
    /// Span of the coordinate directions transverse to `N`.
    Coordinate,
    /// Orthogonal complement of `TN` for a constant positive definite metric.
    Metric(DMatrix<f64>),
}

/// A coordinate submanifold `N = {x_j = c_j, j ∉ tangent}` with a complement.
#[derive(Debug, Clone)]
pub struct DiracSubmanifoldSpec {
    manifold: ChartPoissonManifold,
    tangent: Vec<usize>,
    /// Values of the transverse coordinates; entries at tangent indices are unused.
    anchor_point: Vec<f64>,
    complement: Complement,
    symmetry: Option<DMatrix<f64>>,
}

impl DiracSubmanifoldSpec {
    /// `N` through `anchor_point` spanned by the coordinates listed in `tangent`.
    pub fn new(manifold: ChartPoissonManifold, tangent: Vec<usize>, anchor_point: Vec<f64>) -> Result<Self> {
        let d = manifold.dim();
        if anchor_point.len() != d {
            return Err(Error::Dimension { expected: d, found: anchor_point.len() });
        }
        let mut sorted = tangent.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != tangent.len() || sorted.last().is_some_and(|&i| i >= d) {
            return Err(Error::Invalid(format!("tangent indices {tangent:?} must be distinct and below {d}")));
        }
        Ok(DiracSubmanifoldSpec { manifold, tangent: sorted, anchor_point, complement: Complement::Coordinate, symmetry: None })
    }

    /// Fixed point set of a linear involution that is diagonal with entries `±1`.
    pub fn fixed_points(manifold: ChartPoissonManifold, involution: DMatrix<f64>) -> Result<Self> {
        let d = manifold.dim();
        if involution.shape() != (d, d) {
            return Err(Error::Dimension { expected: d, found: involution.nrows() });
        }
        let diagonal_sign = (0..d).all(|i| {
            (0..d).all(|j| if i == j { involution[(i, i)].abs() == 1.0 } else { involution[(i, j)] == 0.0 })
        });
        if !diagonal_sign {
            return Err(Error::Invalid("only diagonal ±1 involutions are supported".into()));
        }
        let tangent = (0..d).filter(|&i| involution[(i, i)] == 1.0).collect();
        let mut spec = Self::new(manifold, tangent, vec![0.0; d])?;
        spec.symmetry = Some(involution);
        Ok(spec)
    }

    pub fn with_complement(mut self, complement: Complement) -> Result<Self> {
        if let Complement::Metric(g) = &complement {
            let d = self.manifold.dim();
            if g.shape() != (d, d) {
                return Err(Error::Dimension { expected: d, found: g.nrows() });
            }
            if (g - g.transpose()).amax() > 1e-12 || g.clone().cholesky().is_none() {
                return Err(Error::Invalid("metric must be symmetric positive definite".into()));
            }
        }
        self.complement = complement;
        Ok(self)
    }

    pub fn manifold(&self) -> &ChartPoissonManifold {
        &self.manifold
    }

    pub fn tangent(&self) -> &[usize] {
        &self.tangent
    }

    pub fn transverse(&self) -> Vec<usize> {
        (0..self.manifold.dim()).filter(|i| !self.tangent.contains(i)).collect()
    }

    pub fn complement(&self) -> &Complement {
        &self.complement
    }

    pub fn symmetry(&self) -> Option<&DMatrix<f64>> {
        self.symmetry.as_ref()
    }

    /// Chart point for coordinates `y` on `N`.
    pub fn embed(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.tangent.len() {
            return Err(Error::Dimension { expected: self.tangent.len(), found: y.len() });
        }
        let mut x = self.anchor_point.clone();
        for (&i, v) in self.tangent.iter().zip(y) {
            x[i] = *v;
        }
        Ok(x)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.manifold.dim()
            && self.transverse().iter().all(|&j| (x[j] - self.anchor_point[j]).abs() <= MEMBERSHIP_TOL)
    }

    fn require_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.manifold.dim() {
            return Err(Error::Dimension { expected: self.manifold.dim(), found: x.len() });
        }
        if !self.contains(x) {
            return Err(Error::Precondition(format!("{x:?} does not lie on the submanifold")));
        }
        Ok(())
    }

    /// Columns `e_i`, `i ∈ tangent`.
    pub fn tangent_basis(&self) -> DMatrix<f64> {
        let d = self.manifold.dim();
        DMatrix::from_fn(d, self.tangent.len(), |r, c| if r == self.tangent[c] { 1.0 } else { 0.0 })
    }

    /// Columns spanning `E`.
    pub fn complement_basis(&self) -> DMatrix<f64> {
        let d = self.manifold.dim();
        let trans = self.transverse();
        let coord = DMatrix::from_fn(d, trans.len(), |r, c| if r == trans[c] { 1.0 } else { 0.0 });
        match &self.complement {
            Complement::Coordinate => coord,
            Complement::Metric(g) => {
                // g-orthogonal projector onto the complement of TN.
                let v = self.tangent_basis();
                let gram = v.transpose() * g * &v;
                let inv = gram.try_inverse().expect("positive definite Gram matrix");
                let p = DMatrix::identity(d, d) - &v * inv * v.transpose() * g;
                p * coord
            }
        }
    }

    /// Columns `ε_a ∈ E⁰` with `ε_a|_{TN} = dx_a` for each tangent coordinate.
    pub fn annihilator_basis(&self) -> DMatrix<f64> {
        let v = self.tangent_basis();
        match &self.complement {
            Complement::Coordinate => v,
            Complement::Metric(g) => {
                let gv = g * &v;
                let gram = v.transpose() * &gv;
                gv * gram.try_inverse().expect("positive definite Gram matrix")
            }
        }
    }

    /// Whether `TN` and `E` together span the tangent space.
    pub fn is_transversal(&self) -> bool {
        let v = self.tangent_basis();
        let e = self.complement_basis();
        let mut stacked = DMatrix::zeros(v.nrows(), v.ncols() + e.ncols());
        stacked.columns_mut(0, v.ncols()).copy_from(&v);
        stacked.columns_mut(v.ncols(), e.ncols()).copy_from(&e);
        numerical_rank(&stacked, RANK_TOL) == self.manifold.dim()
    }
}

/// Outcome of the test `TN ∩ ♯(TN⁰) = {0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct DiracCondition {
    pub holds: bool,
    pub intersection_dim: usize,
}

pub fn dirac_condition_check(spec: &DiracSubmanifoldSpec, x: &[f64]) -> Result<DiracCondition> {
    spec.require_point(x)?;
    let pi = spec.manifold.pi_at(x)?;
    let trans = spec.transverse();
    let sharp_conormal = DMatrix::from_fn(pi.nrows(), trans.len(), |r, c| pi[(r, trans[c])]);
    let v = spec.tangent_basis();
    let mut stacked = DMatrix::zeros(v.nrows(), v.ncols() + trans.len());
    stacked.columns_mut(0, v.ncols()).copy_from(&v);
    stacked.columns_mut(v.ncols(), trans.len()).copy_from(&sharp_conormal);
    // dim(A ∩ B) = dim A + dim B − dim(A + B); a zero image has rank 0.
    let image_rank = if sharp_conormal.amax() == 0.0 { 0 } else { numerical_rank(&sharp_conormal, RANK_TOL) };
    let intersection_dim = v.ncols() + image_rank - numerical_rank(&stacked, RANK_TOL);
    Ok(DiracCondition { holds: intersection_dim == 0, intersection_dim })
}

fn sharp_annihilator(spec: &DiracSubmanifoldSpec, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eps = spec.annihilator_basis();
    Ok((spec.manifold.pi_at(x)? * &eps, eps))
}

fn transverse_leak(spec: &DiracSubmanifoldSpec, sharp: &DMatrix<f64>) -> f64 {
    spec.transverse().iter().map(|&j| sharp.row(j).amax()).fold(0.0, f64::max)
}

/// `π_N(x)` in the tangent coordinates, computed as `{f̃, g̃}` for extensions
/// whose differentials lie in `E⁰`. Requires the Dirac condition, transversality
/// and `♯(E⁰) ⊂ TN` at `x`.
pub fn induced_bivector(spec: &DiracSubmanifoldSpec, x: &[f64]) -> Result<DMatrix<f64>> {
    if !spec.is_transversal() {
        return Err(Error::Precondition("complement is not transversal to the submanifold".into()));
    }
    let cond = dirac_condition_check(spec, x)?;
    if !cond.holds {
        return Err(Error::Precondition(format!(
            "TN ∩ ♯(TN⁰) has dimension {} at {x:?}",
            cond.intersection_dim
        )));
    }
    let (sharp, eps) = sharp_annihilator(spec, x)?;
    let leak = transverse_leak(spec, &sharp);
    if leak > MEMBERSHIP_TOL {
        return Err(Error::Precondition(format!("♯(E⁰) leaves TN by {leak:e} at {x:?}")));
    }
    Ok(eps.transpose() * sharp)
}

/// Symbolic `π_N` on the tangent coordinates, for complements that do not
/// depend on the point. Preconditions are not re-checked away from `x0`.
pub fn induced_manifold(spec: &DiracSubmanifoldSpec, x0: &[f64]) -> Result<ChartPoissonManifold> {
    induced_bivector(spec, x0)?;
    let d = spec.manifold.dim();
    let coords: Vec<Expression> = (0..d)
        .map(|i| match spec.tangent.iter().position(|&t| t == i) {
            Some(a) => Expression::coord(a),
            None => Expression::constant(spec.anchor_point[i]),
        })
        .collect();
    let eps = spec.annihilator_basis();
    let k = spec.tangent.len();
    let entries = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    Expression::sum((0..d).flat_map(|i| (0..d).map(move |j| (i, j))).filter_map(|(i, j)| {
                        let w = eps[(i, a)] * eps[(j, b)];
                        (w != 0.0 && i != j).then(|| spec.manifold.entry(i, j).scale(w))
                    }))
                    .substitute(&coords, None)
                })
                .collect()
        })
        .collect();
    ChartPoissonManifold::from_matrix(format!("{}-induced", spec.manifold.name()), entries)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LieDiracReport {
    /// Largest transverse component of `♯α` over the given forms.
    pub anchor: f64,
    /// Largest `|[α, β](e)|` over pairs of forms and `e` in the complement basis.
    pub closure: f64,
}

impl LieDiracReport {
    pub fn max(&self) -> f64 {
        self.anchor.max(self.closure)
    }
}

/// Checks that `E⁰` is closed under the anchor and the cotangent bracket at `x`.
/// Each form must take values in `E⁰` along `N`; its extension off `N` is arbitrary.
pub fn lie_dirac_closure_check(spec: &DiracSubmanifoldSpec, forms: &[OneForm], x: &[f64]) -> Result<LieDiracReport> {
    spec.require_point(x)?;
    let e = spec.complement_basis();
    let m = &spec.manifold;
    let pairing_with_e = |v: &[f64]| -> f64 {
        let col = DVector::from_column_slice(v);
        (e.transpose() * col).amax()
    };
    let mut anchor = 0.0f64;
    for (k, alpha) in forms.iter().enumerate() {
        let value = alpha.eval(x, 0.0)?;
        let off = pairing_with_e(&value);
        if off > MEMBERSHIP_TOL {
            return Err(Error::Precondition(format!("form {k} is not in E⁰ at {x:?} (|α(E)| = {off:e})")));
        }
        let s = m.sharp(alpha, x)?;
        anchor = spec.transverse().iter().fold(anchor, |w, &j| w.max(s[j].abs()));
    }
    let mut closure = 0.0f64;
    for (i, a) in forms.iter().enumerate() {
        for b in &forms[i + 1..] {
            let br = m.koszul_bracket(a, b)?.eval(x, 0.0)?;
            closure = closure.max(pairing_with_e(&br));
        }
    }
    Ok(LieDiracReport { anchor, closure })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FixedPointBracket {
    pub value: f64,
    /// Max difference between the four extension pairings.
    pub extension_residual: f64,
}

/// `{f̃, h̃}(x)` for `x` on the fixed set, computed with every combination of
/// the two supplied extensions of `f` and of `h`. When the spec carries an
/// involution, each extension is checked for invariance near `x`.
pub fn fixed_point_bracket(
    spec: &DiracSubmanifoldSpec,
    f: [&Expression; 2],
    h: [&Expression; 2],
    x: &[f64],
) -> Result<FixedPointBracket> {
    spec.require_point(x)?;
    let m = &spec.manifold;
    for (name, pair) in [("f", f), ("h", h)] {
        let (a, b) = (pair[0].eval(x)?, pair[1].eval(x)?);
        if (a - b).abs() > MEMBERSHIP_TOL * (1.0 + a.abs()) {
            return Err(Error::Precondition(format!("the two extensions of {name} differ at {x:?}")));
        }
        if let Some(tau) = &spec.symmetry {
            for e in pair {
                let r = invariance_defect(tau, e, x)?;
                if r > MEMBERSHIP_TOL {
                    return Err(Error::Precondition(format!("an extension of {name} is not invariant (defect {r:e})")));
                }
            }
        }
    }
    let mut values = Vec::with_capacity(4);
    for fe in f {
        for he in h {
            values.push(m.bracket(fe, he, x)?);
        }
    }
    let value = values[0];
    let extension_residual = values.iter().map(|v| (v - value).abs()).fold(0.0, f64::max);
    Ok(FixedPointBracket { value, extension_residual })
}

/// `max |f(τ y) − f(y)|` over a few points `y` around `x`.
fn invariance_defect(tau: &DMatrix<f64>, f: &Expression, x: &[f64]) -> Result<f64> {
    let d = x.len();
    let mut worst = 0.0f64;
    for k in 0..4 {
        let y: Vec<f64> = (0..d).map(|i| x[i] + 0.3 * ((1 + i + 3 * k) as f64 * 0.7).sin()).collect();
        let ty = (tau * DVector::from_column_slice(&y)).as_slice().to_vec();
        worst = worst.max((f.eval(&ty)? - f.eval(&y)?).abs());
    }
    Ok(worst)
}
