//! Lie algebras and their infinitesimal Poisson actions on charts.

mod algebra;

use nalgebra::DMatrix;

pub use algebra::{levi_civita, LieAlgebra};

use crate::momentum::MomentumValue;
use crate::numerics::Expression;
use crate::poisson::{ChartPoissonManifold, VectorFieldExpr};
use crate::{Error, Result};

/// How generator brackets relate to the algebra bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorphismSign {
    /// `[X_ξ, X_η] = −X_[ξ,η]` (left actions).
    Anti,
    /// `[X_ξ, X_η] = X_[ξ,η]`.
    Hom,
}

impl MorphismSign {
    fn factor(self) -> f64 {
        match self {
            MorphismSign::Anti => -1.0,
            MorphismSign::Hom => 1.0,
        }
    }
}

/// Infinitesimal action `ξ ↦ X_ξ` of a Lie algebra on a Poisson chart.
#[derive(Debug, Clone)]
pub struct PoissonAction {
    name: String,
    manifold: ChartPoissonManifold,
    algebra: LieAlgebra,
    generators: Vec<VectorFieldExpr>,
    sign: MorphismSign,
}

impl PoissonAction {
    /// `generators[i]` is the field of the basis element `e_i`.
    pub fn new(
        name: impl Into<String>,
        manifold: ChartPoissonManifold,
        algebra: LieAlgebra,
        generators: Vec<VectorFieldExpr>,
        sign: MorphismSign,
    ) -> Result<Self> {
        if generators.len() != algebra.dim() {
            return Err(Error::Dimension { expected: algebra.dim(), found: generators.len() });
        }
        if let Some(g) = generators.iter().find(|g| g.len() != manifold.dim()) {
            return Err(Error::Dimension { expected: manifold.dim(), found: g.len() });
        }
        Ok(PoissonAction { name: name.into(), manifold, algebra, generators, sign })
    }

    /// Like [`Self::new`], choosing the morphism sign with the smaller residual at `samples`.
    pub fn with_detected_sign(
        name: impl Into<String>,
        manifold: ChartPoissonManifold,
        algebra: LieAlgebra,
        generators: Vec<VectorFieldExpr>,
        samples: &[Vec<f64>],
    ) -> Result<Self> {
        let mut a = Self::new(name, manifold, algebra, generators, MorphismSign::Anti)?;
        let anti = a.morphism_residual(MorphismSign::Anti, samples)?;
        let hom = a.morphism_residual(MorphismSign::Hom, samples)?;
        if hom < anti {
            a.sign = MorphismSign::Hom;
        }
        Ok(a)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn manifold(&self) -> &ChartPoissonManifold {
        &self.manifold
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn generators(&self) -> &[VectorFieldExpr] {
        &self.generators
    }

    pub fn sign(&self) -> MorphismSign {
        self.sign
    }

    /// `X_ξ = Σ ξ_i X_{e_i}`.
    pub fn generator(&self, xi: &[f64]) -> Result<VectorFieldExpr> {
        if xi.len() != self.algebra.dim() {
            return Err(Error::Dimension { expected: self.algebra.dim(), found: xi.len() });
        }
        Ok(VectorFieldExpr::linear_combination(&self.generators, xi, self.manifold.dim()))
    }

    /// Max over generators and samples of `‖L_{X_{e_i}} Π‖_∞`.
    pub fn check_poisson_action(&self, samples: &[Vec<f64>]) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in samples {
            for g in &self.generators {
                worst = worst.max(self.manifold.lie_derivative_bivector(g, x)?.amax());
            }
        }
        Ok(worst)
    }

    /// Max of `‖[X_{e_i}, X_{e_j}] ∓ X_{[e_i, e_j]}‖_∞` under the stored sign.
    pub fn check_morphism(&self, samples: &[Vec<f64>]) -> Result<f64> {
        self.morphism_residual(self.sign, samples)
    }

    /// Residual of the morphism property for an explicit sign.
    pub fn morphism_residual(&self, sign: MorphismSign, samples: &[Vec<f64>]) -> Result<f64> {
        let n = self.algebra.dim();
        let mut worst = 0.0f64;
        for x in samples {
            let values: Vec<Vec<f64>> = self.generators.iter().map(|g| g.eval(x)).collect::<Result<_, _>>()?;
            for i in 0..n {
                for j in i + 1..n {
                    let lhs = self.generators[i].lie_bracket_at(&self.generators[j], x)?;
                    for (m, l) in lhs.iter().enumerate() {
                        let rhs: f64 = (0..n).map(|k| self.algebra.structure_constant(i, j, k) * values[k][m]).sum();
                        worst = worst.max((l - sign.factor() * rhs).abs());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// `⟨j(α), e_i⟩ = ⟨α, X_{e_i}(x)⟩`.
    pub fn cotangent_momentum_j(&self, x: &[f64], alpha: &[f64]) -> Result<MomentumValue> {
        if alpha.len() != self.manifold.dim() {
            return Err(Error::Dimension { expected: self.manifold.dim(), found: alpha.len() });
        }
        self.manifold.check_point(x)?;
        let comps = self
            .generators
            .iter()
            .map(|g| Ok(g.eval(x)?.iter().zip(alpha).map(|(v, a)| v * a).sum()))
            .collect::<Result<Vec<f64>>>()?;
        Ok(MomentumValue::new(comps))
    }

    /// Max over generators and samples of `|X_{e_i}(f)|`.
    pub fn invariance_residual(&self, f: &Expression, samples: &[Vec<f64>]) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in samples {
            let df = crate::numerics::differentiate(f, x)?;
            for g in &self.generators {
                let v = g.eval(x)?;
                worst = worst.max(v.iter().zip(&df).map(|(a, b)| a * b).sum::<f64>().abs());
            }
        }
        Ok(worst)
    }

    /// Matrix `M` with `X_ξ(x) = M(x) ξ`.
    pub fn generator_matrix(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.manifold.dim();
        let mut m = DMatrix::zeros(d, self.algebra.dim());
        for (j, g) in self.generators.iter().enumerate() {
            for (i, v) in g.eval(x)?.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }
}

fn x(i: usize) -> Expression {
    Expression::coord(i)
}

/// Builtin actions.
impl PoissonAction {
    /// Coadjoint action of `algebra` on its Lie-Poisson dual: `X_ξ = ad*_ξ`,
    /// the Hamiltonian field of the linear function `⟨·, ξ⟩`.
    pub fn coadjoint(algebra: &LieAlgebra) -> Self {
        let m = ChartPoissonManifold::lie_poisson(algebra);
        let gens = (0..algebra.dim()).map(|i| m.hamiltonian_vector_field(&x(i))).collect();
        let samples = m.random_points(4, 7);
        Self::with_detected_sign(format!("coadjoint-{}", algebra.name()), m, algebra.clone(), gens, &samples)
            .expect("consistent dimensions")
    }

    /// Circle action `θ·(z, w) = (e^{iθ} z, e^{-iθ} w)` on `C² \ {0}`.
    pub fn c2_circle() -> Self {
        let m = ChartPoissonManifold::c2_symplectic();
        let gen = VectorFieldExpr::new(vec![x(1).neg(), x(0), x(3), x(2).neg()]);
        Self::new("c2-circle", m, LieAlgebra::abelian(1), vec![gen], MorphismSign::Anti).expect("dims")
    }

    /// Phase rotations of `z_1, …, z_n` on the quadratic chart of `C^{n+1}`.
    pub fn torus_on_quadratic(a: &DMatrix<f64>) -> Result<Self> {
        let m = ChartPoissonManifold::quadratic_complex(a)?;
        let n = a.nrows() - 1;
        let gens = (1..=n)
            .map(|k| {
                let mut c = vec![Expression::zero(); m.dim()];
                c[2 * k] = x(2 * k + 1).neg();
                c[2 * k + 1] = x(2 * k);
                VectorFieldExpr::new(c)
            })
            .collect();
        Self::new(format!("torus{n}-quadratic"), m, LieAlgebra::abelian(n), gens, MorphismSign::Anti)
    }

    /// Translation in `θ_1` on the flat torus chart.
    pub fn torus_shift() -> Self {
        let m = ChartPoissonManifold::torus_symplectic();
        let gen = VectorFieldExpr::new(vec![Expression::one(), Expression::zero()]);
        Self::new("torus-shift", m, LieAlgebra::abelian(1), vec![gen], MorphismSign::Anti).expect("dims")
    }

    /// Cotangent lift of the rotations of `R²` to `T*R²`, coordinates
    /// `(q_1, p_1, q_2, p_2)`. The generator is the Hamiltonian field of
    /// `q_1 p_2 − q_2 p_1`.
    pub fn cotangent_rotation() -> Self {
        let m = ChartPoissonManifold::standard_symplectic(4).expect("even dimension");
        let gen = VectorFieldExpr::new(vec![x(2).neg(), x(3).neg(), x(0), x(1)]);
        Self::new("cotangent-rotation", m, LieAlgebra::abelian(1), vec![gen], MorphismSign::Anti).expect("dims")
    }

    /// Euler scaling `x·∂_x` on `so(3)*`; not a Poisson action.
    pub fn so3_scaling() -> Self {
        let m = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
        let gen = VectorFieldExpr::new((0..3).map(x).collect());
        Self::new("so3-scaling", m, LieAlgebra::abelian(1), vec![gen], MorphismSign::Anti).expect("dims")
    }

    /// The trivial action of a one-dimensional algebra.
    pub fn trivial(manifold: ChartPoissonManifold) -> Self {
        let d = manifold.dim();
        Self::new("trivial", manifold, LieAlgebra::abelian(1), vec![VectorFieldExpr::zero(d)], MorphismSign::Anti)
            .expect("dims")
    }
}
