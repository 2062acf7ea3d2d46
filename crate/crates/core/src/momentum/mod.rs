//! Momentum maps on cotangent-path representatives.

mod lattice;

use nalgebra::{DMatrix, DVector};

pub use lattice::{lattice_basis, LatticeReport};

use crate::actions::{MorphismSign, PoissonAction};
use crate::numerics::{simpson, Expression, GridCurve};
use crate::paths::{concatenate, integrate_vector_field, CotangentPath};
use crate::{Error, Result};

/// An element of `g*` in the dual basis.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentumValue(Vec<f64>);

impl MomentumValue {
    pub fn new(components: Vec<f64>) -> Self {
        MomentumValue(components)
    }

    pub fn zero(n: usize) -> Self {
        MomentumValue(vec![0.0; n])
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn into_components(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `‖self − other‖_∞`.
    pub fn distance(&self, other: &MomentumValue) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn add(&self, other: &MomentumValue) -> MomentumValue {
        MomentumValue(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: f64) -> MomentumValue {
        MomentumValue(self.0.iter().map(|a| c * a).collect())
    }
}

fn check_chart(action: &PoissonAction, a: &CotangentPath) -> Result<()> {
    if a.manifold() != action.manifold() {
        return Err(Error::Invalid(format!(
            "path lives on `{}` but the action is on `{}`",
            a.manifold().name(),
            action.manifold().name()
        )));
    }
    Ok(())
}

/// `⟨J([a]), e_i⟩ = ∫_a X_{e_i}`.
pub fn lifted_momentum(action: &PoissonAction, a: &CotangentPath) -> Result<MomentumValue> {
    check_chart(action, a)?;
    let comps = action.generators().iter().map(|g| integrate_vector_field(g, a)).collect::<Result<Vec<_>>>()?;
    Ok(MomentumValue(comps))
}

/// `‖J(a_1 · a_2) − J(a_1) − J(a_2)‖_∞`.
pub fn check_cocycle(action: &PoissonAction, a1: &CotangentPath, a2: &CotangentPath) -> Result<f64> {
    let joined = lifted_momentum(action, &concatenate(a1, a2)?)?;
    Ok(joined.distance(&lifted_momentum(action, a1)?.add(&lifted_momentum(action, a2)?)))
}

/// A diffeomorphism of a chart with an explicit inverse, as expression maps.
#[derive(Debug, Clone)]
pub struct ChartMap {
    pub forward: Vec<Expression>,
    pub inverse: Vec<Expression>,
}

impl ChartMap {
    pub fn identity(dim: usize) -> Self {
        let id: Vec<Expression> = (0..dim).map(Expression::coord).collect();
        ChartMap { forward: id.clone(), inverse: id }
    }

    /// `x ↦ M x + c` with inverse `y ↦ M^{-1}(y − c)`.
    pub fn affine(m: &DMatrix<f64>, c: &[f64]) -> Result<Self> {
        let inv = m.clone().try_inverse().ok_or_else(|| Error::Invalid("affine map is singular".into()))?;
        let c_inv = -(&inv * DVector::from_column_slice(c));
        Ok(ChartMap { forward: affine_exprs(m, c), inverse: affine_exprs(&inv, c_inv.as_slice()) })
    }

    fn apply(exprs: &[Expression], x: &[f64]) -> Result<Vec<f64>> {
        Ok(exprs.iter().map(|e| e.eval(x)).collect::<Result<Vec<_>, _>>()?)
    }

    fn jacobian(exprs: &[Expression], x: &[f64]) -> Result<DMatrix<f64>> {
        let mut j = DMatrix::zeros(exprs.len(), x.len());
        for (i, e) in exprs.iter().enumerate() {
            for (k, d) in crate::numerics::differentiate(e, x)?.into_iter().enumerate() {
                j[(i, k)] = d;
            }
        }
        Ok(j)
    }
}

fn affine_exprs(m: &DMatrix<f64>, c: &[f64]) -> Vec<Expression> {
    (0..m.nrows())
        .map(|i| {
            Expression::sum(
                (0..m.ncols())
                    .filter(|&j| m[(i, j)] != 0.0)
                    .map(|j| Expression::coord(j).scale(m[(i, j)]))
                    .chain(std::iter::once(Expression::constant(c[i]))),
            )
        })
        .collect()
}

/// A transported path together with how far the map is from being Poisson.
#[derive(Debug, Clone)]
pub struct LiftedPath {
    pub path: CotangentPath,
    /// Max over base nodes of `‖Dφ Π(x) Dφᵀ − Π(φ(x))‖_∞`.
    pub poisson_residual: f64,
    pub warning: Option<String>,
}

/// Residual above which [`lift_poisson_diffeo`] records a warning.
pub const POISSON_MAP_TOL: f64 = 1e-8;

/// `φ̃(a) = (Tφ^{-1})* ∘ a`: base `φ(x(t))`, covectors `Dφ^{-1}(φ(x))ᵀ a(t)`.
pub fn lift_poisson_diffeo(phi: &ChartMap, a: &CotangentPath) -> Result<LiftedPath> {
    let m = a.manifold();
    let d = m.dim();
    if phi.forward.len() != d || phi.inverse.len() != d {
        return Err(Error::Dimension { expected: d, found: phi.forward.len() });
    }
    let mut base = Vec::with_capacity(a.steps() + 1);
    let mut cov = Vec::with_capacity(a.steps() + 1);
    let mut residual = 0.0f64;
    for i in 0..=a.steps() {
        let x = a.base().get(i);
        let y = ChartMap::apply(&phi.forward, x)?;
        let jinv = ChartMap::jacobian(&phi.inverse, &y)?;
        let b = jinv.transpose() * DVector::from_column_slice(a.covectors().get(i));
        let jf = ChartMap::jacobian(&phi.forward, x)?;
        let pushed = &jf * m.pi_at(x)? * jf.transpose();
        residual = residual.max((pushed - m.pi_at(&y)?).amax());
        base.push(y);
        cov.push(b.as_slice().to_vec());
    }
    let warning = (residual > POISSON_MAP_TOL)
        .then(|| format!("map is not Poisson along the path (residual {residual:e}); the lift is not a cotangent path"));
    Ok(LiftedPath {
        path: CotangentPath::new(m.clone(), GridCurve::new(base)?, GridCurve::new(cov)?)?,
        poisson_residual: residual,
        warning,
    })
}

/// Time-`s` flow of `X_ξ`, for generators affine in the chart coordinates.
pub fn generator_flow(action: &PoissonAction, xi: &[f64], s: f64) -> Result<ChartMap> {
    let field = action.generator(xi)?;
    let d = action.manifold().dim();
    // Affine iff the Jacobian is constant; probe at two unrelated points.
    let probes = action.manifold().random_points(2, 99);
    let (v0, j0) = field.value_and_jacobian(&probes[0], 0.0)?;
    let (_, j1) = field.value_and_jacobian(&probes[1], 0.0)?;
    if (&j0 - &j1).amax() > 1e-12 {
        return Err(Error::Precondition(format!("generator of {xi:?} is not affine; no closed-form flow")));
    }
    let b = DVector::from_vec(v0) - &j0 * DVector::from_column_slice(&probes[0]);
    let mut aug = DMatrix::zeros(d + 1, d + 1);
    aug.view_mut((0, 0), (d, d)).copy_from(&(&j0 * s));
    aug.view_mut((0, d), (d, 1)).copy_from(&(&b * s));
    let e = aug.exp();
    let lin = e.view((0, 0), (d, d)).into_owned();
    let shift: Vec<f64> = e.view((0, d), (d, 1)).iter().copied().collect();
    ChartMap::affine(&lin, &shift)
}

/// Matrix of the coadjoint-type transport of momentum values along `exp(sξ)`:
/// `exp(−s ad_ξ)ᵀ` for anti-homomorphic generators, `exp(s ad_ξ)ᵀ` otherwise.
pub fn coadjoint_transport(action: &PoissonAction, xi: &[f64], s: f64) -> DMatrix<f64> {
    let ad = action.algebra().ad(xi);
    let sign = match action.sign() {
        MorphismSign::Anti => -1.0,
        MorphismSign::Hom => 1.0,
    };
    (ad * (sign * s)).exp().transpose()
}

/// `‖J(φ̃_s a) − T_s J(a)‖_∞` with `φ_s` the flow of `X_ξ` and `T_s` from [`coadjoint_transport`].
pub fn check_equivariance(action: &PoissonAction, xi: &[f64], s: f64, a: &CotangentPath) -> Result<f64> {
    let lifted = lift_poisson_diffeo(&generator_flow(action, xi, s)?, a)?;
    if let Some(w) = lifted.warning {
        return Err(Error::Precondition(w));
    }
    let moved = lifted_momentum(action, &lifted.path)?;
    let j = DVector::from_vec(lifted_momentum(action, a)?.into_components());
    let want = coadjoint_transport(action, xi, s) * j;
    Ok(moved.distance(&MomentumValue(want.as_slice().to_vec())))
}

/// Sign `σ` in `J = σ (μ∘s − μ∘t)` with `s = p(a(0))`, `t = p(a(1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ExactnessSign {
    /// `J = μ(start) − μ(end)`.
    SourceMinusTarget,
    /// `J = μ(end) − μ(start)`.
    TargetMinusSource,
}

impl ExactnessSign {
    pub fn sigma(self) -> f64 {
        match self {
            ExactnessSign::SourceMinusTarget => 1.0,
            ExactnessSign::TargetMinusSource => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExactnessReport {
    pub residual: f64,
    pub sign: ExactnessSign,
    /// Residual under the other sign, for the record.
    pub other_residual: f64,
}

fn exactness_residuals(action: &PoissonAction, mu: &[Expression], a: &CotangentPath) -> Result<[f64; 2]> {
    if mu.len() != action.algebra().dim() {
        return Err(Error::Dimension { expected: action.algebra().dim(), found: mu.len() });
    }
    let j = lifted_momentum(action, a)?;
    let chart = action.manifold();
    let (s, t) = (chart.wrap(a.start()), chart.wrap(a.end()));
    let diff = mu
        .iter()
        .map(|m| Ok(m.eval(&s)? - m.eval(&t)?))
        .collect::<Result<Vec<f64>>>()?;
    let res = |sigma: f64| j.components().iter().zip(&diff).map(|(x, d)| (x - sigma * d).abs()).fold(0.0, f64::max);
    Ok([res(1.0), res(-1.0)])
}

/// `min_σ ‖J(a) − σ(μ(p(a(0))) − μ(p(a(1))))‖_∞`, recording the winning sign.
pub fn check_exactness(action: &PoissonAction, mu: &[Expression], a: &CotangentPath) -> Result<ExactnessReport> {
    check_exactness_all(action, mu, std::slice::from_ref(a))
}

/// One sign for all `paths`: the sign minimizing the worst residual.
pub fn check_exactness_all(action: &PoissonAction, mu: &[Expression], paths: &[CotangentPath]) -> Result<ExactnessReport> {
    let mut worst = [0.0f64; 2];
    for a in paths {
        let r = exactness_residuals(action, mu, a)?;
        worst = [worst[0].max(r[0]), worst[1].max(r[1])];
    }
    Ok(if worst[0] <= worst[1] {
        ExactnessReport { residual: worst[0], sign: ExactnessSign::SourceMinusTarget, other_residual: worst[1] }
    } else {
        ExactnessReport { residual: worst[1], sign: ExactnessSign::TargetMinusSource, other_residual: worst[0] }
    })
}

/// `⟨J([γ]), e_i⟩ = ∫_γ i_{X_{e_i}} ω` on a chart with invertible `Π`, where
/// `ω = Π^{-1}` is formed explicitly and `γ̇` taken from the grid.
pub fn symplectic_momentum(action: &PoissonAction, gamma: &GridCurve) -> Result<MomentumValue> {
    let m = action.manifold();
    if gamma.dim() != m.dim() {
        return Err(Error::Dimension { expected: m.dim(), found: gamma.dim() });
    }
    let n = action.algebra().dim();
    let mut samples = vec![Vec::with_capacity(gamma.steps() + 1); n];
    for i in 0..=gamma.steps() {
        let x = gamma.get(i);
        let omega = m
            .pi_at(x)?
            .try_inverse()
            .ok_or_else(|| Error::Precondition(format!("Π is singular at {x:?}")))?;
        let v = DVector::from_vec(gamma.velocity(i));
        let gens = action.generator_matrix(x)?;
        for (k, s) in samples.iter_mut().enumerate() {
            // (i_X ω)(γ̇) = ω(X, γ̇)
            s.push((gens.column(k).transpose() * &omega * &v)[(0, 0)]);
        }
    }
    Ok(MomentumValue(samples.iter().map(|s| simpson(s)).collect::<Result<Vec<_>>>()?))
}

/// `J` on loops sharing a base point; these sample the group of periods there.
pub fn period_samples(action: &PoissonAction, loops: &[CotangentPath], tol: f64) -> Result<Vec<MomentumValue>> {
    let Some(first) = loops.first() else {
        return Ok(Vec::new());
    };
    let m = action.manifold();
    for l in loops {
        if !l.is_loop(tol) {
            return Err(Error::Precondition(format!("path from {:?} to {:?} is not a loop", l.start(), l.end())));
        }
        if m.displacement(first.start(), l.start()).iter().any(|d| d.abs() > tol) {
            return Err(Error::Precondition(format!(
                "loops are based at different points {:?} and {:?}",
                first.start(),
                l.start()
            )));
        }
    }
    loops.iter().map(|l| lifted_momentum(action, l)).collect()
}
