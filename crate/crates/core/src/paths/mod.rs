//! Cotangent paths `a: [0, 1] → T*M` with `d/dt p(a(t)) = ♯ a(t)`, sampled on
//! uniform grids, and verification of cotangent homotopies.

mod homotopy;

use nalgebra::DVector;

pub use homotopy::{reparametrization_family, CotangentHomotopy, HomotopyReport};

use crate::numerics::{rk4_solve, simpson, EvalError, Expression, GridCurve};
use crate::poisson::{ChartPoissonManifold, OneForm, VectorFieldExpr};
use crate::{Error, Result};

/// Tolerance on base-point mismatch when concatenating.
pub const ENDPOINT_TOL: f64 = 1e-8;

/// A cotangent path: base points and covectors on a shared uniform grid.
#[derive(Debug, Clone)]
pub struct CotangentPath {
    manifold: ChartPoissonManifold,
    base: GridCurve,
    covectors: GridCurve,
}

pub(crate) fn sharp_at(m: &ChartPoissonManifold, x: &[f64], a: &[f64]) -> Result<Vec<f64>, EvalError> {
    let pi = m.pi_at(x)?;
    let n = x.len();
    Ok((0..n).map(|i| (0..n).map(|j| pi[(i, j)] * a[j]).sum()).collect())
}

impl CotangentPath {
    /// Wraps samples; the step count must be even so that Simpson's rule applies.
    pub fn new(manifold: ChartPoissonManifold, base: GridCurve, covectors: GridCurve) -> Result<Self> {
        if base.steps() != covectors.steps() {
            return Err(Error::Grid(format!(
                "base has {} steps but covectors have {}",
                base.steps(),
                covectors.steps()
            )));
        }
        if !base.steps().is_multiple_of(2) {
            return Err(Error::Grid(format!("paths need an even number of steps, got {}", base.steps())));
        }
        for (g, what) in [(&base, "base"), (&covectors, "covector")] {
            if g.dim() != manifold.dim() {
                return Err(Error::Invalid(format!(
                    "{what} samples have dimension {} on a chart of dimension {}",
                    g.dim(),
                    manifold.dim()
                )));
            }
        }
        Ok(CotangentPath { manifold, base, covectors })
    }

    /// The trivial path `0_m` at `x`.
    pub fn constant(manifold: &ChartPoissonManifold, x: &[f64], steps: usize) -> Result<Self> {
        manifold.check_point(x)?;
        let d = manifold.dim();
        Self::new(
            manifold.clone(),
            GridCurve::from_fn(steps, d, |_| x.to_vec())?,
            GridCurve::from_fn(steps, d, |_| vec![0.0; d])?,
        )
    }

    pub fn manifold(&self) -> &ChartPoissonManifold {
        &self.manifold
    }

    pub fn base(&self) -> &GridCurve {
        &self.base
    }

    pub fn covectors(&self) -> &GridCurve {
        &self.covectors
    }

    pub fn steps(&self) -> usize {
        self.base.steps()
    }

    /// `p(a(0))`.
    pub fn start(&self) -> &[f64] {
        self.base.first()
    }

    /// `p(a(1))`.
    pub fn end(&self) -> &[f64] {
        self.base.last()
    }

    /// Whether the base returns to its start, modulo chart periods.
    pub fn is_loop(&self, tol: f64) -> bool {
        self.manifold.displacement(self.start(), self.end()).iter().all(|d| d.abs() <= tol)
    }
}

/// Solves `dx/dt = ♯ a(x, t)` from `x0` and samples `a` along the solution.
pub fn integrate_base(
    manifold: &ChartPoissonManifold,
    covector_spec: &OneForm,
    x0: &[f64],
    steps: usize,
) -> Result<CotangentPath> {
    if covector_spec.len() != manifold.dim() {
        return Err(Error::Dimension { expected: manifold.dim(), found: covector_spec.len() });
    }
    manifold.check_point(x0)?;
    let base = rk4_solve(|t, y| sharp_at(manifold, y, &covector_spec.eval(y, t)?), x0, steps)?;
    let covectors = (0..=steps)
        .map(|i| covector_spec.eval(base.get(i), base.time(i)))
        .collect::<Result<Vec<_>, _>>()?;
    CotangentPath::new(manifold.clone(), base, GridCurve::new(covectors)?)
}

/// Like [`integrate_base`] for covectors given as values at equally spaced
/// times, joined by smoothstep blends `3u² − 2u³` so that `a` is `C¹`.
pub fn integrate_waypoints(
    manifold: &ChartPoissonManifold,
    waypoints: &[Vec<f64>],
    x0: &[f64],
    steps: usize,
) -> Result<CotangentPath> {
    let d = manifold.dim();
    if waypoints.len() < 2 {
        return Err(Error::Invalid("need at least two covector waypoints".into()));
    }
    if let Some(w) = waypoints.iter().find(|w| w.len() != d) {
        return Err(Error::Dimension { expected: d, found: w.len() });
    }
    manifold.check_point(x0)?;
    let at = |t: f64| -> Vec<f64> {
        let segs = (waypoints.len() - 1) as f64;
        let s = (t.clamp(0.0, 1.0) * segs).min(segs - 1e-12);
        let k = s.floor() as usize;
        let u = s - k as f64;
        let w = u * u * (3.0 - 2.0 * u);
        waypoints[k].iter().zip(&waypoints[k + 1]).map(|(a, b)| a + w * (b - a)).collect()
    };
    let base = rk4_solve(|t, y| sharp_at(manifold, y, &at(t)), x0, steps)?;
    let covectors = GridCurve::from_fn(steps, d, at)?;
    CotangentPath::new(manifold.clone(), base, covectors)
}

/// A random covector field `a_k = c_k + d_k t + e_k x_{k+1}` (indices mod
/// `dim`) with `c, d ∈ [−1, 1)` and `e ∈ [−½, ½)`.
pub fn random_covector_spec(rng: &mut impl rand::Rng, dim: usize) -> OneForm {
    OneForm::new(
        (0..dim)
            .map(|k| {
                let (c, d, e): (f64, f64, f64) =
                    (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
                let x = Expression::coord((k + 1) % dim);
                Expression::constant(c)
                    .add(&Expression::time().scale(d))
                    .add(&x.scale(e))
            })
            .collect(),
    )
}

/// Default acceptance threshold for [`validate_cotangent`] on `steps` steps.
pub fn cotangent_tolerance(steps: usize) -> f64 {
    10.0 / (steps * steps) as f64
}

/// Max over nodes of `|ẋ(t_i) − ♯ a(t_i)|` with finite-difference velocities,
/// divided by `1 + v³` where `v` is the largest speed `|♯ a|` on the path.
/// The difference quotients err by `O(Δt² |x⁽³⁾|)`, which grows like `v³`,
/// so the scaled value can be compared against [`cotangent_tolerance`].
pub fn validate_cotangent(path: &CotangentPath) -> Result<f64> {
    let mut speed = 0.0f64;
    for i in 0..=path.steps() {
        let s = sharp_at(&path.manifold, path.base.get(i), path.covectors.get(i))?;
        speed = speed.max(s.iter().fold(0.0, |w, v| w.max(v.abs())));
    }
    let raw = node_residuals(path)?.into_iter().fold(0.0, f64::max);
    Ok(raw / (1.0 + speed.powi(3)))
}

/// Per-node residuals of the defining equation.
pub fn node_residuals(path: &CotangentPath) -> Result<Vec<f64>> {
    (0..=path.steps())
        .map(|i| {
            let v = path.base.velocity(i);
            let s = sharp_at(&path.manifold, path.base.get(i), path.covectors.get(i))?;
            Ok(v.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
        })
        .collect()
}

/// `a_1 · a_2`: `a_1` on `[0, ½]`, `a_2` on `[½, 1]`, covectors doubled.
///
/// Both paths must use the same number of steps; the junction covector is the
/// mean of the two one-sided values, which keeps Simpson integrals additive.
pub fn concatenate(a1: &CotangentPath, a2: &CotangentPath) -> Result<CotangentPath> {
    if a1.steps() != a2.steps() {
        return Err(Error::Grid(format!("cannot concatenate paths of {} and {} steps", a1.steps(), a2.steps())));
    }
    if a1.manifold != a2.manifold {
        return Err(Error::Invalid("paths live on different charts".into()));
    }
    let gap = a1.manifold.displacement(a1.end(), a2.start());
    if gap.iter().any(|g| g.abs() > ENDPOINT_TOL) {
        return Err(Error::EndpointMismatch { left: a1.end().to_vec(), right: a2.start().to_vec() });
    }
    // Shift a2 by whole periods so the base stays continuous in chart coordinates.
    let shift: Vec<f64> = a1.end().iter().zip(a2.start()).zip(&gap).map(|((e, s), g)| e + g - s).collect();
    let n = a1.steps();
    let mut base: Vec<Vec<f64>> = a1.base.values().to_vec();
    base.extend(a2.base.values()[1..].iter().map(|x| x.iter().zip(&shift).map(|(v, s)| v + s).collect()));
    let twice = |v: &[f64]| v.iter().map(|x| 2.0 * x).collect::<Vec<f64>>();
    let mut cov: Vec<Vec<f64>> = a1.covectors.values()[..n].iter().map(|v| twice(v)).collect();
    cov.push(a1.covectors.last().iter().zip(a2.covectors.first()).map(|(p, q)| p + q).collect());
    cov.extend(a2.covectors.values()[1..].iter().map(|v| twice(v)));
    CotangentPath::new(a1.manifold.clone(), GridCurve::new(base)?, GridCurve::new(cov)?)
}

/// `ā(t) = −a(1 − t)` over the reversed base.
pub fn reverse(a: &CotangentPath) -> CotangentPath {
    let base = a.base.values().iter().rev().cloned().collect();
    let cov = a.covectors.values().iter().rev().map(|v| v.iter().map(|x| -x).collect()).collect();
    CotangentPath::new(a.manifold.clone(), GridCurve::new(base).expect("grid"), GridCurve::new(cov).expect("grid"))
        .expect("same shape as input")
}

/// Samples of `⟨a(t_i), X(p(a(t_i)))⟩`.
pub fn integrand_samples(field: &VectorFieldExpr, a: &CotangentPath) -> Result<Vec<f64>> {
    if field.len() != a.manifold.dim() {
        return Err(Error::Dimension { expected: a.manifold.dim(), found: field.len() });
    }
    (0..=a.steps())
        .map(|i| {
            let x = field.eval(a.base.get(i))?;
            Ok(x.iter().zip(a.covectors.get(i)).map(|(u, v)| u * v).sum())
        })
        .collect()
}

/// `∫_a X = ∫_0^1 ⟨a(t), X(p(a(t)))⟩ dt` by composite Simpson.
pub fn integrate_vector_field(field: &VectorFieldExpr, a: &CotangentPath) -> Result<f64> {
    simpson(&integrand_samples(field, a)?)
}

/// `a(t) = Π(γ(t))^{-1} γ̇(t)` for a curve in a region where `Π` is invertible.
pub fn from_leaf_path(manifold: &ChartPoissonManifold, gamma: &GridCurve) -> Result<CotangentPath> {
    if gamma.dim() != manifold.dim() {
        return Err(Error::Dimension { expected: manifold.dim(), found: gamma.dim() });
    }
    let cov = (0..=gamma.steps())
        .map(|i| {
            let pi = manifold.pi_at(gamma.get(i))?;
            let inv = pi.try_inverse().ok_or_else(|| {
                Error::Precondition(format!("Π is singular at {:?}; the curve leaves the symplectic region", gamma.get(i)))
            })?;
            Ok((inv * DVector::from_vec(gamma.velocity(i))).as_slice().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    CotangentPath::new(manifold.clone(), gamma.clone(), GridCurve::new(cov)?)
}

/// `∫_0^1 a(t) dt`, componentwise by Simpson.
pub fn average_fiber_path(a: &CotangentPath) -> Result<Vec<f64>> {
    let cov = a.covectors.values();
    (0..a.manifold.dim()).map(|k| simpson(&cov.iter().map(|v| v[k]).collect::<Vec<_>>())).collect()
}
