use crate::numerics::{rk4_solve, Expression, GridCurve};
use crate::poisson::{ChartPoissonManifold, OneForm};
use crate::{Error, Result};

use super::{integrate_base, validate_cotangent, CotangentPath};

/// Endpoint drift across slices tolerated by [`CotangentHomotopy::new`].
pub const ENDPOINT_DRIFT_TOL: f64 = 1e-6;

/// A family `a(ε_j, ·)` of cotangent paths on the uniform grid `ε_j = j / M`.
#[derive(Debug, Clone)]
pub struct CotangentHomotopy {
    slices: Vec<CotangentPath>,
}

/// Outcome of [`CotangentHomotopy::verify`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HomotopyReport {
    /// `max_ε |b(ε, 1)|`.
    pub endpoint_b: f64,
    /// Worst defining-equation residual over all slices.
    pub slice_residual: f64,
    /// Worst displacement of either endpoint away from the `ε = 0` slice.
    pub endpoint_drift: f64,
}

impl CotangentHomotopy {
    /// Requires at least three slices on one chart with a common grid and fixed endpoints.
    pub fn new(slices: Vec<CotangentPath>) -> Result<Self> {
        if slices.len() < 3 {
            return Err(Error::Grid(format!("a homotopy needs at least 3 slices, got {}", slices.len())));
        }
        let first = &slices[0];
        for s in &slices[1..] {
            if s.steps() != first.steps() || s.manifold() != first.manifold() {
                return Err(Error::Invalid("homotopy slices must share chart and time grid".into()));
            }
        }
        let h = CotangentHomotopy { slices };
        let drift = h.endpoint_drift();
        if drift > ENDPOINT_DRIFT_TOL {
            return Err(Error::Precondition(format!("endpoints move by {drift:e} across the family")));
        }
        Ok(h)
    }

    /// Slices `(1 − ε) a_0 + ε a_1` over the base of `a_0`; meaningful when both
    /// paths lie in one fiber (zero bracket) over the same point.
    pub fn fiber_interpolation(a0: &CotangentPath, a1: &CotangentPath, eps_steps: usize) -> Result<Self> {
        if a0.steps() != a1.steps() || a0.base() != a1.base() {
            return Err(Error::Invalid("fiber interpolation needs paths over the same base samples".into()));
        }
        let slices = (0..=eps_steps)
            .map(|j| {
                let e = j as f64 / eps_steps as f64;
                let cov = a0
                    .covectors()
                    .values()
                    .iter()
                    .zip(a1.covectors().values())
                    .map(|(p, q)| p.iter().zip(q).map(|(u, v)| (1.0 - e) * u + e * v).collect())
                    .collect();
                CotangentPath::new(a0.manifold().clone(), a0.base().clone(), GridCurve::new(cov)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(slices)
    }

    pub fn slices(&self) -> &[CotangentPath] {
        &self.slices
    }

    pub fn eps_steps(&self) -> usize {
        self.slices.len() - 1
    }

    fn endpoint_drift(&self) -> f64 {
        let m = self.slices[0].manifold();
        let (s0, e0) = (self.slices[0].start(), self.slices[0].end());
        self.slices
            .iter()
            .flat_map(|s| m.displacement(s0, s.start()).into_iter().chain(m.displacement(e0, s.end())))
            .fold(0.0, |w, d| w.max(d.abs()))
    }

    /// `∂_ε a` at slice `j`, node `i`: central differences, one-sided second order at the ends.
    fn d_eps(&self, j: usize, i: usize) -> Vec<f64> {
        let m = self.eps_steps();
        let de = 1.0 / m as f64;
        let a = |jj: usize| self.slices[jj].covectors().get(i);
        let d = a(0).len();
        (0..d)
            .map(|k| {
                if j == 0 {
                    (-3.0 * a(0)[k] + 4.0 * a(1)[k] - a(2)[k]) / (2.0 * de)
                } else if j == m {
                    (3.0 * a(m)[k] - 4.0 * a(m - 1)[k] + a(m - 2)[k]) / (2.0 * de)
                } else {
                    (a(j + 1)[k] - a(j - 1)[k]) / (2.0 * de)
                }
            })
            .collect()
    }

    /// Solves `∂_t b = ∂_ε a + T(a, b)`, `b(ε, 0) = 0` on every slice, where
    /// `T(a, b)_m = ∂_m Π^{pq} a_p b_q` makes `♯ b = ∂_ε p(a)` propagate in `t`.
    /// The family is a cotangent homotopy when `b(ε, 1)` vanishes.
    pub fn verify(&self) -> Result<HomotopyReport> {
        let n = self.slices[0].steps();
        let mut endpoint_b = 0.0f64;
        let mut slice_residual = 0.0f64;
        for (j, slice) in self.slices.iter().enumerate() {
            slice_residual = slice_residual.max(validate_cotangent(slice)?);
            let m = slice.manifold();
            let jets = (0..=n).map(|i| m.jet_at(slice.base().get(i))).collect::<Result<Vec<_>, _>>()?;
            let forcing: Vec<Vec<f64>> = (0..=n).map(|i| self.d_eps(j, i)).collect();
            let d = m.dim();
            // Step 2/N, so every RK stage lands on a grid node.
            let b = rk4_solve(
                |t, b| {
                    let i = (t * n as f64).round() as usize;
                    let a = slice.covectors().get(i);
                    Ok((0..d)
                        .map(|mm| {
                            let dpi = &jets[i].dpi[mm];
                            let mut s = forcing[i][mm];
                            for p in 0..d {
                                for q in 0..d {
                                    s += dpi[(p, q)] * a[p] * b[q];
                                }
                            }
                            s
                        })
                        .collect())
                },
                &vec![0.0; d],
                n / 2,
            )?;
            endpoint_b = endpoint_b.max(b.last().iter().fold(0.0, |w, v| w.max(v.abs())));
        }
        Ok(HomotopyReport { endpoint_b, slice_residual, endpoint_drift: self.endpoint_drift() })
    }
}

/// Reparametrizations `a_ε(t) = τ_ε'(t) a(τ_ε(t))` with `τ_ε(t) = t + ε c t (1 − t)`
/// (monotone for `|c| < 1`), each slice integrated from `x0`.
pub fn reparametrization_family(
    manifold: &ChartPoissonManifold,
    covector_spec: &OneForm,
    x0: &[f64],
    steps: usize,
    eps_steps: usize,
    c: f64,
) -> Result<CotangentHomotopy> {
    if c.abs() >= 1.0 {
        return Err(Error::Invalid(format!("|c| must be below 1 for monotone reparametrizations, got {c}")));
    }
    let t = Expression::time();
    let ident: Vec<Expression> = (0..manifold.dim()).map(Expression::coord).collect();
    let slices = (0..=eps_steps)
        .map(|j| {
            let ec = c * j as f64 / eps_steps as f64;
            let tau = t.add(&t.sub(&t.powi(2)).scale(ec));
            let dtau = Expression::one().add(&Expression::one().sub(&t.scale(2.0)).scale(ec));
            let spec = covector_spec.substitute(&ident, Some(&tau)).scale(&dtau);
            integrate_base(manifold, &spec, x0, steps)
        })
        .collect::<Result<Vec<_>>>()?;
    CotangentHomotopy::new(slices)
}
