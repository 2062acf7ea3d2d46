//! Quotients by invariant generators, orbit types of the torus action on the
//! quadratic chart, and the cotangent-algebroid checks used for fixed point
//! sets and basic forms.

mod basic;
mod dirac;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};

pub use basic::{basic_forms_check, BasicFormsReport, BASIC_TOL};
pub use dirac::{
    dirac_condition_check, fixed_point_bracket, induced_bivector, induced_manifold, lie_dirac_closure_check,
    Complement, DiracCondition, DiracSubmanifoldSpec, FixedPointBracket, LieDiracReport,
};

use crate::actions::PoissonAction;
use crate::numerics::Expression;
use crate::poisson::{ChartPoissonManifold, Exclusion};
use crate::{Error, Result};

/// Max allowed `|σ(preimage) − sample|` in [`quotient_bracket_check`].
pub const PREIMAGE_TOL: f64 = 1e-8;

/// Invariant generators `σ_1, …, σ_k` of an action together with the claimed
/// brackets `{σ_i, σ_j}` written in the quotient variables `q_1, …, q_k`.
#[derive(Debug, Clone)]
pub struct InvariantSystem {
    name: String,
    action: PoissonAction,
    generators: Vec<Expression>,
    claimed: Vec<Vec<Expression>>,
    exclusions: Vec<Exclusion>,
}

/// A quotient point with a preimage on the original chart.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSample {
    pub point: Vec<f64>,
    pub preimage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PairResidual {
    pub i: usize,
    pub j: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct QuotientReport {
    pub pairs: Vec<PairResidual>,
    pub max_residual: f64,
}

impl InvariantSystem {
    pub fn new(
        name: impl Into<String>,
        action: PoissonAction,
        generators: Vec<Expression>,
        claimed: Vec<Vec<Expression>>,
    ) -> Result<Self> {
        let k = generators.len();
        if claimed.len() != k || claimed.iter().any(|r| r.len() != k) {
            return Err(Error::Invalid(format!("claimed brackets must form a {k}×{k} matrix")));
        }
        let d = action.manifold().dim();
        if let Some(bad) = generators.iter().position(|g| g.arity() > d) {
            return Err(Error::Invalid(format!("generator {bad} uses coordinates beyond the chart dimension {d}")));
        }
        if let Some(bad) = claimed.iter().flatten().position(|e| e.arity() > k) {
            return Err(Error::Invalid(format!(
                "claimed entry {} uses more than {k} quotient variables",
                bad
            )));
        }
        Ok(InvariantSystem { name: name.into(), action, generators, claimed, exclusions: Vec::new() })
    }

    /// Marks a region of the quotient chart as excluded (e.g. the image of a removed point).
    pub fn with_quotient_exclusion(mut self, exclusion: Exclusion) -> Self {
        self.exclusions.push(exclusion);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn action(&self) -> &PoissonAction {
        &self.action
    }

    pub fn generators(&self) -> &[Expression] {
        &self.generators
    }

    pub fn claimed(&self) -> &[Vec<Expression>] {
        &self.claimed
    }

    pub fn quotient_dim(&self) -> usize {
        self.generators.len()
    }

    /// `σ(x)`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.action.manifold().check_point(x)?;
        Ok(self.generators.iter().map(|g| g.eval(x)).collect::<Result<_, _>>()?)
    }

    /// Max over generators of [`PoissonAction::invariance_residual`].
    pub fn invariance_residual(&self, samples: &[Vec<f64>]) -> Result<f64> {
        self.generators
            .iter()
            .map(|g| self.action.invariance_residual(g, samples))
            .try_fold(0.0f64, |w, r| Ok(w.max(r?)))
    }

    /// Claimed bracket matrix at a quotient point.
    pub fn claimed_at(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        let k = self.quotient_dim();
        if q.len() != k {
            return Err(Error::Dimension { expected: k, found: q.len() });
        }
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self.claimed[i][j].eval(q)?;
            }
        }
        Ok(m)
    }

    /// Claimed brackets pulled back along `σ`, as functions on the original chart.
    pub fn claimed_upstairs(&self, i: usize, j: usize) -> Expression {
        self.claimed[i][j].substitute(&self.generators, None)
    }

    /// The claimed brackets as a bivector on the quotient chart.
    pub fn quotient_manifold(&self) -> Result<ChartPoissonManifold> {
        let mut m = ChartPoissonManifold::from_matrix(format!("{}-quotient", self.name), self.claimed.clone())?;
        for e in &self.exclusions {
            m = m.with_exclusion(e.clone());
        }
        Ok(m)
    }

    /// Pairs every preimage with its image `σ(x)`.
    pub fn samples_from_preimages(&self, preimages: &[Vec<f64>]) -> Result<Vec<QuotientSample>> {
        preimages
            .iter()
            .map(|x| Ok(QuotientSample { point: self.project(x)?, preimage: x.clone() }))
            .collect()
    }
}

/// Compares `{σ_i, σ_j}` at each preimage against the claimed expression at
/// the quotient point. Residuals are maximized over samples, per pair `i < j`.
pub fn quotient_bracket_check(sys: &InvariantSystem, samples: &[QuotientSample]) -> Result<QuotientReport> {
    let k = sys.quotient_dim();
    let m = sys.action.manifold();
    let mut pairs: Vec<PairResidual> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| PairResidual { i, j, residual: 0.0 })).collect();
    for s in samples {
        let image = sys.project(&s.preimage)?;
        if image.len() != s.point.len() {
            return Err(Error::Dimension { expected: image.len(), found: s.point.len() });
        }
        let gap = image.iter().zip(&s.point).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if gap > PREIMAGE_TOL {
            return Err(Error::Precondition(format!(
                "preimage {:?} maps to {:?}, not {:?} (gap {gap:e})",
                s.preimage, image, s.point
            )));
        }
        let claimed = sys.claimed_at(&s.point)?;
        for p in &mut pairs {
            let up = m.bracket(&sys.generators[p.i], &sys.generators[p.j], &s.preimage)?;
            p.residual = p.residual.max((up - claimed[(p.i, p.j)]).abs());
        }
    }
    let max_residual = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(QuotientReport { pairs, max_residual })
}

fn x(i: usize) -> Expression {
    Expression::coord(i)
}

fn modulus_sq(k: usize) -> Expression {
    x(2 * k).powi(2).add(&x(2 * k + 1).powi(2))
}

/// `{μ_i, μ_j} = (a_ij − Σ_l (a_il + a_lj) μ_l) μ_i μ_j` in variables `μ_0, …, μ_n`.
pub fn simplex_bracket(a: &DMatrix<f64>) -> Vec<Vec<Expression>> {
    let n1 = a.nrows();
    (0..n1)
        .map(|i| {
            (0..n1)
                .map(|j| {
                    if i == j {
                        return Expression::zero();
                    }
                    let coeff = Expression::sum(
                        std::iter::once(Expression::constant(a[(i, j)]))
                            .chain((0..n1).map(|l| x(l).scale(-(a[(i, l)] + a[(l, j)])))),
                    );
                    Expression::product([coeff, x(i), x(j)])
                })
                .collect()
        })
        .collect()
}

impl InvariantSystem {
    /// Torus-invariant ratios `μ_i = |z_i|² / Σ_l |z_l|²` on the quadratic chart
    /// for the skew matrix `a`, with the simplex bracket as the claim.
    pub fn simplex(a: &DMatrix<f64>) -> Result<Self> {
        let action = PoissonAction::torus_on_quadratic(a)?;
        let n1 = a.nrows();
        let total = Expression::sum((0..n1).map(modulus_sq));
        let gens = (0..n1).map(|k| modulus_sq(k).div(&total)).collect();
        Self::new(format!("simplex{}", n1 - 1), action, gens, simplex_bracket(a))
    }

    /// Circle-invariant polynomials `σ_1 = 2 Re(zw)`, `σ_2 = −2 Im(zw)`,
    /// `σ_3 = |z|² − |w|²` on `C² \ {0}`, claiming
    /// `{σ_1, σ_2} = (σ_1² + σ_2² + σ_3²)^{1/2}` and `{σ_1, σ_3} = {σ_2, σ_3} = 0`.
    pub fn c2_quotient() -> Self {
        Self::c2_quotient_scaled(1.0)
    }

    /// As [`Self::c2_quotient`] with `{σ_1, σ_2} = factor · (σ_1² + σ_2² + σ_3²)^{1/2}`.
    pub fn c2_quotient_scaled(factor: f64) -> Self {
        let action = PoissonAction::c2_circle();
        let (uz, vz, uw, vw) = (x(0), x(1), x(2), x(3));
        let s1 = uz.mul(&uw).sub(&vz.mul(&vw)).scale(2.0);
        let s2 = uz.mul(&vw).add(&vz.mul(&uw)).scale(-2.0);
        let s3 = modulus_sq(0).sub(&modulus_sq(1));
        let radius = Expression::sum((0..3).map(|i| x(i).powi(2))).sqrt().scale(factor);
        let z = Expression::zero;
        let claimed = vec![
            vec![z(), radius.clone(), z()],
            vec![radius.neg(), z(), z()],
            vec![z(), z(), z()],
        ];
        Self::new("c2-circle", action, vec![s1, s2, s3], claimed)
            .expect("consistent shapes")
            .with_quotient_exclusion(Exclusion::Zero { coords: vec![0, 1, 2], tol: 0.0 })
    }
}

/// `σ_4 = |z|² + |w|²` on the `C²` chart; `σ_4² = σ_1² + σ_2² + σ_3²`.
pub fn c2_norm_invariant() -> Expression {
    modulus_sq(0).add(&modulus_sq(1))
}

/// `μ = ½(|w|² − |z|²)` on the `C²` chart.
pub fn c2_circle_momentum() -> Expression {
    modulus_sq(1).sub(&modulus_sq(0)).scale(0.5)
}

/// Random interior simplex points `μ ∈ Δ^n` (all `μ_k ≥ 0.02`) with preimages
/// `z_k = r √μ_k e^{iφ_k}` for random `r` and phases.
pub fn simplex_samples(n: usize, count: usize, seed: u64) -> Vec<QuotientSample> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = w.iter().sum();
            let mu: Vec<f64> = w.iter().map(|v| v / total).collect();
            let r: f64 = rng.gen_range(0.5..2.0);
            let preimage = mu
                .iter()
                .flat_map(|m| {
                    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let amp = r * m.sqrt();
                    [amp * phi.cos(), amp * phi.sin()]
                })
                .collect();
            QuotientSample { point: mu, preimage }
        })
        .collect()
}

/// Which face relation to test in [`face_invariance_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceCondition {
    /// Points with `μ_l = 0`; checks `{μ_i, μ_l} = 0` for all `i`.
    CoordinateZero(usize),
    /// Points with `Σ μ_l = 1`; checks `{μ_i, Σ_l μ_l} = 0` for all `i`.
    UnitSum,
}

pub const FACE_POINT_TOL: f64 = 1e-12;

/// Max over points and `i` of the claimed bracket that must vanish on the face.
pub fn face_invariance_check(sys: &InvariantSystem, condition: FaceCondition, points: &[Vec<f64>]) -> Result<f64> {
    let k = sys.quotient_dim();
    let mut worst = 0.0f64;
    for p in points {
        let m = sys.claimed_at(p)?;
        match condition {
            FaceCondition::CoordinateZero(l) => {
                if l >= k {
                    return Err(Error::Dimension { expected: k, found: l + 1 });
                }
                if p[l].abs() > FACE_POINT_TOL {
                    return Err(Error::Precondition(format!("point {p:?} has coordinate {l} = {} ≠ 0", p[l])));
                }
                worst = (0..k).fold(worst, |w, i| w.max(m[(i, l)].abs()));
            }
            FaceCondition::UnitSum => {
                let s: f64 = p.iter().sum();
                if (s - 1.0).abs() > FACE_POINT_TOL {
                    return Err(Error::Precondition(format!("point {p:?} has coordinate sum {s} ≠ 1")));
                }
                worst = (0..k).fold(worst, |w, i| w.max(m.row(i).sum().abs()));
            }
        }
    }
    Ok(worst)
}

/// Random points of `R^{n+1}` satisfying `condition` (coordinates in `[-1, 1]`
/// before projection).
pub fn face_points(n: usize, condition: FaceCondition, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut p: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            match condition {
                FaceCondition::CoordinateZero(l) => p[l] = 0.0,
                FaceCondition::UnitSum => {
                    let rest: f64 = p[..n].iter().sum();
                    p[n] = 1.0 - rest;
                }
            }
            p
        })
        .collect()
}

/// Orbit type of a point of the quadratic chart under the phase torus, given
/// by the set of vanishing homogeneous coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct OrbitType {
    pub vanishing: Vec<usize>,
}

impl OrbitType {
    pub fn is_interior(&self) -> bool {
        self.vanishing.is_empty()
    }

    /// `interior`, or `Δ_{i1,…}` listing the vanishing coordinates.
    pub fn label(&self) -> String {
        if self.is_interior() {
            "interior".to_string()
        } else {
            let idx: Vec<String> = self.vanishing.iter().map(|i| i.to_string()).collect();
            format!("Δ_{{{}}}", idx.join(","))
        }
    }
}

fn check_complex_point(point: &[f64]) -> Result<()> {
    if point.is_empty() || !point.len().is_multiple_of(2) {
        return Err(Error::Invalid(format!("expected (u_0, v_0, …) pairs, got {} coordinates", point.len())));
    }
    if point.iter().all(|v| *v == 0.0) {
        return Err(Error::Precondition("the origin has no orbit type".into()));
    }
    Ok(())
}

/// Indices `k` with `|z_k| ≤ tol`.
pub fn orbit_type_classify(point: &[f64], tol: f64) -> Result<OrbitType> {
    check_complex_point(point)?;
    let vanishing =
        point.chunks(2).enumerate().filter(|(_, c)| c[0].hypot(c[1]) <= tol).map(|(k, _)| k).collect();
    Ok(OrbitType { vanishing })
}

/// `μ(z) = (|z_0|², …, |z_n|²) / Σ_l |z_l|²`.
pub fn simplex_image(point: &[f64]) -> Result<Vec<f64>> {
    check_complex_point(point)?;
    let sq: Vec<f64> = point.chunks(2).map(|c| c[0] * c[0] + c[1] * c[1]).collect();
    let total: f64 = sq.iter().sum();
    Ok(sq.into_iter().map(|s| s / total).collect())
}

#[cfg(test)]
mod tests;
