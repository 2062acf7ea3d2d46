use crate::numerics::Expression;
use crate::poisson::ChartPoissonManifold;
use crate::{Error, Result};

use super::affine::COMPOSABLE_TOL;

/// An arrow `(x, y)` of the pair groupoid, with source `x` and target `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairArrow {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// The pair groupoid `M × M̄` of a symplectic chart.
#[derive(Debug, Clone)]
pub struct PairGroupoid {
    base: ChartPoissonManifold,
}

impl PairGroupoid {
    pub fn new(base: ChartPoissonManifold) -> Self {
        PairGroupoid { base }
    }

    pub fn base(&self) -> &ChartPoissonManifold {
        &self.base
    }

    /// `M × M̄`: the product chart with the second factor's bracket negated.
    pub fn arrow_manifold(&self) -> ChartPoissonManifold {
        ChartPoissonManifold::product(&self.base, &self.base.opposite())
    }

    pub fn arrow(&self, x: Vec<f64>, y: Vec<f64>) -> Result<PairArrow> {
        let n = self.base.dim();
        for p in [&x, &y] {
            if p.len() != n {
                return Err(Error::Dimension { expected: n, found: p.len() });
            }
        }
        Ok(PairArrow { x, y })
    }

    /// Splits a point of the arrow chart into `(x, y)`.
    pub fn arrow_from_point(&self, p: &[f64]) -> Result<PairArrow> {
        let n = self.base.dim();
        if p.len() != 2 * n {
            return Err(Error::Dimension { expected: 2 * n, found: p.len() });
        }
        Ok(PairArrow { x: p[..n].to_vec(), y: p[n..].to_vec() })
    }

    pub fn unit(&self, x: Vec<f64>) -> Result<PairArrow> {
        self.arrow(x.clone(), x)
    }

    pub fn source<'a>(&self, e: &'a PairArrow) -> &'a [f64] {
        &e.x
    }

    pub fn target<'a>(&self, e: &'a PairArrow) -> &'a [f64] {
        &e.y
    }

    /// `(x, y)·(y, z) = (x, z)`.
    pub fn multiply(&self, e1: &PairArrow, e2: &PairArrow) -> Result<PairArrow> {
        let mismatch = e1.y.iter().zip(&e2.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if mismatch > COMPOSABLE_TOL {
            return Err(Error::NotComposable { mismatch });
        }
        Ok(PairArrow { x: e1.x.clone(), y: e2.y.clone() })
    }

    pub fn inverse(&self, e: &PairArrow) -> PairArrow {
        PairArrow { x: e.y.clone(), y: e.x.clone() }
    }

    /// `J = μ∘s − μ∘t` for each component of `mu`.
    pub fn momentum(&self, mu: &[Expression], e: &PairArrow) -> Result<Vec<f64>> {
        mu.iter().map(|m| Ok(m.eval(&e.x)? - m.eval(&e.y)?)).collect()
    }
}
