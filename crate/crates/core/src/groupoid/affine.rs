use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::group::{MatrixGroup, MatrixGroupElement};
use crate::actions::LieAlgebra;
use crate::momentum::MomentumValue;
use crate::{Error, Result};

/// Tolerance for `s(e₁) = t(e₂)` in [`AffineGroupoid::multiply`].
pub const COMPOSABLE_TOL: f64 = 1e-8;

pub type CocycleFn = Arc<dyn Fn(&MatrixGroup, &MatrixGroupElement) -> Vec<f64> + Send + Sync>;

/// Closed form of the group cocycle `C: G → g*`.
#[derive(Clone)]
pub enum CocycleMap {
    Zero,
    /// `C(g) = Ad*_g λ − λ`, integrating `c(ξ, η) = ⟨λ, [ξ, η]⟩`.
    Coboundary(Vec<f64>),
    /// Closed form on the unipotent 3×3 group for arbitrary `c` on the Heisenberg algebra.
    Heisenberg,
    Custom(CocycleFn),
}

impl fmt::Debug for CocycleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CocycleMap::Zero => write!(f, "Zero"),
            CocycleMap::Coboundary(l) => f.debug_tuple("Coboundary").field(l).finish(),
            CocycleMap::Heisenberg => write!(f, "Heisenberg"),
            CocycleMap::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A Lie algebra 2-cochain `c` (as an antisymmetric matrix `c_ij = c(e_i, e_j)`)
/// together with a group cocycle integrating it.
///
/// Conventions: `C(gh) = C(g) + Ad*_g C(h)` and `⟨dC_e(ξ), η⟩ = c(η, ξ)`, so the
/// twisted action `α ↦ Ad*_g α + C(g)` is generated by the Hamiltonian fields of
/// the linear functions `⟨·, ξ⟩` for the affine bracket `Π_lin + c`.
#[derive(Debug, Clone)]
pub struct AffineCocycle {
    c: DMatrix<f64>,
    map: CocycleMap,
}

impl AffineCocycle {
    pub fn zero(dim: usize) -> Self {
        AffineCocycle { c: DMatrix::zeros(dim, dim), map: CocycleMap::Zero }
    }

    pub fn coboundary(algebra: &LieAlgebra, lambda: &[f64]) -> Result<Self> {
        let n = algebra.dim();
        if lambda.len() != n {
            return Err(Error::Dimension { expected: n, found: lambda.len() });
        }
        let c = DMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| lambda[k] * algebra.structure_constant(i, j, k)).sum()
        });
        Ok(AffineCocycle { c, map: CocycleMap::Coboundary(lambda.to_vec()) })
    }

    /// `c(X, Y) = c_xy`, `c(X, Z) = c_xz`, `c(Y, Z) = c_yz` in the basis `X, Y, Z = [X, Y]`.
    /// Only `c_xy` is a coboundary.
    pub fn heisenberg(c_xy: f64, c_xz: f64, c_yz: f64) -> Self {
        let c = DMatrix::from_row_slice(3, 3, &[0.0, c_xy, c_xz, -c_xy, 0.0, c_yz, -c_xz, -c_yz, 0.0]);
        AffineCocycle { c, map: CocycleMap::Heisenberg }
    }

    /// Arbitrary closed form; no check is made that it integrates `c`.
    pub fn custom(c: DMatrix<f64>, map: CocycleFn) -> Result<Self> {
        if !c.is_square() || (&c + c.transpose()).amax() > 1e-12 {
            return Err(Error::Invalid("c must be an antisymmetric square matrix".into()));
        }
        Ok(AffineCocycle { c, map: CocycleMap::Custom(map) })
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn map(&self) -> &CocycleMap {
        &self.map
    }

    pub fn c_value(&self, xi: &[f64], eta: &[f64]) -> f64 {
        crate::poisson::bilinear(&self.c, xi, eta)
    }

    /// `C(g)`.
    pub fn value(&self, group: &MatrixGroup, g: &MatrixGroupElement) -> Vec<f64> {
        let n = group.dim();
        match &self.map {
            CocycleMap::Zero => vec![0.0; n],
            CocycleMap::Coboundary(lambda) => {
                let l = DVector::from_column_slice(lambda);
                (group.coadjoint(g) * &l - &l).as_slice().to_vec()
            }
            CocycleMap::Heisenberg => {
                let m = g.matrix();
                let (a, b, z) = (m[(0, 1)], m[(1, 2)], m[(0, 2)]);
                let (cxy, cxz, cyz) = (self.c[(0, 1)], self.c[(0, 2)], self.c[(1, 2)]);
                vec![
                    cxy * b + cxz * (z - a * b) - 0.5 * cyz * b * b,
                    -cxy * a + 0.5 * cxz * a * a + cyz * z,
                    -cxz * a - cyz * b,
                ]
            }
            CocycleMap::Custom(f) => f(group, g),
        }
    }
}

/// `max |c([ξ,η],ζ) + c([η,ζ],ξ) + c([ζ,ξ],η)|` over basis triples.
pub fn cocycle_condition_residual(algebra: &LieAlgebra, c: &DMatrix<f64>) -> f64 {
    let n = algebra.dim();
    let e = |i: usize| -> Vec<f64> { (0..n).map(|k| f64::from(u8::from(k == i))).collect() };
    let cv = |a: &[f64], b: &[f64]| crate::poisson::bilinear(c, a, b);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (e(i), e(j), e(k));
                let r = cv(&algebra.bracket(&x, &y), &z) + cv(&algebra.bracket(&y, &z), &x) + cv(&algebra.bracket(&z, &x), &y);
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

/// An arrow `(g, α)` of `T*G ≅ G × g*` in the left trivialization.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineGroupoidElement {
    pub g: MatrixGroupElement,
    pub alpha: MomentumValue,
}

/// Tangent vector at `(g, α)`: `ξ = g⁻¹ ġ` and `α̇`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidTangent {
    pub xi: Vec<f64>,
    pub alpha_dot: Vec<f64>,
}

/// The symplectic groupoid of `g*` with the affine bracket `Π_lin + c`.
#[derive(Debug, Clone)]
pub struct AffineGroupoid {
    group: MatrixGroup,
    cocycle: AffineCocycle,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl AffineGroupoid {
    pub fn new(group: MatrixGroup, cocycle: AffineCocycle) -> Result<Self> {
        if cocycle.c.nrows() != group.dim() {
            return Err(Error::Dimension { expected: group.dim(), found: cocycle.c.nrows() });
        }
        Ok(AffineGroupoid { group, cocycle })
    }

    pub fn group(&self) -> &MatrixGroup {
        &self.group
    }

    pub fn cocycle(&self) -> &AffineCocycle {
        &self.cocycle
    }

    pub fn element(&self, g: MatrixGroupElement, alpha: Vec<f64>) -> Result<AffineGroupoidElement> {
        if alpha.len() != self.group.dim() {
            return Err(Error::Dimension { expected: self.group.dim(), found: alpha.len() });
        }
        if g.matrix().nrows() != self.group.matrix_size() || g.kind() != self.group.kind() {
            return Err(Error::Invalid("group element belongs to a different group".into()));
        }
        Ok(AffineGroupoidElement { g, alpha: MomentumValue::new(alpha) })
    }

    /// The unit arrow at `α`.
    pub fn unit(&self, alpha: Vec<f64>) -> Result<AffineGroupoidElement> {
        self.element(self.group.identity(), alpha)
    }

    /// `g · α = Ad*_g α + C(g)`.
    pub fn twisted_coadjoint(&self, g: &MatrixGroupElement, alpha: &[f64]) -> MomentumValue {
        let moved = self.group.coadjoint(g) * DVector::from_column_slice(alpha);
        let c = self.cocycle.value(&self.group, g);
        MomentumValue::new(moved.iter().zip(&c).map(|(a, b)| a + b).collect())
    }

    pub fn source(&self, e: &AffineGroupoidElement) -> MomentumValue {
        e.alpha.clone()
    }

    pub fn target(&self, e: &AffineGroupoidElement) -> MomentumValue {
        self.twisted_coadjoint(&e.g, e.alpha.components())
    }

    /// `(g, α)·(h, β) = (gh, β)`, defined when `α = t(h, β)`.
    pub fn multiply(&self, e1: &AffineGroupoidElement, e2: &AffineGroupoidElement) -> Result<AffineGroupoidElement> {
        let mismatch = sup_dist(e1.alpha.components(), self.target(e2).components());
        if mismatch > COMPOSABLE_TOL {
            return Err(Error::NotComposable { mismatch });
        }
        Ok(AffineGroupoidElement { g: e1.g.mul(&e2.g), alpha: e2.alpha.clone() })
    }

    /// `(g, α)⁻¹ = (g⁻¹, t(g, α))`.
    pub fn inverse(&self, e: &AffineGroupoidElement) -> AffineGroupoidElement {
        AffineGroupoidElement { g: e.g.inverse(), alpha: self.target(e) }
    }

    /// The arrow with group part `g` composable on the right of `e`, i.e. `(g, t(e))`.
    pub fn compose_with(&self, g: MatrixGroupElement, e: &AffineGroupoidElement) -> AffineGroupoidElement {
        AffineGroupoidElement { g, alpha: self.target(e) }
    }

    /// `‖C(gh) − C(g) − Ad*_g C(h)‖_∞`.
    pub fn group_cocycle_residual(&self, g: &MatrixGroupElement, h: &MatrixGroupElement) -> f64 {
        let grp = &self.group;
        let lhs = self.cocycle.value(grp, &g.mul(h));
        let cg = self.cocycle.value(grp, g);
        let ch = grp.coadjoint(g) * DVector::from_vec(self.cocycle.value(grp, h));
        lhs.iter().zip(&cg).zip(ch.iter()).map(|((l, a), b)| (l - a - b).abs()).fold(0.0, f64::max)
    }

    /// `max |⟨dC_e(e_i), e_j⟩ − c(e_j, e_i)|` by central differences with step `h`.
    pub fn cocycle_compatibility_residual(&self, h: f64) -> f64 {
        let n = self.group.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut xi = vec![0.0; n];
            xi[i] = h;
            let plus = self.cocycle.value(&self.group, &self.group.exp(&xi));
            xi[i] = -h;
            let minus = self.cocycle.value(&self.group, &self.group.exp(&xi));
            for j in 0..n {
                let d = (plus[j] - minus[j]) / (2.0 * h);
                worst = worst.max((d - self.cocycle.c[(j, i)]).abs());
            }
        }
        worst
    }

    /// `J(g, α) = α − Ad*_g α − C(g) = s − t`.
    pub fn affine_momentum(&self, e: &AffineGroupoidElement) -> MomentumValue {
        e.alpha.add(&self.target(e).scale(-1.0))
    }

    /// `ω_can = dθ` for the tautological form `θ_(g,α)(ξ, α̇) = ⟨α, ξ⟩`:
    /// `⟨α̇₁, ξ₂⟩ − ⟨α̇₂, ξ₁⟩ − ⟨α, [ξ₁, ξ₂]⟩`.
    pub fn canonical_form(&self, e: &AffineGroupoidElement, v1: &GroupoidTangent, v2: &GroupoidTangent) -> f64 {
        let alpha = e.alpha.components();
        let br = self.group.algebra().bracket(&v1.xi, &v2.xi);
        dot(&v1.alpha_dot, &v2.xi) - dot(&v2.alpha_dot, &v1.xi) - dot(alpha, &br)
    }

    /// `Ω = ω_can + B_c` with `B_c(ξ₁, ξ₂) = −c(ξ₁, ξ₂)`.
    pub fn eval_symplectic_form(
        &self,
        e: &AffineGroupoidElement,
        v1: &GroupoidTangent,
        v2: &GroupoidTangent,
    ) -> Result<f64> {
        let n = self.group.dim();
        for v in [v1, v2] {
            if v.xi.len() != n || v.alpha_dot.len() != n {
                return Err(Error::Dimension { expected: n, found: v.xi.len().max(v.alpha_dot.len()) });
            }
        }
        Ok(self.canonical_form(e, v1, v2) - self.cocycle.c_value(&v1.xi, &v2.xi))
    }

    /// `dθ(v₁, v₂)` by central differences of `θ` along the two-parameter family
    /// `(g exp(sξ₁) exp(tξ₂), α + s α̇₁ + t α̇₂)`, with left logarithmic
    /// derivatives also taken by differences.
    pub fn tautological_differential_fd(
        &self,
        e: &AffineGroupoidElement,
        v1: &GroupoidTangent,
        v2: &GroupoidTangent,
        h: f64,
    ) -> f64 {
        let grp = &self.group;
        let point = |s: f64, t: f64| -> (DMatrix<f64>, Vec<f64>) {
            let xi1: Vec<f64> = v1.xi.iter().map(|x| x * s).collect();
            let xi2: Vec<f64> = v2.xi.iter().map(|x| x * t).collect();
            let g = e.g.matrix() * grp.exp(&xi1).matrix() * grp.exp(&xi2).matrix();
            let a = e.alpha.components().iter().zip(&v1.alpha_dot).zip(&v2.alpha_dot);
            (g, a.map(|((a, d1), d2)| a + s * d1 + t * d2).collect())
        };
        // θ(∂_s F) and θ(∂_t F) at (s, t).
        let theta = |s: f64, t: f64, along_s: bool| -> f64 {
            let (g, a) = point(s, t);
            let (p, m) = if along_s { (point(s + h, t).0, point(s - h, t).0) } else { (point(s, t + h).0, point(s, t - h).0) };
            let inv = g.try_inverse().expect("invertible");
            let xi = grp.vee(&(inv * (p - m) / (2.0 * h)));
            dot(&a, &xi)
        };
        let d_s_theta_t = (theta(h, 0.0, false) - theta(-h, 0.0, false)) / (2.0 * h);
        let d_t_theta_s = (theta(0.0, h, true) - theta(0.0, -h, true)) / (2.0 * h);
        d_s_theta_t - d_t_theta_s
    }
}

/// A direction in the space of composable pairs `((g, t(h, β)), (h, β))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairPerturbation {
    pub xi_g: Vec<f64>,
    pub xi_h: Vec<f64>,
    pub beta_dot: Vec<f64>,
}

impl AffineGroupoid {
    fn perturbed_pair(
        &self,
        g: &MatrixGroupElement,
        second: &AffineGroupoidElement,
        p: &PairPerturbation,
        s: f64,
    ) -> (AffineGroupoidElement, AffineGroupoidElement) {
        let scale = |v: &[f64]| v.iter().map(|x| x * s).collect::<Vec<f64>>();
        let gs = g.mul(&self.group.exp(&scale(&p.xi_g)));
        let hs = second.g.mul(&self.group.exp(&scale(&p.xi_h)));
        let beta: Vec<f64> = second.alpha.components().iter().zip(&p.beta_dot).map(|(b, d)| b + s * d).collect();
        let e2 = AffineGroupoidElement { g: hs, alpha: MomentumValue::new(beta) };
        let e1 = self.compose_with(gs, &e2);
        (e1, e2)
    }

    fn tangent_fd(
        &self,
        base: &AffineGroupoidElement,
        plus: &AffineGroupoidElement,
        minus: &AffineGroupoidElement,
        h: f64,
    ) -> GroupoidTangent {
        let inv = base.g.inverse();
        let xi = self.group.vee(&(inv.matrix() * (plus.g.matrix() - minus.g.matrix()) / (2.0 * h)));
        let alpha_dot = plus
            .alpha
            .components()
            .iter()
            .zip(minus.alpha.components())
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect();
        GroupoidTangent { xi, alpha_dot }
    }

    /// `|F(m_*V, m_*W) − F(V₁, W₁) − F(V₂, W₂)|` for a 2-form `F` on arrows, with
    /// tangent vectors pushed through the structure maps by central differences.
    pub fn multiplicativity_residual<F>(
        &self,
        form: F,
        g: &MatrixGroupElement,
        second: &AffineGroupoidElement,
        p: &PairPerturbation,
        q: &PairPerturbation,
        h: f64,
    ) -> Result<f64>
    where
        F: Fn(&AffineGroupoidElement, &GroupoidTangent, &GroupoidTangent) -> Result<f64>,
    {
        let n = self.group.dim();
        for v in [p, q] {
            if v.xi_g.len() != n || v.xi_h.len() != n || v.beta_dot.len() != n {
                return Err(Error::Dimension { expected: n, found: v.xi_g.len() });
            }
        }
        let (e1, e2) = self.perturbed_pair(g, second, p, 0.0);
        let prod = self.multiply(&e1, &e2)?;
        let push = |d: &PairPerturbation| -> Result<[GroupoidTangent; 3]> {
            let (a1, a2) = self.perturbed_pair(g, second, d, h);
            let (b1, b2) = self.perturbed_pair(g, second, d, -h);
            let (pa, pb) = (self.multiply(&a1, &a2)?, self.multiply(&b1, &b2)?);
            Ok([self.tangent_fd(&e1, &a1, &b1, h), self.tangent_fd(&e2, &a2, &b2, h), self.tangent_fd(&prod, &pa, &pb, h)])
        };
        let [v1, v2, vp] = push(p)?;
        let [w1, w2, wp] = push(q)?;
        Ok((form(&prod, &vp, &wp)? - form(&e1, &v1, &w1)? - form(&e2, &v2, &w2)?).abs())
    }

    /// [`Self::multiplicativity_residual`] for `Ω`.
    pub fn check_multiplicative(
        &self,
        g: &MatrixGroupElement,
        second: &AffineGroupoidElement,
        p: &PairPerturbation,
        q: &PairPerturbation,
        h: f64,
    ) -> Result<f64> {
        self.multiplicativity_residual(|e, v, w| self.eval_symplectic_form(e, v, w), g, second, p, q, h)
    }
}

/// Observed order `log₂(r(h) / r(h/2))` from residuals at successive halvings.
pub fn observed_order(residuals: &[f64]) -> Vec<f64> {
    residuals.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
