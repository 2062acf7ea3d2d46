//! Symplectic groupoids: the cotangent groupoid `T*G ⇒ g*` of an affine
//! Poisson structure and the pair groupoid of a symplectic chart.

mod affine;
mod group;
mod pair;

pub use affine::{
    cocycle_condition_residual, observed_order, AffineCocycle, AffineGroupoid, AffineGroupoidElement, CocycleFn,
    CocycleMap, GroupoidTangent, PairPerturbation, COMPOSABLE_TOL,
};
pub use group::{GroupKind, MatrixGroup, MatrixGroupElement, MEMBERSHIP_TOL};
pub use pair::{PairArrow, PairGroupoid};

#[cfg(test)]
mod tests;
