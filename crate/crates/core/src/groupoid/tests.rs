use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::actions::LieAlgebra;
use crate::numerics::Expression;
use crate::poisson::ChartPoissonManifold;
use crate::reduction::c2_circle_momentum;
use crate::Error;

fn so3_groupoid() -> AffineGroupoid {
    AffineGroupoid::new(MatrixGroup::rotations(), AffineCocycle::zero(3)).unwrap()
}

fn heisenberg_groupoid() -> AffineGroupoid {
    AffineGroupoid::new(MatrixGroup::heisenberg(), AffineCocycle::heisenberg(0.7, -1.3, 0.4)).unwrap()
}

fn so3_coboundary_groupoid() -> AffineGroupoid {
    let alg = LieAlgebra::so3();
    AffineGroupoid::new(MatrixGroup::rotations(), AffineCocycle::coboundary(&alg, &[0.3, -0.5, 1.1]).unwrap()).unwrap()
}

fn all_groupoids() -> Vec<AffineGroupoid> {
    vec![so3_groupoid(), heisenberg_groupoid(), so3_coboundary_groupoid()]
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn quarter_turn() -> MatrixGroupElement {
    MatrixGroup::rotations().exp(&[0.0, 0.0, std::f64::consts::FRAC_PI_2])
}

#[test]
fn coadjoint_matches_structure_constants() {
    assert!(MatrixGroup::rotations().coadjoint_convention_residual() < 1e-8);
    assert!(MatrixGroup::heisenberg().coadjoint_convention_residual() < 1e-8);
}

#[test]
fn quarter_turn_target_and_momentum() {
    let gpd = so3_groupoid();
    let e = gpd.element(quarter_turn(), vec![1.0, 0.0, 0.0]).unwrap();
    assert!(sup(gpd.target(&e).components(), &[0.0, 1.0, 0.0]) < 1e-12);
    assert!(sup(gpd.affine_momentum(&e).components(), &[1.0, -1.0, 0.0]) < 1e-12);
}

#[test]
fn identity_arrow_is_trivial() {
    for gpd in all_groupoids() {
        let e = gpd.unit(vec![0.2, -0.4, 0.9]).unwrap();
        assert!(sup(gpd.target(&e).components(), e.alpha.components()) < 1e-14);
        assert!(gpd.affine_momentum(&e).components().iter().all(|v| v.abs() < 1e-14));
    }
}

#[test]
fn cocycle_conditions_hold_for_shipped_cocycles() {
    for gpd in all_groupoids() {
        assert!(cocycle_condition_residual(gpd.group().algebra(), gpd.cocycle().c()) < 1e-14);
        assert!(gpd.cocycle_compatibility_residual(1e-5) < 1e-6);
        let els = gpd.group().random_elements(20, 1.2, 42);
        for w in els.windows(2) {
            assert!(gpd.group_cocycle_residual(&w[0], &w[1]) < 1e-10);
        }
    }
}

#[test]
fn cocycle_condition_on_random_cochains() {
    // Every 2-cochain on so(3) is closed: each term pairs a basis vector with itself.
    let c = DMatrix::from_row_slice(3, 3, &[0.0, 0.4, -0.9, -0.4, 0.0, 1.3, 0.9, -1.3, 0.0]);
    assert!(cocycle_condition_residual(&LieAlgebra::so3(), &c) < 1e-14);
    let gl2 = LieAlgebra::gl2();
    let c4 = DMatrix::from_fn(4, 4, |i, j| match (i, j) {
        (0, 3) => 1.0,
        (3, 0) => -1.0,
        (1, 2) => 0.5,
        (2, 1) => -0.5,
        _ => 0.0,
    });
    assert!(cocycle_condition_residual(&gl2, &c4) > 1e-3);
}

#[test]
fn non_cocycle_map_is_detected() {
    let group = MatrixGroup::heisenberg();
    let c = AffineCocycle::heisenberg(1.0, 0.0, 0.0).c().clone();
    let bogus = AffineCocycle::custom(
        c,
        std::sync::Arc::new(|_: &MatrixGroup, g: &MatrixGroupElement| {
            let m = g.matrix();
            vec![m[(1, 2)] * m[(1, 2)], 0.0, m[(0, 1)]]
        }),
    )
    .unwrap();
    let gpd = AffineGroupoid::new(group.clone(), bogus).unwrap();
    let els = group.random_elements(2, 1.0, 42);
    assert!(gpd.group_cocycle_residual(&els[0], &els[1]) > 1e-3);
}

#[test]
fn heisenberg_coboundary_part_matches_coboundary_formula() {
    let alg = LieAlgebra::heisenberg();
    let group = MatrixGroup::heisenberg();
    let closed = AffineCocycle::heisenberg(0.8, 0.0, 0.0);
    let cob = AffineCocycle::coboundary(&alg, &[0.0, 0.0, 0.8]).unwrap();
    assert!((closed.c() - cob.c()).amax() < 1e-15);
    for g in group.random_elements(10, 1.5, 42) {
        assert!(sup(&closed.value(&group, &g), &cob.value(&group, &g)) < 1e-12);
    }
}

#[test]
fn twisted_generators_are_affine_hamiltonian_fields() {
    let h = 1e-6;
    for gpd in all_groupoids() {
        let alg = gpd.group().algebra().clone();
        let m = ChartPoissonManifold::affine(&alg, gpd.cocycle().c()).unwrap();
        let alpha = vec![0.3, -0.7, 0.5];
        for i in 0..alg.dim() {
            let mut xi = vec![0.0; alg.dim()];
            xi[i] = h;
            let plus = gpd.twisted_coadjoint(&gpd.group().exp(&xi), &alpha);
            xi[i] = -h;
            let minus = gpd.twisted_coadjoint(&gpd.group().exp(&xi), &alpha);
            let fd: Vec<f64> =
                plus.components().iter().zip(minus.components()).map(|(p, q)| (p - q) / (2.0 * h)).collect();
            let field = m.hamiltonian_vector_field(&Expression::coord(i)).eval(&alpha).unwrap();
            assert!(sup(&fd, &field) < 1e-8, "generator {i}: {fd:?} vs {field:?}");
        }
    }
}

#[test]
fn twisted_action_composes() {
    for gpd in all_groupoids() {
        let els = gpd.group().random_elements(10, 1.0, 42);
        let alpha = [0.1, 0.9, -0.4];
        for w in els.windows(2) {
            let step = gpd.twisted_coadjoint(&w[1], &alpha);
            let twice = gpd.twisted_coadjoint(&w[0], step.components());
            let once = gpd.twisted_coadjoint(&w[0].mul(&w[1]), &alpha);
            assert!(sup(twice.components(), once.components()) < 1e-9);
        }
    }
}

/// Composable triple `e1·e2·e3` built from the right.
fn random_triple(
    gpd: &AffineGroupoid,
    rng: &mut ChaCha8Rng,
) -> (AffineGroupoidElement, AffineGroupoidElement, AffineGroupoidElement) {
    let n = gpd.group().dim();
    let mut g = || gpd.group().exp(&random_vec(rng, n));
    let (a, b, c) = (g(), g(), g());
    let e3 = gpd.element(c, random_vec(rng, n)).unwrap();
    let e2 = gpd.compose_with(b, &e3);
    let e1 = gpd.compose_with(a, &e2);
    (e1, e2, e3)
}

#[test]
fn groupoid_axioms_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for gpd in all_groupoids() {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let (e1, e2, e3) = random_triple(&gpd, &mut rng);
            let e12 = gpd.multiply(&e1, &e2).unwrap();
            let left = gpd.multiply(&e12, &e3).unwrap();
            let right = gpd.multiply(&e1, &gpd.multiply(&e2, &e3).unwrap()).unwrap();
            worst = worst.max(left.g.distance(&right.g)).max(sup(left.alpha.components(), right.alpha.components()));
            worst = worst.max(sup(gpd.source(&e12).components(), gpd.source(&e2).components()));
            worst = worst.max(sup(gpd.target(&e12).components(), gpd.target(&e1).components()));
            let unit_s = gpd.unit(gpd.source(&e1).into_components()).unwrap();
            let unit_t = gpd.unit(gpd.target(&e1).into_components()).unwrap();
            let r = gpd.multiply(&e1, &unit_s).unwrap();
            let l = gpd.multiply(&unit_t, &e1).unwrap();
            worst = worst.max(r.g.distance(&e1.g)).max(l.g.distance(&e1.g));
            worst = worst.max(sup(l.alpha.components(), e1.alpha.components()));
            let inv = gpd.inverse(&e1);
            let u1 = gpd.multiply(&e1, &inv).unwrap();
            let u2 = gpd.multiply(&inv, &e1).unwrap();
            worst = worst.max(u1.g.distance(&gpd.group().identity())).max(u2.g.distance(&gpd.group().identity()));
            worst = worst.max(sup(u1.alpha.components(), gpd.target(&e1).components()));
            worst = worst.max(sup(u2.alpha.components(), e1.alpha.components()));
            let j12 = gpd.affine_momentum(&e12);
            let sum = gpd.affine_momentum(&e1).add(&gpd.affine_momentum(&e2));
            worst = worst.max(sup(j12.components(), sum.components()));
        }
        assert!(worst < 1e-10, "worst axiom residual {worst:e}");
    }
}

#[test]
fn incompatible_arrows_are_rejected() {
    let gpd = so3_groupoid();
    let e = gpd.element(quarter_turn(), vec![1.0, 0.0, 0.0]).unwrap();
    match gpd.multiply(&e, &e) {
        Err(Error::NotComposable { mismatch }) => assert!((mismatch - 1.0).abs() < 1e-12),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn symplectic_form_basics() {
    let gpd = heisenberg_groupoid();
    let e = gpd.element(gpd.group().exp(&[0.3, -0.2, 0.5]), vec![0.4, 0.1, -0.6]).unwrap();
    let v = GroupoidTangent { xi: vec![0.2, 0.5, -0.1], alpha_dot: vec![1.0, 0.3, 0.2] };
    let w = GroupoidTangent { xi: vec![-0.4, 0.1, 0.7], alpha_dot: vec![0.0, -0.5, 0.9] };
    assert!(gpd.eval_symplectic_form(&e, &v, &v).unwrap().abs() < 1e-15);
    let a = gpd.eval_symplectic_form(&e, &v, &w).unwrap();
    let b = gpd.eval_symplectic_form(&e, &w, &v).unwrap();
    assert!((a + b).abs() < 1e-14);
    // Horizontal vectors at α = 0 only see the magnetic term.
    let e0 = gpd.element(e.g.clone(), vec![0.0; 3]).unwrap();
    let hv = GroupoidTangent { alpha_dot: vec![0.0; 3], ..v.clone() };
    let hw = GroupoidTangent { alpha_dot: vec![0.0; 3], ..w.clone() };
    let expect = -gpd.cocycle().c_value(&hv.xi, &hw.xi);
    assert!((gpd.eval_symplectic_form(&e0, &hv, &hw).unwrap() - expect).abs() < 1e-15);
}

#[test]
fn abelian_canonical_pairing() {
    // Diagonal torus inside GL(2).
    let gl2 = LieAlgebra::gl2();
    let gpd = AffineGroupoid::new(MatrixGroup::new(gl2, GroupKind::General).unwrap(), AffineCocycle::zero(4)).unwrap();
    let e = gpd.element(gpd.group().exp(&[0.2, 0.0, 0.0, -0.3]), vec![0.5, 0.0, 0.0, 0.7]).unwrap();
    // Diagonal directions commute: ω = ⟨α̇₁, ξ₂⟩ − ⟨α̇₂, ξ₁⟩.
    let v = GroupoidTangent { xi: vec![1.0, 0.0, 0.0, 0.0], alpha_dot: vec![0.0, 0.0, 0.0, 2.0] };
    let w = GroupoidTangent { xi: vec![0.0, 0.0, 0.0, 1.0], alpha_dot: vec![3.0, 0.0, 0.0, 0.0] };
    let got = gpd.eval_symplectic_form(&e, &v, &w).unwrap();
    assert!((got - (2.0 - 3.0)).abs() < 1e-14);
}

#[test]
fn canonical_form_is_d_theta() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for gpd in all_groupoids() {
        let n = gpd.group().dim();
        for _ in 0..5 {
            let e = gpd.element(gpd.group().exp(&random_vec(&mut rng, n)), random_vec(&mut rng, n)).unwrap();
            let v = GroupoidTangent { xi: random_vec(&mut rng, n), alpha_dot: random_vec(&mut rng, n) };
            let w = GroupoidTangent { xi: random_vec(&mut rng, n), alpha_dot: random_vec(&mut rng, n) };
            let fd = gpd.tautological_differential_fd(&e, &v, &w, 1e-3);
            let closed = gpd.canonical_form(&e, &v, &w);
            assert!((closed - fd).abs() < 1e-5, "{closed} vs {fd}");
        }
    }
}

fn random_perturbation(rng: &mut ChaCha8Rng, n: usize) -> PairPerturbation {
    PairPerturbation { xi_g: random_vec(rng, n), xi_h: random_vec(rng, n), beta_dot: random_vec(rng, n) }
}

#[test]
fn symplectic_form_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for gpd in all_groupoids() {
        let n = gpd.group().dim();
        for _ in 0..10 {
            let g = gpd.group().exp(&random_vec(&mut rng, n));
            let second = gpd.element(gpd.group().exp(&random_vec(&mut rng, n)), random_vec(&mut rng, n)).unwrap();
            let (p, q) = (random_perturbation(&mut rng, n), random_perturbation(&mut rng, n));
            let r = gpd.check_multiplicative(&g, &second, &p, &q, 1e-4).unwrap();
            assert!(r < 1e-4, "residual {r:e}");
            let coarse: Vec<f64> =
                [0.1, 0.05, 0.025].iter().map(|&h| gpd.check_multiplicative(&g, &second, &p, &q, h).unwrap()).collect();
            if coarse[0] > 1e-9 {
                assert!(observed_order(&coarse).iter().all(|&o| o >= 1.0), "{coarse:?}");
            }
        }
    }
}

#[test]
fn non_multiplicative_form_is_detected() {
    let gpd = heisenberg_groupoid();
    let nu = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.5, 0.0, -0.5, 0.0]);
    let bent = |e: &AffineGroupoidElement, v: &GroupoidTangent, w: &GroupoidTangent| {
        Ok(gpd.eval_symplectic_form(e, v, w)? + crate::poisson::bilinear(&nu, &v.alpha_dot, &w.alpha_dot))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let g = gpd.group().exp(&random_vec(&mut rng, 3));
    let second = gpd.element(gpd.group().exp(&random_vec(&mut rng, 3)), random_vec(&mut rng, 3)).unwrap();
    let (p, q) = (random_perturbation(&mut rng, 3), random_perturbation(&mut rng, 3));
    let r = gpd.multiplicativity_residual(bent, &g, &second, &p, &q, 1e-4).unwrap();
    assert!(r > 1e-2, "control residual {r:e}");
}

#[test]
fn pair_groupoid_momentum() {
    let pg = PairGroupoid::new(ChartPoissonManifold::c2_symplectic());
    let mu = [c2_circle_momentum()];
    // (z₁, w₁, z₂, w₂) = (1, 0, 0, 1).
    let e = pg.arrow(vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]).unwrap();
    assert!((pg.momentum(&mu, &e).unwrap()[0] + 1.0).abs() < 1e-15);
    let u = pg.unit(vec![1.0, 0.0, 1.0, 0.0]).unwrap();
    assert_eq!(pg.momentum(&mu, &u).unwrap()[0], 0.0);
    let arrows = pg.arrow_manifold();
    assert_eq!(arrows.dim(), 8);
    let p: Vec<f64> = e.x.iter().chain(&e.y).copied().collect();
    assert_eq!(pg.arrow_from_point(&p).unwrap(), e);
}

#[test]
fn pair_groupoid_laws() {
    let base = ChartPoissonManifold::c2_symplectic();
    let pts = base.random_points(4, 42);
    let pg = PairGroupoid::new(base);
    let mu = [c2_circle_momentum()];
    let e1 = pg.arrow(pts[0].clone(), pts[1].clone()).unwrap();
    let e2 = pg.arrow(pts[1].clone(), pts[2].clone()).unwrap();
    let e12 = pg.multiply(&e1, &e2).unwrap();
    assert_eq!(pg.source(&e12), pg.source(&e1));
    assert_eq!(pg.target(&e12), pg.target(&e2));
    let j = |e: &PairArrow| pg.momentum(&mu, e).unwrap()[0];
    assert!((j(&e12) - j(&e1) - j(&e2)).abs() < 1e-12);
    assert_eq!(pg.multiply(&e1, &pg.inverse(&e1)).unwrap(), pg.unit(pts[0].clone()).unwrap());
    assert!(matches!(pg.multiply(&e2, &e1), Err(Error::NotComposable { .. })));
}


/// Matrix of `Ω` at `e` in the basis `(ξ, α̇)`.
fn omega_matrix(gpd: &AffineGroupoid, e: &AffineGroupoidElement) -> DMatrix<f64> {
    let n = gpd.group().dim();
    let basis = |k: usize| {
        let mut v = GroupoidTangent { xi: vec![0.0; n], alpha_dot: vec![0.0; n] };
        if k < n {
            v.xi[k] = 1.0;
        } else {
            v.alpha_dot[k - n] = 1.0;
        }
        v
    };
    DMatrix::from_fn(2 * n, 2 * n, |a, b| gpd.eval_symplectic_form(e, &basis(a), &basis(b)).unwrap())
}

#[test]
fn source_and_target_are_poisson_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for gpd in all_groupoids() {
        let n = gpd.group().dim();
        let alg = gpd.group().algebra().clone();
        let base = ChartPoissonManifold::affine(&alg, gpd.cocycle().c()).unwrap();
        for _ in 0..5 {
            let e = gpd.element(gpd.group().exp(&random_vec(&mut rng, n)), random_vec(&mut rng, n)).unwrap();
            let pi = omega_matrix(&gpd, &e).try_inverse().unwrap();
            let ds = DMatrix::from_fn(n, 2 * n, |i, k| f64::from(u8::from(k == n + i)));
            let h = 1e-6;
            let mut dt = DMatrix::zeros(n, 2 * n);
            for k in 0..2 * n {
                let shift = |s: f64| {
                    let mut xi = vec![0.0; n];
                    let mut alpha = e.alpha.components().to_vec();
                    if k < n {
                        xi[k] = s;
                    } else {
                        alpha[k - n] += s;
                    }
                    gpd.twisted_coadjoint(&e.g.mul(&gpd.group().exp(&xi)), &alpha).into_components()
                };
                let (p, m) = (shift(h), shift(-h));
                for i in 0..n {
                    dt[(i, k)] = (p[i] - m[i]) / (2.0 * h);
                }
            }
            let pushed_s = &ds * &pi * ds.transpose();
            let pushed_t = &dt * &pi * dt.transpose();
            let at_s = base.pi_at(e.alpha.components()).unwrap();
            let at_t = base.pi_at(gpd.target(&e).components()).unwrap();
            assert!((&pushed_s + &at_s).amax() < 1e-6, "s: {pushed_s} vs {at_s}");
            assert!((&pushed_t - &at_t).amax() < 1e-6, "t: {pushed_t} vs {at_t}");
        }
    }
}
