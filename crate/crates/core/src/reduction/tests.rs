use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};

use super::*;
use crate::actions::LieAlgebra;
use crate::poisson::OneForm;

fn skew(n1: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::zeros(n1, n1);
    for i in 0..n1 {
        for j in i + 1..n1 {
            let v: f64 = rng.gen_range(-1.0..1.0);
            a[(i, j)] = v;
            a[(j, i)] = -v;
        }
    }
    a
}

fn e01() -> DMatrix<f64> {
    let mut a = DMatrix::zeros(3, 3);
    a[(0, 1)] = 1.0;
    a[(1, 0)] = -1.0;
    a
}

/// `{μ_i, μ_j}` from the log-canonical bracket `{ρ_i, ρ_j} = a_ij ρ_i ρ_j` on
/// `ρ_k = |z_k|²`, with gradients of `μ = ρ / Σρ` by central differences.
fn simplex_oracle(a: &DMatrix<f64>, rho: &[f64], i: usize, j: usize) -> f64 {
    let n1 = rho.len();
    let mu = |r: &[f64], k: usize| r[k] / r.iter().sum::<f64>();
    let grad = |k: usize| -> Vec<f64> {
        (0..n1)
            .map(|l| {
                let h = 1e-5;
                let mut p = rho.to_vec();
                let mut m = rho.to_vec();
                p[l] += h;
                m[l] -= h;
                (mu(&p, k) - mu(&m, k)) / (2.0 * h)
            })
            .collect()
    };
    let (gi, gj) = (grad(i), grad(j));
    let mut s = 0.0;
    for p in 0..n1 {
        for q in 0..n1 {
            s += gi[p] * a[(p, q)] * rho[p] * rho[q] * gj[q];
        }
    }
    s
}

#[test]
fn simplex_formula_matches_log_canonical_oracle() {
    for (n, seed) in [(1, 3), (2, 4), (3, 5)] {
        let a = skew(n + 1, seed);
        let sys = InvariantSystem::simplex(&a).unwrap();
        for s in simplex_samples(n, 10, seed) {
            let rho: Vec<f64> = s.preimage.chunks(2).map(|c| c[0] * c[0] + c[1] * c[1]).collect();
            let claimed = sys.claimed_at(&s.point).unwrap();
            for i in 0..=n {
                for j in 0..=n {
                    assert!((claimed[(i, j)] - simplex_oracle(&a, &rho, i, j)).abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn simplex_spot_value_one_over_27() {
    let sys = InvariantSystem::simplex(&e01()).unwrap();
    let third = 1.0 / 3.0;
    let claimed = sys.claimed_at(&[third; 3]).unwrap();
    assert!((claimed[(0, 1)] - 1.0 / 27.0).abs() < 1e-15);
    let r = third.sqrt();
    let pre = vec![r, 0.0, 0.0, r, -r, 0.0];
    let s = sys.samples_from_preimages(&[pre]).unwrap();
    assert!(s[0].point.iter().all(|m| (m - third).abs() < 1e-15));
    let up = sys.action().manifold().bracket(&sys.generators()[0], &sys.generators()[1], &s[0].preimage).unwrap();
    assert!((up - 1.0 / 27.0).abs() < 1e-9, "{up}");
    assert!(quotient_bracket_check(&sys, &s).unwrap().max_residual < 1e-9);
}

#[test]
fn simplex_quotient_brackets_match_upstairs() {
    for n in 1..=3 {
        let a = skew(n + 1, 10 + n as u64);
        let sys = InvariantSystem::simplex(&a).unwrap();
        let samples = simplex_samples(n, 15, n as u64);
        let pre: Vec<Vec<f64>> = samples.iter().map(|s| s.preimage.clone()).collect();
        assert!(sys.invariance_residual(&pre).unwrap() < 1e-9);
        let rep = quotient_bracket_check(&sys, &samples).unwrap();
        assert_eq!(rep.pairs.len(), (n + 1) * n / 2);
        assert!(rep.max_residual < 1e-9, "n = {n}: {rep:?}");
    }
}

#[test]
fn one_dimensional_simplex_bracket_vanishes() {
    let a = skew(2, 8);
    let sys = InvariantSystem::simplex(&a).unwrap();
    for s in simplex_samples(1, 10, 2) {
        assert!(sys.claimed_at(&s.point).unwrap().amax() < 1e-15);
        assert!(quotient_bracket_check(&sys, &[s]).unwrap().max_residual < 1e-9);
    }
}

#[test]
fn mismatched_preimage_is_rejected() {
    let sys = InvariantSystem::simplex(&e01()).unwrap();
    let mut s = simplex_samples(2, 1, 0).remove(0);
    s.point[0] += 1e-3;
    assert!(matches!(quotient_bracket_check(&sys, &[s]), Err(Error::Precondition(_))));
}

#[test]
fn holomorphic_only_mixing_misses_the_simplex_formula() {
    let a = skew(3, 21);
    let mut sys = InvariantSystem::simplex(&a).unwrap();
    sys.action = PoissonAction::new(
        "mixing-zero",
        ChartPoissonManifold::quadratic_complex_mixed(&a, 0.0).unwrap(),
        sys.action.algebra().clone(),
        sys.action.generators().to_vec(),
        sys.action.sign(),
    )
    .unwrap();
    let rep = quotient_bracket_check(&sys, &simplex_samples(2, 10, 1)).unwrap();
    assert!(rep.max_residual > 1e-3);
}

#[test]
fn c2_invariants_relation_and_spot_point() {
    let sys = InvariantSystem::c2_quotient();
    let p = [1.0, 0.0, 1.0, 0.0];
    assert_eq!(sys.project(&p).unwrap(), vec![2.0, 0.0, 0.0]);
    assert!((sys.claimed_at(&[2.0, 0.0, 0.0]).unwrap()[(0, 1)] - 2.0).abs() < 1e-15);
    let m = sys.action().manifold();
    let g = sys.generators();
    // {σ1, σ2} = −4{u, v} σ4 with {u, v} = −1.
    assert!((m.bracket(&g[0], &g[1], &p).unwrap() - 8.0).abs() < 1e-12);
    let pts = m.random_points(30, 42);
    assert!(sys.invariance_residual(&pts).unwrap() < 1e-9);
    let sigma4 = c2_norm_invariant();
    for x in &pts {
        let s = sys.project(x).unwrap();
        let n = sigma4.eval(x).unwrap();
        assert!((s.iter().map(|v| v * v).sum::<f64>() - n * n).abs() < 1e-9 * (1.0 + n * n));
    }
}

#[test]
fn c2_quotient_bracket_is_four_times_the_radius() {
    let pts = ChartPoissonManifold::c2_symplectic().random_points(50, 42);
    let claimed = InvariantSystem::c2_quotient();
    let scaled = InvariantSystem::c2_quotient_scaled(4.0);
    let rep = quotient_bracket_check(&scaled, &scaled.samples_from_preimages(&pts).unwrap()).unwrap();
    assert!(rep.max_residual < 1e-9, "{rep:?}");
    let rep = quotient_bracket_check(&claimed, &claimed.samples_from_preimages(&pts).unwrap()).unwrap();
    let by_pair = |i, j| rep.pairs.iter().find(|p| (p.i, p.j) == (i, j)).unwrap().residual;
    assert!(by_pair(0, 1) > 0.1);
    assert!(by_pair(0, 2) < 1e-9 && by_pair(1, 2) < 1e-9);
}

#[test]
fn quotient_leaf_ranks() {
    let q = InvariantSystem::c2_quotient().quotient_manifold().unwrap();
    for p in [[0.3, -1.2, 0.8], [2.0, 0.0, -0.5], [0.0, 0.1, 3.0]] {
        assert_eq!(q.leaf_rank(&p).unwrap(), 2);
    }
    assert!(q.leaf_rank(&[0.0, 0.0, 0.0]).is_err());
    let simplex = InvariantSystem::simplex(&skew(3, 2)).unwrap().quotient_manifold().unwrap();
    assert_eq!(simplex.leaf_rank(&[0.2, 0.3, 0.5]).unwrap(), 2);
    // Edges of the simplex are one-dimensional, so the bracket drops to rank 0 there.
    assert_eq!(simplex.leaf_rank(&[0.0, 0.4, 0.6]).unwrap(), 0);
    assert_eq!(simplex.leaf_rank(&[0.0, 0.4, 0.9]).unwrap(), 2);
    assert_eq!(simplex.leaf_rank(&[0.0, 0.0, 1.0]).unwrap(), 0);
    assert_eq!(ChartPoissonManifold::standard_symplectic(4).unwrap().leaf_rank(&[0.1; 4]).unwrap(), 4);
}

#[test]
fn simplex_bivector_is_poisson_on_the_ambient_space() {
    let q = InvariantSystem::simplex(&skew(4, 6)).unwrap().quotient_manifold().unwrap();
    for p in q.random_points(20, 1) {
        assert!(q.coordinate_jacobiator(&p).unwrap() < 1e-12);
    }
}

#[test]
fn faces_are_poisson_submanifolds() {
    let n = 2;
    let sys = InvariantSystem::simplex(&skew(n + 1, 31)).unwrap();
    for l in 0..=n {
        let c = FaceCondition::CoordinateZero(l);
        assert!(face_invariance_check(&sys, c, &face_points(n, c, 25, l as u64)).unwrap() < 1e-10);
    }
    let c = FaceCondition::UnitSum;
    assert!(face_invariance_check(&sys, c, &face_points(n, c, 25, 9)).unwrap() < 1e-10);
    let vertices: Vec<Vec<f64>> = (0..=n).map(|k| (0..=n).map(|i| f64::from(u8::from(i == k))).collect()).collect();
    for v in &vertices {
        assert_eq!(sys.claimed_at(v).unwrap().amax(), 0.0);
    }
    // An interior point off the coordinate hyperplanes is not a face.
    let m = sys.claimed_at(&[0.2, 0.3, 0.5]).unwrap();
    assert!(m.amax() > 1e-3);
    assert!(matches!(
        face_invariance_check(&sys, FaceCondition::CoordinateZero(0), &[vec![0.2, 0.3, 0.5]]),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn orbit_types_follow_vanishing_coordinates() {
    let interior = [0.3, 0.1, -0.4, 0.2, 0.5, 0.5];
    assert_eq!(orbit_type_classify(&interior, 1e-12).unwrap().label(), "interior");
    let facet = [0.3, 0.1, 0.0, 0.0, 0.5, 0.5];
    let t = orbit_type_classify(&facet, 1e-12).unwrap();
    assert_eq!(t.vanishing, vec![1]);
    assert_eq!(t.label(), "Δ_{1}");
    let mu = simplex_image(&facet).unwrap();
    assert!(mu[1].abs() < 1e-12);
    assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let vertex = [0.0, 0.0, 0.0, 0.0, 0.0, 2.0];
    assert_eq!(orbit_type_classify(&vertex, 1e-12).unwrap().vanishing, vec![0, 1]);
    assert!(orbit_type_classify(&[0.0; 6], 1e-12).is_err());
    assert!(orbit_type_classify(&[1.0; 5], 1e-12).is_err());
}

#[test]
fn orbit_types_are_constant_along_torus_orbits() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for p in [[0.3, 0.1, 0.0, 0.0, 0.5, 0.5], [0.0, 0.0, 1.0, -1.0, 0.0, 0.0], [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]] {
        let base = orbit_type_classify(&p, 1e-12).unwrap();
        for _ in 0..10 {
            let q: Vec<f64> = p
                .chunks(2)
                .flat_map(|c| {
                    let th: f64 = rng.gen_range(0.0..6.3);
                    [c[0] * th.cos() - c[1] * th.sin(), c[0] * th.sin() + c[1] * th.cos()]
                })
                .collect();
            assert_eq!(orbit_type_classify(&q, 1e-12).unwrap(), base);
        }
    }
}

fn x(i: usize) -> Expression {
    Expression::coord(i)
}

#[test]
fn dirac_condition_controls() {
    let r4 = ChartPoissonManifold::standard_symplectic(4).unwrap();
    let p = [0.2, -0.1, 0.7, 0.3];
    let symplectic = DiracSubmanifoldSpec::new(r4.clone(), vec![0, 1], p.to_vec()).unwrap();
    assert_eq!(
        dirac_condition_check(&symplectic, &p).unwrap(),
        DiracCondition { holds: true, intersection_dim: 0 }
    );
    let lagrangian = DiracSubmanifoldSpec::new(r4, vec![0, 2], p.to_vec()).unwrap();
    assert_eq!(
        dirac_condition_check(&lagrangian, &p).unwrap(),
        DiracCondition { holds: false, intersection_dim: 2 }
    );
    assert!(matches!(induced_bivector(&lagrangian, &p), Err(Error::Precondition(_))));
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let radial = DiracSubmanifoldSpec::new(so3, vec![2], vec![0.0, 0.0, 5.0]).unwrap();
    assert!(dirac_condition_check(&radial, &[0.0, 0.0, 5.0]).unwrap().holds);
    assert_eq!(induced_bivector(&radial, &[0.0, 0.0, 5.0]).unwrap(), DMatrix::zeros(1, 1));
    assert!(dirac_condition_check(&radial, &[0.0, 1.0, 5.0]).is_err());
}

#[test]
fn induced_bivector_examples() {
    let r4 = ChartPoissonManifold::standard_symplectic(4).unwrap();
    let p = [0.2, -0.1, 0.7, 0.3];
    let plane = DiracSubmanifoldSpec::new(r4.clone(), vec![0, 1], p.to_vec()).unwrap();
    let expected = ChartPoissonManifold::standard_symplectic(2).unwrap().pi_at(&[0.2, -0.1]).unwrap();
    assert_eq!(induced_bivector(&plane, &p).unwrap(), expected);
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let q = [0.4, -1.1, 0.9];
    let whole = DiracSubmanifoldSpec::new(so3.clone(), vec![0, 1, 2], q.to_vec()).unwrap();
    assert_eq!(induced_bivector(&whole, &q).unwrap(), so3.pi_at(&q).unwrap());
}

#[test]
fn real_slice_of_quadratic_chart_inherits_log_canonical_bracket() {
    // Complex conjugation is a Poisson involution; its fixed set is the real span.
    let a = skew(3, 77);
    let m = ChartPoissonManifold::quadratic_complex(&a).unwrap();
    let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]));
    let spec = DiracSubmanifoldSpec::fixed_points(m, tau).unwrap();
    assert_eq!(spec.tangent(), &[0, 2, 4]);
    let x0 = spec.embed(&[0.5, -0.3, 1.1]).unwrap();
    let pi_n = induced_bivector(&spec, &x0).unwrap();
    let y = [0.5, -0.3, 1.1];
    for i in 0..3 {
        for j in 0..3 {
            assert!((pi_n[(i, j)] - 0.25 * a[(i, j)] * y[i] * y[j]).abs() < 1e-12);
        }
    }
    let induced = induced_manifold(&spec, &x0).unwrap();
    for p in induced.random_points(20, 3) {
        assert!(induced.coordinate_jacobiator(&p).unwrap() < 1e-9);
    }
}

#[test]
fn metric_complement() {
    let gl2 = ChartPoissonManifold::lie_poisson(&LieAlgebra::gl2());
    let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]));
    let mut g = DMatrix::identity(4, 4) * 2.0;
    g[(0, 3)] = 0.5;
    g[(3, 0)] = 0.5;
    g[(1, 2)] = -0.3;
    g[(2, 1)] = -0.3;
    let spec = DiracSubmanifoldSpec::fixed_points(gl2.clone(), tau.clone())
        .unwrap()
        .with_complement(Complement::Metric(g))
        .unwrap();
    assert!(spec.is_transversal());
    let x = spec.embed(&[0.8, -0.6]).unwrap();
    let coord = DiracSubmanifoldSpec::fixed_points(gl2, tau).unwrap();
    assert!((induced_bivector(&spec, &x).unwrap() - induced_bivector(&coord, &x).unwrap()).amax() < 1e-12);

    // A metric coupling the axis to the plane tilts E and breaks ♯(E⁰) ⊂ TN.
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let mut h = DMatrix::identity(3, 3);
    h[(0, 2)] = 0.4;
    h[(2, 0)] = 0.4;
    let tilted = DiracSubmanifoldSpec::new(so3, vec![2], vec![0.0, 0.0, 5.0])
        .unwrap()
        .with_complement(Complement::Metric(h))
        .unwrap();
    assert!(matches!(induced_bivector(&tilted, &[0.0, 0.0, 5.0]), Err(Error::Precondition(_))));
    let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    let r2 = ChartPoissonManifold::standard_symplectic(2).unwrap();
    assert!(DiracSubmanifoldSpec::new(r2, vec![0], vec![0.0; 2]).unwrap().with_complement(Complement::Metric(bad)).is_err());
}

#[test]
fn fixed_point_brackets_are_extension_independent() {
    // so(3)* and the half turn about the third axis: fixed set is a line.
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -1.0, 1.0]));
    let spec = DiracSubmanifoldSpec::fixed_points(so3, tau).unwrap();
    let p = spec.embed(&[1.3]).unwrap();
    let f1 = x(2).powi(2);
    let f2 = f1.add(&x(0).powi(2)).add(&x(1).powi(2));
    let h1 = x(2).sin();
    let h2 = h1.add(&x(0).mul(&x(1)));
    let r = fixed_point_bracket(&spec, [&f1, &f2], [&h1, &h2], &p).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(r.extension_residual < 1e-9);

    // e2 ↦ −e2 on the solvable algebra fixes span(e0, e1) with [e0, e1] = e1.
    let m = ChartPoissonManifold::lie_poisson(&LieAlgebra::solvable3());
    let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0]));
    let spec = DiracSubmanifoldSpec::fixed_points(m, tau).unwrap();
    let y = [0.7, -0.4];
    let p = spec.embed(&y).unwrap();
    let f1 = x(0);
    let f2 = x(0).add(&x(2).powi(2));
    let h1 = x(1).mul(&x(0));
    let h2 = h1.add(&x(0).mul(&x(2).powi(2)));
    let r = fixed_point_bracket(&spec, [&f1, &f2], [&h1, &h2], &p).unwrap();
    let sub = ChartPoissonManifold::lie_poisson(&LieAlgebra::new("aff1", 2, &[(0, 1, 1, 1.0)]).unwrap());
    let oracle = sub.bracket(&x(0), &x(1).mul(&x(0)), &y).unwrap();
    assert!((r.value - oracle).abs() < 1e-12);
    assert!((oracle - 0.7 * -0.4).abs() < 1e-12);
    assert!(r.extension_residual < 1e-9);

    // Diagonal conjugation on gl(2): the fixed subalgebra is abelian.
    let gl2 = ChartPoissonManifold::lie_poisson(&LieAlgebra::gl2());
    let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]));
    let spec = DiracSubmanifoldSpec::fixed_points(gl2, tau).unwrap();
    let p = spec.embed(&[0.8, -0.6]).unwrap();
    let f2 = x(0).add(&x(1).mul(&x(2)));
    let h2 = x(3).add(&x(1).powi(2));
    let r = fixed_point_bracket(&spec, [&x(0), &f2], [&x(3), &h2], &p).unwrap();
    assert!(r.value.abs() < 1e-12 && r.extension_residual < 1e-9);
    // Odd extensions are rejected; with them the bracket would pick up x0 − x3.
    let odd_f = x(0).add(&x(1));
    let odd_h = x(3).add(&x(2));
    assert!(matches!(
        fixed_point_bracket(&spec, [&x(0), &odd_f], [&x(3), &odd_h], &p),
        Err(Error::Precondition(_))
    ));
    let m = spec.manifold();
    assert!((m.bracket(&odd_f, &odd_h, &p).unwrap() - 1.4).abs() < 1e-12);
}

#[test]
fn lie_dirac_closure_on_fixed_sets_and_controls() {
    let gl2 = ChartPoissonManifold::lie_poisson(&LieAlgebra::gl2());
    let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]));
    let spec = DiracSubmanifoldSpec::fixed_points(gl2, tau).unwrap();
    let p = spec.embed(&[0.8, -0.6]).unwrap();
    let z = Expression::zero;
    let forms = vec![
        OneForm::constant(&[1.0, 0.0, 0.0, 0.0]),
        OneForm::new(vec![x(1).powi(2).add(&Expression::one()), x(2), x(1).mul(&x(3)), x(0)]),
        OneForm::new(vec![x(3), z(), x(0).mul(&x(2)), x(1).powi(2).add(&x(0))]),
    ];
    let r = lie_dirac_closure_check(&spec, &forms, &p).unwrap();
    assert!(r.max() < 1e-9, "{r:?}");

    let sol = ChartPoissonManifold::lie_poisson(&LieAlgebra::solvable3());
    let tau = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, -1.0]));
    let spec = DiracSubmanifoldSpec::fixed_points(sol, tau).unwrap();
    let p = spec.embed(&[0.7, -0.4]).unwrap();
    let forms = vec![
        OneForm::new(vec![x(0), x(1).powi(2), x(2)]),
        OneForm::new(vec![x(1), Expression::one(), x(0).mul(&x(2))]),
    ];
    assert!(lie_dirac_closure_check(&spec, &forms, &p).unwrap().max() < 1e-9);

    // A coordinate plane in so(3)* is not invariant under the involution structure.
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let plane = DiracSubmanifoldSpec::new(so3, vec![0, 1], vec![0.0, 0.0, 0.0]).unwrap();
    let forms = vec![OneForm::constant(&[1.0, 0.0, 0.0]), OneForm::constant(&[0.0, 1.0, 0.0])];
    assert!(lie_dirac_closure_check(&plane, &forms, &[1.0, 0.5, 0.0]).unwrap().max() > 0.1);
    let off = vec![OneForm::constant(&[0.0, 0.0, 1.0])];
    assert!(matches!(lie_dirac_closure_check(&plane, &off, &[1.0, 0.5, 0.0]), Err(Error::Precondition(_))));

    let zero = ChartPoissonManifold::zero(3);
    let spec = DiracSubmanifoldSpec::new(zero, vec![1], vec![0.3, 0.0, -0.2]).unwrap();
    let forms = vec![
        OneForm::new(vec![x(0).sub(&Expression::constant(0.3)), x(1).powi(2), x(2).add(&Expression::constant(0.2))]),
        OneForm::constant(&[0.0, 2.0, 0.0]),
    ];
    assert_eq!(lie_dirac_closure_check(&spec, &forms, &[0.3, 1.0, -0.2]).unwrap().max(), 0.0);
}

#[test]
fn c2_invariant_differentials_form_a_basic_subalgebra() {
    let sys = InvariantSystem::c2_quotient();
    let act = sys.action();
    let m = act.manifold();
    let g = sys.generators();
    let pts = m.random_points(20, 42);
    let forms: Vec<OneForm> = g.iter().map(|s| OneForm::exact(s, 4)).collect();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let r = basic_forms_check(act, &forms[i], &forms[j], &g[2], &pts).unwrap();
        assert!(r.momentum < 1e-9 && r.invariance < 1e-9, "{r:?}");
        assert!(r.closure < 1e-8 && r.leibniz < 1e-8, "{r:?}");
    }
    let sigma4 = c2_norm_invariant();
    let r = basic_forms_check(act, &forms[0], &forms[1], &sigma4, &pts).unwrap();
    assert!(r.leibniz < 1e-8);
    // [dσ1, dσ2] = d{σ1, σ2}.
    let br = m.koszul_bracket(&forms[0], &forms[1]).unwrap();
    for p in &pts {
        let lhs = br.eval(p, 0.0).unwrap();
        let h = 1e-6;
        for k in 0..4 {
            let mut a = p.clone();
            let mut b = p.clone();
            a[k] += h;
            b[k] -= h;
            let d = (m.bracket(&g[0], &g[1], &a).unwrap() - m.bracket(&g[0], &g[1], &b).unwrap()) / (2.0 * h);
            assert!((lhs[k] - d).abs() < 1e-6);
        }
    }
}

#[test]
fn basic_forms_trivial_action_and_non_basic_form() {
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let act = PoissonAction::trivial(so3.clone());
    let alpha = OneForm::new(vec![x(1), x(0).powi(2), Expression::one()]);
    let beta = OneForm::new(vec![x(2).sin(), Expression::zero(), x(0)]);
    let f = x(0).mul(&x(1)).add(&x(2));
    let r = basic_forms_check(&act, &alpha, &beta, &f, &so3.random_points(10, 5)).unwrap();
    assert_eq!((r.momentum, r.invariance, r.closure), (0.0, 0.0, 0.0));
    assert!(r.leibniz < 1e-12);
    let c2 = PoissonAction::c2_circle();
    let du = OneForm::constant(&[1.0, 0.0, 0.0, 0.0]);
    let pts = c2.manifold().random_points(3, 1);
    assert!(matches!(basic_forms_check(&c2, &du, &du, &Expression::one(), &pts), Err(Error::Precondition(_))));
}
