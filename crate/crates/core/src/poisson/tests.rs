use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::actions::LieAlgebra;
use crate::numerics::{differentiate, parse_expression};

fn e(s: &str) -> Expression {
    parse_expression(s).unwrap()
}

fn x(i: usize) -> Expression {
    Expression::coord(i)
}

fn sample_a() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, 1.0, -2.0, -1.0, 0.0, 0.5, 2.0, -0.5, 0.0])
}

fn shipped() -> Vec<ChartPoissonManifold> {
    let heis_c = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.5, -1.0, 0.0, -2.0, -0.5, 2.0, 0.0]);
    vec![
        ChartPoissonManifold::zero(3),
        ChartPoissonManifold::standard_symplectic(4).unwrap(),
        ChartPoissonManifold::lie_poisson(&LieAlgebra::so3()),
        ChartPoissonManifold::lie_poisson(&LieAlgebra::gl2()),
        ChartPoissonManifold::lie_poisson(&LieAlgebra::solvable3()),
        ChartPoissonManifold::affine(&LieAlgebra::heisenberg(), &heis_c).unwrap(),
        ChartPoissonManifold::quadratic_complex(&sample_a()).unwrap(),
        ChartPoissonManifold::quadratic_complex_mixed(&sample_a(), 0.7).unwrap(),
        ChartPoissonManifold::torus_symplectic(),
        ChartPoissonManifold::c2_symplectic(),
        ChartPoissonManifold::product(
            &ChartPoissonManifold::lie_poisson(&LieAlgebra::so3()),
            &ChartPoissonManifold::quadratic_complex(&sample_a()).unwrap(),
        ),
        ChartPoissonManifold::lie_poisson(&LieAlgebra::so3()).opposite(),
    ]
}

#[test]
fn bracket_examples() {
    let z = ChartPoissonManifold::zero(3);
    assert_eq!(z.bracket(&x(0), &x(1).mul(&x(2)), &[1.0, 2.0, 3.0]).unwrap(), 0.0);
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    assert!((so3.bracket(&x(0), &x(1), &[0.0, 0.0, 5.0]).unwrap() - 5.0).abs() < 1e-14);
    let r2 = ChartPoissonManifold::standard_symplectic(2).unwrap();
    assert_eq!(r2.bracket(&x(0), &x(1), &[0.3, -7.0]).unwrap(), 1.0);
    assert!(so3.bracket(&x(0), &x(0), &[1.0, 2.0, 3.0]).unwrap().abs() < 1e-15);
}

#[test]
fn lie_poisson_so3_is_levi_civita() {
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let p = [0.7, -1.1, 2.3];
    for i in 0..3 {
        for j in 0..3 {
            let want: f64 = (0..3).map(|k| levi(i, j, k) * p[k]).sum();
            assert!((so3.bracket(&x(i), &x(j), &p).unwrap() - want).abs() < 1e-14);
        }
    }
}

fn levi(i: usize, j: usize, k: usize) -> f64 {
    crate::actions::levi_civita(i, j, k)
}

#[test]
fn sharp_examples() {
    let z = ChartPoissonManifold::zero(2);
    assert_eq!(z.sharp(&OneForm::exact(&x(0), 2), &[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
    // ♯dq = X_q with X_q(p) = {p, q} = −1
    let r2 = ChartPoissonManifold::standard_symplectic(2).unwrap();
    assert_eq!(r2.sharp(&OneForm::exact(&x(0), 2), &[2.0, 3.0]).unwrap(), vec![0.0, -1.0]);
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let v = so3.sharp(&OneForm::exact(&x(0), 3), &[0.0, 0.0, 5.0]).unwrap();
    assert_eq!(v, vec![0.0, -5.0, 0.0]);
    assert!(r2.sharp(&OneForm::zero(3), &[0.0, 0.0]).is_err());
}

#[test]
fn hamiltonian_vector_field_examples() {
    let r2 = ChartPoissonManifold::standard_symplectic(2).unwrap();
    let c = r2.hamiltonian_vector_field(&Expression::constant(4.0));
    assert_eq!(c.eval(&[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
    let h = e("(* 0.5 (+ (^ x0 2) (^ x1 2)))");
    let xh = r2.hamiltonian_vector_field(&h);
    assert_eq!(xh.eval(&[2.0, 3.0]).unwrap(), vec![3.0, -2.0]);
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let cas = e("(* 0.5 (+ (^ x0 2) (^ x1 2) (^ x2 2)))");
    let xc = so3.hamiltonian_vector_field(&cas);
    for p in so3.random_points(10, 1) {
        assert!(xc.eval(&p).unwrap().iter().all(|v| v.abs() < 1e-14));
    }
}

#[test]
fn convention_test() {
    // ♯(df)(g) = {g, f}, and X_f = ♯(df) pointwise
    let f = e("(+ (* x0 x1) (sin x2))");
    let g = e("(* x2 (cos x0))");
    for m in shipped().into_iter().filter(|m| m.dim() == 3) {
        let xf = m.hamiltonian_vector_field(&f);
        for p in m.random_points(20, 2) {
            let v = m.sharp(&OneForm::exact(&f, 3), &p).unwrap();
            let dg = differentiate(&g, &p).unwrap();
            let applied: f64 = v.iter().zip(&dg).map(|(a, b)| a * b).sum();
            assert!((applied - m.bracket(&g, &f, &p).unwrap()).abs() < 1e-12);
            let w = xf.eval(&p).unwrap();
            assert!(v.iter().zip(&w).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }
}

#[test]
fn jacobiator_vanishes_for_shipped_constructors() {
    let f = e("(+ (* x0 x1) (sin x2))");
    let g = e("(* x1 (cos x0))");
    let h = e("(+ (^ x2 2) (* x0 x2))");
    for m in shipped().into_iter().filter(|m| m.dim() >= 3) {
        for p in m.random_points(100, 3) {
            let r = m.coordinate_jacobiator(&p).unwrap();
            assert!(r < 1e-9, "{}: coordinate jacobiator {r:e}", m.name());
            let r = m.jacobiator(&f, &g, &h, &p).unwrap();
            assert!(r.abs() < 1e-9 * (1.0 + p.iter().map(|v| v * v).sum::<f64>()), "{}: {r:e}", m.name());
        }
    }
}

#[test]
fn corrupted_bivector_fails_jacobi() {
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let mut m: Vec<Vec<Expression>> = (0..3).map(|i| (0..3).map(|j| so3.entry(i, j)).collect()).collect();
    m[0][1] = m[0][1].add(&x(0));
    m[1][0] = m[1][0].sub(&x(0));
    let bad = ChartPoissonManifold::from_matrix("bad", m).unwrap();
    let pts = bad.random_points(20, 4);
    let worst = pts.iter().map(|p| bad.coordinate_jacobiator(p).unwrap()).fold(0.0, f64::max);
    assert!(worst > 0.1);
    let at_generic = bad.jacobiator(&x(0), &x(1), &x(2), &[0.4, 0.9, -1.3]).unwrap();
    assert!(at_generic.abs() > 0.1, "{at_generic}");
}

#[test]
fn complex_brackets_of_quadratic_chart() {
    // {z_i, z_j} = a_ij z_i z_j and {z_i, z̄_j} = −½ a_ij z_i z̄_j, read off the real bivector.
    let a = sample_a();
    let m = ChartPoissonManifold::quadratic_complex(&a).unwrap();
    let p = [0.3, -0.7, 1.1, 0.4, -0.9, 0.6];
    let z = |k: usize| (p[2 * k], p[2 * k + 1]);
    let mul = |(a, b): (f64, f64), (c, d): (f64, f64)| (a * c - b * d, a * d + b * c);
    for i in 0..3 {
        for j in 0..3 {
            let b = |r: usize, s: usize| m.bracket(&x(r), &x(s), &p).unwrap();
            let (ui, vi, uj, vj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            // {u+iv, u'+iv'} and {u+iv, u'−iv'}
            let zz = (b(ui, uj) - b(vi, vj), b(ui, vj) + b(vi, uj));
            let zzbar = (b(ui, uj) + b(vi, vj), -b(ui, vj) + b(vi, uj));
            let prod = mul(z(i), z(j));
            let prod_bar = mul(z(i), (z(j).0, -z(j).1));
            let aij = a[(i, j)];
            assert!((zz.0 - aij * prod.0).abs() < 1e-13 && (zz.1 - aij * prod.1).abs() < 1e-13);
            assert!((zzbar.0 + 0.5 * aij * prod_bar.0).abs() < 1e-13);
            assert!((zzbar.1 + 0.5 * aij * prod_bar.1).abs() < 1e-13);
        }
    }
}

#[test]
fn constructors_reject_bad_input() {
    let sym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    assert!(ChartPoissonManifold::quadratic_complex(&sym).is_err());
    assert!(ChartPoissonManifold::affine(&LieAlgebra::abelian(2), &sym).is_err());
    assert!(ChartPoissonManifold::standard_symplectic(3).is_err());
    let m = ChartPoissonManifold::quadratic_complex(&sample_a()).unwrap();
    assert!(matches!(m.pi_at(&[0.0; 6]), Err(EvalError::Excluded(_))));
    assert!(matches!(m.pi_at(&[0.0; 5]), Err(EvalError::Dimension { .. })));
}

#[test]
fn product_and_opposite() {
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let r2 = ChartPoissonManifold::standard_symplectic(2).unwrap();
    let prod = ChartPoissonManifold::product(&so3, &r2);
    let p = [0.1, 0.2, 0.3, 4.0, 5.0];
    let pi = prod.pi_at(&p).unwrap();
    assert_eq!(pi[(3, 4)], 1.0);
    assert_eq!(pi[(0, 3)], 0.0);
    assert!((pi[(0, 1)] - 0.3).abs() < 1e-15);
    let op = so3.opposite();
    assert_eq!(op.pi_at(&p[..3]).unwrap(), -so3.pi_at(&p[..3]).unwrap());
    assert_eq!(ChartPoissonManifold::zero(3).pi_at(&[1.0, 2.0, 3.0]).unwrap(), DMatrix::zeros(3, 3));
}

#[test]
fn koszul_bracket_of_exact_forms() {
    let f = e("(+ (* x0 x1) (sin x2))");
    let g = e("(* x2 (cos x0))");
    for m in shipped().into_iter().filter(|m| m.dim() == 3) {
        let k = m.koszul_bracket(&OneForm::exact(&f, 3), &OneForm::exact(&g, 3)).unwrap();
        for p in m.random_points(50, 5) {
            let got = k.eval(&p, 0.0).unwrap();
            // d{f,g} by finite differences of the bracket
            let h = 1e-5;
            for (i, gi) in got.iter().enumerate() {
                let (mut a, mut b) = (p.clone(), p.clone());
                a[i] += h;
                b[i] -= h;
                let fd = (m.bracket(&f, &g, &a).unwrap() - m.bracket(&f, &g, &b).unwrap()) / (2.0 * h);
                assert!((gi - fd).abs() < 1e-7, "{}: {gi} vs {fd}", m.name());
            }
        }
    }
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let k = so3.koszul_bracket(&OneForm::exact(&x(0), 3), &OneForm::exact(&x(1), 3)).unwrap();
    assert_eq!(k.eval(&[0.3, 0.4, 0.5], 0.0).unwrap(), vec![0.0, 0.0, 1.0]);
    let z = ChartPoissonManifold::zero(2);
    let k = z.koszul_bracket(&OneForm::new(vec![x(1), x(0).mul(&x(0))]), &OneForm::constant(&[1.0, 2.0])).unwrap();
    assert_eq!(k.eval(&[1.0, 2.0], 0.0).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn koszul_leibniz_rule() {
    // [α, fβ] = f[α, β] − ♯α(f) β under ♯(df) = X_f
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let alpha = OneForm::new(vec![x(1), x(2).mul(&x(0)), Expression::one()]);
    let beta = OneForm::new(vec![x(0).sin(), Expression::zero(), x(1)]);
    let f = e("(+ (^ x0 2) x2)");
    let lhs = so3.koszul_bracket(&alpha, &beta.scale(&f)).unwrap();
    let ab = so3.koszul_bracket(&alpha, &beta).unwrap();
    for p in so3.random_points(20, 6) {
        let sa = so3.sharp(&alpha, &p).unwrap();
        let df = differentiate(&f, &p).unwrap();
        let sa_f: f64 = sa.iter().zip(&df).map(|(a, b)| a * b).sum();
        let fv = f.eval(&p).unwrap();
        let (l, r, b) = (lhs.eval(&p, 0.0).unwrap(), ab.eval(&p, 0.0).unwrap(), beta.eval(&p, 0.0).unwrap());
        for k in 0..3 {
            assert!((l[k] - (fv * r[k] - sa_f * b[k])).abs() < 1e-10);
        }
    }
}

#[test]
fn lie_derivative_examples() {
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let f = e("(+ (* x0 x1 x2) (cos x1))");
    let xf = so3.hamiltonian_vector_field(&f);
    let euler = VectorFieldExpr::new((0..3).map(x).collect());
    for p in so3.random_points(100, 7) {
        assert!(so3.lie_derivative_bivector(&xf, &p).unwrap().amax() < 1e-9);
        let l = so3.lie_derivative_bivector(&euler, &p).unwrap();
        assert!((l + so3.pi_at(&p).unwrap()).amax() < 1e-12);
    }
    let c2 = ChartPoissonManifold::c2_symplectic();
    let rot = VectorFieldExpr::new(vec![x(1).neg(), x(0), x(3), x(2).neg()]);
    for p in c2.random_points(100, 8) {
        assert!(c2.lie_derivative_bivector(&rot, &p).unwrap().amax() < 1e-9);
    }
}

#[test]
fn torus_and_c2_conventions() {
    let t = ChartPoissonManifold::torus_symplectic();
    assert_eq!(t.bracket(&x(0), &x(1), &[0.1, 0.2]).unwrap(), -1.0);
    let d = t.displacement(&[0.1, 6.2], &[0.2, 0.05]);
    assert!((d[1] - (0.05 + std::f64::consts::TAU - 6.2)).abs() < 1e-12);
    let c2 = ChartPoissonManifold::c2_symplectic();
    assert_eq!(c2.bracket(&x(0), &x(1), &[1.0, 0.0, 0.0, 0.0]).unwrap(), -1.0);
    assert_eq!(c2.leaf_rank(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 4);
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    assert_eq!(so3.leaf_rank(&[1.0, 2.0, 0.0]).unwrap(), 2);
}

proptest! {
    #[test]
    fn antisymmetry_and_leibniz(p in prop::array::uniform3(-2.0f64..2.0)) {
        let m = ChartPoissonManifold::lie_poisson(&LieAlgebra::solvable3());
        let f = e("(+ (* x0 x1) (sin x2))");
        let g = e("(* x2 (cos x0))");
        let h = e("(+ (^ x1 3) x0)");
        let fg = m.bracket(&f, &g, &p).unwrap();
        prop_assert_eq!(fg, -m.bracket(&g, &f, &p).unwrap());
        let lhs = m.bracket(&f, &g.mul(&h), &p).unwrap();
        let rhs = g.eval(&p).unwrap() * m.bracket(&f, &h, &p).unwrap() + h.eval(&p).unwrap() * fg;
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }
}
