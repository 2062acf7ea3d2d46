//! Builtin scenarios: fixed suites of checks with seeded sampling.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use super::report::ReportRecord;
use crate::actions::{LieAlgebra, MorphismSign, PoissonAction};
use crate::groupoid::{
    cocycle_condition_residual, observed_order, AffineCocycle, AffineGroupoid, AffineGroupoidElement, MatrixGroup,
    PairGroupoid, PairPerturbation,
};
use crate::momentum::{
    check_cocycle, check_equivariance, check_exactness_all, lattice_basis, lifted_momentum, period_samples,
    LatticeReport,
};
use crate::numerics::{parse_expression, Expression, GridCurve};
use crate::paths::{
    average_fiber_path, from_leaf_path, integrate_base, integrate_vector_field, random_covector_spec,
    reparametrization_family, CotangentHomotopy, CotangentPath,
};
use crate::poisson::{ChartPoissonManifold, OneForm, VectorFieldExpr};
use crate::reduction::{
    basic_forms_check, c2_circle_momentum, c2_norm_invariant, dirac_condition_check, face_invariance_check,
    face_points, fixed_point_bracket, induced_bivector, induced_manifold, lie_dirac_closure_check,
    orbit_type_classify, quotient_bracket_check, simplex_samples, DiracSubmanifoldSpec, FaceCondition,
    InvariantSystem,
};
use crate::{Error, Result};

/// A registered scenario and the topics its checks cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub anchors: &'static [&'static str],
}

pub const SCENARIOS: &[ScenarioInfo] = &[
    ScenarioInfo {
        name: "simplex",
        summary: "torus quotients of quadratic charts onto the simplex",
        anchors: &["simplex-quotient", "simplex-faces", "orbit-types", "jacobi"],
    },
    ScenarioInfo {
        name: "c2-circle",
        summary: "circle action on C^2 and its invariant polynomials",
        anchors: &["c2-circle-quotient", "momentum-cocycle", "endpoint-identity", "exactness", "pair-groupoid", "homotopy"],
    },
    ScenarioInfo {
        name: "torus-periods",
        summary: "period group of the angle shift on the symplectic torus",
        anchors: &["period-group", "exactness", "momentum-cocycle", "endpoint-identity", "homotopy"],
    },
    ScenarioInfo {
        name: "cotangent-lift",
        summary: "cotangent-lifted rotation of the plane and fiberwise paths",
        anchors: &["cotangent-lift", "momentum-cocycle", "endpoint-identity", "exactness", "homotopy"],
    },
    ScenarioInfo {
        name: "so3-lie-poisson",
        summary: "coadjoint action on so(3)* and the groupoid T*SO(3)",
        anchors: &["linear-poisson", "momentum-cocycle", "endpoint-identity", "exactness", "homotopy", "affine-groupoid"],
    },
    ScenarioInfo {
        name: "heisenberg-affine",
        summary: "affine Poisson structure on the Heisenberg dual and its groupoid",
        anchors: &["affine-poisson", "affine-groupoid"],
    },
    ScenarioInfo {
        name: "fixed-points",
        summary: "fixed sets of Poisson involutions",
        anchors: &["fixed-point-set", "jacobi"],
    },
    ScenarioInfo {
        name: "dirac-submanifold",
        summary: "Poisson-Dirac submanifolds and their induced brackets",
        anchors: &["dirac-submanifold", "jacobi"],
    },
    ScenarioInfo {
        name: "basic-forms",
        summary: "basic forms of the C^2 circle action",
        anchors: &["basic-forms"],
    },
];

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.iter().map(|s| s.name).collect()
}

pub fn lookup(name: &str) -> Result<&'static ScenarioInfo> {
    SCENARIOS.iter().find(|s| s.name == name).ok_or_else(|| Error::Unknown {
        kind: "scenario",
        name: name.to_string(),
        available: scenario_names().join(", "),
    })
}

/// Collects records for one scenario, applying tolerance overrides.
pub struct Recorder<'a> {
    scenario: String,
    cfg: &'a ScenarioConfig,
    pub records: Vec<ReportRecord>,
}

impl<'a> Recorder<'a> {
    pub fn new(scenario: &str, cfg: &'a ScenarioConfig) -> Self {
        Recorder { scenario: scenario.to_string(), cfg, records: Vec::new() }
    }

    pub fn config(&self) -> &ScenarioConfig {
        self.cfg
    }

    /// Fresh generator for the `stream`-th sampling task of this scenario.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        r.set_stream(stream);
        r
    }

    pub fn seed(&self, stream: u64) -> u64 {
        self.rng(stream).gen()
    }

    pub fn check(&mut self, check: &str, anchor: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        let tol = self.cfg.tolerance(check, tolerance);
        let start = Instant::now();
        let residual = f().map_err(|e| Error::Invalid(format!("{} / {check}: {e}", self.scenario)))?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        self.records.push(ReportRecord::new(&self.scenario, check, anchor, residual, tol, ms));
        Ok(residual)
    }
}

pub fn run_builtin(name: &str, cfg: &ScenarioConfig) -> Result<Vec<ReportRecord>> {
    let info = lookup(name)?;
    let mut rec = Recorder::new(info.name, cfg);
    match info.name {
        "simplex" => simplex(&mut rec)?,
        "c2-circle" => c2_circle(&mut rec)?,
        "torus-periods" => torus_periods(&mut rec)?,
        "cotangent-lift" => cotangent_lift(&mut rec)?,
        "so3-lie-poisson" => so3_lie_poisson(&mut rec)?,
        "heisenberg-affine" => heisenberg_affine(&mut rec)?,
        "fixed-points" => fixed_points(&mut rec)?,
        "dirac-submanifold" => dirac_submanifold(&mut rec)?,
        "basic-forms" => basic_forms(&mut rec)?,
        _ => unreachable!("registry and dispatch agree"),
    }
    Ok(rec.records)
}

fn x(i: usize) -> Expression {
    Expression::coord(i)
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// `f64` count of failed boolean expectations.
fn mismatches(flags: impl IntoIterator<Item = bool>) -> f64 {
    flags.into_iter().filter(|ok| !ok).count() as f64
}

/// Random antisymmetric `n1 × n1` matrix with entries in `[−1, 1)`.
pub fn random_skew(rng: &mut impl Rng, n1: usize) -> DMatrix<f64> {
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

/// Max coordinate Jacobiator over `count` seeded points of the chart.
pub fn jacobi_residual(m: &ChartPoissonManifold, count: usize, seed: u64) -> Result<f64> {
    m.random_points(count, seed).iter().try_fold(0.0f64, |w, p| Ok(w.max(m.coordinate_jacobiator(p)?)))
}

/// `count` concatenable pairs of random cotangent paths starting in `[lo, hi)^d`.
pub fn random_path_pairs(
    m: &ChartPoissonManifold,
    rng: &mut impl Rng,
    count: usize,
    steps: usize,
    (lo, hi): (f64, f64),
) -> Result<Vec<(CotangentPath, CotangentPath)>> {
    let d = m.dim();
    (0..count)
        .map(|_| {
            let x0: Vec<f64> = (0..d).map(|_| rng.gen_range(lo..hi)).collect();
            let a1 = integrate_base(m, &random_covector_spec(rng, d), &x0, steps)?;
            let a2 = integrate_base(m, &random_covector_spec(rng, d), a1.end(), steps)?;
            Ok((a1, a2))
        })
        .collect()
}

/// Max over paths and Hamiltonians of `|∫_a X_h − (h(start) − h(end))|`.
pub fn endpoint_identity_residual(m: &ChartPoissonManifold, hamiltonians: &[Expression], paths: &[CotangentPath]) -> Result<f64> {
    let mut worst = 0.0f64;
    for h in hamiltonians {
        let xh = m.hamiltonian_vector_field(h);
        for a in paths {
            let lhs = integrate_vector_field(&xh, a)?;
            worst = worst.max((lhs - (h.eval(a.start())? - h.eval(a.end())?)).abs());
        }
    }
    Ok(worst)
}

/// `max − min` of `∫_{a_ε} X` over the slices, maximized over fields.
pub fn integral_spread(h: &CotangentHomotopy, fields: &[VectorFieldExpr]) -> Result<f64> {
    let mut worst = 0.0f64;
    for f in fields {
        let vals = h.slices().iter().map(|s| integrate_vector_field(f, s)).collect::<Result<Vec<f64>>>()?;
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        worst = worst.max(hi - lo);
    }
    Ok(worst)
}

/// The fields checked for homotopy invariance: Hamiltonian fields of the
/// coordinates plus the action generators.
fn shipped_fields(act: &PoissonAction) -> Vec<VectorFieldExpr> {
    let m = act.manifold();
    (0..m.dim()).map(|i| m.hamiltonian_vector_field(&x(i))).chain(act.generators().iter().cloned()).collect()
}

/// Cocycle, endpoint identity, exactness (when `mu` is given) and
/// reparametrization homotopy checks on random paths for `act`.
fn path_suite(rec: &mut Recorder, act: &PoissonAction, mu: Option<&[Expression]>, box_range: (f64, f64)) -> Result<()> {
    let grid = rec.config().grid.clone();
    let m = act.manifold().clone();
    let mut rng = rec.rng(100);
    let pairs = random_path_pairs(&m, &mut rng, grid.samples, grid.steps, box_range)?;
    rec.check("momentum-cocycle", "momentum-cocycle", 1e-6, || {
        pairs.iter().try_fold(0.0f64, |w, (a, b)| Ok(w.max(check_cocycle(act, a, b)?)))
    })?;
    let firsts: Vec<CotangentPath> = pairs.iter().map(|(a, _)| a.clone()).collect();
    let mut hams: Vec<Expression> = (0..m.dim()).map(x).collect();
    hams.push(Expression::sum((0..m.dim()).map(|i| x(i).mul(&x((i + 1) % m.dim())))));
    if let Some(mu) = mu {
        hams.extend(mu.iter().cloned());
    }
    rec.check("endpoint-identity", "endpoint-identity", 1e-8, || endpoint_identity_residual(&m, &hams, &firsts))?;
    if let Some(mu) = mu {
        rec.check("exactness", "exactness", 1e-6, || Ok(check_exactness_all(act, mu, &firsts)?.residual))?;
    }
    let spec = random_covector_spec(&mut rng, m.dim());
    let x0 = firsts[0].start().to_vec();
    let family = reparametrization_family(&m, &spec, &x0, grid.steps, grid.eps_steps, 0.5)?;
    let report = family.verify()?;
    rec.check("homotopy-endpoint-b", "homotopy", 1e-4, || Ok(report.endpoint_b))?;
    rec.check("homotopy-integral-spread", "homotopy", 1e-5, || integral_spread(&family, &shipped_fields(act)))?;
    Ok(())
}

fn simplex(rec: &mut Recorder) -> Result<()> {
    let points = rec.config().grid.points;
    let mut rng = rec.rng(1);
    let matrices: Vec<Vec<DMatrix<f64>>> =
        (1..=4).map(|n| (0..20).map(|_| random_skew(&mut rng, n + 1)).collect()).collect();
    for n in 1..=4usize {
        let a_list = &matrices[n - 1];
        let seed = rec.seed(10 + n as u64);
        rec.check(&format!("jacobi-quadratic-{n}"), "jacobi", 1e-9, || {
            jacobi_residual(&ChartPoissonManifold::quadratic_complex(&a_list[0])?, points, seed)
        })?;
        rec.check(&format!("jacobi-simplex-{n}"), "jacobi", 1e-9, || {
            jacobi_residual(&InvariantSystem::simplex(&a_list[0])?.quotient_manifold()?, points, seed)
        })?;
        let seed = rec.seed(20 + n as u64);
        rec.check(&format!("quotient-bracket-{n}"), "simplex-quotient", 1e-9, || {
            let mut worst = 0.0f64;
            for (k, a) in a_list.iter().enumerate() {
                let sys = InvariantSystem::simplex(a)?;
                let samples = simplex_samples(n, 50, seed.wrapping_add(k as u64));
                worst = worst.max(quotient_bracket_check(&sys, &samples)?.max_residual);
            }
            Ok(worst)
        })?;
        let seed = rec.seed(30 + n as u64);
        rec.check(&format!("face-invariance-{n}"), "simplex-faces", 1e-10, || {
            let mut worst = 0.0f64;
            for (k, a) in a_list.iter().enumerate() {
                let sys = InvariantSystem::simplex(a)?;
                let conds = (0..=n).map(FaceCondition::CoordinateZero).chain([FaceCondition::UnitSum]);
                for (c_idx, c) in conds.enumerate() {
                    let pts = face_points(n, c, 25, seed.wrapping_add((k * 10 + c_idx) as u64));
                    worst = worst.max(face_invariance_check(&sys, c, &pts)?);
                }
            }
            Ok(worst)
        })?;
    }
    rec.check("spot-value", "simplex-quotient", 1e-15, || {
        let mut a = DMatrix::zeros(3, 3);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = -1.0;
        let third = 1.0 / 3.0;
        Ok((InvariantSystem::simplex(&a)?.claimed_at(&[third, third, third])?[(0, 1)] - 1.0 / 27.0).abs())
    })?;
    let mut orbit_rng = rec.rng(2);
    rec.check("orbit-types", "orbit-types", 0.0, || {
        let cases: [(&[f64], &[usize]); 4] = [
            (&[0.3, 0.1, -0.4, 0.2, 0.5, 0.5], &[]),
            (&[0.3, 0.1, 0.0, 0.0, 0.5, 0.5], &[1]),
            (&[0.0, 0.0, 1.0, -1.0, 0.0, 0.0], &[0, 2]),
            (&[0.0, 0.0, 0.0, 0.0, 0.0, 2.0], &[0, 1]),
        ];
        let mut flags = Vec::new();
        for (p, want) in cases {
            for _ in 0..10 {
                let q: Vec<f64> = p
                    .chunks(2)
                    .flat_map(|c| {
                        let th: f64 = orbit_rng.gen_range(0.0..TAU);
                        [c[0] * th.cos() - c[1] * th.sin(), c[0] * th.sin() + c[1] * th.cos()]
                    })
                    .collect();
                flags.push(orbit_type_classify(&q, 1e-12)?.vanishing == want);
            }
        }
        Ok(mismatches(flags))
    })?;
    let seed = rec.seed(3);
    rec.check("leaf-rank", "simplex-quotient", 0.0, || {
        let q = InvariantSystem::simplex(&matrices[1][0])?.quotient_manifold()?;
        let mut flags = Vec::new();
        for s in simplex_samples(2, 20, seed) {
            flags.push(q.leaf_rank(&s.point)? == 2);
        }
        for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            flags.push(q.leaf_rank(&v)? == 0);
        }
        Ok(mismatches(flags))
    })?;
    Ok(())
}

fn c2_circle(rec: &mut Recorder) -> Result<()> {
    let points = rec.config().grid.points;
    let act = PoissonAction::c2_circle();
    let m = act.manifold().clone();
    let seed = rec.seed(1);
    rec.check("jacobi", "jacobi", 1e-9, || jacobi_residual(&m, points, seed))?;
    let pts = m.random_points(50, rec.seed(2));
    rec.check("poisson-action", "c2-circle-quotient", 1e-9, || act.check_poisson_action(&pts))?;
    let sys = InvariantSystem::c2_quotient();
    rec.check("invariance", "c2-circle-quotient", 1e-9, || sys.invariance_residual(&pts))?;
    let samples = sys.samples_from_preimages(&pts)?;
    let report = quotient_bracket_check(&sys, &samples)?;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let r = report.pairs.iter().find(|p| (p.i, p.j) == (i, j)).map(|p| p.residual).unwrap_or(f64::NAN);
        rec.check(&format!("quotient-bracket-{}{}", i + 1, j + 1), "c2-circle-quotient", 1e-9, || Ok(r))?;
    }
    rec.check("quotient-bracket-12-factor-4", "c2-circle-quotient", 1e-9, || {
        let scaled = InvariantSystem::c2_quotient_scaled(4.0);
        Ok(quotient_bracket_check(&scaled, &scaled.samples_from_preimages(&pts)?)?.max_residual)
    })?;
    rec.check("leaf-rank", "c2-circle-quotient", 0.0, || {
        let q = sys.quotient_manifold()?;
        let flags = samples.iter().map(|s| q.leaf_rank(&s.point).map(|r| r == 2)).collect::<Result<Vec<_>>>()?;
        Ok(mismatches(flags))
    })?;
    let mu = [c2_circle_momentum()];
    path_suite(rec, &act, Some(&mu), (0.5, 1.5))?;
    let pg = PairGroupoid::new(m.clone());
    rec.check("pair-groupoid-momentum", "pair-groupoid", 1e-15, || {
        let e = pg.arrow(vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0])?;
        Ok((pg.momentum(&mu, &e)?[0] + 1.0).abs())
    })?;
    let chain = m.random_points(21, rec.seed(3));
    rec.check("pair-groupoid-additivity", "pair-groupoid", 1e-12, || {
        let mut worst = 0.0f64;
        for w in chain.windows(3) {
            let e1 = pg.arrow(w[0].clone(), w[1].clone())?;
            let e2 = pg.arrow(w[1].clone(), w[2].clone())?;
            let e12 = pg.multiply(&e1, &e2)?;
            let j = |e| pg.momentum(&mu, e).map(|v| v[0]);
            worst = worst.max((j(&e12)? - j(&e1)? - j(&e2)?).abs());
        }
        Ok(worst)
    })?;
    let seed = rec.seed(4);
    rec.check("jacobi-pair-arrows", "jacobi", 1e-9, || jacobi_residual(&pg.arrow_manifold(), points, seed))?;
    Ok(())
}

/// Loop `θ(t) = x0 + 2π t (k1, k2)` on the torus chart.
pub fn torus_loop(x0: [f64; 2], k1: f64, k2: f64, steps: usize) -> Result<CotangentPath> {
    let m = ChartPoissonManifold::torus_symplectic();
    let g = GridCurve::from_fn(steps, 2, |t| vec![x0[0] + TAU * k1 * t, x0[1] + TAU * k2 * t])?;
    from_leaf_path(&m, &g)
}

fn torus_periods(rec: &mut Recorder) -> Result<()> {
    let steps = rec.config().grid.steps;
    let act = PoissonAction::torus_shift();
    let windings = [(0.0, 1.0), (1.0, 0.0), (2.0, -1.0), (1.0, 3.0), (-1.0, 2.0)];
    let loops_at = |p: [f64; 2]| windings.iter().map(|&(k1, k2)| torus_loop(p, k1, k2, steps)).collect::<Result<Vec<_>>>();
    let first = loops_at([0.0, 0.0])?;
    let second = loops_at([1.3, 4.0])?;
    let periods = period_samples(&act, &first, 1e-9)?;
    rec.check("periods", "period-group", 1e-6, || {
        Ok(periods.iter().zip(&windings).map(|(s, &(_, k2))| (s.components()[0] - TAU * k2).abs()).fold(0.0, f64::max))
    })?;
    rec.check("lattice-generator", "period-group", 1e-6, || {
        Ok(match lattice_basis(&periods, 1e-6) {
            LatticeReport::Discrete { basis } if basis.len() == 1 => (basis[0][0].abs() - TAU).abs(),
            _ => f64::INFINITY,
        })
    })?;
    rec.check("leaf-independence", "period-group", 1e-6, || {
        let other = period_samples(&act, &second, 1e-9)?;
        Ok(periods.iter().zip(&other).map(|(a, b)| a.distance(b)).fold(0.0, f64::max))
    })?;
    rec.check("exactness-control", "exactness", 1e-6, || {
        let r = check_exactness_all(&act, &[x(1)], &first[..1])?;
        Ok((r.residual - TAU).abs())
    })?;
    path_suite(rec, &act, None, (0.0, TAU))
}

fn cotangent_lift(rec: &mut Recorder) -> Result<()> {
    let grid = rec.config().grid.clone();
    let act = PoissonAction::cotangent_rotation();
    let m = act.manifold().clone();
    let seed = rec.seed(1);
    rec.check("jacobi", "jacobi", 1e-9, || jacobi_residual(&m, grid.points, seed))?;
    let zero = ChartPoissonManifold::zero(3);
    rec.check("jacobi-zero", "jacobi", 1e-9, || jacobi_residual(&zero, grid.points, seed))?;
    let pts = m.random_points(50, rec.seed(2));
    rec.check("poisson-action", "cotangent-lift", 1e-9, || act.check_poisson_action(&pts))?;
    rec.check("morphism", "cotangent-lift", 1e-9, || act.check_morphism(&pts))?;
    let mu = [parse_expression("(- (* x0 x3) (* x2 x1))")?];
    path_suite(rec, &act, Some(&mu), (-1.0, 1.0))?;
    let mut rng = rec.rng(3);
    let paths = random_path_pairs(&m, &mut rng, 5, grid.steps, (-1.0, 1.0))?;
    rec.check("equivariance", "cotangent-lift", 1e-5, || {
        paths.iter().try_fold(0.0f64, |w, (a, _)| Ok(w.max(check_equivariance(&act, &[1.0], FRAC_PI_2, a)?)))
    })?;

    // Zero bracket: base points stay put and only the fiber average matters.
    let flat = ChartPoissonManifold::zero(2);
    let rot = VectorFieldExpr::new(vec![x(1).neg(), x(0)]);
    let flat_act = PoissonAction::new("fiber-rotation", flat.clone(), LieAlgebra::abelian(1), vec![rot.clone()], MorphismSign::Anti)?;
    let start = [1.0, 2.0];
    let wavy = OneForm::new(vec![parse_expression("(+ 0.5 (sin (* 2 pi t)))")?, parse_expression("(cos (* 2 pi t))")?]);
    let a0 = integrate_base(&flat, &wavy, &start, grid.steps)?;
    let avg = average_fiber_path(&a0)?;
    rec.check("zero-poisson-average-momentum", "cotangent-lift", 1e-12, || {
        let want = flat_act.cotangent_momentum_j(&start, &avg)?;
        Ok(lifted_momentum(&flat_act, &a0)?.distance(&want))
    })?;
    let constant = integrate_base(&flat, &OneForm::constant(&avg), &start, grid.steps)?;
    let family = CotangentHomotopy::fiber_interpolation(&a0, &constant, grid.eps_steps)?;
    let report = family.verify()?;
    rec.check("zero-poisson-homotopy-b", "homotopy", 1e-4, || Ok(report.endpoint_b))?;
    rec.check("zero-poisson-integral-spread", "homotopy", 1e-5, || integral_spread(&family, std::slice::from_ref(&rot)))?;
    Ok(())
}

fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Axioms and `J` additivity over `count` composable triples; the worst residual.
pub fn groupoid_axiom_residual(gpd: &AffineGroupoid, count: usize, rng: &mut impl Rng) -> Result<f64> {
    let n = gpd.group().dim();
    let grp = gpd.group();
    let s = |a: &AffineGroupoidElement, b: &AffineGroupoidElement| sup_diff(a.alpha.components(), b.alpha.components());
    let mut worst = 0.0f64;
    for _ in 0..count {
        let (ga, gb, gc) = (grp.exp(&random_vec(rng, n)), grp.exp(&random_vec(rng, n)), grp.exp(&random_vec(rng, n)));
        let e3 = gpd.element(gc, random_vec(rng, n))?;
        let e2 = gpd.compose_with(gb, &e3);
        let e1 = gpd.compose_with(ga, &e2);
        let e12 = gpd.multiply(&e1, &e2)?;
        let left = gpd.multiply(&e12, &e3)?;
        let right = gpd.multiply(&e1, &gpd.multiply(&e2, &e3)?)?;
        worst = worst.max(left.g.distance(&right.g)).max(s(&left, &right));
        worst = worst.max(sup_diff(gpd.source(&e12).components(), gpd.source(&e2).components()));
        worst = worst.max(sup_diff(gpd.target(&e12).components(), gpd.target(&e1).components()));
        let unit_s = gpd.unit(gpd.source(&e1).into_components())?;
        let unit_t = gpd.unit(gpd.target(&e1).into_components())?;
        let r = gpd.multiply(&e1, &unit_s)?;
        let l = gpd.multiply(&unit_t, &e1)?;
        worst = worst.max(r.g.distance(&e1.g)).max(l.g.distance(&e1.g)).max(s(&r, &e1)).max(s(&l, &e1));
        let inv = gpd.inverse(&e1);
        let u1 = gpd.multiply(&e1, &inv)?;
        let u2 = gpd.multiply(&inv, &e1)?;
        worst = worst.max(u1.g.distance(&grp.identity())).max(u2.g.distance(&grp.identity()));
        worst = worst.max(sup_diff(u1.alpha.components(), gpd.target(&e1).components()));
        worst = worst.max(sup_diff(u2.alpha.components(), e1.alpha.components()));
        let sum = gpd.affine_momentum(&e1).add(&gpd.affine_momentum(&e2));
        worst = worst.max(sup_diff(gpd.affine_momentum(&e12).components(), sum.components()));
    }
    Ok(worst)
}

/// Worst multiplicativity residual at `h` and the worst shortfall of the
/// observed order below 1 over halvings of a coarse step.
pub fn multiplicativity_residuals(gpd: &AffineGroupoid, count: usize, h: f64, rng: &mut impl Rng) -> Result<(f64, f64)> {
    let n = gpd.group().dim();
    let pert = |rng: &mut dyn rand::RngCore| PairPerturbation {
        xi_g: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        xi_h: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        beta_dot: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    let (mut worst, mut shortfall) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let g = gpd.group().exp(&random_vec(rng, n));
        let second = gpd.element(gpd.group().exp(&random_vec(rng, n)), random_vec(rng, n))?;
        let (p, q) = (pert(rng), pert(rng));
        worst = worst.max(gpd.check_multiplicative(&g, &second, &p, &q, h)?);
        let coarse = [0.1, 0.05, 0.025]
            .iter()
            .map(|&hh| gpd.check_multiplicative(&g, &second, &p, &q, hh))
            .collect::<Result<Vec<_>>>()?;
        // Residuals at rounding level carry no order information.
        if coarse[0] > 1e-9 {
            shortfall = observed_order(&coarse).iter().fold(shortfall, |s, &o| s.max(1.0 - o));
        }
    }
    Ok((worst, shortfall))
}

fn groupoid_suite(rec: &mut Recorder, gpd: &AffineGroupoid, stream: u64) -> Result<()> {
    let mut rng = rec.rng(stream);
    rec.check("groupoid-axioms", "affine-groupoid", 1e-10, || groupoid_axiom_residual(gpd, 100, &mut rng))?;
    let els = gpd.group().random_elements(20, 1.2, rec.seed(stream + 1));
    rec.check("group-cocycle", "affine-groupoid", 1e-10, || {
        Ok(els.windows(2).map(|w| gpd.group_cocycle_residual(&w[0], &w[1])).fold(0.0, f64::max))
    })?;
    rec.check("cocycle-derivative", "affine-groupoid", 1e-6, || Ok(gpd.cocycle_compatibility_residual(1e-5)))?;
    let mut rng = rec.rng(stream + 2);
    let (worst, shortfall) = multiplicativity_residuals(gpd, 10, 1e-4, &mut rng)?;
    rec.check("multiplicativity", "affine-groupoid", 1e-4, || Ok(worst))?;
    rec.check("multiplicativity-order", "affine-groupoid", 0.0, || Ok(shortfall.max(0.0)))?;
    Ok(())
}

fn so3_lie_poisson(rec: &mut Recorder) -> Result<()> {
    let grid = rec.config().grid.clone();
    let alg = LieAlgebra::so3();
    let act = PoissonAction::coadjoint(&alg);
    let m = act.manifold().clone();
    let seed = rec.seed(1);
    rec.check("jacobi", "jacobi", 1e-9, || jacobi_residual(&m, grid.points, seed))?;
    let pts = m.random_points(50, rec.seed(2));
    rec.check("poisson-action", "linear-poisson", 1e-9, || act.check_poisson_action(&pts))?;
    rec.check("morphism", "linear-poisson", 1e-9, || act.check_morphism(&pts))?;
    let mu: Vec<Expression> = (0..3).map(x).collect();
    path_suite(rec, &act, Some(&mu), (0.5, 1.5))?;
    let mut rng = rec.rng(3);
    let paths = random_path_pairs(&m, &mut rng, 5, grid.steps, (0.5, 1.5))?;
    rec.check("equivariance", "linear-poisson", 1e-4, || {
        paths.iter().try_fold(0.0f64, |w, (a, _)| {
            let xi = random_vec(&mut rng, 3);
            Ok(w.max(check_equivariance(&act, &xi, FRAC_PI_2, a)?))
        })
    })?;
    let gpd = AffineGroupoid::new(MatrixGroup::rotations(), AffineCocycle::zero(3))?;
    rec.check("quarter-turn", "affine-groupoid", 1e-12, || {
        let e = gpd.element(MatrixGroup::rotations().exp(&[0.0, 0.0, FRAC_PI_2]), vec![1.0, 0.0, 0.0])?;
        Ok(sup_diff(gpd.target(&e).components(), &[0.0, 1.0, 0.0])
            .max(sup_diff(gpd.affine_momentum(&e).components(), &[1.0, -1.0, 0.0])))
    })?;
    groupoid_suite(rec, &gpd, 10)
}

/// Cocycle coefficients of the shipped Heisenberg example.
pub const HEISENBERG_COCYCLE: (f64, f64, f64) = (0.7, -1.3, 0.4);

fn heisenberg_affine(rec: &mut Recorder) -> Result<()> {
    let points = rec.config().grid.points;
    let alg = LieAlgebra::heisenberg();
    let (cxy, cxz, cyz) = HEISENBERG_COCYCLE;
    let cocycle = AffineCocycle::heisenberg(cxy, cxz, cyz);
    let m = ChartPoissonManifold::affine(&alg, cocycle.c())?;
    let seed = rec.seed(1);
    rec.check("jacobi", "jacobi", 1e-9, || jacobi_residual(&m, points, seed))?;
    rec.check("dc", "affine-poisson", 1e-14, || Ok(cocycle_condition_residual(&alg, cocycle.c())))?;
    let gpd = AffineGroupoid::new(MatrixGroup::heisenberg(), cocycle)?;
    groupoid_suite(rec, &gpd, 10)
}

fn fixed_points(rec: &mut Recorder) -> Result<()> {
    let diag = |v: &[f64]| DMatrix::from_diagonal(&DVector::from_column_slice(v));
    let seed = rec.seed(1);
    let mut rng = rec.rng(2);
    let mut ext = 0.0f64;
    let mut value = 0.0f64;

    // so(3)* with the half turn about the third axis: the fixed line carries the zero bracket.
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let spec = DiracSubmanifoldSpec::fixed_points(so3, diag(&[-1.0, -1.0, 1.0]))?;
    let f1 = x(2).powi(2);
    let f2 = f1.add(&x(0).powi(2)).add(&x(1).powi(2));
    let h1 = x(2).sin();
    let h2 = h1.add(&x(0).mul(&x(1)));
    for _ in 0..10 {
        let p = spec.embed(&random_vec(&mut rng, 1))?;
        let r = fixed_point_bracket(&spec, [&f1, &f2], [&h1, &h2], &p)?;
        ext = ext.max(r.extension_residual);
        value = value.max(r.value.abs());
    }
    let so3_spec = spec;

    // e2 ↦ −e2 on the solvable algebra fixes span(e0, e1) with [e0, e1] = e1,
    // where {y0, y1 y0} = y0 y1.
    let sol = ChartPoissonManifold::lie_poisson(&LieAlgebra::solvable3());
    let spec = DiracSubmanifoldSpec::fixed_points(sol, diag(&[1.0, 1.0, -1.0]))?;
    let f2 = x(0).add(&x(2).powi(2));
    let h1 = x(1).mul(&x(0));
    let h2 = h1.add(&x(0).mul(&x(2).powi(2)));
    for _ in 0..10 {
        let y = random_vec(&mut rng, 2);
        let r = fixed_point_bracket(&spec, [&x(0), &f2], [&h1, &h2], &spec.embed(&y)?)?;
        ext = ext.max(r.extension_residual);
        value = value.max((r.value - y[0] * y[1]).abs());
    }
    let sol_spec = spec;

    // Diagonal conjugation on gl(2): the fixed subalgebra is abelian.
    let gl2 = ChartPoissonManifold::lie_poisson(&LieAlgebra::gl2());
    let spec = DiracSubmanifoldSpec::fixed_points(gl2, diag(&[1.0, -1.0, -1.0, 1.0]))?;
    let f2 = x(0).add(&x(1).mul(&x(2)));
    let h2 = x(3).add(&x(1).powi(2));
    for _ in 0..10 {
        let p = spec.embed(&random_vec(&mut rng, 2))?;
        let r = fixed_point_bracket(&spec, [&x(0), &f2], [&x(3), &h2], &p)?;
        ext = ext.max(r.extension_residual);
        value = value.max(r.value.abs());
    }
    let gl2_spec = spec;

    // Complex conjugation on a quadratic chart; the real slice carries
    // {y_i, y_j} = a_ij y_i y_j / 4, so {y0 y1, y2} = (a02 + a12) y0 y1 y2 / 4.
    let a = random_skew(&mut rng, 3);
    let quad = ChartPoissonManifold::quadratic_complex(&a)?;
    let spec = DiracSubmanifoldSpec::fixed_points(quad, diag(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]))?;
    let f1 = x(0).mul(&x(2));
    let f2 = f1.add(&x(1).powi(2));
    let h2 = x(4).add(&x(3).mul(&x(5)));
    for _ in 0..10 {
        let y = random_vec(&mut rng, 3);
        let r = fixed_point_bracket(&spec, [&f1, &f2], [&x(4), &h2], &spec.embed(&y)?)?;
        ext = ext.max(r.extension_residual);
        value = value.max((r.value - 0.25 * (a[(0, 2)] + a[(1, 2)]) * y[0] * y[1] * y[2]).abs());
    }
    rec.check("extension-independence", "fixed-point-set", 1e-9, || Ok(ext))?;
    rec.check("bracket-values", "fixed-point-set", 1e-12, || Ok(value))?;
    rec.check("induced-jacobi", "jacobi", 1e-9, || {
        let mut worst = 0.0f64;
        for (s, y) in [(&so3_spec, vec![1.3]), (&sol_spec, vec![0.7, -0.4]), (&gl2_spec, vec![0.8, -0.6]), (&spec, vec![0.5, -0.3, 1.1])] {
            let induced = induced_manifold(s, &s.embed(&y)?)?;
            worst = worst.max(jacobi_residual(&induced, 20, seed)?);
        }
        Ok(worst)
    })?;
    Ok(())
}

fn dirac_submanifold(rec: &mut Recorder) -> Result<()> {
    let r4 = ChartPoissonManifold::standard_symplectic(4)?;
    let so3 = ChartPoissonManifold::lie_poisson(&LieAlgebra::so3());
    let p = [0.2, -0.1, 0.7, 0.3];
    rec.check("dirac-controls", "dirac-submanifold", 0.0, || {
        let symplectic = DiracSubmanifoldSpec::new(r4.clone(), vec![0, 1], p.to_vec())?;
        let lagrangian = DiracSubmanifoldSpec::new(r4.clone(), vec![0, 2], p.to_vec())?;
        let radial = DiracSubmanifoldSpec::new(so3.clone(), vec![2], vec![0.0, 0.0, 5.0])?;
        let s = dirac_condition_check(&symplectic, &p)?;
        let l = dirac_condition_check(&lagrangian, &p)?;
        let r = dirac_condition_check(&radial, &[0.0, 0.0, 5.0])?;
        Ok(mismatches([
            s.holds && s.intersection_dim == 0,
            !l.holds && l.intersection_dim == 2,
            induced_bivector(&lagrangian, &p).is_err(),
            r.holds,
        ]))
    })?;
    rec.check("induced-bivector", "dirac-submanifold", 1e-12, || {
        let plane = DiracSubmanifoldSpec::new(r4.clone(), vec![0, 1], p.to_vec())?;
        let want = ChartPoissonManifold::standard_symplectic(2)?.pi_at(&p[..2])?;
        let q = [0.4, -1.1, 0.9];
        let whole = DiracSubmanifoldSpec::new(so3.clone(), vec![0, 1, 2], q.to_vec())?;
        let radial = DiracSubmanifoldSpec::new(so3.clone(), vec![2], vec![0.0, 0.0, 5.0])?;
        Ok((induced_bivector(&plane, &p)? - want)
            .amax()
            .max((induced_bivector(&whole, &q)? - so3.pi_at(&q)?).amax())
            .max(induced_bivector(&radial, &[0.0, 0.0, 5.0])?.amax()))
    })?;
    let mut rng = rec.rng(1);
    let a = random_skew(&mut rng, 3);
    let seed = rec.seed(2);
    rec.check("real-slice", "dirac-submanifold", 1e-12, || {
        let quad = ChartPoissonManifold::quadratic_complex(&a)?;
        let tau = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]));
        let spec = DiracSubmanifoldSpec::fixed_points(quad, tau)?;
        let mut worst = 0.0f64;
        for y in (0..10).map(|_| random_vec(&mut rng, 3)) {
            let pi_n = induced_bivector(&spec, &spec.embed(&y)?)?;
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((pi_n[(i, j)] - 0.25 * a[(i, j)] * y[i] * y[j]).abs());
                }
            }
        }
        Ok(worst)
    })?;
    rec.check("real-slice-jacobi", "jacobi", 1e-9, || {
        let quad = ChartPoissonManifold::quadratic_complex(&a)?;
        let tau = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]));
        let spec = DiracSubmanifoldSpec::fixed_points(quad, tau)?;
        jacobi_residual(&induced_manifold(&spec, &spec.embed(&[0.5, -0.3, 1.1])?)?, 20, seed)
    })?;
    rec.check("lie-dirac-closure", "dirac-submanifold", 1e-9, || {
        let gl2 = ChartPoissonManifold::lie_poisson(&LieAlgebra::gl2());
        let tau = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, -1.0, 1.0]));
        let spec = DiracSubmanifoldSpec::fixed_points(gl2, tau)?;
        let forms = vec![
            OneForm::constant(&[1.0, 0.0, 0.0, 0.0]),
            OneForm::new(vec![x(1).powi(2).add(&Expression::one()), x(2), x(1).mul(&x(3)), x(0)]),
            OneForm::new(vec![x(3), Expression::zero(), x(0).mul(&x(2)), x(1).powi(2).add(&x(0))]),
        ];
        let r1 = lie_dirac_closure_check(&spec, &forms, &spec.embed(&[0.8, -0.6])?)?.max();
        let sol = ChartPoissonManifold::lie_poisson(&LieAlgebra::solvable3());
        let tau = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, -1.0]));
        let spec = DiracSubmanifoldSpec::fixed_points(sol, tau)?;
        let forms = vec![
            OneForm::new(vec![x(0), x(1).powi(2), x(2)]),
            OneForm::new(vec![x(1), Expression::one(), x(0).mul(&x(2))]),
        ];
        Ok(r1.max(lie_dirac_closure_check(&spec, &forms, &spec.embed(&[0.7, -0.4])?)?.max()))
    })?;
    rec.check("lie-dirac-control", "dirac-submanifold", 0.0, || {
        // A coordinate plane of so(3)* is not closed under the bracket of its conormal forms.
        let plane = DiracSubmanifoldSpec::new(so3.clone(), vec![0, 1], vec![0.0, 0.0, 0.0])?;
        let forms = vec![OneForm::constant(&[1.0, 0.0, 0.0]), OneForm::constant(&[0.0, 1.0, 0.0])];
        Ok(mismatches([lie_dirac_closure_check(&plane, &forms, &[1.0, 0.5, 0.0])?.max() > 0.1]))
    })?;
    Ok(())
}

fn basic_forms(rec: &mut Recorder) -> Result<()> {
    let sys = InvariantSystem::c2_quotient();
    let act = sys.action().clone();
    let m = act.manifold().clone();
    let g = sys.generators().to_vec();
    let pts = m.random_points(20, rec.seed(1));
    let forms: Vec<OneForm> = g.iter().map(|s| OneForm::exact(s, 4)).collect();
    let sigma4 = c2_norm_invariant();
    let mut reports = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for f in [&g[2], &sigma4] {
            reports.push(basic_forms_check(&act, &forms[i], &forms[j], f, &pts)?);
        }
    }
    let max = |f: fn(&crate::reduction::BasicFormsReport) -> f64| reports.iter().map(f).fold(0.0, f64::max);
    rec.check("momentum", "basic-forms", 1e-8, || Ok(max(|r| r.momentum)))?;
    rec.check("invariance", "basic-forms", 1e-8, || Ok(max(|r| r.invariance)))?;
    rec.check("closure", "basic-forms", 1e-8, || Ok(max(|r| r.closure)))?;
    rec.check("leibniz", "basic-forms", 1e-8, || Ok(max(|r| r.leibniz)))?;
    rec.check("koszul-exact", "basic-forms", 1e-6, || {
        let mut worst = 0.0f64;
        let br = m.koszul_bracket(&forms[0], &forms[1])?;
        let h = 1e-6;
        for p in &pts {
            let lhs = br.eval(p, 0.0)?;
            for k in 0..4 {
                let (mut a, mut b) = (p.clone(), p.clone());
                a[k] += h;
                b[k] -= h;
                let d = (m.bracket(&g[0], &g[1], &a)? - m.bracket(&g[0], &g[1], &b)?) / (2.0 * h);
                worst = worst.max((lhs[k] - d).abs());
            }
        }
        Ok(worst)
    })?;
    Ok(())
}
