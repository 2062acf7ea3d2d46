//! JSON scenario configuration.
//!
//! Expressions are prefix-notation strings (see [`crate::numerics::parse_expression`]):
//! coordinates `x0, x1, …`, time `t`, and `(op arg …)` applications.
//!
//! ```json
//! {
//!   "seed": 42,
//!   "grid": { "steps": 200 },
//!   "action": { "type": "c2-circle" },
//!   "momentum_map": ["(* 0.5 (- (+ (^ x2 2) (^ x3 2)) (+ (^ x0 2) (^ x1 2))))"],
//!   "paths": [
//!     { "type": "covector", "x0": [1, 0.5, -0.3, 0.8], "covector": ["1", "t", "0", "x0"] },
//!     { "type": "waypoints", "covectors": [[0, 1, 0, 0], [1, 0, 0, 0]] }
//!   ]
//! }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::actions::{LieAlgebra, MorphismSign, PoissonAction};
use crate::numerics::{parse_expression, Expression, GridCurve};
use crate::paths::{from_leaf_path, integrate_base, integrate_waypoints, CotangentPath};
use crate::poisson::{ChartPoissonManifold, OneForm, VectorFieldExpr};
use crate::reduction::InvariantSystem;
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 42;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSizes {
    /// Time steps per path.
    #[serde(default = "GridSizes::default_steps")]
    pub steps: usize,
    /// Slices per homotopy family.
    #[serde(default = "GridSizes::default_steps")]
    pub eps_steps: usize,
    /// Random paths or path pairs per check.
    #[serde(default = "GridSizes::default_samples")]
    pub samples: usize,
    /// Random chart points for pointwise identities.
    #[serde(default = "GridSizes::default_points")]
    pub points: usize,
}

impl GridSizes {
    fn default_steps() -> usize {
        200
    }

    fn default_samples() -> usize {
        20
    }

    fn default_points() -> usize {
        100
    }
}

impl Default for GridSizes {
    fn default() -> Self {
        GridSizes { steps: 200, eps_steps: 200, samples: 20, points: 100 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgebraSpec {
    So3,
    Heisenberg,
    Gl2,
    Solvable3,
    Abelian { dim: usize },
    /// Nonzero brackets `[i, j, k, c^k_ij]` with `i < j`.
    Structure { dim: usize, brackets: Vec<(usize, usize, usize, f64)> },
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<LieAlgebra> {
        Ok(match self {
            AlgebraSpec::So3 => LieAlgebra::so3(),
            AlgebraSpec::Heisenberg => LieAlgebra::heisenberg(),
            AlgebraSpec::Gl2 => LieAlgebra::gl2(),
            AlgebraSpec::Solvable3 => LieAlgebra::solvable3(),
            AlgebraSpec::Abelian { dim } => LieAlgebra::abelian(*dim),
            AlgebraSpec::Structure { dim, brackets } => LieAlgebra::new("custom", *dim, brackets)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ManifoldSpec {
    Zero { dim: usize },
    Symplectic { dim: usize },
    LiePoisson { algebra: AlgebraSpec },
    Affine { algebra: AlgebraSpec, c: Vec<Vec<f64>> },
    Quadratic { a: Vec<Vec<f64>>, mixing: Option<f64> },
    Torus,
    C2,
    /// Full bivector matrix of expressions.
    Matrix { entries: Vec<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ActionSpec {
    Coadjoint { algebra: AlgebraSpec },
    C2Circle,
    TorusOnQuadratic { a: Vec<Vec<f64>> },
    TorusShift,
    CotangentRotation,
    Trivial,
    /// Generator fields on the configured manifold, one per basis element.
    Generators { algebra: AlgebraSpec, fields: Vec<Vec<String>>, sign: MorphismSign },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PathSpec {
    /// Covector field `a(x, t)`; the base solves `ẋ = ♯a`. Without `x0` the
    /// path starts where the previous one ended.
    Covector { x0: Option<Vec<f64>>, covector: Vec<String>, steps: Option<usize> },
    /// Covectors at equally spaced times, blended smoothly in between.
    Waypoints { x0: Option<Vec<f64>>, covectors: Vec<Vec<f64>>, steps: Option<usize> },
    /// A base curve `γ(t)` inside a symplectic region; `a = Π⁻¹ γ̇`.
    LeafCurve { curve: Vec<String>, steps: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantSpec {
    pub generators: Vec<String>,
    /// `claimed[i][j]` in the quotient variables `x0, …, x{k-1}`.
    pub claimed: Vec<Vec<String>>,
    /// Preimage points; random chart points when absent.
    pub preimages: Option<Vec<Vec<f64>>>,
}

/// Everything a scenario run can be configured with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Builtin scenario to run; the custom sections below are checked in addition.
    pub scenario: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridSizes,
    /// Per-check tolerance overrides, keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub manifold: Option<ManifoldSpec>,
    pub action: Option<ActionSpec>,
    pub momentum_map: Option<Vec<String>>,
    #[serde(default)]
    pub paths: Vec<PathSpec>,
    pub invariants: Option<InvariantSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: None,
            seed: DEFAULT_SEED,
            grid: GridSizes::default(),
            tolerances: BTreeMap::new(),
            manifold: None,
            action: None,
            momentum_map: None,
            paths: Vec::new(),
            invariants: None,
            output: OutputSpec::default(),
        }
    }
}

impl ScenarioConfig {
    /// Parses JSON, reporting the line, column and field path of any error.
    pub fn from_json_str(src: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(src);
        serde_path_to_error::deserialize(de).map_err(|e| {
            // serde_json's message already ends in "at line L column C".
            Error::Config(format!("field `{}`: {}", e.path(), e.inner()))
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)?;
        Self::from_json_str(&src).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }

    /// True when any custom section is present.
    pub fn has_custom_sections(&self) -> bool {
        self.manifold.is_some()
            || self.action.is_some()
            || self.momentum_map.is_some()
            || !self.paths.is_empty()
            || self.invariants.is_some()
    }

    /// Builds the custom sections, checking that dimensions agree.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        let from_manifold = self.manifold.as_ref().map(|m| build_manifold(m, "manifold")).transpose()?;
        let action = self.action.as_ref().map(|a| build_action(a, from_manifold.as_ref())).transpose()?;
        let manifold = match (&from_manifold, &action) {
            (Some(m), Some(a)) if m != a.manifold() => {
                return Err(Error::Config(format!(
                    "field `action`: builtin action lives on `{}`, not on the configured manifold `{}`",
                    a.manifold().name(),
                    m.name()
                )))
            }
            (_, Some(a)) => a.manifold().clone(),
            (Some(m), None) => m.clone(),
            (None, None) => {
                if self.has_custom_sections() {
                    return Err(Error::Config("a manifold or an action is required for paths and invariants".into()));
                }
                return Ok(ResolvedConfig::default());
            }
        };
        let momentum_map = match &self.momentum_map {
            Some(list) => {
                let act = action
                    .as_ref()
                    .ok_or_else(|| Error::Config("field `momentum_map`: requires an action".into()))?;
                if list.len() != act.algebra().dim() {
                    return Err(Error::Config(format!(
                        "field `momentum_map`: {} components for a {}-dimensional algebra",
                        list.len(),
                        act.algebra().dim()
                    )));
                }
                Some(parse_list(list, "momentum_map", manifold.dim())?)
            }
            None => None,
        };
        let mut paths: Vec<CotangentPath> = Vec::new();
        for (i, spec) in self.paths.iter().enumerate() {
            let field = format!("paths[{i}]");
            let prev = paths.last().map(|p| p.end().to_vec());
            let p = build_path(spec, &manifold, prev, self.grid.steps, &field)?;
            paths.push(p);
        }
        let invariants = self
            .invariants
            .as_ref()
            .map(|s| {
                let act = action
                    .clone()
                    .unwrap_or_else(|| PoissonAction::trivial(manifold.clone()));
                build_invariants(s, act, self.seed, self.grid.samples)
            })
            .transpose()?;
        Ok(ResolvedConfig { manifold: Some(manifold), action, momentum_map, paths, invariants })
    }
}

/// Custom config sections turned into library objects.
#[derive(Debug, Clone, Default)]
pub struct ResolvedConfig {
    pub manifold: Option<ChartPoissonManifold>,
    pub action: Option<PoissonAction>,
    pub momentum_map: Option<Vec<Expression>>,
    pub paths: Vec<CotangentPath>,
    pub invariants: Option<(InvariantSystem, Vec<Vec<f64>>)>,
}

fn parse_field(src: &str, field: &str) -> Result<Expression> {
    parse_expression(src).map_err(|e| Error::Config(format!("field `{field}`: {e}")))
}

fn parse_list(list: &[String], field: &str, dim: usize) -> Result<Vec<Expression>> {
    list.iter()
        .enumerate()
        .map(|(i, s)| {
            let f = format!("{field}[{i}]");
            let e = parse_field(s, &f)?;
            if e.arity() > dim {
                return Err(Error::Config(format!("field `{f}`: uses x{} on a {dim}-dimensional chart", e.arity() - 1)));
            }
            Ok(e)
        })
        .collect()
}

fn matrix(rows: &[Vec<f64>], field: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!("field `{field}`: expected a nonempty square matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn in_field<T>(r: Result<T>, field: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config(m) => Error::Config(m),
        other => Error::Config(format!("field `{field}`: {other}")),
    })
}

pub fn build_manifold(spec: &ManifoldSpec, field: &str) -> Result<ChartPoissonManifold> {
    let built = match spec {
        ManifoldSpec::Zero { dim } => Ok(ChartPoissonManifold::zero(*dim)),
        ManifoldSpec::Symplectic { dim } => ChartPoissonManifold::standard_symplectic(*dim),
        ManifoldSpec::LiePoisson { algebra } => algebra.build().map(|a| ChartPoissonManifold::lie_poisson(&a)),
        ManifoldSpec::Affine { algebra, c } => {
            let alg = in_field(algebra.build(), &format!("{field}.algebra"))?;
            let c = matrix(c, &format!("{field}.c"))?;
            let r = crate::groupoid::cocycle_condition_residual(&alg, &c);
            if r > 1e-12 {
                return Err(Error::Config(format!("field `{field}.c`: not a Lie algebra cocycle (residual {r:e})")));
            }
            ChartPoissonManifold::affine(&alg, &c)
        }
        ManifoldSpec::Quadratic { a, mixing } => {
            let a = matrix(a, &format!("{field}.a"))?;
            ChartPoissonManifold::quadratic_complex_mixed(&a, mixing.unwrap_or(-0.5))
        }
        ManifoldSpec::Torus => Ok(ChartPoissonManifold::torus_symplectic()),
        ManifoldSpec::C2 => Ok(ChartPoissonManifold::c2_symplectic()),
        ManifoldSpec::Matrix { entries } => {
            let dim = entries.len();
            let parsed = entries
                .iter()
                .enumerate()
                .map(|(i, row)| parse_list(row, &format!("{field}.entries[{i}]"), dim))
                .collect::<Result<Vec<_>>>()?;
            ChartPoissonManifold::from_matrix("custom", parsed)
        }
    };
    in_field(built, field)
}

pub fn build_action(spec: &ActionSpec, manifold: Option<&ChartPoissonManifold>) -> Result<PoissonAction> {
    let built = match spec {
        ActionSpec::Coadjoint { algebra } => algebra.build().map(|a| PoissonAction::coadjoint(&a)),
        ActionSpec::C2Circle => Ok(PoissonAction::c2_circle()),
        ActionSpec::TorusOnQuadratic { a } => PoissonAction::torus_on_quadratic(&matrix(a, "action.a")?),
        ActionSpec::TorusShift => Ok(PoissonAction::torus_shift()),
        ActionSpec::CotangentRotation => Ok(PoissonAction::cotangent_rotation()),
        ActionSpec::Trivial => {
            let m = manifold.ok_or_else(|| Error::Config("field `action`: `trivial` needs a manifold".into()))?;
            Ok(PoissonAction::trivial(m.clone()))
        }
        ActionSpec::Generators { algebra, fields, sign } => {
            let m = manifold.ok_or_else(|| Error::Config("field `action`: `generators` needs a manifold".into()))?;
            let alg = in_field(algebra.build(), "action.algebra")?;
            let gens = fields
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let field = format!("action.fields[{i}]");
                    if f.len() != m.dim() {
                        return Err(Error::Config(format!(
                            "field `{field}`: {} components on a {}-dimensional chart",
                            f.len(),
                            m.dim()
                        )));
                    }
                    Ok(VectorFieldExpr::new(parse_list(f, &field, m.dim())?))
                })
                .collect::<Result<Vec<_>>>()?;
            PoissonAction::new("custom", m.clone(), alg, gens, *sign)
        }
    };
    in_field(built, "action")
}

fn build_path(
    spec: &PathSpec,
    m: &ChartPoissonManifold,
    previous_end: Option<Vec<f64>>,
    default_steps: usize,
    field: &str,
) -> Result<CotangentPath> {
    let d = m.dim();
    let start = |x0: &Option<Vec<f64>>| -> Result<Vec<f64>> {
        let x = x0
            .clone()
            .or(previous_end.clone())
            .ok_or_else(|| Error::Config(format!("field `{field}.x0`: required for the first path")))?;
        if x.len() != d {
            return Err(Error::Config(format!("field `{field}.x0`: {} coordinates on a {d}-dimensional chart", x.len())));
        }
        Ok(x)
    };
    let built = match spec {
        PathSpec::Covector { x0, covector, steps } => {
            if covector.len() != d {
                return Err(Error::Config(format!("field `{field}.covector`: expected {d} components")));
            }
            let form = OneForm::new(parse_list(covector, &format!("{field}.covector"), d)?);
            integrate_base(m, &form, &start(x0)?, steps.unwrap_or(default_steps))
        }
        PathSpec::Waypoints { x0, covectors, steps } => {
            integrate_waypoints(m, covectors, &start(x0)?, steps.unwrap_or(default_steps))
        }
        PathSpec::LeafCurve { curve, steps } => {
            if curve.len() != d {
                return Err(Error::Config(format!("field `{field}.curve`: expected {d} components")));
            }
            let exprs = parse_list(curve, &format!("{field}.curve"), 0)?;
            let n = steps.unwrap_or(default_steps);
            let mut values = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let t = i as f64 / n as f64;
                values.push(exprs.iter().map(|e| e.eval_at(&[], t)).collect::<Result<Vec<f64>, _>>()?);
            }
            from_leaf_path(m, &GridCurve::new(values)?)
        }
    };
    in_field(built, field)
}

fn build_invariants(
    spec: &InvariantSpec,
    action: PoissonAction,
    seed: u64,
    samples: usize,
) -> Result<(InvariantSystem, Vec<Vec<f64>>)> {
    let d = action.manifold().dim();
    let k = spec.generators.len();
    let gens = parse_list(&spec.generators, "invariants.generators", d)?;
    if spec.claimed.len() != k {
        return Err(Error::Config(format!("field `invariants.claimed`: expected {k} rows")));
    }
    let claimed = spec
        .claimed
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let field = format!("invariants.claimed[{i}]");
            if row.len() != k {
                return Err(Error::Config(format!("field `{field}`: expected {k} entries")));
            }
            parse_list(row, &field, k)
        })
        .collect::<Result<Vec<_>>>()?;
    let pre = match &spec.preimages {
        Some(p) => {
            if let Some(bad) = p.iter().position(|x| x.len() != d) {
                return Err(Error::Config(format!("field `invariants.preimages[{bad}]`: expected {d} coordinates")));
            }
            p.clone()
        }
        None => action.manifold().random_points(samples, seed),
    };
    let sys = in_field(InvariantSystem::new("custom", action, gens, claimed), "invariants")?;
    Ok((sys, pre))
}
