//! Checks driven by the custom sections of a [`ScenarioConfig`].

use super::config::{ResolvedConfig, ScenarioConfig};
use super::report::{PlotSeries, ReportRecord};
use super::scenarios::{endpoint_identity_residual, jacobi_residual, Recorder};
use crate::momentum::{check_cocycle, check_exactness_all};
use crate::numerics::Expression;
use crate::paths::{cotangent_tolerance, integrand_samples, validate_cotangent};
use crate::reduction::{quotient_bracket_check, QuotientSample};
use crate::Result;

const NAME: &str = "custom";

pub fn run_custom(cfg: &ScenarioConfig) -> Result<Vec<ReportRecord>> {
    let resolved = cfg.resolve()?;
    let mut rec = Recorder::new(NAME, cfg);
    let Some(m) = resolved.manifold.clone() else {
        return Ok(Vec::new());
    };
    let seed = rec.seed(1);
    let points = m.random_points(cfg.grid.points, seed);
    rec.check("jacobi", "jacobi", 1e-9, || jacobi_residual(&m, cfg.grid.points, seed))?;
    if let Some(act) = &resolved.action {
        rec.check("poisson-action", "poisson-action", 1e-9, || act.check_poisson_action(&points))?;
        rec.check("morphism", "poisson-action", 1e-9, || act.check_morphism(&points))?;
    }
    let paths = &resolved.paths;
    for (i, a) in paths.iter().enumerate() {
        rec.check(&format!("path-{i}-cotangent"), "cotangent-path", cotangent_tolerance(a.steps()), || validate_cotangent(a))?;
    }
    if !paths.is_empty() {
        let hams: Vec<Expression> = (0..m.dim()).map(Expression::coord).collect();
        rec.check("endpoint-identity", "endpoint-identity", 1e-8, || endpoint_identity_residual(&m, &hams, paths))?;
    }
    if let Some(act) = &resolved.action {
        let chained: Vec<usize> = (1..paths.len())
            .filter(|&i| {
                paths[i - 1].steps() == paths[i].steps()
                    && m.displacement(paths[i - 1].end(), paths[i].start()).iter().all(|d| d.abs() <= 1e-9)
            })
            .collect();
        if !chained.is_empty() {
            rec.check("momentum-cocycle", "momentum-cocycle", 1e-6, || {
                chained.iter().try_fold(0.0f64, |w, &i| Ok(w.max(check_cocycle(act, &paths[i - 1], &paths[i])?)))
            })?;
        }
        if let (Some(mu), false) = (&resolved.momentum_map, paths.is_empty()) {
            rec.check("exactness", "exactness", 1e-6, || Ok(check_exactness_all(act, mu, paths)?.residual))?;
        }
    }
    if let Some((sys, pre)) = &resolved.invariants {
        rec.check("invariance", "quotient", 1e-9, || sys.invariance_residual(pre))?;
        rec.check("quotient-bracket", "quotient", 1e-9, || {
            let samples = pre
                .iter()
                .map(|p| Ok(QuotientSample { point: sys.project(p)?, preimage: p.clone() }))
                .collect::<Result<Vec<_>>>()?;
            Ok(quotient_bracket_check(sys, &samples)?.max_residual)
        })?;
    }
    Ok(rec.records)
}

/// Integrand samples `⟨a(t), X(p(a(t)))⟩` along every configured path, for each
/// action generator (or each coordinate Hamiltonian field without an action).
pub fn plot_series(resolved: &ResolvedConfig) -> Result<Vec<PlotSeries>> {
    let Some(m) = &resolved.manifold else {
        return Ok(Vec::new());
    };
    let fields: Vec<(String, crate::poisson::VectorFieldExpr)> = match &resolved.action {
        Some(act) => act.generators().iter().enumerate().map(|(k, g)| (format!("X_e{k}"), g.clone())).collect(),
        None => (0..m.dim()).map(|i| (format!("X_x{i}"), m.hamiltonian_vector_field(&Expression::coord(i)))).collect(),
    };
    let mut out = Vec::new();
    for (p, a) in resolved.paths.iter().enumerate() {
        let t: Vec<f64> = (0..=a.steps()).map(|i| a.base().time(i)).collect();
        for (name, f) in &fields {
            out.push(PlotSeries { path: p, series: name.clone(), t: t.clone(), value: integrand_samples(f, a)? });
        }
    }
    Ok(out)
}
