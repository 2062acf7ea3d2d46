use crate::actions::PoissonAction;
use crate::numerics::{differentiate, Expression};
use crate::poisson::OneForm;
use crate::{Error, Result};

/// Threshold on `|j(α)|` for a form to count as basic.
pub const BASIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BasicFormsReport {
    /// Max `|j(α)|`, `|j(β)|`.
    pub momentum: f64,
    /// Max `|L_{X_ξ} α|`, `|L_{X_ξ} β|` over basis generators.
    pub invariance: f64,
    /// Max `|j([α, β])|`.
    pub closure: f64,
    /// Max `|[α, fβ] − f[α, β] + ♯α(f) β|` componentwise.
    pub leibniz: f64,
}

/// Checks that `α, β` are basic at the samples and that their bracket is basic
/// and obeys the Leibniz rule against the invariant function `f`.
pub fn basic_forms_check(
    action: &PoissonAction,
    alpha: &OneForm,
    beta: &OneForm,
    f: &Expression,
    samples: &[Vec<f64>],
) -> Result<BasicFormsReport> {
    let m = action.manifold();
    let bracket = m.koszul_bracket(alpha, beta)?;
    let scaled = m.koszul_bracket(alpha, &beta.scale(f))?;
    let lie: Vec<OneForm> = action
        .generators()
        .iter()
        .flat_map(|g| [g.lie_derivative_form(alpha), g.lie_derivative_form(beta)])
        .collect();
    let mut report = BasicFormsReport { momentum: 0.0, invariance: 0.0, closure: 0.0, leibniz: 0.0 };
    for x in samples {
        let a = alpha.eval(x, 0.0)?;
        let b = beta.eval(x, 0.0)?;
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |w, c| w.max(c.abs()));
        report.momentum = report.momentum.max(sup(action.cotangent_momentum_j(x, &a)?.components()));
        report.momentum = report.momentum.max(sup(action.cotangent_momentum_j(x, &b)?.components()));
        if report.momentum > BASIC_TOL {
            return Err(Error::Precondition(format!(
                "forms are not basic: |j| = {:e} at {x:?}",
                report.momentum
            )));
        }
        for l in &lie {
            report.invariance = report.invariance.max(sup(&l.eval(x, 0.0)?));
        }
        let br = bracket.eval(x, 0.0)?;
        report.closure = report.closure.max(sup(action.cotangent_momentum_j(x, &br)?.components()));
        let fx = f.eval(x)?;
        let df = differentiate(f, x)?;
        let sharp_a = m.sharp_covector(x, &a)?;
        let anchor_f: f64 = sharp_a.iter().zip(&df).map(|(s, d)| s * d).sum();
        let lhs = scaled.eval(x, 0.0)?;
        for k in 0..lhs.len() {
            let r = lhs[k] - fx * br[k] + anchor_f * b[k];
            report.leibniz = report.leibniz.max(r.abs());
        }
    }
    Ok(report)
}
