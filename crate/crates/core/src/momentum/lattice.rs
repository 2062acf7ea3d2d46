use super::MomentumValue;

/// Result of [`lattice_basis`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LatticeReport {
    /// Generators of the subgroup spanned by the samples.
    Discrete { basis: Vec<Vec<f64>> },
    /// The samples generate a subgroup whose closure is not discrete (up to tolerance).
    NonDiscrete { reason: String },
}

const MAX_ROUNDS: usize = 10_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let m = nalgebra::DMatrix::from_fn(vectors[0].len(), vectors.len(), |i, j| vectors[j][i]);
    crate::poisson::numerical_rank(&m, tol.max(1e-12))
}

/// Integer-lattice basis of the group generated by `samples`, by repeated
/// pairwise size reduction (Euclid's algorithm in one dimension). Vectors
/// shorter than `tol` are dropped. Integer coefficients growing past
/// `1/√tol` signal a non-discrete closure, e.g. for `{1, √2}`.
pub fn lattice_basis(samples: &[MomentumValue], tol: f64) -> LatticeReport {
    let mut vecs: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| s.components().to_vec())
        .filter(|v| dot(v, v).sqrt() > tol)
        .collect();
    let n = vecs.len();
    // coeffs[i] expresses vecs[i] in terms of the samples that survived the filter.
    let mut coeffs: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let bound = (1.0 / tol.sqrt()).max(10.0) as i64;
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        let mut order: Vec<usize> = (0..vecs.len()).collect();
        order.sort_by(|&a, &b| dot(&vecs[a], &vecs[a]).total_cmp(&dot(&vecs[b], &vecs[b])));
        'pairs: for (ai, &i) in order.iter().enumerate() {
            for &j in &order[ai + 1..] {
                let k = (dot(&vecs[j], &vecs[i]) / dot(&vecs[i], &vecs[i])).round();
                if k != 0.0 {
                    let vi = vecs[i].clone();
                    for (x, y) in vecs[j].iter_mut().zip(&vi) {
                        *x -= k * y;
                    }
                    let ci = coeffs[i].clone();
                    for (x, y) in coeffs[j].iter_mut().zip(&ci) {
                        *x -= k as i64 * y;
                    }
                    if coeffs[j].iter().any(|c| c.abs() > bound) {
                        return LatticeReport::NonDiscrete {
                            reason: format!("integer coefficients exceed {bound} during reduction"),
                        };
                    }
                    changed = true;
                    break 'pairs;
                }
            }
        }
        let keep: Vec<bool> = vecs.iter().map(|v| dot(v, v).sqrt() > tol).collect();
        let mut it = keep.iter();
        vecs.retain(|_| *it.next().unwrap());
        let mut it = keep.iter();
        coeffs.retain(|_| *it.next().unwrap());
        if !changed {
            break;
        }
    }
    if rank(&vecs, tol) < vecs.len() {
        return LatticeReport::NonDiscrete {
            reason: format!("{} reduced vectors remain linearly dependent", vecs.len()),
        };
    }
    for v in &mut vecs {
        if v.iter().find(|x| x.abs() > tol).is_some_and(|x| *x < 0.0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    vecs.sort_by(|a, b| dot(a, a).total_cmp(&dot(b, b)));
    LatticeReport::Discrete { basis: vecs }
}
