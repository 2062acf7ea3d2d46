/// Interpolation rule between grid samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    PiecewiseLinear,
    Cubic,
}

/// Vector-valued samples on the uniform grid `t_i = i / N` of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCurve {
    values: Vec<Vec<f64>>,
    pub interpolation: Interpolation,
}

impl GridCurve {
    /// `values[i]` is the sample at `t = i / (values.len() - 1)`; needs `N ≥ 2` steps.
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self, crate::Error> {
        if values.len() < 3 {
            return Err(crate::Error::Grid(format!("need at least 2 steps, got {}", values.len().saturating_sub(1))));
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(crate::Error::Grid("samples of unequal length".into()));
        }
        Ok(GridCurve { values, interpolation: Interpolation::PiecewiseLinear })
    }

    pub fn from_fn(steps: usize, dim: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self, crate::Error> {
        let g = Self::new((0..=steps).map(|i| f(i as f64 / steps as f64)).collect())?;
        if g.dim() != dim {
            return Err(crate::Error::Grid(format!("expected dimension {dim}, got {}", g.dim())));
        }
        Ok(g)
    }

    pub fn with_interpolation(mut self, rule: Interpolation) -> Self {
        self.interpolation = rule;
        self
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.steps() as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 / self.steps() as f64
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn first(&self) -> &[f64] {
        &self.values[0]
    }

    pub fn last(&self) -> &[f64] {
        &self.values[self.steps()]
    }

    pub fn into_values(self) -> Vec<Vec<f64>> {
        self.values
    }

    /// Samples at arbitrary `t ∈ [0, 1]` with the curve's interpolation rule.
    pub fn sample(&self, t: f64) -> Vec<f64> {
        let n = self.steps();
        let s = (t.clamp(0.0, 1.0) * n as f64).min(n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let u = s - i as f64;
        match self.interpolation {
            Interpolation::PiecewiseLinear => {
                self.values[i].iter().zip(&self.values[i + 1]).map(|(a, b)| a + u * (b - a)).collect()
            }
            Interpolation::Cubic => {
                // Catmull-Rom with one-sided clamping at the ends.
                let p0 = &self.values[i.saturating_sub(1)];
                let p1 = &self.values[i];
                let p2 = &self.values[i + 1];
                let p3 = &self.values[(i + 2).min(n)];
                (0..self.dim())
                    .map(|k| {
                        let (a, b, c, d) = (p0[k], p1[k], p2[k], p3[k]);
                        let u2 = u * u;
                        let u3 = u2 * u;
                        0.5 * (2.0 * b
                            + (-a + c) * u
                            + (2.0 * a - 5.0 * b + 4.0 * c - d) * u2
                            + (-a + 3.0 * b - 3.0 * c + d) * u3)
                    })
                    .collect()
            }
        }
    }

    /// Central-difference velocity at node `i` (one-sided second order at the ends).
    pub fn velocity(&self, i: usize) -> Vec<f64> {
        let n = self.steps();
        let h = self.dt();
        let v = &self.values;
        (0..self.dim())
            .map(|k| {
                if i == 0 {
                    (-3.0 * v[0][k] + 4.0 * v[1][k] - v[2][k]) / (2.0 * h)
                } else if i == n {
                    (3.0 * v[n][k] - 4.0 * v[n - 1][k] + v[n - 2][k]) / (2.0 * h)
                } else {
                    (v[i + 1][k] - v[i - 1][k]) / (2.0 * h)
                }
            })
            .collect()
    }
}
