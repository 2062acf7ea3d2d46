use super::{EvalError, GridCurve};
use crate::Error;

/// Classical fixed-step RK4 for `dy/dt = rhs(t, y)` on `[0, 1]`.
///
/// `rhs` is called at `t_i`, `t_i + h/2` and `t_i + h`. Errors are reported
/// with the index of the step in which they occurred.
pub fn rk4_solve<F>(mut rhs: F, y0: &[f64], steps: usize) -> Result<GridCurve, Error>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>, EvalError>,
{
    if steps < 2 {
        return Err(Error::Grid(format!("rk4 needs at least 2 steps, got {steps}")));
    }
    let h = 1.0 / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0.to_vec();
    out.push(y.clone());
    let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for i in 0..steps {
        let t = i as f64 * h;
        let at_step = |source: EvalError| Error::Integration { step: i, time: t, source };
        let k1 = rhs(t, &y).map_err(at_step)?;
        let k2 = rhs(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h)).map_err(at_step)?;
        let k3 = rhs(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h)).map_err(at_step)?;
        let k4 = rhs(t + h, &axpy(&y, &k3, h)).map_err(at_step)?;
        for (j, yj) in y.iter_mut().enumerate() {
            *yj += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(at_step(EvalError::NonFinite));
        }
        out.push(y.clone());
    }
    GridCurve::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_is_constant() {
        let c = rk4_solve(|_, y| Ok(vec![0.0; y.len()]), &[1.0, -2.0], 10).unwrap();
        assert!(c.values().iter().all(|v| v == &vec![1.0, -2.0]));
    }

    #[test]
    fn linear_flow_reaches_one() {
        let c = rk4_solve(|_, _| Ok(vec![1.0]), &[0.0], 100).unwrap();
        assert!((c.last()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_growth() {
        let c = rk4_solve(|_, y| Ok(vec![y[0]]), &[1.0], 100).unwrap();
        assert!((c.last()[0] - std::f64::consts::E).abs() < 1e-8);
    }

    #[test]
    fn convergence_order_near_four() {
        // y' = -2 t y, y(0) = 1, y(1) = e^{-1}
        let err = |n| {
            let c = rk4_solve(|t, y| Ok(vec![-2.0 * t * y[0]]), &[1.0], n).unwrap();
            (c.last()[0] - (-1.0f64).exp()).abs()
        };
        let order = (err(20) / err(40)).log2();
        assert!(order >= 3.8, "observed order {order}");
    }

    #[test]
    fn errors_carry_step_index() {
        let r = rk4_solve(
            |t, _| if t > 0.52 { Err(EvalError::NonFinite) } else { Ok(vec![1.0]) },
            &[0.0],
            10,
        );
        match r {
            Err(Error::Integration { step, .. }) => assert_eq!(step, 5),
            other => panic!("unexpected {other:?}"),
        }
    }
}
