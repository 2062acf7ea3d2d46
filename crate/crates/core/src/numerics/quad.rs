use crate::Error;

/// Composite Simpson rule for samples on a uniform grid of `[0, 1]`.
pub fn simpson(samples: &[f64]) -> Result<f64, Error> {
    simpson_on(samples, 1.0)
}

/// Composite Simpson rule over an interval of the given length.
pub fn simpson_on(samples: &[f64], length: f64) -> Result<f64, Error> {
    let m = samples.len();
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::Grid(format!(
            "simpson needs an odd number (>= 3) of samples, i.e. an even number of subintervals; got {m}"
        )));
    }
    let h = length / (m - 1) as f64;
    let mut acc = samples[0] + samples[m - 1];
    for (i, v) in samples.iter().enumerate().take(m - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * h / 3.0)
}
