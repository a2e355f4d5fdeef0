//! Time-series containers and basic empirical statistics.

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense, contiguous sequence of finite observations with an integer time
/// index attached to its first element.
///
/// Alignment convention used throughout the crate: a forecast produced at
/// origin `t` occupies slot `t` of its series and is paired with outcome
/// `y_{t+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    start_index: i64,
}

impl Series {
    /// Construct a series, rejecting empty input and any NaN or infinity.
    pub fn new(values: Vec<f64>, start_index: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::insufficient("series must have length >= 1"));
        }
        check_finite(&values, "series")?;
        Ok(Series { values, start_index })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    /// Sub-series of `len` elements starting `offset` slots in.
    pub fn window(&self, offset: usize, len: usize) -> Result<Series> {
        if offset + len > self.values.len() || len == 0 {
            return Err(Error::insufficient(format!(
                "window [{offset}, {}) exceeds series of length {}",
                offset + len,
                self.values.len()
            )));
        }
        Ok(Series {
            values: self.values[offset..offset + len].to_vec(),
            start_index: self.start_index + offset as i64,
        })
    }
}

pub(crate) fn check_finite(values: &[f64], context: &'static str) -> Result<()> {
    for (index, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { context, index });
        }
    }
    Ok(())
}

/// Loss function tag. Only squared error is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Loss {
    SquaredError,
}

/// Out-of-sample loss differentials ΔL_{m+1}, ..., ΔL_{m+n} for a pair of
/// forecasts, together with the window metadata of the comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LossDiffSeries {
    values: Vec<f64>,
    m: usize,
    loss: Loss,
}

impl LossDiffSeries {
    pub fn new(values: Vec<f64>, m: usize, loss: Loss) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::insufficient("loss differential must be non-empty"));
        }
        check_finite(&values, "loss differential")?;
        Ok(LossDiffSeries { values, m, loss })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Evaluation length n.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Estimation window length m (metadata; taken from the forecast series'
    /// first origin).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn loss(&self) -> Loss {
        self.loss
    }
}

/// Squared-error loss differential (y − f1)² − (y − f2)², element-wise.
///
/// The caller aligns the inputs: element t of `f1`/`f2` forecasts element t
/// of `y`. The window length recorded on the result is the first origin of
/// `f1` (clamped at zero), which equals m under the crate-wide alignment
/// convention.
pub fn loss_diff_squared_error(y: &Series, f1: &Series, f2: &Series) -> Result<LossDiffSeries> {
    if y.len() != f1.len() {
        return Err(Error::Alignment {
            context: "outcome vs forecast 1",
            left: y.len(),
            right: f1.len(),
        });
    }
    if y.len() != f2.len() {
        return Err(Error::Alignment {
            context: "outcome vs forecast 2",
            left: y.len(),
            right: f2.len(),
        });
    }
    let values = y
        .values()
        .iter()
        .zip(f1.values())
        .zip(f2.values())
        .map(|((&y, &a), &b)| (y - a) * (y - a) - (y - b) * (y - b))
        .collect();
    LossDiffSeries::new(values, f1.start_index().max(0) as usize, Loss::SquaredError)
}

/// Biased (divisor n) sample autocovariance at lag `d`, centered at the
/// sample mean:
///
///   γ̂_d = n⁻¹ Σ_{t=1}^{n−d} (x_t − x̄)(x_{t+d} − x̄)
pub fn sample_autocovariance(x: &[f64], d: usize) -> Result<f64> {
    let n = x.len();
    if n == 0 {
        return Err(Error::insufficient("autocovariance of empty sample"));
    }
    if d >= n {
        return Err(Error::domain(format!(
            "lag {d} out of range for sample of length {n}"
        )));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut acc = 0.0;
    for t in 0..n - d {
        acc += (x[t] - mean) * (x[t + d] - mean);
    }
    Ok(acc / n as f64)
}

/// Order-statistic quantile with linear interpolation between the closest
/// ranks: the sorted sample is placed at probability points k/(N−1) for
/// k = 0..N−1 and evaluated at h = p(N−1).
pub fn empirical_quantile(sample: &[f64], p: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::insufficient("quantile of empty sample"));
    }
    if !(0.0..=1.0).contains(&p) || !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("quantile probability {p} not in (0, 1)")));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite sample"));
    let n = sorted.len();
    if n == 1 {
        return Ok(sorted[0]);
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return Ok(sorted[n - 1]);
    }
    Ok(sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(v: &[f64]) -> Series {
        Series::new(v.to_vec(), 1).unwrap()
    }

    #[test]
    fn rejects_nan_and_empty() {
        assert!(Series::new(vec![], 0).is_err());
        assert!(Series::new(vec![1.0, f64::NAN], 0).is_err());
        assert!(Series::new(vec![f64::INFINITY], 0).is_err());
    }

    #[test]
    fn loss_diff_examples() {
        // perfect forecast f1 vs constant zero forecast
        let dl = loss_diff_squared_error(&s(&[1.0, 1.0]), &s(&[1.0, 1.0]), &s(&[0.0, 0.0])).unwrap();
        assert_eq!(dl.values(), &[-1.0, -1.0]);

        // identical forecasts
        let dl = loss_diff_squared_error(&s(&[0.3, -2.0]), &s(&[1.0, 1.0]), &s(&[1.0, 1.0])).unwrap();
        assert_eq!(dl.values(), &[0.0, 0.0]);

        // hand arithmetic: (2-1)^2 - (2-4)^2 = -3
        let dl = loss_diff_squared_error(&s(&[2.0]), &s(&[1.0]), &s(&[4.0])).unwrap();
        assert_eq!(dl.values(), &[-3.0]);
    }

    #[test]
    fn loss_diff_length_mismatch() {
        let err = loss_diff_squared_error(&s(&[1.0, 2.0]), &s(&[1.0]), &s(&[1.0, 2.0]));
        assert!(matches!(err, Err(Error::Alignment { .. })));
    }

    #[test]
    fn autocovariance_examples() {
        let c = [3.0, 3.0, 3.0, 3.0];
        assert_eq!(sample_autocovariance(&c, 0).unwrap(), 0.0);

        let x = [1.0, -1.0, 1.0, -1.0];
        assert_abs_diff_eq!(sample_autocovariance(&x, 0).unwrap(), 1.0);
        assert_abs_diff_eq!(sample_autocovariance(&x, 1).unwrap(), -0.75);

        assert!(sample_autocovariance(&x, 4).is_err());
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(empirical_quantile(&[5.0], 0.3).unwrap(), 5.0);
        assert_eq!(empirical_quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5).unwrap(), 3.0);
        assert_abs_diff_eq!(empirical_quantile(&[0.0, 10.0], 0.95).unwrap(), 9.5);
        assert!(empirical_quantile(&[], 0.5).is_err());
        assert!(empirical_quantile(&[1.0], 0.0).is_err());
    }

    #[test]
    fn window_slices_and_reindexes() {
        let x = Series::new(vec![1.0, 2.0, 3.0, 4.0], 10).unwrap();
        let w = x.window(2, 2).unwrap();
        assert_eq!(w.values(), &[3.0, 4.0]);
        assert_eq!(w.start_index(), 12);
        assert!(x.window(3, 2).is_err());
    }
}
