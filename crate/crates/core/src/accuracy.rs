//! Tests of equal predictive accuracy on a loss-differential series.

use serde::Serialize;

use crate::dist::{normal_cdf, student_t_cdf};
use crate::error::{Error, Result};
use crate::series::{sample_autocovariance, LossDiffSeries};

/// Reference distribution of a test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "df", rename_all = "snake_case")]
pub enum Reference {
    StdNormal,
    StudentT(u32),
}

/// Nuisance choices recorded alongside a test outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Nuisance {
    pub nw_lags: Option<usize>,
    pub k_blocks: Option<usize>,
}

/// Outcome of one equal-accuracy test. All tests are two-sided.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub reference: Reference,
    pub p_value: f64,
    pub nuisance: Nuisance,
}

impl TestResult {
    /// Two-sided decision at level `alpha`: reject iff p < α.
    pub fn reject_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

fn two_sided_normal_p(statistic: f64) -> f64 {
    2.0 * (1.0 - normal_cdf(statistic.abs()))
}

/// Sum-over-root-of-sum-of-squares statistic
///
///   J = Σ ΔL_t / √(Σ ΔL_t²)
///
/// referred to the standard normal. The denominator deliberately skips any
/// serial-correlation correction, which is only a valid scaling when the
/// loss differentials are a martingale difference sequence.
pub fn gw_test(dl: &LossDiffSeries) -> Result<TestResult> {
    let x = dl.values();
    if x.len() < 2 {
        return Err(Error::insufficient("test needs n >= 2 loss differentials"));
    }
    let sum: f64 = x.iter().sum();
    let sumsq: f64 = x.iter().map(|v| v * v).sum();
    if sumsq == 0.0 {
        return Err(Error::degenerate(
            "all loss differentials are zero (the forecasts coincide on the sample)",
        ));
    }
    let statistic = sum / sumsq.sqrt();
    Ok(TestResult {
        statistic,
        reference: Reference::StdNormal,
        p_value: two_sided_normal_p(statistic),
        nuisance: Nuisance::default(),
    })
}

/// Bartlett-kernel long-run variance
///
///   Γ̂ = γ̂₀ + 2 Σ_{j=1..L} (1 − j/(L+1)) γ̂_j
///
/// built from the biased, mean-centered sample autocovariances; the kernel
/// keeps the result non-negative.
pub fn newey_west_lrv(x: &[f64], lags: usize) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::insufficient("empty sample"));
    }
    if lags >= x.len() {
        return Err(Error::domain(format!(
            "lag count {lags} out of range for sample of length {}",
            x.len()
        )));
    }
    let mut lrv = sample_autocovariance(x, 0)?;
    for j in 1..=lags {
        let weight = 1.0 - j as f64 / (lags as f64 + 1.0);
        lrv += 2.0 * weight * sample_autocovariance(x, j)?;
    }
    Ok(lrv)
}

/// Lag choice for the long-run variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LagRule {
    /// L = round(0.75 n^{1/3}), half away from zero; n is the number of
    /// loss differentials.
    Textbook,
    Explicit(usize),
}

impl LagRule {
    pub fn lags(&self, n: usize) -> usize {
        match self {
            LagRule::Textbook => (0.75 * (n as f64).cbrt() + 0.5).floor() as usize,
            LagRule::Explicit(l) => *l,
        }
    }
}

/// Mean loss differential studentized by the Newey-West long-run variance:
///
///   DM = √n · ΔL̄ / √Γ̂
///
/// referred to the standard normal.
pub fn dm_nw_test(dl: &LossDiffSeries, lag_rule: LagRule) -> Result<TestResult> {
    let x = dl.values();
    let n = x.len();
    if n < 2 {
        return Err(Error::insufficient("test needs n >= 2 loss differentials"));
    }
    let lags = lag_rule.lags(n);
    let lrv = newey_west_lrv(x, lags)?;
    if lrv <= 0.0 {
        return Err(Error::degenerate(
            "zero long-run variance (constant loss differentials)",
        ));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let statistic = (n as f64).sqrt() * mean / lrv.sqrt();
    Ok(TestResult {
        statistic,
        reference: Reference::StdNormal,
        p_value: two_sided_normal_p(statistic),
        nuisance: Nuisance {
            nw_lags: Some(lags),
            k_blocks: None,
        },
    })
}

/// Self-normalized subsample t-test: split the sample into K contiguous
/// near-equal blocks (the first n mod K blocks take one extra observation),
/// and form the t-statistic of the K block means,
///
///   S = √K · ΔL̿ / √( (K−1)⁻¹ Σ_k (ΔL̄⁽ᵏ⁾ − ΔL̿)² ),
///
/// referred to Student-t with K−1 degrees of freedom.
pub fn subsample_t_test(dl: &LossDiffSeries, k: usize) -> Result<TestResult> {
    let x = dl.values();
    let n = x.len();
    if k < 2 {
        return Err(Error::domain("subsample test needs K >= 2 blocks"));
    }
    if n < 2 * k {
        return Err(Error::insufficient(format!(
            "subsample test needs n >= 2K observations, got n={n} for K={k}"
        )));
    }
    let base = n / k;
    let extra = n % k;
    let mut block_means = Vec::with_capacity(k);
    let mut offset = 0;
    for b in 0..k {
        let len = base + usize::from(b < extra);
        let block = &x[offset..offset + len];
        block_means.push(block.iter().sum::<f64>() / len as f64);
        offset += len;
    }
    let grand = block_means.iter().sum::<f64>() / k as f64;
    let var = block_means.iter().map(|b| (b - grand) * (b - grand)).sum::<f64>()
        / (k as f64 - 1.0);
    if var == 0.0 {
        return Err(Error::degenerate("identical block means"));
    }
    let statistic = (k as f64).sqrt() * grand / var.sqrt();
    let df = (k - 1) as u32;
    let p_value = 2.0 * (1.0 - student_t_cdf(statistic.abs(), df)?);
    Ok(TestResult {
        statistic,
        reference: Reference::StudentT(df),
        p_value,
        nuisance: Nuisance {
            nw_lags: None,
            k_blocks: Some(k),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::student_t_quantile;
    use crate::series::Loss;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn dl(values: &[f64]) -> LossDiffSeries {
        LossDiffSeries::new(values.to_vec(), 3, Loss::SquaredError).unwrap()
    }

    #[test]
    fn gw_examples() {
        let r = gw_test(&dl(&[1.0, -1.0, 1.0, -1.0])).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_abs_diff_eq!(r.p_value, 1.0, epsilon = 1e-12);

        let r = gw_test(&dl(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_abs_diff_eq!(r.statistic, 2.0, epsilon = 1e-15);

        assert!(matches!(
            gw_test(&dl(&[0.0, 0.0, 0.0])),
            Err(Error::Degenerate(_))
        ));
        assert!(gw_test(&dl(&[1.0])).is_err());
    }

    #[test]
    fn newey_west_examples() {
        let x = [1.0, -1.0, 1.0, -1.0];
        assert_abs_diff_eq!(
            newey_west_lrv(&x, 0).unwrap(),
            sample_autocovariance(&x, 0).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(newey_west_lrv(&x, 1).unwrap(), 0.25, epsilon = 1e-15);
        assert!(newey_west_lrv(&x, 4).is_err());
    }

    #[test]
    fn textbook_lag_rule_values() {
        for (n, want) in [(100, 3), (200, 4), (1000, 8), (2000, 9), (20000, 20)] {
            assert_eq!(LagRule::Textbook.lags(n), want, "n = {n}");
        }
    }

    #[test]
    fn dm_examples() {
        let r = dm_nw_test(&dl(&[1.0, -1.0, 1.0, -1.0]), LagRule::Explicit(0)).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.nuisance.nw_lags, Some(0));

        assert!(matches!(
            dm_nw_test(&dl(&[1.0, 1.0, 1.0, 1.0]), LagRule::Explicit(0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn gw_equals_scaled_mean_over_root_mean_square() {
        // J == √n · mean / √(mean of squares), exactly
        let x = [0.3, -1.4, 2.2, 0.7, -0.6, 1.1, 0.4];
        let r = gw_test(&dl(&x)).unwrap();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let msq = x.iter().map(|v| v * v).sum::<f64>() / n;
        assert_relative_eq!(r.statistic, n.sqrt() * mean / msq.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn subsample_examples() {
        // block means (1, -1): grand mean zero
        let r = subsample_t_test(&dl(&[1.0, 1.0, -1.0, -1.0]), 2).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.reference, Reference::StudentT(1));

        // block means (2, 0): statistic √2·1/√2 = 1
        let r = subsample_t_test(&dl(&[2.0, 2.0, 0.0, 0.0]), 2).unwrap();
        assert_relative_eq!(r.statistic, 1.0, max_relative = 1e-12);

        // two-sided 5% critical value at K=2 is the t(1) 0.975 quantile
        assert_relative_eq!(
            student_t_quantile(0.975, 1).unwrap(),
            12.706204736432095,
            max_relative = 1e-8
        );

        assert!(matches!(
            subsample_t_test(&dl(&[1.0, 1.0, 1.0, 1.0]), 2),
            Err(Error::Degenerate(_))
        ));
        assert!(subsample_t_test(&dl(&[1.0, 2.0, 3.0]), 2).is_err());
        assert!(subsample_t_test(&dl(&[1.0, 2.0, 3.0, 4.0]), 1).is_err());
    }

    #[test]
    fn near_equal_blocks_take_extra_observations_first() {
        // n=5, K=2: blocks of 3 and 2
        let r = subsample_t_test(&dl(&[3.0, 3.0, 3.0, 1.0, 1.0]), 2).unwrap();
        // block means 3 and 1, grand 2, variance 2, statistic √2·2/√2 = 2
        assert_relative_eq!(r.statistic, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn reject_at_matches_p_value() {
        let r = gw_test(&dl(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(r.reject_at(r.p_value + 1e-12));
        assert!(!r.reject_at(r.p_value - 1e-12));
    }
}
