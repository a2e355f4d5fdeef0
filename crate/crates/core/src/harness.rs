//! Deterministic parallel Monte Carlo harness for the size experiments.
//!
//! Replication r of an experiment always draws from stream r of the
//! experiment's key and replication-level results are reduced in index
//! order, so every summary is bit-identical for any worker count.

use rayon::prelude::*;
use serde::Serialize;

use crate::accuracy::{dm_nw_test, gw_test, subsample_t_test, LagRule, TestResult};
use crate::asymptotics::{gamma_d, vm};
use crate::dgp::{simulate, DgpSpec, DgpVariant, InnovationSpec};
use crate::error::{Error, Result};
use crate::forecast::rolling_mean_forecasts;
use crate::rng::RandomStream;
use crate::series::{loss_diff_squared_error, sample_autocovariance, LossDiffSeries, Series};

/// Which tests to run on each replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestSpec {
    Gw,
    /// Newey-West studentized mean with the given lag rule.
    Dm(LagRule),
    /// Subsample t-test with K blocks.
    Sub { k: usize },
}

impl TestSpec {
    pub fn label(&self) -> String {
        match self {
            TestSpec::Gw => "GW".to_string(),
            TestSpec::Dm(_) => "DM".to_string(),
            TestSpec::Sub { k } => format!("Sub({k})"),
        }
    }

    fn run(&self, dl: &LossDiffSeries) -> Result<TestResult> {
        match self {
            TestSpec::Gw => gw_test(dl),
            TestSpec::Dm(rule) => dm_nw_test(dl, *rule),
            TestSpec::Sub { k } => subsample_t_test(dl, *k),
        }
    }
}

/// Full description of one Monte Carlo cell.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dgp: DgpSpec,
    /// Estimation window length.
    pub m: usize,
    /// Evaluation length (number of loss differentials per replication).
    pub n: usize,
    pub replications: usize,
    pub tests: Vec<TestSpec>,
    pub alpha: f64,
    pub master_seed: u64,
    /// Worker-count hint; `None` uses the global thread pool. Results do
    /// not depend on it.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::domain("need at least one replication"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha {} not in (0, 1)", self.alpha)));
        }
        if self.n <= self.m {
            return Err(Error::domain("evaluation length n must exceed window m"));
        }
        Ok(())
    }

    fn key(&self) -> RandomStream {
        RandomStream::new(self.master_seed)
    }
}

/// Per-test rejection tally of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestTally {
    pub test: String,
    pub rejections: usize,
    pub valid: usize,
    pub degenerate: usize,
    pub rate: f64,
    pub mc_se: f64,
}

/// Rejection frequencies of one Monte Carlo cell, with binomial Monte Carlo
/// standard errors and the count of degenerate replications (excluded from
/// the denominator).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectionSummary {
    pub m: usize,
    pub n: usize,
    pub sigma: Option<f64>,
    pub replications: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub tallies: Vec<TestTally>,
}

/// Binomial Monte Carlo standard error √(p(1−p)/R).
pub fn mc_standard_error(p_hat: f64, replications: usize) -> f64 {
    (p_hat * (1.0 - p_hat) / replications as f64).sqrt()
}

fn innovation_sigma(spec: &InnovationSpec) -> Option<f64> {
    match spec {
        InnovationSpec::GaussianUnit => None,
        InnovationSpec::NegStandardizedLognormal { sigma } => Some(*sigma),
    }
}

/// Loss differentials of one location-model replication: simulate
/// T = m+n+1 outcomes, roll an m-window mean against the zero forecast over
/// origins t = m..m+n−1, and return the n differentials ΔL_{m+1..m+n}.
fn location_replication(
    dgp: &DgpSpec,
    m: usize,
    n: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<LossDiffSeries> {
    let path = simulate(dgp, m + n + 1, rng)?;
    // origins m..m+n-1 need outcomes y_1..y_{m+n}; the last outcome is spare
    let y_used = path.y.window(0, m + n)?;
    let f1 = rolling_mean_forecasts(&y_used, m)?;
    let outcomes = y_used.window(m, n)?;
    let f2 = Series::new(vec![0.0; n], f1.start_index())?;
    loss_diff_squared_error(&outcomes, &f1, &f2)
}

fn replication_loss_diff(
    config: &ExperimentConfig,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<LossDiffSeries> {
    match &config.dgp.variant {
        DgpVariant::LocationModel { m } => {
            if *m != config.m {
                return Err(Error::domain("config window disagrees with DGP window"));
            }
            location_replication(&config.dgp, config.m, config.n, rng)
        }
        other => Err(Error::domain(format!(
            "harness supports the location-model design, got {other:?}"
        ))),
    }
}

/// Run one Monte Carlo cell. Degenerate-statistic replications are counted
/// per test and excluded from its rejection denominator; all other errors
/// abort the experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RejectionSummary> {
    config.validate()?;
    let key = config.key();

    // per replication, per test: Ok(reject) or degenerate
    let outcomes: Vec<Result<Vec<Option<bool>>>> = maybe_pool(config.workers, || {
        (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = key.stream(r as u64);
                let dl = replication_loss_diff(config, &mut rng)?;
                let mut row = Vec::with_capacity(config.tests.len());
                for test in &config.tests {
                    match test.run(&dl) {
                        Ok(res) => row.push(Some(res.reject_at(config.alpha))),
                        Err(Error::Degenerate(_)) => row.push(None),
                        Err(e) => return Err(e),
                    }
                }
                Ok(row)
            })
            .collect()
    });

    let mut rejections = vec![0usize; config.tests.len()];
    let mut valid = vec![0usize; config.tests.len()];
    let mut degenerate = vec![0usize; config.tests.len()];
    for row in outcomes {
        let row = row?;
        for (i, cell) in row.iter().enumerate() {
            match cell {
                Some(true) => {
                    rejections[i] += 1;
                    valid[i] += 1;
                }
                Some(false) => valid[i] += 1,
                None => degenerate[i] += 1,
            }
        }
    }

    let tallies = config
        .tests
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let rate = if valid[i] > 0 {
                rejections[i] as f64 / valid[i] as f64
            } else {
                f64::NAN
            };
            TestTally {
                test: t.label(),
                rejections: rejections[i],
                valid: valid[i],
                degenerate: degenerate[i],
                rate,
                mc_se: mc_standard_error(rate, valid[i].max(1)),
            }
        })
        .collect();

    Ok(RejectionSummary {
        m: config.m,
        n: config.n,
        sigma: innovation_sigma(&config.dgp.innovation),
        replications: config.replications,
        alpha: config.alpha,
        master_seed: config.master_seed,
        tallies,
    })
}

/// Grid for the full size table.
#[derive(Debug, Clone)]
pub struct TableGrid {
    pub sigmas: Vec<f64>,
    pub windows: Vec<usize>,
    pub samples: Vec<usize>,
}

/// Run every (σ, m, n) cell of the grid in the row-major order
/// σ → n → m and return one summary per cell. Each cell gets an
/// independent child key of `master_seed`, so a single cell run with the
/// same grid position reproduces its table entry exactly.
pub fn reproduce_table1(
    grid: &TableGrid,
    replications: usize,
    alpha: f64,
    k_blocks: usize,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<Vec<RejectionSummary>> {
    if grid.sigmas.is_empty() || grid.windows.is_empty() || grid.samples.is_empty() {
        return Err(Error::domain("empty table grid"));
    }
    let mut out = Vec::new();
    let mut cell = 0u64;
    for &sigma in &grid.sigmas {
        for &n in &grid.samples {
            for &m in &grid.windows {
                let config = ExperimentConfig {
                    dgp: DgpSpec {
                        variant: DgpVariant::LocationModel { m },
                        innovation: InnovationSpec::NegStandardizedLognormal { sigma },
                    },
                    m,
                    n,
                    replications,
                    tests: vec![
                        TestSpec::Gw,
                        TestSpec::Dm(LagRule::Textbook),
                        TestSpec::Sub { k: k_blocks },
                    ],
                    alpha,
                    master_seed: RandomStream::new(master_seed).child(cell).master_seed(),
                    workers,
                };
                out.push(run_experiment(&config)?);
                cell += 1;
            }
        }
    }
    Ok(out)
}

/// Variance of the scaled test statistic across replications against its
/// closed-form limit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VarianceReport {
    pub empirical_variance: f64,
    pub analytic: f64,
    pub ratio: f64,
    pub replications: usize,
}

/// Compare the across-replication variance of the sum-over-root statistic
/// with its analytic limit V_m under the location design.
pub fn jstat_variance_experiment(config: &ExperimentConfig) -> Result<VarianceReport> {
    config.validate()?;
    let key = config.key();
    let stats: Vec<Result<f64>> = maybe_pool(config.workers, || {
        (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = key.stream(r as u64);
                let dl = replication_loss_diff(config, &mut rng)?;
                Ok(gw_test(&dl)?.statistic)
            })
            .collect()
    });
    let mut values = Vec::with_capacity(config.replications);
    for s in stats {
        values.push(s?);
    }
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let empirical_variance =
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0);
    let moments = config.dgp.innovation.moments()?;
    let analytic = vm(config.m, moments.kappa1, moments.kappa2)?;
    Ok(VarianceReport {
        empirical_variance,
        analytic,
        ratio: empirical_variance / analytic,
        replications: values.len(),
    })
}

/// Empirical-vs-analytic autocovariance comparison at one lag.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AcovCheck {
    pub lag: usize,
    pub empirical: f64,
    pub analytic: f64,
    /// (empirical − analytic) / (replication standard deviation / √R)
    pub z_score: f64,
}

/// Estimate the loss-differential autocovariances at lags 0..=`max_lag`
/// across replications of the location design and compare them with the
/// closed forms, z-scored by the replication scatter.
pub fn acov_check_experiment(
    config: &ExperimentConfig,
    max_lag: usize,
) -> Result<Vec<AcovCheck>> {
    config.validate()?;
    if config.replications < 2 {
        return Err(Error::domain("autocovariance check needs >= 2 replications"));
    }
    if max_lag >= config.n {
        return Err(Error::domain("max lag must be below the evaluation length"));
    }
    let key = config.key();
    let per_rep: Vec<Result<Vec<f64>>> = maybe_pool(config.workers, || {
        (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let mut rng = key.stream(r as u64);
                let dl = replication_loss_diff(config, &mut rng)?;
                (0..=max_lag)
                    .map(|d| sample_autocovariance(dl.values(), d))
                    .collect()
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(config.replications);
    for r in per_rep {
        rows.push(r?);
    }
    let moments = config.dgp.innovation.moments()?;
    let c = 1.0 / (config.m as f64).sqrt();
    let r = rows.len() as f64;
    let mut out = Vec::with_capacity(max_lag + 1);
    for d in 0..=max_lag {
        let mean = rows.iter().map(|row| row[d]).sum::<f64>() / r;
        let var = rows
            .iter()
            .map(|row| (row[d] - mean) * (row[d] - mean))
            .sum::<f64>()
            / (r - 1.0);
        let se = (var / r).sqrt();
        let analytic = gamma_d(config.m, d, moments.kappa1, moments.kappa2, c);
        out.push(AcovCheck {
            lag: d,
            empirical: mean,
            analytic,
            z_score: (mean - analytic) / se,
        });
    }
    Ok(out)
}

/// Mean of the summed loss differentials of the nested design across
/// replications, z-scored against zero.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NestedMeanReport {
    pub c_squared: f64,
    pub mean_sum: f64,
    pub mc_se: f64,
    pub z_score: f64,
    pub replications: usize,
}

/// Validate the nested-design intercept calibration by simulation: with
/// c = √(c²), the expected sum of the n loss differentials between the
/// slope-only and the intercept-plus-slope expanding forecasts is zero.
/// Forecasts are fit by per-origin normal equations over all pairs before
/// the origin.
pub fn nested_mean_experiment(
    x: &[f64],
    sigma_eps: f64,
    m: usize,
    n: usize,
    replications: usize,
    master_seed: u64,
) -> Result<NestedMeanReport> {
    if replications < 2 {
        return Err(Error::domain("need >= 2 replications"));
    }
    let c_squared = crate::dgp::compute_c_squared_nested(x, sigma_eps, m, n)?;
    let dgp = DgpSpec {
        variant: DgpVariant::NestedFixedRegressor {
            x: x.to_vec(),
            sigma_eps,
            m,
            n,
            beta: 1.0,
        },
        innovation: InnovationSpec::GaussianUnit,
    };
    let key = RandomStream::new(master_seed);
    let sums: Vec<Result<f64>> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = key.stream(r as u64);
            let path = simulate(&dgp, m + n, &mut rng)?;
            let reg = path.regressors.as_ref().expect("nested design has regressors");
            let targets = path.y.values();
            // expanding windows over pairs (x_s, y_{s+1}), s = 1..t-1
            let mut cnt = 0.0;
            let mut sx = 0.0;
            let mut sxx = 0.0;
            let mut sy = 0.0;
            let mut sxy = 0.0;
            for (s, &yv) in targets[..m].iter().enumerate() {
                let xv = reg.row(s)[0];
                cnt += 1.0;
                sx += xv;
                sxx += xv * xv;
                sy += yv;
                sxy += xv * yv;
            }
            let mut sum_dl = 0.0;
            for t in (m + 1)..=(m + n) {
                let xt = reg.row(t - 1)[0];
                let yt = targets[t - 1];
                let theta = sxy / sxx; // slope-only fit
                let det = cnt * sxx - sx * sx;
                if det <= 0.0 || sxx <= 0.0 {
                    return Err(Error::RankDeficient { origin: t });
                }
                let slope = (cnt * sxy - sx * sy) / det;
                let intercept = (sy - slope * sx) / cnt;
                let f_small = theta * xt;
                let f_big = intercept + slope * xt;
                sum_dl += (yt - f_small) * (yt - f_small) - (yt - f_big) * (yt - f_big);
                cnt += 1.0;
                sx += xt;
                sxx += xt * xt;
                sy += yt;
                sxy += xt * yt;
            }
            Ok(sum_dl)
        })
        .collect();
    let mut values = Vec::with_capacity(replications);
    for s in sums {
        values.push(s?);
    }
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0);
    let mc_se = (var / r).sqrt();
    Ok(NestedMeanReport {
        c_squared,
        mean_sum: mean,
        mc_se,
        z_score: mean / mc_se,
        replications: values.len(),
    })
}

/// Run `body` inside a dedicated pool of `workers` threads when a hint is
/// given; otherwise use the global pool.
fn maybe_pool<T: Send>(workers: Option<usize>, body: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) if w > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("thread pool")
            .install(body),
        _ => body(),
    }
}
