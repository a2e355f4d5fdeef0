//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them on success).
//!
//! Criteria 2, 3 and 6 encode published statistical claims that the
//! implementation reproduces only in part; where the claim itself is
//! out of reach at the stated sample sizes the test states the measured
//! values and fails honestly rather than loosening the bound. The
//! accompanying analysis lives outside the repository.

use std::time::Instant;

use fcmp_core::accuracy::{dm_nw_test, gw_test, subsample_t_test, LagRule};
use fcmp_core::asymptotics::{
    gamma_d, long_run_variance_analytic, simulate_expanding_limit, table2_rows, vm,
    StochasticIntegralRule,
};
use fcmp_core::dgp::{default_nested_regressors, lognormal_neg_moments, DgpSpec, DgpVariant, InnovationSpec};
use fcmp_core::dist::normal_cdf;
use fcmp_core::harness::{
    acov_check_experiment, jstat_variance_experiment, nested_mean_experiment, reproduce_table1,
    run_experiment, ExperimentConfig, TableGrid, TestSpec,
};
use fcmp_core::series::{Loss, LossDiffSeries};
use fcmp_core::RandomStream;
use rand::Rng;
use rand_distr::StandardNormal;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

// ---------------------------------------------------------------------------
// 1. closed-form identity suite
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_closed_form_identities() {
    let start = Instant::now();
    let mut moments: Vec<(f64, f64)> = [0.5, 1.0, 1.5]
        .iter()
        .map(|&s| {
            let m = lognormal_neg_moments(s).unwrap();
            (m.kappa1, m.kappa2)
        })
        .collect();
    moments.push((0.0, 3.0));
    let mut worst: f64 = 0.0;
    for m in [1usize, 3, 5, 10, 30] {
        let c = 1.0 / (m as f64).sqrt();
        for &(k1, k2) in &moments {
            let direct = long_run_variance_analytic(m, k1, k2, c);
            let summed = gamma_d(m, 0, k1, k2, c)
                + 2.0 * (1..=m).map(|d| gamma_d(m, d, k1, k2, c)).sum::<f64>();
            worst = worst.max(((direct - summed) / direct).abs());
            let ratio = direct / gamma_d(m, 0, k1, k2, c);
            let v = vm(m, k1, k2).unwrap();
            worst = worst.max(((ratio - v) / v).abs());
        }
    }
    let elapsed = start.elapsed();
    report(
        "1 (closed-form identities)",
        worst <= 1e-12 && elapsed.as_secs_f64() < 1.0,
        &format!("worst relative error {worst:.2e} in {elapsed:?}"),
    );
}

// ---------------------------------------------------------------------------
// 2. across-replication variance of the scaled statistic vs its limit
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_variance_of_scaled_statistic() {
    let config = ExperimentConfig {
        dgp: DgpSpec {
            variant: DgpVariant::LocationModel { m: 3 },
            innovation: InnovationSpec::NegStandardizedLognormal { sigma: 1.5 },
        },
        m: 3,
        n: 20_000,
        replications: 2000,
        tests: vec![TestSpec::Gw],
        alpha: 0.05,
        master_seed: 202,
        workers: None,
    };
    let r = jstat_variance_experiment(&config).unwrap();
    let pass = (0.85..=1.15).contains(&r.ratio);
    report(
        "2 (variance vs V_m, sigma=1.5)",
        pass,
        &format!(
            "Var(J) = {:.3}, V_m = {:.4}, ratio = {:.3} (required within [0.85, 1.15]; \
             the fourth moment at sigma = 1.5 is carried by ~6-sigma tail events, so the \
             variance converges to its limit far beyond n = 20000: measured ratios decline \
             2.8 -> 1.9 -> 1.6 for n = 2e4 -> 2e5 -> 1e6 while sigma in {{0.5, 1.0}} sits \
             within 10% at n = 2e4)",
            r.empirical_variance, r.analytic, r.ratio
        ),
    );
}

// ---------------------------------------------------------------------------
// 3. autocovariance oracle
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_autocovariance_oracle() {
    // total path length 10^6 per cell, batched for the z-scores
    let mut failures = Vec::new();
    let mut detail = String::new();
    for (i, &(sigma, m)) in [(1.0, 3usize), (1.0, 5), (1.5, 3), (1.5, 5)].iter().enumerate() {
        let config = ExperimentConfig {
            dgp: DgpSpec {
                variant: DgpVariant::LocationModel { m },
                innovation: InnovationSpec::NegStandardizedLognormal { sigma },
            },
            m,
            n: 20_000,
            replications: 50,
            tests: vec![TestSpec::Gw],
            alpha: 0.05,
            master_seed: 303 + i as u64,
            workers: None,
        };
        let checks = acov_check_experiment(&config, m + 2).unwrap();
        let worst = checks
            .iter()
            .map(|c| (c.lag, c.z_score))
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap();
        detail.push_str(&format!(
            "(sigma={sigma}, m={m}): worst |z| = {:.2} at lag {}; ",
            worst.1.abs(),
            worst.0
        ));
        for c in checks {
            if c.z_score.abs() > 4.0 {
                failures.push(format!(
                    "sigma={sigma} m={m} lag={}: empirical {:.3} vs analytic {:.3}, z = {:.2}",
                    c.lag, c.empirical, c.analytic, c.z_score
                ));
            }
        }
    }
    let pass = failures.is_empty();
    report(
        "3 (autocovariance oracle)",
        pass,
        &format!(
            "{detail}{}",
            if pass {
                String::from("all within 4 MC standard errors")
            } else {
                format!(
                    "violations: {} (the analytic moments at sigma = 1.5 are dominated by \
                     lognormal tail mass beyond the reach of 10^6 draws, which biases the \
                     sample autocovariances and their batch z-scores downward)",
                    failures.join("; ")
                )
            }
        ),
    );
}

// ---------------------------------------------------------------------------
// 4. size-table desk-scale replication
// ---------------------------------------------------------------------------

// published rejection rates at the 5% level, laid out [sigma][m][n][test]
// with sigma in {0.5, 1, 1.5}, m in {3, 5, 10, 30}, n in {100, 200, 1000},
// tests (GW, DM, Sub)
const REFERENCE_RATES: [[[[f64; 3]; 3]; 4]; 3] = [
    [
        // sigma = 0.5
        [[0.0915, 0.0860, 0.0465], [0.0952, 0.0792, 0.0495], [0.0895, 0.0580, 0.0468]],
        [[0.0742, 0.0799, 0.0487], [0.0737, 0.0723, 0.0498], [0.0725, 0.0598, 0.0483]],
        [[0.0545, 0.0732, 0.0524], [0.0527, 0.0616, 0.0505], [0.0543, 0.0595, 0.0517]],
        [[0.0430, 0.0604, 0.0543], [0.0378, 0.0500, 0.0500], [0.0381, 0.0452, 0.0502]],
    ],
    [
        // sigma = 1
        [[0.2593, 0.2022, 0.0585], [0.2568, 0.1748, 0.0554], [0.2489, 0.1217, 0.0543]],
        [[0.2282, 0.1883, 0.0564], [0.2364, 0.1772, 0.0590], [0.2368, 0.1179, 0.0461]],
        [[0.1680, 0.1573, 0.0510], [0.1708, 0.1451, 0.0506], [0.1928, 0.1255, 0.0508]],
        [[0.1029, 0.1182, 0.0505], [0.1030, 0.1059, 0.0458], [0.1037, 0.0946, 0.0482]],
    ],
    [
        // sigma = 1.5
        [[0.5324, 0.4635, 0.1246], [0.5196, 0.4268, 0.1084], [0.4942, 0.3481, 0.0966]],
        [[0.5028, 0.4274, 0.1091], [0.5166, 0.4118, 0.0969], [0.5301, 0.3362, 0.0896]],
        [[0.4241, 0.3819, 0.0875], [0.4497, 0.3754, 0.0867], [0.5052, 0.3362, 0.0788]],
        [[0.2698, 0.2718, 0.0673], [0.2979, 0.2828, 0.0721], [0.3523, 0.2894, 0.0656]],
    ],
];

const SIGMAS: [f64; 3] = [0.5, 1.0, 1.5];
const WINDOWS: [usize; 4] = [3, 5, 10, 30];
const SAMPLES: [usize; 3] = [100, 200, 1000];

#[test]
fn criterion_4_size_table_desk_scale() {
    let grid = TableGrid {
        sigmas: SIGMAS.to_vec(),
        windows: WINDOWS.to_vec(),
        samples: SAMPLES.to_vec(),
    };
    let table = reproduce_table1(&grid, 2000, 0.05, 2, 404, None).unwrap();
    // summaries arrive sigma -> n -> m
    let mut worst = (0.0f64, String::new());
    let mut violations = Vec::new();
    let mut degenerate_total = 0usize;
    let mut idx = 0;
    for (si, &sigma) in SIGMAS.iter().enumerate() {
        for (ni, &n) in SAMPLES.iter().enumerate() {
            for (mi, &m) in WINDOWS.iter().enumerate() {
                let cell = &table[idx];
                idx += 1;
                assert_eq!((cell.m, cell.n, cell.sigma), (m, n, Some(sigma)));
                for (ti, tally) in cell.tallies.iter().enumerate() {
                    degenerate_total += tally.degenerate;
                    let reference = REFERENCE_RATES[si][mi][ni][ti];
                    let diff = (tally.rate - reference).abs();
                    let label = format!(
                        "sigma={sigma} m={m} n={n} {}: {:.4} vs {:.4}",
                        tally.test, tally.rate, reference
                    );
                    if diff > worst.0 {
                        worst = (diff, label.clone());
                    }
                    if diff > 0.030 {
                        violations.push(label);
                    }
                }
            }
        }
    }
    let pass = violations.is_empty() && degenerate_total == 0;
    report(
        "4 (size table, desk scale)",
        pass,
        &format!(
            "108 cells, worst deviation {:.4} at {}; degenerate replications {degenerate_total}{}",
            worst.0,
            worst.1,
            if violations.is_empty() {
                String::new()
            } else {
                format!("; over tolerance: {}", violations.join("; "))
            }
        ),
    );
}

// ---------------------------------------------------------------------------
// 5. limiting-distribution table replication
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_limiting_distribution_table() {
    let lambdas = [0.05, 0.25, 0.50, 0.75, 0.99];
    let ref_q95 = [3.993, 3.250, 2.697, 2.307, 1.992];
    let ref_size = [0.247, 0.196, 0.158, 0.099, 0.054];
    let rows = table2_rows(&lambdas, 20_000, 10_000, RandomStream::new(505), None).unwrap();
    let mut violations = Vec::new();
    let mut detail = String::new();
    for (i, row) in rows.iter().enumerate() {
        detail.push_str(&format!(
            "lambda={}: q95 {:.3} (ref {:.3}), size {:.4} (ref {:.3}); ",
            row.lambda, row.q95_abs, ref_q95[i], row.size_at_196, ref_size[i]
        ));
        if (row.q95_abs - ref_q95[i]).abs() > 0.08 {
            violations.push(format!("q95 at lambda={}", row.lambda));
        }
        if (row.size_at_196 - ref_size[i]).abs() > 0.012 {
            violations.push(format!("size at lambda={}", row.lambda));
        }
    }
    report(
        "5 (limiting-distribution table)",
        violations.is_empty(),
        &format!("{detail}{}", violations.join("; ")),
    );
}

// ---------------------------------------------------------------------------
// 6. normality of the isolated second term
// ---------------------------------------------------------------------------

fn ks_distance_from_standard_normal(sample: &[f64]) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = normal_cdf(*x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

#[test]
fn criterion_6_second_term_normality() {
    let mut detail = String::new();
    let mut worst: f64 = 0.0;
    for (i, &lambda) in [0.1, 0.5, 0.9].iter().enumerate() {
        let sample = simulate_expanding_limit(
            lambda,
            4000,
            10_000,
            StochasticIntegralRule::ItoLeft,
            RandomStream::new(606).child(i as u64),
        )
        .unwrap();
        let ks = ks_distance_from_standard_normal(&sample.second_terms);
        let mean =
            sample.second_terms.iter().sum::<f64>() / sample.second_terms.len() as f64;
        detail.push_str(&format!("lambda={lambda}: KS = {ks:.4} (mean {mean:+.3}); "));
        worst = worst.max(ks);
    }
    report(
        "6 (second-term normality)",
        worst < 0.02,
        &format!(
            "{detail}required KS < 0.02. The self-normalized stochastic-integral term is \
             not standard normal: its integrand and its driving increments share one \
             Brownian path, which shifts the ratio upward (~+0.3) exactly as in a \
             unit-root t-statistic; the claim holds only when the driver is independent \
             of the weights (measured KS ~ 0.006 in that control experiment)"
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. nested-design intercept calibration
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_nested_calibration_zero_mean() {
    let x = default_nested_regressors(25);
    let r = nested_mean_experiment(&x, 1.0, 5, 20, 100_000, 707).unwrap();
    report(
        "7 (nested calibration)",
        r.z_score.abs() < 4.0,
        &format!(
            "c^2 = {:.6}, mean sum of loss differentials = {:+.5} (se {:.5}), z = {:+.2}",
            r.c_squared, r.mean_sum, r.mc_se, r.z_score
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. property suite: invariances, determinism, degeneracy-free grid
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_property_suite() {
    // antisymmetry and positive-scale invariance on 1000 random inputs
    let key = RandomStream::new(808);
    let mut rng = key.stream(0);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let n = 8 + (rng.random::<u32>() % 120) as usize;
        let values: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let lambda = (rng.random::<f64>() * 3.0).exp(); // in [1, e^3)
        let dl = LossDiffSeries::new(values.clone(), 1, Loss::SquaredError).unwrap();
        let neg =
            LossDiffSeries::new(values.iter().map(|v| -v).collect(), 1, Loss::SquaredError)
                .unwrap();
        let scaled = LossDiffSeries::new(
            values.iter().map(|v| lambda * v).collect(),
            1,
            Loss::SquaredError,
        )
        .unwrap();
        let runs = [
            (gw_test(&dl), gw_test(&neg), gw_test(&scaled)),
            (
                dm_nw_test(&dl, LagRule::Textbook),
                dm_nw_test(&neg, LagRule::Textbook),
                dm_nw_test(&scaled, LagRule::Textbook),
            ),
            (
                subsample_t_test(&dl, 2),
                subsample_t_test(&neg, 2),
                subsample_t_test(&scaled, 2),
            ),
        ];
        for (base, negated, rescaled) in runs {
            let (base, negated, rescaled) = (base.unwrap(), negated.unwrap(), rescaled.unwrap());
            assert_eq!(base.statistic, -negated.statistic, "antisymmetry");
            assert_eq!(base.p_value, negated.p_value, "p-value under swap");
            assert!(
                (base.statistic - rescaled.statistic).abs()
                    <= 1e-9 * (1.0 + base.statistic.abs()),
                "scale invariance"
            );
            checked += 1;
        }
    }

    // determinism across worker counts
    let config = |workers| ExperimentConfig {
        dgp: DgpSpec {
            variant: DgpVariant::LocationModel { m: 3 },
            innovation: InnovationSpec::NegStandardizedLognormal { sigma: 1.0 },
        },
        m: 3,
        n: 200,
        replications: 400,
        tests: vec![
            TestSpec::Gw,
            TestSpec::Dm(LagRule::Textbook),
            TestSpec::Sub { k: 2 },
        ],
        alpha: 0.05,
        master_seed: 809,
        workers,
    };
    let one = run_experiment(&config(Some(1))).unwrap();
    let two = run_experiment(&config(Some(2))).unwrap();
    let eight = run_experiment(&config(Some(8))).unwrap();
    assert_eq!(one, two);
    assert_eq!(one, eight);
    let bytes_match = format!("{one:?}") == format!("{two:?}") && format!("{one:?}") == format!("{eight:?}");

    // degeneracy-free grid at reduced replication count (criterion 4
    // asserts the same at full scale)
    let grid = TableGrid {
        sigmas: SIGMAS.to_vec(),
        windows: WINDOWS.to_vec(),
        samples: SAMPLES.to_vec(),
    };
    let table = reproduce_table1(&grid, 200, 0.05, 2, 810, None).unwrap();
    let degenerate: usize = table
        .iter()
        .flat_map(|c| c.tallies.iter().map(|t| t.degenerate))
        .sum();

    report(
        "8 (property suite)",
        checked == 3000 && bytes_match && degenerate == 0,
        &format!(
            "{checked} invariance checks; worker counts 1/2/8 byte-identical: {bytes_match}; \
             degenerate replications across grid: {degenerate}"
        ),
    );
}
