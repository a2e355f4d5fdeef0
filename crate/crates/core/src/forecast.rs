//! Rolling- and expanding-window forecasters.
//!
//! Time positions are 1-based within a series: element j (0-based) of a
//! series sits at time j+1. A forecast produced at origin t occupies slot t
//! of the output series (`start_index` = first origin) and is paired with
//! outcome y_{t+1}.

use crate::error::{Error, Result};
use crate::series::{check_finite, Series};

/// Estimation-window scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowScheme {
    /// Fixed-width window of the most recent `m` observations.
    Rolling { m: usize },
    /// Window growing from the sample start; first forecast origin `m0`.
    Expanding { m0: usize },
}

impl WindowScheme {
    pub fn validate(&self, regressors: usize) -> Result<()> {
        let m = match self {
            WindowScheme::Rolling { m } => *m,
            WindowScheme::Expanding { m0 } => *m0,
        };
        if m == 0 {
            return Err(Error::domain("window length must be >= 1"));
        }
        if let WindowScheme::Rolling { m } = self {
            if *m < regressors {
                return Err(Error::domain(format!(
                    "rolling window of {m} cannot identify {regressors} regressors"
                )));
            }
        }
        Ok(())
    }
}

/// Dense row-major regressor matrix; row s holds the predictors observed at
/// time s+1 (1-based time s+1... row j is time j+1).
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl RegressorMatrix {
    pub fn new(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if cols == 0 || rows == 0 || data.len() != rows * cols {
            return Err(Error::domain(format!(
                "matrix shape {rows}x{cols} does not match {} values",
                data.len()
            )));
        }
        check_finite(&data, "regressor matrix")?;
        Ok(RegressorMatrix { data, rows, cols })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::domain("ragged regressor rows"));
            }
            data.extend_from_slice(row);
        }
        RegressorMatrix::new(data, r, c)
    }

    /// Single column of ones (intercept-only design).
    pub fn intercept_only(rows: usize) -> Self {
        RegressorMatrix {
            data: vec![1.0; rows],
            rows,
            cols: 1,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Mean of the most recent `m` observations: f_t = m⁻¹ Σ_{s=t−m+1..t} y_s
/// for origins t = m..T−1, forecasting y_{t+1}.
pub fn rolling_mean_forecasts(y: &Series, m: usize) -> Result<Series> {
    if m == 0 {
        return Err(Error::domain("window length must be >= 1"));
    }
    let v = y.values();
    let t_len = v.len();
    if t_len <= m {
        return Err(Error::insufficient(format!(
            "rolling mean needs more than m={m} observations, got {t_len}"
        )));
    }
    let inv_m = 1.0 / m as f64;
    let mut out = Vec::with_capacity(t_len - m);
    let mut acc: f64 = v[..m].iter().sum();
    out.push(acc * inv_m);
    for j in m..t_len - 1 {
        acc += v[j] - v[j - m];
        out.push(acc * inv_m);
    }
    Series::new(out, y.start_index() + m as i64 - 1)
}

/// Rolling ordinary least squares: at origin t, regress y_{s+1} on x_s over
/// the most recent m pairs (s = t−m..t−1) and forecast f_t = x_t'β̂.
///
/// Row j of `x` is aligned with element j of `y` (same time slot). Origins
/// run t = m+1..T−1, so the output has T−1−m elements. A window whose Gram
/// matrix is not positive definite raises a rank error naming the origin.
pub fn rolling_ols_forecasts(y: &Series, x: &RegressorMatrix, m: usize) -> Result<Series> {
    let v = y.values();
    let t_len = v.len();
    if x.rows() != t_len {
        return Err(Error::Alignment {
            context: "regressor rows vs outcomes",
            left: x.rows(),
            right: t_len,
        });
    }
    let k = x.cols();
    if m < k {
        return Err(Error::domain(format!(
            "window m={m} cannot identify {k} regressors"
        )));
    }
    if t_len < m + 2 {
        return Err(Error::insufficient(format!(
            "rolling OLS needs at least m+2={} observations, got {t_len}",
            m + 2
        )));
    }

    let mut out = Vec::with_capacity(t_len - 1 - m);
    let mut gram = vec![0.0; k * k];
    let mut moment = vec![0.0; k];
    // origins are 1-based times; origin t sits at 0-based position t-1
    for t in (m + 1)..t_len {
        gram.fill(0.0);
        moment.fill(0.0);
        #[allow(clippy::needless_range_loop)]
        for s in (t - m)..t {
            // pair (x_s, y_{s+1}): 0-based row s-1, outcome position s
            let xs = x.row(s - 1);
            let ys = v[s];
            for a in 0..k {
                for b in a..k {
                    gram[a * k + b] += xs[a] * xs[b];
                }
                moment[a] += xs[a] * ys;
            }
        }
        for a in 0..k {
            for b in 0..a {
                gram[a * k + b] = gram[b * k + a];
            }
        }
        let beta = solve_spd(&gram, &moment, k).ok_or(Error::RankDeficient {
            origin: (y.start_index() + t as i64 - 1).max(0) as usize,
        })?;
        let xt = x.row(t - 1);
        out.push(xt.iter().zip(&beta).map(|(a, b)| a * b).sum());
    }
    Series::new(out, y.start_index() + m as i64)
}

/// Expanding mean: f_t = t⁻¹ Σ_{s=1..t} y_s for origins t = m0..T−1.
pub fn expanding_mean_forecasts(y: &Series, m0: usize) -> Result<Series> {
    if m0 == 0 {
        return Err(Error::domain("first origin must be >= 1"));
    }
    let v = y.values();
    let t_len = v.len();
    if t_len <= m0 {
        return Err(Error::insufficient(format!(
            "expanding mean needs more than m0={m0} observations, got {t_len}"
        )));
    }
    let mut out = Vec::with_capacity(t_len - m0);
    let mut acc: f64 = v[..m0].iter().sum();
    out.push(acc / m0 as f64);
    for t in m0 + 1..t_len {
        acc += v[t - 1];
        out.push(acc / t as f64);
    }
    Series::new(out, y.start_index() + m0 as i64 - 1)
}

/// Deterministic benchmark forecast rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeterministicRule {
    Constant(f64),
    /// f_t = t^{−1/2}
    InverseSqrtT,
}

/// Forecasts from a deterministic rule over a range of (1-based) origins.
pub fn deterministic_sequence_forecasts(
    rule: DeterministicRule,
    origins: std::ops::Range<i64>,
) -> Result<Series> {
    if origins.is_empty() {
        return Err(Error::insufficient("empty origin range"));
    }
    let values = match rule {
        DeterministicRule::Constant(c) => {
            if !c.is_finite() {
                return Err(Error::domain("constant forecast must be finite"));
            }
            vec![c; origins.clone().count()]
        }
        DeterministicRule::InverseSqrtT => {
            if origins.start < 1 {
                return Err(Error::domain("t^(-1/2) rule needs origins t >= 1"));
            }
            origins.clone().map(|t| 1.0 / (t as f64).sqrt()).collect()
        }
    };
    Series::new(values, origins.start)
}

/// Cholesky solve of a symmetric positive definite system; `None` when a
/// pivot falls below a small multiple of its diagonal entry
/// (rank-deficient window).
fn solve_spd(a: &[f64], b: &[f64], k: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut sum = a[i * k + j];
            for p in 0..j {
                sum -= l[i * k + p] * l[j * k + p];
            }
            if i == j {
                if !sum.is_finite() || sum <= 1e-12 * a[i * k + i].abs() {
                    return None;
                }
                l[i * k + i] = sum.sqrt();
            } else {
                l[i * k + j] = sum / l[j * k + j];
            }
        }
    }
    // forward then backward substitution
    let mut z = vec![0.0; k];
    for i in 0..k {
        let mut sum = b[i];
        for p in 0..i {
            sum -= l[i * k + p] * z[p];
        }
        z[i] = sum / l[i * k + i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut sum = z[i];
        for p in i + 1..k {
            sum -= l[p * k + i] * x[p];
        }
        x[i] = sum / l[i * k + i];
    }
    Some(x)
}
