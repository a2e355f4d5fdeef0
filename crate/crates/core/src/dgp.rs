//! Data-generating processes for the size experiments, their innovation
//! moments, and the intercept calibration for the nested-model design.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::forecast::RegressorMatrix;
use crate::series::Series;

/// Innovation law; both kinds have mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnovationSpec {
    GaussianUnit,
    /// ε = −(ξ − Eξ)/√Var ξ with log ξ ~ N(0, σ²): unit variance, heavy
    /// left tail, negative skew.
    NegStandardizedLognormal { sigma: f64 },
}

impl InnovationSpec {
    pub fn moments(&self) -> Result<InnovationMoments> {
        match self {
            InnovationSpec::GaussianUnit => Ok(InnovationMoments {
                kappa1: 0.0,
                kappa2: 3.0,
            }),
            InnovationSpec::NegStandardizedLognormal { sigma } => lognormal_neg_moments(*sigma),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        match self {
            InnovationSpec::GaussianUnit => z,
            InnovationSpec::NegStandardizedLognormal { sigma } => {
                let s2 = sigma * sigma;
                let xi = (sigma * z).exp();
                let mean = (0.5 * s2).exp();
                let sd = ((s2.exp() - 1.0) * s2.exp()).sqrt();
                -(xi - mean) / sd
            }
        }
    }
}

/// Third and fourth moments Eε³, Eε⁴ of a unit-variance innovation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnovationMoments {
    pub kappa1: f64,
    pub kappa2: f64,
}

/// Closed-form moments of the negated standardized lognormal:
///
///   κ₁ = −(w + 2)√(w − 1),  κ₂ = w⁴ + 2w³ + 3w² − 3,  w = e^{σ²}
///
/// (the lognormal's skewness with flipped sign, and its kurtosis).
pub fn lognormal_neg_moments(sigma: f64) -> Result<InnovationMoments> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::domain(format!("lognormal shape must be positive, got {sigma}")));
    }
    let w = (sigma * sigma).exp();
    Ok(InnovationMoments {
        kappa1: -(w + 2.0) * (w - 1.0).sqrt(),
        kappa2: w.powi(4) + 2.0 * w.powi(3) + 3.0 * w.powi(2) - 3.0,
    })
}

/// I.i.d. innovation draws; identical stream states give identical output.
pub fn draw_innovations<R: Rng + ?Sized>(
    spec: InnovationSpec,
    count: usize,
    rng: &mut R,
) -> Result<Series> {
    if count == 0 {
        return Err(Error::insufficient("innovation count must be >= 1"));
    }
    let values = (0..count).map(|_| spec.draw(rng)).collect();
    Series::new(values, 1)
}

/// Simulation design.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpSpec {
    pub variant: DgpVariant,
    pub innovation: InnovationSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DgpVariant {
    /// y_t = c + ε_t with c = m^{−1/2}, the calibration that makes the mean
    /// loss differential of the rolling-mean-vs-zero comparison vanish.
    LocationModel { m: usize },
    /// y_t = ε_t (benchmark for the expanding-window analysis).
    ExpandingNull,
    /// y_{s+1} = c + β x_s + σ_ε ε_{s+1} with a fixed regressor sequence;
    /// c = √(c²) from [`compute_c_squared_nested`] over the (m, n) layout.
    NestedFixedRegressor {
        x: Vec<f64>,
        sigma_eps: f64,
        m: usize,
        n: usize,
        beta: f64,
    },
    /// y_{s+1} = β₁x_{1s} + β₂x_{2s} + ε_{s+1} with mutually independent
    /// standard-normal regressors (demonstration runs only).
    NonNested { beta1: f64, beta2: f64 },
}

/// Output of [`simulate`]: the outcome path and, for regression designs,
/// the regressor rows aligned with it.
#[derive(Debug, Clone)]
pub struct SimulatedPath {
    /// Outcomes. For the regression designs this holds the targets y_{s+1}
    /// (start index 2), one per regressor row.
    pub y: Series,
    pub regressors: Option<RegressorMatrix>,
}

/// Draw one path of `len` observations (location/expanding designs) or
/// `len` regressor-target pairs (regression designs). Deterministic given
/// the stream.
pub fn simulate<R: Rng + ?Sized>(
    dgp: &DgpSpec,
    len: usize,
    rng: &mut R,
) -> Result<SimulatedPath> {
    if len == 0 {
        return Err(Error::insufficient("path length must be >= 1"));
    }
    match &dgp.variant {
        DgpVariant::LocationModel { m } => {
            if *m == 0 {
                return Err(Error::domain("location model needs window m >= 1"));
            }
            let c = 1.0 / (*m as f64).sqrt();
            let values = (0..len).map(|_| c + dgp.innovation.draw(rng)).collect();
            Ok(SimulatedPath {
                y: Series::new(values, 1)?,
                regressors: None,
            })
        }
        DgpVariant::ExpandingNull => {
            let values = (0..len).map(|_| dgp.innovation.draw(rng)).collect();
            Ok(SimulatedPath {
                y: Series::new(values, 1)?,
                regressors: None,
            })
        }
        DgpVariant::NestedFixedRegressor {
            x,
            sigma_eps,
            m,
            n,
            beta,
        } => {
            if x.len() < len {
                return Err(Error::insufficient(format!(
                    "fixed regressor sequence has {} elements, need {len}",
                    x.len()
                )));
            }
            let c = compute_c_squared_nested(x, *sigma_eps, *m, *n)?.sqrt();
            let values: Vec<f64> = (0..len)
                .map(|s| c + beta * x[s] + sigma_eps * dgp.innovation.draw(rng))
                .collect();
            let rows: Vec<Vec<f64>> = x[..len].iter().map(|&v| vec![v]).collect();
            Ok(SimulatedPath {
                y: Series::new(values, 2)?,
                regressors: Some(RegressorMatrix::from_rows(&rows)?),
            })
        }
        DgpVariant::NonNested { beta1, beta2 } => {
            let mut rows = Vec::with_capacity(len);
            let mut values = Vec::with_capacity(len);
            for _ in 0..len {
                let x1: f64 = rng.sample(StandardNormal);
                let x2: f64 = rng.sample(StandardNormal);
                values.push(beta1 * x1 + beta2 * x2 + dgp.innovation.draw(rng));
                rows.push(vec![x1, x2]);
            }
            Ok(SimulatedPath {
                y: Series::new(values, 2)?,
                regressors: Some(RegressorMatrix::from_rows(&rows)?),
            })
        }
    }
}

/// Default fixed regressor sequence x_t = sin(t) + 2, t = 1..len:
/// deterministic, bounded, non-degenerate mean and variance.
pub fn default_nested_regressors(len: usize) -> Vec<f64> {
    (1..=len).map(|t| (t as f64).sin() + 2.0).collect()
}

/// Intercept calibration for the nested design: the c² that sets the
/// expected sum of the n loss differentials between the slope-only and the
/// intercept-plus-slope expanding-window forecasts to zero,
///
///   c² = σ² Σ_t [X_t'(X'X)⁻¹X_t − x_t²/(x'x)] / Σ_t [1 − (x'1/(x'x)) x_t]²,
///
/// where the sums run over origins t = m+1..m+n, the design matrix stacks
/// the pairs available strictly before each origin (rows (1, x_s) for
/// s = 1..t−1), and X_t = (1, x_t)' is the origin's own regressor row.
pub fn compute_c_squared_nested(x: &[f64], sigma_eps: f64, m: usize, n: usize) -> Result<f64> {
    if !sigma_eps.is_finite() || sigma_eps <= 0.0 {
        return Err(Error::domain("innovation scale must be positive"));
    }
    if m < 2 || n == 0 {
        return Err(Error::domain(
            "nested design needs m >= 2 pre-sample pairs and n >= 1 origins",
        ));
    }
    if x.len() < m + n {
        return Err(Error::insufficient(format!(
            "regressor sequence has {} elements, need m+n = {}",
            x.len(),
            m + n
        )));
    }
    // prefix sums over s = 1..t-1 (x is 1-based: x[j] = x_{j+1})
    let mut cnt = 0.0;
    let mut w = 0.0; // Σ x_s
    let mut q = 0.0; // Σ x_s²
    for &v in &x[..m] {
        cnt += 1.0;
        w += v;
        q += v * v;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for t in (m + 1)..=(m + n) {
        if q <= 0.0 {
            return Err(Error::RankDeficient { origin: t });
        }
        let det = cnt * q - w * w;
        if det <= 0.0 {
            return Err(Error::RankDeficient { origin: t });
        }
        let xt = x[t - 1];
        // X_t' (X'X)^{-1} X_t for X_t = (1, xt)'
        let quad = (q - 2.0 * w * xt + cnt * xt * xt) / det;
        num += quad - xt * xt / q;
        let r = 1.0 - (w / q) * xt;
        den += r * r;
        cnt += 1.0;
        w += xt;
        q += xt * xt;
    }
    if den <= 0.0 {
        return Err(Error::degenerate("zero small-model bias denominator"));
    }
    let c2 = sigma_eps * sigma_eps * num / den;
    if c2 < 0.0 {
        return Err(Error::domain(format!(
            "negative intercept calibration c^2 = {c2}: no real intercept equalizes the designs"
        )));
    }
    Ok(c2)
}
