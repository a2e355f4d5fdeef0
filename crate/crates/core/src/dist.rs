//! Reference distributions: standard normal CDF, Student-t CDF and quantile.
//!
//! The normal CDF goes through the error function, computed by a power
//! series for small arguments and a Lentz continued fraction for the tail.
//! The t CDF uses the regularized incomplete beta function. Quantiles are
//! solved from the CDF by bracketing and bisection.

use crate::error::{Error, Result};

/// Standard normal CDF, absolute error well below 1e-10.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Complementary error function, near machine precision on the real line.
fn erfc(z: f64) -> f64 {
    if z < 0.0 {
        return 2.0 - erfc(-z);
    }
    if z < 2.5 {
        1.0 - erf_series(z)
    } else {
        erfc_cf(z)
    }
}

/// erf by the confluent series erf(z) = 2z/√π · e^{−z²} · Σ (2z²)^k / (2k+1)!!.
fn erf_series(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let z2 = z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= 2.0 * z2 / (2.0 * f64::from(k) + 1.0);
        sum += term;
        if term < 1e-18 * sum || k > 200 {
            break;
        }
    }
    2.0 / std::f64::consts::PI.sqrt() * z * (-z2).exp() * sum
}

/// Tail continued fraction erfc(z) = e^{−z²}/√π · 1/(z + ½/(z + 1/(z + 3/2/(z + ...)))),
/// evaluated by the modified Lentz algorithm.
fn erfc_cf(z: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / z;
    let mut h = d;
    for n in 1..200 {
        let a_n = 0.5 * f64::from(n);
        // b_n = z for every level
        d = z + a_n * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = z + a_n / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / std::f64::consts::PI.sqrt() * h
}

/// Student-t CDF with `df` degrees of freedom, relative error below 1e-8.
pub fn student_t_cdf(x: f64, df: u32) -> Result<f64> {
    if df == 0 {
        return Err(Error::domain("t distribution needs df >= 1"));
    }
    let v = f64::from(df);
    let tail = 0.5 * reg_inc_beta(0.5 * v, 0.5, v / (v + x * x));
    Ok(if x >= 0.0 { 1.0 - tail } else { tail })
}

/// Student-t quantile: solves `student_t_cdf(x, df) = p` by expanding a
/// bracket and bisecting it to machine width.
pub fn student_t_quantile(p: f64, df: u32) -> Result<f64> {
    if df == 0 {
        return Err(Error::domain("t distribution needs df >= 1"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("quantile probability {p} not in (0, 1)")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Solve in the upper half and mirror.
    let target = if p > 0.5 { p } else { 1.0 - p };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while student_t_cdf(hi, df)? < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::domain("t quantile bracket overflow"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if student_t_cdf(mid, df)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * mid.max(1.0) {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(if p > 0.5 { x } else { -x })
}

/// Regularized incomplete beta I_x(a, b) (Lentz continued fraction).
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const FPMIN: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..300 {
        let m = f64::from(m);
        let m2 = 2.0 * m;
        // even step
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 3e-16 {
            break;
        }
    }
    h
}

/// Lanczos log-gamma, |relative error| < 2e-10 for positive arguments.
fn ln_gamma(x: f64) -> f64 {
    const COF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let tmp = x + 5.5;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 1.000000000190015;
    let mut y = x;
    for c in COF {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.5066282746310005 * ser / x).ln()
}
