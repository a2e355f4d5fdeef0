//! Forecast-accuracy comparison toolkit.
//!
//! Implements three tests of equal predictive accuracy for a pair of
//! one-step-ahead forecasts under squared error loss (the Giacomini-White
//! statistic, the Diebold-Mariano test with a Newey-West long-run variance,
//! and a self-normalized subsample t-test), together with the simulation
//! laboratory used to study their size. The laboratory provides the
//! data-generating processes, rolling and expanding window forecasters,
//! closed-form asymptotic variances, a Brownian-functional simulator for
//! the expanding-window limit, and a deterministic parallel Monte Carlo
//! harness.

pub mod accuracy;
pub mod asymptotics;
pub mod dgp;
pub mod dist;
pub mod error;
pub mod forecast;
pub mod harness;
pub mod rng;
pub mod series;

pub use error::{Error, Result};
pub use rng::RandomStream;
pub use series::{LossDiffSeries, Series};
