//! Rolling second-difference estimators of the quadratic covariation between
//! spot processes (spot volatility, trade intensity) observed only through
//! their integrals.
//!
//! The crate is organised bottom-up:
//!
//! - [`timegrid`]: block grids, residue classes and the tent/step weights.
//! - [`simulate`]: the correlated CIR volatility/intensity model with noisy,
//!   intensity-driven observation times.
//! - [`estimators`]: rolling QV, TSQC, TSRV with pre-averaging, ρ, β and
//!   the leverage estimator.
//! - [`oracle`]: brute-force references used by the tests and the harness.
//! - [`ingest`]: tick CSV parsing and session cleaning.
//! - [`experiments`]: Monte Carlo deviance study, rate experiment and daily
//!   empirical tables.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod ingest;
pub mod oracle;
pub mod rng;
pub mod simulate;
pub mod timegrid;

pub use error::{Error, Result};
pub use estimators::{BlockSeries, EstimateReport, TsqcConfig};
pub use simulate::{LatentPaths, ModelParams, TickSeries};
pub use timegrid::{BlockGrid, WindowSpec};
