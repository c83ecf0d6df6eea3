//! Monte Carlo deviance study, the window-rate experiment, and daily
//! empirical tables.
//!
//! Replicates are independent work units run on the rayon pool. Results are
//! keyed and sorted before returning, so the tables do not depend on
//! scheduling.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::estimators::{
    beta_from_parts, day_series, estimate_ticks, qv_scaled, rho_from_parts, tsqc, BlockSeries,
    EstimateReport, EstimatorSettings, TsqcConfig,
};
use crate::oracle::{latent_qcv, LatentTruth};
use crate::rng::replicate_seed;
use crate::simulate::{simulate_day, simulate_latent, ModelParams, TickSeries};
use crate::timegrid::BlockGrid;

/// K1 ladder of the deviance preset.
pub const K1_PRESET: [usize; 5] = [5, 10, 20, 40, 80];

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub model: ModelParams,
    pub reps: usize,
    pub k1_list: Vec<usize>,
    pub gamma_ratio: usize,
    pub blocks: usize,
    /// `None`: `⌈√(ticks per block)⌉` per replicate.
    pub preavg: Option<usize>,
    pub tsrv_k: usize,
    pub tsrv_j: usize,
    pub seed: u64,
}

impl McConfig {
    /// Desk-scale deviance study: `n = 20 000`, K1 preset, `γ = 2`.
    pub fn desk(reps: usize, seed: u64) -> Self {
        Self {
            model: ModelParams::desk(),
            reps,
            k1_list: K1_PRESET.to_vec(),
            gamma_ratio: 2,
            blocks: 1040,
            preavg: Some(1),
            tsrv_k: 2,
            tsrv_j: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.reps == 0 {
            return Err(invalid("reps must be >= 1"));
        }
        if self.k1_list.is_empty() {
            return Err(invalid("k1_list is empty"));
        }
        let grid = BlockGrid::new(self.model.horizon, self.blocks)?;
        for &k1 in &self.k1_list {
            TsqcConfig::new(k1, self.gamma_ratio)?.check(&grid)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    QcvSl,
    Rho,
    Beta,
}

impl Target {
    pub const ALL: [Target; 3] = [Target::QcvSl, Target::Rho, Target::Beta];

    pub fn name(&self) -> &'static str {
        match self {
            Target::QcvSl => "qcv_sl",
            Target::Rho => "rho",
            Target::Beta => "beta",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFlag {
    Ok,
    /// ρ̂ was pulled back into `[-1, 1]`.
    Clamped,
    /// A diagonal TSQC was nonpositive; the estimate is `NaN`.
    Undefined,
}

impl RowFlag {
    pub fn name(&self) -> &'static str {
        match self {
            RowFlag::Ok => "ok",
            RowFlag::Clamped => "clamped",
            RowFlag::Undefined => "undefined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevianceRow {
    pub k1: usize,
    pub rep: usize,
    pub target: Target,
    pub estimate: f64,
    pub truth: f64,
    pub deviance: f64,
    pub flag: RowFlag,
}

/// Mean deviance per `(K1, target)` over the defined replicates, with a
/// Monte Carlo standard error and 2.5%/97.5% percentile band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevianceSummary {
    pub k1: usize,
    pub target: Target,
    pub defined: usize,
    pub mean: f64,
    pub std_error: f64,
    pub band_lo: f64,
    pub band_hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub rows: Vec<DevianceRow>,
    pub summary: Vec<DevianceSummary>,
}

fn replicate_rows(cfg: &McConfig, rep: usize) -> Result<Vec<DevianceRow>> {
    let seed = replicate_seed(cfg.seed, rep as u64);
    let (latent, ticks) = simulate_day(&cfg.model, seed)?;
    let truth = LatentTruth::from_paths(&latent);
    drop(latent);

    let largest = *cfg.k1_list.iter().max().unwrap();
    let settings = EstimatorSettings {
        blocks: cfg.blocks,
        tsqc: TsqcConfig::new(largest, cfg.gamma_ratio)?,
        preavg: cfg.preavg,
        tsrv_k: cfg.tsrv_k,
        tsrv_j: cfg.tsrv_j,
        count_scale: 1.0,
    };
    let day = day_series(&ticks, cfg.model.horizon, &settings)?;

    let mut rows = Vec::with_capacity(3 * cfg.k1_list.len());
    for &k1 in &cfg.k1_list {
        let tc = TsqcConfig::new(k1, cfg.gamma_ratio)?;
        let cross = tsqc(&day.theta_hat, &day.lambda_hat, tc)?;
        let ss = tsqc(&day.theta_hat, &day.theta_hat, tc)?;
        let ll = tsqc(&day.lambda_hat, &day.lambda_hat, tc)?;
        let row = |target, estimate: f64, truth: f64, flag| DevianceRow {
            k1,
            rep,
            target,
            estimate,
            truth,
            deviance: estimate - truth,
            flag,
        };
        rows.push(row(Target::QcvSl, cross, truth.qcv_sl, RowFlag::Ok));
        rows.push(match rho_from_parts(cross, ss, ll) {
            Ok(r) => row(
                Target::Rho,
                r.value,
                truth.rho_true,
                if r.clamped {
                    RowFlag::Clamped
                } else {
                    RowFlag::Ok
                },
            ),
            Err(_) => row(Target::Rho, f64::NAN, truth.rho_true, RowFlag::Undefined),
        });
        rows.push(match beta_from_parts(cross, ll) {
            Ok(b) => row(Target::Beta, b, truth.beta_true, RowFlag::Ok),
            Err(_) => row(Target::Beta, f64::NAN, truth.beta_true, RowFlag::Undefined),
        });
    }
    Ok(rows)
}

/// Percentile by linear interpolation on sorted data.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn summarize(rows: &[DevianceRow], k1_list: &[usize]) -> Vec<DevianceSummary> {
    let mut out = Vec::new();
    for &k1 in k1_list {
        for target in Target::ALL {
            let mut devs: Vec<f64> = rows
                .iter()
                .filter(|r| r.k1 == k1 && r.target == target && r.deviance.is_finite())
                .map(|r| r.deviance)
                .collect();
            let (mean, std_error) = mean_and_se(&devs);
            devs.sort_by(|a, b| a.total_cmp(b));
            out.push(DevianceSummary {
                k1,
                target,
                defined: devs.len(),
                mean,
                std_error,
                band_lo: percentile(&devs, 0.025),
                band_hi: percentile(&devs, 0.975),
            });
        }
    }
    out
}

/// Deviance of the TSQC targets from their latent truths, per K1 and
/// replicate. Each replicate simulates one day and is scored at every K1.
pub fn run_mc_deviance(cfg: &McConfig) -> Result<McResult> {
    cfg.validate()?;
    let per_rep: Vec<Result<Vec<DevianceRow>>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| replicate_rows(cfg, rep))
        .collect();
    let mut rows = Vec::with_capacity(cfg.reps * cfg.k1_list.len() * 3);
    for r in per_rep {
        rows.extend(r?);
    }
    rows.sort_by_key(|r| (r.k1, r.rep, r.target));
    let summary = summarize(&rows, &cfg.k1_list);
    Ok(McResult { rows, summary })
}

pub fn write_deviance_csv(writer: impl Write, rows: &[DevianceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "k1", "rep", "target", "estimate", "truth", "deviance", "flag",
    ])?;
    for r in rows {
        w.write_record([
            r.k1.to_string(),
            r.rep.to_string(),
            r.target.to_string(),
            r.estimate.to_string(),
            r.truth.to_string(),
            r.deviance.to_string(),
            r.flag.name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Whitespace-separated per-K1 summary for gnuplot; bands are Monte Carlo
/// percentiles across replicates.
pub fn write_summary_dat(mut writer: impl Write, summary: &[DevianceSummary]) -> Result<()> {
    writeln!(
        writer,
        "# band method: Monte Carlo 2.5%/97.5% percentiles across replicates"
    )?;
    writeln!(
        writer,
        "# k1 target defined mean_deviance std_error band_lo band_hi"
    )?;
    for s in summary {
        writeln!(
            writer,
            "{} {} {} {} {} {} {}",
            s.k1, s.target, s.defined, s.mean, s.std_error, s.band_lo, s.band_hi
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    pub model: ModelParams,
    pub reps: usize,
    pub blocks: usize,
    /// Window half-widths; each gives one `KΔ` ladder point.
    pub k_list: Vec<usize>,
    pub seed: u64,
}

impl RateConfig {
    /// `B = 2¹²` and `K = 2³…2⁸`, i.e. `KΔ = 2⁻⁹…2⁻⁴` on a unit horizon.
    pub fn dyadic(model: ModelParams, reps: usize, seed: u64) -> Self {
        Self {
            model,
            reps,
            blocks: 1 << 12,
            k_list: (3..=8).map(|e| 1usize << e).collect(),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub k: usize,
    pub k_delta: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub points: Vec<RatePoint>,
    pub slope: f64,
    pub slope_se: f64,
}

/// Ordinary least squares slope and its standard error.
pub fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let se = if x.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, se)
}

/// RMSE of the single-scale estimator of `[σ², λ_n/n]` against the
/// fine-grid latent covariation, with `Θ`, `Λ` integrated exactly from the
/// latent paths (no estimation noise), over a ladder of `KΔ`.
pub fn run_rate_experiment(cfg: &RateConfig) -> Result<RateResult> {
    if cfg.k_list.len() < 3 {
        return Err(invalid("rate experiment needs at least 3 ladder points"));
    }
    if cfg.reps == 0 {
        return Err(invalid("reps must be >= 1"));
    }
    cfg.model.validate()?;
    let grid = BlockGrid::new(cfg.model.horizon, cfg.blocks)?;
    for &k in &cfg.k_list {
        crate::timegrid::WindowSpec::new(k, &grid)?;
    }
    let n = cfg.model.n as f64;
    let errors: Vec<Result<Vec<f64>>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let latent = simulate_latent(&cfg.model, replicate_seed(cfg.seed, rep as u64))?;
            let bounds = grid.boundaries();
            let theta = BlockSeries::new(grid, latent.integrate_at(&latent.sigma2, &bounds))?;
            let lambda: Vec<f64> = latent
                .integrate_at(&latent.lambda_n, &bounds)
                .into_iter()
                .map(|v| v / n)
                .collect();
            let lambda = BlockSeries::new(grid, lambda)?;
            let truth = latent_qcv(&latent.sigma2, &latent.lambda_n)? / n;
            cfg.k_list
                .iter()
                .map(|&k| Ok(qv_scaled(&theta, &lambda, k)? - truth))
                .collect()
        })
        .collect();
    let errors: Vec<Vec<f64>> = errors.into_iter().collect::<Result<_>>()?;

    let points: Vec<RatePoint> = cfg
        .k_list
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let mse = errors.iter().map(|e| e[j] * e[j]).sum::<f64>() / cfg.reps as f64;
            RatePoint {
                k,
                k_delta: k as f64 * grid.delta(),
                rmse: mse.sqrt(),
            }
        })
        .collect();
    let x: Vec<f64> = points.iter().map(|p| p.k_delta.log2()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.rmse.log2()).collect();
    let (slope, slope_se) = ols_slope(&x, &y);
    Ok(RateResult {
        points,
        slope,
        slope_se,
    })
}

pub fn write_slopes_csv(writer: impl Write, result: &RateResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "k",
        "k_delta",
        "log2_k_delta",
        "rmse",
        "log2_rmse",
        "fitted_slope",
        "slope_se",
    ])?;
    for p in &result.points {
        w.write_record([
            p.k.to_string(),
            p.k_delta.to_string(),
            p.k_delta.log2().to_string(),
            p.rmse.to_string(),
            p.rmse.log2().to_string(),
            result.slope.to_string(),
            result.slope_se.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One day's estimates, or why the day failed.
#[derive(Debug)]
pub struct DailyRow {
    pub date: String,
    pub result: std::result::Result<EstimateReport, Error>,
}

/// Estimate every day independently (in parallel). Prices are log-transformed
/// when `log_prices` is set. Failing days are kept as error rows.
pub fn run_empirical(
    days: &[(String, TickSeries)],
    settings: &EstimatorSettings,
    log_prices: bool,
) -> Result<Vec<DailyRow>> {
    if days.is_empty() {
        return Err(Error::EmptyInput("no days to estimate".into()));
    }
    let mut rows: Vec<(usize, DailyRow)> = days
        .par_iter()
        .enumerate()
        .map(|(idx, (date, ticks))| {
            let result = if log_prices {
                if ticks.prices().iter().any(|&p| !(p > 0.0)) {
                    Err(invalid("log prices need positive prices"))
                } else {
                    estimate_ticks(&ticks.map_prices(f64::ln), 1.0, settings)
                }
            } else {
                estimate_ticks(ticks, 1.0, settings)
            };
            (
                idx,
                DailyRow {
                    date: date.clone(),
                    result,
                },
            )
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    Ok(rows.into_iter().map(|r| r.1).collect())
}

pub fn write_daily_csv(writer: impl Write, rows: &[DailyRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "date",
        "qv_ss",
        "qv_sl",
        "qv_ll",
        "rho",
        "beta",
        "clamped_flag",
        "sparse_blocks",
    ])?;
    let opt = |v: Option<f64>| v.map_or_else(|| "NaN".to_string(), |x| x.to_string());
    for row in rows {
        match &row.result {
            Ok(r) => w.write_record([
                row.date.clone(),
                r.qv_ss.to_string(),
                r.qv_sl.to_string(),
                r.qv_ll.to_string(),
                opt(r.rho_hat),
                opt(r.beta_hat),
                if r.rho_clamped { "1" } else { "0" }.to_string(),
                r.sparse_blocks.to_string(),
            ])?,
            Err(_) => w.write_record([
                row.date.clone(),
                "NaN".into(),
                "NaN".into(),
                "NaN".into(),
                "NaN".into(),
                "NaN".into(),
                "failed".into(),
                "NaN".into(),
            ])?,
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_recovers_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 1.5, 2.0, 2.5];
        let (s, se) = ols_slope(&x, &y);
        assert!((s - 0.5).abs() < 1e-12);
        assert!(se < 1e-12);
    }

    #[test]
    fn percentiles_interpolate() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.5), 2.0);
        assert_eq!(percentile(&v, 0.125), 0.5);
        assert!(percentile(&[], 0.5).is_nan());
    }

    #[test]
    fn rate_ladder_needs_three_points() {
        let mut cfg = RateConfig::dyadic(ModelParams::desk(), 2, 0);
        cfg.k_list.truncate(2);
        assert!(run_rate_experiment(&cfg).is_err());
    }

    #[test]
    fn mc_config_checks_windows() {
        let mut cfg = McConfig::desk(1, 0);
        cfg.blocks = 100;
        assert!(cfg.validate().is_err());
        cfg.blocks = 320;
        cfg.validate().unwrap();
    }
}
