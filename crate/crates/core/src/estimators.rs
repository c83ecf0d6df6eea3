//! Rolling second-difference quadratic covariation and the estimators built
//! on it.
//!
//! Inputs are cumulative processes sampled at block boundaries
//! ([`BlockSeries`]): an integrated-volatility estimate built additively from
//! block-local TSRVs, and the cumulative trade count.

use crate::error::{invalid, Error, Result};
use crate::simulate::TickSeries;
use crate::timegrid::{BlockGrid, WindowSpec};

/// A cumulative process evaluated at `t_0, …, t_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSeries {
    grid: BlockGrid,
    values: Vec<f64>,
}

impl BlockSeries {
    pub fn new(grid: BlockGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.blocks() + 1 {
            return Err(invalid(format!(
                "block series needs {} values, got {}",
                grid.blocks() + 1,
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Evaluate `f(t_i)` at every boundary.
    pub fn from_fn(grid: BlockGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.boundaries().into_iter().map(f).collect();
        Self { grid, values }
    }

    /// Cumulative sums of per-block contributions, starting from 0.
    pub fn from_increments(grid: BlockGrid, increments: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(increments.len() + 1);
        let mut acc = 0.0;
        values.push(acc);
        for v in increments {
            acc += v;
            values.push(acc);
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &BlockGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `value(t_hi) − value(t_lo)`.
    pub fn increment(&self, lo: usize, hi: usize) -> f64 {
        self.values[hi] - self.values[lo]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

fn check_same_grid(a: &BlockSeries, b: &BlockSeries) -> Result<()> {
    if a.grid.same_as(&b.grid) {
        Ok(())
    } else {
        Err(invalid("series live on different block grids"))
    }
}

/// `Θ(t_{i+K}) − 2Θ(t_i) + Θ(t_{i−K})`.
pub fn second_diff(series: &BlockSeries, i: usize, k: usize) -> Result<f64> {
    if k == 0 || i < k || i + k > series.grid.blocks() {
        return Err(invalid(format!(
            "index {i} with K={k} outside [K, B-K], B={}",
            series.grid.blocks()
        )));
    }
    Ok(unchecked_second_diff(&series.values, i, k))
}

#[inline]
fn unchecked_second_diff(v: &[f64], i: usize, k: usize) -> f64 {
    (v[i + k] - v[i]) - (v[i] - v[i - k])
}

/// `QV_{B,K}(A, B) = K⁻¹ Σ_{i=K}^{B−K} ∂²A_i ∂²B_i`.
pub fn rolling_qv(a: &BlockSeries, b: &BlockSeries, k: usize) -> Result<f64> {
    check_same_grid(a, b)?;
    let window = WindowSpec::new(k, &a.grid)?;
    let sum: f64 = window
        .centres(&a.grid)
        .map(|i| unchecked_second_diff(&a.values, i, k) * unchecked_second_diff(&b.values, i, k))
        .sum();
    Ok(sum / k as f64)
}

/// `(3/2)·QV/(KΔ)²`.
pub fn scale_qv(qv: f64, k: usize, delta: f64) -> f64 {
    let width = k as f64 * delta;
    1.5 * qv / (width * width)
}

/// Single-scale estimator `(3/2)·QV_{B,K}(A,B)/(KΔ)²`, with `Δ` taken from
/// the shared grid.
pub fn qv_scaled(a: &BlockSeries, b: &BlockSeries, k: usize) -> Result<f64> {
    let qv = rolling_qv(a, b, k)?;
    Ok(scale_qv(qv, k, a.grid.delta()))
}

/// Two window scales `K1 < K2 = γ·K1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TsqcConfig {
    pub k1: usize,
    pub gamma_ratio: usize,
}

impl TsqcConfig {
    pub fn new(k1: usize, gamma_ratio: usize) -> Result<Self> {
        if k1 == 0 {
            return Err(invalid("K1 must be >= 1"));
        }
        if gamma_ratio < 2 {
            return Err(invalid(format!(
                "gamma ratio must be >= 2, got {gamma_ratio}"
            )));
        }
        Ok(Self { k1, gamma_ratio })
    }

    pub fn k2(&self) -> usize {
        self.k1 * self.gamma_ratio
    }

    pub fn check(&self, grid: &BlockGrid) -> Result<()> {
        if 2 * self.k2() > grid.blocks() {
            return Err(invalid(format!(
                "K2 = {} exceeds B/2 with B = {}",
                self.k2(),
                grid.blocks()
            )));
        }
        Ok(())
    }
}

/// `(3/2)(QV_{K2} − QV_{K1}) / ((K2² − K1²)Δ²)`.
pub fn tsqc_from_qv(qv_k1: f64, qv_k2: f64, k1: usize, k2: usize, delta: f64) -> f64 {
    let (k1, k2) = (k1 as f64, k2 as f64);
    1.5 * (qv_k2 - qv_k1) / ((k2 * k2 - k1 * k1) * delta * delta)
}

/// Two Scales Quadratic Covariation of `a` and `b`.
pub fn tsqc(a: &BlockSeries, b: &BlockSeries, cfg: TsqcConfig) -> Result<f64> {
    check_same_grid(a, b)?;
    cfg.check(&a.grid)?;
    let q1 = rolling_qv(a, b, cfg.k1)?;
    let q2 = rolling_qv(a, b, cfg.k2())?;
    Ok(tsqc_from_qv(q1, q2, cfg.k1, cfg.k2(), a.grid.delta()))
}

/// Correlation estimate, clamped into `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoEstimate {
    pub value: f64,
    pub clamped: bool,
}

/// `cross / √(diag_a·diag_b)`; both diagonals must be positive.
pub fn rho_from_parts(cross: f64, diag_a: f64, diag_b: f64) -> Result<RhoEstimate> {
    if !(diag_a > 0.0 && diag_b > 0.0) {
        return Err(Error::UndefinedEstimate { diag_a, diag_b });
    }
    let raw = cross / (diag_a * diag_b).sqrt();
    let value = raw.clamp(-1.0, 1.0);
    Ok(RhoEstimate {
        value,
        clamped: value != raw,
    })
}

pub fn beta_from_parts(cross: f64, diag_b: f64) -> Result<f64> {
    if !(diag_b > 0.0) {
        return Err(Error::UndefinedEstimate {
            diag_a: f64::NAN,
            diag_b,
        });
    }
    Ok(cross / diag_b)
}

/// `ρ_TSQC(A, B)`.
pub fn rho_tsqc(a: &BlockSeries, b: &BlockSeries, cfg: TsqcConfig) -> Result<RhoEstimate> {
    let cross = tsqc(a, b, cfg)?;
    let da = tsqc(a, a, cfg)?;
    let db = tsqc(b, b, cfg)?;
    rho_from_parts(cross, da, db)
}

/// `β = TSQC(A, B) / TSQC(B, B)`.
pub fn beta_tsqc(a: &BlockSeries, b: &BlockSeries, cfg: TsqcConfig) -> Result<f64> {
    let cross = tsqc(a, b, cfg)?;
    let db = tsqc(b, b, cfg)?;
    beta_from_parts(cross, db)
}

/// Rolling leverage estimator
/// `(KΔ)⁻¹ K⁻¹ Σ ∂²Θ̂_i (X(t_{i+K}) − X(t_{i−K}))`.
pub fn leverage_qv(theta_hat: &BlockSeries, x: &BlockSeries, k: usize) -> Result<f64> {
    check_same_grid(theta_hat, x)?;
    let window = WindowSpec::new(k, &theta_hat.grid)?;
    let sum: f64 = window
        .centres(&theta_hat.grid)
        .map(|i| {
            unchecked_second_diff(&theta_hat.values, i, k) * (x.values[i + k] - x.values[i - k])
        })
        .sum();
    Ok(sum / (k as f64 * k as f64 * theta_hat.grid.delta()))
}

/// Non-overlapping means of `m` consecutive prices, stamped at the last tick
/// of each group. A trailing partial group is dropped.
pub fn preaverage(ticks: &TickSeries, m: usize) -> Result<TickSeries> {
    let (times, prices) = preaverage_slices(ticks.times(), ticks.prices(), m)?;
    TickSeries::new(times, prices)
}

fn preaverage_slices(times: &[f64], prices: &[f64], m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if m == 0 {
        return Err(invalid("pre-averaging window must be >= 1"));
    }
    let groups = prices.len() / m;
    let mut out_t = Vec::with_capacity(groups);
    let mut out_p = Vec::with_capacity(groups);
    for g in 0..groups {
        let chunk = &prices[g * m..(g + 1) * m];
        out_p.push(chunk.iter().sum::<f64>() / m as f64);
        out_t.push(times[(g + 1) * m - 1]);
    }
    Ok((out_t, out_p))
}

/// `[Ȳ,Ȳ]^{(K)} = K⁻¹ Σ_{i=1}^{N−K} (Ȳ_{i+K} − Ȳ_i)²`.
fn subsampled_rv(y: &[f64], k: usize) -> f64 {
    y.windows(k + 1)
        .map(|w| {
            let d = w[k] - w[0];
            d * d
        })
        .sum::<f64>()
        / k as f64
}

/// Two-scales realized variance of a (pre-averaged) price sequence:
/// `{(1 − (K−J+1/3)/N)(K−J)}⁻¹ {K[Ȳ,Ȳ]^{(K)} − J[Ȳ,Ȳ]^{(J)}}`.
pub fn tsrv(ybar: &[f64], k: usize, j: usize) -> Result<f64> {
    let n = ybar.len();
    if !(j >= 1 && k > j) {
        return Err(invalid(format!(
            "TSRV scales need K > J >= 1, got K={k} J={j}"
        )));
    }
    if n <= k {
        return Err(invalid(format!("TSRV needs N > K, got N={n} K={k}")));
    }
    let (kf, jf, nf) = (k as f64, j as f64, n as f64);
    let norm = (1.0 - (kf - jf + 1.0 / 3.0) / nf) * (kf - jf);
    Ok((kf * subsampled_rv(ybar, k) - jf * subsampled_rv(ybar, j)) / norm)
}

/// Additive integrated-variance estimate: block-local TSRV on pre-averaged
/// ticks, cumulated over blocks. Returns the series and the number of blocks
/// too sparse to estimate (those contribute zero).
pub fn integrated_vol_series(
    ticks: &TickSeries,
    grid: &BlockGrid,
    m: usize,
    k: usize,
    j: usize,
) -> Result<(BlockSeries, usize)> {
    if m == 0 {
        return Err(invalid("pre-averaging window must be >= 1"));
    }
    if !(j >= 1 && k > j) {
        return Err(invalid(format!(
            "TSRV scales need K > J >= 1, got K={k} J={j}"
        )));
    }
    let mut sparse = 0;
    let mut contributions = Vec::with_capacity(grid.blocks());
    for i in 1..=grid.blocks() {
        let lo = if i == 1 {
            f64::NEG_INFINITY
        } else {
            grid.boundary(i - 1)
        };
        let (t, p) = ticks.window(lo, grid.boundary(i));
        let (_, ybar) = preaverage_slices(t, p, m)?;
        if ybar.len() <= k {
            sparse += 1;
            contributions.push(0.0);
        } else {
            contributions.push(tsrv(&ybar, k, j)?);
        }
    }
    Ok((BlockSeries::from_increments(*grid, &contributions)?, sparse))
}

/// `scale·#{T_j ≤ t_i}` at every boundary.
pub fn cumulative_count(times: &[f64], grid: &BlockGrid, scale: f64) -> Result<BlockSeries> {
    if times.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(invalid("event times must be sorted ascending"));
    }
    Ok(BlockSeries::from_fn(*grid, |t| {
        scale * times.partition_point(|&x| x <= t) as f64
    }))
}

/// Default pre-averaging window: `⌈√(ticks per block)⌉`, at least 1.
pub fn default_preaverage_window(tick_count: usize, blocks: usize) -> usize {
    let per_block = tick_count as f64 / blocks.max(1) as f64;
    (per_block.sqrt().ceil() as usize).max(1)
}

/// Tuning knobs for one day's estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSettings {
    pub blocks: usize,
    pub tsqc: TsqcConfig,
    /// `None` selects [`default_preaverage_window`].
    pub preavg: Option<usize>,
    pub tsrv_k: usize,
    pub tsrv_j: usize,
    pub count_scale: f64,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            blocks: 390,
            tsqc: TsqcConfig {
                k1: 10,
                gamma_ratio: 2,
            },
            preavg: None,
            tsrv_k: 2,
            tsrv_j: 1,
            count_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub qv_ss: f64,
    pub qv_sl: f64,
    pub qv_ll: f64,
    /// `None` when a diagonal TSQC is nonpositive.
    pub rho_hat: Option<f64>,
    pub rho_clamped: bool,
    pub beta_hat: Option<f64>,
    pub leverage: Option<f64>,
    pub k1: usize,
    pub gamma_ratio: usize,
    pub blocks: usize,
    pub preavg: usize,
    pub tick_count: usize,
    pub sparse_blocks: usize,
    pub count_scale: f64,
}

impl EstimateReport {
    /// No undefined ratio, no clamping and no sparse blocks.
    pub fn is_clean(&self) -> bool {
        self.rho_hat.is_some()
            && self.beta_hat.is_some()
            && !self.rho_clamped
            && self.sparse_blocks == 0
    }
}

/// The intermediate series of [`estimate_ticks`].
#[derive(Debug, Clone)]
pub struct DaySeries {
    pub theta_hat: BlockSeries,
    pub lambda_hat: BlockSeries,
    pub sparse_blocks: usize,
    pub preavg: usize,
}

pub fn day_series(
    ticks: &TickSeries,
    horizon: f64,
    settings: &EstimatorSettings,
) -> Result<DaySeries> {
    let grid = BlockGrid::new(horizon, settings.blocks)?;
    settings.tsqc.check(&grid)?;
    let m = settings
        .preavg
        .unwrap_or_else(|| default_preaverage_window(ticks.len(), settings.blocks));
    let (theta_hat, sparse_blocks) =
        integrated_vol_series(ticks, &grid, m, settings.tsrv_k, settings.tsrv_j)?;
    let lambda_hat = cumulative_count(ticks.times(), &grid, settings.count_scale)?;
    Ok(DaySeries {
        theta_hat,
        lambda_hat,
        sparse_blocks,
        preavg: m,
    })
}

/// TSQC covariance matrix of (integrated variance, cumulative count) for one
/// day of ticks on `[0, horizon]`, with ρ, β and the rolling leverage
/// estimate at scale `K1`.
pub fn estimate_ticks(
    ticks: &TickSeries,
    horizon: f64,
    settings: &EstimatorSettings,
) -> Result<EstimateReport> {
    let day = day_series(ticks, horizon, settings)?;
    let cfg = settings.tsqc;
    let qv_ss = tsqc(&day.theta_hat, &day.theta_hat, cfg)?;
    let qv_sl = tsqc(&day.theta_hat, &day.lambda_hat, cfg)?;
    let qv_ll = tsqc(&day.lambda_hat, &day.lambda_hat, cfg)?;
    let rho = rho_from_parts(qv_sl, qv_ss, qv_ll).ok();
    let beta = beta_from_parts(qv_sl, qv_ll).ok();

    let grid = *day.theta_hat.grid();
    let leverage = if ticks.is_empty() {
        None
    } else {
        let first = ticks.prices()[0];
        let x = BlockSeries::from_fn(grid, |t| {
            let idx = ticks.times().partition_point(|&s| s <= t);
            if idx == 0 {
                first
            } else {
                ticks.prices()[idx - 1]
            }
        });
        leverage_qv(&day.theta_hat, &x, cfg.k1).ok()
    };

    Ok(EstimateReport {
        qv_ss,
        qv_sl,
        qv_ll,
        rho_hat: rho.map(|r| r.value),
        rho_clamped: rho.is_some_and(|r| r.clamped),
        beta_hat: beta,
        leverage,
        k1: cfg.k1,
        gamma_ratio: cfg.gamma_ratio,
        blocks: settings.blocks,
        preavg: day.preavg,
        tick_count: ticks.len(),
        sparse_blocks: day.sparse_blocks,
        count_scale: settings.count_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(blocks: usize) -> BlockGrid {
        BlockGrid::new(1.0, blocks).unwrap()
    }

    fn series(values: &[f64]) -> BlockSeries {
        BlockSeries::new(grid(values.len() - 1), values.to_vec()).unwrap()
    }

    #[test]
    fn second_differences() {
        let s = series(&[0.0, 1.0, 3.0, 6.0, 10.0]);
        assert_eq!(second_diff(&s, 2, 1).unwrap(), 1.0);
        assert_eq!(second_diff(&series(&[2.0; 5]), 2, 1).unwrap(), 0.0);
        let lin = BlockSeries::from_fn(grid(8), |t| 3.0 * t);
        for i in 2..=6 {
            assert!(second_diff(&lin, i, 2).unwrap().abs() < 1e-15);
        }
        assert!(second_diff(&s, 0, 1).is_err());
        assert!(second_diff(&s, 4, 1).is_err());
    }

    #[test]
    fn rolling_qv_by_hand() {
        let s = series(&[0.0, 1.0, 3.0, 6.0, 10.0]);
        assert_eq!(rolling_qv(&s, &s, 1).unwrap(), 3.0);
        let lin = BlockSeries::from_fn(grid(4), |t| 2.0 + t);
        assert!(rolling_qv(&s, &lin, 1).unwrap().abs() < 1e-15);
        assert!(rolling_qv(&s, &series(&[0.0; 6]), 1).is_err());
        assert!(rolling_qv(&s, &s, 3).is_err());
        assert_eq!(qv_scaled(&s, &s, 1).unwrap(), 72.0);
    }

    #[test]
    fn scaled_qv_homogeneity() {
        assert_eq!(scale_qv(3.0, 1, 0.25), 72.0);
        assert_eq!(scale_qv(0.0, 3, 0.25), 0.0);
        assert_eq!(scale_qv(3.0, 1, 0.5), 18.0);
    }

    #[test]
    fn tsqc_by_hand() {
        let v = tsqc_from_qv(0.10, 0.40, 1, 2, 0.1);
        assert!((v - 15.0).abs() < 1e-12);
        assert_eq!(tsqc_from_qv(0.3, 0.3, 2, 4, 0.1), 0.0);
        assert!(TsqcConfig::new(2, 1).is_err());
        let cfg = TsqcConfig::new(3, 2).unwrap();
        let s = BlockSeries::from_fn(grid(10), |t| t * t * t);
        assert!(tsqc(&s, &s, cfg).is_err());
    }

    #[test]
    fn tsqc_is_symmetric() {
        let g = grid(40);
        let a = BlockSeries::from_fn(g, |t| (7.0 * t).sin() + t * t);
        let b = BlockSeries::from_fn(g, |t| (3.0 * t).cos() * t);
        let cfg = TsqcConfig::new(2, 3).unwrap();
        let ab = tsqc(&a, &b, cfg).unwrap();
        assert!(ab.is_finite());
        assert_eq!(ab, tsqc(&b, &a, cfg).unwrap());
    }

    #[test]
    fn rho_and_beta_edge_cases() {
        let g = grid(40);
        let a = BlockSeries::from_fn(g, |t| (9.0 * t).sin());
        let cfg = TsqcConfig::new(2, 2).unwrap();
        let r = rho_tsqc(&a, &a, cfg).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(!r.clamped);
        let b = a.scaled(-2.5);
        assert!((beta_tsqc(&b, &a, cfg).unwrap() + 2.5).abs() < 1e-12);

        let flat = BlockSeries::from_fn(g, |t| t);
        match rho_tsqc(&a, &flat, cfg) {
            Err(Error::UndefinedEstimate { diag_a, diag_b }) => {
                assert!(diag_a > 0.0);
                assert!(diag_b.abs() < 1e-20);
            }
            other => panic!("expected undefined estimate, got {other:?}"),
        }
        assert!(beta_tsqc(&a, &flat, cfg).is_err());
        assert_eq!(beta_from_parts(0.0, 2.0).unwrap(), 0.0);

        let c = rho_from_parts(3.0, 1.0, 4.0).unwrap();
        assert_eq!(c.value, 1.0);
        assert!(c.clamped);
    }

    #[test]
    fn leverage_vanishes_on_degenerate_inputs() {
        let g = grid(20);
        let wiggly = BlockSeries::from_fn(g, |t| (13.0 * t).sin());
        let affine = BlockSeries::from_fn(g, |t| 1.0 - 2.0 * t);
        let flat = BlockSeries::from_fn(g, |_| 4.0);
        assert!(leverage_qv(&affine, &wiggly, 3).unwrap().abs() < 1e-12);
        assert_eq!(leverage_qv(&wiggly, &flat, 3).unwrap(), 0.0);
    }

    #[test]
    fn preaveraging() {
        let ticks = TickSeries::new(vec![0.1, 0.2, 0.3, 0.4], vec![1.0, 3.0, 5.0, 7.0]).unwrap();
        let avg = preaverage(&ticks, 2).unwrap();
        assert_eq!(avg.prices(), &[2.0, 6.0]);
        assert_eq!(avg.times(), &[0.2, 0.4]);
        assert_eq!(preaverage(&ticks, 1).unwrap(), ticks);
        let ten = TickSeries::new(
            (1..=10).map(|i| i as f64).collect(),
            (1..=10).map(|i| i as f64).collect(),
        )
        .unwrap();
        assert_eq!(preaverage(&ten, 3).unwrap().len(), 3);
        assert!(preaverage(&TickSeries::default(), 4).unwrap().is_empty());
    }

    #[test]
    fn tsrv_by_hand() {
        assert_eq!(tsrv(&[4.0; 10], 2, 1).unwrap(), 0.0);
        let v = tsrv(&[0.0, 1.0, 0.0, 1.0, 0.0], 2, 1).unwrap();
        assert!((v + 60.0 / 11.0).abs() < 1e-12);
        assert!(tsrv(&[0.0, 1.0], 2, 1).is_err());
        assert!(tsrv(&[0.0, 1.0, 2.0, 3.0], 1, 1).is_err());
    }

    #[test]
    fn block_tsrv_quadruples_under_doubling() {
        let n = 400;
        let times: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let prices: Vec<f64> = (0..n).map(|i| ((i * 7919) % 101) as f64 / 100.0).collect();
        let ticks = TickSeries::new(times, prices).unwrap();
        let g = grid(8);
        let (a, sa) = integrated_vol_series(&ticks, &g, 2, 2, 1).unwrap();
        let (b, _) = integrated_vol_series(&ticks.map_prices(|p| 2.0 * p), &g, 2, 2, 1).unwrap();
        assert_eq!(sa, 0);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((4.0 * x - y).abs() < 1e-9 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn sparse_blocks_contribute_zero() {
        let g = grid(6);
        let (s, sparse) = integrated_vol_series(&TickSeries::default(), &g, 1, 2, 1).unwrap();
        assert_eq!(sparse, 6);
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn counting() {
        let g = BlockGrid::new(1.0, 2).unwrap();
        let c = cumulative_count(&[0.1, 0.2, 0.7], &g, 1.0).unwrap();
        assert_eq!(c.values(), &[0.0, 2.0, 3.0]);
        let c = cumulative_count(&[0.1, 0.2, 0.7], &g, 1e-6).unwrap();
        assert_eq!(c.values(), &[0.0, 2e-6, 3e-6]);
        assert!(cumulative_count(&[], &g, 1.0)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        assert!(cumulative_count(&[0.5, 0.2], &g, 1.0).is_err());
    }

    #[test]
    fn default_window() {
        assert_eq!(default_preaverage_window(400 * 100, 100), 20);
        assert_eq!(default_preaverage_window(401 * 100, 100), 21);
        assert_eq!(default_preaverage_window(0, 100), 1);
    }
}
