//! Correlated volatility/intensity model on a fine simulation grid.
//!
//! ```text
//! dσ²  = κ(α − σ²)dt + γ σ dZ
//! dλ_n = β_n(ξ_n − λ_n)dt + ν_n √λ_n dB,    corr(Z, B) = ρ
//! dX   = σ dW
//! ```
//!
//! with `ξ_n = n·ξ`, `ν_n = √n·ν`, `β_n = n^e·β₀`. Both square-root
//! diffusions use full-truncation Euler. Observation times are the jump times
//! of a Cox process with intensity `λ_n`, generated by inverting the
//! trapezoid-cumulated compensator. Observed prices carry additive Gaussian
//! noise.

use std::collections::BTreeSet;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{stream_rng, Stream};

pub const CONFIG_KEYS: [&str; 13] = [
    "kappa",
    "alpha_cir",
    "gamma_vol",
    "xi",
    "beta0",
    "beta_exponent",
    "nu",
    "rho",
    "n",
    "noise_sd",
    "T",
    "sim_steps",
    "seed",
];

/// Optional config keys accepted in addition to [`CONFIG_KEYS`].
pub const OPTIONAL_CONFIG_KEYS: [&str; 1] = ["leverage_rho"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kappa: f64,
    pub alpha_cir: f64,
    pub gamma_vol: f64,
    pub xi: f64,
    pub beta0: f64,
    pub beta_exponent: f64,
    pub nu: f64,
    pub rho: f64,
    pub n: u64,
    pub noise_sd: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub sim_steps: usize,
    /// corr(W, Z); zero unless a leverage effect is wanted.
    #[serde(default)]
    pub leverage_rho: f64,
}

impl ModelParams {
    /// Full-scale parameter set (`n = 40 000`), one trading day.
    pub fn full_scale() -> Self {
        Self {
            kappa: 2.345,
            alpha_cir: 2.172,
            gamma_vol: 1.0,
            xi: 8.912,
            beta0: 0.169,
            beta_exponent: 0.25,
            nu: 1.0,
            rho: 0.912,
            n: 40_000,
            noise_sd: 0.0005,
            horizon: 1.0,
            sim_steps: 1 << 20,
            leverage_rho: 0.0,
        }
    }

    /// Same model at `n = 20 000`, for desk-scale Monte Carlo.
    pub fn desk() -> Self {
        Self {
            n: 20_000,
            ..Self::full_scale()
        }
    }

    pub fn xi_n(&self) -> f64 {
        self.n as f64 * self.xi
    }

    pub fn beta_n(&self) -> f64 {
        (self.n as f64).powf(self.beta_exponent) * self.beta0
    }

    pub fn nu_n(&self) -> f64 {
        (self.n as f64).sqrt() * self.nu
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.sim_steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("kappa", self.kappa),
            ("alpha_cir", self.alpha_cir),
            ("gamma_vol", self.gamma_vol),
            ("xi", self.xi),
            ("beta0", self.beta0),
            ("nu", self.nu),
            ("T", self.horizon),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.noise_sd.is_finite() && self.noise_sd >= 0.0) {
            return Err(invalid(format!(
                "noise_sd must be >= 0, got {}",
                self.noise_sd
            )));
        }
        if !self.beta_exponent.is_finite() {
            return Err(invalid("beta_exponent must be finite"));
        }
        if !(self.rho.abs() <= 1.0) {
            return Err(invalid(format!(
                "rho must lie in [-1, 1], got {}",
                self.rho
            )));
        }
        if !(self.leverage_rho.abs() <= 1.0) {
            return Err(invalid(format!(
                "leverage_rho must lie in [-1, 1], got {}",
                self.leverage_rho
            )));
        }
        if self.n == 0 {
            return Err(invalid("n must be >= 1"));
        }
        if self.sim_steps == 0 {
            return Err(invalid("sim_steps must be >= 1"));
        }
        if 2.0 * self.kappa * self.alpha_cir < self.gamma_vol * self.gamma_vol {
            return Err(invalid(
                "Feller condition 2·kappa·alpha_cir >= gamma_vol² violated",
            ));
        }
        if 2.0 * self.beta_n() * self.xi_n() < self.nu_n() * self.nu_n() {
            return Err(invalid("Feller condition 2·beta_n·xi_n >= nu_n² violated"));
        }
        Ok(())
    }
}

/// Model parameters plus the root seed, as read from a config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub model: ModelParams,
    pub seed: u64,
}

#[derive(Deserialize)]
struct RawConfig {
    #[serde(flatten)]
    model: ModelParams,
    seed: u64,
}

impl SimConfig {
    /// Parse TOML. Keys must be exactly [`CONFIG_KEYS`], optionally plus
    /// [`OPTIONAL_CONFIG_KEYS`].
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        let known: BTreeSet<&str> = CONFIG_KEYS
            .iter()
            .chain(OPTIONAL_CONFIG_KEYS.iter())
            .copied()
            .collect();
        if let Some(bad) = table.keys().find(|k| !known.contains(k.as_str())) {
            return Err(Error::Format(format!("unknown config key `{bad}`")));
        }
        if let Some(missing) = CONFIG_KEYS.iter().find(|k| !table.contains_key(**k)) {
            return Err(Error::Format(format!("missing config key `{missing}`")));
        }
        let raw: RawConfig = toml::from_str(text)?;
        raw.model.validate()?;
        Ok(Self {
            model: raw.model,
            seed: raw.seed,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        let m = &self.model;
        let mut s = format!(
            "kappa = {:?}\nalpha_cir = {:?}\ngamma_vol = {:?}\nxi = {:?}\nbeta0 = {:?}\n\
             beta_exponent = {:?}\nnu = {:?}\nrho = {:?}\nn = {}\nnoise_sd = {:?}\nT = {:?}\n\
             sim_steps = {}\nseed = {}\n",
            m.kappa,
            m.alpha_cir,
            m.gamma_vol,
            m.xi,
            m.beta0,
            m.beta_exponent,
            m.nu,
            m.rho,
            m.n,
            m.noise_sd,
            m.horizon,
            m.sim_steps,
            self.seed
        );
        if m.leverage_rho != 0.0 {
            s.push_str(&format!("leverage_rho = {:?}\n", m.leverage_rho));
        }
        s
    }
}

/// Brownian increments over `M` steps of length `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Drivers {
    pub z_inc: Vec<f64>,
    pub b_inc: Vec<f64>,
    pub w_inc: Vec<f64>,
}

/// `Z`, `W` i.i.d. `N(0, dt)`; `B = ρZ + √(1−ρ²)Z⊥`.
pub fn draw_drivers(rho: f64, steps: usize, dt: f64, seed: u64) -> Result<Drivers> {
    draw_correlated_drivers(rho, 0.0, steps, dt, seed)
}

/// As [`draw_drivers`], with `W = ρ_lev·Z + √(1−ρ_lev²)W⊥`.
pub fn draw_correlated_drivers(
    rho: f64,
    leverage_rho: f64,
    steps: usize,
    dt: f64,
    seed: u64,
) -> Result<Drivers> {
    if !(rho.abs() <= 1.0) {
        return Err(invalid(format!("rho must lie in [-1, 1], got {rho}")));
    }
    if !(leverage_rho.abs() <= 1.0) {
        return Err(invalid(format!(
            "leverage_rho must lie in [-1, 1], got {leverage_rho}"
        )));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    let mut rng = stream_rng(seed, Stream::Drivers);
    let sd = dt.sqrt();
    let rho_perp = (1.0 - rho * rho).sqrt();
    let lev_perp = (1.0 - leverage_rho * leverage_rho).sqrt();
    let mut z_inc = Vec::with_capacity(steps);
    let mut b_inc = Vec::with_capacity(steps);
    let mut w_inc = Vec::with_capacity(steps);
    for _ in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        let z_perp: f64 = rng.sample(StandardNormal);
        let w_perp: f64 = rng.sample(StandardNormal);
        z_inc.push(sd * z);
        b_inc.push(sd * (rho * z + rho_perp * z_perp));
        w_inc.push(sd * (leverage_rho * z + lev_perp * w_perp));
    }
    Ok(Drivers {
        z_inc,
        b_inc,
        w_inc,
    })
}

/// Full-truncation Euler for `dx = speed(mean − x)dt + c·φ(x)dB`, with
/// `φ(x) = √x` when `sqrt_form`, else `φ(x) = x`. Returns `x⁺` at every step.
pub fn simulate_cir(
    x0: f64,
    speed: f64,
    mean: f64,
    diffusion: f64,
    sqrt_form: bool,
    increments: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    for (name, v) in [
        ("x0", x0),
        ("speed", speed),
        ("mean", mean),
        ("diffusion", diffusion),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(invalid(format!("{name} must be nonnegative, got {v}")));
        }
    }
    if !(dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    let mut path = Vec::with_capacity(increments.len() + 1);
    let mut x = x0;
    path.push(x0);
    for db in increments {
        let xp = x.max(0.0);
        let scale = if sqrt_form { xp.sqrt() } else { xp };
        x = x + speed * (mean - xp) * dt + diffusion * scale * db;
        path.push(x.max(0.0));
    }
    Ok(path)
}

/// Stationary Gamma draws for `σ²₀` and `λ_{n,0}`.
pub fn draw_initial_states(params: &ModelParams, seed: u64) -> Result<(f64, f64)> {
    params.validate()?;
    let mut rng = stream_rng(seed, Stream::InitialStates);
    let g2 = params.gamma_vol * params.gamma_vol;
    let vol = Gamma::new(
        2.0 * params.kappa * params.alpha_cir / g2,
        g2 / (2.0 * params.kappa),
    )
    .map_err(|e| invalid(e.to_string()))?;
    let nu2 = params.nu_n() * params.nu_n();
    let intensity = Gamma::new(
        2.0 * params.beta_n() * params.xi_n() / nu2,
        nu2 / (2.0 * params.beta_n()),
    )
    .map_err(|e| invalid(e.to_string()))?;
    Ok((vol.sample(&mut rng), intensity.sample(&mut rng)))
}

/// `X_{k+1} = X_k + √σ²_k ΔW_k`, `X_0 = 0`.
pub fn simulate_price(sigma2: &[f64], w_inc: &[f64]) -> Result<Vec<f64>> {
    if sigma2.len() != w_inc.len() + 1 {
        return Err(invalid(format!(
            "sigma2 has {} points but there are {} increments",
            sigma2.len(),
            w_inc.len()
        )));
    }
    let mut x = Vec::with_capacity(sigma2.len());
    let mut level = 0.0;
    x.push(level);
    for (s2, dw) in sigma2.iter().zip(w_inc) {
        level += s2.max(0.0).sqrt() * dw;
        x.push(level);
    }
    Ok(x)
}

/// Cumulative trapezoid integral of a fine-grid path, same length as `path`.
pub fn cumulative_trapezoid(path: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(path.len());
    let mut acc = 0.0;
    out.push(acc);
    for w in path.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * dt;
        out.push(acc);
    }
    out
}

/// Event times of a Cox process with fine-grid intensity `lambda`:
/// unit-exponential partial sums mapped through the piecewise-linear
/// inverse of the trapezoid compensator.
pub fn sample_times(lambda: &[f64], dt: f64, seed: u64) -> Result<Vec<f64>> {
    if lambda.iter().any(|l| !(*l >= 0.0)) {
        return Err(invalid("intensity must be nonnegative"));
    }
    if lambda.len() < 2 {
        return Ok(Vec::new());
    }
    let compensator = cumulative_trapezoid(lambda, dt);
    let total = *compensator.last().unwrap();
    let steps = lambda.len() - 1;
    let horizon = steps as f64 * dt;
    let mut rng = stream_rng(seed, Stream::Arrivals);
    let mut times = Vec::with_capacity((total * 1.05) as usize + 16);
    let mut target = 0.0;
    let mut k = 0;
    loop {
        let e: f64 = Exp1.sample(&mut rng);
        target += e;
        if target > total {
            break;
        }
        while compensator[k + 1] < target {
            k += 1;
        }
        let lo = compensator[k];
        let width = compensator[k + 1] - lo;
        let frac = if width > 0.0 {
            (target - lo) / width
        } else {
            1.0
        };
        let t = if k + 1 == steps && frac >= 1.0 {
            horizon
        } else {
            ((k as f64 + frac) * dt).min(horizon)
        };
        if t > 0.0 && times.last().map_or(true, |&prev| t > prev) {
            times.push(t);
        }
    }
    Ok(times)
}

/// Observed ticks, strictly increasing in time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TickSeries {
    times: Vec<f64>,
    prices: Vec<f64>,
}

impl TickSeries {
    pub fn new(times: Vec<f64>, prices: Vec<f64>) -> Result<Self> {
        if times.len() != prices.len() {
            return Err(invalid(format!(
                "{} times but {} prices",
                times.len(),
                prices.len()
            )));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("tick times must be strictly increasing"));
        }
        Ok(Self { times, prices })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Ticks with `lo < t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> (&[f64], &[f64]) {
        let a = self.times.partition_point(|&t| t <= lo);
        let b = self.times.partition_point(|&t| t <= hi);
        (&self.times[a..b], &self.prices[a..b])
    }

    pub fn map_prices(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            times: self.times.clone(),
            prices: self.prices.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// `Y_i = X(t_i) + ε_i`, with `X` read at the nearest fine-grid point at or
/// left of `t_i`.
pub fn add_noise(
    x: &[f64],
    dt: f64,
    times: &[f64],
    noise_sd: f64,
    seed: u64,
) -> Result<TickSeries> {
    if x.is_empty() {
        return Err(invalid("empty price path"));
    }
    if !(noise_sd >= 0.0) {
        return Err(invalid("noise_sd must be nonnegative"));
    }
    let last = x.len() - 1;
    let horizon = last as f64 * dt;
    let mut rng = stream_rng(seed, Stream::Noise);
    let mut prices = Vec::with_capacity(times.len());
    for &t in times {
        if !(t >= 0.0 && t <= horizon * (1.0 + 1e-12)) {
            return Err(invalid(format!("tick time {t} outside [0, {horizon}]")));
        }
        let idx = ((t / dt).floor() as usize).min(last);
        let eps: f64 = rng.sample(StandardNormal);
        prices.push(x[idx] + noise_sd * eps);
    }
    TickSeries::new(times.to_vec(), prices)
}

/// Fine-grid sample paths of one simulated day.
#[derive(Debug, Clone)]
pub struct LatentPaths {
    pub dt: f64,
    pub times: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub lambda_n: Vec<f64>,
    pub x: Vec<f64>,
    pub drivers: Drivers,
}

impl LatentPaths {
    pub fn steps(&self) -> usize {
        self.sigma2.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// `σ_s = √σ²_s` on the fine grid.
    pub fn sigma(&self) -> Vec<f64> {
        self.sigma2.iter().map(|v| v.sqrt()).collect()
    }

    /// Trapezoid integral of `path` evaluated at arbitrary times (linear
    /// interpolation between fine-grid points).
    pub fn integrate_at(&self, path: &[f64], at: &[f64]) -> Vec<f64> {
        let cum = cumulative_trapezoid(path, self.dt);
        let last = cum.len() - 1;
        at.iter()
            .map(|&t| {
                let pos = (t / self.dt).clamp(0.0, last as f64);
                let k = (pos.floor() as usize).min(last);
                if k == last {
                    return cum[last];
                }
                let frac = pos - k as f64;
                cum[k] + frac * (cum[k + 1] - cum[k])
            })
            .collect()
    }
}

/// Simulate latent paths only (no observation times or noise).
pub fn simulate_latent(params: &ModelParams, seed: u64) -> Result<LatentPaths> {
    params.validate()?;
    let steps = params.sim_steps;
    let dt = params.dt();
    let drivers = draw_correlated_drivers(params.rho, params.leverage_rho, steps, dt, seed)?;
    let (s0, l0) = draw_initial_states(params, seed)?;
    let sigma2 = simulate_cir(
        s0,
        params.kappa,
        params.alpha_cir,
        params.gamma_vol,
        true,
        &drivers.z_inc,
        dt,
    )?;
    let lambda_n = simulate_cir(
        l0,
        params.beta_n(),
        params.xi_n(),
        params.nu_n(),
        true,
        &drivers.b_inc,
        dt,
    )?;
    let x = simulate_price(&sigma2, &drivers.w_inc)?;
    let times = (0..=steps)
        .map(|k| {
            if k == steps {
                params.horizon
            } else {
                k as f64 * dt
            }
        })
        .collect();
    Ok(LatentPaths {
        dt,
        times,
        sigma2,
        lambda_n,
        x,
        drivers,
    })
}

/// One simulated day: latent paths plus the noisy tick series.
pub fn simulate_day(params: &ModelParams, seed: u64) -> Result<(LatentPaths, TickSeries)> {
    let latent = simulate_latent(params, seed)?;
    let times = sample_times(&latent.lambda_n, latent.dt, seed)?;
    let ticks = add_noise(&latent.x, latent.dt, &times, params.noise_sd, seed)?;
    Ok((latent, ticks))
}
