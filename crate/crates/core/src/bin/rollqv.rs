use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use rollqv::estimators::{EstimatorSettings, TsqcConfig};
use rollqv::experiments::{self, McConfig, RateConfig};
use rollqv::ingest::{self, SessionWindow};
use rollqv::simulate::{simulate_day, SimConfig};
use rollqv::TickSeries;

#[derive(Parser)]
#[command(
    name = "rollqv",
    version,
    about = "Rolling quadratic covariation of volatility and trade intensity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one day of the volatility/intensity model.
    Simulate(SimulateArgs),
    /// Clean a raw `timestamp_ns,price` tick file into session days.
    Ingest(IngestArgs),
    /// Daily TSQC estimates from one cleaned tick file.
    Estimate(EstimateArgs),
    /// Daily TSQC estimates from several cleaned tick files.
    Empirical(EmpiricalArgs),
    /// Monte Carlo deviance study over a K1 ladder.
    Mc(McArgs),
    /// Window-rate experiment on latent paths.
    Rate(RateArgs),
}

#[derive(Args)]
struct SessionArgs {
    /// Trading session, local wall clock.
    #[arg(long, default_value = "09:45-15:45")]
    session: SessionWindow,
    /// UTC offset of the session's wall clock.
    #[arg(long, default_value = "-05:00", allow_hyphen_values = true)]
    tz: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Calendar date the simulated session is stamped with.
    #[arg(long, default_value = "2018-01-02")]
    date: NaiveDate,
    #[command(flatten)]
    session: SessionArgs,
    /// Price level at X = 0; ticks are written as price0·exp(Y).
    #[arg(long, default_value_t = 100.0)]
    price0: f64,
    /// Write every `stride`-th fine-grid point to latent.csv.
    #[arg(long, default_value_t = 1)]
    latent_stride: usize,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    session: SessionArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimatorArgs {
    #[arg(long, default_value_t = 390)]
    blocks: usize,
    #[arg(long, default_value_t = 10)]
    k1: usize,
    #[arg(long, default_value_t = 2)]
    gamma: usize,
    /// Pre-averaging window; defaults to ⌈√(ticks per block)⌉.
    #[arg(long)]
    preavg: Option<usize>,
    #[arg(long, default_value_t = 2)]
    tsrv_k: usize,
    #[arg(long, default_value_t = 1)]
    tsrv_j: usize,
    #[arg(long, default_value_t = 1e-6)]
    count_scale: f64,
    /// Estimate on raw prices instead of log-prices.
    #[arg(long)]
    no_log: bool,
}

impl EstimatorArgs {
    fn settings(&self) -> Result<EstimatorSettings> {
        Ok(EstimatorSettings {
            blocks: self.blocks,
            tsqc: TsqcConfig::new(self.k1, self.gamma)?,
            preavg: self.preavg,
            tsrv_k: self.tsrv_k,
            tsrv_j: self.tsrv_j,
            count_scale: self.count_scale,
        })
    }
}

#[derive(Args)]
struct EstimateArgs {
    /// Cleaned tick file (output of `ingest`).
    #[arg(long)]
    ticks: PathBuf,
    #[command(flatten)]
    est: EstimatorArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EmpiricalArgs {
    /// Cleaned tick files, one or more days each.
    #[arg(long, num_args = 1.., required = true)]
    days: Vec<PathBuf>,
    #[command(flatten)]
    est: EstimatorArgs,
    #[arg(long, default_value = "daily.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct McArgs {
    /// Model config (same file as `simulate`).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, value_delimiter = ',', default_values_t = experiments::K1_PRESET)]
    k1: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    gamma: usize,
    #[arg(long, default_value_t = 1040)]
    blocks: usize,
    /// Pre-averaging window; 0 selects ⌈√(ticks per block)⌉.
    #[arg(long, default_value_t = 1)]
    preavg: usize,
    #[arg(long, default_value_t = 2)]
    tsrv_k: usize,
    #[arg(long, default_value_t = 1)]
    tsrv_j: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    #[arg(long, default_value_t = 4096)]
    blocks: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32, 64, 128, 256])]
    k: Vec<usize>,
    #[arg(long, default_value = "slopes.csv")]
    out: PathBuf,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let cfg = SimConfig::from_path(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let tz = ingest::parse_offset(&args.session.tz)?;
    if args.latent_stride == 0 {
        bail!("--latent-stride must be >= 1");
    }
    let (latent, ticks) = simulate_day(&cfg.model, cfg.seed)?;
    std::fs::create_dir_all(&args.out_dir)?;

    let mut w = csv::Writer::from_writer(create(&args.out_dir.join("latent.csv"))?);
    w.write_record(["time", "sigma2", "lambda", "X"])?;
    for k in (0..=latent.steps()).step_by(args.latent_stride) {
        w.write_record([
            latent.times[k].to_string(),
            latent.sigma2[k].to_string(),
            latent.lambda_n[k].to_string(),
            latent.x[k].to_string(),
        ])?;
    }
    w.flush()?;

    let horizon = cfg.model.horizon;
    let mut w = csv::Writer::from_writer(create(&args.out_dir.join("ticks.csv"))?);
    w.write_record(["timestamp", "price"])?;
    for (t, y) in ticks.times().iter().zip(ticks.prices()) {
        let ts = args.session.session.epoch_ns(args.date, tz, t / horizon);
        w.write_record([ts.to_string(), (args.price0 * y.exp()).to_string()])?;
    }
    w.flush()?;
    eprintln!(
        "simulated {} ticks over {} fine steps into {}",
        ticks.len(),
        latent.steps(),
        args.out_dir.display()
    );
    Ok(())
}

fn ingest_cmd(args: IngestArgs) -> Result<()> {
    let raw = ingest::parse_ticks(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let tz = ingest::parse_offset(&args.session.tz)?;
    let days = ingest::clean(&raw, &args.session.session, tz)?;
    ingest::write_cleaned(create(&args.out)?, &days)?;
    eprintln!(
        "parsed {} rows ({} malformed skipped)",
        raw.rows.len(),
        raw.skipped
    );
    for d in &days {
        eprintln!("{}: {} ticks after cleaning", d.date, d.ticks.len());
    }
    Ok(())
}

fn load_days(paths: &[PathBuf]) -> Result<Vec<(String, TickSeries)>> {
    let mut out = Vec::new();
    for p in paths {
        let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
        for (date, ticks) in
            ingest::read_cleaned(file).with_context(|| format!("reading {}", p.display()))?
        {
            out.push((date.to_string(), ticks));
        }
    }
    Ok(out)
}

fn run_daily(paths: &[PathBuf], est: &EstimatorArgs, out: &Path) -> Result<()> {
    let days = load_days(paths)?;
    let rows = experiments::run_empirical(&days, &est.settings()?, !est.no_log)?;
    for row in &rows {
        if let Err(e) = &row.result {
            eprintln!("{}: {e}", row.date);
        }
    }
    experiments::write_daily_csv(create(out)?, &rows)?;
    Ok(())
}

fn mc(args: McArgs) -> Result<()> {
    let sim = SimConfig::from_path(&args.config)?;
    let cfg = McConfig {
        model: sim.model,
        reps: args.reps,
        k1_list: args.k1,
        gamma_ratio: args.gamma,
        blocks: args.blocks,
        preavg: (args.preavg > 0).then_some(args.preavg),
        tsrv_k: args.tsrv_k,
        tsrv_j: args.tsrv_j,
        seed: sim.seed,
    };
    let result = experiments::run_mc_deviance(&cfg)?;
    std::fs::create_dir_all(&args.out_dir)?;
    experiments::write_deviance_csv(create(&args.out_dir.join("deviance.csv"))?, &result.rows)?;
    experiments::write_summary_dat(
        create(&args.out_dir.join("deviance_summary.dat"))?,
        &result.summary,
    )?;
    let mut err = std::io::stderr().lock();
    for s in &result.summary {
        writeln!(
            err,
            "K1={:>4} {:>7}: mean deviance {:+.4e} (s.e. {:.2e}, {} defined)",
            s.k1, s.target, s.mean, s.std_error, s.defined
        )?;
    }
    Ok(())
}

fn rate(args: RateArgs) -> Result<()> {
    let sim = SimConfig::from_path(&args.config)?;
    let cfg = RateConfig {
        model: sim.model,
        reps: args.reps,
        blocks: args.blocks,
        k_list: args.k,
        seed: sim.seed,
    };
    let result = experiments::run_rate_experiment(&cfg)?;
    experiments::write_slopes_csv(create(&args.out)?, &result)?;
    eprintln!(
        "fitted slope {:.4} (s.e. {:.4})",
        result.slope, result.slope_se
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(a) => simulate(a),
        Command::Ingest(a) => ingest_cmd(a),
        Command::Estimate(a) => run_daily(std::slice::from_ref(&a.ticks), &a.est, &a.out),
        Command::Empirical(a) => run_daily(&a.days, &a.est, &a.out),
        Command::Mc(a) => mc(a),
        Command::Rate(a) => rate(a),
    }
}
