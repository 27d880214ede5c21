//! `smc` — command-line front end for the particle filter library.
//!
//! Subcommands cover single filter runs on the two bundled state-space
//! models (`run-lgss`, `run-sv`) and the benchmark harnesses
//! (`bench-variance`, `bench-rmse`, `bench-timing`, `check-median`).
//!
//! Every run starts by printing one `config:` line with the fully resolved
//! settings, so logs are self-describing. All output except `bench-timing`
//! is deterministic for a fixed seed: same flags, same bytes, on any host
//! and at any thread count.

use clap::{Args, Parser, Subcommand};
use smc_core::bench::{
    compare_resampler_variance, median_variance_check, rmse_sweep, time_resamplers, BenchModel,
    RmseBenchConfig, TimingBenchConfig, VarianceBenchConfig,
};
use smc_core::data_io::{
    fmt_sig9, load_prices_csv, log_returns, write_diagnostics_csv, write_median_checks_csv,
    write_rmse_csv, write_rmse_summary_csv, write_timing_csv, write_variance_csv,
    write_variance_summary_csv,
};
use smc_core::engine::{run_filter, FilterConfig, FilterOutput};
use smc_core::models::{
    kalman_filter, lgss_simulate, sv_simulate, LgssModel, LgssParams, SvModel, SvParams,
};
use smc_core::resample::Scheme;
use smc_core::rng::Rng;
use smc_core::SmcError;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "smc",
    about = "Particle filtering with pluggable resampling schemes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Filter settings shared by the single-run subcommands.
#[derive(Args, Debug)]
struct FilterArgs {
    /// Number of particles (default: 20 for run-lgss, 25 for run-sv)
    #[arg(long)]
    particles: Option<usize>,
    /// Number of simulated time steps (ignored when --prices is given)
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Resampling scheme
    #[arg(long, default_value = "rdd", value_parser = parse_scheme)]
    resampler: Scheme,
    /// Master seed; data simulation and the filter derive their own streams
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Resample when ESS falls below this fraction of the particle count
    #[arg(long, default_value_t = 0.5)]
    ess_threshold: f64,
    /// Resample at every step regardless of ESS
    #[arg(long)]
    resample_every_step: bool,
}

impl FilterArgs {
    fn to_config(&self, default_particles: usize, seed: u64) -> FilterConfig {
        FilterConfig {
            n_particles: self.particles.unwrap_or(default_particles),
            resampler: self.resampler,
            ess_threshold_fraction: self.ess_threshold,
            resample_every_step: self.resample_every_step,
            seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Filter simulated linear-Gaussian data and compare against the exact
    /// Kalman answer
    RunLgss {
        #[command(flatten)]
        filter: FilterArgs,
        /// State autoregression coefficient
        #[arg(long)]
        phi: Option<f64>,
        /// State noise standard deviation
        #[arg(long)]
        sigma_v: Option<f64>,
        /// Observation noise standard deviation
        #[arg(long)]
        sigma_e: Option<f64>,
        /// key=value file with model parameters (flags take precedence)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Per-step diagnostics CSV to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter log-volatility from returns, simulated or loaded from prices
    RunSv {
        #[command(flatten)]
        filter: FilterArgs,
        /// Log-volatility mean level
        #[arg(long)]
        mu: Option<f64>,
        /// Log-volatility autoregression coefficient
        #[arg(long)]
        rho: Option<f64>,
        /// Log-volatility noise standard deviation
        #[arg(long)]
        sigma_v: Option<f64>,
        /// Return variance scale
        #[arg(long)]
        tau: Option<f64>,
        /// key=value file with model parameters (flags take precedence)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Price CSV (date,close); log returns become the observations
        #[arg(long)]
        prices: Option<PathBuf>,
        /// Per-step diagnostics CSV to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare weight-variance traces across resampling schemes
    BenchVariance {
        /// Model to simulate: lgss or sv
        #[arg(long, default_value = "lgss", value_parser = ["lgss", "sv"])]
        model: String,
        /// State autoregression coefficient (lgss only)
        #[arg(long)]
        phi: Option<f64>,
        /// State noise standard deviation (either model)
        #[arg(long)]
        sigma_v: Option<f64>,
        /// Observation noise standard deviation (lgss only)
        #[arg(long)]
        sigma_e: Option<f64>,
        /// Log-volatility mean level (sv only)
        #[arg(long)]
        mu: Option<f64>,
        /// Log-volatility autoregression coefficient (sv only)
        #[arg(long)]
        rho: Option<f64>,
        /// Return variance scale (sv only)
        #[arg(long)]
        tau: Option<f64>,
        /// Number of particles (default: 20 for lgss, 25 for sv)
        #[arg(long)]
        particles: Option<usize>,
        /// Time steps per replicate
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Number of independent replicates
        #[arg(long, default_value_t = 50)]
        seeds: usize,
        /// Base seed; replicate k uses seed base + k
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Resample when ESS falls below this fraction of the particle count
        #[arg(long, default_value_t = 0.5)]
        ess_threshold: f64,
        /// Resample at every step regardless of ESS
        #[arg(long)]
        resample_every_step: bool,
        /// Comma-separated schemes to compare
        #[arg(long, default_value = "multinomial,residual,stratified,systematic,rdd",
              value_parser = parse_scheme_list)]
        schemes: SchemeList,
        /// Worker threads (results are identical at any value)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Long-format CSV with every weight-variance trace
        #[arg(long)]
        out: PathBuf,
        /// Optional per-scheme summary CSV
        #[arg(long)]
        summary_out: Option<PathBuf>,
    },
    /// Sweep particle counts and report filter error against the Kalman
    /// answer (linear-Gaussian model only)
    BenchRmse {
        /// State autoregression coefficient
        #[arg(long)]
        phi: Option<f64>,
        /// State noise standard deviation
        #[arg(long)]
        sigma_v: Option<f64>,
        /// Observation noise standard deviation
        #[arg(long)]
        sigma_e: Option<f64>,
        /// Comma-separated particle counts
        #[arg(long, default_value = "20,100,500", value_parser = parse_count_list)]
        counts: CountList,
        /// Time steps per replicate
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Number of independent replicates
        #[arg(long, default_value_t = 20)]
        seeds: usize,
        /// Base seed; replicate k uses seed base + k
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Resample when ESS falls below this fraction of the particle count
        #[arg(long, default_value_t = 0.5)]
        ess_threshold: f64,
        /// Resample at every step regardless of ESS
        #[arg(long)]
        resample_every_step: bool,
        /// Comma-separated schemes to compare
        #[arg(long, default_value = "multinomial,residual,stratified,systematic,rdd",
              value_parser = parse_scheme_list)]
        schemes: SchemeList,
        /// Worker threads (results are identical at any value)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// CSV with one row per scheme, particle count, and seed
        #[arg(long)]
        out: PathBuf,
        /// Optional summary CSV with medians per scheme and count
        #[arg(long)]
        summary_out: Option<PathBuf>,
    },
    /// Time one resampling pass per scheme over a range of particle counts
    BenchTiming {
        /// Comma-separated particle counts
        #[arg(long, default_value = "5,15,50,80,100,150", value_parser = parse_count_list)]
        counts: CountList,
        /// Timed calls per scheme and count
        #[arg(long, default_value_t = 2000)]
        replicates: usize,
        /// Seed for the random weight vectors
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated schemes to time
        #[arg(long, default_value = "multinomial,residual,stratified,systematic,rdd",
              value_parser = parse_scheme_list)]
        schemes: SchemeList,
        /// Timing CSV to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the variance of a median of 2r+1 uniforms against the closed
    /// form 1/(8r+12)
    CheckMedian {
        /// Comma-separated values of r
        #[arg(long, default_value = "1,5,20", value_parser = parse_count_list)]
        r: CountList,
        /// Monte Carlo replicates per r
        #[arg(long, default_value_t = 100000)]
        replicates: usize,
        /// RNG seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Optional CSV to write
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: SmcError| e.to_string())
}

#[derive(Clone, Debug)]
struct SchemeList(Vec<Scheme>);

fn parse_scheme_list(s: &str) -> Result<SchemeList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let scheme = parse_scheme(part.trim())?;
        if out.contains(&scheme) {
            return Err(format!("scheme '{scheme}' listed twice"));
        }
        out.push(scheme);
    }
    Ok(SchemeList(out))
}

#[derive(Clone, Debug)]
struct CountList(Vec<usize>);

fn parse_count_list(s: &str) -> Result<CountList, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let n: usize = part
            .trim()
            .parse()
            .map_err(|_| format!("'{part}' is not a positive integer"))?;
        if n == 0 {
            return Err("counts must be positive".to_string());
        }
        out.push(n);
    }
    Ok(CountList(out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Loads a `key = value` parameter file. Blank lines and `#` comments are
/// ignored; keys must be known model parameters.
fn load_param_file(path: &Path, known: &[&str]) -> Result<BTreeMap<String, f64>, SmcError> {
    let text = std::fs::read_to_string(path).map_err(|e| SmcError::ParseError {
        row: 0,
        msg: format!("cannot open {}: {e}", path.display()),
    })?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| SmcError::ParseError {
            row,
            msg: format!("expected key=value, found '{line}'"),
        })?;
        let key = key.trim();
        if !known.contains(&key) {
            return Err(SmcError::ParseError {
                row,
                msg: format!("unknown parameter '{key}' (expected one of {})", known.join(", ")),
            });
        }
        let value: f64 = value.trim().parse().map_err(|_| SmcError::ParseError {
            row,
            msg: format!("'{}' is not a number", value.trim()),
        })?;
        if map.insert(key.to_string(), value).is_some() {
            return Err(SmcError::ParseError {
                row,
                msg: format!("parameter '{key}' set twice"),
            });
        }
    }
    Ok(map)
}

/// Resolution order: command-line flag, then parameter file, then default.
fn resolve(flag: Option<f64>, file: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    flag.or_else(|| file.get(key).copied()).unwrap_or(default)
}

fn resolve_lgss(
    phi: Option<f64>,
    sigma_v: Option<f64>,
    sigma_e: Option<f64>,
    config: Option<&Path>,
) -> Result<LgssParams, SmcError> {
    let file = match config {
        Some(p) => load_param_file(p, &["phi", "sigma_v", "sigma_e"])?,
        None => BTreeMap::new(),
    };
    let d = LgssParams::default();
    Ok(LgssParams {
        phi: resolve(phi, &file, "phi", d.phi),
        sigma_v: resolve(sigma_v, &file, "sigma_v", d.sigma_v),
        sigma_e: resolve(sigma_e, &file, "sigma_e", d.sigma_e),
    })
}

fn resolve_sv(
    mu: Option<f64>,
    rho: Option<f64>,
    sigma_v: Option<f64>,
    tau: Option<f64>,
    config: Option<&Path>,
) -> Result<SvParams, SmcError> {
    let file = match config {
        Some(p) => load_param_file(p, &["mu", "rho", "sigma_v", "tau"])?,
        None => BTreeMap::new(),
    };
    let d = SvParams::default();
    Ok(SvParams {
        mu: resolve(mu, &file, "mu", d.mu),
        rho: resolve(rho, &file, "rho", d.rho),
        sigma_v: resolve(sigma_v, &file, "sigma_v", d.sigma_v),
        tau: resolve(tau, &file, "tau", d.tau),
    })
}

/// Splits a master seed into a data-simulation stream and a filter seed, so
/// the observations and the filter's own randomness never share a stream.
fn split_seed(seed: u64) -> (Rng, u64) {
    let mut root = Rng::new(seed);
    let data_rng = root.spawn();
    let filter_seed = root.next_u64();
    (data_rng, filter_seed)
}

fn schemes_label(schemes: &[Scheme]) -> String {
    schemes
        .iter()
        .map(|s| s.name())
        .collect::<Vec<_>>()
        .join(",")
}

fn counts_label(counts: &[usize]) -> String {
    counts
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn rmse(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sq / a.len() as f64).sqrt()
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}

fn print_run_summary(output: &FilterOutput, out_path: &Path) {
    let events = output.resample_events.iter().filter(|&&e| e).count();
    let final_mean = *output.means.last().expect("filter output is non-empty");
    let min_ess = output
        .diagnostics
        .iter()
        .map(|d| d.ess)
        .fold(f64::INFINITY, f64::min);
    println!(
        "result: steps={} resample_events={} min_ess={} final_mean={}",
        output.means.len(),
        events,
        fmt_sig9(min_ess),
        fmt_sig9(final_mean),
    );
    println!("wrote: {} rows={}", out_path.display(), output.means.len());
}

fn run(command: Command) -> Result<(), SmcError> {
    match command {
        Command::RunLgss { filter, phi, sigma_v, sigma_e, config, out } => {
            let params = resolve_lgss(phi, sigma_v, sigma_e, config.as_deref())?;
            let (mut data_rng, filter_seed) = split_seed(filter.seed);
            let cfg = filter.to_config(20, filter_seed);
            println!(
                "config: command=run-lgss particles={} steps={} resampler={} seed={} \
                 ess_threshold={} resample_every_step={} phi={} sigma_v={} sigma_e={} out={}",
                cfg.n_particles,
                filter.steps,
                cfg.resampler,
                filter.seed,
                fmt_sig9(cfg.ess_threshold_fraction),
                cfg.resample_every_step,
                fmt_sig9(params.phi),
                fmt_sig9(params.sigma_v),
                fmt_sig9(params.sigma_e),
                out.display(),
            );
            let model = LgssModel::new(params)?;
            let (_, observations) = lgss_simulate(&params, filter.steps, &mut data_rng)?;
            let output = run_filter(&model, &observations, &cfg)?;
            let kalman = kalman_filter(&params, &observations)?;
            write_diagnostics_csv(&out, &output)?;
            print_run_summary(&output, &out);
            println!(
                "kalman: rmse_vs_kalman={} kalman_correlation={}",
                fmt_sig9(rmse(&output.means, &kalman.means)),
                fmt_sig9(pearson(&output.means, &kalman.means)),
            );
            Ok(())
        }
        Command::RunSv { filter, mu, rho, sigma_v, tau, config, prices, out } => {
            let params = resolve_sv(mu, rho, sigma_v, tau, config.as_deref())?;
            let (mut data_rng, filter_seed) = split_seed(filter.seed);
            let cfg = filter.to_config(25, filter_seed);
            let (observations, source) = match &prices {
                Some(path) => {
                    let series = load_prices_csv(path)?;
                    (log_returns(&series)?, path.display().to_string())
                }
                None => {
                    let (_, obs) = sv_simulate(&params, filter.steps, &mut data_rng)?;
                    (obs, "simulated".to_string())
                }
            };
            println!(
                "config: command=run-sv particles={} steps={} resampler={} seed={} \
                 ess_threshold={} resample_every_step={} mu={} rho={} sigma_v={} tau={} \
                 observations={} out={}",
                cfg.n_particles,
                observations.len(),
                cfg.resampler,
                filter.seed,
                fmt_sig9(cfg.ess_threshold_fraction),
                cfg.resample_every_step,
                fmt_sig9(params.mu),
                fmt_sig9(params.rho),
                fmt_sig9(params.sigma_v),
                fmt_sig9(params.tau),
                source,
                out.display(),
            );
            let model = SvModel::new(params)?;
            let output = run_filter(&model, &observations, &cfg)?;
            write_diagnostics_csv(&out, &output)?;
            print_run_summary(&output, &out);
            Ok(())
        }
        Command::BenchVariance {
            model,
            phi,
            sigma_v,
            sigma_e,
            mu,
            rho,
            tau,
            particles,
            steps,
            seeds,
            seed,
            ess_threshold,
            resample_every_step,
            schemes,
            jobs,
            out,
            summary_out,
        } => {
            let bench_model = match model.as_str() {
                "sv" => {
                    let d = SvParams::default();
                    BenchModel::Sv(SvParams {
                        mu: mu.unwrap_or(d.mu),
                        rho: rho.unwrap_or(d.rho),
                        sigma_v: sigma_v.unwrap_or(d.sigma_v),
                        tau: tau.unwrap_or(d.tau),
                    })
                }
                _ => {
                    let d = LgssParams::default();
                    BenchModel::Lgss(LgssParams {
                        phi: phi.unwrap_or(d.phi),
                        sigma_v: sigma_v.unwrap_or(d.sigma_v),
                        sigma_e: sigma_e.unwrap_or(d.sigma_e),
                    })
                }
            };
            let n_particles = particles.unwrap_or(match bench_model {
                BenchModel::Lgss(_) => 20,
                BenchModel::Sv(_) => 25,
            });
            let cfg = VarianceBenchConfig {
                n_particles,
                n_steps: steps,
                n_seeds: seeds,
                base_seed: seed,
                ess_threshold_fraction: ess_threshold,
                resample_every_step,
                schemes: schemes.0.clone(),
                jobs,
            };
            let model_label = match &bench_model {
                BenchModel::Lgss(p) => format!(
                    "model=lgss phi={} sigma_v={} sigma_e={}",
                    fmt_sig9(p.phi),
                    fmt_sig9(p.sigma_v),
                    fmt_sig9(p.sigma_e)
                ),
                BenchModel::Sv(p) => format!(
                    "model=sv mu={} rho={} sigma_v={} tau={}",
                    fmt_sig9(p.mu),
                    fmt_sig9(p.rho),
                    fmt_sig9(p.sigma_v),
                    fmt_sig9(p.tau)
                ),
            };
            println!(
                "config: command=bench-variance {} particles={} steps={} seeds={} seed={} \
                 ess_threshold={} resample_every_step={} schemes={} jobs={} out={}",
                model_label,
                n_particles,
                steps,
                seeds,
                seed,
                fmt_sig9(ess_threshold),
                resample_every_step,
                schemes_label(&schemes.0),
                jobs,
                out.display(),
            );
            let report = compare_resampler_variance(&bench_model, &cfg)?;
            write_variance_csv(&out, &report)?;
            for &scheme in &report.schemes {
                let mean = report.aggregate_mean(scheme).expect("scheme is in the report");
                let lowest = report.share_lowest(scheme).expect("scheme is in the report");
                match report.win_rate(scheme, Scheme::Multinomial) {
                    Some(win) => println!(
                        "scheme={} mean_weight_variance={} win_rate_vs_multinomial={} share_lowest={}",
                        scheme,
                        fmt_sig9(mean),
                        fmt_sig9(win),
                        fmt_sig9(lowest),
                    ),
                    None => println!(
                        "scheme={} mean_weight_variance={} share_lowest={}",
                        scheme,
                        fmt_sig9(mean),
                        fmt_sig9(lowest),
                    ),
                }
            }
            println!("wrote: {}", out.display());
            if let Some(summary) = summary_out {
                write_variance_summary_csv(&summary, &report)?;
                println!("wrote: {}", summary.display());
            }
            Ok(())
        }
        Command::BenchRmse {
            phi,
            sigma_v,
            sigma_e,
            counts,
            steps,
            seeds,
            seed,
            ess_threshold,
            resample_every_step,
            schemes,
            jobs,
            out,
            summary_out,
        } => {
            let d = LgssParams::default();
            let params = LgssParams {
                phi: phi.unwrap_or(d.phi),
                sigma_v: sigma_v.unwrap_or(d.sigma_v),
                sigma_e: sigma_e.unwrap_or(d.sigma_e),
            };
            let cfg = RmseBenchConfig {
                particle_counts: counts.0.clone(),
                n_steps: steps,
                n_seeds: seeds,
                base_seed: seed,
                ess_threshold_fraction: ess_threshold,
                resample_every_step,
                schemes: schemes.0.clone(),
                jobs,
            };
            println!(
                "config: command=bench-rmse phi={} sigma_v={} sigma_e={} counts={} steps={} \
                 seeds={} seed={} ess_threshold={} resample_every_step={} schemes={} jobs={} \
                 out={}",
                fmt_sig9(params.phi),
                fmt_sig9(params.sigma_v),
                fmt_sig9(params.sigma_e),
                counts_label(&counts.0),
                steps,
                seeds,
                seed,
                fmt_sig9(ess_threshold),
                resample_every_step,
                schemes_label(&schemes.0),
                jobs,
                out.display(),
            );
            let report = rmse_sweep(&BenchModel::Lgss(params), &cfg)?;
            write_rmse_csv(&out, &report)?;
            for &scheme in &report.schemes {
                for &n in &report.particle_counts {
                    let med = report.median_rmse(scheme, n).expect("grid is complete");
                    let corr = report.median_correlation(scheme, n).expect("grid is complete");
                    println!(
                        "scheme={} n={} median_rmse={} median_correlation={}",
                        scheme,
                        n,
                        fmt_sig9(med),
                        fmt_sig9(corr),
                    );
                }
            }
            println!("wrote: {}", out.display());
            if let Some(summary) = summary_out {
                write_rmse_summary_csv(&summary, &report)?;
                println!("wrote: {}", summary.display());
            }
            Ok(())
        }
        Command::BenchTiming { counts, replicates, seed, schemes, out } => {
            let cfg = TimingBenchConfig {
                particle_counts: counts.0.clone(),
                replicates,
                seed,
                schemes: schemes.0.clone(),
            };
            println!(
                "config: command=bench-timing counts={} replicates={} seed={} schemes={} out={}",
                counts_label(&counts.0),
                replicates,
                seed,
                schemes_label(&schemes.0),
                out.display(),
            );
            let report = time_resamplers(&cfg)?;
            write_timing_csv(&out, &report)?;
            for row in &report.rows {
                println!(
                    "scheme={} n={} mean_seconds_per_call={} stddev={}",
                    row.scheme,
                    row.n_particles,
                    fmt_sig9(row.mean_seconds_per_call),
                    fmt_sig9(row.stddev),
                );
            }
            println!("wrote: {}", out.display());
            Ok(())
        }
        Command::CheckMedian { r, replicates, seed, out } => {
            println!(
                "config: command=check-median r={} replicates={} seed={}",
                counts_label(&r.0),
                replicates,
                seed,
            );
            let mut checks = Vec::with_capacity(r.0.len());
            for &order in &r.0 {
                let check = median_variance_check(order, replicates, seed)?;
                println!(
                    "r={} empirical_variance={} analytic_variance={} relative_error={}",
                    check.r,
                    fmt_sig9(check.empirical_variance),
                    fmt_sig9(check.analytic_variance),
                    fmt_sig9(check.relative_error()),
                );
                checks.push(check);
            }
            if let Some(path) = out {
                write_median_checks_csv(&path, &checks)?;
                println!("wrote: {}", path.display());
            }
            Ok(())
        }
    }
}
