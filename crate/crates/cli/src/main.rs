mod commands;
mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{Context, Failure, Output, EXIT_USAGE};
use config::Config;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Batch experiments on ζ, prime Dirichlet sums and Kronecker approximation.
///
/// Each command reads a flat `key = value` config (`#` starts a comment,
/// lists are comma-separated, complex numbers are written `a+bi`) and writes
/// a JSON report or a CSV table. Exit codes: 0 success, 1 usage or config
/// error, 2 non-convergence, 3 numerical or resolution failure, 4 budget
/// exhausted.
#[derive(Parser)]
#[command(name = "zetashift", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Config file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Greedy prime-phase assignment hitting the targets.
    ///
    /// Keys: sigma, t, shifts, targets, epsilon, y; optional mode (free|lattice),
    /// budget, overshoot_deg, phase_grid, seed.
    /// CSV columns: p, theta. Exit code 2 when the residual stays ≥ epsilon.
    BuildPhases(Common),
    /// Explicit τ with max_k |log ζ(s + i d_k τ) − z_k| < epsilon.
    ///
    /// Keys: sigma, t, shifts, T, cutoff_X, epsilon, and targets or plant_tau;
    /// optional grid_step, prefilter_slack, max_hits, seed.
    /// CSV columns: tau, distance.
    FindTau(Common),
    /// Relative measure of the τ-set in [T, 2T].
    ///
    /// Keys: sigma, t, shifts, T, cutoff_X, epsilon; kind = theorem (needs
    /// targets or plant_tau) or good-set; optional grid_step, prefilter_slack, seed.
    /// CSV columns: tau_lo, tau_hi, length (hit intervals).
    Density(Common),
    /// Mean square of log ζ minus its prime sum on vertical lines.
    ///
    /// Keys: sigma (list), cutoff_X (list), T; optional grid_step, seed.
    /// CSV columns: sigma, cutoff_X, mean_square, included_measure, excluded_measure.
    Tsang(Common),
    /// Chen's effective Kronecker search, or the homogeneous window search.
    ///
    /// mode = chen: lambdas, M, T1, T2; optional alphas, weights, hypothesis_asserted.
    /// CSV columns: t_star, objective, bound, Delta, Lambda, certified.
    /// mode = window: shifts, omega; optional a, certify.
    /// CSV columns: h, t_used, objective, target.
    Kronecker(Common),
    /// Zero counts of exponential sums, or zero-proximity windows of ζ.
    ///
    /// mode = exp-poly: coeffs, shifts. CSV columns: count, bound.
    /// mode = wilder: amplitudes, frequencies, K, alpha, beta. CSV columns: count, bound_holds.
    /// mode = proximity: sigma, t, shifts, T, grid_step; optional floor.
    /// CSV columns: tau_lo, tau_hi, length.
    Zeros(Common),
    /// The set A_d(T) of τ whose prime phases lie within d of the assignment.
    ///
    /// Keys: T, d, and assignment_file or primes (+ thetas, L); optional
    /// sigma, t, shifts, cutoff_X, grid_step, seed.
    /// CSV columns: tau_lo, tau_hi, length.
    Adscan(Common),
    /// Energy of the prime tail over A_d(T) against T(2d)^|M| y^(1−2σ).
    ///
    /// Keys: T, d, sigma, t, cutoff_X, and assignment_file or primes (+ thetas);
    /// optional shifts, shift_index, grid_step, seed.
    /// CSV columns: integral, reference, ratio, y.
    TailEnergy(Common),
}

fn run(command: &Command, common: &Common) -> Result<Output, Failure> {
    let mut config = Config::load(&common.config)?;
    let seed = match common.seed {
        Some(s) => s,
        None => config.opt_u64("seed")?.unwrap_or(0),
    };
    if common.seed.is_some() {
        config.set("seed", seed.to_string());
    }
    config.opt_u64("seed")?;
    let config_dir = common
        .config
        .parent()
        .map(PathBuf::from)
        .unwrap_or_default();
    let ctx = Context {
        config,
        config_dir,
        seed,
    };
    match command {
        Command::BuildPhases(_) => commands::build_phases(&ctx),
        Command::FindTau(_) => commands::find_tau_cmd(&ctx),
        Command::Density(_) => commands::density(&ctx),
        Command::Tsang(_) => commands::tsang(&ctx),
        Command::Kronecker(_) => commands::kronecker(&ctx),
        Command::Zeros(_) => commands::zeros(&ctx),
        Command::Adscan(_) => commands::adscan(&ctx),
        Command::TailEnergy(_) => commands::tail_energy_cmd(&ctx),
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::BuildPhases(c)
        | Command::FindTau(c)
        | Command::Density(c)
        | Command::Tsang(c)
        | Command::Kronecker(c)
        | Command::Zeros(c)
        | Command::Adscan(c)
        | Command::TailEnergy(c) => c,
    }
}

fn emit(common: &Common, output: &Output) -> std::io::Result<()> {
    let body = match common.format {
        Format::Json => &output.json,
        Format::Csv => &output.csv,
    };
    match &common.out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let common = common(&cli.command).clone();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match pool.install(|| run(&cli.command, &common)) {
        Ok(output) => {
            if let Err(e) = emit(&common, &output) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            eprintln!("{}", output.summary);
            ExitCode::from(output.exit)
        }
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
