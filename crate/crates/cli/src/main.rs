//! `randblaschke`: experiments on random cocycles of finite Blaschke products.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "randblaschke",
    version,
    about = "Random invariant densities and fibre entropy for Blaschke product cocycles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// JSON cocycle configuration; defaults to the built-in two-map example.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Quadrature grid size on the circle.
    #[arg(long, default_value_t = 4096, value_parser = positive)]
    pub grid: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Orbit,
    Quadrature,
}

#[derive(Subcommand)]
enum Command {
    /// Graph of the attracting map on the circle, `t` against `S(t) mod 1`.
    Fig1 {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1024, value_parser = positive)]
        points: usize,
    },
    /// Fibre entropy over the θ-grid under Bernoulli and rotation driving.
    Fig2 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000, value_parser = positive)]
        n_steps: usize,
        #[arg(long, default_value_t = 128, value_parser = positive)]
        theta_points: usize,
    },
    /// θ-averaged entropy against the analytic value.
    Summary {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000, value_parser = positive)]
        n_steps: usize,
        #[arg(long, default_value_t = 128, value_parser = positive)]
        theta_points: usize,
        #[arg(long, value_enum, default_value_t = EstimatorArg::Orbit)]
        estimator: EstimatorArg,
        #[arg(long, default_value_t = 200, value_parser = positive)]
        n_fibres: usize,
        /// Relative error above which the summary fails.
        #[arg(long, default_value_t = 5e-3)]
        tolerance: f64,
    },
    /// Admissibility, fixed-point and identity checks.
    Check {
        #[command(flatten)]
        common: Common,
    },
    /// Random fixed point of the fibre at time 0.
    FixedPoint {
        #[command(flatten)]
        common: Common,
    },
    /// Fibre entropy at the config's θ by both estimators.
    Entropy {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000, value_parser = positive)]
        n_steps: usize,
        /// Fibres for the quadrature estimator; 0 skips it.
        #[arg(long, default_value_t = 200)]
        n_fibres: usize,
    },
    /// Covering time of an arc under backward compositions.
    Covering {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.45)]
        arc_start: f64,
        #[arg(long, default_value_t = 0.1)]
        arc_length: f64,
        #[arg(long, default_value_t = 10_000, value_parser = positive)]
        cap: usize,
        /// Number of consecutive seeds to try, starting at the master seed.
        #[arg(long, default_value_t = 1, value_parser = positive)]
        trials: usize,
    },
    /// Origin-fixing maps that are expanding but not degree-integrable.
    OriginExample {
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        #[arg(long, default_value_t = 50, value_parser = positive)]
        j_max: usize,
        /// Prefactor rotation of every map, in turns.
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        /// Truncation used for the entropy comparison.
        #[arg(long, default_value_t = 10, value_parser = positive)]
        entropy_j_max: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 4096, value_parser = positive)]
        grid: usize,
        /// Also write the truncated cocycle as a JSON config.
        #[arg(long)]
        emit_config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fig1 { out, points } => commands::fig1(out.as_deref(), points),
        Command::Fig2 { common, n_steps, theta_points } => commands::fig2(&common, n_steps, theta_points),
        Command::Summary { common, n_steps, theta_points, estimator, n_fibres, tolerance } => {
            commands::summary(&common, n_steps, theta_points, estimator, n_fibres, tolerance)
        }
        Command::Check { common } => commands::check(&common),
        Command::FixedPoint { common } => commands::fixed_point(&common),
        Command::Entropy { common, n_steps, n_fibres } => commands::entropy(&common, n_steps, n_fibres),
        Command::Covering { common, arc_start, arc_length, cap, trials } => {
            commands::covering(&common, (arc_start, arc_start + arc_length), cap, trials)
        }
        Command::OriginExample { c, j_max, rho, entropy_j_max, seed, grid, emit_config, out } => {
            commands::origin_example(
                &commands::OriginArgs { c, j_max, rho, entropy_j_max, seed, grid },
                emit_config.as_deref(),
                out.as_deref(),
            )
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
