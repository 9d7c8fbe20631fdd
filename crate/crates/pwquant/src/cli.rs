//! Argument parsing and dispatch.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use pwquant_core::oracle::LloydOptions;
use pwquant_core::stochastic::Theta;
use pwquant_core::PiecewiseUniform;

use crate::commands::{self, parse_orders, Outcome, VerifyOptions};
use crate::config;
use crate::report::Format;

pub const SEED_ENV: &str = "PWQUANT_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "pwquant",
    version,
    about = "Exact optimal quantizers for piecewise-uniform distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// `infinite`, `uniform`, `three-piece`, or a JSON config path.
    #[arg(long, default_value = "infinite")]
    pub dist: String,

    /// JSON config path; same as `--dist <path>`.
    #[arg(long, conflicts_with = "dist")]
    pub config: Option<PathBuf>,
}

impl DistArgs {
    fn resolve(&self) -> Result<PiecewiseUniform> {
        let dist = match &self.config {
            Some(p) => config::load(p)?,
            None => config::resolve(&self.dist)?,
        };
        Ok(dist)
    }
}

/// A non-empty list of orders, from `a..b`, `a,b,c` or `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orders(pub Vec<usize>);

fn orders(s: &str) -> Result<Orders, String> {
    parse_orders(s).map(Orders)
}

fn canonical_order(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 2 => Ok(n),
        Ok(_) => Err("canonical sequences start at order 2".into()),
        Err(_) => Err(format!("`{s}` is not a count")),
    }
}

fn theta(s: &str) -> Result<Theta, String> {
    Theta::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical sequence, optimal points and exact error for one order.
    Canonical {
        #[arg(long, value_parser = canonical_order)]
        n: usize,
    },
    /// Sequences and exact errors over a range of orders.
    Table {
        #[arg(long, default_value_t = 2)]
        min_n: usize,
        #[arg(long)]
        max_n: usize,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Optimal split of points across the pieces of a finite distribution.
    Allocate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Exact error of a given point set, e.g. `--points 1/6,5/6`.
    Distortion {
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Cross-check exact results against exhaustive search and Lloyd iteration.
    Verify {
        #[arg(long, value_parser = orders, default_value = "1..12")]
        n: Orders,
        /// Largest order searched exhaustively for the infinite family.
        #[arg(long, default_value_t = 20)]
        cap: usize,
        /// Largest order searched exhaustively for finite distributions.
        #[arg(long, default_value_t = 60)]
        finite_cap: usize,
        #[arg(long, default_value_t = 6)]
        lloyd_max_n: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Exact optimum next to IID and Kronecker quantizers.
    Compare {
        #[arg(long, value_parser = orders, default_value = "2..64")]
        n: Orders,
        #[arg(long, value_parser = theta, default_value = "golden")]
        theta: Theta,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Mean, variance and per-piece conditional means.
    Moments {
        /// Pieces listed for the infinite family.
        #[arg(long, default_value_t = 8)]
        pieces: usize,
        #[command(flatten)]
        dist: DistArgs,
    },
    /// Statistics of IID uniform points on the circle.
    Random {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,1")]
        t: Vec<f64>,
    },
    /// The rotation sequence frac(k theta), k = 1..n.
    Kronecker {
        #[arg(long, value_parser = theta, default_value = "golden")]
        theta: Theta,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

impl Cli {
    pub fn execute(&self) -> Result<Outcome> {
        match &self.command {
            Command::Canonical { n } => commands::canonical(*n),
            Command::Table { min_n, max_n, dist } => {
                let range: Vec<usize> = (*min_n..=*max_n).collect();
                anyhow::ensure!(!range.is_empty(), "empty range {min_n}..{max_n}");
                commands::table(&dist.resolve()?, &range)
            }
            Command::Allocate { n, dist } => commands::allocate(&dist.resolve()?, *n as usize),
            Command::Distortion { points, dist } => {
                commands::distortion(&dist.resolve()?, &commands::parse_points(points)?)
            }
            Command::Verify {
                n,
                cap,
                finite_cap,
                lloyd_max_n,
                restarts,
                tolerance,
                dist,
            } => {
                let opts = VerifyOptions {
                    cap: *cap,
                    finite_cap: *finite_cap,
                    lloyd_max_n: *lloyd_max_n,
                    lloyd: LloydOptions {
                        restarts: *restarts,
                        seed: self.seed,
                        ..Default::default()
                    },
                    tolerance: *tolerance,
                };
                commands::verify(&dist.resolve()?, &n.0, &opts)
            }
            Command::Compare {
                n,
                theta,
                trials,
                dist,
            } => commands::compare(&dist.resolve()?, &n.0, theta, *trials, self.seed),
            Command::Moments { pieces, dist } => commands::moments(&dist.resolve()?, *pieces),
            Command::Random { n, trials, t } => {
                commands::random(*n as usize, *trials, self.seed, t)
            }
            Command::Kronecker { theta, n } => commands::kronecker(theta, *n as usize),
        }
    }

    /// Runs the command and writes its output. `Ok(false)` means the output
    /// was written but a check failed.
    pub fn run(&self) -> Result<bool> {
        let outcome = self.execute()?;
        let text = outcome.report.render(self.format)?;
        match &self.out {
            Some(path) => {
                std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
            }
            None => print!("{text}"),
        }
        Ok(outcome.ok)
    }
}
