mod commands;
mod report;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use lgl_core::mms::Family;
use lgl_core::Rational;

use commands::{exact_rational, Representative};
use report::{Format, Report};

/// Exact and Monte Carlo tools for MMS, Kikuta–Ruckle and caching games.
///
/// Rational flags take `p/q` or integers. `LGL_THREADS` caps the worker count.
#[derive(Parser, Debug)]
#[command(name = "lgl", version)]
struct Cli {
    /// Output layout; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Manickam–Miklós–Singhi subset sums.
    #[command(subcommand)]
    Mms(MmsCmd),
    /// Kikuta–Ruckle threshold problem.
    #[command(subcommand)]
    Kr(KrCmd),
    /// The two-nut caching game.
    #[command(subcommand)]
    Caching(CachingCmd),
    /// Monte Carlo runs of the continuous limit games.
    #[command(subcommand)]
    Simulate(SimCmd),
    /// Zero-sum matrix games.
    #[command(subcommand)]
    Game(GameCmd),
}

#[derive(Subcommand, Debug)]
enum MmsCmd {
    /// Family curves of the limit problem on a grid of p.
    Curve {
        #[arg(long, default_value_t = 0.01)]
        p_min: f64,
        #[arg(long, default_value_t = 0.49)]
        p_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Exact value of a coefficient sequence, or the family curves at one p.
    Eval {
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: Option<String>,
        /// Use `1 - n, 1, ..., 1` when no coefficients are given.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Crossing points of two family curves (default: the three marked in the figure).
    Cross {
        #[arg(long, requires = "f2")]
        f1: Option<Family>,
        #[arg(long, requires = "f1")]
        f2: Option<Family>,
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long)]
        hi: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct KrInstanceArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
    #[arg(long, value_parser = exact_rational)]
    d: Rational,
    /// Count sums `>= d` instead of `> d`.
    #[arg(long)]
    ge: bool,
}

#[derive(Subcommand, Debug)]
enum KrCmd {
    /// Conjecture membership of the optimal uniform support size.
    Scan {
        /// A single n or an inclusive range `a..b`.
        #[arg(long)]
        n: String,
        /// Restrict to one k (default: every 1 <= k <= n).
        #[arg(long)]
        k: Option<u64>,
        /// One threshold (default: every fraction with denominator <= --max-den).
        #[arg(long, value_parser = exact_rational)]
        d: Option<Rational>,
        #[arg(long, default_value_t = 12)]
        max_den: u64,
        #[arg(long)]
        ge: bool,
    },
    /// Full conjecture check of one instance.
    Check(KrInstanceArgs),
    /// Value of `s` equal weights, or of a two-level shape with `--m2`.
    Probe {
        #[command(flatten)]
        inst: KrInstanceArgs,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        m2: Option<u64>,
        /// Also report the gap to `s2` equal weights.
        #[arg(long)]
        s2: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct GameArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = exact_rational)]
    h: Rational,
    #[arg(long, default_value_t = 4)]
    grid: u32,
}

#[derive(Subcommand, Debug)]
enum CachingCmd {
    /// Grid-restricted values against the known v(2,2,n,h) table.
    Table {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        grid: u32,
        #[arg(long, value_enum, default_value_t = Representative::Mid)]
        at: Representative,
        /// Only the interval containing this h, evaluated at h.
        #[arg(long, value_parser = exact_rational)]
        h: Option<Rational>,
    },
    /// Exact value of the grid-restricted game.
    Value {
        #[command(flatten)]
        game: GameArgs,
        /// Write the optimal hider mixture here.
        #[arg(long)]
        mix_out: Option<PathBuf>,
    },
    /// Best searcher response to a hider mixture.
    Bestresponse {
        #[command(flatten)]
        game: GameArgs,
        /// stacked, hider_5_2, 19_7:<h67_25|h51_19|h19_7>, lattice:<b>, small_h:<nine_fifths|q>
        #[arg(long)]
        strategy: Option<String>,
        /// Mixture file in `hider-pair-mix v1` format.
        #[arg(long)]
        mix: Option<PathBuf>,
        /// Write the optimal dig plan here.
        #[arg(long)]
        plan_out: Option<PathBuf>,
    },
    /// Strategy lower bound, restricted value and strategy upper bound.
    Bounds {
        #[command(flatten)]
        game: GameArgs,
    },
}

#[derive(Subcommand, Debug)]
enum SimCmd {
    /// Win rate of the interval searcher in the limit game.
    Limit {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scaled estimates over growing lambda and their extrapolation.
    DoubleLimit {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        j: usize,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum GameCmd {
    /// Solve a matrix game (rows minimize). Reads `m c` then the entries.
    Solve {
        /// Matrix file; `-` or absent reads standard input.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = commands::threads_from_env()? {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring worker threads")?;
    }
    let (report, default_format): (Report, Format) = match cli.command {
        Command::Mms(cmd) => match cmd {
            MmsCmd::Curve { p_min, p_max, step } => (commands::mms_curve(p_min, p_max, step)?, Format::Csv),
            MmsCmd::Eval { coeffs, n, k, p } => (commands::mms_eval(coeffs.as_deref(), n, k, p)?, Format::Records),
            MmsCmd::Cross { f1, f2, lo, hi } => (commands::mms_cross(f1.zip(f2), lo, hi)?, Format::Records),
        },
        Command::Kr(cmd) => match cmd {
            KrCmd::Scan { n, k, d, max_den, ge } => {
                let ns = commands::parse_range(&n)?;
                (commands::kr_scan_cmd(&ns, k, d.as_ref(), max_den, !ge)?, Format::Records)
            }
            KrCmd::Check(a) => (commands::kr_check_cmd(a.n, a.k, &a.d, !a.ge)?, Format::Records),
            KrCmd::Probe { inst: a, s, m2, s2 } => {
                (commands::kr_probe_cmd(a.n, a.k, &a.d, s, m2, s2, !a.ge)?, Format::Records)
            }
        },
        Command::Caching(cmd) => match cmd {
            CachingCmd::Table { n, grid, at, h } => (commands::caching_table(n, grid, at, h.as_ref())?, Format::Csv),
            CachingCmd::Value { game: g, mix_out } => {
                (commands::caching_value(g.n, &g.h, g.grid, mix_out.as_deref())?, Format::Records)
            }
            CachingCmd::Bestresponse { game: g, strategy, mix, plan_out } => (
                commands::caching_best_response(
                    g.n,
                    &g.h,
                    g.grid,
                    strategy.as_deref(),
                    mix.as_deref(),
                    plan_out.as_deref(),
                )?,
                Format::Records,
            ),
            CachingCmd::Bounds { game: g } => (commands::caching_bounds(g.n, &g.h, g.grid)?, Format::Records),
        },
        Command::Simulate(cmd) => match cmd {
            SimCmd::Limit { k, j, lambda, trials, seed } => {
                (commands::simulate_limit(k, j, lambda, trials, seed)?, Format::Records)
            }
            SimCmd::DoubleLimit { k, j, trials, seed } => {
                (commands::simulate_double(k, j, trials, seed)?, Format::Records)
            }
        },
        Command::Game(GameCmd::Solve { input }) => {
            let text = match input.as_deref() {
                Some(p) if p.as_os_str() != "-" => {
                    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
                }
                _ => {
                    let mut s = String::new();
                    std::io::stdin().read_to_string(&mut s).context("reading standard input")?;
                    s
                }
            };
            (commands::game_solve(&text)?, Format::Records)
        }
    };
    let text = report.render(cli.format.unwrap_or(default_format));
    match cli.out {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
