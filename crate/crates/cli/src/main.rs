//! `fracctrl`: sigma tables, single solves, convergence studies and the
//! reference cache.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 configuration or usage
//! error, 3 solver failure (including partially failed studies), 4 corrupt
//! cache entries or a refused clear.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fracctrl::analysis::ReferenceCache;
use fracctrl::operators::Mode;
use fracctrl_cli::commands::{self, DEFAULT_ALPHAS, DEFAULT_THETAS};
use fracctrl_cli::config::{load_config, Format, RunConfig};
use fracctrl_cli::render::solve_summary;
use fracctrl_cli::ExitClass;

#[derive(Parser)]
#[command(name = "fracctrl", version, about = "Spectral Petrov-Galerkin solver for fractional optimal control")]
struct Cli {
    /// Worker threads for parallel sections (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (for solve and study, overrides the configuration file).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Solver mode; overrides the configuration file.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Do not read or write the reference cache.
    #[arg(long)]
    no_cache: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Print the singularity exponents (σ, σ*) on a grid of θ and α.
    SigmaTable {
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS)]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_THETAS)]
        thetas: Vec<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve the optimality system at one truncation.
    Solve(RunArgs),
    /// Run a convergence study against a reference solution.
    Study(RunArgs),
    /// Inspect or clear the reference cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// List entries and their status.
    List,
    /// Recompute every entry's digest.
    Verify,
    /// Delete every entry.
    Clear {
        /// Required to actually delete.
        #[arg(long)]
        force: bool,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: fracctrl::FracError| e.to_string())
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Configuration with command-line overrides applied, plus the directory
/// that relative paths in it refer to.
fn prepared(args: &RunArgs) -> Result<(RunConfig, PathBuf)> {
    let mut config = load_config(&args.config).context(ExitClass::Config)?;
    if let Some(mode) = args.mode {
        config.solver.mode = mode;
    }
    if let Some(format) = args.output.format {
        config.output.format = format;
    }
    if let Some(out) = &args.output.out {
        config.output.path = Some(out.clone());
    }
    let base = args.config.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((config, base))
}

fn output_path(config: &RunConfig, base: &Path, from_flag: bool) -> Option<PathBuf> {
    config.output.path.as_ref().map(|p| {
        if from_flag || p.is_absolute() {
            p.clone()
        } else {
            base.join(p)
        }
    })
}

fn run(cli: Cli) -> Result<()> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    match cli.command {
        Command::SigmaTable { alphas, thetas, output } => {
            let text = commands::run_sigma_table(&alphas, &thetas, output.format.unwrap_or_default())?;
            emit(&text, output.out.as_deref())
        }
        Command::Solve(args) => {
            let (config, base) = prepared(&args)?;
            let cache = (!args.no_cache).then(ReferenceCache::from_env);
            let triple = commands::run_solve(&config, &base, cache.as_ref())?;
            let path = output_path(&config, &base, args.output.out.is_some());
            // The rendered solution already leads with the summary on standard output.
            if config.output.verbosity > 0 && path.is_some() {
                eprintln!("{}", solve_summary(&triple));
            }
            let text = commands::render_solve(&triple, config.output.format)?;
            emit(&text, path.as_deref())
        }
        Command::Study(args) => {
            let (config, base) = prepared(&args)?;
            let cache = (!args.no_cache).then(ReferenceCache::from_env);
            let report = commands::run_study(&config, &base, cache.as_ref())?;
            if config.output.verbosity > 0 {
                eprintln!(
                    "reference N = {} ({}), {} rows, expected order {:.3}",
                    report.n_ref,
                    if report.reference_from_cache { "cached" } else { "computed" },
                    report.rows.len(),
                    report.expected_order()
                );
            }
            let text = commands::render_report(&report, config.output.format)?;
            emit(&text, output_path(&config, &base, args.output.out.is_some()).as_deref())?;
            commands::study_failures(&report)
        }
        Command::Cache { action } => {
            let cache = ReferenceCache::from_env();
            let text = match action {
                CacheAction::List => commands::cache_list(&cache)?,
                CacheAction::Verify => commands::cache_verify(&cache)?,
                CacheAction::Clear { force } => commands::cache_clear(&cache, force)?,
            };
            emit(&text, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(ExitClass::of(&err).map_or(1, ExitClass::code))
        }
    }
}
