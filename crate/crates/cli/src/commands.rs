//! The four subcommands, independent of argument parsing.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use fracctrl::analysis::{
    convergence_study, reference_key, CachedReference, ConvergenceReport, EntryStatus, ReferenceCache,
};
use fracctrl::frac::solve_sigma;
use fracctrl::problem::ProblemSpec;
use fracctrl::solver::{optimize, OptimalTriple};

use crate::config::{Format, RunConfig};
use crate::render::{render_sigma_table, render_solution, render_study, SigmaTable};
use crate::ExitClass;

pub const DEFAULT_ALPHAS: [f64; 4] = [1.2, 1.4, 1.6, 1.8];
pub const DEFAULT_THETAS: [f64; 3] = [0.5, 0.7, 1.0];

/// `(σ, σ*)` on a grid of `θ` and `α`.
pub fn sigma_table(alphas: &[f64], thetas: &[f64]) -> Result<SigmaTable> {
    if alphas.is_empty() || thetas.is_empty() {
        return Err(anyhow::anyhow!("empty α or θ grid")).context(ExitClass::Config);
    }
    let cells = thetas
        .iter()
        .map(|&theta| alphas.iter().map(|&alpha| solve_sigma(theta, alpha)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .context(ExitClass::Config)?;
    Ok(SigmaTable {
        alphas: alphas.to_vec(),
        thetas: thetas.to_vec(),
        cells,
    })
}

pub fn run_sigma_table(alphas: &[f64], thetas: &[f64], format: Format) -> Result<String> {
    render_sigma_table(&sigma_table(alphas, thetas)?, format)
}

/// Problem of a configuration, with coefficient files resolved against `base`.
pub fn problem_of(config: &RunConfig, base: &Path) -> Result<ProblemSpec> {
    config.problem.to_spec(base).context(ExitClass::Config)
}

/// Solves at `config.solver.n`; when a cache is given the triple is stored
/// there as a reference at that truncation.
pub fn run_solve(config: &RunConfig, base: &Path, cache: Option<&ReferenceCache>) -> Result<OptimalTriple> {
    let spec = problem_of(config, base)?;
    let n = config.solver.n;
    let solver = config.solver.solver_config(n);
    solver.validate().context(ExitClass::Config)?;
    let triple = optimize(&spec, &solver).context(ExitClass::Solver)?;
    if let Some(cache) = cache {
        let entry = CachedReference {
            key: reference_key(&spec, n, &solver),
            spec: spec.clone(),
            n_ref: n,
            triple: triple.clone(),
        };
        cache.store(&entry).context("cannot store the solution in the cache")?;
    }
    Ok(triple)
}

pub fn render_solve(triple: &OptimalTriple, format: Format) -> Result<String> {
    render_solution(triple, format)
}

/// Runs a study. Per-truncation failures stay in the report; the caller
/// decides the exit status after writing it.
pub fn run_study(config: &RunConfig, base: &Path, cache: Option<&ReferenceCache>) -> Result<ConvergenceReport> {
    let spec = problem_of(config, base)?;
    let block = &config.solver;
    if block.ns.is_empty() {
        return Err(anyhow::anyhow!("solver.ns is empty; a study needs at least one truncation"))
            .context(ExitClass::Config);
    }
    let solver = block.solver_config(block.ns[0]);
    solver.validate().context(ExitClass::Config)?;
    if block.ns.windows(2).any(|w| w[1] != 2 * w[0]) || block.n_ref < 4 * block.ns.iter().max().copied().unwrap_or(0) {
        return Err(anyhow::anyhow!(
            "solver.ns = {:?} must double and solver.n_ref = {} must be at least four times the largest",
            block.ns,
            block.n_ref
        ))
        .context(ExitClass::Config);
    }
    convergence_study(&spec, &block.ns, block.n_ref, &solver, cache).context(ExitClass::Solver)
}

pub fn render_report(report: &ConvergenceReport, format: Format) -> Result<String> {
    render_study(report, format)
}

/// Lists entries with their verification status.
pub fn cache_list(cache: &ReferenceCache) -> Result<String> {
    let entries = cache.list().context(ExitClass::Cache)?;
    let mut s = format!("cache directory: {}\n", cache.dir().display());
    if entries.is_empty() {
        s.push_str("(empty)\n");
        return Ok(s);
    }
    s.push_str("| key | alpha | theta | beta | N_ref | bytes | status |\n|---|---|---|---|---|---|---|\n");
    for e in &entries {
        let (alpha, theta, beta, n_ref) = match e.summary {
            Some((a, t, b, n)) => (a.to_string(), t.to_string(), b.to_string(), n.to_string()),
            None => Default::default(),
        };
        let status = match &e.status {
            EntryStatus::Valid => "ok".to_string(),
            EntryStatus::Corrupt(why) => format!("corrupt: {why}"),
        };
        writeln!(s, "| {} | {alpha} | {theta} | {beta} | {n_ref} | {} | {status} |", &e.key[..e.key.len().min(16)], e.bytes)?;
    }
    Ok(s)
}

/// Re-hashes every entry. Corrupt entries are reported, never deleted.
pub fn cache_verify(cache: &ReferenceCache) -> Result<String> {
    let entries = cache.list().context(ExitClass::Cache)?;
    let corrupt: Vec<_> = entries
        .iter()
        .filter_map(|e| match &e.status {
            EntryStatus::Corrupt(why) => Some(format!("{}: {why}", e.path.display())),
            EntryStatus::Valid => None,
        })
        .collect();
    if !corrupt.is_empty() {
        return Err(anyhow::anyhow!("{} corrupt entries:\n{}", corrupt.len(), corrupt.join("\n")))
            .context(ExitClass::Cache);
    }
    Ok(format!("{} entries verified, all digests match\n", entries.len()))
}

/// Deletes every entry; refuses without `force`.
pub fn cache_clear(cache: &ReferenceCache, force: bool) -> Result<String> {
    if !force {
        let n = cache.list().context(ExitClass::Cache)?.len();
        return Err(anyhow::anyhow!("refusing to delete {n} entries without --force")).context(ExitClass::Cache);
    }
    let n = cache.clear().context(ExitClass::Cache)?;
    Ok(format!("removed {n} entries\n"))
}

/// Error raised after a partially failed study has been written.
pub fn study_failures(report: &ConvergenceReport) -> Result<()> {
    if report.failures.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = report.failures.iter().map(|f| format!("N = {}: {}", f.n, f.message)).collect();
    Err(anyhow::anyhow!("{} truncations failed\n{}", lines.len(), lines.join("\n"))).context(ExitClass::Solver)
}
