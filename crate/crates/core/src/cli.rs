//! `mpra run` / `mpra sweep`: load a scenario config, run every
//! (strategy, vendor count, seed) cell and write the reports.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::engine::{run_scenario_observed, ScenarioConfig};
use crate::error::{Error, Result};
use crate::history::HistoryStore;
use crate::metrics::{
    cell_name, emit_report, render_tables, ReportFormat, ScenarioStats, SummaryRow,
};
use crate::strategy::StrategyKind;

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "mpra", version, about = "Reverse-auction market simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one strategy for one seed.
    Run(RunArgs),
    /// Run every strategy x vendor count x seed combination.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario config (TOML). Built-in defaults are used when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Vendor counts, comma separated.
    #[arg(long, value_name = "N[,N...]", value_delimiter = ',')]
    vendors: Vec<usize>,
    #[arg(long, value_name = "N")]
    episodes: Option<usize>,
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    format: ReportFormat,
    /// Also write every bid of every auction under `bids/`.
    #[arg(long)]
    export_bids: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_name = "mpra|cdara|icaa")]
    strategy: Option<StrategyKind>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Strategies, comma separated. Defaults to all three.
    #[arg(long, value_name = "S[,S...]", value_delimiter = ',')]
    strategies: Vec<StrategyKind>,
    #[arg(long, value_name = "N", conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Inclusive seed range.
    #[arg(long, value_name = "A..B", value_parser = parse_seed_range)]
    seeds: Option<SeedRange>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRange {
    pub first: u64,
    pub last: u64,
}

fn parse_seed_range(s: &str) -> std::result::Result<SeedRange, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let first: u64 = a.trim().parse().map_err(|_| format!("bad seed `{a}`"))?;
    let last: u64 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad seed `{b}`"))?;
    if first > last {
        return Err(format!("empty seed range `{s}`"));
    }
    Ok(SeedRange { first, last })
}

/// A validated batch of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub base: ScenarioConfig,
    pub strategies: Vec<StrategyKind>,
    pub vendor_counts: Vec<usize>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub format: ReportFormat,
    pub export_bids: bool,
}

impl RunPlan {
    /// Every cell, strategy-major, then vendor count, then seed.
    pub fn cells(&self) -> Vec<ScenarioConfig> {
        let mut cells =
            Vec::with_capacity(self.strategies.len() * self.vendor_counts.len() * self.seeds.len());
        for &strategy in &self.strategies {
            for &n_vendors in &self.vendor_counts {
                for &seed in &self.seeds {
                    cells.push(ScenarioConfig {
                        strategy,
                        n_vendors,
                        seed,
                        ..self.base.clone()
                    });
                }
            }
        }
        cells
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help or version output; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Invalid(#[from] Error),
}

fn dedup<T: PartialEq + Clone>(items: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for item in items {
        if !out.contains(&item) {
            out.push(item);
        }
    }
    out
}

pub fn parse_and_validate<I, T>(args: I) -> std::result::Result<RunPlan, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Info(e.to_string())
        }
        _ => CliError::Usage(e.to_string()),
    })?;

    let (common, strategies, seeds, sweep) = match cli.command {
        Command::Run(a) => (
            a.common,
            a.strategy.into_iter().collect::<Vec<_>>(),
            a.seed.map(|s| vec![s]),
            false,
        ),
        Command::Sweep(a) => {
            let seeds = match (a.seed, a.seeds) {
                (Some(s), _) => Some(vec![s]),
                (None, Some(r)) => Some((r.first..=r.last).collect()),
                (None, None) => None,
            };
            (a.common, a.strategies, seeds, true)
        }
    };

    let mut base = match &common.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(episodes) = common.episodes {
        base.episodes = episodes;
    }

    let strategies = match (strategies.is_empty(), sweep) {
        (false, _) => dedup(strategies),
        (true, true) => StrategyKind::ALL.to_vec(),
        (true, false) => vec![base.strategy],
    };
    let vendor_counts = match (common.vendors.is_empty(), sweep) {
        (false, _) => dedup(common.vendors),
        (true, true) => vec![4, 6, 8, 12],
        (true, false) => vec![base.n_vendors],
    };
    let seeds = dedup(seeds.unwrap_or_else(|| vec![base.seed]));

    let plan = RunPlan {
        base,
        strategies,
        vendor_counts,
        seeds,
        out_dir: common.out,
        format: common.format,
        export_bids: common.export_bids,
    };
    for cell in plan.cells() {
        cell.validate()?;
    }
    Ok(plan)
}

pub struct ExecuteReport {
    pub rows: Vec<SummaryRow>,
    pub table: String,
    pub completed: Vec<String>,
    pub failed: Vec<(String, Error)>,
}

fn run_cell(
    config: &ScenarioConfig,
    keep_history: bool,
) -> Result<(ScenarioStats, Option<HistoryStore>)> {
    let run = run_scenario_observed(config, &mut ())?;
    Ok((run.stats, keep_history.then_some(run.history)))
}

fn write_manifest(out_dir: &Path, completed: &[String], failed: &[(String, Error)]) -> Result<()> {
    let mut text = String::new();
    for name in completed {
        text.push_str(name);
        text.push('\n');
    }
    for (name, err) in failed {
        text.push_str(&format!("# failed {name}: {err}\n"));
    }
    fs::write(out_dir.join("MANIFEST"), text)?;
    Ok(())
}

/// Runs every cell (in parallel), then writes reports and the manifest.
pub fn execute(plan: &RunPlan) -> Result<ExecuteReport> {
    fs::create_dir_all(&plan.out_dir)?;
    let cells = plan.cells();
    let results: Vec<_> = cells
        .par_iter()
        .map(|cell| run_cell(cell, plan.export_bids))
        .collect();

    let mut stats = Vec::new();
    let mut completed = Vec::new();
    let mut failed = Vec::new();
    for (cell, result) in cells.iter().zip(results) {
        let name = cell_name(cell.strategy, cell.n_vendors, cell.seed);
        match result {
            Ok((s, history)) => {
                if let Some(history) = history {
                    let dir = plan.out_dir.join("bids");
                    fs::create_dir_all(&dir)?;
                    history.write_csv(fs::File::create(dir.join(format!("{name}.csv")))?)?;
                }
                stats.push(s);
                completed.push(name);
            }
            Err(e) => failed.push((name, e)),
        }
    }

    emit_report(&stats, &plan.out_dir, plan.format)?;
    write_manifest(&plan.out_dir, &completed, &failed)?;
    let rows = stats
        .iter()
        .map(SummaryRow::from_stats)
        .collect::<Result<Vec<_>>>()?;
    let table = render_tables(&rows);
    Ok(ExecuteReport {
        rows,
        table,
        completed,
        failed,
    })
}

/// Process entry point; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let plan = match parse_and_validate(args) {
        Ok(plan) => plan,
        Err(CliError::Info(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(CliError::Usage(text)) => {
            eprint!("{text}");
            return ExitCode::from(EXIT_VALIDATION);
        }
        Err(CliError::Invalid(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    match execute(&plan) {
        Ok(report) => {
            print!("{}", report.table);
            if report.failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                for (name, err) in &report.failed {
                    eprintln!("error: {name}: {err}");
                }
                ExitCode::from(EXIT_RUNTIME)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
