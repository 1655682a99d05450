//! Evaluation metrics (average vendor revenue, fairness, payment ratio) and
//! the CSV / plain-text reports built from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::market::{RequestId, VendorId};
use crate::strategy::StrategyKind;

/// Currency booked to the revenue ledger, in integer millionths so that
/// totals are independent of summation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);
    const SCALE: f64 = 1e6;

    pub fn from_currency(amount: f64) -> Money {
        Money((amount * Self::SCALE).round() as i64)
    }

    pub fn micros(self) -> i64 {
        self.0
    }

    pub fn as_currency(self) -> f64 {
        self.0 as f64 / Self::SCALE
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

/// One awarded auction.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionOutcome {
    pub seq: u64,
    pub request: RequestId,
    pub time: f64,
    /// Index into [`ScenarioStats::vendors`].
    pub winner: usize,
    pub payment: f64,
    pub max_offer: f64,
    pub bidders: usize,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioStats {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub episodes: usize,
    pub vendors: Vec<VendorId>,
    pub revenue: Vec<Money>,
    pub wins: Vec<u64>,
    pub auctions: Vec<AuctionOutcome>,
    pub arrivals: u64,
    pub timeouts: u64,
    pub end_rejects: u64,
}

impl ScenarioStats {
    pub fn new(strategy: StrategyKind, seed: u64, vendors: Vec<VendorId>) -> Self {
        let n = vendors.len();
        ScenarioStats {
            strategy,
            seed,
            episodes: 0,
            vendors,
            revenue: vec![Money::ZERO; n],
            wins: vec![0; n],
            auctions: Vec::new(),
            arrivals: 0,
            timeouts: 0,
            end_rejects: 0,
        }
    }

    pub fn n_vendors(&self) -> usize {
        self.vendors.len()
    }

    pub fn rejects(&self) -> u64 {
        self.timeouts + self.end_rejects
    }

    pub fn total_revenue(&self) -> Money {
        self.revenue.iter().copied().sum()
    }

    pub fn cell_name(&self) -> String {
        cell_name(self.strategy, self.n_vendors(), self.seed)
    }
}

pub fn cell_name(strategy: StrategyKind, n_vendors: usize, seed: u64) -> String {
    format!("{strategy}_v{n_vendors:02}_s{seed}")
}

/// Mean over vendors of total revenue.
pub fn average_revenue(stats: &ScenarioStats) -> Result<f64> {
    if stats.vendors.is_empty() {
        return Err(Error::NoVendors);
    }
    Ok(stats.total_revenue().as_currency() / stats.n_vendors() as f64)
}

/// Fraction of vendors that won at least one auction.
pub fn fairness(stats: &ScenarioStats) -> Result<f64> {
    if stats.vendors.is_empty() {
        return Err(Error::NoVendors);
    }
    let winners = stats.wins.iter().filter(|&&w| w > 0).count();
    Ok(winners as f64 / stats.n_vendors() as f64)
}

/// Mean over awarded auctions of payment / highest submitted bid.
pub fn payment_ratio(stats: &ScenarioStats) -> Result<f64> {
    if stats.auctions.is_empty() {
        return Err(Error::NoAuctions);
    }
    let total: f64 = stats.auctions.iter().map(|a| a.payment / a.max_offer).sum();
    Ok(total / stats.auctions.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub strategy: StrategyKind,
    pub n_vendors: usize,
    pub seed: u64,
    pub avg_revenue: f64,
    pub fairness: f64,
    /// `None` when the run awarded nothing.
    pub payment_ratio: Option<f64>,
}

impl SummaryRow {
    pub fn from_stats(stats: &ScenarioStats) -> Result<Self> {
        Ok(SummaryRow {
            strategy: stats.strategy,
            n_vendors: stats.n_vendors(),
            seed: stats.seed,
            avg_revenue: average_revenue(stats)?,
            fairness: fairness(stats)?,
            payment_ratio: payment_ratio(stats).ok(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Text,
    Both,
}

impl ReportFormat {
    fn csv(self) -> bool {
        matches!(self, ReportFormat::Csv | ReportFormat::Both)
    }

    fn text(self) -> bool {
        matches!(self, ReportFormat::Text | ReportFormat::Both)
    }
}

/// Formats like C's `%.6g`.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const SUMMARY_HEADER: [&str; 6] = [
    "strategy",
    "n_vendors",
    "seed",
    "avg_revenue",
    "fairness",
    "payment_ratio",
];

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for row in rows {
        w.write_record([
            row.strategy.to_string(),
            row.n_vendors.to_string(),
            row.seed.to_string(),
            fmt_sig6(row.avg_revenue),
            fmt_sig6(row.fairness),
            row.payment_ratio.map(fmt_sig6).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_auctions_csv(stats: &ScenarioStats, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "auction_seq",
        "request_id",
        "time",
        "winner",
        "payment",
        "max_offer",
        "bidders",
        "fallback",
    ])?;
    for a in &stats.auctions {
        w.write_record([
            a.seq.to_string(),
            a.request.to_string(),
            fmt_sig6(a.time),
            stats.vendors[a.winner].to_string(),
            fmt_sig6(a.payment),
            fmt_sig6(a.max_offer),
            a.bidders.to_string(),
            a.fallback.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Tables of per-(vendor count, strategy) means over seeds, one per metric.
pub fn render_tables(rows: &[SummaryRow]) -> String {
    // Baselines first, then MPRA.
    let strategies: Vec<StrategyKind> =
        [StrategyKind::Cdara, StrategyKind::Icaa, StrategyKind::Mpra]
            .into_iter()
            .filter(|s| rows.iter().any(|r| r.strategy == *s))
            .collect();
    let mut cells: BTreeMap<(usize, StrategyKind), Vec<&SummaryRow>> = BTreeMap::new();
    for row in rows {
        cells
            .entry((row.n_vendors, row.strategy))
            .or_default()
            .push(row);
    }
    let vendor_counts: Vec<usize> = {
        let mut v: Vec<usize> = rows.iter().map(|r| r.n_vendors).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let seeds = {
        let mut s: Vec<u64> = rows.iter().map(|r| r.seed).collect();
        s.sort_unstable();
        s.dedup();
        s.len()
    };

    type Metric = fn(&SummaryRow) -> Option<f64>;
    let metrics: [(&str, Metric); 3] = [
        ("Average revenue of vendors", |r| Some(r.avg_revenue)),
        ("Fairness", |r| Some(r.fairness)),
        ("Payment ratio", |r| r.payment_ratio),
    ];

    let mut out = String::new();
    for (title, metric) in metrics {
        let _ = writeln!(
            out,
            "{title} (mean over {seeds} seed{})",
            if seeds == 1 { "" } else { "s" }
        );
        let _ = write!(out, "{:>10}", "# vendors");
        for s in &strategies {
            let _ = write!(out, "{:>14}", s.as_str().to_uppercase());
        }
        out.push('\n');
        for &n in &vendor_counts {
            let _ = write!(out, "{n:>10}");
            for &s in &strategies {
                let values: Vec<f64> = cells
                    .get(&(n, s))
                    .map(|rs| rs.iter().filter_map(|r| metric(r)).collect())
                    .unwrap_or_default();
                let cell = if values.is_empty() {
                    "-".to_string()
                } else {
                    fmt_sig6(values.iter().sum::<f64>() / values.len() as f64)
                };
                let _ = write!(out, "{cell:>14}");
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Writes the summary CSV, per-auction CSVs and/or the text tables under
/// `out_dir`, returning the files written.
pub fn emit_report(
    stats: &[ScenarioStats],
    out_dir: &Path,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let rows = stats
        .iter()
        .map(SummaryRow::from_stats)
        .collect::<Result<Vec<_>>>()?;
    let mut written = Vec::new();
    if format.csv() {
        let path = out_dir.join("summary.csv");
        write_summary_csv(&rows, &path)?;
        written.push(path);
        let auctions_dir = out_dir.join("auctions");
        fs::create_dir_all(&auctions_dir)?;
        for s in stats {
            let path = auctions_dir.join(format!("{}.csv", s.cell_name()));
            write_auctions_csv(s, &path)?;
            written.push(path);
        }
    }
    if format.text() {
        let path = out_dir.join("summary.txt");
        fs::write(&path, render_tables(&rows))?;
        written.push(path);
    }
    Ok(written)
}
