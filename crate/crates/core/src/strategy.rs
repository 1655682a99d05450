//! Allocation strategies behind one contract: how vendors price a request,
//! and how the auctioneer picks a winner and a payment.
//!
//! MPRA is the fairness-prioritised multi-preference mechanism. The two
//! baselines are price-only stand-ins for the CDARA and ICAA mechanisms: the
//! cheapest bid wins and is paid as offered. CDARA-style vendors quote their
//! base prices, ICAA-style vendors scale them up with load.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::history::HistoryStore;
use crate::market::{Bid, BuyerRequest, VendorId, VendorProfile};
use crate::priority::label_bids;
use crate::saw::ScoreMatrix;
use crate::winner::{determine_winner, AuctionResult, BidderDiagnostics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Mpra,
    Cdara,
    Icaa,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] =
        [StrategyKind::Mpra, StrategyKind::Cdara, StrategyKind::Icaa];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Mpra => "mpra",
            StrategyKind::Cdara => "cdara",
            StrategyKind::Icaa => "icaa",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mpra" => Ok(StrategyKind::Mpra),
            "cdara" => Ok(StrategyKind::Cdara),
            "icaa" => Ok(StrategyKind::Icaa),
            other => Err(format!(
                "unknown strategy `{other}` (expected mpra, cdara or icaa)"
            )),
        }
    }
}

/// Auctioneer and pricing knobs shared by all strategies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyParams {
    pub pr_index: f64,
    /// `O`: auctions looked back on for priority labels.
    pub loss_window: u32,
    /// `W`: solicitations looked back on for the acceptance rate.
    pub acceptance_window: u32,
    /// `α` in the ICAA-style load factor `1 + α (1 - availability)`.
    pub demand_coefficient: f64,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            pr_index: 0.4,
            loss_window: 10,
            acceptance_window: 10,
            demand_coefficient: 0.5,
        }
    }
}

/// One bid from every vendor with enough free capacity for the request.
pub fn solicit_bids(
    request: &BuyerRequest,
    vendors: &[VendorProfile],
    kind: StrategyKind,
    history: &HistoryStore,
    params: &StrategyParams,
) -> Result<Vec<Bid>> {
    vendors
        .iter()
        .filter(|v| v.can_serve(&request.bundle))
        .map(|v| {
            let availability = v.availability()?;
            let base = v.bid_price(&request.bundle);
            let sp = match kind {
                StrategyKind::Mpra | StrategyKind::Cdara => base,
                StrategyKind::Icaa => {
                    base * (1.0 + params.demand_coefficient * (1.0 - availability))
                }
            };
            let acceptance = history.acceptance_rate(v.id(), params.acceptance_window)?;
            Bid::new(v.id().clone(), request.id, sp, availability, acceptance)
        })
        .collect()
}

pub fn allocate(
    request: &BuyerRequest,
    bids: &[Bid],
    kind: StrategyKind,
    history: &HistoryStore,
    params: &StrategyParams,
) -> Result<AuctionResult> {
    if bids.is_empty() {
        return Err(Error::EmptyBids);
    }
    match kind {
        StrategyKind::Mpra => allocate_mpra(request, bids, history, params),
        StrategyKind::Cdara | StrategyKind::Icaa => Ok(lowest_price(bids)),
    }
}

fn allocate_mpra(
    request: &BuyerRequest,
    bids: &[Bid],
    history: &HistoryStore,
    params: &StrategyParams,
) -> Result<AuctionResult> {
    let labels = label_bids(bids, params.loss_window, history)?;
    let raw: Vec<[f64; 3]> = bids.iter().map(Bid::param_values).collect();
    let matrix = ScoreMatrix::compute(&raw, &request.weights)?;
    let scores: BTreeMap<VendorId, f64> = bids
        .iter()
        .zip(matrix.scores())
        .map(|(b, &q)| (b.vendor.clone(), q))
        .collect();
    let mut result = determine_winner(bids, &labels, &scores, params.pr_index)?;
    for (diag, row) in result.diagnostics.iter_mut().zip(matrix.scaled()) {
        diag.scaled = Some(*row);
    }
    Ok(result)
}

/// First-price rule: cheapest bid wins, ties to the smaller vendor id.
fn lowest_price(bids: &[Bid]) -> AuctionResult {
    let winner = bids
        .iter()
        .min_by(|a, b| {
            a.sp()
                .total_cmp(&b.sp())
                .then_with(|| a.vendor.cmp(&b.vendor))
        })
        .expect("bids are non-empty");
    AuctionResult {
        winner: winner.vendor.clone(),
        cost: winner.sp(),
        priority_list: bids.iter().map(|b| b.vendor.clone()).collect(),
        diagnostics: bids
            .iter()
            .map(|b| BidderDiagnostics {
                vendor: b.vendor.clone(),
                sp: b.sp(),
                pr: None,
                scaled: None,
                score: None,
            })
            .collect(),
        fallback: false,
    }
}
