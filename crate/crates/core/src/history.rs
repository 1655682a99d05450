//! Transaction history: every solicitation the auctioneer makes, who bid,
//! who won, and what was paid. Priority labels, the acceptance-rate
//! preference and the fairness metric are all windowed queries over it.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::market::{RequestId, VendorId};
use crate::metrics::fmt_sig6;

/// One bidder as seen by the auctioneer at auction time.
#[derive(Debug, Clone, PartialEq)]
pub struct BidSnapshot {
    pub vendor: VendorId,
    pub sp: f64,
    pub availability: f64,
    pub acceptance_rate: f64,
    /// Priority label; only MPRA computes one.
    pub pr: Option<f64>,
    /// Aggregate preference score; only MPRA computes one.
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuctionRecord {
    pub seq: u64,
    pub request: RequestId,
    pub time: f64,
    /// Vendors the request was offered to, whether or not they bid.
    pub solicited: Vec<VendorId>,
    pub participants: Vec<BidSnapshot>,
    pub winner: Option<VendorId>,
    pub payment: Option<f64>,
    /// The priority filter came back empty and every bidder was considered.
    pub fallback: bool,
}

impl AuctionRecord {
    pub fn max_offer(&self) -> Option<f64> {
        self.participants.iter().map(|p| p.sp).reduce(f64::max)
    }

    fn validate(&self) -> Result<()> {
        let malformed = |reason: &str| Error::MalformedRecord {
            seq: self.seq,
            reason: reason.to_string(),
        };
        let mut seen = BTreeSet::new();
        for p in &self.participants {
            if !seen.insert(&p.vendor) {
                return Err(malformed("duplicate participant"));
            }
        }
        match (&self.winner, self.payment) {
            (Some(w), Some(_)) if !seen.contains(w) => Err(malformed("winner did not bid")),
            (Some(_), None) | (None, Some(_)) => Err(malformed(
                "payment must be present exactly when a winner is",
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryEntry {
    pub seq: u64,
    pub participated: bool,
    pub won: bool,
}

/// Solicitations of one vendor, oldest first.
#[derive(Debug, Clone, Default)]
pub struct VendorHistory {
    entries: Vec<HistoryEntry>,
    wins: u64,
}

impl VendorHistory {
    pub fn entries(&self) -> &[HistoryEntry] {
        &self.entries
    }

    pub fn offered(&self) -> usize {
        self.entries.len()
    }

    pub fn participations(&self) -> usize {
        self.entries.iter().filter(|e| e.participated).count()
    }

    pub fn wins(&self) -> u64 {
        self.wins
    }
}

#[derive(Debug, Clone, Default)]
pub struct HistoryStore {
    records: Vec<AuctionRecord>,
    vendors: BTreeMap<VendorId, VendorHistory>,
}

impl HistoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers vendors up front so they report zero wins before their first auction.
    pub fn with_vendors<'a>(ids: impl IntoIterator<Item = &'a VendorId>) -> Self {
        let mut store = Self::default();
        for id in ids {
            store.vendors.entry(id.clone()).or_default();
        }
        store
    }

    pub fn records(&self) -> &[AuctionRecord] {
        &self.records
    }

    pub fn vendor(&self, id: &VendorId) -> Option<&VendorHistory> {
        self.vendors.get(id)
    }

    pub fn last_seq(&self) -> Option<u64> {
        self.records.last().map(|r| r.seq)
    }

    pub fn record_auction(&mut self, record: AuctionRecord) -> Result<()> {
        if let Some(last) = self.last_seq() {
            if record.seq <= last {
                return Err(Error::OutOfOrder {
                    got: record.seq,
                    last,
                });
            }
        }
        record.validate()?;

        let bidders: BTreeSet<&VendorId> = record.participants.iter().map(|p| &p.vendor).collect();
        let offered: BTreeSet<&VendorId> = record
            .solicited
            .iter()
            .chain(bidders.iter().copied())
            .collect();
        for vendor in offered {
            let participated = bidders.contains(vendor);
            let won = record.winner.as_ref() == Some(vendor);
            let history = self.vendors.entry(vendor.clone()).or_default();
            history.entries.push(HistoryEntry {
                seq: record.seq,
                participated,
                won,
            });
            if won {
                history.wins += 1;
            }
        }
        self.records.push(record);
        Ok(())
    }

    /// Losses among the vendor's `window` most recent auctions it bid in.
    pub fn losses_in_window(&self, vendor: &VendorId, window: u32) -> Result<u32> {
        if window == 0 {
            return Err(Error::EmptyWindow);
        }
        let Some(history) = self.vendors.get(vendor) else {
            return Ok(0);
        };
        let losses = history
            .entries
            .iter()
            .rev()
            .filter(|e| e.participated)
            .take(window as usize)
            .filter(|e| !e.won)
            .count();
        Ok(losses as u32)
    }

    /// Fraction of the vendor's last `window` solicitations it bid on; 1.0 when never solicited.
    pub fn acceptance_rate(&self, vendor: &VendorId, window: u32) -> Result<f64> {
        if window == 0 {
            return Err(Error::EmptyWindow);
        }
        let recent = self
            .vendors
            .get(vendor)
            .map(|h| &h.entries[h.entries.len().saturating_sub(window as usize)..])
            .unwrap_or_default();
        if recent.is_empty() {
            return Ok(1.0);
        }
        let bids = recent.iter().filter(|e| e.participated).count();
        Ok(bids as f64 / recent.len() as f64)
    }

    /// Writes one CSV row per participant per auction; auctions nobody bid
    /// on get a single row with an empty vendor column.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        fn opt(v: Option<f64>) -> String {
            v.map(fmt_sig6).unwrap_or_default()
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "auction_seq",
            "request_id",
            "time",
            "vendor_id",
            "sp",
            "availability",
            "acceptance_rate",
            "pr",
            "score",
            "won",
            "payment",
            "fallback",
        ])?;
        for r in &self.records {
            let common = [r.seq.to_string(), r.request.to_string(), fmt_sig6(r.time)];
            if r.participants.is_empty() {
                let mut row = common.to_vec();
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.extend(["false".into(), String::new(), r.fallback.to_string()]);
                w.write_record(&row)?;
            }
            for p in &r.participants {
                let mut row = common.to_vec();
                row.extend([
                    p.vendor.to_string(),
                    fmt_sig6(p.sp),
                    fmt_sig6(p.availability),
                    fmt_sig6(p.acceptance_rate),
                    opt(p.pr),
                    opt(p.score),
                    (r.winner.as_ref() == Some(&p.vendor)).to_string(),
                    opt(r.payment),
                    r.fallback.to_string(),
                ]);
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn win_counts(&self) -> BTreeMap<VendorId, u64> {
        self.vendors
            .iter()
            .map(|(id, h)| (id.clone(), h.wins))
            .collect()
    }
}
