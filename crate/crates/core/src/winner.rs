//! MPRA winner determination.
//!
//! Bidders are ordered by priority label, those at or below the priority
//! index form the priority list, the highest preference score on the list
//! wins, and the buyer pays the mean selling price of the list. When no
//! bidder clears the index (every vendor is fresh, for instance) the whole
//! bidder set stands in for the list and the result is flagged `fallback`.
//!
//! The payment can exceed the winner's own bid; it is never capped.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::market::{Bid, VendorId};
use crate::priority::PriorityLabel;

#[derive(Debug, Clone, PartialEq)]
pub struct BidderDiagnostics {
    pub vendor: VendorId,
    pub sp: f64,
    pub pr: Option<f64>,
    pub scaled: Option<[f64; 3]>,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuctionResult {
    pub winner: VendorId,
    /// What the buyer pays.
    pub cost: f64,
    /// Bidders eligible to win, in ascending `pr` order.
    pub priority_list: Vec<VendorId>,
    /// One entry per bid, in bid order.
    pub diagnostics: Vec<BidderDiagnostics>,
    pub fallback: bool,
}

struct Candidate<'a> {
    bid: &'a Bid,
    pr: f64,
    score: f64,
}

/// Ordering where `Less` means "preferred": higher score, then lower `pr`,
/// then lower price, then smaller vendor id.
fn preference_order(a: &Candidate, b: &Candidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.pr.total_cmp(&b.pr))
        .then(a.bid.sp().total_cmp(&b.bid.sp()))
        .then_with(|| a.bid.vendor.cmp(&b.bid.vendor))
}

pub fn determine_winner(
    bids: &[Bid],
    labels: &BTreeMap<VendorId, PriorityLabel>,
    scores: &BTreeMap<VendorId, f64>,
    pr_index: f64,
) -> Result<AuctionResult> {
    if bids.is_empty() {
        return Err(Error::EmptyBids);
    }
    if !(0.0..=1.0).contains(&pr_index) {
        return Err(Error::PriorityIndexRange(pr_index));
    }
    let mut seen = BTreeSet::new();
    let mut candidates = Vec::with_capacity(bids.len());
    for bid in bids {
        if !seen.insert(&bid.vendor) {
            return Err(Error::DuplicateBidder(bid.vendor.clone()));
        }
        let label = labels
            .get(&bid.vendor)
            .ok_or_else(|| Error::MissingLabel(bid.vendor.clone()))?;
        let score = *scores
            .get(&bid.vendor)
            .ok_or_else(|| Error::MissingScore(bid.vendor.clone()))?;
        candidates.push((
            *label,
            Candidate {
                bid,
                pr: label.value(),
                score,
            },
        ));
    }

    candidates.sort_by(|(_, a), (_, b)| {
        a.pr.total_cmp(&b.pr)
            .then_with(|| a.bid.vendor.cmp(&b.bid.vendor))
    });
    let filtered: Vec<&Candidate> = candidates
        .iter()
        .filter(|(label, _)| label.within(pr_index))
        .map(|(_, c)| c)
        .collect();
    let fallback = filtered.is_empty();
    let priority: Vec<&Candidate> = if fallback {
        candidates.iter().map(|(_, c)| c).collect()
    } else {
        filtered
    };

    let winner = priority
        .iter()
        .copied()
        .min_by(|a, b| preference_order(a, b))
        .expect("priority list is non-empty");
    let (lo, hi) = priority
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.bid.sp()), hi.max(c.bid.sp()))
        });
    // Rounding can push the mean an ulp outside [lo, hi].
    let cost =
        (priority.iter().map(|c| c.bid.sp()).sum::<f64>() / priority.len() as f64).clamp(lo, hi);

    let diagnostics = bids
        .iter()
        .map(|bid| BidderDiagnostics {
            vendor: bid.vendor.clone(),
            sp: bid.sp(),
            pr: Some(labels[&bid.vendor].value()),
            scaled: None,
            score: Some(scores[&bid.vendor]),
        })
        .collect();

    Ok(AuctionResult {
        winner: winner.bid.vendor.clone(),
        cost,
        priority_list: priority.iter().map(|c| c.bid.vendor.clone()).collect(),
        diagnostics,
        fallback,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::RequestId;
    use crate::priority::priority_label;

    fn bid(v: &str, sp: f64) -> Bid {
        Bid::new(VendorId::new(v), RequestId(1), sp, 1.0, 1.0).unwrap()
    }

    fn maps(
        entries: &[(&str, i64, f64)],
    ) -> (BTreeMap<VendorId, PriorityLabel>, BTreeMap<VendorId, f64>) {
        let labels = entries
            .iter()
            .map(|(v, loss, _)| (VendorId::new(*v), priority_label(*loss, 10).unwrap()))
            .collect();
        let scores = entries
            .iter()
            .map(|(v, _, q)| (VendorId::new(*v), *q))
            .collect();
        (labels, scores)
    }

    #[test]
    fn three_bidder_walkthrough() {
        let bids = [bid("v1", 100.0), bid("v2", 120.0), bid("v3", 90.0)];
        let (labels, scores) = maps(&[("v1", 10, 0.55), ("v2", 6, 0.60), ("v3", 0, 0.9)]);
        let result = determine_winner(&bids, &labels, &scores, 0.4).unwrap();
        assert_eq!(
            result.priority_list,
            vec![VendorId::new("v1"), VendorId::new("v2")]
        );
        assert_eq!(result.winner, VendorId::new("v2"));
        assert_eq!(result.cost, 110.0);
        assert!(!result.fallback);
    }

    #[test]
    fn single_bidder_pays_own_price() {
        let bids = [bid("solo", 42.0)];
        for loss in [0, 5, 10] {
            let (labels, scores) = maps(&[("solo", loss, 1.0)]);
            let result = determine_winner(&bids, &labels, &scores, 0.4).unwrap();
            assert_eq!(result.winner, VendorId::new("solo"));
            assert_eq!(result.cost, 42.0);
        }
    }

    #[test]
    fn all_fresh_falls_back_to_every_bidder() {
        let bids = [bid("a", 100.0), bid("b", 80.0), bid("c", 120.0)];
        let (labels, scores) = maps(&[("a", 0, 0.3), ("b", 0, 0.7), ("c", 0, 0.5)]);
        let result = determine_winner(&bids, &labels, &scores, 0.4).unwrap();
        assert!(result.fallback);
        assert_eq!(result.priority_list.len(), 3);
        assert_eq!(result.winner, VendorId::new("b"));
        assert_eq!(result.cost, 100.0);
    }

    #[test]
    fn ties_break_on_pr_then_price_then_id() {
        let bids = [bid("b", 100.0), bid("a", 100.0), bid("c", 90.0)];
        // Equal scores, c has the worst label.
        let (labels, scores) = maps(&[("a", 8, 0.5), ("b", 8, 0.5), ("c", 6, 0.5)]);
        let result = determine_winner(&bids, &labels, &scores, 0.4).unwrap();
        assert_eq!(result.winner, VendorId::new("a"));

        let (labels, scores) = maps(&[("a", 8, 0.5), ("b", 8, 0.5), ("c", 8, 0.5)]);
        let result = determine_winner(&bids, &labels, &scores, 0.4).unwrap();
        assert_eq!(result.winner, VendorId::new("c"));

        let (labels, scores) = maps(&[("a", 7, 0.5), ("b", 8, 0.5), ("c", 7, 0.5)]);
        let result = determine_winner(&bids, &labels, &scores, 0.4).unwrap();
        assert_eq!(result.winner, VendorId::new("b"));
    }

    #[test]
    fn errors() {
        let (labels, scores) = maps(&[("a", 0, 0.5)]);
        assert!(matches!(
            determine_winner(&[], &labels, &scores, 0.4),
            Err(Error::EmptyBids)
        ));
        assert!(matches!(
            determine_winner(&[bid("z", 1.0)], &labels, &scores, 0.4),
            Err(Error::MissingLabel(_))
        ));
        let (labels, _) = maps(&[("a", 0, 0.5)]);
        assert!(matches!(
            determine_winner(&[bid("a", 1.0)], &labels, &BTreeMap::new(), 0.4),
            Err(Error::MissingScore(_))
        ));
        assert!(matches!(
            determine_winner(&[bid("a", 1.0)], &labels, &scores, 1.5),
            Err(Error::PriorityIndexRange(_))
        ));
    }

    #[test]
    fn payment_may_exceed_winner_bid() {
        let bids = [bid("cheap", 50.0), bid("dear", 150.0)];
        let (labels, scores) = maps(&[("cheap", 10, 0.9), ("dear", 10, 0.1)]);
        let result = determine_winner(&bids, &labels, &scores, 0.4).unwrap();
        assert_eq!(result.winner, VendorId::new("cheap"));
        assert_eq!(result.cost, 100.0);
    }
}
