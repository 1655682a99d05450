//! Shared fixtures for the integration tests and the acceptance binary:
//! a random small-auction generator, a brute-force reference allocator
//! written from the rules alone, and the property checks.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use mpra::history::{AuctionRecord, BidSnapshot, HistoryStore};
use mpra::market::{Bid, BuyerRequest, PreferenceWeights, RequestId, ResourceBundle, VendorId};
use mpra::metrics::{payment_ratio, AuctionOutcome, ScenarioStats};
use mpra::priority::priority_label;
use mpra::saw::{scale_parameter, Polarity, ScoreMatrix};
use mpra::strategy::{allocate, StrategyKind, StrategyParams};
use mpra::winner::AuctionResult;

#[derive(Debug, Clone)]
pub struct Bidder {
    pub id: String,
    pub loss: u32,
    pub sp: f64,
    pub availability: f64,
    pub acceptance: f64,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub window: u32,
    pub pr_index: f64,
    pub weights: [f64; 3],
    pub bidders: Vec<Bidder>,
}

/// Values drawn from a coarse grid half the time, so ties actually happen.
fn coarse_or_fine(grid: f64, steps: u32, lo: f64, hi: f64) -> BoxedStrategy<f64> {
    prop_oneof![
        (0..=steps).prop_map(move |k| lo + grid * f64::from(k)),
        lo..=hi
    ]
    .boxed()
}

pub fn case_strategy() -> impl Strategy<Value = Case> {
    let window = 1u32..=12;
    let pr_index = prop_oneof![
        Just(0.4),
        (0u32..=10).prop_map(|k| f64::from(k) / 10.0),
        0.0..=1.0f64
    ];
    let weights = prop_oneof![
        Just([1.0, 1.0, 1.0]),
        [0u32..=4, 0u32..=4, 0u32..=4].prop_map(|w| w.map(f64::from)),
        [0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64],
    ]
    .prop_filter("weights must not all be zero", |w| {
        w.iter().sum::<f64>() > 0.0
    });
    (window, pr_index, weights, 2usize..=6)
        .prop_flat_map(|(window, pr_index, weights, n)| {
            let bidder = (
                0..=window,
                coarse_or_fine(10.0, 10, 50.0, 150.0),
                coarse_or_fine(0.25, 4, 0.0, 1.0),
                coarse_or_fine(0.5, 2, 0.0, 1.0),
            );
            let copies = proptest::collection::vec(proptest::bool::weighted(0.25), n);
            (
                proptest::collection::vec(bidder, n),
                copies,
                Just(window),
                Just(pr_index),
                Just(weights),
            )
        })
        .prop_map(|(mut rows, copies, window, pr_index, weights)| {
            // Some bidders repeat the previous offer, keeping their own loss
            // record, so exact score ties come up.
            for i in 1..rows.len() {
                if copies[i] {
                    let (_, sp, a, r) = rows[i - 1];
                    rows[i] = (rows[i].0, sp, a, r);
                }
            }
            Case {
                window,
                pr_index,
                weights,
                bidders: rows
                    .into_iter()
                    .enumerate()
                    .map(|(i, (loss, sp, availability, acceptance))| Bidder {
                        // Reverse order so vendor ids do not follow bid order.
                        id: format!("b{}", 9 - i),
                        loss,
                        sp,
                        availability,
                        acceptance,
                    })
                    .collect(),
            }
        })
}

impl Case {
    pub fn normalized_weights(&self) -> PreferenceWeights {
        PreferenceWeights::new(self.weights[0], self.weights[1], self.weights[2]).unwrap()
    }

    pub fn request(&self) -> BuyerRequest {
        BuyerRequest::new(
            RequestId(0),
            ResourceBundle::splat(1.0).unwrap(),
            0.0,
            0.0,
            1.0,
            self.normalized_weights(),
        )
        .unwrap()
    }

    pub fn bids(&self) -> Vec<Bid> {
        self.bidders
            .iter()
            .map(|b| {
                Bid::new(
                    VendorId::new(&b.id),
                    RequestId(0),
                    b.sp,
                    b.availability,
                    b.acceptance,
                )
                .unwrap()
            })
            .collect()
    }

    pub fn params(&self) -> StrategyParams {
        StrategyParams {
            pr_index: self.pr_index,
            loss_window: self.window,
            ..StrategyParams::default()
        }
    }

    /// A history in which each bidder lost exactly `loss` of its last
    /// `window` auctions, against a filler vendor that never bids here.
    pub fn history(&self) -> HistoryStore {
        let filler = VendorId::new("~filler");
        let snap = |v: &VendorId| BidSnapshot {
            vendor: v.clone(),
            sp: 1.0,
            availability: 1.0,
            acceptance_rate: 1.0,
            pr: None,
            score: None,
        };
        let mut h = HistoryStore::new();
        let mut seq = 0;
        for b in &self.bidders {
            let v = VendorId::new(&b.id);
            for k in 0..self.window {
                seq += 1;
                let winner = if k < b.loss { &filler } else { &v };
                h.record_auction(AuctionRecord {
                    seq,
                    request: RequestId(seq),
                    time: seq as f64,
                    solicited: vec![v.clone(), filler.clone()],
                    participants: vec![snap(&v), snap(&filler)],
                    winner: Some(winner.clone()),
                    payment: Some(1.0),
                    fallback: false,
                })
                .unwrap();
            }
        }
        h
    }

    pub fn run(&self, kind: StrategyKind) -> AuctionResult {
        allocate(
            &self.request(),
            &self.bids(),
            kind,
            &self.history(),
            &self.params(),
        )
        .unwrap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub winner: String,
    pub payment: f64,
    pub fallback: bool,
    pub priority: Vec<String>,
}

/// Brute force: label, filter, score every bidder from its raw values and
/// pick the bidder that no other eligible bidder beats.
pub fn oracle(case: &Case) -> OracleResult {
    let o = f64::from(case.window);
    let pr: Vec<f64> = case
        .bidders
        .iter()
        .map(|b| (o - f64::from(b.loss)) / o)
        .collect();
    let mut eligible: Vec<usize> = (0..case.bidders.len())
        .filter(|&i| pr[i] <= case.pr_index + 1e-12)
        .collect();
    let fallback = eligible.is_empty();
    if fallback {
        eligible = (0..case.bidders.len()).collect();
    }

    let w = case.normalized_weights();
    let w = w.as_slice();
    let column = |f: fn(&Bidder) -> f64| -> Vec<f64> { case.bidders.iter().map(f).collect() };
    let cols = [
        column(|b| b.sp),
        column(|b| b.availability),
        column(|b| b.acceptance),
    ];
    let scale = |col: &[f64], i: usize, lower_is_better: bool| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in col {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi == lo {
            1.0
        } else if lower_is_better {
            (hi - col[i]) / (hi - lo)
        } else {
            (col[i] - lo) / (hi - lo)
        }
    };
    let q: Vec<f64> = (0..case.bidders.len())
        .map(|i| {
            let s = [
                scale(&cols[0], i, true),
                scale(&cols[1], i, false),
                scale(&cols[2], i, false),
            ];
            0.0 + s[0] * w[0] + s[1] * w[1] + s[2] * w[2]
        })
        .collect();

    let beats = |a: usize, b: usize| {
        let (x, y) = (&case.bidders[a], &case.bidders[b]);
        if q[a] != q[b] {
            return q[a] > q[b];
        }
        if pr[a] != pr[b] {
            return pr[a] < pr[b];
        }
        if x.sp != y.sp {
            return x.sp < y.sp;
        }
        x.id < y.id
    };
    let winner = eligible
        .iter()
        .copied()
        .find(|&i| eligible.iter().all(|&j| j == i || beats(i, j)))
        .expect("strict order has a maximum");

    let payment = eligible.iter().map(|&i| case.bidders[i].sp).sum::<f64>() / eligible.len() as f64;
    let mut priority: Vec<usize> = eligible.clone();
    priority.sort_by(|&a, &b| {
        pr[a]
            .total_cmp(&pr[b])
            .then_with(|| case.bidders[a].id.cmp(&case.bidders[b].id))
    });
    OracleResult {
        winner: case.bidders[winner].id.clone(),
        payment,
        fallback,
        priority: priority
            .into_iter()
            .map(|i| case.bidders[i].id.clone())
            .collect(),
    }
}

/// Library result against the oracle; payment to within a relative 1e-12.
pub fn check_against_oracle(case: &Case) -> Result<(), TestCaseError> {
    let got = case.run(StrategyKind::Mpra);
    let want = oracle(case);
    prop_assert_eq!(got.winner.as_str(), want.winner.as_str());
    prop_assert_eq!(got.fallback, want.fallback);
    let got_priority: Vec<&str> = got.priority_list.iter().map(VendorId::as_str).collect();
    prop_assert_eq!(
        got_priority,
        want.priority.iter().map(String::as_str).collect::<Vec<_>>()
    );
    prop_assert!(
        (got.cost - want.payment).abs() <= 1e-12 * want.payment,
        "payment {} vs oracle {}",
        got.cost,
        want.payment
    );
    Ok(())
}

pub fn check_label(window: u32) -> Result<(), TestCaseError> {
    let mut prev = f64::INFINITY;
    for loss in 0..=window {
        let pr = priority_label(i64::from(loss), window).unwrap().value();
        prop_assert!((0.0..=1.0).contains(&pr));
        prop_assert!(pr < prev, "not strictly decreasing at loss {}", loss);
        prev = pr;
    }
    Ok(())
}

pub fn check_scaled_range(raw: &[f64]) -> Result<(), TestCaseError> {
    for polarity in [Polarity::Positive, Polarity::Negative] {
        let s = scale_parameter(raw, polarity).unwrap();
        prop_assert_eq!(s.len(), raw.len());
        prop_assert!(s.iter().all(|v| (0.0..=1.0).contains(v)), "{:?}", s);
    }
    Ok(())
}

/// Q of each bidder lies between its smallest and largest scaled value.
pub fn check_convex(raw: &[[f64; 3]], weights: [f64; 3]) -> Result<(), TestCaseError> {
    let w = PreferenceWeights::new(weights[0], weights[1], weights[2]).unwrap();
    prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    prop_assert!(w.as_slice().iter().all(|&p| p >= 0.0));
    let m = ScoreMatrix::compute(raw, &w).unwrap();
    for (row, &q) in m.scaled().iter().zip(m.scores()) {
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(
            q >= lo - 1e-12 && q <= hi + 1e-12,
            "{} outside [{}, {}]",
            q,
            lo,
            hi
        );
        prop_assert!((0.0..=1.0 + 1e-12).contains(&q));
    }
    Ok(())
}

fn clear_argmax(scores: &[f64]) -> Option<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    (scores.len() == 1 || scores[order[0]] - scores[order[1]] > 1e-9).then_some(order[0])
}

/// Rescaling one parameter's raw values by `a * x + b` with `a > 0`
/// changes neither the scaled values nor the top-scoring bidder.
pub fn check_affine(
    raw: &[[f64; 3]],
    weights: [f64; 3],
    q: usize,
    a: f64,
    b: f64,
) -> Result<(), TestCaseError> {
    let w = PreferenceWeights::new(weights[0], weights[1], weights[2]).unwrap();
    let before = ScoreMatrix::compute(raw, &w).unwrap();
    let moved: Vec<[f64; 3]> = raw
        .iter()
        .map(|row| {
            let mut row = *row;
            row[q] = a * row[q] + b;
            row
        })
        .collect();
    let after = ScoreMatrix::compute(&moved, &w).unwrap();
    for (x, y) in before.scaled().iter().zip(after.scaled()) {
        for k in 0..3 {
            prop_assert!((x[k] - y[k]).abs() <= 1e-9, "{:?} vs {:?}", x, y);
        }
    }
    let top = clear_argmax(before.scores());
    prop_assume!(top.is_some());
    prop_assert_eq!(top, clear_argmax(after.scores()));
    Ok(())
}

/// Winner is on the priority list and the payment lies within the list's bid range.
pub fn check_payment_bounds(case: &Case) -> Result<(), TestCaseError> {
    let r = case.run(StrategyKind::Mpra);
    prop_assert!(r.priority_list.contains(&r.winner));
    let listed: Vec<f64> = case
        .bidders
        .iter()
        .filter(|b| r.priority_list.iter().any(|v| v.as_str() == b.id))
        .map(|b| b.sp)
        .collect();
    let lo = listed.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = listed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    prop_assert!(
        lo <= r.cost && r.cost <= hi,
        "{} outside [{}, {}]",
        r.cost,
        lo,
        hi
    );
    Ok(())
}

/// Payment never exceeds the largest submitted bid, for every strategy.
pub fn check_payment_ratio(cases: &[Case]) -> Result<(), TestCaseError> {
    for kind in StrategyKind::ALL {
        let mut stats = ScenarioStats::new(kind, 0, Vec::new());
        for (seq, case) in cases.iter().enumerate() {
            let r = case.run(kind);
            let max_offer = case
                .bidders
                .iter()
                .map(|b| b.sp)
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(r.cost / max_offer <= 1.0);
            stats.auctions.push(AuctionOutcome {
                seq: seq as u64,
                request: RequestId(seq as u64),
                time: 0.0,
                winner: 0,
                payment: r.cost,
                max_offer,
                bidders: case.bidders.len(),
                fallback: r.fallback,
            });
        }
        let ratio = payment_ratio(&stats).unwrap();
        prop_assert!(ratio > 0.0 && ratio <= 1.0, "{}", ratio);
    }
    Ok(())
}

pub fn raw_column() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(coarse_or_fine(1.0, 5, -1e3, 1e3), 1..8)
}

pub fn raw_matrix() -> impl Strategy<Value = Vec<[f64; 3]>> {
    proptest::collection::vec(
        (
            coarse_or_fine(10.0, 10, 1.0, 500.0),
            coarse_or_fine(0.25, 4, 0.0, 1.0),
            coarse_or_fine(0.5, 2, 0.0, 1.0),
        )
            .prop_map(|(a, b, c)| [a, b, c]),
        1..7,
    )
}

pub fn raw_weights() -> impl Strategy<Value = [f64; 3]> {
    [0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64]
        .prop_filter("not all zero", |w| w.iter().sum::<f64>() > 1e-6)
}
