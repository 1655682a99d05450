mod common;

use std::collections::VecDeque;

use proptest::prelude::*;

use common::*;
use mpra::engine::{EventKind, EventQueue, WaitBuffer};
use mpra::market::{BuyerRequest, PreferenceWeights, RequestId, ResourceBundle};
use mpra::metrics::Money;

proptest! {
    #[test]
    fn labels_fall_with_losses(window in 1u32..=200) {
        check_label(window)?;
    }

    #[test]
    fn scaled_values_in_unit_range(raw in raw_column()) {
        check_scaled_range(&raw)?;
    }

    #[test]
    fn score_is_convex_combination(raw in raw_matrix(), w in raw_weights()) {
        check_convex(&raw, w)?;
    }

    #[test]
    fn top_score_survives_affine_rescaling(
        raw in raw_matrix(),
        w in raw_weights(),
        q in 0usize..3,
        a in 0.01f64..100.0,
        b in -100.0f64..100.0,
    ) {
        check_affine(&raw, w, q, a, b)?;
    }

    #[test]
    fn matches_reference_allocator(case in case_strategy()) {
        check_against_oracle(&case)?;
    }

    #[test]
    fn payment_within_priority_list(case in case_strategy()) {
        check_payment_bounds(&case)?;
    }

    #[test]
    fn payment_ratio_at_most_one(cases in proptest::collection::vec(case_strategy(), 1..5)) {
        check_payment_ratio(&cases)?;
    }

    #[test]
    fn event_queue_is_time_then_fifo(times in proptest::collection::vec(0u8..20, 0..40)) {
        let mut q = EventQueue::new();
        for (i, &t) in times.iter().enumerate() {
            q.schedule(f64::from(t), EventKind::BuyerTimeout(RequestId(i as u64)));
        }
        let mut expected: Vec<(u8, usize)> = times.iter().copied().zip(0..).collect();
        expected.sort();
        let got: Vec<(u8, usize)> = std::iter::from_fn(|| q.pop())
            .map(|e| match e.kind {
                EventKind::BuyerTimeout(RequestId(i)) => (e.time as u8, i as usize),
                _ => unreachable!(),
            })
            .collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn wait_buffer_serves_oldest_live_request(
        waits in proptest::collection::vec(0u8..50, 1..20),
        now in 0u8..60,
    ) {
        let mut buffer = WaitBuffer::new();
        let mut model = VecDeque::new();
        for (i, &w) in waits.iter().enumerate() {
            let r = BuyerRequest::new(
                RequestId(i as u64),
                ResourceBundle::splat(1.0).unwrap(),
                0.0,
                f64::from(w),
                1.0,
                PreferenceWeights::uniform(),
            )
            .unwrap();
            buffer.push_back(r);
            model.push_back((i as u64, f64::from(w)));
        }
        let (live, expired) = buffer.pop_live(f64::from(now));
        let mut want_expired = Vec::new();
        let mut want_live = None;
        while let Some((id, deadline)) = model.pop_front() {
            if f64::from(now) >= deadline {
                want_expired.push(id);
            } else {
                want_live = Some(id);
                break;
            }
        }
        prop_assert_eq!(live.map(|r| r.id.0), want_live);
        prop_assert_eq!(expired.iter().map(|r| r.id.0).collect::<Vec<_>>(), want_expired);
        prop_assert_eq!(buffer.len(), model.len());
    }

    #[test]
    fn money_sums_are_order_independent(amounts in proptest::collection::vec(0.0f64..1e6, 0..50)) {
        let forward: Money = amounts.iter().map(|&a| Money::from_currency(a)).sum();
        let backward: Money = amounts.iter().rev().map(|&a| Money::from_currency(a)).sum();
        prop_assert_eq!(forward, backward);
    }
}
