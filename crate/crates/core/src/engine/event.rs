use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::market::{BuyerRequest, RequestId, ResourceBundle, VendorId};

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    BuyerArrival(BuyerRequest),
    ServiceComplete {
        vendor: VendorId,
        bundle: ResourceBundle,
        request: RequestId,
    },
    BuyerTimeout(RequestId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEvent {
    pub time: f64,
    /// Insertion order; breaks ties between events at the same instant.
    pub seq: u64,
    pub kind: EventKind,
}

struct Queued(SimEvent);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // Reversed: BinaryHeap is a max-heap and we want the earliest event on top.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .time
            .total_cmp(&self.0.time)
            .then(other.0.seq.cmp(&self.0.seq))
    }
}

/// Min-queue of events ordered by (time, seq).
#[derive(Default)]
pub struct EventQueue {
    heap: BinaryHeap<Queued>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: f64, kind: EventKind) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Queued(SimEvent { time, seq, kind }));
        seq
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|q| q.0.time)
    }

    pub fn pop(&mut self) -> Option<SimEvent> {
        self.heap.pop().map(|q| q.0)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&SimEvent) -> bool) {
        self.heap.retain(|q| keep(&q.0));
    }
}
