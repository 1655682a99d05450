use std::collections::VecDeque;

use crate::market::{BuyerRequest, RequestId};

/// FIFO of requests waiting for capacity. A request expires once the clock
/// reaches its deadline and is never handed out after that.
#[derive(Debug, Default)]
pub struct WaitBuffer {
    queue: VecDeque<BuyerRequest>,
}

impl WaitBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_back(&mut self, request: BuyerRequest) {
        self.queue.push_back(request);
    }

    /// Puts a retried request back at the head, keeping its place in line.
    pub fn push_front(&mut self, request: BuyerRequest) {
        self.queue.push_front(request);
    }

    /// Oldest request still live at `now`, plus any expired ones skipped on the way.
    pub fn pop_live(&mut self, now: f64) -> (Option<BuyerRequest>, Vec<BuyerRequest>) {
        let mut expired = Vec::new();
        while let Some(request) = self.queue.pop_front() {
            if now >= request.deadline {
                expired.push(request);
            } else {
                return (Some(request), expired);
            }
        }
        (None, expired)
    }

    pub fn remove(&mut self, id: RequestId) -> Option<BuyerRequest> {
        let pos = self.queue.iter().position(|r| r.id == id)?;
        self.queue.remove(pos)
    }

    pub fn drain(&mut self) -> impl Iterator<Item = BuyerRequest> + '_ {
        self.queue.drain(..)
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }
}
