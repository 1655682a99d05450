//! Priority labels: `pr = 1 - loss / O`, where `loss` counts the vendor's
//! losses among its last `O` auctions. Lower is more urgent: a vendor that
//! lost everything recently has `pr = 0`, one that never lost has `pr = 1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::history::HistoryStore;
use crate::market::{Bid, VendorId};

/// Slack applied when comparing a label against the priority index, since
/// `k / O` is generally not representable exactly.
pub const INDEX_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PriorityLabel(f64);

impl PriorityLabel {
    pub fn value(self) -> f64 {
        self.0
    }

    /// Whether this label passes the `pr <= pr_index` filter.
    pub fn within(self, pr_index: f64) -> bool {
        self.0 <= pr_index + INDEX_SLACK
    }
}

pub fn priority_label(loss: i64, window: u32) -> Result<PriorityLabel> {
    if window == 0 {
        return Err(Error::EmptyWindow);
    }
    if loss < 0 || loss > i64::from(window) {
        return Err(Error::LossOutOfRange { loss, window });
    }
    Ok(PriorityLabel(1.0 - loss as f64 / f64::from(window)))
}

/// Labels every bidder from its recent loss record.
pub fn label_bids(
    bids: &[Bid],
    window: u32,
    history: &HistoryStore,
) -> Result<BTreeMap<VendorId, PriorityLabel>> {
    let mut labels = BTreeMap::new();
    for bid in bids {
        let loss = history.losses_in_window(&bid.vendor, window)?;
        let label = priority_label(i64::from(loss), window)?;
        if labels.insert(bid.vendor.clone(), label).is_some() {
            return Err(Error::DuplicateBidder(bid.vendor.clone()));
        }
    }
    Ok(labels)
}
