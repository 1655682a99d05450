use std::path::PathBuf;

use crate::market::{ResourceType, VendorId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid resource quantity {value} for {resource}")]
    InvalidQuantity { resource: ResourceType, value: f64 },

    #[error("vendor {vendor}: request exceeds free capacity")]
    CapacityExceeded { vendor: VendorId },

    #[error("vendor {vendor}: release of {resource} exceeds allocated amount")]
    Underflow {
        vendor: VendorId,
        resource: ResourceType,
    },

    #[error("vendor {vendor}: {resource} capacity is zero")]
    ZeroCapacity {
        vendor: VendorId,
        resource: ResourceType,
    },

    #[error("invalid vendor profile {vendor}: {reason}")]
    InvalidVendor { vendor: VendorId, reason: String },

    #[error("invalid buyer request: {0}")]
    InvalidRequest(String),

    #[error("invalid preference weights: {0}")]
    InvalidWeights(String),

    #[error("invalid bid from {vendor}: {reason}")]
    InvalidBid { vendor: VendorId, reason: String },

    #[error("auction sequence {got} is not after {last}")]
    OutOfOrder { got: u64, last: u64 },

    #[error("malformed auction record {seq}: {reason}")]
    MalformedRecord { seq: u64, reason: String },

    #[error("window size must be at least 1")]
    EmptyWindow,

    #[error("loss count {loss} outside [0, {window}]")]
    LossOutOfRange { loss: i64, window: u32 },

    #[error("cannot scale an empty parameter column")]
    EmptyInput,

    #[error("non-finite raw parameter value {0}")]
    NonFinite(f64),

    #[error("dimension mismatch: {expected} weights, {got} scaled values")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("auction has no bids")]
    EmptyBids,

    #[error("duplicate bid from {0}")]
    DuplicateBidder(VendorId),

    #[error("bidder {0} has no priority label")]
    MissingLabel(VendorId),

    #[error("bidder {0} has no preference score")]
    MissingScore(VendorId),

    #[error("priority index {0} outside [0, 1]")]
    PriorityIndexRange(f64),

    #[error("no completed auctions")]
    NoAuctions,

    #[error("no vendors")]
    NoVendors,

    #[error("{field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("cannot read config {path}: {source}")]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot parse config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
