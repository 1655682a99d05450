//! Market domain types: resources, vendors, buyer requests and bids.
//!
//! Vendors hold a fixed capacity of four resource types and reserve part of
//! it for every request they win. Quantities are plain `f64`s in each
//! resource's natural unit; the simulator draws them in whole units so that
//! reserve/release accounting is exact.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceType {
    /// Processing speed, MIPS.
    Cpu,
    /// MB.
    Memory,
    /// MB.
    Storage,
    /// B/s.
    Bandwidth,
}

impl ResourceType {
    pub const ALL: [ResourceType; 4] = [
        ResourceType::Cpu,
        ResourceType::Memory,
        ResourceType::Storage,
        ResourceType::Bandwidth,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn unit(self) -> &'static str {
        match self {
            ResourceType::Cpu => "MIPS",
            ResourceType::Memory | ResourceType::Storage => "MB",
            ResourceType::Bandwidth => "B/s",
        }
    }
}

impl fmt::Display for ResourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceType::Cpu => "cpu",
            ResourceType::Memory => "memory",
            ResourceType::Storage => "storage",
            ResourceType::Bandwidth => "bandwidth",
        })
    }
}

/// Non-negative quantity of each resource type.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResourceBundle([f64; 4]);

impl ResourceBundle {
    pub const ZERO: ResourceBundle = ResourceBundle([0.0; 4]);

    pub fn new(cpu: f64, memory: f64, storage: f64, bandwidth: f64) -> Result<Self> {
        Self::from_array([cpu, memory, storage, bandwidth])
    }

    pub fn splat(quantity: f64) -> Result<Self> {
        Self::from_array([quantity; 4])
    }

    pub fn from_array(quantities: [f64; 4]) -> Result<Self> {
        for resource in ResourceType::ALL {
            let value = quantities[resource.index()];
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidQuantity { resource, value });
            }
        }
        Ok(ResourceBundle(quantities))
    }

    pub fn get(&self, resource: ResourceType) -> f64 {
        self.0[resource.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&q| q == 0.0)
    }

    /// Componentwise `self <= other`.
    pub fn fits_within(&self, other: &ResourceBundle) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// Componentwise difference; fails on the first resource that would go negative.
    pub fn checked_sub(&self, other: &ResourceBundle) -> std::result::Result<Self, ResourceType> {
        let mut out = [0.0; 4];
        for resource in ResourceType::ALL {
            let i = resource.index();
            if other.0[i] > self.0[i] {
                return Err(resource);
            }
            out[i] = self.0[i] - other.0[i];
        }
        Ok(ResourceBundle(out))
    }
}

impl Add for ResourceBundle {
    type Output = ResourceBundle;

    fn add(self, rhs: ResourceBundle) -> ResourceBundle {
        let mut out = self.0;
        for (a, b) in out.iter_mut().zip(rhs.0) {
            *a += b;
        }
        ResourceBundle(out)
    }
}

/// Price per unit of each resource type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceList([f64; 4]);

impl PriceList {
    pub fn new(prices: [f64; 4]) -> Result<Self> {
        if prices.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::validation(
                "base_price",
                "prices must be finite and non-negative",
            ));
        }
        Ok(PriceList(prices))
    }

    pub fn get(&self, resource: ResourceType) -> f64 {
        self.0[resource.index()]
    }

    /// Σ quantity × unit price.
    pub fn cost_of(&self, bundle: &ResourceBundle) -> f64 {
        ResourceType::ALL
            .iter()
            .map(|&r| bundle.get(r) * self.get(r))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VendorId(String);

impl VendorId {
    pub fn new(id: impl Into<String>) -> Self {
        VendorId(id.into())
    }

    /// Zero-padded so lexicographic order matches index order.
    pub fn indexed(index: usize) -> Self {
        VendorId(format!("v{:03}", index))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VendorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RequestId(pub u64);

impl fmt::Display for RequestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// A selling vendor: fixed capacity, what is currently reserved, and how it prices.
#[derive(Debug, Clone, PartialEq)]
pub struct VendorProfile {
    id: VendorId,
    capacity: ResourceBundle,
    allocated: ResourceBundle,
    base_price: PriceList,
    markup: f64,
}

impl VendorProfile {
    pub fn new(
        id: VendorId,
        capacity: ResourceBundle,
        base_price: PriceList,
        markup: f64,
    ) -> Result<Self> {
        if !(markup.is_finite() && markup > 0.0) {
            return Err(Error::InvalidVendor {
                vendor: id,
                reason: format!("markup must be positive, got {markup}"),
            });
        }
        Ok(VendorProfile {
            id,
            capacity,
            allocated: ResourceBundle::ZERO,
            base_price,
            markup,
        })
    }

    pub fn id(&self) -> &VendorId {
        &self.id
    }

    pub fn capacity(&self) -> &ResourceBundle {
        &self.capacity
    }

    pub fn allocated(&self) -> &ResourceBundle {
        &self.allocated
    }

    pub fn base_price(&self) -> &PriceList {
        &self.base_price
    }

    pub fn markup(&self) -> f64 {
        self.markup
    }

    pub fn can_serve(&self, bundle: &ResourceBundle) -> bool {
        (self.allocated + *bundle).fits_within(&self.capacity)
    }

    pub fn reserve(&mut self, bundle: &ResourceBundle) -> Result<()> {
        if !self.can_serve(bundle) {
            return Err(Error::CapacityExceeded {
                vendor: self.id.clone(),
            });
        }
        self.allocated = self.allocated + *bundle;
        Ok(())
    }

    pub fn release(&mut self, bundle: &ResourceBundle) -> Result<()> {
        self.allocated =
            self.allocated
                .checked_sub(bundle)
                .map_err(|resource| Error::Underflow {
                    vendor: self.id.clone(),
                    resource,
                })?;
        Ok(())
    }

    /// Asking price for a bundle: markup × Σ quantity × base price.
    pub fn bid_price(&self, bundle: &ResourceBundle) -> f64 {
        self.markup * self.base_price.cost_of(bundle)
    }

    /// Mean free-capacity fraction over the four resource types.
    pub fn availability(&self) -> Result<f64> {
        let mut total = 0.0;
        for resource in ResourceType::ALL {
            let cap = self.capacity.get(resource);
            if cap == 0.0 {
                return Err(Error::ZeroCapacity {
                    vendor: self.id.clone(),
                    resource,
                });
            }
            total += (cap - self.allocated.get(resource)) / cap;
        }
        Ok((total / 4.0).clamp(0.0, 1.0))
    }
}

/// The three buyer preference parameters, in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preference {
    Cost,
    Availability,
    AcceptanceRate,
}

impl Preference {
    pub const ALL: [Preference; 3] = [
        Preference::Cost,
        Preference::Availability,
        Preference::AcceptanceRate,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }
}

/// Buyer weights over [`Preference::ALL`], normalized to sum to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreferenceWeights([f64; 3]);

impl PreferenceWeights {
    pub fn new(cost: f64, availability: f64, acceptance_rate: f64) -> Result<Self> {
        let raw = [cost, availability, acceptance_rate];
        if raw.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "weights must be finite and non-negative, got {raw:?}"
            )));
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidWeights(
                "at least one weight must be positive".into(),
            ));
        }
        Ok(PreferenceWeights(raw.map(|w| w / sum)))
    }

    pub fn uniform() -> Self {
        PreferenceWeights([1.0 / 3.0; 3])
    }

    pub fn get(&self, preference: Preference) -> f64 {
        self.0[preference.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuyerRequest {
    pub id: RequestId,
    pub bundle: ResourceBundle,
    pub arrival_time: f64,
    /// Absolute deadline; doubles as the expiry of the wait buffer entry.
    pub deadline: f64,
    pub duration: f64,
    pub weights: PreferenceWeights,
}

impl BuyerRequest {
    pub fn new(
        id: RequestId,
        bundle: ResourceBundle,
        arrival_time: f64,
        max_wait: f64,
        duration: f64,
        weights: PreferenceWeights,
    ) -> Result<Self> {
        if !arrival_time.is_finite() {
            return Err(Error::InvalidRequest(format!(
                "{id}: arrival time not finite"
            )));
        }
        if !(max_wait.is_finite() && max_wait >= 0.0) {
            return Err(Error::InvalidRequest(format!(
                "{id}: max wait must be >= 0, got {max_wait}"
            )));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidRequest(format!(
                "{id}: duration must be > 0, got {duration}"
            )));
        }
        Ok(BuyerRequest {
            id,
            bundle,
            arrival_time,
            deadline: arrival_time + max_wait,
            duration,
            weights,
        })
    }

    pub fn max_wait(&self) -> f64 {
        self.deadline - self.arrival_time
    }
}

/// A vendor's offer for one request, with the raw preference-parameter values
/// the buyer scores it on. The cost parameter is the selling price itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Bid {
    pub vendor: VendorId,
    pub request: RequestId,
    sp: f64,
    availability: f64,
    acceptance_rate: f64,
}

impl Bid {
    pub fn new(
        vendor: VendorId,
        request: RequestId,
        sp: f64,
        availability: f64,
        acceptance_rate: f64,
    ) -> Result<Self> {
        let reason = if !(sp.is_finite() && sp > 0.0) {
            Some(format!("selling price must be positive, got {sp}"))
        } else if !(0.0..=1.0).contains(&availability) {
            Some(format!("availability {availability} outside [0, 1]"))
        } else if !(0.0..=1.0).contains(&acceptance_rate) {
            Some(format!("acceptance rate {acceptance_rate} outside [0, 1]"))
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(Error::InvalidBid { vendor, reason });
        }
        Ok(Bid {
            vendor,
            request,
            sp,
            availability,
            acceptance_rate,
        })
    }

    pub fn sp(&self) -> f64 {
        self.sp
    }

    pub fn availability(&self) -> f64 {
        self.availability
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.acceptance_rate
    }

    /// Raw values in [`Preference::ALL`] order.
    pub fn param_values(&self) -> [f64; 3] {
        [self.sp, self.availability, self.acceptance_rate]
    }
}
