//! Discrete-event market simulation.
//!
//! Buyers arrive at random instants within each episode. An arriving
//! request is offered to every vendor; if any can serve it, an auction is
//! held under the configured strategy and the winner's capacity is held for
//! the service duration. Otherwise the request waits in a FIFO buffer until
//! its deadline. Each service completion frees capacity and retries the
//! oldest live buffered request, one per completion.
//!
//! Services still running at the end of an episode carry over into the next
//! one; requests still waiting are rejected at the episode boundary. History
//! persists for the whole scenario.

mod buffer;
mod config;
mod event;
pub mod rng;

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::Exp1;

pub use buffer::WaitBuffer;
pub use config::{Dist, ScenarioConfig, WeightsDist};
pub use event::{EventKind, EventQueue, SimEvent};

use crate::error::Result;
use crate::history::{AuctionRecord, BidSnapshot, HistoryStore};
use crate::market::{
    BuyerRequest, PreferenceWeights, PriceList, RequestId, ResourceBundle, VendorId, VendorProfile,
};
use crate::metrics::{AuctionOutcome, Money, ScenarioStats};
use crate::strategy::{allocate, solicit_bids, StrategyParams};
use rng::{stream, Stream};

/// How a buyer request left the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Allocated,
    TimedOut,
    /// Still waiting when its episode closed.
    EpisodeEnd,
}

/// Hooks for inspecting a run as it happens.
pub trait Observer {
    /// Called after each event has been fully handled.
    fn on_event(&mut self, _event: &SimEvent, _vendors: &[VendorProfile]) {}
    fn on_outcome(&mut self, _request: RequestId, _outcome: Outcome, _time: f64) {}
}

impl Observer for () {}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EpisodeStats {
    pub episode: usize,
    pub arrivals: u64,
    pub timeouts: u64,
    pub end_rejects: u64,
    /// Per vendor, in vendor order.
    pub revenue: Vec<Money>,
    pub auctions: Vec<AuctionOutcome>,
}

impl EpisodeStats {
    pub fn rejects(&self) -> u64 {
        self.timeouts + self.end_rejects
    }
}

fn round_bundle<R: Rng>(dist: &Dist, rng: &mut R) -> Result<ResourceBundle> {
    ResourceBundle::from_array(std::array::from_fn(|_| dist.sample(rng).round()))
}

/// Vendors `v001..`; vendor `i` is drawn from its own streams, so the first
/// `n` vendors are identical for every market size `>= n`.
pub fn generate_vendors(config: &ScenarioConfig) -> Result<Vec<VendorProfile>> {
    (0..config.n_vendors)
        .map(|i| {
            let idx = i as u64;
            let capacity = round_bundle(
                &config.capacity,
                &mut stream(config.seed, Stream::Capacity, idx),
            )?;
            let mut prices = stream(config.seed, Stream::BasePrice, idx);
            let base_price = PriceList::new(std::array::from_fn(|_| {
                config.base_price.sample(&mut prices)
            }))?;
            let markup = config
                .markup
                .sample(&mut stream(config.seed, Stream::Markup, idx));
            VendorProfile::new(VendorId::indexed(i + 1), capacity, base_price, markup)
        })
        .collect()
}

/// The requests of one episode, sorted by arrival time. Request ids are
/// `episode * buyers_per_episode + k` in arrival order.
pub fn generate_arrivals(config: &ScenarioConfig, episode: usize) -> Result<Vec<BuyerRequest>> {
    let idx = episode as u64;
    let n = config.buyers_per_episode;
    let start = episode as f64 * config.episode_length;

    let mut arrivals = stream(config.seed, Stream::Arrivals, idx);
    let mut times: Vec<f64> = (0..n)
        .map(|_| start + config.episode_length * arrivals.random::<f64>())
        .collect();
    times.sort_by(f64::total_cmp);

    let mut bundles = stream(config.seed, Stream::Bundles, idx);
    let mut durations = stream(config.seed, Stream::Durations, idx);
    let mut waits = stream(config.seed, Stream::Waits, idx);
    let mut weights = stream(config.seed, Stream::Weights, idx);

    times
        .into_iter()
        .enumerate()
        .map(|(k, arrival)| {
            let bundle = round_bundle(&config.bundle, &mut bundles)?;
            let duration = config.duration.sample(&mut durations);
            let max_wait = config.max_wait.sample(&mut waits);
            let w = match config.weights {
                WeightsDist::Simplex => {
                    let e: [f64; 3] = std::array::from_fn(|_| weights.sample(Exp1));
                    PreferenceWeights::new(e[0], e[1], e[2])?
                }
                WeightsDist::Fixed {
                    cost,
                    availability,
                    acceptance_rate,
                } => PreferenceWeights::new(cost, availability, acceptance_rate)?,
            };
            let id = RequestId((episode * n + k) as u64);
            BuyerRequest::new(id, bundle, arrival, max_wait, duration, w)
        })
        .collect()
}

/// One scenario run: vendors, history, clock and in-flight services.
pub struct Simulation {
    config: ScenarioConfig,
    params: StrategyParams,
    vendors: Vec<VendorProfile>,
    vendor_ids: Vec<VendorId>,
    vendor_index: BTreeMap<VendorId, usize>,
    history: HistoryStore,
    queue: EventQueue,
    buffer: WaitBuffer,
    clock: f64,
    next_seq: u64,
    stats: ScenarioStats,
}

impl Simulation {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let vendors = generate_vendors(&config)?;
        Self::with_vendors(config, vendors)
    }

    /// Uses the given vendors instead of drawing them; `n_vendors` is ignored.
    pub fn with_vendors(config: ScenarioConfig, vendors: Vec<VendorProfile>) -> Result<Self> {
        config.validate()?;
        let vendor_ids: Vec<VendorId> = vendors.iter().map(|v| v.id().clone()).collect();
        let vendor_index = vendor_ids
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, id)| (id, i))
            .collect();
        Ok(Simulation {
            params: config.strategy_params(),
            history: HistoryStore::with_vendors(&vendor_ids),
            stats: ScenarioStats::new(config.strategy, config.seed, vendor_ids.clone()),
            config,
            vendors,
            vendor_ids,
            vendor_index,
            queue: EventQueue::new(),
            buffer: WaitBuffer::new(),
            clock: 0.0,
            next_seq: 1,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn vendors(&self) -> &[VendorProfile] {
        &self.vendors
    }

    pub fn history(&self) -> &HistoryStore {
        &self.history
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    /// Services still holding capacity. Only meaningful between episodes.
    pub fn in_flight(&self) -> usize {
        self.queue.len()
    }

    pub fn run_episode(
        &mut self,
        episode: usize,
        observer: &mut impl Observer,
    ) -> Result<EpisodeStats> {
        let requests = generate_arrivals(&self.config, episode)?;
        self.run_requests(episode, requests, observer)
    }

    /// Runs one episode over the given requests, which must fall inside it.
    pub fn run_requests(
        &mut self,
        episode: usize,
        requests: Vec<BuyerRequest>,
        observer: &mut impl Observer,
    ) -> Result<EpisodeStats> {
        let end = (episode + 1) as f64 * self.config.episode_length;
        let mut ep = EpisodeStats {
            episode,
            revenue: vec![Money::ZERO; self.vendors.len()],
            ..Default::default()
        };
        for request in requests {
            self.queue
                .schedule(request.arrival_time, EventKind::BuyerArrival(request));
        }

        while self.queue.peek_time().is_some_and(|t| t < end) {
            let event = self.queue.pop().expect("peeked");
            debug_assert!(event.time >= self.clock, "clock moved backwards");
            self.clock = event.time;
            self.handle(&event, &mut ep, observer)?;
            observer.on_event(&event, &self.vendors);
        }

        self.clock = self.clock.max(end);
        let stranded: Vec<BuyerRequest> = self.buffer.drain().collect();
        for request in &stranded {
            ep.end_rejects += 1;
            observer.on_outcome(request.id, Outcome::EpisodeEnd, end);
        }
        // Remaining timeouts belong to stranded or already-resolved requests.
        self.queue
            .retain(|e| matches!(e.kind, EventKind::ServiceComplete { .. }));

        self.absorb(&ep);
        Ok(ep)
    }

    fn absorb(&mut self, ep: &EpisodeStats) {
        let s = &mut self.stats;
        s.episodes += 1;
        s.arrivals += ep.arrivals;
        s.timeouts += ep.timeouts;
        s.end_rejects += ep.end_rejects;
        for (total, r) in s.revenue.iter_mut().zip(&ep.revenue) {
            *total += *r;
        }
        for a in &ep.auctions {
            s.wins[a.winner] += 1;
        }
        s.auctions.extend(ep.auctions.iter().cloned());
    }

    fn handle(
        &mut self,
        event: &SimEvent,
        ep: &mut EpisodeStats,
        observer: &mut impl Observer,
    ) -> Result<()> {
        let now = event.time;
        match &event.kind {
            EventKind::BuyerArrival(request) => {
                ep.arrivals += 1;
                self.offer(request.clone(), now, false, ep, observer)?;
            }
            EventKind::ServiceComplete { vendor, bundle, .. } => {
                let i = self.vendor_index[vendor];
                self.vendors[i].release(bundle)?;
                let (live, expired) = self.buffer.pop_live(now);
                for request in expired {
                    ep.timeouts += 1;
                    observer.on_outcome(request.id, Outcome::TimedOut, now);
                }
                if let Some(request) = live {
                    self.offer(request, now, true, ep, observer)?;
                }
            }
            EventKind::BuyerTimeout(id) => {
                if self.buffer.remove(*id).is_some() {
                    ep.timeouts += 1;
                    observer.on_outcome(*id, Outcome::TimedOut, now);
                }
            }
        }
        Ok(())
    }

    /// Solicits bids for a request and either awards it or parks it in the buffer.
    fn offer(
        &mut self,
        request: BuyerRequest,
        now: f64,
        retry: bool,
        ep: &mut EpisodeStats,
        observer: &mut impl Observer,
    ) -> Result<()> {
        let kind = self.config.strategy;
        let bids = solicit_bids(&request, &self.vendors, kind, &self.history, &self.params)?;
        let seq = self.next_seq;
        self.next_seq += 1;

        if bids.is_empty() {
            self.history.record_auction(AuctionRecord {
                seq,
                request: request.id,
                time: now,
                solicited: self.vendor_ids.clone(),
                participants: Vec::new(),
                winner: None,
                payment: None,
                fallback: false,
            })?;
            if now >= request.deadline {
                ep.timeouts += 1;
                observer.on_outcome(request.id, Outcome::TimedOut, now);
            } else if retry {
                self.buffer.push_front(request);
            } else {
                self.queue
                    .schedule(request.deadline, EventKind::BuyerTimeout(request.id));
                self.buffer.push_back(request);
            }
            return Ok(());
        }

        let result = allocate(&request, &bids, kind, &self.history, &self.params)?;
        let winner = self.vendor_index[&result.winner];
        self.vendors[winner].reserve(&request.bundle)?;
        self.queue.schedule(
            now + request.duration,
            EventKind::ServiceComplete {
                vendor: result.winner.clone(),
                bundle: request.bundle,
                request: request.id,
            },
        );

        let max_offer = bids
            .iter()
            .map(|b| b.sp())
            .fold(f64::NEG_INFINITY, f64::max);
        let participants = bids
            .iter()
            .zip(&result.diagnostics)
            .map(|(bid, diag)| BidSnapshot {
                vendor: bid.vendor.clone(),
                sp: bid.sp(),
                availability: bid.availability(),
                acceptance_rate: bid.acceptance_rate(),
                pr: diag.pr,
                score: diag.score,
            })
            .collect();
        self.history.record_auction(AuctionRecord {
            seq,
            request: request.id,
            time: now,
            solicited: self.vendor_ids.clone(),
            participants,
            winner: Some(result.winner.clone()),
            payment: Some(result.cost),
            fallback: result.fallback,
        })?;

        ep.revenue[winner] += Money::from_currency(result.cost);
        ep.auctions.push(AuctionOutcome {
            seq,
            request: request.id,
            time: now,
            winner,
            payment: result.cost,
            max_offer,
            bidders: bids.len(),
            fallback: result.fallback,
        });
        observer.on_outcome(request.id, Outcome::Allocated, now);
        Ok(())
    }

    /// Lets every running service complete, then hands back the results.
    pub fn finish(mut self, observer: &mut impl Observer) -> Result<ScenarioRun> {
        let mut tail = EpisodeStats {
            revenue: vec![Money::ZERO; self.vendors.len()],
            ..Default::default()
        };
        while let Some(event) = self.queue.pop() {
            self.clock = event.time;
            self.handle(&event, &mut tail, observer)?;
            observer.on_event(&event, &self.vendors);
        }
        debug_assert!(tail.auctions.is_empty() && tail.rejects() == 0);
        Ok(ScenarioRun {
            stats: self.stats,
            history: self.history,
            vendors: self.vendors,
        })
    }
}

/// Result of a full scenario run.
pub struct ScenarioRun {
    pub stats: ScenarioStats,
    pub history: HistoryStore,
    /// Vendor state after every service has completed.
    pub vendors: Vec<VendorProfile>,
}

pub fn run_scenario_observed(
    config: &ScenarioConfig,
    observer: &mut impl Observer,
) -> Result<ScenarioRun> {
    let mut sim = Simulation::new(config.clone())?;
    for episode in 0..config.episodes {
        sim.run_episode(episode, observer)?;
    }
    sim.finish(observer)
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioStats> {
    Ok(run_scenario_observed(config, &mut ())?.stats)
}
