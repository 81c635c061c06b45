//! Seeded random auction scenarios.
//!
//! Each bidder of each case owns its own ChaCha20 stream, labelled
//! `case-<c>/bidder-<k>`. A scenario with more bidders therefore contains
//! the bidders of every smaller scenario with the same seed, and the two
//! cost laws draw from the same stream, so comparisons across `K` and across
//! cost laws are paired case by case.

use alloc::format;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::instance::{AuctionInstance, BidSchedule, BidderId, ServiceType, ValidationError};
use crate::money::{Money, MICROS_PER_UNIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostLaw {
    /// Per-seat cost uniform on (0, 1].
    LargeVariation,
    /// Per-seat cost `0.5 + U(0, 0.1]`.
    SmallVariation,
}

impl CostLaw {
    pub fn as_str(self) -> &'static str {
        match self {
            CostLaw::LargeVariation => "large",
            CostLaw::SmallVariation => "small",
        }
    }

    /// Mean per-seat cost in currency units.
    pub fn mean(self) -> f64 {
        match self {
            CostLaw::LargeVariation => 0.5,
            CostLaw::SmallVariation => 0.55,
        }
    }

    /// Draws a per-seat cost, rounded up to a whole micro-unit.
    pub fn sample(self, stream: &mut RngStream) -> Money {
        let unit = stream.next_unit();
        let micros = match self {
            CostLaw::LargeVariation => ceil_micros(unit, MICROS_PER_UNIT),
            CostLaw::SmallVariation => {
                MICROS_PER_UNIT / 2 + ceil_micros(unit, MICROS_PER_UNIT / 10)
            }
        };
        Money::from_micros(micros)
    }
}

/// `ceil(unit * span)` clamped to `[1, span]` for `unit ∈ (0, 1]`.
fn ceil_micros(unit: f64, span: u64) -> u64 {
    let x = unit * span as f64;
    let t = x as u64;
    let c = if (t as f64) < x { t + 1 } else { t };
    c.clamp(1, span)
}

/// How many seats each elected vehicle can offer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AvailabilityLaw {
    /// Uniform integer on `[1, Q]`.
    Uniform,
    /// `Q` (an empty vehicle) with the given probability, otherwise uniform
    /// on `[1, Q − 1]`.
    EmptyVehicle { probability: f64 },
}

impl AvailabilityLaw {
    fn sample(self, stream: &mut RngStream, capacity: u32) -> u32 {
        match self {
            AvailabilityLaw::Uniform => stream.range_inclusive(1, capacity),
            AvailabilityLaw::EmptyVehicle { probability } => {
                if capacity == 1 || stream.next_unit() <= probability {
                    capacity
                } else {
                    stream.range_inclusive(1, capacity - 1)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationLaw {
    pub cost: CostLaw,
    pub availability: AvailabilityLaw,
    /// Ratio between consecutive seat marginals, in (0, 1].
    pub concavity: f64,
    pub seed: u64,
}

impl GenerationLaw {
    pub const DEFAULT_CONCAVITY: f64 = 0.8;

    pub fn new(cost: CostLaw, seed: u64) -> Self {
        GenerationLaw {
            cost,
            availability: AvailabilityLaw::Uniform,
            concavity: Self::DEFAULT_CONCAVITY,
            seed,
        }
    }

    pub fn with_cost(self, cost: CostLaw) -> Self {
        GenerationLaw { cost, ..self }
    }

    fn check(&self) -> Result<(), ScenarioError> {
        if !(self.concavity > 0.0 && self.concavity <= 1.0) {
            return Err(ScenarioError::InvalidLaw("concavity must lie in (0, 1]"));
        }
        if let AvailabilityLaw::EmptyVehicle { probability } = self.availability {
            if !(0.0..=1.0).contains(&probability) {
                return Err(ScenarioError::InvalidLaw(
                    "empty-vehicle probability must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("invalid generation law: {0}")]
    InvalidLaw(&'static str),
    #[error("bidder count, capacity and case count must all be at least 1")]
    EmptyDimension,
    #[error("case {case} is out of range")]
    CaseOutOfRange { case: usize },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

/// A deterministic uniform generator for one labelled stream of a seed.
pub struct RngStream {
    rng: ChaCha20Rng,
}

/// Derives the stream `stream_id` of `seed`. Distinct labels select distinct
/// ChaCha20 stream numbers under the same key.
pub fn rng_stream(seed: u64, stream_id: &str) -> RngStream {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let hash = Sha256::digest(stream_id.as_bytes());
    let mut word = [0u8; 8];
    word.copy_from_slice(&hash[..8]);
    rng.set_stream(u64::from_le_bytes(word));
    RngStream { rng }
}

impl RngStream {
    /// Uniform on (0, 1]; never returns 0.
    pub fn next_unit(&mut self) -> f64 {
        // `random::<f64>()` is uniform on [0, 1)
        1.0 - self.rng.random::<f64>()
    }

    pub fn range_inclusive(&mut self, lo: u32, hi: u32) -> u32 {
        self.rng.random_range(lo..=hi)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.random()
    }

    /// Fisher-Yates sample of `count` distinct indices from `0..len`, sorted.
    pub fn sample_indices(&mut self, len: usize, count: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..len).collect();
        let count = count.min(len);
        for i in 0..count {
            let j = self.rng.random_range(i..len);
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool.sort_unstable();
        pool
    }
}

/// Prices `u · Σ_{i<m} γ^i` built from integer marginals: each marginal is
/// `u·γ^{m−1}` rounded half-up, never above the previous one and never below
/// one micro-unit, so the schedule is strictly increasing and concave
/// exactly.
pub fn geometric_prices(unit_cost: Money, concavity: f64, seats: u32) -> Vec<Money> {
    let mut prices = Vec::with_capacity(seats as usize);
    let mut total = 0u64;
    let mut previous = u64::MAX;
    let mut weight = 1.0f64;
    for _ in 0..seats {
        let raw = unit_cost.micros() as f64 * weight;
        let rounded = (raw + 0.5) as u64;
        let marginal = rounded.min(previous).max(1);
        total += marginal;
        prices.push(Money::from_micros(total));
        previous = marginal;
        weight *= concavity;
    }
    prices
}

/// One random case: the bids of every bidder, reusable for every request
/// size and service type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScenarioCase {
    /// Per-seat cost drawn for each bidder, in bid order.
    pub unit_costs: Vec<Money>,
    pub bids: Vec<BidSchedule>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioBatch {
    law: GenerationLaw,
    bidders: usize,
    capacity: u32,
    cases: Vec<ScenarioCase>,
}

impl ScenarioBatch {
    pub fn law(&self) -> &GenerationLaw {
        &self.law
    }

    /// `K`
    pub fn bidders(&self) -> usize {
        self.bidders
    }

    /// `Q`
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn case_count(&self) -> usize {
        self.cases.len()
    }

    pub fn cases(&self) -> &[ScenarioCase] {
        &self.cases
    }

    /// Case `case` as an auction for `requested_seats` seats of `service`.
    pub fn instance(
        &self,
        case: usize,
        requested_seats: u32,
        service: ServiceType,
    ) -> Result<AuctionInstance, ScenarioError> {
        let c = self
            .cases
            .get(case)
            .ok_or(ScenarioError::CaseOutOfRange { case })?;
        if requested_seats == 0 || requested_seats > self.capacity {
            return Err(ValidationError::SeatBoundViolation {
                requested: requested_seats,
                capacity: self.capacity,
            }
            .into());
        }
        Ok(AuctionInstance::from_sorted_parts(
            self.capacity,
            requested_seats,
            service,
            c.bids.clone(),
        ))
    }

    /// SHA-256 over every drawn cost and price.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(self.capacity.to_le_bytes());
        h.update((self.bidders as u64).to_le_bytes());
        for case in &self.cases {
            for (bid, cost) in case.bids.iter().zip(&case.unit_costs) {
                h.update(bid.bidder().as_str().as_bytes());
                h.update([0]);
                h.update(cost.micros().to_le_bytes());
                h.update(bid.available_seats().to_le_bytes());
                for p in bid.prices() {
                    h.update(p.micros().to_le_bytes());
                }
            }
        }
        let mut out = [0u8; 32];
        out.copy_from_slice(&h.finalize());
        out
    }
}

/// Zero-padded so that lexicographic order matches bidder number.
pub fn generated_bidder_id(index: usize) -> BidderId {
    BidderId::new(format!("{:03}", index + 1))
}

/// Draws `cases` independent cases of `bidders` bids each.
pub fn generate_batch(
    law: GenerationLaw,
    bidders: usize,
    capacity: u32,
    cases: usize,
) -> Result<ScenarioBatch, ScenarioError> {
    law.check()?;
    if bidders == 0 || capacity == 0 || cases == 0 {
        return Err(ScenarioError::EmptyDimension);
    }
    if bidders > 999 {
        return Err(ScenarioError::InvalidLaw("at most 999 bidders per case"));
    }
    let generated = (0..cases)
        .map(|c| {
            let mut unit_costs = Vec::with_capacity(bidders);
            let mut bids = Vec::with_capacity(bidders);
            for k in 0..bidders {
                let mut stream = rng_stream(law.seed, &format!("case-{c}/bidder-{k}"));
                let available = law.availability.sample(&mut stream, capacity);
                let cost = law.cost.sample(&mut stream);
                let prices = geometric_prices(cost, law.concavity, available.min(capacity));
                unit_costs.push(cost);
                bids.push(BidSchedule::from_parts(
                    generated_bidder_id(k),
                    available,
                    prices,
                    true,
                ));
            }
            ScenarioCase { unit_costs, bids }
        })
        .collect();
    Ok(ScenarioBatch {
        law,
        bidders,
        capacity,
        cases: generated,
    })
}
