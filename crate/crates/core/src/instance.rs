//! Auction instances: bidders, their seat-price schedules and the request.

use core::fmt;
use core::str::FromStr;

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::money::Money;

/// Largest value any reachable sum of prices may take. Keeping the sum of
/// every bidder's top price under this bound means DP totals, pivotal values
/// and `p*₋ₖ + bₖ` never overflow.
const TOTAL_PRICE_BOUND: u64 = u64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BidderId(String);

impl BidderId {
    pub fn new(id: impl Into<String>) -> Self {
        BidderId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BidderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for BidderId {
    fn from(s: &str) -> Self {
        BidderId::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ServiceType {
    /// Seats may come from several vehicles.
    Splittable,
    /// All passengers ride in one vehicle.
    NonSplittable,
    /// One whole empty vehicle.
    Private,
}

impl ServiceType {
    pub const ALL: [ServiceType; 3] = [
        ServiceType::Splittable,
        ServiceType::NonSplittable,
        ServiceType::Private,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ServiceType::Splittable => "splittable",
            ServiceType::NonSplittable => "nonsplittable",
            ServiceType::Private => "private",
        }
    }
}

impl fmt::Display for ServiceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown service type `{0}`")]
pub struct UnknownService(pub String);

impl FromStr for ServiceType {
    type Err = UnknownService;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "splittable" => Ok(ServiceType::Splittable),
            "nonsplittable" | "non-splittable" => Ok(ServiceType::NonSplittable),
            "private" => Ok(ServiceType::Private),
            _ => Err(UnknownService(s.into())),
        }
    }
}

/// One elected vehicle's asking price for every seat count it can offer.
///
/// `prices[m - 1]` is the price for `m` seats; sizes above the vehicle's
/// offerable seats are absent rather than priced prohibitively.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BidSchedule {
    bidder: BidderId,
    available_seats: u32,
    prices: Vec<Money>,
    concave: bool,
}

impl BidSchedule {
    pub fn bidder(&self) -> &BidderId {
        &self.bidder
    }

    /// `Q_k`: seats the vehicle can offer.
    pub fn available_seats(&self) -> u32 {
        self.available_seats
    }

    /// Largest seat count with a price, `min(Q_k, Q)`.
    pub fn max_size(&self) -> u32 {
        self.prices.len() as u32
    }

    pub fn price(&self, size: u32) -> Option<Money> {
        if size == 0 {
            return None;
        }
        self.prices.get(size as usize - 1).copied()
    }

    pub fn prices(&self) -> &[Money] {
        &self.prices
    }

    pub fn is_concave(&self) -> bool {
        self.concave
    }

    /// Iterates `(size, price)` pairs in increasing size.
    pub fn iter(&self) -> impl Iterator<Item = (u32, Money)> + '_ {
        self.prices
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as u32 + 1, p))
    }

    pub(crate) fn from_parts(
        bidder: BidderId,
        available_seats: u32,
        prices: Vec<Money>,
        concave: bool,
    ) -> Self {
        BidSchedule {
            bidder,
            available_seats,
            prices,
            concave,
        }
    }

    pub(crate) fn with_prices(&self, prices: Vec<Money>) -> Self {
        let concave = self.concave && has_diminishing_marginals(&prices);
        BidSchedule {
            bidder: self.bidder.clone(),
            available_seats: self.available_seats,
            prices,
            concave,
        }
    }
}

/// A bidder's true valuation `v_k(m)`; same shape and monotonicity as a bid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ValuationSchedule(BidSchedule);

impl ValuationSchedule {
    pub fn bidder(&self) -> &BidderId {
        self.0.bidder()
    }

    pub fn value(&self, size: u32) -> Option<Money> {
        self.0.price(size)
    }

    pub fn as_schedule(&self) -> &BidSchedule {
        &self.0
    }

    /// Validates `raw` against the capacity with the same rules as a bid.
    pub fn validate(raw: RawSchedule, capacity: u32) -> Result<Self, ValidationError> {
        validate_schedule(raw, capacity).map(ValuationSchedule)
    }

    /// Treats a validated bid as the truthful valuation.
    pub fn truthful(bid: &BidSchedule) -> Self {
        ValuationSchedule(bid.clone())
    }

    /// True when `bid(m) ≥ v(m)` for every size this valuation covers.
    pub fn dominated_by(&self, bid: &BidSchedule) -> bool {
        bid.bidder() == self.bidder()
            && self
                .0
                .iter()
                .all(|(m, v)| bid.price(m).is_none_or(|b| b >= v))
    }
}

/// A validated request together with the bids it is auctioned against.
///
/// Bids are kept sorted by bidder id; solver tie-breaks depend on that order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AuctionInstance {
    capacity: u32,
    requested_seats: u32,
    service: ServiceType,
    bids: Vec<BidSchedule>,
}

impl AuctionInstance {
    /// `Q`
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    /// `q_r`
    pub fn requested_seats(&self) -> u32 {
        self.requested_seats
    }

    pub fn service(&self) -> ServiceType {
        self.service
    }

    pub fn bids(&self) -> &[BidSchedule] {
        &self.bids
    }

    pub fn bidder_count(&self) -> usize {
        self.bids.len()
    }

    pub fn bidder_index(&self, id: &BidderId) -> Option<usize> {
        self.bids.binary_search_by(|b| b.bidder.cmp(id)).ok()
    }

    pub fn bid(&self, id: &BidderId) -> Option<&BidSchedule> {
        self.bidder_index(id).map(|i| &self.bids[i])
    }

    pub fn with_service(&self, service: ServiceType) -> Self {
        AuctionInstance {
            service,
            ..self.clone()
        }
    }

    /// Same bids under a different seat request.
    pub fn with_requested_seats(&self, requested_seats: u32) -> Result<Self, ValidationError> {
        check_request(self.capacity, requested_seats)?;
        Ok(AuctionInstance {
            requested_seats,
            ..self.clone()
        })
    }

    /// Replaces every bid schedule, revalidating price monotonicity.
    pub fn with_bids(&self, bids: Vec<BidSchedule>) -> Result<Self, ValidationError> {
        let raw = RawInstance {
            capacity: self.capacity,
            requested_seats: self.requested_seats,
            service: self.service,
            bids: bids.into_iter().map(RawSchedule::from).collect(),
        };
        validate_instance(raw)
    }

    pub(crate) fn from_sorted_parts(
        capacity: u32,
        requested_seats: u32,
        service: ServiceType,
        bids: Vec<BidSchedule>,
    ) -> Self {
        debug_assert!(bids.windows(2).all(|w| w[0].bidder < w[1].bidder));
        AuctionInstance {
            capacity,
            requested_seats,
            service,
            bids,
        }
    }

    pub(crate) fn replace_bid(&self, index: usize, bid: BidSchedule) -> Self {
        let mut bids = self.bids.clone();
        bids[index] = bid;
        AuctionInstance {
            bids,
            ..self.clone()
        }
    }
}

/// Unvalidated bid schedule as read from a file or built by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSchedule {
    pub bidder: BidderId,
    pub available_seats: u32,
    /// `(size, price)` pairs in any order.
    pub prices: Vec<(u32, Money)>,
    pub concave: bool,
}

impl RawSchedule {
    pub fn new(bidder: impl Into<String>, available_seats: u32, prices: &[Money]) -> Self {
        RawSchedule {
            bidder: BidderId::new(bidder),
            available_seats,
            prices: prices
                .iter()
                .enumerate()
                .map(|(i, &p)| (i as u32 + 1, p))
                .collect(),
            concave: false,
        }
    }

    pub fn concave(mut self) -> Self {
        self.concave = true;
        self
    }
}

impl From<BidSchedule> for RawSchedule {
    fn from(b: BidSchedule) -> Self {
        let prices = b.iter().collect();
        RawSchedule {
            bidder: b.bidder,
            available_seats: b.available_seats,
            prices,
            concave: b.concave,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInstance {
    pub capacity: u32,
    pub requested_seats: u32,
    pub service: ServiceType,
    pub bids: Vec<RawSchedule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("requested seats {requested} outside [1, {capacity}]")]
    SeatBoundViolation { requested: u32, capacity: u32 },
    #[error("bidder {bidder} offers {available} seats but vehicles hold {capacity}")]
    AvailabilityExceedsCapacity {
        bidder: BidderId,
        available: u32,
        capacity: u32,
    },
    #[error("bidder {bidder} prices size {size} but can offer at most {max_size}")]
    OversizedCombination {
        bidder: BidderId,
        size: u32,
        max_size: u32,
    },
    #[error("bidder {bidder} has no price for size {size}")]
    MissingPrice { bidder: BidderId, size: u32 },
    #[error("bidder {bidder} prices size {size} twice")]
    DuplicateSize { bidder: BidderId, size: u32 },
    #[error("bidder {bidder}: price for {size} seats is not above the price for {prev}", prev = size - 1)]
    NonMonotonePrices { bidder: BidderId, size: u32 },
    #[error("bidder {bidder} is flagged concave but its marginal price rises at size {size}")]
    NotConcave { bidder: BidderId, size: u32 },
    #[error("bidder {0} appears more than once")]
    DuplicateBidder(BidderId),
    #[error("prices are too large to sum without overflow")]
    AmountTooLarge,
}

fn check_request(capacity: u32, requested_seats: u32) -> Result<(), ValidationError> {
    if capacity == 0 {
        return Err(ValidationError::ZeroCapacity);
    }
    if requested_seats == 0 || requested_seats > capacity {
        return Err(ValidationError::SeatBoundViolation {
            requested: requested_seats,
            capacity,
        });
    }
    Ok(())
}

/// Marginals (taking a zero price for zero seats) never increase.
pub(crate) fn has_diminishing_marginals(prices: &[Money]) -> bool {
    first_concavity_violation(prices).is_none()
}

fn first_concavity_violation(prices: &[Money]) -> Option<u32> {
    let mut prev_price = Money::ZERO;
    let mut prev_marginal = u64::MAX;
    for (i, &p) in prices.iter().enumerate() {
        let marginal = p.micros().saturating_sub(prev_price.micros());
        if marginal > prev_marginal {
            return Some(i as u32 + 1);
        }
        prev_marginal = marginal;
        prev_price = p;
    }
    None
}

fn validate_schedule(raw: RawSchedule, capacity: u32) -> Result<BidSchedule, ValidationError> {
    let bidder = raw.bidder;
    if raw.available_seats > capacity {
        return Err(ValidationError::AvailabilityExceedsCapacity {
            bidder,
            available: raw.available_seats,
            capacity,
        });
    }
    let max_size = raw.available_seats.min(capacity);
    let mut slots: Vec<Option<Money>> = alloc::vec![None; max_size as usize];
    for (size, price) in raw.prices {
        if size == 0 || size > max_size {
            return Err(ValidationError::OversizedCombination {
                bidder,
                size,
                max_size,
            });
        }
        let slot = &mut slots[size as usize - 1];
        if slot.is_some() {
            return Err(ValidationError::DuplicateSize { bidder, size });
        }
        *slot = Some(price);
    }
    let mut prices = Vec::with_capacity(slots.len());
    for (i, slot) in slots.into_iter().enumerate() {
        let size = i as u32 + 1;
        let price = slot.ok_or_else(|| ValidationError::MissingPrice {
            bidder: bidder.clone(),
            size,
        })?;
        if let Some(&prev) = prices.last() {
            if price <= prev {
                return Err(ValidationError::NonMonotonePrices { bidder, size });
            }
        }
        prices.push(price);
    }
    if raw.concave {
        if let Some(size) = first_concavity_violation(&prices) {
            return Err(ValidationError::NotConcave { bidder, size });
        }
    }
    Ok(BidSchedule {
        bidder,
        available_seats: raw.available_seats,
        prices,
        concave: raw.concave,
    })
}

/// Checks the seat bound `1 ≤ q_r ≤ Q`, per-bidder price coverage and strict
/// monotonicity, and the concavity flag; sorts bids by bidder id.
pub fn validate_instance(raw: RawInstance) -> Result<AuctionInstance, ValidationError> {
    check_request(raw.capacity, raw.requested_seats)?;
    let mut bids = raw
        .bids
        .into_iter()
        .map(|b| validate_schedule(b, raw.capacity))
        .collect::<Result<Vec<_>, _>>()?;
    bids.sort_by(|a, b| a.bidder.cmp(&b.bidder));
    if let Some(w) = bids.windows(2).find(|w| w[0].bidder == w[1].bidder) {
        return Err(ValidationError::DuplicateBidder(w[0].bidder.clone()));
    }
    let mut bound: u64 = 0;
    for b in &bids {
        let top = b.prices.last().map_or(0, |p| p.micros());
        bound = bound
            .checked_add(top)
            .filter(|&s| s <= TOTAL_PRICE_BOUND)
            .ok_or(ValidationError::AmountTooLarge)?;
    }
    Ok(AuctionInstance {
        capacity: raw.capacity,
        requested_seats: raw.requested_seats,
        service: raw.service,
        bids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(micros: u64) -> Money {
        Money::from_micros(micros)
    }

    fn bidder_a() -> RawSchedule {
        RawSchedule::new(
            "A",
            5,
            &[
                m(400_000),
                m(700_000),
                m(900_000),
                m(1_050_000),
                m(1_150_000),
            ],
        )
    }

    fn raw(requested: u32, bids: Vec<RawSchedule>) -> RawInstance {
        RawInstance {
            capacity: 5,
            requested_seats: requested,
            service: ServiceType::Splittable,
            bids,
        }
    }

    #[test]
    fn accepts_valid_instance() {
        let inst = validate_instance(raw(3, vec![bidder_a()])).unwrap();
        assert_eq!(inst.bids()[0].max_size(), 5);
        assert_eq!(inst.bids()[0].price(3), Some(m(900_000)));
        assert_eq!(inst.bids()[0].price(6), None);
    }

    #[test]
    fn rejects_seat_bound() {
        assert!(matches!(
            validate_instance(raw(6, vec![bidder_a()])),
            Err(ValidationError::SeatBoundViolation {
                requested: 6,
                capacity: 5
            })
        ));
        assert!(matches!(
            validate_instance(raw(0, vec![bidder_a()])),
            Err(ValidationError::SeatBoundViolation { .. })
        ));
    }

    #[test]
    fn rejects_flat_prices() {
        let flat = RawSchedule::new("A", 2, &[m(400_000), m(400_000)]);
        assert!(matches!(
            validate_instance(raw(1, vec![flat])),
            Err(ValidationError::NonMonotonePrices { size: 2, .. })
        ));
    }

    #[test]
    fn rejects_duplicates_and_oversize() {
        assert!(matches!(
            validate_instance(raw(1, vec![bidder_a(), bidder_a()])),
            Err(ValidationError::DuplicateBidder(_))
        ));
        let over = RawSchedule::new("B", 2, &[m(1), m(2), m(3)]);
        assert!(matches!(
            validate_instance(raw(1, vec![over])),
            Err(ValidationError::OversizedCombination {
                size: 3,
                max_size: 2,
                ..
            })
        ));
        let short = RawSchedule::new("B", 3, &[m(1), m(2)]);
        assert!(matches!(
            validate_instance(raw(1, vec![short])),
            Err(ValidationError::MissingPrice { size: 3, .. })
        ));
        let big = RawSchedule::new("B", 6, &[m(1)]);
        assert!(matches!(
            validate_instance(raw(1, vec![big])),
            Err(ValidationError::AvailabilityExceedsCapacity { .. })
        ));
    }

    #[test]
    fn concave_flag_is_checked() {
        // marginals 0.40, 0.30, 0.20, 0.15, 0.10
        assert!(validate_instance(raw(1, vec![bidder_a().concave()])).is_ok());
        let convex = RawSchedule::new("C", 3, &[m(100), m(300), m(600)]).concave();
        assert!(matches!(
            validate_instance(raw(1, vec![convex])),
            Err(ValidationError::NotConcave { size: 2, .. })
        ));
        // rising marginal against the zero-seat baseline
        let steep_start = RawSchedule::new("C", 3, &[m(100), m(500), m(800)]).concave();
        assert!(matches!(
            validate_instance(raw(1, vec![steep_start])),
            Err(ValidationError::NotConcave { size: 2, .. })
        ));
    }

    #[test]
    fn empty_schedule_is_allowed() {
        let empty = RawSchedule::new("Z", 0, &[]);
        let inst = validate_instance(raw(1, vec![empty])).unwrap();
        assert_eq!(inst.bids()[0].max_size(), 0);
    }

    #[test]
    fn bids_sorted_by_id() {
        let b = RawSchedule::new("B", 1, &[m(1)]);
        let inst = validate_instance(raw(1, vec![b, bidder_a()])).unwrap();
        assert_eq!(inst.bids()[0].bidder().as_str(), "A");
        assert_eq!(inst.bidder_index(&"B".into()), Some(1));
    }

    #[test]
    fn rejects_overflowing_prices() {
        let huge = RawSchedule::new("H", 1, &[m(u64::MAX / 2)]);
        assert_eq!(
            validate_instance(raw(1, vec![huge])),
            Err(ValidationError::AmountTooLarge)
        );
    }
}
