//! Pivotal (VCG) charges.
//!
//! With `p*` the optimal total and `p*₋ₖ` the optimum with bidder `k`
//! removed, bidder `k` is paid
//!
//! ```text
//! c_k = p*₋ₖ − (p* − b_k(x*))
//! ```
//!
//! which depends on `k`'s own bid only through the allocation. The customer
//! pays `Σ c_k = p* + Σ (p*₋ₖ − p*)`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use thiserror::Error;

use crate::instance::{AuctionInstance, BidderId, ServiceType, ValuationSchedule};
use crate::money::{Money, SignedMoney};
use crate::wdp::{solve_wdp, solve_wdp_excluding_index, Allocation, SolveOutcome};
use crate::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChargeError {
    #[error("the request cannot be served, so there is nothing to charge")]
    NotServed,
    #[error("expected {expected} pivotal outcomes, got {actual}")]
    PivotCountMismatch { expected: usize, actual: usize },
    #[error("bidder {0} is not part of the instance")]
    UnknownBidder(BidderId),
    #[error("no valuation for bidder {bidder} at size {size}")]
    MissingValuation { bidder: BidderId, size: u32 },
    #[error("raise fraction must be non-negative")]
    NegativeRaise,
    #[error("scaled prices overflow")]
    Overflow,
    #[error("baseline total is zero")]
    ZeroBaseline,
    #[error("report fell back to the optimal total; change of payment is undefined")]
    FallbackReport,
    #[error("reports are for different requests")]
    MismatchedReports,
}

/// `p*₋ₖ`, or infeasibility of the problem without `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pivot {
    Value(Money),
    Infeasible,
}

impl Pivot {
    pub fn value(self) -> Option<Money> {
        match self {
            Pivot::Value(m) => Some(m),
            Pivot::Infeasible => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BidderCharge {
    pub bidder: BidderId,
    pub pivotal: Pivot,
    pub charge: Money,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChargeReport {
    service: ServiceType,
    requested_seats: u32,
    allocation: Allocation,
    per_bidder: Vec<BidderCharge>,
    total_charge: Money,
    fallback: bool,
}

impl ChargeReport {
    pub fn service(&self) -> ServiceType {
        self.service
    }

    pub fn requested_seats(&self) -> u32 {
        self.requested_seats
    }

    /// `p*`
    pub fn optimum(&self) -> Money {
        self.allocation.total_bid()
    }

    pub fn allocation(&self) -> &Allocation {
        &self.allocation
    }

    /// One entry per bidder, in bidder-id order.
    pub fn per_bidder(&self) -> &[BidderCharge] {
        &self.per_bidder
    }

    pub fn charge_of(&self, bidder: &BidderId) -> Option<Money> {
        self.entry(bidder).map(|e| e.charge)
    }

    pub fn entry(&self, bidder: &BidderId) -> Option<&BidderCharge> {
        self.per_bidder.iter().find(|e| &e.bidder == bidder)
    }

    /// What the customer pays.
    pub fn total_charge(&self) -> Money {
        self.total_charge
    }

    /// Set when removing some winner leaves the request unservable; the
    /// total then reverts to `p*`.
    pub fn fallback(&self) -> bool {
        self.fallback
    }

    /// `p* + Σ (p*₋ₖ − p*)` computed from the pivotal values alone. `None`
    /// when some pivotal problem is infeasible.
    pub fn pivotal_identity_total(&self) -> Option<Money> {
        let p = self.optimum();
        self.per_bidder.iter().try_fold(p, |acc, e| {
            let gap = e.pivotal.value()?.checked_sub(p)?;
            acc.checked_add(gap)
        })
    }
}

/// Solves the main problem and all `K` exclusion problems in bidder order.
pub fn vcg_charges(instance: &AuctionInstance) -> Result<ChargeReport, ChargeError> {
    let main = solve_wdp(instance);
    let pivots = (0..instance.bidder_count())
        .map(|k| solve_wdp_excluding_index(instance, k))
        .collect::<Vec<_>>();
    assemble_charge_report(instance, main, pivots)
}

/// Builds the report from independently computed solutions; `pivots[k]`
/// must be the solution without `instance.bids()[k]`.
pub fn assemble_charge_report(
    instance: &AuctionInstance,
    main: SolveOutcome,
    pivots: Vec<SolveOutcome>,
) -> Result<ChargeReport, ChargeError> {
    let allocation = match main {
        SolveOutcome::Served(a) => a,
        SolveOutcome::Unservable => return Err(ChargeError::NotServed),
    };
    if pivots.len() != instance.bidder_count() {
        return Err(ChargeError::PivotCountMismatch {
            expected: instance.bidder_count(),
            actual: pivots.len(),
        });
    }
    let optimum = allocation.total_bid();
    let mut fallback = false;
    let mut per_bidder = Vec::with_capacity(pivots.len());
    for (bid, outcome) in instance.bids().iter().zip(pivots) {
        let own = allocation
            .assignment(bid.bidder())
            .map_or(Money::ZERO, |a| a.price);
        let (pivotal, charge) = match outcome.total() {
            Some(p_minus_k) => {
                // removing a bidder never lowers the optimum
                let gap = p_minus_k.checked_sub(optimum).expect("p*₋ₖ ≥ p*");
                (
                    Pivot::Value(p_minus_k),
                    own.checked_add(gap).expect("bounded"),
                )
            }
            None => {
                // only a winner can be indispensable
                fallback = true;
                (Pivot::Infeasible, own)
            }
        };
        per_bidder.push(BidderCharge {
            bidder: bid.bidder().clone(),
            pivotal,
            charge,
        });
    }
    let total_charge = if fallback {
        optimum
    } else {
        per_bidder.iter().map(|e| e.charge).sum()
    };
    Ok(ChargeReport {
        service: instance.service(),
        requested_seats: instance.requested_seats(),
        allocation,
        per_bidder,
        total_charge,
        fallback,
    })
}

/// Per-bidder utility `c_k − v_k(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UtilityLedger {
    entries: Vec<(BidderId, SignedMoney)>,
}

impl UtilityLedger {
    pub fn entries(&self) -> &[(BidderId, SignedMoney)] {
        &self.entries
    }

    pub fn utility_of(&self, bidder: &BidderId) -> Option<SignedMoney> {
        self.entries
            .iter()
            .find(|(b, _)| b == bidder)
            .map(|&(_, u)| u)
    }

    /// Social welfare: the sum of all utilities.
    pub fn total(&self) -> SignedMoney {
        SignedMoney::from_micros(self.entries.iter().map(|(_, u)| u.micros()).sum())
    }
}

/// Utilities under the charges the submitted bids produce.
pub fn bidder_utility(
    instance: &AuctionInstance,
    valuations: &[ValuationSchedule],
) -> Result<UtilityLedger, ChargeError> {
    let report = vcg_charges(instance)?;
    utility_from_report(&report, instance, valuations)
}

/// Same as [`bidder_utility`] for an already computed report.
pub fn utility_from_report(
    report: &ChargeReport,
    instance: &AuctionInstance,
    valuations: &[ValuationSchedule],
) -> Result<UtilityLedger, ChargeError> {
    let mut entries = Vec::with_capacity(instance.bidder_count());
    for bid in instance.bids() {
        let id = bid.bidder();
        let valuation = valuations.iter().find(|v| v.bidder() == id);
        for size in 1..=bid.max_size() {
            if valuation.and_then(|v| v.value(size)).is_none() {
                return Err(ChargeError::MissingValuation {
                    bidder: id.clone(),
                    size,
                });
            }
        }
        let utility = match report.allocation().assignment(id) {
            Some(a) => {
                let cost = valuation
                    .and_then(|v| v.value(a.seats))
                    .expect("checked above");
                let charge = report.charge_of(id).unwrap_or(Money::ZERO);
                charge.delta(cost)
            }
            None => SignedMoney::ZERO,
        };
        entries.push((id.clone(), utility));
    }
    Ok(UtilityLedger { entries })
}

/// Multiplies every price of each targeted bidder by `1 + raise_fraction`,
/// rounding half-up to micro-units.
pub fn perturb_bids(
    instance: &AuctionInstance,
    targets: &BTreeSet<BidderId>,
    raise_fraction: Ratio,
) -> Result<AuctionInstance, ChargeError> {
    if raise_fraction < Ratio::from_integer(0) {
        return Err(ChargeError::NegativeRaise);
    }
    let factor = raise_fraction + Ratio::from_integer(1);
    let mut out = instance.clone();
    for id in targets {
        let index = instance
            .bidder_index(id)
            .ok_or_else(|| ChargeError::UnknownBidder(id.clone()))?;
        let bid = &instance.bids()[index];
        let prices = bid
            .prices()
            .iter()
            .map(|p| p.scale_half_up(factor).ok_or(ChargeError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        out = out.replace_bid(index, bid.with_prices(prices));
    }
    // revalidate so the raised prices still fit the overflow bound
    out.with_bids(out.bids().to_vec())
        .map_err(|_| ChargeError::Overflow)
}

/// `(α − β) / β` with `β` the truthful total and `α` the perturbed one.
pub fn change_of_charge(
    truthful: &ChargeReport,
    perturbed: &ChargeReport,
) -> Result<Ratio, ChargeError> {
    if truthful.service() != perturbed.service()
        || truthful.requested_seats() != perturbed.requested_seats()
    {
        return Err(ChargeError::MismatchedReports);
    }
    relative_gap(perturbed.total_charge(), truthful.total_charge())
}

/// `(Σ c_k − p*) / p*`.
pub fn change_of_payment(report: &ChargeReport) -> Result<Ratio, ChargeError> {
    if report.fallback() {
        return Err(ChargeError::FallbackReport);
    }
    relative_gap(report.total_charge(), report.optimum())
}

fn relative_gap(value: Money, baseline: Money) -> Result<Ratio, ChargeError> {
    if baseline == Money::ZERO {
        return Err(ChargeError::ZeroBaseline);
    }
    let diff = value.micros() as i128 - baseline.micros() as i128;
    Ok(Ratio::new(diff, baseline.micros() as i128))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{validate_instance, RawInstance, RawSchedule};
    use crate::money::{money_from_decimal, ratio_to_decimal};
    use alloc::vec;

    fn s(id: &str, q: u32, p: &[&str]) -> RawSchedule {
        let p: Vec<Money> = p.iter().map(|x| money_from_decimal(x).unwrap()).collect();
        RawSchedule::new(id, q, &p)
    }

    fn e1(service: ServiceType) -> AuctionInstance {
        validate_instance(RawInstance {
            capacity: 5,
            requested_seats: 3,
            service,
            bids: vec![
                s("A", 5, &["0.40", "0.70", "0.90", "1.05", "1.15"]),
                s("B", 3, &["0.30", "0.55", "0.78"]),
            ],
        })
        .unwrap()
    }

    fn e2() -> AuctionInstance {
        validate_instance(RawInstance {
            capacity: 5,
            requested_seats: 4,
            service: ServiceType::Splittable,
            bids: vec![
                s("A", 5, &["0.20", "0.38", "0.80", "1.20", "1.50"]),
                s("B", 3, &["0.22", "0.40", "0.85"]),
                s("C", 5, &["0.30", "0.60", "0.95", "1.30", "1.60"]),
            ],
        })
        .unwrap()
    }

    fn micros(x: u64) -> Money {
        Money::from_micros(x)
    }

    fn ids(xs: &[&str]) -> BTreeSet<BidderId> {
        xs.iter().map(|&x| BidderId::from(x)).collect()
    }

    #[test]
    fn e1_splittable_report() {
        let r = vcg_charges(&e1(ServiceType::Splittable)).unwrap();
        assert_eq!(r.optimum(), micros(780_000));
        let a = r.entry(&"A".into()).unwrap();
        let b = r.entry(&"B".into()).unwrap();
        assert_eq!(a.pivotal, Pivot::Value(micros(780_000)));
        assert_eq!(a.charge, Money::ZERO);
        assert_eq!(b.pivotal, Pivot::Value(micros(900_000)));
        assert_eq!(b.charge, micros(900_000));
        assert_eq!(r.total_charge(), micros(900_000));
        assert!(!r.fallback());
    }

    #[test]
    fn e2_report_satisfies_identity() {
        let r = vcg_charges(&e2()).unwrap();
        assert_eq!(r.optimum(), micros(780_000));
        assert_eq!(r.charge_of(&"A".into()), Some(micros(600_000)));
        assert_eq!(r.charge_of(&"B".into()), Some(micros(600_000)));
        assert_eq!(r.charge_of(&"C".into()), Some(Money::ZERO));
        assert_eq!(r.total_charge(), micros(1_200_000));
        assert_eq!(r.pivotal_identity_total(), Some(micros(1_200_000)));
        assert_eq!(ratio_to_decimal(change_of_payment(&r).unwrap()), "0.538462");
    }

    #[test]
    fn e1_private_falls_back() {
        let r = vcg_charges(&e1(ServiceType::Private)).unwrap();
        assert!(r.fallback());
        assert_eq!(r.total_charge(), micros(1_150_000));
        assert_eq!(r.entry(&"A".into()).unwrap().pivotal, Pivot::Infeasible);
        assert_eq!(r.charge_of(&"A".into()), Some(micros(1_150_000)));
        assert_eq!(r.pivotal_identity_total(), None);
        assert_eq!(change_of_payment(&r), Err(ChargeError::FallbackReport));
    }

    #[test]
    fn unservable_has_no_report() {
        let inst = e1(ServiceType::Private);
        let only_b = inst.with_bids(vec![inst.bids()[1].clone()]).unwrap();
        assert_eq!(vcg_charges(&only_b), Err(ChargeError::NotServed));
    }

    #[test]
    fn truthful_utilities() {
        let inst = e1(ServiceType::Splittable);
        let vals: Vec<_> = inst
            .bids()
            .iter()
            .map(ValuationSchedule::truthful)
            .collect();
        let ledger = bidder_utility(&inst, &vals).unwrap();
        assert_eq!(
            ledger.utility_of(&"B".into()),
            Some(SignedMoney::from_micros(120_000))
        );
        assert_eq!(ledger.utility_of(&"A".into()), Some(SignedMoney::ZERO));

        let missing = bidder_utility(&inst, &vals[..1]);
        assert!(matches!(missing, Err(ChargeError::MissingValuation { .. })));
    }

    #[test]
    fn overbid_winner_keeps_utility() {
        let truthful = e1(ServiceType::Splittable);
        let vals: Vec<_> = truthful
            .bids()
            .iter()
            .map(ValuationSchedule::truthful)
            .collect();
        let lying = truthful
            .with_bids(vec![
                truthful.bids()[0].clone(),
                truthful.bids()[1].with_prices(vec![
                    micros(300_000),
                    micros(550_000),
                    micros(850_000),
                ]),
            ])
            .unwrap();
        let report = vcg_charges(&lying).unwrap();
        assert_eq!(report.charge_of(&"B".into()), Some(micros(900_000)));
        let ledger = utility_from_report(&report, &lying, &vals).unwrap();
        assert_eq!(
            ledger.utility_of(&"B".into()),
            Some(SignedMoney::from_micros(120_000))
        );
    }

    #[test]
    fn perturbation_examples() {
        let inst = e1(ServiceType::Splittable);
        let raised = perturb_bids(&inst, &ids(&["B"]), Ratio::new(1, 2)).unwrap();
        assert_eq!(
            raised.bids()[1].prices(),
            &[micros(450_000), micros(825_000), micros(1_170_000)]
        );
        assert_eq!(raised.bids()[0], inst.bids()[0]);
        let r = vcg_charges(&raised).unwrap();
        let winners: Vec<_> = r
            .allocation()
            .assignments()
            .iter()
            .map(|a| (a.bidder.as_str(), a.seats))
            .collect();
        assert_eq!(winners, vec![("A", 3)]);
        assert_eq!(r.total_charge(), micros(1_170_000));
        let base = vcg_charges(&inst).unwrap();
        assert_eq!(change_of_charge(&base, &r).unwrap(), Ratio::new(3, 10));

        let small = perturb_bids(&inst, &ids(&["B"]), Ratio::new(9, 100)).unwrap();
        let r = vcg_charges(&small).unwrap();
        assert!(r.allocation().is_winner(&"B".into()));
        assert_eq!(r.charge_of(&"B".into()), Some(micros(900_000)));
        assert_eq!(change_of_charge(&base, &r).unwrap(), Ratio::from_integer(0));

        assert_eq!(
            perturb_bids(&inst, &ids(&["A", "B"]), Ratio::from_integer(0)).unwrap(),
            inst
        );
        assert_eq!(
            perturb_bids(&inst, &ids(&["Q"]), Ratio::new(1, 10)),
            Err(ChargeError::UnknownBidder("Q".into()))
        );
        assert_eq!(
            perturb_bids(&inst, &ids(&["A"]), Ratio::new(-1, 10)),
            Err(ChargeError::NegativeRaise)
        );
    }

    #[test]
    fn ratio_edge_cases() {
        let r = vcg_charges(&e1(ServiceType::Splittable)).unwrap();
        assert_eq!(change_of_charge(&r, &r).unwrap(), Ratio::from_integer(0));
        assert_eq!(ratio_to_decimal(change_of_payment(&r).unwrap()), "0.153846");
        let private = vcg_charges(&e1(ServiceType::Private)).unwrap();
        assert_eq!(
            change_of_charge(&r, &private),
            Err(ChargeError::MismatchedReports)
        );
    }

    #[test]
    fn no_pivotal_bidder_means_zero_change_of_payment() {
        // two identical cheapest offers: either winner is replaceable at no cost
        let inst = validate_instance(RawInstance {
            capacity: 2,
            requested_seats: 1,
            service: ServiceType::NonSplittable,
            bids: vec![s("A", 1, &["0.50"]), s("B", 1, &["0.50"])],
        })
        .unwrap();
        let r = vcg_charges(&inst).unwrap();
        assert_eq!(r.total_charge(), r.optimum());
        assert_eq!(change_of_payment(&r).unwrap(), Ratio::from_integer(0));
    }
}
