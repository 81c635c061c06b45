//! Exact winner determination for the three service types.
//!
//! Seats are homogeneous, so a bid is identified by its seat count and each
//! problem collapses to a small integer program:
//!
//! * splittable: pick at most one size per bidder covering `q_r` seats,
//!   solved by a dynamic program over (bidder, seats still required);
//! * non-splittable: one bidder supplies all `q_r` seats;
//! * private: one bidder supplies a whole vehicle of `Q` seats.
//!
//! Among equal-cost allocations the one with fewer winners wins, then the
//! lexicographically smallest `(bidder, size)` list.

use core::cmp::Ordering;

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::instance::{AuctionInstance, BidSchedule, BidderId, ServiceType};
use crate::money::Money;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub bidder: BidderId,
    pub seats: u32,
    pub price: Money,
}

/// Winning bids and their total `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    assignments: Vec<Assignment>,
    total_bid: Money,
}

impl Allocation {
    pub(crate) fn from_assignments(assignments: Vec<Assignment>) -> Self {
        let total_bid = assignments.iter().map(|a| a.price).sum();
        Allocation {
            assignments,
            total_bid,
        }
    }

    /// Assignments in increasing bidder-id order.
    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn total_bid(&self) -> Money {
        self.total_bid
    }

    pub fn seat_count(&self) -> u32 {
        self.assignments.iter().map(|a| a.seats).sum()
    }

    pub fn winner_count(&self) -> usize {
        self.assignments.len()
    }

    pub fn assignment(&self, bidder: &BidderId) -> Option<&Assignment> {
        self.assignments.iter().find(|a| &a.bidder == bidder)
    }

    pub fn is_winner(&self, bidder: &BidderId) -> bool {
        self.assignment(bidder).is_some()
    }

    /// Tie-break order: total, then number of winners, then the sorted
    /// `(bidder, size)` list.
    pub fn preference_cmp(&self, other: &Allocation) -> Ordering {
        self.total_bid
            .cmp(&other.total_bid)
            .then(self.assignments.len().cmp(&other.assignments.len()))
            .then_with(|| {
                let lhs = self.assignments.iter().map(|a| (&a.bidder, a.seats));
                let rhs = other.assignments.iter().map(|a| (&a.bidder, a.seats));
                lhs.cmp(rhs)
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SolveOutcome {
    Served(Allocation),
    /// The feasible region is empty.
    Unservable,
}

impl SolveOutcome {
    pub fn allocation(&self) -> Option<&Allocation> {
        match self {
            SolveOutcome::Served(a) => Some(a),
            SolveOutcome::Unservable => None,
        }
    }

    pub fn total(&self) -> Option<Money> {
        self.allocation().map(Allocation::total_bid)
    }

    pub fn is_served(&self) -> bool {
        matches!(self, SolveOutcome::Served(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("bidder {0} is not part of the instance")]
    UnknownBidder(BidderId),
}

/// Minimises the total bid for the instance's service type.
pub fn solve_wdp(instance: &AuctionInstance) -> SolveOutcome {
    solve_skipping(instance, None)
}

/// Solves the problem with one bidder removed; its value is `p*₋ₖ`.
pub fn solve_wdp_excluding(
    instance: &AuctionInstance,
    excluded: &BidderId,
) -> Result<SolveOutcome, SolveError> {
    let index = instance
        .bidder_index(excluded)
        .ok_or_else(|| SolveError::UnknownBidder(excluded.clone()))?;
    Ok(solve_skipping(instance, Some(index)))
}

/// Same as [`solve_wdp_excluding`] addressed by position in `instance.bids()`.
pub fn solve_wdp_excluding_index(instance: &AuctionInstance, index: usize) -> SolveOutcome {
    assert!(index < instance.bidder_count(), "bidder index out of range");
    solve_skipping(instance, Some(index))
}

fn solve_skipping(instance: &AuctionInstance, skip: Option<usize>) -> SolveOutcome {
    let bids = instance.bids();
    let picks = match instance.service() {
        ServiceType::Splittable => splittable(bids, skip, instance.requested_seats()),
        ServiceType::NonSplittable => single_vehicle(bids, skip, instance.requested_seats()),
        ServiceType::Private => single_vehicle(bids, skip, instance.capacity()),
    };
    match picks {
        Some(picks) => SolveOutcome::Served(Allocation::from_assignments(
            picks
                .into_iter()
                .map(|(i, seats)| Assignment {
                    bidder: bids[i].bidder().clone(),
                    seats,
                    price: bids[i].price(seats).expect("picked size is priced"),
                })
                .collect(),
        )),
        None => SolveOutcome::Unservable,
    }
}

/// Cheapest single bidder able to supply exactly `seats` seats; strictly
/// increasing prices make every larger size dominated.
fn single_vehicle(
    bids: &[BidSchedule],
    skip: Option<usize>,
    seats: u32,
) -> Option<Vec<(usize, u32)>> {
    let mut best: Option<(Money, usize)> = None;
    for (i, bid) in bids.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        if let Some(price) = bid.price(seats) {
            // bids are id-sorted, so `<` keeps the smallest id on ties
            if best.is_none_or(|(p, _)| price < p) {
                best = Some((price, i));
            }
        }
    }
    best.map(|(_, i)| vec![(i, seats)])
}

/// DP cell: (total micro-units, winners).
type Cost = (u64, u32);

/// Exact cover of `need` seats with at most one size per bidder.
///
/// `best[j][r]` is the cheapest way for bidders `j..` to supply exactly `r`
/// seats. Reconstruction walks forward and takes the current bidder with the
/// smallest size whenever that stays optimal, which yields the
/// lexicographically smallest optimal assignment list.
fn splittable(bids: &[BidSchedule], skip: Option<usize>, need: u32) -> Option<Vec<(usize, u32)>> {
    let need = need as usize;
    let n = bids.len();
    let width = need + 1;
    let mut best: Vec<Option<Cost>> = vec![None; (n + 1) * width];
    best[n * width] = Some((0, 0));

    for j in (0..n).rev() {
        let (row, next) = best.split_at_mut((j + 1) * width);
        let row = &mut row[j * width..];
        let next = &next[..width];
        row.copy_from_slice(next);
        if Some(j) == skip {
            continue;
        }
        let bid = &bids[j];
        for r in 1..=need {
            let max_take = (bid.max_size() as usize).min(r);
            for s in 1..=max_take {
                if let Some((total, count)) = next[r - s] {
                    let cand = (total + bid.prices()[s - 1].micros(), count + 1);
                    if row[r].is_none_or(|cur| cand < cur) {
                        row[r] = Some(cand);
                    }
                }
            }
        }
    }

    best[need]?;
    let mut picks = Vec::new();
    let mut r = need;
    for j in 0..n {
        if r == 0 {
            break;
        }
        if Some(j) == skip {
            continue;
        }
        let target = best[j * width + r].expect("reachable state");
        let next = &best[(j + 1) * width..(j + 2) * width];
        let bid = &bids[j];
        let max_take = (bid.max_size() as usize).min(r);
        let take = (1..=max_take).find(|&s| {
            next[r - s].is_some_and(|(total, count)| {
                (total + bid.prices()[s - 1].micros(), count + 1) == target
            })
        });
        if let Some(s) = take {
            picks.push((j, s as u32));
            r -= s;
        }
    }
    debug_assert_eq!(r, 0);
    Some(picks)
}

/// Whether each service type has a non-empty feasible region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Feasibility {
    pub splittable: bool,
    pub non_splittable: bool,
    pub private: bool,
}

impl Feasibility {
    pub fn get(&self, service: ServiceType) -> bool {
        match service {
            ServiceType::Splittable => self.splittable,
            ServiceType::NonSplittable => self.non_splittable,
            ServiceType::Private => self.private,
        }
    }

    pub fn all(&self) -> bool {
        self.splittable && self.non_splittable && self.private
    }
}

/// Splittable needs `Σ min(Q_k, Q) ≥ q_r`, non-splittable `max Q_k ≥ q_r`,
/// private some `Q_k = Q`.
pub fn feasibility(instance: &AuctionInstance) -> Feasibility {
    let sizes = instance.bids().iter().map(BidSchedule::max_size);
    let total: u64 = sizes.clone().map(u64::from).sum();
    let largest = sizes.max().unwrap_or(0);
    let q_r = instance.requested_seats();
    Feasibility {
        splittable: total >= u64::from(q_r),
        non_splittable: largest >= q_r,
        private: largest == instance.capacity(),
    }
}
