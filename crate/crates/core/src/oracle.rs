//! Exhaustive reference solvers.
//!
//! These enumerate assignments directly and check the integer-program
//! constraints in their inequality form, independently of the DP in
//! [`crate::wdp`]. They exist to cross-check the exact solvers.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::instance::{AuctionInstance, ServiceType};
use crate::wdp::{Allocation, Assignment, SolveOutcome};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{combinations} assignments exceed the enumeration cap of {cap}")]
    EnumerationCapExceeded { combinations: u128, cap: u64 },
}

/// One bidder's options: each entry is the set of sizes it wins.
type Options = Vec<Vec<u32>>;

/// Every one-size-or-nothing assignment, filtered by the service's
/// constraints as stated:
///
/// * splittable: `Σ sizes ≥ q_r`;
/// * non-splittable: at most one winning bid overall and `Σ sizes ≥ q_r`;
/// * private: at most one winning bid overall and `Σ sizes ≥ Q`.
pub fn brute_force_wdp(instance: &AuctionInstance, cap: u64) -> Result<SolveOutcome, OracleError> {
    let options = instance
        .bids()
        .iter()
        .map(|b| {
            let mut opts: Options = vec![Vec::new()];
            opts.extend((1..=b.max_size()).map(|m| vec![m]));
            opts
        })
        .collect::<Vec<_>>();
    enumerate(instance, &options, cap)
}

/// Drops the one-bid-per-bidder constraint: a bidder may win several
/// distinct seat combinations as long as their sizes fit in its vehicle.
/// With concave schedules this attains the same optimum as
/// [`brute_force_wdp`].
pub fn relaxed_brute_force_wdp(
    instance: &AuctionInstance,
    cap: u64,
) -> Result<SolveOutcome, OracleError> {
    let options = instance
        .bids()
        .iter()
        .map(|b| distinct_size_sets(b.max_size()))
        .collect::<Vec<_>>();
    enumerate(instance, &options, cap)
}

/// All sets of distinct sizes in `1..=limit` whose sum is at most `limit`.
fn distinct_size_sets(limit: u32) -> Options {
    fn extend(start: u32, remaining: u32, current: &mut Vec<u32>, out: &mut Options) {
        out.push(current.clone());
        for size in start..=remaining {
            current.push(size);
            extend(size + 1, remaining - size, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    extend(1, limit, &mut Vec::new(), &mut out);
    out
}

fn enumerate(
    instance: &AuctionInstance,
    options: &[Options],
    cap: u64,
) -> Result<SolveOutcome, OracleError> {
    let combinations = options
        .iter()
        .try_fold(1u128, |acc, o| acc.checked_mul(o.len() as u128))
        .unwrap_or(u128::MAX);
    if combinations > u128::from(cap) {
        return Err(OracleError::EnumerationCapExceeded { combinations, cap });
    }

    let bids = instance.bids();
    let (seat_floor, single_bid) = match instance.service() {
        ServiceType::Splittable => (instance.requested_seats(), false),
        ServiceType::NonSplittable => (instance.requested_seats(), true),
        ServiceType::Private => (instance.capacity(), true),
    };

    let mut best: Option<Allocation> = None;
    let mut choice = vec![0usize; options.len()];
    loop {
        let mut seats = 0u32;
        let mut winning_bids = 0usize;
        for (k, &c) in choice.iter().enumerate() {
            let sizes = &options[k][c];
            seats += sizes.iter().sum::<u32>();
            winning_bids += sizes.len();
        }
        if seats >= seat_floor && (!single_bid || winning_bids <= 1) {
            let mut assignments = Vec::new();
            for (k, &c) in choice.iter().enumerate() {
                for &size in &options[k][c] {
                    assignments.push(Assignment {
                        bidder: bids[k].bidder().clone(),
                        seats: size,
                        price: bids[k].price(size).expect("option is priced"),
                    });
                }
            }
            let candidate = Allocation::from_assignments(assignments);
            if best
                .as_ref()
                .is_none_or(|b| candidate.preference_cmp(b).is_lt())
            {
                best = Some(candidate);
            }
        }

        // odometer step
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(best.map_or(SolveOutcome::Unservable, SolveOutcome::Served));
            }
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}
