//! Exact combinatorial-auction pricing for shared autonomous-vehicle rides.
//!
//! Operators bid on seat counts for a customer's request. This crate decides
//! the winners for splittable, non-splittable and private service
//! ([`wdp`]), computes strategy-proof pivotal charges ([`vcg`]), and
//! generates seeded random markets for experiments ([`scenario`]).
//!
//! All amounts are exact micro-unit integers ([`Money`]). The crate is
//! `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod instance;
pub mod money;
pub mod oracle;
pub mod scenario;
pub mod vcg;
pub mod wdp;

/// Exact rational used for relative changes and raise fractions.
pub type Ratio = num_rational::Ratio<i128>;

pub use instance::{
    validate_instance, AuctionInstance, BidSchedule, BidderId, RawInstance, RawSchedule,
    ServiceType, ValidationError, ValuationSchedule,
};
pub use money::{
    money_from_decimal, money_to_decimal, ratio_from_decimal, ratio_to_decimal, Money, MoneyError,
    SignedMoney,
};
pub use oracle::{brute_force_wdp, relaxed_brute_force_wdp, OracleError, DEFAULT_ENUMERATION_CAP};
pub use scenario::{
    generate_batch, generated_bidder_id, geometric_prices, rng_stream, AvailabilityLaw, CostLaw,
    GenerationLaw, RngStream, ScenarioBatch, ScenarioError,
};
pub use vcg::{
    assemble_charge_report, bidder_utility, change_of_charge, change_of_payment, perturb_bids,
    utility_from_report, vcg_charges, BidderCharge, ChargeError, ChargeReport, Pivot,
    UtilityLedger,
};
pub use wdp::{
    feasibility, solve_wdp, solve_wdp_excluding, solve_wdp_excluding_index, Allocation, Assignment,
    Feasibility, SolveError, SolveOutcome,
};
