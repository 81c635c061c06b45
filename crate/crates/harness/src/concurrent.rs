//! Charge computation with the main problem and the exclusion problems
//! solved on the rayon pool.

use avauction_core::wdp::solve_wdp_excluding_index;
use avauction_core::{
    assemble_charge_report, solve_wdp, vcg_charges, AuctionInstance, ChargeError, ChargeReport,
};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChargeMode {
    Sequential,
    Concurrent,
}

impl ChargeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ChargeMode::Sequential => "sequential",
            ChargeMode::Concurrent => "concurrent",
        }
    }

    pub fn charges(self, instance: &AuctionInstance) -> Result<ChargeReport, ChargeError> {
        match self {
            ChargeMode::Sequential => vcg_charges(instance),
            ChargeMode::Concurrent => vcg_charges_concurrent(instance),
        }
    }
}

/// Same result as [`vcg_charges`]; the `K + 1` solves are independent and
/// merged back in bidder order.
pub fn vcg_charges_concurrent(instance: &AuctionInstance) -> Result<ChargeReport, ChargeError> {
    let (main, pivots) = rayon::join(
        || solve_wdp(instance),
        || {
            (0..instance.bidder_count())
                .into_par_iter()
                .map(|k| solve_wdp_excluding_index(instance, k))
                .collect::<Vec<_>>()
        },
    );
    assemble_charge_report(instance, main, pivots)
}
