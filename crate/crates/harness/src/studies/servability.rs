use avauction_core::{feasibility, solve_wdp, ServiceType, SolveOutcome};

use super::{check_seat_exactness, per_case, scenario_batches, violation, CaseRef, StudyError};
use crate::config::ExperimentConfig;
use crate::table::ResultTable;

const STUDY: &str = "servability";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServabilityCell {
    pub k: usize,
    pub service: ServiceType,
    pub requested_seats: u32,
    pub cases: usize,
    pub unservable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServabilityResult {
    /// Ordered by (K, service, q_r).
    pub cells: Vec<ServabilityCell>,
}

impl ServabilityResult {
    pub fn unservable(
        &self,
        k: usize,
        service: ServiceType,
        requested_seats: u32,
    ) -> Option<usize> {
        self.cells
            .iter()
            .find(|c| c.k == k && c.service == service && c.requested_seats == requested_seats)
            .map(|c| c.unservable)
    }

    pub fn table(&self) -> ResultTable {
        let mut t = ResultTable::new(
            "servability",
            &["k", "service", "requested_seats", "cases", "unservable"],
        );
        for c in &self.cells {
            t.push(vec![
                c.k.to_string(),
                c.service.to_string(),
                c.requested_seats.to_string(),
                c.cases.to_string(),
                c.unservable.to_string(),
            ]);
        }
        t
    }
}

/// Counts unservable cases per (K, service, q_r).
pub fn run_servability_study(config: &ExperimentConfig) -> Result<ServabilityResult, StudyError> {
    let q = config.capacity;
    let mut cells = Vec::new();
    for batch in scenario_batches(config, config.law())? {
        let k = batch.bidders();
        // per case: unservable flags indexed [service][q_r - 1]
        let flags = per_case(config, batch.case_count(), |case| {
            let mut out = vec![vec![false; q as usize]; 3];
            for (si, service) in ServiceType::ALL.into_iter().enumerate() {
                for q_r in 1..=q {
                    let at = CaseRef {
                        k,
                        case,
                        seed: config.seed,
                        requested_seats: q_r,
                        service,
                    };
                    let inst = batch.instance(case, q_r, service)?;
                    let outcome = solve_wdp(&inst);
                    if outcome.is_served() != feasibility(&inst).get(service) {
                        return Err(violation(STUDY, at, "solver and feasibility test disagree"));
                    }
                    if let SolveOutcome::Served(a) = &outcome {
                        check_seat_exactness(STUDY, &at, a)?;
                    }
                    out[si][q_r as usize - 1] = !outcome.is_served();
                }
            }
            Ok(out)
        })?;
        for (si, service) in ServiceType::ALL.into_iter().enumerate() {
            for q_r in 1..=q {
                let unservable = flags.iter().filter(|f| f[si][q_r as usize - 1]).count();
                cells.push(ServabilityCell {
                    k,
                    service,
                    requested_seats: q_r,
                    cases: batch.case_count(),
                    unservable,
                });
            }
        }
    }
    Ok(ServabilityResult { cells })
}
