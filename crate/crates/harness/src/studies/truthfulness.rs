use std::collections::{BTreeMap, BTreeSet};

use avauction_core::{
    change_of_charge, feasibility, perturb_bids, ratio_to_decimal, rng_stream, BidderId, Money,
    Ratio, ServiceType,
};

use super::{check_charge_identity, per_case, scenario_batches, CaseRef, StudyError};
use crate::concurrent::ChargeMode;
use crate::config::ExperimentConfig;
use crate::table::{float_cell, ResultTable};

const STUDY: &str = "truthfulness";

/// One winner of the winner table, before or after the raise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerRow {
    pub requested_seats: u32,
    /// Zero for the truthful base case.
    pub raise: Ratio,
    pub bidder: BidderId,
    pub seats: u32,
    pub bid: Money,
    pub charge: Money,
    pub total_charge: Money,
}

/// Change of charge for one perturbation of one case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationRun {
    pub k: usize,
    pub case: usize,
    pub service: ServiceType,
    pub requested_seats: u32,
    pub fraction: Ratio,
    pub raise: Ratio,
    pub untruthful: usize,
    pub change: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthfulnessResult {
    /// Bidder count of the scenario the winner table was drawn from.
    pub winner_table_k: usize,
    pub winners: Vec<WinnerRow>,
    /// Ordered by (K, case, q_r, service, fraction, raise).
    pub runs: Vec<PerturbationRun>,
}

impl TruthfulnessResult {
    pub fn negative_runs(&self) -> impl Iterator<Item = &PerturbationRun> {
        self.runs
            .iter()
            .filter(|r| r.change < Ratio::from_integer(0))
    }

    pub fn winner_table(&self) -> ResultTable {
        let mut t = ResultTable::new(
            "truthfulness_winners",
            &[
                "k",
                "requested_seats",
                "raise",
                "bidder",
                "seats",
                "bid",
                "charge",
                "total_charge",
            ],
        );
        for w in &self.winners {
            t.push(vec![
                self.winner_table_k.to_string(),
                w.requested_seats.to_string(),
                ratio_to_decimal(w.raise),
                w.bidder.to_string(),
                w.seats.to_string(),
                w.bid.to_string(),
                w.charge.to_string(),
                w.total_charge.to_string(),
            ]);
        }
        t
    }

    /// Runs aggregated per (K, service, q_r, fraction, raise).
    pub fn run_table(&self) -> ResultTable {
        let mut t = ResultTable::new(
            "truthfulness_runs",
            &[
                "k",
                "service",
                "requested_seats",
                "fraction",
                "raise",
                "runs",
                "mean_change_of_charge",
                "min_change_of_charge",
                "negative",
            ],
        );
        let mut groups: BTreeMap<_, Vec<Ratio>> = BTreeMap::new();
        for r in &self.runs {
            groups
                .entry((r.k, r.service, r.requested_seats, r.fraction, r.raise))
                .or_default()
                .push(r.change);
        }
        for ((k, service, q_r, fraction, raise), changes) in groups {
            let n = changes.len();
            let mean = changes.iter().map(ratio_f64).sum::<f64>() / n as f64;
            let min = changes.iter().min().copied().unwrap_or_default();
            t.push(vec![
                k.to_string(),
                service.to_string(),
                q_r.to_string(),
                ratio_to_decimal(fraction),
                ratio_to_decimal(raise),
                n.to_string(),
                float_cell(Some(mean)),
                ratio_to_decimal(min),
                changes
                    .iter()
                    .filter(|c| **c < Ratio::from_integer(0))
                    .count()
                    .to_string(),
            ]);
        }
        t
    }
}

pub(crate) fn ratio_f64(r: &Ratio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `ceil(fraction · K)` bidders, at least one.
pub fn untruthful_count(fraction: Ratio, k: usize) -> usize {
    let n = (fraction * Ratio::from_integer(k as i128))
        .ceil()
        .to_integer();
    (n.max(1) as usize).min(k)
}

/// The untruthful subset of one run. It depends only on the seed, case and
/// fraction, so every service, request and raise perturbs the same bidders.
pub fn untruthful_subset(seed: u64, k: usize, case: usize, fraction: Ratio) -> BTreeSet<BidderId> {
    let label = format!(
        "untruthful/k-{k}/case-{case}/f-{}",
        ratio_to_decimal(fraction)
    );
    rng_stream(seed, &label)
        .sample_indices(k, untruthful_count(fraction, k))
        .into_iter()
        .map(avauction_core::generated_bidder_id)
        .collect()
}

/// Winner table on the largest scenario, then the perturbation runs.
pub fn run_truthfulness_study(config: &ExperimentConfig) -> Result<TruthfulnessResult, StudyError> {
    let batches = scenario_batches(config, config.law())?;
    let q = config.capacity;

    let largest = batches
        .iter()
        .max_by_key(|b| b.bidders())
        .expect("validated config has a scenario");
    let mut winners = Vec::new();
    for q_r in 1..=q {
        let inst = largest.instance(0, q_r, ServiceType::Splittable)?;
        if !feasibility(&inst).splittable {
            continue;
        }
        let base = ChargeMode::Sequential.charges(&inst)?;
        let targets: BTreeSet<BidderId> = base
            .allocation()
            .assignments()
            .iter()
            .map(|a| a.bidder.clone())
            .collect();
        let mut raises = vec![Ratio::from_integer(0)];
        raises.extend(config.winner_raises.iter().copied());
        for raise in raises {
            let report = if raise == Ratio::from_integer(0) {
                base.clone()
            } else {
                ChargeMode::Sequential.charges(&perturb_bids(&inst, &targets, raise)?)?
            };
            for a in report.allocation().assignments() {
                winners.push(WinnerRow {
                    requested_seats: q_r,
                    raise,
                    bidder: a.bidder.clone(),
                    seats: a.seats,
                    bid: a.price,
                    charge: report.charge_of(&a.bidder).unwrap_or(Money::ZERO),
                    total_charge: report.total_charge(),
                });
            }
        }
    }

    let mut runs = Vec::new();
    for batch in &batches {
        let k = batch.bidders();
        let per = per_case(config, batch.case_count(), |case| {
            let subsets: Vec<_> = config
                .untruthful_fractions
                .iter()
                .map(|&f| (f, untruthful_subset(config.seed, k, case, f)))
                .collect();
            let mut out = Vec::new();
            for q_r in 1..=q {
                for service in ServiceType::ALL {
                    let inst = batch.instance(case, q_r, service)?;
                    if !feasibility(&inst).get(service) {
                        continue;
                    }
                    let at = CaseRef {
                        k,
                        case,
                        seed: config.seed,
                        requested_seats: q_r,
                        service,
                    };
                    let truthful = ChargeMode::Sequential.charges(&inst)?;
                    check_charge_identity(STUDY, &at, &truthful)?;
                    for (fraction, subset) in &subsets {
                        for &raise in &config.raises {
                            let raised = perturb_bids(&inst, subset, raise)?;
                            let perturbed = ChargeMode::Sequential.charges(&raised)?;
                            check_charge_identity(STUDY, &at, &perturbed)?;
                            out.push(PerturbationRun {
                                k,
                                case,
                                service,
                                requested_seats: q_r,
                                fraction: *fraction,
                                raise,
                                untruthful: subset.len(),
                                change: change_of_charge(&truthful, &perturbed)?,
                            });
                        }
                    }
                }
            }
            Ok(out)
        })?;
        runs.extend(per.into_iter().flatten());
    }

    Ok(TruthfulnessResult {
        winner_table_k: largest.bidders(),
        winners,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_sizes() {
        assert_eq!(untruthful_count(Ratio::new(1, 10), 5), 1);
        assert_eq!(untruthful_count(Ratio::new(1, 2), 5), 3);
        assert_eq!(untruthful_count(Ratio::new(1, 10), 100), 10);
        assert_eq!(untruthful_count(Ratio::new(1, 10), 1), 1);
        let s = untruthful_subset(7, 30, 4, Ratio::new(1, 5));
        assert_eq!(s.len(), 6);
        assert_eq!(s, untruthful_subset(7, 30, 4, Ratio::new(1, 5)));
    }
}
