use avauction_core::{change_of_payment, feasibility, CostLaw, ServiceType};

use super::truthfulness::ratio_f64;
use super::{check_charge_identity, per_case, scenario_batches, CaseRef, StudyError};
use crate::concurrent::ChargeMode;
use crate::config::ExperimentConfig;
use crate::table::{float_cell, ResultTable};

const STUDY: &str = "asymptoticity";

pub const REGIMES: [CostLaw; 2] = [CostLaw::LargeVariation, CostLaw::SmallVariation];

#[derive(Debug, Clone, PartialEq)]
pub struct PaymentCell {
    pub k: usize,
    pub service: ServiceType,
    pub requested_seats: u32,
    pub regime: CostLaw,
    /// Indexed by case; `None` when unservable or a winner's exclusion is
    /// infeasible.
    pub per_case: Vec<Option<f64>>,
}

impl PaymentCell {
    pub fn cases(&self) -> usize {
        self.per_case.iter().flatten().count()
    }

    pub fn mean(&self) -> Option<f64> {
        let v: Vec<f64> = self.per_case.iter().flatten().copied().collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticityResult {
    /// Ordered by (K, service, q_r, regime).
    pub cells: Vec<PaymentCell>,
}

impl AsymptoticityResult {
    pub fn cell(
        &self,
        k: usize,
        service: ServiceType,
        requested_seats: u32,
        regime: CostLaw,
    ) -> Option<&PaymentCell> {
        self.cells.iter().find(|c| {
            c.k == k
                && c.service == service
                && c.requested_seats == requested_seats
                && c.regime == regime
        })
    }

    pub fn table(&self) -> ResultTable {
        let mut t = ResultTable::new(
            "asymptoticity",
            &[
                "k",
                "service",
                "requested_seats",
                "regime",
                "cases",
                "mean_change_of_payment",
            ],
        );
        for c in &self.cells {
            t.push(vec![
                c.k.to_string(),
                c.service.to_string(),
                c.requested_seats.to_string(),
                c.regime.as_str().to_string(),
                c.cases().to_string(),
                float_cell(c.mean()),
            ]);
        }
        t
    }
}

/// Mean change of payment per (K, service, q_r) under both cost regimes,
/// drawn from the same seed so the regimes are paired. Single-bidder
/// scenarios are skipped.
pub fn run_asymptoticity_study(
    config: &ExperimentConfig,
) -> Result<AsymptoticityResult, StudyError> {
    let q = config.capacity;
    let mut regimes = Vec::new();
    for regime in REGIMES {
        regimes.push(scenario_batches(config, config.law().with_cost(regime))?);
    }
    let mut cells = Vec::new();
    for (i, &k) in config.scenario_sizes.iter().enumerate() {
        if k < 2 {
            continue;
        }
        for (regime, batches) in REGIMES.into_iter().zip(&regimes) {
            let batch = &batches[i];
            let per = per_case(config, batch.case_count(), |case| {
                let mut out = vec![vec![None; q as usize]; 3];
                for (si, service) in ServiceType::ALL.into_iter().enumerate() {
                    for q_r in 1..=q {
                        let inst = batch.instance(case, q_r, service)?;
                        if !feasibility(&inst).get(service) {
                            continue;
                        }
                        let report = ChargeMode::Sequential.charges(&inst)?;
                        let at = CaseRef {
                            k,
                            case,
                            seed: config.seed,
                            requested_seats: q_r,
                            service,
                        };
                        check_charge_identity(STUDY, &at, &report)?;
                        if !report.fallback() {
                            out[si][q_r as usize - 1] =
                                Some(ratio_f64(&change_of_payment(&report)?));
                        }
                    }
                }
                Ok(out)
            })?;
            for (si, service) in ServiceType::ALL.into_iter().enumerate() {
                for q_r in 1..=q {
                    cells.push(PaymentCell {
                        k,
                        service,
                        requested_seats: q_r,
                        regime,
                        per_case: per.iter().map(|c| c[si][q_r as usize - 1]).collect(),
                    });
                }
            }
        }
    }
    cells.sort_by_key(|c| {
        (
            c.k,
            c.service,
            c.requested_seats,
            c.regime == CostLaw::SmallVariation,
        )
    });
    Ok(AsymptoticityResult { cells })
}
