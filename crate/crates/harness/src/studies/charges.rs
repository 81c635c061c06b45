use avauction_core::{feasibility, Money, ServiceType};

use super::{check_charge_identity, per_case, scenario_batches, violation, CaseRef, StudyError};
use crate::concurrent::ChargeMode;
use crate::config::ExperimentConfig;
use crate::table::{money_mean, ResultTable};

const STUDY: &str = "charges";

/// VCG total and optimal total of one servable case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseCharge {
    pub vcg_total: Money,
    pub optimum: Money,
    /// Some winner was indispensable; the total is `p*`.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeCell {
    pub k: usize,
    pub service: ServiceType,
    pub requested_seats: u32,
    /// Indexed by case; `None` when the case is unservable.
    pub per_case: Vec<Option<CaseCharge>>,
}

impl ChargeCell {
    pub fn servable(&self) -> usize {
        self.per_case.iter().flatten().count()
    }

    fn column(&self, f: impl Fn(&CaseCharge) -> Money) -> Vec<Money> {
        self.per_case.iter().flatten().map(f).collect()
    }

    /// Mean VCG total over servable cases.
    pub fn mean_vcg(&self) -> Option<f64> {
        mean(&self.column(|c| c.vcg_total))
    }

    pub fn mean_optimal(&self) -> Option<f64> {
        mean(&self.column(|c| c.optimum))
    }
}

fn mean(values: &[Money]) -> Option<f64> {
    (!values.is_empty())
        .then(|| values.iter().map(|m| m.micros() as f64).sum::<f64>() / values.len() as f64 / 1e6)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeStudyResult {
    /// Ordered by (K, service, q_r).
    pub cells: Vec<ChargeCell>,
}

impl ChargeStudyResult {
    pub fn cell(
        &self,
        k: usize,
        service: ServiceType,
        requested_seats: u32,
    ) -> Option<&ChargeCell> {
        self.cells
            .iter()
            .find(|c| c.k == k && c.service == service && c.requested_seats == requested_seats)
    }

    pub fn table(&self) -> ResultTable {
        let mut t = ResultTable::new(
            "charges",
            &[
                "k",
                "service",
                "requested_seats",
                "servable",
                "mean_vcg_total",
                "mean_optimal",
            ],
        );
        for c in &self.cells {
            t.push(vec![
                c.k.to_string(),
                c.service.to_string(),
                c.requested_seats.to_string(),
                c.servable().to_string(),
                money_mean(&c.column(|x| x.vcg_total)),
                money_mean(&c.column(|x| x.optimum)),
            ]);
        }
        t
    }
}

/// Mean VCG and optimal totals per (K, service, q_r) over servable cases.
pub fn run_charge_study(config: &ExperimentConfig) -> Result<ChargeStudyResult, StudyError> {
    let q = config.capacity;
    let mut cells = Vec::new();
    for batch in scenario_batches(config, config.law())? {
        let k = batch.bidders();
        // [service][q_r - 1]
        let per = per_case(config, batch.case_count(), |case| {
            let mut out = vec![vec![None; q as usize]; 3];
            for q_r in 1..=q {
                for (si, service) in ServiceType::ALL.into_iter().enumerate() {
                    let at = CaseRef {
                        k,
                        case,
                        seed: config.seed,
                        requested_seats: q_r,
                        service,
                    };
                    let inst = batch.instance(case, q_r, service)?;
                    if !feasibility(&inst).get(service) {
                        continue;
                    }
                    let report = ChargeMode::Sequential.charges(&inst)?;
                    check_charge_identity(STUDY, &at, &report)?;
                    if k == 1 && report.total_charge() != report.optimum() {
                        return Err(violation(STUDY, at, "single bidder total differs from p*"));
                    }
                    out[si][q_r as usize - 1] = Some(CaseCharge {
                        vcg_total: report.total_charge(),
                        optimum: report.optimum(),
                        fallback: report.fallback(),
                    });
                }
                let at = |service| CaseRef {
                    k,
                    case,
                    seed: config.seed,
                    requested_seats: q_r,
                    service,
                };
                let p = |si: usize| out[si][q_r as usize - 1].map(|c: CaseCharge| c.optimum);
                if let (Some(s), Some(n)) = (p(0), p(1)) {
                    if s > n {
                        return Err(violation(
                            STUDY,
                            at(ServiceType::NonSplittable),
                            "p^s > p^n",
                        ));
                    }
                }
                if let (Some(n), Some(w)) = (p(1), p(2)) {
                    if n > w {
                        return Err(violation(STUDY, at(ServiceType::Private), "p^n > p^p"));
                    }
                }
                if q_r > 1 && out[2][q_r as usize - 1] != out[2][0] {
                    return Err(violation(
                        STUDY,
                        at(ServiceType::Private),
                        "private totals depend on the seat request",
                    ));
                }
            }
            Ok(out)
        })?;
        for (si, service) in ServiceType::ALL.into_iter().enumerate() {
            for q_r in 1..=q {
                cells.push(ChargeCell {
                    k,
                    service,
                    requested_seats: q_r,
                    per_case: per.iter().map(|c| c[si][q_r as usize - 1]).collect(),
                });
            }
        }
    }
    Ok(ChargeStudyResult { cells })
}
