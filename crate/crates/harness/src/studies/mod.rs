//! Monte-Carlo studies over generated markets.
//!
//! Every study checks the exact per-case properties as it goes (service
//! ordering, exact seat counts, the charge identity) and aborts on the first
//! violation with the case and seed that produced it.

use avauction_core::{
    generate_batch, Allocation, ChargeError, ChargeReport, GenerationLaw, ScenarioBatch,
    ScenarioError, ServiceType,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::ExperimentConfig;

pub mod asymptoticity;
pub mod charges;
pub mod servability;
pub mod timing;
pub mod truthfulness;

pub use asymptoticity::{run_asymptoticity_study, AsymptoticityResult};
pub use charges::{run_charge_study, ChargeStudyResult};
pub use servability::{run_servability_study, ServabilityResult};
pub use timing::{run_timing_study, TimingResult};
pub use truthfulness::{run_truthfulness_study, TruthfulnessResult};

/// Where a per-case check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseRef {
    pub k: usize,
    pub case: usize,
    pub seed: u64,
    pub requested_seats: u32,
    pub service: ServiceType,
}

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(
        "{study}: {detail} (K={}, case {}, seed {}, q_r={}, {})",
        at.k, at.case, at.seed, at.requested_seats, at.service
    )]
    Violation {
        study: &'static str,
        at: CaseRef,
        detail: String,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("charge computation failed: {0}")]
    Charge(#[from] ChargeError),
}

pub(crate) fn violation(study: &'static str, at: CaseRef, detail: impl Into<String>) -> StudyError {
    StudyError::Violation {
        study,
        at,
        detail: detail.into(),
    }
}

/// One generated batch per scenario size.
pub(crate) fn scenario_batches(
    config: &ExperimentConfig,
    law: GenerationLaw,
) -> Result<Vec<ScenarioBatch>, StudyError> {
    config.validate().map_err(StudyError::Config)?;
    config
        .scenario_sizes
        .iter()
        .map(|&k| generate_batch(law, k, config.capacity, config.cases).map_err(Into::into))
        .collect()
}

/// Evaluates `f` for every case, on the rayon pool when configured, keeping
/// case order.
pub(crate) fn per_case<T, F>(
    config: &ExperimentConfig,
    cases: usize,
    f: F,
) -> Result<Vec<T>, StudyError>
where
    T: Send,
    F: Fn(usize) -> Result<T, StudyError> + Sync + Send,
{
    if config.parallel {
        (0..cases).into_par_iter().map(f).collect()
    } else {
        (0..cases).map(f).collect()
    }
}

/// Splittable allocations cover the request exactly.
pub(crate) fn check_seat_exactness(
    study: &'static str,
    at: &CaseRef,
    allocation: &Allocation,
) -> Result<(), StudyError> {
    if at.service == ServiceType::Splittable && allocation.seat_count() != at.requested_seats {
        return Err(violation(
            study,
            at.clone(),
            format!(
                "splittable allocation covers {} seats",
                allocation.seat_count()
            ),
        ));
    }
    Ok(())
}

/// `Σ c_k = p* + Σ (p*₋ₖ − p*)` on non-fallback reports, and the fallback
/// total equals `p*`.
pub(crate) fn check_charge_identity(
    study: &'static str,
    at: &CaseRef,
    report: &ChargeReport,
) -> Result<(), StudyError> {
    check_seat_exactness(study, at, report.allocation())?;
    if report.fallback() {
        if report.total_charge() != report.optimum() {
            return Err(violation(
                study,
                at.clone(),
                "fallback total differs from p*",
            ));
        }
    } else if report.pivotal_identity_total() != Some(report.total_charge()) {
        return Err(violation(
            study,
            at.clone(),
            format!(
                "total {} differs from p* + Σ(p*₋ₖ − p*) = {:?}",
                report.total_charge(),
                report.pivotal_identity_total()
            ),
        ));
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
