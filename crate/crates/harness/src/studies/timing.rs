use std::time::{Duration, Instant};

use avauction_core::{feasibility, ServiceType};

use super::{log_log_slope, scenario_batches, violation, CaseRef, StudyError};
use crate::concurrent::ChargeMode;
use crate::config::ExperimentConfig;
use crate::table::{float_cell, ResultTable};

const STUDY: &str = "timing";

#[derive(Debug, Clone, PartialEq)]
pub struct TimingCell {
    pub k: usize,
    pub service: ServiceType,
    pub mode: ChargeMode,
    pub runs: usize,
    pub mean_micros: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingResult {
    /// Ordered by (K, service, mode).
    pub cells: Vec<TimingCell>,
}

impl TimingResult {
    pub fn mean_micros(&self, k: usize, service: ServiceType, mode: ChargeMode) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.k == k && c.service == service && c.mode == mode)
            .map(|c| c.mean_micros)
    }

    /// Log-log slope of the mean time against K over scenarios with at least
    /// `min_k` bidders.
    pub fn slope(&self, service: ServiceType, mode: ChargeMode, min_k: usize) -> Option<f64> {
        let points: Vec<(f64, f64)> = self
            .cells
            .iter()
            .filter(|c| c.service == service && c.mode == mode && c.k >= min_k)
            .map(|c| (c.k as f64, c.mean_micros))
            .collect();
        log_log_slope(&points)
    }

    pub fn table(&self) -> ResultTable {
        let mut t = ResultTable::new("timing", &["k", "service", "mode", "runs", "mean_micros"]);
        for c in &self.cells {
            t.push(vec![
                c.k.to_string(),
                c.service.to_string(),
                c.mode.as_str().to_string(),
                c.runs.to_string(),
                float_cell(Some(c.mean_micros)),
            ]);
        }
        t
    }
}

/// Wall-clock time of a full charge computation, sequential and concurrent,
/// per (K, service). Cases run one after another so the measurements do not
/// compete for the pool; the two modes alternate which goes first.
pub fn run_timing_study(config: &ExperimentConfig) -> Result<TimingResult, StudyError> {
    let modes = [ChargeMode::Sequential, ChargeMode::Concurrent];
    let mut cells = Vec::new();
    for batch in scenario_batches(config, config.law())? {
        let k = batch.bidders();
        for service in ServiceType::ALL {
            let mut total = [Duration::ZERO; 2];
            let mut runs = 0usize;
            for case in 0..batch.case_count() {
                for q_r in 1..=config.capacity {
                    let inst = batch.instance(case, q_r, service)?;
                    if !feasibility(&inst).get(service) {
                        continue;
                    }
                    let mut reports = [None, None];
                    for step in 0..2 {
                        let m = (step + case + q_r as usize) % 2;
                        let start = Instant::now();
                        let report = modes[m].charges(&inst)?;
                        total[m] += start.elapsed();
                        reports[m] = Some(report);
                    }
                    if reports[0] != reports[1] {
                        let at = CaseRef {
                            k,
                            case,
                            seed: config.seed,
                            requested_seats: q_r,
                            service,
                        };
                        return Err(violation(STUDY, at, "concurrent charges differ"));
                    }
                    runs += 1;
                }
            }
            for (m, mode) in modes.into_iter().enumerate() {
                let mean = if runs == 0 {
                    0.0
                } else {
                    total[m].as_secs_f64() * 1e6 / runs as f64
                };
                cells.push(TimingCell {
                    k,
                    service,
                    mode,
                    runs,
                    mean_micros: mean,
                });
            }
        }
    }
    Ok(TimingResult { cells })
}
