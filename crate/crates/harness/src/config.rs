use std::path::PathBuf;

use avauction_core::{AvailabilityLaw, CostLaw, GenerationLaw, Ratio};

/// Parameters of a Monte-Carlo study.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Bidder counts `K`, one scenario each.
    pub scenario_sizes: Vec<usize>,
    /// Vehicle capacity `Q`; requests sweep `1..=Q`.
    pub capacity: u32,
    pub cases: usize,
    pub cost_law: CostLaw,
    pub availability: AvailabilityLaw,
    pub concavity: f64,
    /// Share of bidders turned untruthful in each perturbation run.
    pub untruthful_fractions: Vec<Ratio>,
    /// Bid raises applied by untruthful bidders.
    pub raises: Vec<Ratio>,
    /// Raises applied to the base-case winners in the winner table.
    pub winner_raises: Vec<Ratio>,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Evaluate cases on the rayon pool.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario_sizes: vec![1, 5, 10, 30, 50, 100],
            capacity: 5,
            cases: 100,
            cost_law: CostLaw::LargeVariation,
            availability: AvailabilityLaw::Uniform,
            concavity: GenerationLaw::DEFAULT_CONCAVITY,
            untruthful_fractions: vec![Ratio::new(1, 10), Ratio::new(1, 5), Ratio::new(1, 2)],
            raises: vec![Ratio::new(1, 10), Ratio::new(1, 5), Ratio::new(3, 10)],
            winner_raises: vec![Ratio::new(1, 5), Ratio::new(1, 2)],
            out_dir: PathBuf::from("results"),
            seed: 20_240_501,
            parallel: true,
        }
    }
}

impl ExperimentConfig {
    pub fn law(&self) -> GenerationLaw {
        GenerationLaw {
            cost: self.cost_law,
            availability: self.availability,
            concavity: self.concavity,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.scenario_sizes.is_empty() || self.scenario_sizes.contains(&0) {
            return Err("scenario sizes must be non-empty and at least 1".into());
        }
        if self.capacity == 0 || self.cases == 0 {
            return Err("capacity and case count must be at least 1".into());
        }
        let unit = |r: &Ratio| *r > Ratio::from_integer(0) && *r <= Ratio::from_integer(1);
        if !self.untruthful_fractions.iter().all(unit) {
            return Err("untruthful fractions must lie in (0, 1]".into());
        }
        if !self.raises.iter().chain(&self.winner_raises).all(unit) {
            return Err("raise fractions must lie in (0, 1]".into());
        }
        if !(self.concavity > 0.0 && self.concavity <= 1.0) {
            return Err("concavity must lie in (0, 1]".into());
        }
        if let AvailabilityLaw::EmptyVehicle { probability } = self.availability {
            if !(0.0..=1.0).contains(&probability) {
                return Err("empty-vehicle probability must lie in [0, 1]".into());
            }
        }
        Ok(())
    }
}
