//! Demand realizations drawn from a box around the nominal demands.

use netpart_core::PartitionProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::generator::{generate_instance, GeneratorConfig, GeneratorError};

/// Where the nominal network of each scenario comes from.
#[derive(Debug, Clone)]
pub enum ScenarioSource {
    /// One network; scenarios differ only in demand.
    Fixed(PartitionProblem),
    /// Scenario `m` uses the instance generated from its own seed. The
    /// `seed` field of the configuration is ignored.
    Family(GeneratorConfig),
}

#[derive(Debug, Clone)]
pub struct ScenarioBatch {
    pub source: ScenarioSource,
    pub count: usize,
    /// Each demand is drawn from `[(1 - rho) d, (1 + rho) d]`.
    pub rho: f64,
    /// Scenario `m` is drawn from seed `seed + m`.
    pub seed: u64,
}

impl ScenarioBatch {
    pub fn new(base: PartitionProblem, count: usize, rho: f64, seed: u64) -> Self {
        Self::with_source(ScenarioSource::Fixed(base), count, rho, seed)
    }

    pub fn family(config: GeneratorConfig, count: usize, rho: f64, seed: u64) -> Self {
        Self::with_source(ScenarioSource::Family(config), count, rho, seed)
    }

    fn with_source(source: ScenarioSource, count: usize, rho: f64, seed: u64) -> Self {
        assert!((0.0..=1.0).contains(&rho), "rho must lie in [0, 1]");
        Self { source, count, rho, seed }
    }

    pub fn scenario_seed(&self, m: usize) -> u64 {
        self.seed.wrapping_add(m as u64)
    }

    /// The unperturbed network of scenario `m`.
    pub fn nominal(&self, m: usize) -> Result<PartitionProblem, GeneratorError> {
        match &self.source {
            ScenarioSource::Fixed(p) => Ok(p.clone()),
            ScenarioSource::Family(config) => generate_instance(&GeneratorConfig { seed: self.scenario_seed(m), ..config.clone() }),
        }
    }

    fn perturb(&self, m: usize, nominal: &PartitionProblem) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.scenario_seed(m));
        // a separate stream from the one the generator draws from
        rng.set_stream(1);
        nominal
            .consumer_demands()
            .into_iter()
            .map(|d| if d > 0.0 && self.rho > 0.0 { rng.gen_range((1.0 - self.rho) * d..=(1.0 + self.rho) * d) } else { d })
            .collect()
    }

    pub fn demands(&self, m: usize) -> Result<Vec<f64>, GeneratorError> {
        Ok(self.perturb(m, &self.nominal(m)?))
    }

    pub fn scenario(&self, m: usize) -> Result<PartitionProblem, GeneratorError> {
        let nominal = self.nominal(m)?;
        let demands = self.perturb(m, &nominal);
        Ok(nominal.with_demands(&demands).expect("perturbed demands stay non-negative"))
    }
}
