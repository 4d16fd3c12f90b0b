//! Seeded synthetic instances.

use netpart_core::{Block, Consumer, Parameters, PartitionProblem, Provider, Switch};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub blocks: usize,
    /// Fraction of all block pairs joined by a switch. The switch graph is
    /// always connected, so at least `blocks - 1` switches are placed.
    pub density: f64,
    pub providers: usize,
    /// Upper bound on leader-eligible providers.
    pub max_leaders: usize,
    pub params: Parameters,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { blocks: 8, density: 0.3, providers: 6, max_leaders: 6, params: Parameters::default(), seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeneratorError {
    #[error("at least one block is required")]
    NoBlocks,
    #[error("switch density must lie in [0, 1], got {0}")]
    Density(f64),
    #[error("at least one provider and one leader slot are required")]
    NoLeader,
    #[error("generated instance is invalid: {0}")]
    Invalid(String),
}

pub fn switch_count(blocks: usize, density: f64) -> usize {
    let pairs = blocks * blocks.saturating_sub(1) / 2;
    ((density * pairs as f64).round() as usize).clamp(blocks.saturating_sub(1), pairs)
}

/// A connected switch graph without parallel switches: a random spanning
/// tree plus random extra pairs. Providers are spread unevenly, and the
/// capacity-to-demand ratio varies by seed so that some instances serve every
/// block and others must shed load.
pub fn generate_instance(config: &GeneratorConfig) -> Result<PartitionProblem, GeneratorError> {
    let n = config.blocks;
    if n == 0 {
        return Err(GeneratorError::NoBlocks);
    }
    if !(0.0..=1.0).contains(&config.density) {
        return Err(GeneratorError::Density(config.density));
    }
    if config.providers == 0 || config.max_leaders == 0 {
        return Err(GeneratorError::NoLeader);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !pairs.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)))
        .collect();
    rest.shuffle(&mut rng);
    pairs.extend(rest.into_iter().take(switch_count(n, config.density) - (n - 1)));

    let mut consumers: Vec<Vec<Consumer>> = vec![Vec::new(); n];
    let mut node = 0;
    for list in consumers.iter_mut() {
        for _ in 0..rng.gen_range(0..=2) {
            list.push(Consumer { node, demand: rng.gen_range(1.0..6.0_f64).round() });
            node += 1;
        }
    }
    let total_demand: f64 = consumers.iter().flatten().map(|c| c.demand).sum();

    // a few blocks receive most providers
    let weights: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powi(3)).collect();
    let eligible: Vec<usize> = index::sample(&mut rng, config.providers, config.max_leaders.min(config.providers)).into_vec();
    let ratio = rng.gen_range(0.5..1.5);
    let raw_caps: Vec<f64> = (0..config.providers).map(|_| rng.gen_range(1.0..4.0)).collect();
    let scale = (ratio * total_demand.max(1.0)) / raw_caps.iter().sum::<f64>();
    let mut providers: Vec<Vec<Provider>> = vec![Vec::new(); n];
    for (g, cap) in raw_caps.iter().enumerate() {
        let pick = rng.gen::<f64>() * weights.iter().sum::<f64>();
        let mut acc = 0.0;
        let block = weights.iter().position(|w| {
            acc += w;
            acc >= pick
        });
        let c_max = (cap * scale * 10.0).round().max(1.0) / 10.0;
        providers[block.unwrap_or(n - 1)].push(Provider {
            node,
            c_min: if rng.gen_bool(0.2) { (0.2 * c_max * 10.0).round() / 10.0 } else { 0.0 },
            c_max,
            leader_eligible: eligible.contains(&g),
            cost: (rng.gen_range(0.5..2.0_f64) * 10.0).round() / 10.0,
        });
        node += 1;
    }

    let r_base = (total_demand / 2.0).max(1.0);
    let switches = pairs
        .iter()
        .enumerate()
        .map(|(id, &(from, to))| Switch { id, from, to, r_max: (r_base * rng.gen_range(0.4..1.2) * 10.0).round().max(1.0) / 10.0 })
        .collect();
    let blocks = consumers
        .into_iter()
        .zip(providers)
        .enumerate()
        .map(|(id, (consumers, providers))| Block { id, providers, consumers, intermediaries: Vec::new() })
        .collect();
    PartitionProblem::new(blocks, switches, config.params).map_err(|e| GeneratorError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_density_on_three_blocks_is_a_triangle() {
        let p = generate_instance(&GeneratorConfig { blocks: 3, density: 1.0, providers: 2, ..Default::default() }).unwrap();
        assert_eq!(p.num_switches(), 3);
        let mut ends: Vec<(usize, usize)> = p.switches().iter().map(|s| (s.from.min(s.to), s.from.max(s.to))).collect();
        ends.sort();
        assert_eq!(ends, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn zero_density_still_connects() {
        assert_eq!(switch_count(6, 0.0), 5);
        assert_eq!(switch_count(1, 1.0), 0);
        assert_eq!(switch_count(5, 0.5), 5);
    }

    #[test]
    fn same_seed_same_instance() {
        let config = GeneratorConfig { seed: 17, ..Default::default() };
        assert_eq!(generate_instance(&config).unwrap(), generate_instance(&config).unwrap());
    }

    #[test]
    fn bad_parameters() {
        assert_eq!(generate_instance(&GeneratorConfig { blocks: 0, ..Default::default() }), Err(GeneratorError::NoBlocks));
        assert!(matches!(generate_instance(&GeneratorConfig { density: 1.5, ..Default::default() }), Err(GeneratorError::Density(_))));
        assert_eq!(generate_instance(&GeneratorConfig { providers: 0, ..Default::default() }), Err(GeneratorError::NoLeader));
    }
}
