use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provider {
    pub node: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub leader_eligible: bool,
    #[serde(default = "unit_cost")]
    pub cost: f64,
}

fn unit_cost() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consumer {
    pub node: usize,
    pub demand: f64,
}

/// A base block: the vertex unit of the partitioning graph.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Block {
    pub id: usize,
    #[serde(default)]
    pub providers: Vec<Provider>,
    #[serde(default)]
    pub consumers: Vec<Consumer>,
    #[serde(default)]
    pub intermediaries: Vec<usize>,
}

/// A controllable edge between two blocks. Positive flow runs `from -> to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Switch {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Maximum leaders per active component.
    pub kappa: usize,
    /// Weight of load shedding; generation is weighted by `1 - nu`.
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Scale of block priorities.
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_nu() -> f64 {
    0.9
}

fn default_gamma() -> f64 {
    1.0
}

impl Default for Parameters {
    fn default() -> Self {
        Self { kappa: 1, nu: default_nu(), gamma: default_gamma() }
    }
}

/// Validated, immutable network instance.
///
/// Block ids and switch ids are contiguous from zero and equal to their
/// position. Providers are numbered globally in block order; leaders are the
/// leader-eligible providers, numbered in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionProblem {
    blocks: Vec<Block>,
    switches: Vec<Switch>,
    params: Parameters,
    provider_index: Vec<(usize, usize)>,
    leaders: Vec<usize>,
    incident: Vec<Vec<usize>>,
}

impl PartitionProblem {
    pub fn new(blocks: Vec<Block>, switches: Vec<Switch>, params: Parameters) -> Result<Self, Error> {
        let invalid = |msg: String| Err(Error::InvalidProblem(msg));
        if blocks.is_empty() {
            return invalid("at least one block is required".into());
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.id != i {
                return invalid(format!("block ids must be 0..{} in order, found {} at position {}", blocks.len(), b.id, i));
            }
        }
        let mut nodes = HashSet::new();
        for b in &blocks {
            let ids = b.providers.iter().map(|p| p.node).chain(b.consumers.iter().map(|c| c.node)).chain(b.intermediaries.iter().copied());
            for n in ids {
                if !nodes.insert(n) {
                    return invalid(format!("node {} appears more than once (block {})", n, b.id));
                }
            }
            for p in &b.providers {
                if !(p.c_min.is_finite() && p.c_max.is_finite() && 0.0 <= p.c_min && p.c_min <= p.c_max) {
                    return invalid(format!("provider {} in block {} needs 0 <= c_min <= c_max", p.node, b.id));
                }
                if !(p.cost.is_finite() && p.cost >= 0.0) {
                    return invalid(format!("provider {} in block {} has invalid cost {}", p.node, b.id, p.cost));
                }
            }
            for c in &b.consumers {
                if !(c.demand.is_finite() && c.demand >= 0.0) {
                    return invalid(format!("consumer {} in block {} has invalid demand {}", c.node, b.id, c.demand));
                }
            }
        }
        for (i, s) in switches.iter().enumerate() {
            if s.id != i {
                return invalid(format!("switch ids must be 0..{} in order, found {} at position {}", switches.len(), s.id, i));
            }
            if s.from >= blocks.len() || s.to >= blocks.len() {
                return invalid(format!("switch {} references unknown block", s.id));
            }
            if s.from == s.to {
                return invalid(format!("switch {} is a self-loop on block {}", s.id, s.from));
            }
            if !(s.r_max.is_finite() && s.r_max > 0.0) {
                return invalid(format!("switch {} needs a finite positive r_max", s.id));
            }
        }
        if params.kappa < 1 {
            return invalid("kappa must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&params.nu) {
            return invalid(format!("nu must lie in [0,1], got {}", params.nu));
        }
        if !(params.gamma.is_finite() && params.gamma > 0.0) {
            return invalid(format!("gamma must be positive, got {}", params.gamma));
        }

        let mut provider_index = Vec::new();
        let mut leaders = Vec::new();
        for b in &blocks {
            for (k, p) in b.providers.iter().enumerate() {
                if p.leader_eligible {
                    leaders.push(provider_index.len());
                }
                provider_index.push((b.id, k));
            }
        }
        let mut incident = vec![Vec::new(); blocks.len()];
        for s in &switches {
            incident[s.from].push(s.id);
            incident[s.to].push(s.id);
        }
        Ok(Self { blocks, switches, params, provider_index, leaders, incident })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_switches(&self) -> usize {
        self.switches.len()
    }

    pub fn num_providers(&self) -> usize {
        self.provider_index.len()
    }

    pub fn num_leaders(&self) -> usize {
        self.leaders.len()
    }

    pub fn kappa(&self) -> usize {
        self.params.kappa
    }

    pub fn provider(&self, g: usize) -> &Provider {
        let (b, k) = self.provider_index[g];
        &self.blocks[b].providers[k]
    }

    pub fn provider_block(&self, g: usize) -> usize {
        self.provider_index[g].0
    }

    /// Global provider index of leader `l`.
    pub fn leader_provider(&self, l: usize) -> usize {
        self.leaders[l]
    }

    pub fn leader_block(&self, l: usize) -> usize {
        self.provider_block(self.leaders[l])
    }

    pub fn leaders_in_block(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.leaders.len()).filter(move |&l| self.leader_block(l) == b)
    }

    pub fn providers_in_block(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.provider_index.len()).filter(move |&g| self.provider_index[g].0 == b)
    }

    /// Switch ids with an endpoint at block `b`, ascending.
    pub fn incident_switches(&self, b: usize) -> &[usize] {
        &self.incident[b]
    }

    pub fn block_demand(&self, b: usize) -> f64 {
        self.blocks[b].consumers.iter().map(|c| c.demand).sum()
    }

    pub fn total_demand(&self) -> f64 {
        (0..self.blocks.len()).map(|b| self.block_demand(b)).sum()
    }

    /// Shedding priority: `gamma` times the number of consumers in the block.
    pub fn priority(&self, b: usize) -> f64 {
        self.params.gamma * self.blocks[b].consumers.len() as f64
    }

    pub fn with_params(&self, params: Parameters) -> Result<Self, Error> {
        Self::new(self.blocks.clone(), self.switches.clone(), params)
    }

    /// Copy with consumer demands replaced, in block then consumer order.
    pub fn with_demands(&self, demands: &[f64]) -> Result<Self, Error> {
        let count: usize = self.blocks.iter().map(|b| b.consumers.len()).sum();
        if demands.len() != count {
            return Err(Error::InvalidProblem(format!("expected {} demands, got {}", count, demands.len())));
        }
        let mut blocks = self.blocks.clone();
        let mut it = demands.iter();
        for b in &mut blocks {
            for c in &mut b.consumers {
                c.demand = *it.next().unwrap();
            }
        }
        Self::new(blocks, self.switches.clone(), self.params)
    }

    pub fn consumer_demands(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.consumers.iter().map(|c| c.demand)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(id: usize, gen: Option<(f64, f64, bool)>, demand: Option<f64>) -> Block {
        let mut b = Block { id, ..Default::default() };
        if let Some((lo, hi, eligible)) = gen {
            b.providers.push(Provider { node: 100 + id, c_min: lo, c_max: hi, leader_eligible: eligible, cost: 1.0 });
        }
        if let Some(d) = demand {
            b.consumers.push(Consumer { node: 200 + id, demand: d });
        }
        b
    }

    #[test]
    fn rejects_self_loop_and_dangling_switch() {
        let blocks = vec![block(0, None, None), block(1, None, None)];
        let sw = |from, to| vec![Switch { id: 0, from, to, r_max: 1.0 }];
        assert!(PartitionProblem::new(blocks.clone(), sw(0, 0), Parameters::default()).is_err());
        let err = PartitionProblem::new(blocks.clone(), sw(0, 5), Parameters::default()).unwrap_err();
        assert!(err.to_string().contains("switch 0"));
        assert!(PartitionProblem::new(blocks, sw(0, 1), Parameters::default()).is_ok());
    }

    #[test]
    fn rejects_shared_nodes_and_bad_capacity() {
        let mut b = block(0, Some((0.0, 5.0, true)), Some(1.0));
        b.consumers[0].node = b.providers[0].node;
        assert!(PartitionProblem::new(vec![b], vec![], Parameters::default()).is_err());
        let b = block(0, Some((6.0, 5.0, true)), None);
        assert!(PartitionProblem::new(vec![b], vec![], Parameters::default()).is_err());
    }

    #[test]
    fn leader_numbering_follows_block_order() {
        let blocks = vec![block(0, Some((0.0, 1.0, false)), None), block(1, Some((0.0, 1.0, true)), Some(2.0))];
        let p = PartitionProblem::new(blocks, vec![], Parameters::default()).unwrap();
        assert_eq!(p.num_providers(), 2);
        assert_eq!(p.num_leaders(), 1);
        assert_eq!(p.leader_provider(0), 1);
        assert_eq!(p.leader_block(0), 1);
        assert_eq!(p.priority(1), 1.0);
        assert_eq!(p.block_demand(1), 2.0);
    }

    #[test]
    fn demand_replacement() {
        let blocks = vec![block(0, None, Some(1.0)), block(1, None, Some(2.0))];
        let p = PartitionProblem::new(blocks, vec![], Parameters::default()).unwrap();
        let q = p.with_demands(&[3.0, 4.0]).unwrap();
        assert_eq!(q.consumer_demands(), vec![3.0, 4.0]);
        assert!(p.with_demands(&[1.0]).is_err());
    }
}
