//! Exhaustive ground truth for small instances.

use netpart_milp::{solve_lp, LpStatus, MipModel, Sense};
use rayon::prelude::*;
use serde::Serialize;

use crate::cuts::BinaryConfig;
use crate::error::Error;
use crate::graph::{connected_components, is_radial, SwitchState};
use crate::problem::PartitionProblem;

pub const MAX_SWITCHES: usize = 12;
pub const MAX_BLOCKS: usize = 12;
pub const MAX_LEADERS: usize = 12;

const TIE_TOL: f64 = 1e-9;

/// A feasible switch and block assignment with every admissible leader choice.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleTopology {
    pub switches: u64,
    pub blocks: u64,
    pub leader_choices: Vec<u64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    pub topologies: Vec<FeasibleTopology>,
}

impl FeasibleSet {
    pub fn count(&self) -> u64 {
        self.topologies.iter().map(|t| t.leader_choices.len() as u64).sum()
    }

    /// Visits every feasible assignment as `(switches, blocks, leaders)` bit masks.
    pub fn for_each(&self, mut f: impl FnMut(u64, u64, u64)) {
        for t in &self.topologies {
            for &l in &t.leader_choices {
                f(t.switches, t.blocks, l);
            }
        }
    }

    pub fn contains(&self, switches: u64, blocks: u64, leaders: u64) -> bool {
        self.topologies.iter().any(|t| t.switches == switches && t.blocks == blocks && t.leader_choices.contains(&leaders))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// `None` when no assignment is feasible.
    pub objective: Option<f64>,
    /// Every assignment attaining the optimum.
    pub optimal: Vec<BinaryConfig>,
    pub feasible_count: u64,
    /// Size of the full assignment space, `2^(switches + blocks + leaders)`.
    pub enumeration_size: u128,
}

fn check_limits(problem: &PartitionProblem) -> Result<(), Error> {
    let (e, b, l) = (problem.num_switches(), problem.num_blocks(), problem.num_leaders());
    if e > MAX_SWITCHES || b > MAX_BLOCKS || l > MAX_LEADERS {
        return Err(Error::OracleLimit(format!(
            "{} switches, {} blocks, {} eligible leaders (limits {}, {}, {})",
            e, b, l, MAX_SWITCHES, MAX_BLOCKS, MAX_LEADERS
        )));
    }
    Ok(())
}

fn subsets_with_size(items: &[usize], lo: usize, hi: usize) -> Vec<u64> {
    (0..1u64 << items.len())
        .filter(|m| (lo..=hi).contains(&(m.count_ones() as usize)))
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).fold(0, |acc, (_, &l)| acc | 1 << l))
        .collect()
}

/// Least generation cost serving every active block, or `None` when no
/// dispatch exists.
pub fn dispatch_cost(problem: &PartitionProblem, switches: &SwitchState, blocks: &[bool]) -> Result<Option<f64>, Error> {
    let mut lp = MipModel::new();
    let nu = problem.params().nu;
    let gen: Vec<_> = (0..problem.num_providers())
        .map(|g| {
            let p = problem.provider(g);
            let on = blocks[problem.provider_block(g)];
            let (lo, hi) = if on { (p.c_min, p.c_max) } else { (0.0, 0.0) };
            lp.add_continuous(format!("g{}", g), lo, hi, (1.0 - nu) * p.cost)
        })
        .collect();
    let flow: Vec<_> = problem
        .switches()
        .iter()
        .map(|s| {
            let r = if switches.is_closed(s.id) { s.r_max } else { 0.0 };
            lp.add_continuous(format!("f{}", s.id), -r, r, 0.0)
        })
        .collect();
    for b in 0..problem.num_blocks() {
        let mut terms = Vec::new();
        for s in problem.switches() {
            if s.from == b {
                terms.push((flow[s.id], 1.0));
            }
            if s.to == b {
                terms.push((flow[s.id], -1.0));
            }
        }
        terms.extend(problem.providers_in_block(b).map(|g| (gen[g], -1.0)));
        let demand = if blocks[b] { problem.block_demand(b) } else { 0.0 };
        lp.add_row(format!("b{}", b), terms, Sense::Eq, -demand);
    }
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => Some(sol.objective),
        LpStatus::Infeasible => None,
    })
}

/// Topology rules alone: consistent block status across closed switches,
/// closed switches forming a forest, leaders only in active blocks and
/// `1..=kappa` of them in every active component.
pub fn structurally_feasible(problem: &PartitionProblem, config: &BinaryConfig) -> Result<bool, Error> {
    for s in config.switches.closed() {
        let sw = &problem.switches()[s];
        if config.blocks[sw.from] != config.blocks[sw.to] {
            return Ok(false);
        }
    }
    if !is_radial(problem, &config.switches)? {
        return Ok(false);
    }
    for l in 0..problem.num_leaders() {
        if config.leaders[l] && !config.blocks[problem.leader_block(l)] {
            return Ok(false);
        }
    }
    for comp in connected_components(problem, &config.switches)?.components {
        if config.blocks[comp.blocks[0]] {
            let n = comp.leaders.iter().filter(|&&l| config.leaders[l]).count();
            if n < 1 || n > problem.kappa() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Objective of `config` if it is feasible, `None` otherwise.
pub fn evaluate(problem: &PartitionProblem, config: &BinaryConfig) -> Result<Option<f64>, Error> {
    if !structurally_feasible(problem, config)? {
        return Ok(None);
    }
    Ok(dispatch_cost(problem, &config.switches, &config.blocks)?.map(|cost| shed_penalty(problem, &config.blocks) + cost))
}

fn shed_penalty(problem: &PartitionProblem, blocks: &[bool]) -> f64 {
    let nu = problem.params().nu;
    (0..problem.num_blocks()).filter(|&b| !blocks[b]).map(|b| nu * problem.priority(b)).sum()
}

fn topologies_for_switches(problem: &PartitionProblem, mask: u64) -> Result<Vec<FeasibleTopology>, Error> {
    let state = SwitchState::from_mask(problem.num_switches(), mask);
    if !is_radial(problem, &state)? {
        return Ok(Vec::new());
    }
    let comps = connected_components(problem, &state)?.components;
    let choices: Vec<Vec<u64>> = comps.iter().map(|c| subsets_with_size(&c.leaders, 1, problem.kappa())).collect();
    let mut out = Vec::new();
    // consistent block states are unions of whole components
    for active in 0..1u64 << comps.len() {
        let mut blocks = vec![false; problem.num_blocks()];
        let mut leader_choices = vec![0u64];
        for (k, comp) in comps.iter().enumerate() {
            if active >> k & 1 == 1 {
                for &b in &comp.blocks {
                    blocks[b] = true;
                }
                leader_choices = leader_choices.iter().flat_map(|&a| choices[k].iter().map(move |&c| a | c)).collect();
            }
        }
        if leader_choices.is_empty() {
            continue;
        }
        if let Some(cost) = dispatch_cost(problem, &state, &blocks)? {
            let block_mask = blocks.iter().enumerate().filter(|(_, &on)| on).fold(0, |m, (b, _)| m | 1 << b);
            out.push(FeasibleTopology {
                switches: mask,
                blocks: block_mask,
                leader_choices,
                objective: shed_penalty(problem, &blocks) + cost,
            });
        }
    }
    Ok(out)
}

/// Every feasible assignment, grouped by topology.
pub fn feasible_set(problem: &PartitionProblem) -> Result<FeasibleSet, Error> {
    check_limits(problem)?;
    let per_mask: Result<Vec<Vec<FeasibleTopology>>, Error> =
        (0..1u64 << problem.num_switches()).into_par_iter().map(|m| topologies_for_switches(problem, m)).collect();
    Ok(FeasibleSet { topologies: per_mask?.into_iter().flatten().collect() })
}

pub fn enumerate_optimal(problem: &PartitionProblem) -> Result<OracleResult, Error> {
    let set = feasible_set(problem)?;
    let size = 1u128 << (problem.num_switches() + problem.num_blocks() + problem.num_leaders());
    let best = set.topologies.iter().map(|t| t.objective).reduce(f64::min);
    let mut optimal = Vec::new();
    if let Some(best) = best {
        for t in &set.topologies {
            if t.objective <= best + TIE_TOL * (1.0 + best.abs()) {
                for &l in &t.leader_choices {
                    optimal.push(BinaryConfig::from_masks(problem, t.switches, t.blocks, l));
                }
            }
        }
    }
    optimal.sort();
    Ok(OracleResult { objective: best, optimal, feasible_count: set.count(), enumeration_size: size })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Block, Consumer, Parameters, Provider, Switch};

    fn single_block(nu: f64) -> PartitionProblem {
        let block = Block {
            id: 0,
            providers: vec![Provider { node: 0, c_min: 0.0, c_max: 5.0, leader_eligible: true, cost: 1.0 }],
            consumers: vec![Consumer { node: 1, demand: 3.0 }],
            intermediaries: vec![],
        };
        PartitionProblem::new(vec![block], vec![], Parameters { kappa: 1, nu, gamma: 1.0 }).unwrap()
    }

    #[test]
    fn serving_beats_shedding() {
        let r = enumerate_optimal(&single_block(0.9)).unwrap();
        assert!((r.objective.unwrap() - 0.3).abs() < 1e-9);
        assert_eq!(r.feasible_count, 2);
        assert_eq!(r.optimal.len(), 1);
        assert_eq!(r.optimal[0].blocks, vec![true]);
        assert_eq!(r.enumeration_size, 4);
    }

    #[test]
    fn shedding_wins_when_generation_dominates() {
        // nu = 0.05: serving costs 0.95 * 3, shedding costs 0.05
        let r = enumerate_optimal(&single_block(0.05)).unwrap();
        assert!((r.objective.unwrap() - 0.05).abs() < 1e-9);
        assert_eq!(r.optimal[0].blocks, vec![false]);
    }

    #[test]
    fn triangle_never_fully_closed() {
        let blocks = (0..3)
            .map(|id| Block {
                id,
                providers: vec![Provider { node: 10 + id, c_min: 0.0, c_max: 4.0, leader_eligible: id == 0, cost: 1.0 }],
                consumers: vec![Consumer { node: 20 + id, demand: 1.0 }],
                intermediaries: vec![],
            })
            .collect();
        let switches = (0..3).map(|id| Switch { id, from: id, to: (id + 1) % 3, r_max: 5.0 }).collect();
        let p = PartitionProblem::new(blocks, switches, Parameters::default()).unwrap();
        let r = enumerate_optimal(&p).unwrap();
        assert!(r.optimal.iter().all(|c| c.switches.closed().count() < 3));
        assert!(r.optimal.iter().all(|c| c.blocks.iter().all(|&b| b)));
    }

    #[test]
    fn refuses_large_instances() {
        let blocks = (0..13).map(|id| Block { id, ..Default::default() }).collect();
        let p = PartitionProblem::new(blocks, vec![], Parameters::default()).unwrap();
        assert!(matches!(enumerate_optimal(&p), Err(Error::OracleLimit(_))));
    }
}
