//! Violation detection on integral candidates and the cuts that remove them.

use netpart_milp::{LinearConstraint, Sense};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::formulation::{BinaryVar, VariableMap};
use crate::graph::{connected_components, detect_cycles, SwitchState};
use crate::problem::PartitionProblem;

/// One assignment of every topology decision.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryConfig {
    pub switches: SwitchState,
    pub blocks: Vec<bool>,
    pub leaders: Vec<bool>,
}

impl BinaryConfig {
    pub fn from_masks(problem: &PartitionProblem, switches: u64, blocks: u64, leaders: u64) -> Self {
        Self {
            switches: SwitchState::from_mask(problem.num_switches(), switches),
            blocks: (0..problem.num_blocks()).map(|b| blocks >> b & 1 == 1).collect(),
            leaders: (0..problem.num_leaders()).map(|l| leaders >> l & 1 == 1).collect(),
        }
    }

    pub fn value(&self, var: BinaryVar) -> i64 {
        let on = match var {
            BinaryVar::Switch(s) => self.switches.is_closed(s),
            BinaryVar::Block(b) => self.blocks[b],
            BinaryVar::Leader(l) => self.leaders[l],
        };
        on as i64
    }
}

/// Integral candidate decoded from a solver solution.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSolution {
    pub config: BinaryConfig,
    pub generation: Vec<f64>,
    pub flows: Vec<f64>,
}

impl CandidateSolution {
    pub fn decode(vars: &VariableMap, values: &[f64]) -> Self {
        let bit = |v: &netpart_milp::VarId| values[v.index()] > 0.5;
        Self {
            config: BinaryConfig {
                switches: SwitchState::new(vars.switch.iter().map(bit).collect()),
                blocks: vars.block.iter().map(bit).collect(),
                leaders: vars.leader.iter().map(bit).collect(),
            },
            generation: vars.generation.iter().map(|v| values[v.index()]).collect(),
            flows: vars.flow.iter().map(|v| values[v.index()]).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    Cycle,
    LeaderLower,
    LeaderUpper,
}

impl CutKind {
    pub fn is_leader(self) -> bool {
        !matches!(self, CutKind::Cycle)
    }
}

/// The sets that pin down one component: open switches around it, closed
/// switches inside it, its blocks and its eligible leaders. All sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentSignature {
    pub external: Vec<usize>,
    pub internal: Vec<usize>,
    pub blocks: Vec<usize>,
    pub leaders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Provenance {
    /// Sorted switch ids of the cycle.
    Cycle(Vec<usize>),
    Component(ComponentSignature),
}

/// A linear inequality with integer coefficients over topology decisions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cut {
    pub kind: CutKind,
    pub terms: Vec<(BinaryVar, i64)>,
    #[serde(with = "sense_serde")]
    pub sense: Sense,
    pub rhs: i64,
    pub provenance: Provenance,
}

mod sense_serde {
    use netpart_milp::Sense;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(sense: &Sense, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Sense, D::Error> {
        match String::deserialize(d)?.as_str() {
            "<=" => Ok(Sense::Le),
            "=" => Ok(Sense::Eq),
            ">=" => Ok(Sense::Ge),
            other => Err(serde::de::Error::custom(format!("unknown sense {}", other))),
        }
    }
}

impl Cut {
    pub fn lhs(&self, config: &BinaryConfig) -> i64 {
        self.terms.iter().map(|&(v, c)| c * config.value(v)).sum()
    }

    /// Exact integer check.
    pub fn is_satisfied(&self, config: &BinaryConfig) -> bool {
        let lhs = self.lhs(config);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }

    pub fn to_constraint(&self, vars: &VariableMap) -> LinearConstraint {
        let terms = self.terms.iter().map(|&(v, c)| (vars.binary(v), c as f64)).collect();
        LinearConstraint::new(terms, self.sense, self.rhs as f64)
    }

    /// Identity used for deduplication.
    pub fn key(&self) -> (CutKind, &Provenance) {
        (self.kind, &self.provenance)
    }
}

/// `sum(z_sw over the cycle) <= |cycle| - 1`.
pub fn cycle_cut(cycle: &[usize]) -> Cut {
    let mut ids = cycle.to_vec();
    ids.sort_unstable();
    Cut {
        kind: CutKind::Cycle,
        terms: ids.iter().map(|&s| (BinaryVar::Switch(s), 1)).collect(),
        sense: Sense::Le,
        rhs: ids.len() as i64 - 1,
        provenance: Provenance::Cycle(ids),
    }
}

/// One cut per fundamental cycle of the candidate's closed switches.
pub fn separate_cycles(problem: &PartitionProblem, candidate: &BinaryConfig) -> Result<Vec<Cut>, Error> {
    Ok(detect_cycles(problem, &candidate.switches)?.cycles.iter().map(|c| cycle_cut(c)).collect())
}

/// 1 iff every external switch is open, every internal switch closed and
/// every block active.
pub fn evaluate_phi(config: &BinaryConfig, sig: &ComponentSignature) -> bool {
    sig.external.iter().all(|&s| !config.switches.is_closed(s))
        && sig.internal.iter().all(|&s| config.switches.is_closed(s))
        && sig.blocks.iter().all(|&b| config.blocks[b])
}

/// Linear form of `sum(leaders) >= phi`:
/// `sum(leaders) >= sum(1 - z_ex) + sum(z_in) + sum(z_bl) - n + 1`.
pub fn leader_lower_cut(sig: &ComponentSignature) -> Cut {
    let mut terms: Vec<(BinaryVar, i64)> = sig.leaders.iter().map(|&l| (BinaryVar::Leader(l), 1)).collect();
    terms.extend(sig.external.iter().map(|&s| (BinaryVar::Switch(s), 1)));
    terms.extend(sig.internal.iter().map(|&s| (BinaryVar::Switch(s), -1)));
    terms.extend(sig.blocks.iter().map(|&b| (BinaryVar::Block(b), -1)));
    Cut {
        kind: CutKind::LeaderLower,
        terms,
        sense: Sense::Ge,
        rhs: 1 - sig.internal.len() as i64 - sig.blocks.len() as i64,
        provenance: Provenance::Component(sig.clone()),
    }
}

/// Linear form of `sum(leaders) <= kappa * phi + |L| * (1 - phi)`:
/// `sum(leaders) <= kappa + (|L| - kappa) * (sum(z_ex) + sum(1 - z_in) + sum(1 - z_bl))`.
///
/// `None` when `|L| <= kappa`, where the bound can never bind.
pub fn leader_upper_cut(sig: &ComponentSignature, kappa: usize) -> Option<Cut> {
    let slack = sig.leaders.len() as i64 - kappa as i64;
    if slack <= 0 {
        return None;
    }
    let mut terms: Vec<(BinaryVar, i64)> = sig.leaders.iter().map(|&l| (BinaryVar::Leader(l), 1)).collect();
    terms.extend(sig.external.iter().map(|&s| (BinaryVar::Switch(s), -slack)));
    terms.extend(sig.internal.iter().map(|&s| (BinaryVar::Switch(s), slack)));
    terms.extend(sig.blocks.iter().map(|&b| (BinaryVar::Block(b), slack)));
    Some(Cut {
        kind: CutKind::LeaderUpper,
        terms,
        sense: Sense::Le,
        rhs: kappa as i64 + slack * (sig.internal.len() + sig.blocks.len()) as i64,
        provenance: Provenance::Component(sig.clone()),
    })
}

/// Cuts for every active tree component whose selected leader count is
/// outside `1..=kappa`.
///
/// Components whose closed switches contain a cycle are skipped: the cycle
/// cut for that candidate already removes every point where such a component
/// appears with all its internal switches closed.
pub fn separate_leader_violations(problem: &PartitionProblem, candidate: &BinaryConfig) -> Result<Vec<Cut>, Error> {
    let kappa = problem.kappa();
    let decomposition = connected_components(problem, &candidate.switches)?;
    let mut cuts = Vec::new();
    for comp in &decomposition.components {
        if !comp.blocks.iter().all(|&b| candidate.blocks[b]) || comp.internal.len() >= comp.blocks.len() {
            continue;
        }
        let selected = comp.leaders.iter().filter(|&&l| candidate.leaders[l]).count();
        if selected >= 1 && selected <= kappa {
            continue;
        }
        let sig = ComponentSignature {
            external: comp.external.clone(),
            internal: comp.internal.clone(),
            blocks: comp.blocks.clone(),
            leaders: comp.leaders.clone(),
        };
        if selected == 0 {
            cuts.push(leader_lower_cut(&sig));
        } else if let Some(cut) = leader_upper_cut(&sig, kappa) {
            cuts.push(cut);
        }
    }
    Ok(cuts)
}
