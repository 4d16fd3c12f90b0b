//! Translation of a [`PartitionProblem`] into a [`MipModel`].
//!
//! Core variables are allocated first and in a fixed order, so their ids are
//! identical across every [`BuildMode`] and rows over them can be moved
//! between models.

use netpart_milp::{MipModel, Sense, VarId};
use serde::{Deserialize, Serialize};

use crate::problem::PartitionProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildMode {
    Full,
    RelaxRadiality,
    RelaxLeader,
    RelaxBoth,
}

impl BuildMode {
    pub fn has_radiality(self) -> bool {
        matches!(self, BuildMode::Full | BuildMode::RelaxLeader)
    }

    pub fn has_leader(self) -> bool {
        matches!(self, BuildMode::Full | BuildMode::RelaxRadiality)
    }
}

/// A topology decision variable, named by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinaryVar {
    Switch(usize),
    Block(usize),
    Leader(usize),
}

/// Flow of one commodity: one unit from the virtual root to its block.
#[derive(Debug, Clone)]
pub struct CommodityVars {
    pub forward: Vec<VarId>,
    pub backward: Vec<VarId>,
    pub root: Vec<VarId>,
}

#[derive(Debug, Clone)]
pub struct RadialityVars {
    /// Orientation of each switch: `from -> to` and `to -> from`.
    pub forward: Vec<VarId>,
    pub backward: Vec<VarId>,
    /// Capacity of the arc from the virtual root into each block.
    pub root: Vec<VarId>,
    /// One commodity per block.
    pub commodities: Vec<CommodityVars>,
}

/// Colouring family, one layer per hub block (a block with at least one
/// leader-eligible provider).
#[derive(Debug, Clone)]
pub struct LeaderVars {
    pub hubs: Vec<usize>,
    /// `color[h][s]`: closed switch `s` lies in the component of hub `h`.
    pub color: Vec<Vec<VarId>>,
    /// `flow[h][s]`: verification flow from hub `h` along switch `s`.
    pub flow: Vec<Vec<VarId>>,
    /// `virtual_edges[h][b]`: virtual supply from hub `h` to block `b`; `None` for `b == h`.
    pub virtual_edges: Vec<Vec<Option<VarId>>>,
    /// `count[h][s]`: leaders of hub `h` counted on switch `s`.
    pub count: Vec<Vec<VarId>>,
}

#[derive(Debug, Clone)]
pub struct VariableMap {
    pub switch: Vec<VarId>,
    pub block: Vec<VarId>,
    pub leader: Vec<VarId>,
    pub generation: Vec<VarId>,
    pub flow: Vec<VarId>,
    pub radiality: Option<RadialityVars>,
    pub leadership: Option<LeaderVars>,
}

impl VariableMap {
    pub fn binary(&self, var: BinaryVar) -> VarId {
        match var {
            BinaryVar::Switch(s) => self.switch[s],
            BinaryVar::Block(b) => self.block[b],
            BinaryVar::Leader(l) => self.leader[l],
        }
    }

    fn leader_sum(&self, problem: &PartitionProblem, b: usize) -> Vec<(VarId, f64)> {
        problem.leaders_in_block(b).map(|l| (self.leader[l], 1.0)).collect()
    }
}

/// Allocates the core variables and sets the objective
/// `nu * sum(priority * (1 - block)) + (1 - nu) * sum(cost * generation)`.
pub fn allocate_core(model: &mut MipModel, problem: &PartitionProblem) -> VariableMap {
    let nu = problem.params().nu;
    let switch = (0..problem.num_switches()).map(|s| model.add_binary(format!("sw{}", s), 0.0)).collect();
    let block: Vec<VarId> =
        (0..problem.num_blocks()).map(|b| model.add_binary(format!("bl{}", b), -nu * problem.priority(b))).collect();
    let leader = (0..problem.num_leaders()).map(|l| model.add_binary(format!("ldr{}", l), 0.0)).collect();
    let generation = (0..problem.num_providers())
        .map(|g| {
            let p = problem.provider(g);
            model.add_continuous(format!("gen{}", g), 0.0, p.c_max, (1.0 - nu) * p.cost)
        })
        .collect();
    let flow = problem.switches().iter().map(|s| model.add_continuous(format!("flow{}", s.id), -s.r_max, s.r_max, 0.0)).collect();
    let shed_all: f64 = (0..problem.num_blocks()).map(|b| nu * problem.priority(b)).sum();
    model.set_objective_offset(shed_all);
    VariableMap { switch, block, leader, generation, flow, radiality: None, leadership: None }
}

/// Balance, generation capacity, flow limits, block status consistency and
/// leaders only in active blocks.
pub fn add_core_constraints(model: &mut MipModel, problem: &PartitionProblem, vars: &VariableMap) {
    for b in 0..problem.num_blocks() {
        let mut terms = Vec::new();
        for sw in problem.switches() {
            if sw.from == b {
                terms.push((vars.flow[sw.id], 1.0));
            } else if sw.to == b {
                terms.push((vars.flow[sw.id], -1.0));
            }
        }
        for g in problem.providers_in_block(b) {
            terms.push((vars.generation[g], -1.0));
        }
        let demand = problem.block_demand(b);
        if demand != 0.0 {
            terms.push((vars.block[b], demand));
        }
        model.add_row(format!("balance{}", b), terms, Sense::Eq, 0.0);
    }
    for g in 0..problem.num_providers() {
        let p = problem.provider(g);
        let (r, z) = (vars.generation[g], vars.block[problem.provider_block(g)]);
        model.add_row(format!("gen_min{}", g), vec![(r, 1.0), (z, -p.c_min)], Sense::Ge, 0.0);
        model.add_row(format!("gen_max{}", g), vec![(r, 1.0), (z, -p.c_max)], Sense::Le, 0.0);
    }
    for sw in problem.switches() {
        let (r, z) = (vars.flow[sw.id], vars.switch[sw.id]);
        model.add_row(format!("flow_hi{}", sw.id), vec![(r, 1.0), (z, -sw.r_max)], Sense::Le, 0.0);
        model.add_row(format!("flow_lo{}", sw.id), vec![(r, 1.0), (z, sw.r_max)], Sense::Ge, 0.0);
        let (a, b) = (vars.block[sw.from], vars.block[sw.to]);
        model.add_row(format!("status_ab{}", sw.id), vec![(a, 1.0), (b, -1.0), (z, 1.0)], Sense::Le, 1.0);
        model.add_row(format!("status_ba{}", sw.id), vec![(b, 1.0), (a, -1.0), (z, 1.0)], Sense::Le, 1.0);
    }
    for l in 0..problem.num_leaders() {
        let z = vars.block[problem.leader_block(l)];
        model.add_row(format!("leader_active{}", l), vec![(vars.leader[l], 1.0), (z, -1.0)], Sense::Le, 0.0);
    }
}

/// Closed switches must form a forest.
///
/// A virtual root feeds every block through an arc of capacity in `[0,1]`.
/// Each block receives one unit of its own commodity from the root over
/// oriented closed switches, and closed switches plus root capacity sum to
/// the block count. Every component then needs a full unit of root capacity,
/// which leaves exactly `blocks - components` closed switches.
pub fn add_radiality_constraints(model: &mut MipModel, problem: &PartitionProblem, vars: &mut VariableMap) {
    let n = problem.num_blocks();
    let m = problem.num_switches();
    let forward: Vec<VarId> = (0..m).map(|s| model.add_continuous(format!("orient_fwd{}", s), 0.0, 1.0, 0.0)).collect();
    let backward: Vec<VarId> = (0..m).map(|s| model.add_continuous(format!("orient_bwd{}", s), 0.0, 1.0, 0.0)).collect();
    let root: Vec<VarId> = (0..n).map(|b| model.add_continuous(format!("root_arc{}", b), 0.0, 1.0, 0.0)).collect();
    for s in 0..m {
        model.add_row(
            format!("orient{}", s),
            vec![(forward[s], 1.0), (backward[s], 1.0), (vars.switch[s], -1.0)],
            Sense::Eq,
            0.0,
        );
    }
    let mut card: Vec<(VarId, f64)> = vars.switch.iter().map(|&z| (z, 1.0)).collect();
    card.extend(root.iter().map(|&r| (r, 1.0)));
    model.add_row("tree_size", card, Sense::Eq, n as f64);

    let mut commodities = Vec::with_capacity(n);
    for k in 0..n {
        let cf: Vec<VarId> = (0..m).map(|s| model.add_continuous(format!("com{}_fwd{}", k, s), 0.0, 1.0, 0.0)).collect();
        let cb: Vec<VarId> = (0..m).map(|s| model.add_continuous(format!("com{}_bwd{}", k, s), 0.0, 1.0, 0.0)).collect();
        let cr: Vec<VarId> = (0..n).map(|b| model.add_continuous(format!("com{}_root{}", k, b), 0.0, 1.0, 0.0)).collect();
        for b in 0..n {
            let mut terms = vec![(cr[b], 1.0)];
            for sw in problem.switches() {
                if sw.to == b {
                    terms.push((cf[sw.id], 1.0));
                    terms.push((cb[sw.id], -1.0));
                } else if sw.from == b {
                    terms.push((cf[sw.id], -1.0));
                    terms.push((cb[sw.id], 1.0));
                }
            }
            let rhs = if b == k { 1.0 } else { 0.0 };
            model.add_row(format!("com{}_cons{}", k, b), terms, Sense::Eq, rhs);
        }
        for s in 0..m {
            model.add_row(format!("com{}_capf{}", k, s), vec![(cf[s], 1.0), (forward[s], -1.0)], Sense::Le, 0.0);
            model.add_row(format!("com{}_capb{}", k, s), vec![(cb[s], 1.0), (backward[s], -1.0)], Sense::Le, 0.0);
        }
        for b in 0..n {
            model.add_row(format!("com{}_capr{}", k, b), vec![(cr[b], 1.0), (root[b], -1.0)], Sense::Le, 0.0);
        }
        commodities.push(CommodityVars { forward: cf, backward: cb, root: cr });
    }
    vars.radiality = Some(RadialityVars { forward, backward, root, commodities });
}

/// Every active component holds between one and `kappa` selected leaders.
///
/// Each hub colours the closed switches of its own component: colours are
/// forced on closed switches at the hub and propagate across closed switches
/// sharing an endpoint, while a verification flow from the hub reaches every
/// other block either over closed switches or over a virtual edge, and a
/// used virtual edge forbids colouring at its target. The leader total of a
/// component is then read off any of its closed switches.
pub fn add_leader_constraints(model: &mut MipModel, problem: &PartitionProblem, vars: &mut VariableMap) {
    let n = problem.num_blocks();
    let m = problem.num_switches();
    let kappa = problem.kappa() as f64;
    let big = (n - 1) as f64;
    let hubs: Vec<usize> = (0..n).filter(|&b| problem.leaders_in_block(b).next().is_some()).collect();
    let switches = problem.switches();

    let mut adjacent_pairs = Vec::new();
    for s in 0..m {
        for t in s + 1..m {
            let (a, b) = (&switches[s], &switches[t]);
            if a.from == b.from || a.from == b.to || a.to == b.from || a.to == b.to {
                adjacent_pairs.push((s, t));
            }
        }
    }

    let mut color = Vec::with_capacity(hubs.len());
    let mut flow = Vec::with_capacity(hubs.len());
    let mut virtual_edges = Vec::with_capacity(hubs.len());
    let mut count = Vec::with_capacity(hubs.len());
    for &h in &hubs {
        let col: Vec<VarId> = (0..m).map(|s| model.add_continuous(format!("color{}_{}", h, s), 0.0, 1.0, 0.0)).collect();
        let eta: Vec<VarId> = (0..m).map(|s| model.add_continuous(format!("vflow{}_{}", h, s), -big, big, 0.0)).collect();
        let xi: Vec<Option<VarId>> = (0..n)
            .map(|b| (b != h).then(|| model.add_continuous(format!("virtual{}_{}", h, b), 0.0, 1.0, 0.0)))
            .collect();
        let hub_leaders = vars.leader_sum(problem, h);
        let size = hub_leaders.len() as f64;
        let cnt: Vec<VarId> = (0..m).map(|s| model.add_continuous(format!("count{}_{}", h, s), 0.0, size, 0.0)).collect();

        for s in 0..m {
            let z = vars.switch[s];
            if switches[s].from == h || switches[s].to == h {
                model.add_row(format!("color_hub{}_{}", h, s), vec![(col[s], 1.0), (z, -1.0)], Sense::Eq, 0.0);
            } else {
                model.add_row(format!("color_closed{}_{}", h, s), vec![(col[s], 1.0), (z, -1.0)], Sense::Le, 0.0);
            }
        }
        for &(s, t) in &adjacent_pairs {
            let (zs, zt) = (vars.switch[s], vars.switch[t]);
            model.add_row(
                format!("color_sync{}_{}_{}", h, s, t),
                vec![(col[s], 1.0), (col[t], -1.0), (zs, 1.0), (zt, 1.0)],
                Sense::Le,
                2.0,
            );
            model.add_row(
                format!("color_sync{}_{}_{}", h, t, s),
                vec![(col[t], 1.0), (col[s], -1.0), (zs, 1.0), (zt, 1.0)],
                Sense::Le,
                2.0,
            );
        }
        for s in 0..m {
            let z = vars.switch[s];
            model.add_row(format!("vflow_hi{}_{}", h, s), vec![(eta[s], 1.0), (z, -big)], Sense::Le, 0.0);
            model.add_row(format!("vflow_lo{}_{}", h, s), vec![(eta[s], 1.0), (z, big)], Sense::Ge, 0.0);
        }
        for b in 0..n {
            let mut terms = Vec::new();
            for sw in switches {
                if sw.from == b {
                    terms.push((eta[sw.id], 1.0));
                } else if sw.to == b {
                    terms.push((eta[sw.id], -1.0));
                }
            }
            if b == h {
                terms.extend(xi.iter().flatten().map(|&x| (x, 1.0)));
                model.add_row(format!("vbal{}_{}", h, b), terms, Sense::Eq, big);
            } else {
                terms.push((xi[b].unwrap(), -1.0));
                model.add_row(format!("vbal{}_{}", h, b), terms, Sense::Eq, -1.0);
                for &s in problem.incident_switches(b) {
                    model.add_row(
                        format!("vblock{}_{}_{}", h, b, s),
                        vec![(col[s], 1.0), (xi[b].unwrap(), 1.0)],
                        Sense::Le,
                        1.0,
                    );
                }
            }
        }
        for s in 0..m {
            let mut le = vec![(cnt[s], 1.0)];
            le.extend(hub_leaders.iter().map(|&(v, c)| (v, -c)));
            model.add_row(format!("count_sum{}_{}", h, s), le, Sense::Le, 0.0);
            model.add_row(format!("count_color{}_{}", h, s), vec![(cnt[s], 1.0), (col[s], -size)], Sense::Le, 0.0);
            let mut ge = vec![(cnt[s], 1.0), (col[s], -size)];
            ge.extend(hub_leaders.iter().map(|&(v, c)| (v, -c)));
            model.add_row(format!("count_both{}_{}", h, s), ge, Sense::Ge, -size);
        }
        color.push(col);
        flow.push(eta);
        virtual_edges.push(xi);
        count.push(cnt);
    }

    for sw in switches {
        let mut total: Vec<(VarId, f64)> = count.iter().map(|c| (c[sw.id], 1.0)).collect();
        let mut lower = total.clone();
        lower.push((vars.switch[sw.id], -1.0));
        lower.push((vars.block[sw.from], -1.0));
        model.add_row(format!("leaders_min_sw{}", sw.id), lower, Sense::Ge, -1.0);
        if !total.is_empty() {
            model.add_row(format!("leaders_max_sw{}", sw.id), std::mem::take(&mut total), Sense::Le, kappa);
        }
    }
    for b in 0..n {
        let own = vars.leader_sum(problem, b);
        let mut lower = own.clone();
        lower.push((vars.block[b], -1.0));
        lower.extend(problem.incident_switches(b).iter().map(|&s| (vars.switch[s], 1.0)));
        model.add_row(format!("leaders_min_bl{}", b), lower, Sense::Ge, 0.0);
        let mut upper = own.clone();
        upper.push((vars.block[b], -kappa));
        model.add_row(format!("leaders_max_bl{}", b), upper, Sense::Le, 0.0);
        let mut reach = own;
        reach.push((vars.block[b], -1.0));
        for &s in problem.incident_switches(b) {
            reach.extend(color.iter().map(|c| (c[s], 1.0)));
        }
        model.add_row(format!("leader_reach{}", b), reach, Sense::Ge, 0.0);
    }
    vars.leadership = Some(LeaderVars { hubs, color, flow, virtual_edges, count });
}

pub fn build_model(problem: &PartitionProblem, mode: BuildMode) -> (MipModel, VariableMap) {
    let mut model = MipModel::new();
    let mut vars = allocate_core(&mut model, problem);
    add_core_constraints(&mut model, problem, &vars);
    if mode.has_radiality() {
        add_radiality_constraints(&mut model, problem, &mut vars);
    }
    if mode.has_leader() {
        add_leader_constraints(&mut model, problem, &mut vars);
    }
    (model, vars)
}
