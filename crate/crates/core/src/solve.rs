//! The iterative cutting-plane method and its reporting.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use netpart_milp::{solve_mip_with, AcceptAll, MipOptions, MipSolution, MipStatus, Verdict};
use serde::{Deserialize, Serialize};

use crate::cuts::{separate_cycles, separate_leader_violations, BinaryConfig, CandidateSolution, Cut, CutKind};
use crate::error::Error;
use crate::formulation::{build_model, BuildMode, VariableMap};
use crate::graph::connected_components;
use crate::problem::PartitionProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    /// Monolithic model, no separation.
    Full,
    /// Radiality by cycle cuts, leader rows in the model.
    CpRadial,
    /// Leader bounds by cuts, radiality rows in the model.
    CpGf,
    /// Both families by cuts.
    CpBoth,
}

impl SolveMode {
    pub const ALL: [SolveMode; 4] = [SolveMode::Full, SolveMode::CpRadial, SolveMode::CpGf, SolveMode::CpBoth];

    pub fn build_mode(self) -> BuildMode {
        match self {
            SolveMode::Full => BuildMode::Full,
            SolveMode::CpRadial => BuildMode::RelaxRadiality,
            SolveMode::CpGf => BuildMode::RelaxLeader,
            SolveMode::CpBoth => BuildMode::RelaxBoth,
        }
    }

    pub fn separates_cycles(self) -> bool {
        !self.build_mode().has_radiality()
    }

    pub fn separates_leaders(self) -> bool {
        !self.build_mode().has_leader()
    }

    pub fn name(self) -> &'static str {
        match self {
            SolveMode::Full => "full",
            SolveMode::CpRadial => "cp-radial",
            SolveMode::CpGf => "cp-gf",
            SolveMode::CpBoth => "cp-both",
        }
    }
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolveMode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| format!("unknown mode '{}'", s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Driver {
    /// Solve to optimality, append cuts, solve again from scratch.
    Restart,
    /// Inject cuts at integral nodes of a single search tree.
    Callback,
}

impl fmt::Display for Driver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Driver::Restart => "restart",
            Driver::Callback => "callback",
        })
    }
}

impl FromStr for Driver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "restart" => Ok(Driver::Restart),
            "callback" => Ok(Driver::Callback),
            _ => Err(format!("unknown driver '{}'", s)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOutcome {
    pub block: usize,
    pub active: bool,
    pub demand: f64,
    pub served: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub blocks: Vec<usize>,
    pub closed_switches: Vec<usize>,
    pub active: bool,
    /// Selected leaders, by leader index.
    pub leaders: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub closed_switches: Vec<usize>,
    pub components: Vec<ComponentReport>,
    /// Selected leaders as global provider indices.
    pub leader_providers: Vec<usize>,
    pub blocks: Vec<BlockOutcome>,
    pub generation: Vec<f64>,
    pub served_demand: f64,
    pub total_demand: f64,
    pub percent_served: f64,
}

impl Topology {
    pub fn from_candidate(problem: &PartitionProblem, candidate: &CandidateSolution) -> Result<Self, Error> {
        let config = &candidate.config;
        let decomposition = connected_components(problem, &config.switches)?;
        let components = decomposition
            .components
            .iter()
            .map(|c| ComponentReport {
                blocks: c.blocks.clone(),
                closed_switches: c.internal.clone(),
                active: c.blocks.iter().all(|&b| config.blocks[b]),
                leaders: c.leaders.iter().copied().filter(|&l| config.leaders[l]).collect(),
            })
            .collect();
        let blocks: Vec<BlockOutcome> = (0..problem.num_blocks())
            .map(|b| {
                let demand = problem.block_demand(b);
                BlockOutcome { block: b, active: config.blocks[b], demand, served: if config.blocks[b] { demand } else { 0.0 } }
            })
            .collect();
        let served_demand: f64 = blocks.iter().map(|b| b.served).sum();
        let total_demand = problem.total_demand();
        Ok(Self {
            closed_switches: config.switches.closed().collect(),
            components,
            leader_providers: (0..problem.num_leaders()).filter(|&l| config.leaders[l]).map(|l| problem.leader_provider(l)).collect(),
            blocks,
            generation: candidate.generation.clone(),
            served_demand,
            total_demand,
            percent_served: if total_demand > 0.0 { 100.0 * served_demand / total_demand } else { 100.0 },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mode: SolveMode,
    pub driver: Driver,
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub topology: Option<Topology>,
    /// Rounds that produced cuts.
    pub iterations: usize,
    pub cycle_cuts: usize,
    pub leader_lower_cuts: usize,
    pub leader_upper_cuts: usize,
    pub nodes: usize,
    pub wall_time_s: f64,
}

impl SolveReport {
    pub fn radial_cuts(&self) -> usize {
        self.cycle_cuts
    }

    pub fn leader_cuts(&self) -> usize {
        self.leader_lower_cuts + self.leader_upper_cuts
    }

    pub fn total_cuts(&self) -> usize {
        self.radial_cuts() + self.leader_cuts()
    }
}

/// A cut and the candidate it was generated for.
#[derive(Debug, Clone, PartialEq)]
pub struct CutRecord {
    pub cut: Cut,
    pub trigger: BinaryConfig,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub report: SolveReport,
    pub cuts: Vec<CutRecord>,
    /// Integral candidates offered to the separators, in order.
    pub candidates: Vec<BinaryConfig>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub node_limit: usize,
    /// Restart rounds allowed; `None` means `2^switches`.
    pub iteration_cap: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { node_limit: MipOptions::default().node_limit, iteration_cap: None }
    }
}

pub fn solve_with_cuts(problem: &PartitionProblem, mode: SolveMode, driver: Driver) -> Result<SolveOutput, Error> {
    solve_with_options(problem, mode, driver, &SolveOptions::default())
}

fn separate(problem: &PartitionProblem, mode: SolveMode, config: &BinaryConfig) -> Result<Vec<Cut>, Error> {
    let mut cuts = Vec::new();
    if mode.separates_cycles() {
        cuts.extend(separate_cycles(problem, config)?);
    }
    if mode.separates_leaders() {
        cuts.extend(separate_leader_violations(problem, config)?);
    }
    Ok(cuts)
}

/// Keeps cuts not seen before. Every returned cut is checked to be violated
/// by `config`.
fn fresh_cuts(seen: &mut HashSet<Cut>, cuts: Vec<Cut>, config: &BinaryConfig) -> Result<Vec<Cut>, Error> {
    let mut fresh = Vec::new();
    for cut in cuts {
        if cut.is_satisfied(config) {
            return Err(Error::Contract(format!("{:?} cut does not remove its candidate", cut.kind)));
        }
        if seen.insert(cut.clone()) {
            fresh.push(cut);
        }
    }
    Ok(fresh)
}

struct Tally {
    records: Vec<CutRecord>,
    candidates: Vec<BinaryConfig>,
    rounds: usize,
}

pub fn solve_with_options(
    problem: &PartitionProblem,
    mode: SolveMode,
    driver: Driver,
    options: &SolveOptions,
) -> Result<SolveOutput, Error> {
    let start = Instant::now();
    let mip_options = MipOptions { node_limit: options.node_limit };
    let mut tally = Tally { records: Vec::new(), candidates: Vec::new(), rounds: 0 };
    let separating = mode != SolveMode::Full;

    let (solution, vars, nodes) = if !separating {
        let (model, vars) = build_model(problem, mode.build_mode());
        let sol = solve_mip_with(&model, &mut AcceptAll, &mip_options)?;
        let nodes = sol.nodes;
        (sol, vars, nodes)
    } else {
        match driver {
            Driver::Restart => restart(problem, mode, options, &mip_options, &mut tally)?,
            Driver::Callback => callback(problem, mode, &mip_options, &mut tally)?,
        }
    };

    let (status, objective, topology) = match solution.status {
        MipStatus::Infeasible => (SolveStatus::Infeasible, None, None),
        MipStatus::Optimal => {
            let candidate = CandidateSolution::decode(&vars, &solution.values);
            (SolveStatus::Optimal, Some(solution.objective), Some(Topology::from_candidate(problem, &candidate)?))
        }
    };
    let count = |kind: CutKind| tally.records.iter().filter(|r| r.cut.kind == kind).count();
    let report = SolveReport {
        mode,
        driver,
        status,
        objective,
        topology,
        iterations: tally.rounds,
        cycle_cuts: count(CutKind::Cycle),
        leader_lower_cuts: count(CutKind::LeaderLower),
        leader_upper_cuts: count(CutKind::LeaderUpper),
        nodes,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(SolveOutput { report, cuts: tally.records, candidates: tally.candidates })
}

fn restart(
    problem: &PartitionProblem,
    mode: SolveMode,
    options: &SolveOptions,
    mip_options: &MipOptions,
    tally: &mut Tally,
) -> Result<(MipSolution, VariableMap, usize), Error> {
    let cap = options.iteration_cap.unwrap_or_else(|| 1u64.checked_shl(problem.num_switches() as u32).unwrap_or(u64::MAX));
    let mut seen = HashSet::new();
    let mut nodes = 0;
    loop {
        let (mut model, vars) = build_model(problem, mode.build_mode());
        for (i, r) in tally.records.iter().enumerate() {
            model.add_constraint(format!("cut{}", i), r.cut.to_constraint(&vars));
        }
        let sol = solve_mip_with(&model, &mut AcceptAll, mip_options)?;
        nodes += sol.nodes;
        if sol.status == MipStatus::Infeasible {
            return Ok((sol, vars, nodes));
        }
        let config = CandidateSolution::decode(&vars, &sol.values).config;
        if tally.candidates.contains(&config) {
            return Err(Error::Contract("a removed candidate was returned again".into()));
        }
        tally.candidates.push(config.clone());
        let cuts = separate(problem, mode, &config)?;
        if cuts.is_empty() {
            return Ok((sol, vars, nodes));
        }
        let fresh = fresh_cuts(&mut seen, cuts, &config)?;
        if fresh.is_empty() {
            return Err(Error::Contract("candidate violates only cuts already in the model".into()));
        }
        tally.rounds += 1;
        if tally.rounds as u64 > cap {
            return Err(Error::IterationCap(cap));
        }
        tally.records.extend(fresh.into_iter().map(|cut| CutRecord { cut, trigger: config.clone() }));
    }
}

fn callback(
    problem: &PartitionProblem,
    mode: SolveMode,
    mip_options: &MipOptions,
    tally: &mut Tally,
) -> Result<(MipSolution, VariableMap, usize), Error> {
    let (model, vars) = build_model(problem, mode.build_mode());
    let mut seen = HashSet::new();
    let mut failure: Option<Error> = None;
    let mut handler = |values: &[f64]| {
        if failure.is_some() {
            return Verdict::Accept;
        }
        let config = CandidateSolution::decode(&vars, values).config;
        tally.candidates.push(config.clone());
        let outcome = separate(problem, mode, &config).and_then(|cuts| {
            if cuts.is_empty() {
                return Ok(Vec::new());
            }
            let fresh = fresh_cuts(&mut seen, cuts.clone(), &config)?;
            // a repeat can only come from numerical trouble; hand the rows back so the solver reports it
            Ok(if fresh.is_empty() { cuts } else { fresh })
        });
        match outcome {
            Ok(cuts) if cuts.is_empty() => Verdict::Accept,
            Ok(cuts) => {
                tally.rounds += 1;
                let rows = cuts.iter().map(|c| c.to_constraint(&vars)).collect();
                tally.records.extend(cuts.into_iter().map(|cut| CutRecord { cut, trigger: config.clone() }));
                Verdict::Reject(rows)
            }
            Err(e) => {
                failure = Some(e);
                Verdict::Accept
            }
        }
    };
    let sol = solve_mip_with(&model, &mut handler, mip_options)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let nodes = sol.nodes;
    Ok((sol, vars, nodes))
}
