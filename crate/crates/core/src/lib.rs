//! Network partitioning with controllable switches: radial components, each
//! with a bounded number of leaders, chosen to trade load shedding against
//! generation cost.
//!
//! [`formulation::build_model`] writes the monolithic model or relaxations of
//! it; [`solve::solve_with_cuts`] enforces relaxed families lazily with cycle
//! and leader cuts; [`oracle`] enumerates small instances exhaustively.

pub mod cuts;
pub mod error;
pub mod formulation;
pub mod graph;
pub mod oracle;
pub mod problem;
pub mod solve;

pub use cuts::{
    separate_cycles, separate_leader_violations, BinaryConfig, CandidateSolution, ComponentSignature, Cut, CutKind,
    Provenance,
};
pub use error::Error;
pub use formulation::{build_model, BinaryVar, BuildMode, VariableMap};
pub use graph::{connected_components, detect_cycles, is_radial, Component, ComponentDecomposition, CycleSet, SwitchState};
pub use oracle::{enumerate_optimal, OracleResult};
pub use problem::{Block, Consumer, Parameters, PartitionProblem, Provider, Switch};
pub use solve::{
    solve_with_cuts, solve_with_options, CutRecord, Driver, SolveMode, SolveOptions, SolveOutput, SolveReport, SolveStatus,
    Topology,
};
