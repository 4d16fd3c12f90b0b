//! A small, self-contained MILP engine.
//!
//! Linear programs are solved with a bounded-variable dual simplex over a dense
//! tableau. Every variable (including the implicit row-activity variables) is
//! boxed, so any basis can be made dual feasible by moving nonbasic variables to
//! the bound matching the sign of their reduced cost. That property lets branch
//! and bound warm start every node and every lazily added row from whatever
//! basis the previous solve ended in.
//!
//! Integer support is limited to binary variables.

mod branch;
mod error;
mod lp;
mod model;
mod simplex;

pub use branch::{solve_mip, solve_mip_with, AcceptAll, IncumbentHandler, MipOptions, MipSolution, MipStatus, Verdict};
pub use error::MilpError;
pub use lp::{solve_lp, LpSession, LpSolution, LpStatus};
pub use model::{LinearConstraint, MipModel, Sense, VarId, VarKind, Variable};

/// Primal feasibility tolerance on row activities and bounds.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Distance from 0/1 below which a binary counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Tolerance used when comparing objective values.
pub const OBJECTIVE_TOL: f64 = 1e-6;
