//! Best-bound branch and bound with depth-first plunging and a lazy-constraint
//! hook on integral candidates.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::MilpError;
use crate::model::{LinearConstraint, MipModel};
use crate::simplex::{Outcome, Workspace};
use crate::{FEASIBILITY_TOL, INTEGRALITY_TOL};

/// Nodes whose bound is within this distance of the incumbent are pruned.
const PRUNE_TOL: f64 = 1e-7;

/// Answer of an [`IncumbentHandler`] for one integral candidate.
#[derive(Debug, Clone)]
pub enum Verdict {
    Accept,
    /// Rows the candidate violates. They are added to the model globally and
    /// the node is solved again.
    Reject(Vec<LinearConstraint>),
}

/// Inspects every integral LP solution before it may become the incumbent.
pub trait IncumbentHandler {
    fn check(&mut self, values: &[f64]) -> Verdict;
}

/// Handler that accepts every candidate, i.e. plain branch and bound.
#[derive(Debug, Default, Clone, Copy)]
pub struct AcceptAll;

impl IncumbentHandler for AcceptAll {
    fn check(&mut self, _values: &[f64]) -> Verdict {
        Verdict::Accept
    }
}

impl<F: FnMut(&[f64]) -> Verdict> IncumbentHandler for F {
    fn check(&mut self, values: &[f64]) -> Verdict {
        self(values)
    }
}

#[derive(Debug, Clone)]
pub struct MipOptions {
    pub node_limit: usize,
}

impl Default for MipOptions {
    fn default() -> Self {
        Self { node_limit: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct MipSolution {
    pub status: MipStatus,
    /// Incumbent values with binaries exactly 0 or 1. Empty when infeasible.
    pub values: Vec<f64>,
    /// Objective including the model offset. NaN when infeasible.
    pub objective: f64,
    pub nodes: usize,
    /// Rows added by the handler, in insertion order.
    pub lazy_rows: Vec<LinearConstraint>,
    pub handler_calls: usize,
    /// Global lower bound after each processed node.
    pub bound_trace: Vec<f64>,
    pub pivots: usize,
}

impl MipSolution {
    pub fn lazy_cut_count(&self) -> usize {
        self.lazy_rows.len()
    }
}

#[derive(Debug)]
struct OpenNode {
    bound: f64,
    depth: usize,
    seq: usize,
    fixings: Vec<(usize, bool)>,
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenNode {}

impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenNode {
    // BinaryHeap pops the maximum: smallest bound, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Solves `model` to optimality, offering each integral candidate to `handler`.
pub fn solve_mip(model: &MipModel, handler: &mut dyn IncumbentHandler) -> Result<MipSolution, MilpError> {
    solve_mip_with(model, handler, &MipOptions::default())
}

pub fn solve_mip_with(
    model: &MipModel,
    handler: &mut dyn IncumbentHandler,
    options: &MipOptions,
) -> Result<MipSolution, MilpError> {
    model.validate()?;
    let binaries: Vec<usize> = model.binaries().map(|v| v.index()).collect();
    let base_bounds: Vec<(f64, f64)> = binaries.iter().map(|&b| (model.vars()[b].lower, model.vars()[b].upper)).collect();
    let offset = model.objective_offset();
    let mut ws = Workspace::new(model);

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut heap: BinaryHeap<OpenNode> = BinaryHeap::new();
    let mut next = Some(OpenNode { bound: f64::NEG_INFINITY, depth: 0, seq: 0, fixings: Vec::new() });
    let mut seq = 1usize;
    let mut nodes = 0usize;
    let mut lazy_rows: Vec<LinearConstraint> = Vec::new();
    let mut handler_calls = 0usize;
    let mut bound_trace = Vec::new();
    let mut fix: Vec<Option<bool>> = vec![None; model.num_vars()];

    loop {
        let node = match next.take().or_else(|| heap.pop()) {
            Some(n) => n,
            None => break,
        };
        if let Some((inc, _)) = &incumbent {
            if node.bound >= inc - PRUNE_TOL {
                continue;
            }
        }
        nodes += 1;
        if nodes > options.node_limit {
            return Err(MilpError::NodeLimit(options.node_limit));
        }

        for &(v, up) in &node.fixings {
            fix[v] = Some(up);
        }
        for (k, &b) in binaries.iter().enumerate() {
            let (lo, hi) = match fix[b] {
                Some(true) => (1.0, 1.0),
                Some(false) => (0.0, 0.0),
                None => base_bounds[k],
            };
            if ws.bounds(b) != (lo, hi) {
                ws.set_bounds(b, lo, hi);
            }
        }
        for &(v, _) in &node.fixings {
            fix[v] = None;
        }

        loop {
            if ws.solve()? == Outcome::Infeasible {
                break;
            }
            let obj = ws.objective() + offset;
            if let Some((inc, _)) = &incumbent {
                if obj >= inc - PRUNE_TOL {
                    break;
                }
            }
            let x = ws.values();
            let mut branch_on: Option<(usize, f64)> = None;
            for &b in &binaries {
                let dist = (x[b] - x[b].round()).abs();
                if dist > INTEGRALITY_TOL && branch_on.map_or(true, |(_, d)| dist > d + 1e-12) {
                    branch_on = Some((b, dist));
                }
            }
            match branch_on {
                None => {
                    let mut candidate = x.to_vec();
                    for &b in &binaries {
                        candidate[b] = candidate[b].round();
                    }
                    handler_calls += 1;
                    match handler.check(&candidate) {
                        Verdict::Accept => {
                            incumbent = Some((obj, candidate));
                            break;
                        }
                        Verdict::Reject(cuts) => {
                            if cuts.is_empty() {
                                return Err(MilpError::CallbackContract("candidate rejected without any cut".into()));
                            }
                            for cut in &cuts {
                                let viol = cut.violation(&candidate);
                                if viol <= FEASIBILITY_TOL {
                                    return Err(MilpError::CallbackContract(format!(
                                        "returned row is not violated by the candidate (violation {:e})",
                                        viol
                                    )));
                                }
                            }
                            for cut in cuts {
                                ws.add_row(&cut);
                                lazy_rows.push(cut);
                            }
                        }
                    }
                }
                Some((var, _)) => {
                    let up_first = x[var] >= 0.5;
                    let mut first = node.fixings.clone();
                    first.push((var, up_first));
                    let mut second = node.fixings.clone();
                    second.push((var, !up_first));
                    next = Some(OpenNode { bound: obj, depth: node.depth + 1, seq, fixings: first });
                    heap.push(OpenNode { bound: obj, depth: node.depth + 1, seq: seq + 1, fixings: second });
                    seq += 2;
                    break;
                }
            }
        }

        let open_min = next.iter().chain(heap.iter()).map(|n| n.bound).fold(f64::INFINITY, f64::min);
        let lb = match &incumbent {
            Some((inc, _)) => open_min.min(*inc),
            None => open_min,
        };
        bound_trace.push(lb);
    }

    let pivots_so_far = ws.total_pivots;
    Ok(match incumbent {
        None => MipSolution {
            status: MipStatus::Infeasible,
            values: Vec::new(),
            objective: f64::NAN,
            nodes,
            lazy_rows,
            handler_calls,
            bound_trace,
            pivots: pivots_so_far,
        },
        Some((_, candidate)) => {
            let values = polish(&mut ws, &binaries, candidate);
            MipSolution {
                status: MipStatus::Optimal,
                objective: model.objective_value(&values),
                values,
                nodes,
                lazy_rows,
                handler_calls,
                bound_trace,
                pivots: ws.total_pivots,
            }
        }
    })
}

/// Re-solves the LP with every binary fixed at its incumbent value so the
/// continuous part is consistent with exactly-integral binaries.
fn polish(ws: &mut Workspace, binaries: &[usize], candidate: Vec<f64>) -> Vec<f64> {
    for &b in binaries {
        let v = candidate[b];
        ws.set_bounds(b, v, v);
    }
    match ws.solve() {
        Ok(Outcome::Optimal) => {
            let mut values = ws.values().to_vec();
            for &b in binaries {
                values[b] = candidate[b];
            }
            values
        }
        _ => candidate,
    }
}
