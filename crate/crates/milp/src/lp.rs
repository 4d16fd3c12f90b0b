use crate::error::MilpError;
use crate::model::{MipModel, VarId};
use crate::simplex::{Outcome, Workspace};

/// Outcome of an LP solve.
///
/// Models carry finite bounds on every variable, so an LP is never
/// unbounded: it is either solved to optimality or proven infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values, one per model variable. Empty when infeasible.
    pub values: Vec<f64>,
    /// Objective including the model offset. NaN when infeasible.
    pub objective: f64,
    pub pivots: usize,
}

/// Solves the continuous relaxation of `model` (binaries relaxed to `[0,1]`).
pub fn solve_lp(model: &MipModel) -> Result<LpSolution, MilpError> {
    model.validate()?;
    let mut ws = Workspace::new(model);
    let outcome = ws.solve()?;
    Ok(match outcome {
        Outcome::Optimal => LpSolution {
            status: LpStatus::Optimal,
            values: ws.values().to_vec(),
            objective: ws.objective() + model.objective_offset(),
            pivots: ws.total_pivots,
        },
        Outcome::Infeasible => LpSolution {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective: f64::NAN,
            pivots: ws.total_pivots,
        },
    })
}

/// An LP kept alive between solves so that bound changes re-optimize from
/// the previous basis.
pub struct LpSession {
    ws: Workspace,
    offset: f64,
    status: Option<LpStatus>,
}

impl LpSession {
    pub fn new(model: &MipModel) -> Result<Self, MilpError> {
        model.validate()?;
        Ok(Self { ws: Workspace::new(model), offset: model.objective_offset(), status: None })
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) {
        self.ws.set_bounds(var.index(), lower, upper);
    }

    pub fn solve(&mut self) -> Result<LpStatus, MilpError> {
        let status = match self.ws.solve()? {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Infeasible => LpStatus::Infeasible,
        };
        self.status = Some(status);
        Ok(status)
    }

    /// Values of the last optimal solve.
    pub fn values(&self) -> &[f64] {
        self.ws.values()
    }

    pub fn objective(&self) -> f64 {
        match self.status {
            Some(LpStatus::Optimal) => self.ws.objective() + self.offset,
            _ => f64::NAN,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;

    #[test]
    fn lower_bounded_single_variable() {
        let mut m = MipModel::new();
        let x = m.add_continuous("x", 0.0, 10.0, 1.0);
        m.add_row("x_ge_3", vec![(x, 1.0)], Sense::Ge, 3.0);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_vertex() {
        let mut m = MipModel::new();
        let x = m.add_continuous("x", 0.0, 1.0, -1.0);
        let y = m.add_continuous("y", 0.0, 1.0, -1.0);
        m.add_row("sum", vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0);
        let sol = solve_lp(&m).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-6);
        assert!(m.max_violation(&sol.values) < 1e-7);
    }

    #[test]
    fn equality_infeasible() {
        let mut m = MipModel::new();
        let x = m.add_continuous("x", 0.0, 1.0, 0.0);
        let y = m.add_continuous("y", 0.0, 1.0, 0.0);
        m.add_row("a", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 1.5);
        m.add_row("b", vec![(x, 1.0), (y, -1.0)], Sense::Eq, 1.0);
        // x = 1.25 is out of bounds
        assert_eq!(solve_lp(&m).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn objective_offset_is_reported() {
        let mut m = MipModel::new();
        let x = m.add_continuous("x", 1.0, 2.0, 2.0);
        m.set_objective_offset(0.5);
        let _ = x;
        let sol = solve_lp(&m).unwrap();
        assert!((sol.objective - 2.5).abs() < 1e-12);
    }

    #[test]
    fn session_resolves_after_bound_changes() {
        let mut m = MipModel::new();
        let x = m.add_continuous("x", 0.0, 4.0, -1.0);
        let y = m.add_continuous("y", 0.0, 4.0, -1.0);
        m.add_row("sum", vec![(x, 1.0), (y, 1.0)], Sense::Le, 5.0);
        let mut lp = LpSession::new(&m).unwrap();
        assert_eq!(lp.solve().unwrap(), LpStatus::Optimal);
        assert!((lp.objective() + 5.0).abs() < 1e-9);
        lp.set_bounds(x, 0.0, 0.5);
        lp.solve().unwrap();
        assert!((lp.objective() + 4.5).abs() < 1e-9);
        lp.set_bounds(x, 2.0, 2.0);
        lp.set_bounds(y, 3.5, 4.0);
        assert_eq!(lp.solve().unwrap(), LpStatus::Infeasible);
        lp.set_bounds(y, 0.0, 4.0);
        assert_eq!(lp.solve().unwrap(), LpStatus::Optimal);
        assert!((lp.objective() + 5.0).abs() < 1e-9);
    }
}
