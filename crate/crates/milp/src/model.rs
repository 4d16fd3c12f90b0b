use std::fmt;

use crate::error::MilpError;

/// Handle to a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

/// A sparse row `sum(coef * var) <sense> rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) -> Self {
        Self { terms, sense, rhs }
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violates the row; zero when satisfied.
    pub fn violation(&self, values: &[f64]) -> f64 {
        let act = self.activity(values);
        match self.sense {
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone)]
struct Row {
    name: String,
    constraint: LinearConstraint,
}

/// A minimization model over binary and bounded continuous variables.
#[derive(Debug, Clone, Default)]
pub struct MipModel {
    vars: Vec<Variable>,
    rows: Vec<Row>,
    objective_offset: f64,
}

impl MipModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_binary(&mut self, name: impl Into<String>, objective: f64) -> VarId {
        self.push_var(Variable { name: name.into(), kind: VarKind::Binary, lower: 0.0, upper: 1.0, objective })
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64, objective: f64) -> VarId {
        self.push_var(Variable { name: name.into(), kind: VarKind::Continuous, lower, upper, objective })
    }

    fn push_var(&mut self, var: Variable) -> VarId {
        self.vars.push(var);
        VarId(self.vars.len() - 1)
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, constraint: LinearConstraint) {
        self.rows.push(Row { name: name.into(), constraint });
    }

    pub fn add_row(&mut self, name: impl Into<String>, terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) {
        self.add_constraint(name, LinearConstraint::new(terms, sense, rhs));
    }

    /// Constant added to the objective; does not affect the optimizer.
    pub fn set_objective_offset(&mut self, offset: f64) {
        self.objective_offset = offset;
    }

    pub fn objective_offset(&self) -> f64 {
        self.objective_offset
    }

    pub fn set_objective(&mut self, var: VarId, coef: f64) {
        self.vars[var.0].objective = coef;
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) {
        self.vars[var.0].lower = lower;
        self.vars[var.0].upper = upper;
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraint(&self, index: usize) -> &LinearConstraint {
        &self.rows[index].constraint
    }

    pub fn constraint_name(&self, index: usize) -> &str {
        &self.rows[index].name
    }

    pub fn constraints(&self) -> impl Iterator<Item = &LinearConstraint> {
        self.rows.iter().map(|r| &r.constraint)
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(i, _)| VarId(i))
    }

    /// Objective value of `values`, including the offset.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_offset + self.vars.iter().zip(values).map(|(v, x)| v.objective * x).sum::<f64>()
    }

    /// Largest row or bound violation of `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.constraint.violation(values)).fold(0.0, f64::max);
        let bounds = self
            .vars
            .iter()
            .zip(values)
            .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bounds)
    }

    /// Checks the structural invariants every solver entry point relies on.
    pub fn validate(&self) -> Result<(), MilpError> {
        for (i, v) in self.vars.iter().enumerate() {
            if !v.lower.is_finite() || !v.upper.is_finite() {
                return Err(MilpError::InvalidModel(format!("variable {} ({}) has an infinite bound", i, v.name)));
            }
            if v.lower > v.upper {
                return Err(MilpError::InvalidModel(format!(
                    "variable {} ({}) has lower bound {} above upper bound {}",
                    i, v.name, v.lower, v.upper
                )));
            }
            if !v.objective.is_finite() {
                return Err(MilpError::InvalidModel(format!("variable {} ({}) has a non-finite cost", i, v.name)));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(MilpError::InvalidModel(format!("binary variable {} ({}) has bounds outside [0,1]", i, v.name)));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.constraint.rhs.is_finite() {
                return Err(MilpError::InvalidModel(format!("row {} ({}) has a non-finite rhs", r, row.name)));
            }
            for &(v, c) in &row.constraint.terms {
                if v.0 >= self.vars.len() {
                    return Err(MilpError::InvalidModel(format!("row {} ({}) references unknown variable {}", r, row.name, v.0)));
                }
                if !c.is_finite() {
                    return Err(MilpError::InvalidModel(format!("row {} ({}) has a non-finite coefficient", r, row.name)));
                }
            }
        }
        Ok(())
    }
}

/// Plain-text dump in the spirit of the LP file format. Meant for eyeballing
/// small models, not for exchange with other solvers.
impl fmt::Display for MipModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Minimize")?;
        write!(f, " obj:")?;
        let mut any = false;
        for v in self.vars.iter().filter(|v| v.objective != 0.0) {
            write!(f, " {:+} {}", v.objective, v.name)?;
            any = true;
        }
        if self.objective_offset != 0.0 || !any {
            write!(f, " {:+}", self.objective_offset)?;
        }
        writeln!(f)?;
        writeln!(f, "Subject To")?;
        for row in &self.rows {
            write!(f, " {}:", row.name)?;
            for &(v, c) in &row.constraint.terms {
                write!(f, " {:+} {}", c, self.vars[v.0].name)?;
            }
            writeln!(f, " {} {}", row.constraint.sense.symbol(), row.constraint.rhs)?;
        }
        writeln!(f, "Bounds")?;
        for v in self.vars.iter().filter(|v| v.kind == VarKind::Continuous) {
            writeln!(f, " {} <= {} <= {}", v.lower, v.name, v.upper)?;
        }
        writeln!(f, "Binaries")?;
        for v in self.vars.iter().filter(|v| v.kind == VarKind::Binary) {
            writeln!(f, " {}", v.name)?;
        }
        writeln!(f, "End")
    }
}
