//! Dense-tableau bounded dual simplex.
//!
//! Every row `i` is written as `a_i . x - s_i = 0` with a row-activity variable
//! `s_i` whose bounds encode the sense and right-hand side. The activity bounds
//! are intersected with the range implied by the structural bounds, so every
//! variable in the workspace is boxed. The tableau is kept in condensed form:
//! one column per nonbasic variable, `x_B = -T x_N`.

use crate::error::MilpError;
use crate::model::{LinearConstraint, MipModel, Sense};
use crate::FEASIBILITY_TOL;

const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const DEGENERATE_STALL: usize = 60;
const DRIFT_REFACTOR_PIVOTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, Copy)]
enum Loc {
    Basic(usize),
    Nonbasic(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct Workspace {
    /// Structural variable count; also the tableau width.
    n: usize,
    m: usize,
    tab: Vec<f64>,
    /// `-d_j` for the variable at column `j`.
    obj: Vec<f64>,
    basis: Vec<usize>,
    cols: Vec<usize>,
    loc: Vec<Loc>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    at_upper: Vec<bool>,
    rows: Vec<Vec<(usize, f64)>>,
    orig_bounds: Vec<(f64, f64)>,
    pivots_since_refactor: usize,
    pub(crate) total_pivots: usize,
}

impl Workspace {
    pub(crate) fn new(model: &MipModel) -> Self {
        let n = model.num_vars();
        let mut ws = Workspace {
            n,
            m: 0,
            tab: Vec::new(),
            obj: model.vars().iter().map(|v| -v.objective).collect(),
            basis: Vec::new(),
            cols: (0..n).collect(),
            loc: (0..n).map(Loc::Nonbasic).collect(),
            lo: model.vars().iter().map(|v| v.lower).collect(),
            hi: model.vars().iter().map(|v| v.upper).collect(),
            x: vec![0.0; n],
            cost: model.vars().iter().map(|v| v.objective).collect(),
            at_upper: vec![false; n],
            rows: Vec::new(),
            orig_bounds: model.vars().iter().map(|v| (v.lower, v.upper)).collect(),
            pivots_since_refactor: 0,
            total_pivots: 0,
        };
        for j in 0..n {
            let up = ws.cost[j] < 0.0;
            ws.at_upper[j] = up;
            ws.x[j] = if up { ws.hi[j] } else { ws.lo[j] };
        }
        for c in model.constraints() {
            ws.add_row(c);
        }
        ws
    }

    /// Appends a row with a basic activity variable. The basis stays dual
    /// feasible; the new activity may be primal infeasible.
    pub(crate) fn add_row(&mut self, c: &LinearConstraint) {
        let n = self.n;
        let mut terms: Vec<(usize, f64)> = Vec::with_capacity(c.terms.len());
        for &(v, coef) in &c.terms {
            if coef == 0.0 {
                continue;
            }
            match terms.iter_mut().find(|t| t.0 == v.0) {
                Some(t) => t.1 += coef,
                None => terms.push((v.0, coef)),
            }
        }
        // activity range implied by the original structural bounds
        let (mut amin, mut amax) = (0.0, 0.0);
        for &(j, a) in &terms {
            let (l, u) = self.orig_bounds[j];
            if a > 0.0 {
                amin += a * l;
                amax += a * u;
            } else {
                amin += a * u;
                amax += a * l;
            }
        }
        let (rlo, rhi) = match c.sense {
            Sense::Le => (amin, c.rhs.min(amax)),
            Sense::Ge => (c.rhs.max(amin), amax),
            Sense::Eq => (c.rhs, c.rhs),
        };

        let mut row = vec![0.0; n];
        let mut value = 0.0;
        for &(v, a) in &terms {
            value += a * self.x[v];
            match self.loc[v] {
                Loc::Nonbasic(j) => row[j] -= a,
                Loc::Basic(i) => {
                    let src = &self.tab[i * n..(i + 1) * n];
                    for (dst, &t) in row.iter_mut().zip(src) {
                        *dst += a * t;
                    }
                }
            }
        }
        let var = self.lo.len();
        self.tab.extend_from_slice(&row);
        self.basis.push(var);
        self.loc.push(Loc::Basic(self.m));
        // crossed bounds are kept as-is; solve() reports them as infeasible
        self.lo.push(rlo);
        self.hi.push(rhi);
        self.x.push(value);
        self.cost.push(0.0);
        self.at_upper.push(false);
        self.rows.push(terms);
        self.m += 1;
    }

    pub(crate) fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.lo[var] = lo;
        self.hi[var] = hi;
        if let Loc::Nonbasic(j) = self.loc[var] {
            let target = if self.at_upper[var] { hi } else { lo };
            self.move_nonbasic(j, target);
        }
    }

    pub(crate) fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lo[var], self.hi[var])
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub(crate) fn objective(&self) -> f64 {
        self.cost[..self.n].iter().zip(&self.x[..self.n]).map(|(c, x)| c * x).sum()
    }

    fn move_nonbasic(&mut self, j: usize, target: f64) {
        let v = self.cols[j];
        let delta = target - self.x[v];
        if delta != 0.0 {
            let n = self.n;
            for i in 0..self.m {
                let t = self.tab[i * n + j];
                if t != 0.0 {
                    self.x[self.basis[i]] -= t * delta;
                }
            }
        }
        self.x[v] = target;
    }

    fn make_dual_feasible(&mut self) {
        for j in 0..self.n {
            let v = self.cols[j];
            let d = -self.obj[j];
            if self.lo[v] == self.hi[v] {
                if self.x[v] != self.lo[v] {
                    self.move_nonbasic(j, self.lo[v]);
                }
                continue;
            }
            if d > DUAL_TOL && self.at_upper[v] {
                self.at_upper[v] = false;
                self.move_nonbasic(j, self.lo[v]);
            } else if d < -DUAL_TOL && !self.at_upper[v] {
                self.at_upper[v] = true;
                self.move_nonbasic(j, self.hi[v]);
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let n = self.n;
        let p = self.tab[r * n + q];
        let inv = 1.0 / p;
        {
            let row = &mut self.tab[r * n..(r + 1) * n];
            for t in row.iter_mut() {
                *t *= inv;
            }
            row[q] = inv;
        }
        let pivot_row: Vec<(usize, f64)> =
            self.tab[r * n..(r + 1) * n].iter().enumerate().filter(|&(j, &t)| t != 0.0 && j != q).map(|(j, &t)| (j, t)).collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.tab[i * n + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.tab[i * n..(i + 1) * n];
            for &(j, pr) in &pivot_row {
                let t = row[j] - f * pr;
                row[j] = if t.abs() < 1e-14 { 0.0 } else { t };
            }
            row[q] = -f * inv;
        }
        let f = self.obj[q];
        if f != 0.0 {
            for &(j, pr) in &pivot_row {
                self.obj[j] -= f * pr;
            }
            self.obj[q] = -f * inv;
        }
        let entering = self.cols[q];
        let leaving = self.basis[r];
        self.basis[r] = entering;
        self.cols[q] = leaving;
        self.loc[entering] = Loc::Basic(r);
        self.loc[leaving] = Loc::Nonbasic(q);
        self.pivots_since_refactor += 1;
        self.total_pivots += 1;
    }

    fn infeasibility(&self, v: usize) -> f64 {
        let x = self.x[v];
        let tol = FEASIBILITY_TOL * (1.0 + x.abs().min(1e3));
        if x < self.lo[v] - tol {
            self.lo[v] - x
        } else if x > self.hi[v] + tol {
            x - self.hi[v]
        } else {
            0.0
        }
    }

    fn choose_leaving(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let v = self.basis[i];
            let mut inf = self.infeasibility(v);
            if inf <= 0.0 {
                continue;
            }
            if !bland {
                let n = self.n;
                let norm: f64 = self.tab[i * n..(i + 1) * n].iter().map(|t| t * t).sum::<f64>() + 1.0;
                inf = inf * inf / norm;
            }
            let better = match best {
                None => true,
                Some((bi, bv)) => {
                    if bland {
                        v < self.basis[bi]
                    } else {
                        inf > bv
                    }
                }
            };
            if better {
                best = Some((i, inf));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs the dual simplex from the current basis.
    pub(crate) fn solve(&mut self) -> Result<Outcome, MilpError> {
        if self.lo.iter().zip(&self.hi).any(|(l, h)| l > &(h + FEASIBILITY_TOL)) {
            return Ok(Outcome::Infeasible);
        }
        self.make_dual_feasible();
        let max_iter = 50 * (self.m + self.n) + 10_000;
        let mut bland = false;
        let mut stall = 0usize;
        // zero-cost columns make most dual pivots degenerate, so only a long
        // run without progress counts as stalling
        let stall_limit = DEGENERATE_STALL.max(self.m + self.n);
        let mut refactored_for_check = false;
        for _ in 0..max_iter {
            if self.pivots_since_refactor > DRIFT_REFACTOR_PIVOTS {
                self.refactor();
            }
            let Some(r) = self.choose_leaving(bland) else {
                let primal_ok = self.residual_ok();
                if primal_ok && (self.pivots_since_refactor == 0 || self.reduced_costs_ok()) {
                    return Ok(Outcome::Optimal);
                }
                if !primal_ok && refactored_for_check && self.pivots_since_refactor == 0 {
                    return Err(MilpError::SolverFailure("row residuals remain large after refactorization".into()));
                }
                self.refactor();
                refactored_for_check = true;
                continue;
            };
            let leaving = self.basis[r];
            let target = if self.x[leaving] < self.lo[leaving] { self.lo[leaving] } else { self.hi[leaving] };
            let delta = target - self.x[leaving];
            let dir = if delta > 0.0 { 1.0 } else { -1.0 };

            let Some(q) = self.choose_entering(r, dir, bland) else {
                if self.pivots_since_refactor > 0 && !self.certify_infeasible(r) {
                    // the tableau row may have drifted; retry from a clean one
                    self.refactor();
                    refactored_for_check = true;
                    continue;
                }
                return Ok(Outcome::Infeasible);
            };

            let n = self.n;
            let alpha_q = -self.tab[r * n + q];
            let t = delta / alpha_q;
            let entering = self.cols[q];
            let dj = (-self.obj[q]).abs();
            if dj * t.abs() <= 1e-12 {
                stall += 1;
                if stall > stall_limit {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }
            for i in 0..self.m {
                let tq = self.tab[i * n + q];
                if tq != 0.0 {
                    self.x[self.basis[i]] -= tq * t;
                }
            }
            self.x[entering] += t;
            self.pivot(r, q);
            self.x[leaving] = target;
            self.at_upper[leaving] = target == self.hi[leaving] && target != self.lo[leaving];
        }
        Err(MilpError::SolverFailure(format!("iteration limit {} exceeded", max_iter)))
    }

    fn choose_entering(&self, r: usize, dir: f64, bland: bool) -> Option<usize> {
        let n = self.n;
        let row = &self.tab[r * n..(r + 1) * n];
        // (column, effective reduced cost, |alpha|)
        let mut cands: Vec<(usize, f64, f64)> = Vec::new();
        for (j, &t) in row.iter().enumerate() {
            let alpha = -t;
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let v = self.cols[j];
            if self.lo[v] == self.hi[v] {
                continue;
            }
            let step = if self.at_upper[v] { -1.0 } else { 1.0 };
            if alpha * step * dir <= 0.0 {
                continue;
            }
            let d = -self.obj[j];
            let d_eff = (d * step).max(0.0);
            cands.push((j, d_eff, alpha.abs()));
        }
        if cands.is_empty() {
            return None;
        }
        if bland {
            let mut best = cands[0];
            for &c in &cands[1..] {
                let (r0, r1) = (best.1 / best.2, c.1 / c.2);
                if r1 < r0 - 1e-12 || ((r1 - r0).abs() <= 1e-12 && self.cols[c.0] < self.cols[best.0]) {
                    best = c;
                }
            }
            return Some(best.0);
        }
        // Harris two-pass ratio test
        let theta = cands.iter().map(|&(_, d, a)| (d + DUAL_TOL) / a).fold(f64::INFINITY, f64::min);
        cands
            .iter()
            .filter(|&&(_, d, a)| d / a <= theta)
            .max_by(|x, y| x.2.partial_cmp(&y.2).unwrap())
            .map(|c| c.0)
    }

    /// Row multipliers `y` such that tableau row `r` equals
    /// `sum_i y_i (a_i . x - s_i)`, read off the activity-variable columns.
    fn row_multipliers(&self, r: usize) -> Vec<f64> {
        let n = self.n;
        (0..self.m)
            .map(|i| match self.loc[n + i] {
                Loc::Basic(b) if b == r => -1.0,
                Loc::Basic(_) => 0.0,
                Loc::Nonbasic(j) => -self.tab[r * n + j],
            })
            .collect()
    }

    /// Checks that the implied equation behind row `r`, rebuilt from the
    /// original rows, cannot hold anywhere in the current box.
    fn certify_infeasible(&self, r: usize) -> bool {
        let n = self.n;
        let y = self.row_multipliers(r);
        let mut coef = vec![0.0; n + self.m];
        for (i, terms) in self.rows.iter().enumerate() {
            if y[i] == 0.0 {
                continue;
            }
            for &(k, a) in terms {
                coef[k] += y[i] * a;
            }
            coef[n + i] = -y[i];
        }
        let (mut lo, mut hi, mut scale) = (0.0, 0.0, 1.0);
        for (v, &c) in coef.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let (a, b) = (c * self.lo[v], c * self.hi[v]);
            lo += a.min(b);
            hi += a.max(b);
            scale += a.abs().max(b.abs());
        }
        let tol = 1e-9 * scale + FEASIBILITY_TOL;
        lo > tol || hi < -tol
    }

    /// Recomputes reduced costs from the row duals and the original data and
    /// compares them with the maintained objective row.
    fn reduced_costs_ok(&self) -> bool {
        let n = self.n;
        let duals: Vec<f64> = (0..self.m)
            .map(|i| match self.loc[n + i] {
                Loc::Basic(_) => 0.0,
                Loc::Nonbasic(j) => -self.obj[j],
            })
            .collect();
        let mut reduced = self.cost[..n].to_vec();
        let mut scale = vec![1.0; n];
        for (i, terms) in self.rows.iter().enumerate() {
            if duals[i] == 0.0 {
                continue;
            }
            for &(k, a) in terms {
                reduced[k] -= duals[i] * a;
                scale[k] += (duals[i] * a).abs();
            }
        }
        (0..n).all(|k| {
            let stored = match self.loc[k] {
                Loc::Basic(_) => 0.0,
                Loc::Nonbasic(j) => -self.obj[j],
            };
            (reduced[k] - stored).abs() <= 1e-7 * (scale[k] + self.cost[k].abs())
        })
    }

    fn residual_ok(&self) -> bool {
        let n = self.n;
        self.rows.iter().enumerate().all(|(i, terms)| {
            let mut act = 0.0;
            let mut scale = 1.0;
            for &(j, a) in terms {
                let p = a * self.x[j];
                act += p;
                scale += p.abs();
            }
            (act - self.x[n + i]).abs() <= 1e-7 * scale
        })
    }

    /// Rebuilds the tableau for the current basis from the original rows.
    pub(crate) fn refactor(&mut self) {
        let n = self.n;
        let m = self.m;
        let target: Vec<usize> = self.basis.clone();
        let in_target: Vec<bool> = {
            let mut f = vec![false; n + m];
            for &v in &target {
                f[v] = true;
            }
            f
        };
        self.tab = vec![0.0; m * n];
        for (i, terms) in self.rows.iter().enumerate() {
            for &(j, a) in terms {
                self.tab[i * n + j] = -a;
            }
        }
        self.obj = self.cost[..n].iter().map(|c| -c).collect();
        self.basis = (0..m).map(|i| n + i).collect();
        self.cols = (0..n).collect();
        for j in 0..n {
            self.loc[j] = Loc::Nonbasic(j);
        }
        for i in 0..m {
            self.loc[n + i] = Loc::Basic(i);
        }
        for &v in target.iter().filter(|&&v| v < n) {
            let Loc::Nonbasic(q) = self.loc[v] else { continue };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                let b = self.basis[i];
                if b >= n && !in_target[b] {
                    let a = self.tab[i * n + q].abs();
                    if a > 1e-10 && best.map_or(true, |(_, ba)| a > ba) {
                        best = Some((i, a));
                    }
                }
            }
            if let Some((r, _)) = best {
                self.pivot(r, q);
            }
        }
        // slacks that could not be pivoted out keep their place; anything that
        // dropped out of the basis sits at a bound
        for j in 0..n {
            let v = self.cols[j];
            self.x[v] = if self.at_upper[v] { self.hi[v] } else { self.lo[v] };
        }
        for i in 0..m {
            let mut s = 0.0;
            for j in 0..n {
                s -= self.tab[i * n + j] * self.x[self.cols[j]];
            }
            self.x[self.basis[i]] = s;
        }
        self.pivots_since_refactor = 0;
        self.make_dual_feasible();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MipModel;

    #[test]
    fn single_bound_row() {
        let mut m = MipModel::new();
        let x = m.add_continuous("x", 0.0, 10.0, 1.0);
        m.add_row("lb", vec![(x, 1.0)], Sense::Ge, 3.0);
        let mut ws = Workspace::new(&m);
        assert_eq!(ws.solve().unwrap(), Outcome::Optimal);
        assert!((ws.values()[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn refactor_preserves_solution() {
        let mut m = MipModel::new();
        let x = m.add_continuous("x", 0.0, 4.0, -1.0);
        let y = m.add_continuous("y", 0.0, 4.0, -2.0);
        m.add_row("a", vec![(x, 1.0), (y, 1.0)], Sense::Le, 5.0);
        m.add_row("b", vec![(x, -1.0), (y, 2.0)], Sense::Le, 4.0);
        let mut ws = Workspace::new(&m);
        assert_eq!(ws.solve().unwrap(), Outcome::Optimal);
        let before = ws.objective();
        ws.refactor();
        assert_eq!(ws.solve().unwrap(), Outcome::Optimal);
        assert!((ws.objective() - before).abs() < 1e-9);
    }

    #[test]
    fn crossed_row_is_infeasible() {
        let mut m = MipModel::new();
        let x = m.add_continuous("x", 0.0, 1.0, 0.0);
        m.add_row("impossible", vec![(x, 1.0)], Sense::Ge, 2.0);
        let mut ws = Workspace::new(&m);
        assert_eq!(ws.solve().unwrap(), Outcome::Infeasible);
    }
}
