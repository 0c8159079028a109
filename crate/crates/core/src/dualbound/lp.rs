//! Reference LP solver: presolve, dense two-phase simplex, postsolve.
//!
//! Bound-recovery LPs are mostly chains of singletons (each Ẑ entry pins one
//! dual variable), so presolve usually empties them completely and the
//! simplex only sees what is left of genuinely coupled rows.
//!
//! Feasibility follows the usual tolerance semantics of commercial solvers:
//! a row counts as satisfied when it is violated by at most `tol`. The
//! reduced problem handed to the simplex has its rows relaxed by `tol / 2`
//! so that nearly consistent overdetermined systems are not rejected.

use log::warn;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// `max c^T x` subject to linear rows and bounds `lower <= x <= upper`
/// (infinite bounds allowed).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_free(&mut self, cost: f64) -> usize {
        self.add_var(cost, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_nonneg(&mut self, cost: f64) -> usize {
        self.add_var(cost, 0.0, f64::INFINITY)
    }

    /// Zero coefficients are dropped, duplicates are summed.
    pub fn add_row(
        &mut self,
        coeffs: impl IntoIterator<Item = (usize, f64)>,
        sense: RowSense,
        rhs: f64,
    ) {
        let mut c: Vec<(usize, f64)> = coeffs.into_iter().collect();
        c.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(c.len());
        for (j, a) in c {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|e| e.1 != 0.0);
        self.rows.push(LpRow {
            coeffs: merged,
            sense,
            rhs,
        });
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            let act: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match row.sense {
                RowSense::Eq => (act - row.rhs).abs(),
                RowSense::Le => (act - row.rhs).max(0.0),
                RowSense::Ge => (row.rhs - act).max(0.0),
            };
            worst = worst.max(v);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// Solves `lp` with the reference presolve + simplex. Numerical breakdown
/// (pivot limit, singular pivots) is reported as `Infeasible` with a warning
/// so that a bound attempt fails safe.
pub fn solve_lp(lp: &LinearProgram, tol: f64) -> LpOutcome {
    assert!(tol > 0.0, "LP tolerance must be positive");
    let mut pre = Presolve::new(lp, tol);
    if let Err(outcome) = pre.run() {
        return outcome;
    }
    let reduced = match pre.solve_remaining() {
        Ok(v) => v,
        Err(outcome) => return outcome,
    };
    let x = pre.postsolve(reduced);
    let objective = lp.objective_value(&x);
    LpOutcome::Optimal { x, objective }
}

struct Substitution {
    col: usize,
    coef: f64,
    rhs: f64,
    others: Vec<(usize, f64)>,
}

struct Presolve<'a> {
    lp: &'a LinearProgram,
    tol: f64,
    col_rows: Vec<Vec<(usize, f64)>>,
    row_active: Vec<bool>,
    col_active: Vec<bool>,
    sense: Vec<RowSense>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    stack: Vec<Substitution>,
}

impl<'a> Presolve<'a> {
    fn new(lp: &'a LinearProgram, tol: f64) -> Self {
        let nv = lp.num_vars();
        let mut col_rows = vec![Vec::new(); nv];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                col_rows[j].push((i, a));
            }
        }
        Self {
            lp,
            tol,
            col_rows,
            row_active: vec![true; lp.rows.len()],
            col_active: vec![true; nv],
            sense: lp.rows.iter().map(|r| r.sense).collect(),
            rhs: lp.rows.iter().map(|r| r.rhs).collect(),
            lower: lp.lower.clone(),
            upper: lp.upper.clone(),
            cost: lp.objective.clone(),
            x: vec![0.0; nv],
            stack: Vec::new(),
        }
    }

    fn active_coeffs(&self, i: usize) -> Vec<(usize, f64)> {
        self.lp.rows[i]
            .coeffs
            .iter()
            .copied()
            .filter(|&(j, _)| self.col_active[j])
            .collect()
    }

    fn fix(&mut self, j: usize, v: f64) {
        self.x[j] = v;
        self.col_active[j] = false;
        for &(i, a) in &self.col_rows[j] {
            if self.row_active[i] {
                self.rhs[i] -= a * v;
            }
        }
    }

    fn run(&mut self) -> Result<(), LpOutcome> {
        for j in 0..self.lower.len() {
            if self.lower[j] > self.upper[j] {
                return Err(LpOutcome::Infeasible);
            }
        }
        loop {
            let mut changed = false;
            for i in 0..self.row_active.len() {
                if self.row_active[i] {
                    changed |= self.reduce_row(i)?;
                }
            }
            for j in 0..self.col_active.len() {
                if self.col_active[j] {
                    changed |= self.reduce_col(j)?;
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn reduce_row(&mut self, i: usize) -> Result<bool, LpOutcome> {
        let act = self.active_coeffs(i);
        let tol = self.tol;
        match act.len() {
            0 => {
                let r = self.rhs[i];
                let ok = match self.sense[i] {
                    RowSense::Eq => r.abs() <= tol,
                    RowSense::Le => r >= -tol,
                    RowSense::Ge => r <= tol,
                };
                if !ok {
                    return Err(LpOutcome::Infeasible);
                }
                self.row_active[i] = false;
                Ok(true)
            }
            1 => {
                let (j, a) = act[0];
                let v = self.rhs[i] / a;
                let slack = tol / a.abs();
                match self.sense[i] {
                    RowSense::Eq => {
                        if v < self.lower[j] - slack || v > self.upper[j] + slack {
                            return Err(LpOutcome::Infeasible);
                        }
                        self.row_active[i] = false;
                        self.fix(j, v.clamp(self.lower[j], self.upper[j]));
                    }
                    sense => {
                        // a x <= r  or  a x >= r  as a bound on x
                        let upper_bound = (sense == RowSense::Le) == (a > 0.0);
                        if upper_bound {
                            if v < self.lower[j] - slack {
                                return Err(LpOutcome::Infeasible);
                            }
                            self.upper[j] = self.upper[j].min(v.max(self.lower[j]));
                        } else {
                            if v > self.upper[j] + slack {
                                return Err(LpOutcome::Infeasible);
                            }
                            self.lower[j] = self.lower[j].max(v.min(self.upper[j]));
                        }
                        self.row_active[i] = false;
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    fn reduce_col(&mut self, j: usize) -> Result<bool, LpOutcome> {
        let rows: Vec<(usize, f64)> = self.col_rows[j]
            .iter()
            .copied()
            .filter(|&(i, _)| self.row_active[i])
            .collect();
        let (lo, hi, c) = (self.lower[j], self.upper[j], self.cost[j]);
        match rows.len() {
            0 => {
                let v = if c > 0.0 {
                    hi
                } else if c < 0.0 {
                    lo
                } else {
                    0.0f64.clamp(lo, hi)
                };
                if !v.is_finite() {
                    return Err(LpOutcome::Unbounded);
                }
                self.fix(j, v);
                Ok(true)
            }
            1 if self.sense[rows[0].0] == RowSense::Eq
                && (lo.is_infinite() || hi.is_infinite()) =>
            {
                let (i, a) = rows[0];
                let others: Vec<(usize, f64)> = self
                    .active_coeffs(i)
                    .into_iter()
                    .filter(|e| e.0 != j)
                    .collect();
                if others.is_empty() {
                    return Ok(false);
                }
                let r = self.rhs[i];
                // x_j = (r - sum a_k x_k) / a  substituted into the objective
                for &(k, ak) in &others {
                    self.cost[k] -= c * ak / a;
                }
                self.stack.push(Substitution {
                    col: j,
                    coef: a,
                    rhs: r,
                    others,
                });
                self.col_active[j] = false;
                if lo.is_infinite() && hi.is_infinite() {
                    self.row_active[i] = false;
                } else if lo.is_finite() {
                    self.sense[i] = if a > 0.0 { RowSense::Le } else { RowSense::Ge };
                    self.rhs[i] = r - a * lo;
                } else {
                    self.sense[i] = if a > 0.0 { RowSense::Ge } else { RowSense::Le };
                    self.rhs[i] = r - a * hi;
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    /// Simplex on whatever presolve left. Returns values for the active
    /// columns (others untouched).
    fn solve_remaining(&mut self) -> Result<Vec<f64>, LpOutcome> {
        let cols: Vec<usize> = (0..self.col_active.len())
            .filter(|&j| self.col_active[j])
            .collect();
        let rows: Vec<usize> = (0..self.row_active.len())
            .filter(|&i| self.row_active[i])
            .collect();
        let mut x = self.x.clone();
        if cols.is_empty() {
            return Ok(x);
        }

        // Map each column to nonnegative simplex variables.
        enum Map {
            Shift(usize, f64),
            Mirror(usize, f64),
            Split(usize, usize),
        }
        let mut maps = Vec::with_capacity(cols.len());
        let mut nv = 0;
        let mut bound_rows = Vec::new();
        for &j in &cols {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_finite() {
                maps.push(Map::Shift(nv, lo));
                if hi.is_finite() {
                    bound_rows.push((nv, hi - lo));
                }
                nv += 1;
            } else if hi.is_finite() {
                maps.push(Map::Mirror(nv, hi));
                nv += 1;
            } else {
                maps.push(Map::Split(nv, nv + 1));
                nv += 2;
            }
        }
        let col_pos: std::collections::HashMap<usize, usize> =
            cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();

        let relax = 0.5 * self.tol;
        let mut a_rows: Vec<Vec<f64>> = Vec::new();
        let mut b = Vec::new();
        for &i in &rows {
            let mut dense = vec![0.0; nv];
            let mut r = self.rhs[i];
            for (j, a) in self.active_coeffs(i) {
                match maps[col_pos[&j]] {
                    Map::Shift(k, lo) => {
                        dense[k] += a;
                        r -= a * lo;
                    }
                    Map::Mirror(k, hi) => {
                        dense[k] -= a;
                        r -= a * hi;
                    }
                    Map::Split(p, q) => {
                        dense[p] += a;
                        dense[q] -= a;
                    }
                }
            }
            match self.sense[i] {
                RowSense::Le => {
                    a_rows.push(dense);
                    b.push(r + relax);
                }
                RowSense::Ge => {
                    a_rows.push(dense.iter().map(|v| -v).collect());
                    b.push(-r + relax);
                }
                RowSense::Eq => {
                    a_rows.push(dense.iter().map(|v| -v).collect());
                    b.push(-r + relax);
                    a_rows.push(dense);
                    b.push(r + relax);
                }
            }
        }
        for (k, width) in bound_rows {
            let mut dense = vec![0.0; nv];
            dense[k] = 1.0;
            a_rows.push(dense);
            b.push(width);
        }
        let mut c = vec![0.0; nv];
        for (idx, &j) in cols.iter().enumerate() {
            let cj = self.cost[j];
            match maps[idx] {
                Map::Shift(k, _) => c[k] = cj,
                Map::Mirror(k, _) => c[k] = -cj,
                Map::Split(p, q) => {
                    c[p] = cj;
                    c[q] = -cj;
                }
            }
        }

        let sol = match simplex_max(&a_rows, &b, &c) {
            SimplexResult::Optimal(v) => v,
            SimplexResult::Infeasible => return Err(LpOutcome::Infeasible),
            SimplexResult::Unbounded => return Err(LpOutcome::Unbounded),
            SimplexResult::Breakdown(why) => {
                warn!("reference LP solver gave up: {why}");
                return Err(LpOutcome::Infeasible);
            }
        };
        for (idx, &j) in cols.iter().enumerate() {
            x[j] = match maps[idx] {
                Map::Shift(k, lo) => lo + sol[k],
                Map::Mirror(k, hi) => hi - sol[k],
                Map::Split(p, q) => sol[p] - sol[q],
            };
        }
        Ok(x)
    }

    fn postsolve(&self, mut x: Vec<f64>) -> Vec<f64> {
        for sub in self.stack.iter().rev() {
            let rest: f64 = sub.others.iter().map(|&(k, a)| a * x[k]).sum();
            let j = sub.col;
            x[j] = ((sub.rhs - rest) / sub.coef).clamp(self.lp.lower[j], self.lp.upper[j]);
        }
        x
    }
}

#[derive(Debug)]
enum SimplexResult {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
    Breakdown(&'static str),
}

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

/// Dense tableau for `max c^T x, A x <= b, x >= 0`.
struct Tableau {
    /// Row-major, `width = cols + 1` (last entry is the right-hand side).
    t: Vec<f64>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B^T B^{-1} a_j` plus `-objective` in the last slot.
    d: Vec<f64>,
    pivots: usize,
    max_pivots: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width() + j]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width();
        let p = self.at(r, q);
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[q];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                row[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, pv) in self.d.iter_mut().zip(prow.iter()) {
                *v -= f * pv;
            }
            self.d[q] = 0.0;
        }
        self.basis[r] = q;
        self.pivots += 1;
    }

    fn set_costs(&mut self, c: &[f64]) {
        let w = self.width();
        self.d = vec![0.0; w];
        self.d[..c.len()].copy_from_slice(c);
        for i in 0..self.rows {
            let cb = c.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.d[j] -= cb * self.t[i * w + j];
                }
            }
        }
    }

    /// Primal simplex over columns `< allowed`. Returns `Ok(false)` when unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool, &'static str> {
        let rhs = self.cols;
        let mut degenerate = 0;
        loop {
            if self.pivots > self.max_pivots {
                return Err("pivot limit reached");
            }
            let scale = 1.0 + self.d[..allowed].iter().fold(0.0f64, |m, v| m.max(v.abs())) * 1e-12;
            let bland = degenerate >= DEGENERATE_LIMIT;
            let mut q = None;
            let mut best = COST_TOL * scale;
            for j in 0..allowed {
                if self.d[j] > best {
                    q = Some(j);
                    if bland {
                        break;
                    }
                    best = self.d[j];
                }
            }
            let Some(q) = q else { return Ok(true) };

            let mut r = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.rows {
                let a = self.at(i, q);
                if a > PIVOT_TOL {
                    let t = self.at(i, rhs).max(0.0) / a;
                    let better = match r {
                        None => true,
                        Some(rr) => {
                            if t < ratio - 1e-12 {
                                true
                            } else if t <= ratio + 1e-12 {
                                if bland {
                                    self.basis[i] < self.basis[rr]
                                } else {
                                    a > self.at(rr, q)
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        r = Some(i);
                        ratio = ratio.min(t);
                    }
                }
            }
            let Some(r) = r else { return Ok(false) };
            if ratio <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, q);
        }
    }
}

fn simplex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> SimplexResult {
    let rows = a.len();
    let nv = c.len();
    if rows == 0 {
        return if c.iter().any(|&v| v > 0.0) {
            SimplexResult::Unbounded
        } else {
            SimplexResult::Optimal(vec![0.0; nv])
        };
    }
    let neg_rows: Vec<usize> = (0..rows).filter(|&i| b[i] < 0.0).collect();
    let cols = nv + rows + neg_rows.len();
    let w = cols + 1;
    let mut t = vec![0.0; rows * w];
    let mut basis = vec![0; rows];
    let mut art = 0;
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let row = &mut t[i * w..(i + 1) * w];
        for j in 0..nv {
            row[j] = sign * a[i][j];
        }
        row[nv + i] = sign;
        row[cols] = sign * b[i];
        if sign < 0.0 {
            row[nv + rows + art] = 1.0;
            basis[i] = nv + rows + art;
            art += 1;
        } else {
            basis[i] = nv + i;
        }
    }
    let mut tab = Tableau {
        t,
        rows,
        cols,
        basis,
        d: Vec::new(),
        pivots: 0,
        max_pivots: 50 * (rows + cols) + 1000,
    };

    let first_art = nv + rows;
    if art > 0 {
        let mut c1 = vec![0.0; cols];
        for v in &mut c1[first_art..] {
            *v = -1.0;
        }
        tab.set_costs(&c1);
        match tab.optimize(cols) {
            Ok(true) => {}
            Ok(false) => return SimplexResult::Breakdown("phase one unbounded"),
            Err(e) => return SimplexResult::Breakdown(e),
        }
        let infeas = tab.d[cols];
        let bscale = 1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if infeas > 1e-9 * bscale {
            return SimplexResult::Infeasible;
        }
        // Drive remaining artificials out of the basis.
        for i in 0..rows {
            if tab.basis[i] >= first_art {
                if let Some(q) = (0..first_art).find(|&j| tab.at(i, j).abs() > PIVOT_TOL) {
                    tab.pivot(i, q);
                }
            }
        }
    }

    let mut c2 = vec![0.0; cols];
    c2[..nv].copy_from_slice(c);
    tab.set_costs(&c2);
    match tab.optimize(first_art) {
        Ok(true) => {}
        Ok(false) => return SimplexResult::Unbounded,
        Err(e) => return SimplexResult::Breakdown(e),
    }
    let mut x = vec![0.0; nv];
    for i in 0..rows {
        if tab.basis[i] < nv {
            x[tab.basis[i]] = tab.at(i, cols).max(0.0);
        }
    }
    SimplexResult::Optimal(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn opt(o: LpOutcome) -> (Vec<f64>, f64) {
        match o {
            LpOutcome::Optimal { x, objective } => (x, objective),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn fixed_lambda() {
        // max -3 l  s.t. l = 1, l >= 0
        let mut lp = LinearProgram::default();
        let l = lp.add_nonneg(-3.0);
        lp.add_row([(l, 1.0)], RowSense::Eq, 1.0);
        let (x, obj) = opt(solve_lp(&lp, 1e-5));
        assert_eq!(x, vec![1.0]);
        assert_eq!(obj, -3.0);
    }

    #[test]
    fn unconstrained_free_is_unbounded() {
        let mut lp = LinearProgram::default();
        lp.add_free(1.0);
        assert_eq!(solve_lp(&lp, 1e-5), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_fix_is_infeasible() {
        let mut lp = LinearProgram::default();
        let l = lp.add_nonneg(0.0);
        lp.add_row([(l, 1.0)], RowSense::Eq, -1.0);
        assert_eq!(solve_lp(&lp, 1e-5), LpOutcome::Infeasible);
    }

    #[test]
    fn small_violation_is_clamped() {
        let mut lp = LinearProgram::default();
        let l = lp.add_nonneg(0.0);
        lp.add_row([(l, 1.0)], RowSense::Eq, -1e-7);
        let (x, _) = opt(solve_lp(&lp, 1e-5));
        assert_eq!(x, vec![0.0]);
        assert!(lp.max_violation(&x) <= 1e-5);
    }

    #[test]
    fn textbook_lp() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::default();
        let x = lp.add_nonneg(3.0);
        let y = lp.add_nonneg(5.0);
        lp.add_row([(x, 1.0), (y, 0.0)], RowSense::Le, 4.0);
        lp.add_row([(y, 2.0), (x, 0.0)], RowSense::Le, 12.0);
        lp.add_row([(x, 3.0), (y, 2.0)], RowSense::Le, 18.0);
        let (v, obj) = opt(solve_lp(&lp, 1e-9));
        assert!((obj - 36.0).abs() < 1e-6, "{obj}");
        assert!((v[0] - 2.0).abs() < 1e-6 && (v[1] - 6.0).abs() < 1e-6);
    }

    #[test]
    fn free_variables_and_equalities() {
        // max u + v  s.t. u + v + w = 2, u - v = 0, w >= 1, u, v free
        let mut lp = LinearProgram::default();
        let u = lp.add_free(1.0);
        let v = lp.add_free(1.0);
        let w = lp.add_var(0.0, 1.0, INF);
        lp.add_row([(u, 1.0), (v, 1.0), (w, 1.0)], RowSense::Eq, 2.0);
        lp.add_row([(u, 1.0), (v, -1.0)], RowSense::Eq, 0.0);
        let (x, obj) = opt(solve_lp(&lp, 1e-9));
        assert!((obj - 1.0).abs() < 1e-6, "{obj} {x:?}");
        assert!(lp.max_violation(&x) < 1e-8);
    }

    #[test]
    fn dense_infeasible_system() {
        // x + y >= 3, x + y <= 1
        let mut lp = LinearProgram::default();
        let x = lp.add_nonneg(1.0);
        let y = lp.add_nonneg(1.0);
        lp.add_row([(x, 1.0), (y, 1.0)], RowSense::Ge, 3.0);
        lp.add_row([(x, 1.0), (y, 1.0)], RowSense::Le, 1.0);
        assert_eq!(solve_lp(&lp, 1e-9), LpOutcome::Infeasible);
    }

    #[test]
    fn dense_unbounded() {
        // max x - y, x - y >= 1 ... with two coupled rows
        let mut lp = LinearProgram::default();
        let x = lp.add_nonneg(1.0);
        let y = lp.add_nonneg(-1.0);
        lp.add_row([(x, 1.0), (y, -1.0)], RowSense::Ge, 1.0);
        lp.add_row([(x, 1.0), (y, 1.0)], RowSense::Ge, 0.0);
        assert_eq!(solve_lp(&lp, 1e-9), LpOutcome::Unbounded);
    }

    #[test]
    fn bounded_column_goes_to_simplex() {
        // max x + y, x + y <= 10, 0 <= x <= 2, y in [1, 3] coupled by x - y <= 0
        let mut lp = LinearProgram::default();
        let x = lp.add_var(1.0, 0.0, 2.0);
        let y = lp.add_var(1.0, 1.0, 3.0);
        lp.add_row([(x, 1.0), (y, 1.0)], RowSense::Le, 10.0);
        lp.add_row([(x, 1.0), (y, -1.0)], RowSense::Le, 0.0);
        let (_, obj) = opt(solve_lp(&lp, 1e-9));
        assert!((obj - 5.0).abs() < 1e-6, "{obj}");
    }
}
