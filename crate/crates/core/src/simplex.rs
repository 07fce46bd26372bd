//! Exact two-phase simplex over [`Rational`].
//!
//! The solver keeps a dense tableau. Every row owns an auxiliary identity
//! column that serves as the phase-one artificial and afterwards tracks the
//! basis inverse, so duals, added rows (dual simplex) and added columns
//! (primal simplex) are all available on a live solver.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::rational::Rational;
use crate::{Error, Result};

/// Size of a pivot element; small ones keep the tableau's denominators small.
fn height(a: &Rational) -> u64 {
    a.as_small().map_or(u64::MAX, |(n, d)| n.unsigned_abs().max(d as u64))
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// Sparse row `coeffs . x (rel) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, Rational)>, rel: Relation, rhs: Rational) -> Self {
        Row { coeffs, rel, rhs }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let l = self.lhs(x);
        match self.rel {
            Relation::Ge => l >= self.rhs,
            Relation::Le => l <= self.rhs,
            Relation::Eq => l == self.rhs,
        }
    }
}

/// `min objective . x` subject to `rows`, with per-variable bounds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub bounds: Vec<VarBound>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_var(&mut self, cost: Rational, bound: VarBound) -> usize {
        self.objective.push(cost);
        self.bounds.push(bound);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, row: Row) -> usize {
        self.rows.push(row);
        self.rows.len() - 1
    }

    fn check(&self) -> Result<()> {
        if self.bounds.len() != self.objective.len() {
            return Err(Error::Lp("bounds and objective differ in length".into()));
        }
        for (i, r) in self.rows.iter().enumerate() {
            if let Some((j, _)) = r.coeffs.iter().find(|(j, _)| *j >= self.num_vars()) {
                return Err(Error::Lp(format!("row {i} references variable {j}")));
            }
        }
        Ok(())
    }

    /// Whether `x` satisfies every row and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.rows.iter().all(|r| r.holds(x))
            && x.iter().zip(&self.bounds).all(|(v, b)| *b == VarBound::Free || !v.is_negative())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Renders the program in CPLEX LP text format. Non-integer
    /// coefficients are written exactly as `p/q`.
    pub fn to_lp_text(&self, name: impl Fn(usize) -> String) -> String {
        fn terms(out: &mut String, coeffs: impl Iterator<Item = (usize, Rational)>, name: &impl Fn(usize) -> String) {
            let mut any = false;
            for (j, c) in coeffs.filter(|(_, c)| !c.is_zero()) {
                let sign = if c.is_negative() { '-' } else { '+' };
                let _ = write!(out, " {sign} {} {}", c.abs(), name(j));
                any = true;
            }
            if !any {
                out.push_str(" 0");
            }
        }
        let mut out = String::from("Minimize\n obj:");
        terms(&mut out, self.objective.iter().cloned().enumerate(), &name);
        out.push_str("\nSubject To\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(out, " r{i}:");
            terms(&mut out, r.coeffs.iter().cloned(), &name);
            let rel = match r.rel {
                Relation::Ge => ">=",
                Relation::Le => "<=",
                Relation::Eq => "=",
            };
            let _ = writeln!(out, " {rel} {}", r.rhs);
        }
        out.push_str("Bounds\n");
        for (j, b) in self.bounds.iter().enumerate() {
            if *b == VarBound::Free {
                let _ = writeln!(out, " {} free", name(j));
            }
        }
        out.push_str("End\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Values of the original variables; empty unless optimal.
    pub primal: Vec<Rational>,
    pub objective: Rational,
    /// Internal tableau column basic in each row.
    pub basis: Vec<usize>,
    /// One multiplier per row; `objective . x >= duals . rhs` for feasible `x`.
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    /// Nonnegative part of a variable, or its negated part when `neg`.
    Var { var: usize, neg: bool },
    Slack,
    Aux,
}

#[derive(Debug, Clone)]
struct RowMeta {
    aux: usize,
    /// The tableau row is the original row times `sign`.
    sign: i8,
}

/// Live simplex state supporting incremental rows and columns.
#[derive(Debug, Clone)]
pub struct Solver {
    costs: Vec<Rational>,
    var_cols: Vec<(usize, Option<usize>)>,
    kinds: Vec<Col>,
    col_cost: Vec<Rational>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    basic: Vec<bool>,
    /// Nonzero counts per tableau row and column, for fill-aware tie breaks.
    row_cnt: Vec<u32>,
    col_cnt: Vec<u32>,
    meta: Vec<RowMeta>,
    /// Reduced costs of the active objective and its negated value.
    obj: Vec<Rational>,
    obj_rhs: Rational,
    status: Option<LpStatus>,
    pivots: usize,
}

impl Solver {
    /// Builds the initial tableau with a slack or artificial basis.
    pub fn new(lp: &LinearProgram) -> Result<Self> {
        lp.check()?;
        let mut s = Solver {
            costs: Vec::new(),
            var_cols: Vec::new(),
            kinds: Vec::new(),
            col_cost: Vec::new(),
            rows: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
            basic: Vec::new(),
            row_cnt: Vec::new(),
            col_cnt: Vec::new(),
            meta: Vec::new(),
            obj: Vec::new(),
            obj_rhs: Rational::zero(),
            status: None,
            pivots: 0,
        };
        for (c, b) in lp.objective.iter().zip(&lp.bounds) {
            s.push_var_columns(c.clone(), *b);
        }
        for r in &lp.rows {
            s.push_raw_row(r);
        }
        s.recount();
        Ok(s)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_vars(&self) -> usize {
        self.var_cols.len()
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn push_column(&mut self, kind: Col, cost: Rational) -> usize {
        for r in &mut self.rows {
            r.push(Rational::zero());
        }
        self.obj.push(Rational::zero());
        self.kinds.push(kind);
        self.basic.push(false);
        self.col_cnt.push(0);
        self.col_cost.push(cost);
        self.kinds.len() - 1
    }

    fn push_var_columns(&mut self, cost: Rational, bound: VarBound) -> usize {
        let var = self.var_cols.len();
        let plus = self.push_column(Col::Var { var, neg: false }, cost.clone());
        let minus = match bound {
            VarBound::NonNegative => None,
            VarBound::Free => Some(self.push_column(Col::Var { var, neg: true }, -&cost)),
        };
        self.var_cols.push((plus, minus));
        self.costs.push(cost);
        var
    }

    /// Appends a row in original form, normalized to a nonnegative right-hand
    /// side, with its own slack and aux columns; no basis bookkeeping.
    fn push_raw_row(&mut self, r: &Row) -> usize {
        let slack_coef = match r.rel {
            Relation::Ge => Some(-1),
            Relation::Le => Some(1),
            Relation::Eq => None,
        };
        let slack = slack_coef.map(|_| self.push_column(Col::Slack, Rational::zero()));
        let aux = self.push_column(Col::Aux, Rational::zero());
        // a zero-rhs `>=` row is negated so its slack can start basic
        let flip = r.rhs.is_negative() || (r.rhs.is_zero() && r.rel == Relation::Ge);
        let sign: i8 = if flip { -1 } else { 1 };
        let mut row = vec![Rational::zero(); self.kinds.len()];
        for (j, a) in &r.coeffs {
            let (p, m) = self.var_cols[*j];
            row[p] += a;
            if let Some(m) = m {
                row[m] -= a;
            }
        }
        if let (Some(sc), Some(k)) = (slack_coef, slack) {
            row[k] = Rational::from(sc as i64);
        }
        let mut rhs = r.rhs.clone();
        if sign < 0 {
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = -&*v;
                }
            }
            rhs = -rhs;
        }
        row[aux] = Rational::one();
        let basic = match slack {
            Some(k) if row[k].is_one() => k,
            _ => aux,
        };
        self.rows.push(row);
        self.rhs.push(rhs);
        self.basis.push(basic);
        self.basic[basic] = true;
        self.meta.push(RowMeta { aux, sign });
        self.rows.len() - 1
    }

    fn row_nnz(&self, i: usize) -> u32 {
        self.row_cnt[i]
    }

    fn col_nnz(&self, j: usize) -> u32 {
        self.col_cnt[j]
    }

    fn recount(&mut self) {
        self.col_cnt = vec![0; self.kinds.len()];
        self.row_cnt = self
            .rows
            .iter()
            .map(|row| {
                let mut c = 0;
                for (k, v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        self.col_cnt[k] += 1;
                        c += 1;
                    }
                }
                c
            })
            .collect();
    }

    fn is_basic(&self, j: usize) -> bool {
        self.basic[j]
    }

    fn pivot(&mut self, r: usize, j: usize) {
        self.pivots += 1;
        let inv = self.rows[r][j].recip();
        if !inv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let nz: Vec<usize> = (0..self.rows[r].len()).filter(|&k| !self.rows[r][k].is_zero()).collect();
        let prow = core::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][j].is_zero() {
                continue;
            }
            let f = self.rows[i][j].clone();
            let row = &mut self.rows[i];
            for &k in &nz {
                let was = !row[k].is_zero();
                row[k].sub_mul(&f, &prow[k]);
                match (was, row[k].is_zero()) {
                    (true, true) => {
                        self.col_cnt[k] -= 1;
                        self.row_cnt[i] -= 1;
                    }
                    (false, false) => {
                        self.col_cnt[k] += 1;
                        self.row_cnt[i] += 1;
                    }
                    _ => {}
                }
            }
            self.rhs[i].sub_mul(&f, &prhs);
        }
        if !self.obj[j].is_zero() {
            let f = self.obj[j].clone();
            for &k in &nz {
                self.obj[k].sub_mul(&f, &prow[k]);
            }
            self.obj_rhs.sub_mul(&f, &prhs);
        }
        self.rows[r] = prow;
        self.basic[self.basis[r]] = false;
        self.basic[j] = true;
        self.basis[r] = j;
    }

    /// Rebuilds the reduced-cost row for per-column costs `cost`.
    fn load_objective(&mut self, cost: &[Rational]) {
        self.obj = cost.to_vec();
        self.obj_rhs = Rational::zero();
        for i in 0..self.rows.len() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            let cb = cb.clone();
            for (k, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    self.obj[k].sub_mul(&cb, v);
                }
            }
            self.obj_rhs.sub_mul(&cb, &self.rhs[i]);
        }
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (j, rc) in self.obj.iter().enumerate() {
            if !rc.is_negative() || self.kinds[j] == Col::Aux || self.is_basic(j) {
                continue;
            }
            if bland {
                return Some(j);
            }
            if best.is_none_or(|b| *rc < self.obj[b]) {
                best = Some(j);
            }
        }
        best
    }

    /// Primal simplex from a primal feasible basis.
    fn primal(&mut self) -> LpStatus {
        let mut degenerate = 0;
        loop {
            let bland = degenerate > DEGENERATE_LIMIT;
            let Some(j) = self.entering(bland) else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((b, br)) if ratio == *br => {
                        if bland {
                            self.basis[i] < self.basis[*b]
                        } else {
                            self.row_nnz(i) < self.row_nnz(*b)
                        }
                    }
                    Some((_, br)) => ratio < *br,
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return LpStatus::Unbounded;
            };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, j);
        }
    }

    /// Dual simplex from a dual feasible basis.
    fn dual(&mut self) -> LpStatus {
        let mut degenerate = 0;
        loop {
            let bland = degenerate > DEGENERATE_LIMIT;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                if !self.rhs[i].is_negative() {
                    continue;
                }
                // steepest edge: infeasibility over the norm of the basis-inverse row
                let score = if bland {
                    0.0
                } else {
                    let w: f64 = self.meta.iter().map(|m| self.rows[i][m.aux].to_f64().powi(2)).sum();
                    self.rhs[i].to_f64().powi(2) / w
                };
                let better = match leave {
                    None => true,
                    Some((b, _)) if bland => self.basis[i] < self.basis[b],
                    Some((_, bs)) => score > bs,
                };
                if better {
                    leave = Some((i, score));
                }
            }
            let leave = leave.map(|(i, _)| i);
            let Some(r) = leave else {
                return LpStatus::Optimal;
            };
            let mut enter: Option<(usize, Rational)> = None;
            for j in 0..self.kinds.len() {
                let a = &self.rows[r][j];
                if !a.is_negative() || self.kinds[j] == Col::Aux {
                    continue;
                }
                let ratio = &self.obj[j] / &-a;
                let better = match &enter {
                    None => true,
                    Some((b, br)) => {
                        ratio < *br
                            || (!bland
                                && ratio == *br
                                && (height(a), self.col_nnz(j)) < (height(&self.rows[r][*b]), self.col_nnz(*b)))
                    }
                };
                if better {
                    enter = Some((j, ratio));
                }
            }
            let Some((j, ratio)) = enter else {
                return LpStatus::Infeasible;
            };
            if ratio.is_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, j);
        }
    }

    /// Runs both phases from the initial basis.
    pub fn solve(&mut self) -> LpStatus {
        let phase1: Vec<Rational> = (0..self.kinds.len())
            .map(|j| {
                if self.kinds[j] == Col::Aux && self.is_basic(j) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        if phase1.iter().any(|c| !c.is_zero()) {
            self.load_objective(&phase1);
            self.primal();
            if !self.obj_rhs.is_zero() {
                return self.finish(LpStatus::Infeasible);
            }
            self.drive_out_artificials();
        }
        let cost = self.col_cost.clone();
        self.load_objective(&cost);
        let st = self.primal();
        self.finish(st)
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if self.kinds[self.basis[r]] != Col::Aux {
                continue;
            }
            if let Some(j) = (0..self.kinds.len())
                .find(|&j| self.kinds[j] != Col::Aux && !self.rows[r][j].is_zero() && !self.is_basic(j))
            {
                self.pivot(r, j);
            }
        }
    }

    fn finish(&mut self, st: LpStatus) -> LpStatus {
        self.status = Some(st);
        st
    }

    pub fn status(&self) -> Option<LpStatus> {
        self.status
    }

    /// Adds inequality rows to an optimal solver and reoptimizes with the
    /// dual simplex. Equality rows are rejected.
    pub fn add_rows(&mut self, new_rows: &[Row]) -> Result<LpStatus> {
        if self.status != Some(LpStatus::Optimal) {
            return Err(Error::Lp("rows can only be added to an optimal solver".into()));
        }
        for r in new_rows {
            let sign: i8 = match r.rel {
                Relation::Ge => -1,
                Relation::Le => 1,
                Relation::Eq => return Err(Error::Lp("equality rows cannot be added incrementally".into())),
            };
            if let Some((j, _)) = r.coeffs.iter().find(|(j, _)| *j >= self.num_vars()) {
                return Err(Error::Lp(format!("row references variable {j}")));
            }
            let slack = self.push_column(Col::Slack, Rational::zero());
            let aux = self.push_column(Col::Aux, Rational::zero());
            // Original row: a.x + (-sign) ... ; multiplying by `sign` makes
            // the slack coefficient one so the slack can start basic.
            let mut row = vec![Rational::zero(); self.kinds.len()];
            let s = Rational::from(sign as i64);
            for (j, a) in &r.coeffs {
                let a = a * &s;
                let (p, m) = self.var_cols[*j];
                row[p] += &a;
                if let Some(m) = m {
                    row[m] -= &a;
                }
            }
            row[slack] = Rational::one();
            row[aux] = Rational::one();
            let mut rhs = &r.rhs * &s;
            for i in 0..self.rows.len() {
                let b = self.basis[i];
                if row[b].is_zero() {
                    continue;
                }
                let f = row[b].clone();
                for (k, v) in self.rows[i].iter().enumerate() {
                    if !v.is_zero() {
                        row[k].sub_mul(&f, v);
                    }
                }
                rhs.sub_mul(&f, &self.rhs[i]);
            }
            let mut cnt = 0;
            for (k, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    self.col_cnt[k] += 1;
                    cnt += 1;
                }
            }
            self.row_cnt.push(cnt);
            self.rows.push(row);
            self.rhs.push(rhs);
            self.basis.push(slack);
            self.basic[slack] = true;
            self.meta.push(RowMeta { aux, sign });
        }
        let st = self.dual();
        Ok(self.finish(st))
    }

    /// Dual multipliers of the original rows at the current basis.
    pub fn duals(&self) -> Vec<Rational> {
        self.meta
            .iter()
            .map(|m| {
                let v = &self.obj[m.aux];
                if m.sign < 0 {
                    v.clone()
                } else {
                    -v
                }
            })
            .collect()
    }

    /// `cost - duals . column` for a prospective column.
    pub fn reduced_cost(&self, cost: &Rational, entries: &[(usize, Rational)]) -> Rational {
        let mut rc = cost.clone();
        let duals = self.duals();
        for (i, a) in entries {
            rc.sub_mul(&duals[*i], a);
        }
        rc
    }

    /// Adds a variable with the given column to an optimal solver and
    /// reoptimizes with the primal simplex. Returns the new variable index.
    pub fn add_column(&mut self, cost: Rational, bound: VarBound, entries: &[(usize, Rational)]) -> Result<usize> {
        if self.status != Some(LpStatus::Optimal) {
            return Err(Error::Lp("columns can only be added to an optimal solver".into()));
        }
        if let Some((i, _)) = entries.iter().find(|(i, _)| *i >= self.num_rows()) {
            return Err(Error::Lp(format!("column references row {i}")));
        }
        let var = self.push_var_columns(cost, bound);
        let (p, m) = self.var_cols[var];
        for (col, sgn) in [(Some(p), 1i64), (m, -1)] {
            let Some(col) = col else { continue };
            // Tableau column is B^-1 a; aux column i holds B^-1 (sign_i e_i).
            for r in 0..self.rows.len() {
                let mut v = Rational::zero();
                for (i, a) in entries {
                    let t = &self.rows[r][self.meta[*i].aux];
                    if !t.is_zero() {
                        let s = Rational::from(self.meta[*i].sign as i64 * sgn);
                        v += &(&(a * t) * &s);
                    }
                }
                if !v.is_zero() {
                    self.row_cnt[r] += 1;
                    self.col_cnt[col] += 1;
                }
                self.rows[r][col] = v;
            }
            let mut rc = self.col_cost[col].clone();
            for r in 0..self.rows.len() {
                let cb = &self.col_cost[self.basis[r]];
                if !cb.is_zero() {
                    rc.sub_mul(cb, &self.rows[r][col]);
                }
            }
            self.obj[col] = rc;
        }
        Ok(var)
    }

    /// Reoptimizes after [`Solver::add_column`] calls.
    pub fn reoptimize(&mut self) -> LpStatus {
        let st = self.primal();
        self.finish(st)
    }

    pub fn objective(&self) -> Rational {
        -&self.obj_rhs
    }

    pub fn primal_values(&self) -> Vec<Rational> {
        let mut col_val = vec![Rational::zero(); self.kinds.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            col_val[b] = self.rhs[i].clone();
        }
        self.var_cols
            .iter()
            .map(|&(p, m)| match m {
                Some(m) => &col_val[p] - &col_val[m],
                None => col_val[p].clone(),
            })
            .collect()
    }

    pub fn solution(&self) -> LpSolution {
        let status = self.status.unwrap_or(LpStatus::Infeasible);
        if status != LpStatus::Optimal {
            return LpSolution {
                status,
                primal: Vec::new(),
                objective: Rational::zero(),
                basis: self.basis.clone(),
                duals: Vec::new(),
            };
        }
        LpSolution {
            status,
            primal: self.primal_values(),
            objective: self.objective(),
            basis: self.basis.clone(),
            duals: self.duals(),
        }
    }

    /// Pivots the given columns into the basis without ratio tests; the
    /// result is a phase-two tableau if the basis is feasible.
    fn crash(&mut self, basis: &[usize]) -> bool {
        if basis.len() != self.rows.len() || basis.iter().any(|&j| j >= self.kinds.len()) {
            return false;
        }
        let mut assigned = vec![false; self.rows.len()];
        for &j in basis {
            let Some(r) = (0..self.rows.len()).find(|&r| !assigned[r] && !self.rows[r][j].is_zero()) else {
                return false;
            };
            self.pivot(r, j);
            assigned[r] = true;
        }
        if self.rhs.iter().any(|v| v.is_negative()) {
            return false;
        }
        let cost = self.col_cost.clone();
        self.load_objective(&cost);
        let st = self.primal();
        self.finish(st) == LpStatus::Optimal
    }
}

/// Solves `lp` from scratch.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let mut s = Solver::new(lp)?;
    s.solve();
    Ok(s.solution())
}

/// Optimum of `lp` plus `new_rows`, warm-started from the basis of `prev`
/// (an optimal solution of `lp`) and reoptimized by the dual simplex.
pub fn resolve_with_rows(prev: &LpSolution, lp: &LinearProgram, new_rows: &[Row]) -> Result<LpSolution> {
    let incremental = new_rows.iter().all(|r| r.rel != Relation::Eq);
    if prev.status == LpStatus::Optimal && incremental {
        let mut s = Solver::new(lp)?;
        if s.crash(&prev.basis) {
            s.add_rows(new_rows)?;
            return Ok(s.solution());
        }
    }
    let mut full = lp.clone();
    full.rows.extend(new_rows.iter().cloned());
    solve_lp(&full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;
    use rand::Rng;

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    fn row(c: &[i64], rel: Relation, rhs: i64) -> Row {
        Row::new(c.iter().enumerate().filter(|(_, &a)| a != 0).map(|(j, &a)| (j, q(a))).collect(), rel, q(rhs))
    }

    fn lp(obj: &[i64], rows: Vec<Row>) -> LinearProgram {
        let mut p = LinearProgram::new();
        for &c in obj {
            p.add_var(q(c), VarBound::NonNegative);
        }
        for r in rows {
            p.add_row(r);
        }
        p
    }

    #[test]
    fn lp_text() {
        let mut p = lp(&[1, -2, 0], vec![row(&[1, 1, 0], Relation::Ge, 1), row(&[0, 1, -1], Relation::Le, 3)]);
        p.bounds[2] = VarBound::Free;
        p.rows[0].coeffs[1].1 = Rational::new(3, 2);
        p.add_row(Row::new(Vec::new(), Relation::Eq, q(0)));
        let text = p.to_lp_text(|j| format!("x{j}"));
        assert_eq!(
            text,
            "Minimize\n obj: + 1 x0 - 2 x1\nSubject To\n r0: + 1 x0 + 3/2 x1 >= 1\n r1: + 1 x1 - 1 x2 <= 3\n r2: 0 = 0\nBounds\n x2 free\nEnd\n"
        );
    }

    /// Checks optimality conditions exactly: feasibility, objective value
    /// and a dual certificate.
    fn assert_certified(p: &LinearProgram, s: &LpSolution) {
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(p.is_feasible(&s.primal));
        assert_eq!(p.objective_value(&s.primal), s.objective);
        let dual_obj: Rational = s.duals.iter().zip(&p.rows).map(|(y, r)| y * &r.rhs).sum();
        assert_eq!(dual_obj, s.objective, "strong duality");
        for (i, r) in p.rows.iter().enumerate() {
            match r.rel {
                Relation::Ge => assert!(!s.duals[i].is_negative()),
                Relation::Le => assert!(!s.duals[i].is_positive()),
                Relation::Eq => {}
            }
        }
        for j in 0..p.num_vars() {
            let mut rc = p.objective[j].clone();
            for (i, r) in p.rows.iter().enumerate() {
                for (k, a) in &r.coeffs {
                    if *k == j {
                        rc.sub_mul(&s.duals[i], a);
                    }
                }
            }
            match p.bounds[j] {
                VarBound::NonNegative => assert!(!rc.is_negative(), "reduced cost of {j}"),
                VarBound::Free => assert!(rc.is_zero()),
            }
        }
    }

    #[test]
    fn single_bound() {
        let p = lp(&[1], vec![row(&[1], Relation::Ge, 3)]);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.primal, vec![q(3)]);
        assert_certified(&p, &s);
    }

    #[test]
    fn two_variable_optimum() {
        let p = lp(&[1, 1], vec![row(&[1, 2], Relation::Ge, 4), row(&[3, 1], Relation::Ge, 6)]);
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.objective, Rational::new(14, 5));
        assert_eq!(s.primal, vec![Rational::new(8, 5), Rational::new(6, 5)]);
        assert_certified(&p, &s);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(&[0], vec![row(&[1], Relation::Ge, 1), row(&[-1], Relation::Ge, 0)]);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
        let p = lp(&[-1, 0], vec![row(&[1, -1], Relation::Le, 1)]);
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        let mut p = LinearProgram::new();
        let x = p.add_var(q(1), VarBound::Free);
        let y = p.add_var(q(2), VarBound::NonNegative);
        p.add_row(Row::new(vec![(x, q(1)), (y, q(1))], Relation::Eq, q(-3)));
        p.add_row(Row::new(vec![(x, q(1))], Relation::Ge, q(-5)));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.primal, vec![q(-3), q(0)]);
        assert_certified(&p, &s);
    }

    #[test]
    fn added_rows_match_fresh_solve() {
        let p = lp(&[1, 1], vec![row(&[1, 2], Relation::Ge, 4), row(&[3, 1], Relation::Ge, 6)]);
        let s = solve_lp(&p).unwrap();
        let satisfied = [row(&[1, 1], Relation::Ge, 1)];
        let again = resolve_with_rows(&s, &p, &satisfied).unwrap();
        assert_eq!(again.primal, s.primal);
        assert_eq!(again.objective, s.objective);
        let cut = [row(&[1, 0], Relation::Ge, 3)];
        let tighter = resolve_with_rows(&s, &p, &cut).unwrap();
        assert!(tighter.objective >= s.objective);
        let mut full = p.clone();
        full.rows.extend(cut.iter().cloned());
        assert_eq!(tighter.objective, solve_lp(&full).unwrap().objective);
        assert_certified(&full, &tighter);
    }

    #[test]
    fn added_column_is_priced() {
        // min x + y, x + y >= 2; then a cheaper z with x + y + z >= 2.
        let p = lp(&[1, 1], vec![row(&[1, 1], Relation::Ge, 2)]);
        let mut s = Solver::new(&p).unwrap();
        assert_eq!(s.solve(), LpStatus::Optimal);
        let entries = [(0, q(1))];
        assert!(s.reduced_cost(&Rational::new(1, 2), &entries).is_negative());
        s.add_column(Rational::new(1, 2), VarBound::NonNegative, &entries).unwrap();
        assert_eq!(s.reoptimize(), LpStatus::Optimal);
        assert_eq!(s.objective(), q(1));
        let mut full = lp(&[1, 1], vec![]);
        full.add_var(Rational::new(1, 2), VarBound::NonNegative);
        full.add_row(row(&[1, 1, 1], Relation::Ge, 2));
        assert_certified(&full, &s.solution());
    }

    /// Solves a square system exactly; `None` if singular.
    fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(c, p);
            b.swap(c, p);
            let inv = a[c][c].recip();
            for k in 0..n {
                a[c][k] = &a[c][k] * &inv;
            }
            b[c] = &b[c] * &inv;
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for k in 0..n {
                        let t = a[c][k].clone();
                        a[r][k].sub_mul(&f, &t);
                    }
                    let t = b[c].clone();
                    b[r].sub_mul(&f, &t);
                }
            }
        }
        Some(b)
    }

    /// Minimum over all basic feasible solutions; all variables nonnegative.
    fn brute_force(p: &LinearProgram) -> Option<Rational> {
        let nv = p.num_vars();
        let mut cons: Vec<(Vec<Rational>, Rational)> = p
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![q(0); nv];
                for (j, a) in &r.coeffs {
                    v[*j] += a;
                }
                (v, r.rhs.clone())
            })
            .collect();
        for j in 0..nv {
            let mut v = vec![q(0); nv];
            v[j] = q(1);
            cons.push((v, q(0)));
        }
        let k = cons.len();
        let mut best: Option<Rational> = None;
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize != nv {
                continue;
            }
            let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            let a = idx.iter().map(|&i| cons[i].0.clone()).collect();
            let b = idx.iter().map(|&i| cons[i].1.clone()).collect();
            if let Some(x) = solve_square(a, b) {
                if p.is_feasible(&x) {
                    let v = p.objective_value(&x);
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn random_programs_match_basic_solution_enumeration() {
        let mut rng = testutil::rng(2024);
        let mut optimal = 0;
        for _ in 0..200 {
            let nv = rng.gen_range(1..=6);
            let nr = rng.gen_range(1..=7);
            let obj: Vec<i64> = (0..nv).map(|_| rng.gen_range(-3..=5)).collect();
            let mut rows = Vec::new();
            for _ in 0..nr {
                let c: Vec<i64> = (0..nv).map(|_| rng.gen_range(-3..=4)).collect();
                let rel = match rng.gen_range(0..5) {
                    0 => Relation::Eq,
                    1 | 2 => Relation::Le,
                    _ => Relation::Ge,
                };
                rows.push(row(&c, rel, rng.gen_range(-4..=8)));
            }
            // keeps every instance bounded
            rows.push(row(&vec![1; nv], Relation::Le, 12));
            let p = lp(&obj, rows);
            let s = solve_lp(&p).unwrap();
            match brute_force(&p) {
                Some(best) => {
                    assert_certified(&p, &s);
                    assert_eq!(s.objective, best);
                    optimal += 1;
                }
                None => assert_eq!(s.status, LpStatus::Infeasible),
            }
            assert_eq!(solve_lp(&p).unwrap().basis, s.basis);
        }
        assert!(optimal > 50);
    }

    #[test]
    fn random_row_additions_match_fresh_solves() {
        let mut rng = testutil::rng(77);
        for _ in 0..100 {
            let nv = rng.gen_range(2..=5);
            let obj: Vec<i64> = (0..nv).map(|_| rng.gen_range(0..=5)).collect();
            let mut rows: Vec<Row> = (0..3)
                .map(|_| row(&(0..nv).map(|_| rng.gen_range(0..=3)).collect::<Vec<_>>(), Relation::Ge, rng.gen_range(0..=6)))
                .collect();
            rows.push(row(&vec![1; nv], Relation::Le, 20));
            let p = lp(&obj, rows);
            let s = solve_lp(&p).unwrap();
            if s.status != LpStatus::Optimal {
                continue;
            }
            let extra: Vec<Row> = (0..2)
                .map(|_| {
                    let rel = if rng.gen_bool(0.7) { Relation::Ge } else { Relation::Le };
                    row(&(0..nv).map(|_| rng.gen_range(-2..=3)).collect::<Vec<_>>(), rel, rng.gen_range(-2..=7))
                })
                .collect();
            let warm = resolve_with_rows(&s, &p, &extra).unwrap();
            let mut full = p.clone();
            full.rows.extend(extra);
            let cold = solve_lp(&full).unwrap();
            assert_eq!(warm.status, cold.status);
            if cold.status == LpStatus::Optimal {
                assert_eq!(warm.objective, cold.objective);
                assert_certified(&full, &warm);
            }
        }
    }
}
