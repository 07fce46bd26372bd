//! The gap LP of a half-integer vertex and its exact solution.
//!
//! For a vertex `x` the LP minimizes `x . c` over metric costs `c` under
//! which every tour costs at least one and `x` is optimal for the subtour
//! relaxation (dual rows with potentials `y` and cut multipliers `d_S`).
//! The vertex's integrality gap is the reciprocal of the optimum.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::canon::Certificate;
use crate::model::{arc_count, check_node_count, Arc, HalfPoint, NodeId, VertexRecord, VertexStatus};
use crate::polytope::{proper_subsets, SubsetMask};
use crate::rational::Rational;
use crate::simplex::{LinearProgram, LpStatus, Relation, Row, Solver, VarBound};
use crate::{Error, Result};

/// The complete gap LP for one vertex, tour rows excluded until added.
#[derive(Debug, Clone)]
pub struct GapModel {
    n: usize,
    point: HalfPoint,
    lp: LinearProgram,
    subsets: Vec<SubsetMask>,
    triangle_rows: Range<usize>,
    dual_rows: Range<usize>,
    tours: Vec<Vec<NodeId>>,
}

/// Triangle triples `(uv, w)` in row order.
fn triangles(n: usize) -> impl Iterator<Item = (Arc, NodeId)> {
    (0..arc_count(n)).flat_map(move |id| {
        let a = Arc::from_id(id, n);
        (0..n as NodeId).filter(move |&w| w != a.tail && w != a.head).map(move |w| (a, w))
    })
}

fn triangle_row(n: usize, a: Arc, w: NodeId, c_var: impl Fn(usize) -> usize) -> Row {
    Row::new(
        vec![
            (c_var(Arc::new(a.tail, w).id(n)), Rational::one()),
            (c_var(Arc::new(w, a.head).id(n)), Rational::one()),
            (c_var(a.id(n)), Rational::from(-1)),
        ],
        Relation::Ge,
        Rational::zero(),
    )
}

fn crosses(s: SubsetMask, a: Arc) -> bool {
    s & (1 << a.tail) != 0 && s & (1 << a.head) == 0
}

/// Arcs leaving `s`, as arc ids.
fn out_cut(n: usize, s: SubsetMask) -> impl Iterator<Item = usize> {
    (0..arc_count(n)).filter(move |&id| crosses(s, Arc::from_id(id, n)))
}

/// Tour visiting `tour` in order and closing back to its start.
fn tour_arcs(tour: &[NodeId]) -> impl Iterator<Item = Arc> + '_ {
    (0..tour.len()).map(move |i| Arc::new(tour[i], tour[(i + 1) % tour.len()]))
}

fn check_tour(n: usize, tour: &[NodeId]) -> Result<()> {
    let mut seen = 0u32;
    for &v in tour {
        if v as usize >= n || seen & (1 << v) != 0 {
            return Err(Error::Precondition(format!("{tour:?} is not a tour on {n} nodes")));
        }
        seen |= 1 << v;
    }
    if tour.len() != n {
        return Err(Error::Precondition(format!("{tour:?} is not a tour on {n} nodes")));
    }
    Ok(())
}

/// The tour `0 -> 1 -> ... -> n-1 -> 0`.
pub fn canonical_tour(n: usize) -> Vec<NodeId> {
    (0..n as NodeId).collect()
}

impl GapModel {
    /// Materializes every variable and static row for vertex `x`.
    pub fn build(x: &HalfPoint) -> Result<Self> {
        let n = x.n();
        check_node_count(n)?;
        if n < 4 {
            return Err(Error::NodeCount(n));
        }
        if !x.is_pure() {
            return Err(Error::Precondition("gap model needs a pure half-integer point".into()));
        }
        let m = arc_count(n);
        let mut lp = LinearProgram::new();
        for id in 0..m {
            lp.add_var(x.value(id), VarBound::NonNegative);
        }
        for _ in 0..2 * n {
            lp.add_var(Rational::zero(), VarBound::Free);
        }
        let subsets: Vec<SubsetMask> = proper_subsets(n).collect();
        for _ in &subsets {
            lp.add_var(Rational::zero(), VarBound::NonNegative);
        }

        let start = lp.rows.len();
        for (a, w) in triangles(n) {
            lp.add_row(triangle_row(n, a, w, |id| id));
        }
        let triangle_rows = start..lp.rows.len();

        let start = lp.rows.len();
        for id in 0..m {
            let a = Arc::from_id(id, n);
            let mut coeffs = vec![
                (id, Rational::one()),
                (m + a.tail as usize, Rational::from(-1)),
                (m + n + a.head as usize, Rational::from(-1)),
            ];
            for (k, &s) in subsets.iter().enumerate() {
                if crosses(s, a) {
                    coeffs.push((m + 2 * n + k, Rational::from(-1)));
                }
            }
            let rel = if x.value(id).is_zero() { Relation::Ge } else { Relation::Eq };
            lp.add_row(Row::new(coeffs, rel, Rational::zero()));
        }
        let dual_rows = start..lp.rows.len();

        let model = GapModel { n, point: x.clone(), lp, subsets, triangle_rows, dual_rows, tours: Vec::new() };
        assert_eq!(model.lp.num_vars(), m + 2 * n + (1usize << n) - 2 - 2 * n);
        assert_eq!(model.triangle_rows.len(), m * (n - 2));
        assert_eq!(model.num_equalities(), 2 * n);
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &HalfPoint {
        &self.point
    }

    pub fn lp(&self) -> &LinearProgram {
        &self.lp
    }

    pub fn num_arc_vars(&self) -> usize {
        arc_count(self.n)
    }

    pub fn num_potential_vars(&self) -> usize {
        2 * self.n
    }

    pub fn num_cut_vars(&self) -> usize {
        self.subsets.len()
    }

    pub fn triangle_rows(&self) -> Range<usize> {
        self.triangle_rows.clone()
    }

    pub fn dual_rows(&self) -> Range<usize> {
        self.dual_rows.clone()
    }

    pub fn num_equalities(&self) -> usize {
        self.lp.rows[self.dual_rows.clone()].iter().filter(|r| r.rel == Relation::Eq).count()
    }

    pub fn tours(&self) -> &[Vec<NodeId>] {
        &self.tours
    }

    pub fn c_var(&self, a: Arc) -> usize {
        a.id(self.n)
    }

    pub fn y_out_var(&self, u: NodeId) -> usize {
        arc_count(self.n) + u as usize
    }

    pub fn y_in_var(&self, v: NodeId) -> usize {
        arc_count(self.n) + self.n + v as usize
    }

    /// Variable of `d_S`, if `s` is a proper subset with both sides of size two or more.
    pub fn d_var(&self, s: SubsetMask) -> Option<usize> {
        self.subsets.binary_search(&s).ok().map(|k| arc_count(self.n) + 2 * self.n + k)
    }

    pub fn subsets(&self) -> &[SubsetMask] {
        &self.subsets
    }

    /// Rows in which `d_S` has a nonzero coefficient.
    pub fn d_column_rows(&self, s: SubsetMask) -> Vec<usize> {
        let Some(var) = self.d_var(s) else {
            return Vec::new();
        };
        (0..self.lp.rows.len()).filter(|&i| self.lp.rows[i].coeffs.iter().any(|(j, _)| *j == var)).collect()
    }

    /// `c(T) >= 1` for the closed tour through `tour`.
    pub fn tour_row(&self, tour: &[NodeId]) -> Result<Row> {
        check_tour(self.n, tour)?;
        Ok(Row::new(tour_arcs(tour).map(|a| (a.id(self.n), Rational::one())).collect(), Relation::Ge, Rational::one()))
    }

    /// Readable name of model variable `j`.
    pub fn var_name(&self, j: usize) -> String {
        let (m, n) = (arc_count(self.n), self.n);
        if j < m {
            let a = Arc::from_id(j, n);
            format!("c_{}_{}", a.tail, a.head)
        } else if j < m + n {
            format!("yout_{}", j - m)
        } else if j < m + 2 * n {
            format!("yin_{}", j - m - n)
        } else {
            format!("d_{:x}", self.subsets[j - m - 2 * n])
        }
    }

    /// The model in CPLEX LP text format.
    pub fn to_lp_text(&self) -> String {
        self.lp.to_lp_text(|j| self.var_name(j))
    }

    pub fn add_tour(&mut self, tour: &[NodeId]) -> Result<usize> {
        let row = self.tour_row(tour)?;
        self.tours.push(tour.to_vec());
        Ok(self.lp.add_row(row))
    }

    /// Checks a full assignment against every row and bound of the model,
    /// its metricity, and the minimum tour bound.
    pub fn check_solution(&self, values: &[Rational]) -> Result<()> {
        if !self.lp.is_feasible(values) {
            let bad = self.lp.rows.iter().position(|r| !r.holds(values));
            return Err(Error::Lp(format!("solution violates model row {bad:?}")));
        }
        let costs = &values[..arc_count(self.n)];
        let tour = min_tour(costs, self.n)?;
        if tour.cost < Rational::one() {
            return Err(Error::Lp(format!("tour {:?} costs {} < 1", tour.tour, tour.cost)));
        }
        Ok(())
    }
}

/// Builds the complete gap LP for vertex `x` with no tour rows.
pub fn build_gap_model(x: &HalfPoint) -> Result<GapModel> {
    GapModel::build(x)
}

/// A cheapest Hamiltonian cycle, starting at node zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TourOracleResult {
    pub tour: Vec<NodeId>,
    pub cost: Rational,
}

/// Exact minimum tour by Held-Karp over subsets anchored at node zero.
/// `costs` is indexed by arc id.
pub fn min_tour(costs: &[Rational], n: usize) -> Result<TourOracleResult> {
    check_node_count(n)?;
    if n < 2 {
        return Err(Error::NodeCount(n));
    }
    if costs.len() != arc_count(n) {
        return Err(Error::Precondition(format!("expected {} costs, got {}", arc_count(n), costs.len())));
    }
    let tour = match scaled_integers(costs, n) {
        Some((ints, _)) => held_karp(n, |id| ints[id], 0i64),
        None => held_karp(n, |id| costs[id].clone(), Rational::zero()),
    };
    let cost = tour_arcs(&tour).map(|a| costs[a.id(n)].clone()).sum();
    Ok(TourOracleResult { tour, cost })
}

/// Costs times their common denominator, when every tour sum fits in `i64`.
fn scaled_integers(costs: &[Rational], n: usize) -> Option<(Vec<i64>, i64)> {
    let mut lcm = BigInt::one();
    for c in costs {
        lcm = lcm.lcm(&c.denom());
    }
    let bound = BigInt::from(i64::MAX / (n as i64 + 1));
    let mut out = Vec::with_capacity(costs.len());
    for c in costs {
        let v = c.numer() * (&lcm / c.denom());
        if v.magnitude() > bound.magnitude() {
            return None;
        }
        out.push(v.to_i64()?);
    }
    Some((out, lcm.to_i64()?))
}

fn held_karp<T, F>(n: usize, cost: F, zero: T) -> Vec<NodeId>
where
    T: Clone + PartialOrd + for<'a> core::ops::Add<&'a T, Output = T>,
    F: Fn(usize) -> T,
{
    let arc = |u: usize, v: usize| Arc::new(u as NodeId, v as NodeId).id(n);
    let k = n - 1;
    let full = (1usize << k) - 1;
    // dp[mask * k + j]: cheapest path 0 -> ... -> j+1 through exactly `mask`
    let mut dp: Vec<Option<T>> = vec![None; (1 << k) * k];
    let mut pred: Vec<u8> = vec![u8::MAX; (1 << k) * k];
    for j in 0..k {
        dp[(1 << j) * k + j] = Some(zero.clone() + &cost(arc(0, j + 1)));
    }
    for mask in 1..=full {
        for j in 0..k {
            if mask & (1 << j) == 0 {
                continue;
            }
            let Some(base) = dp[mask * k + j].clone() else { continue };
            for t in 0..k {
                if mask & (1 << t) != 0 {
                    continue;
                }
                let next = mask | (1 << t);
                let cand = base.clone() + &cost(arc(j + 1, t + 1));
                let slot = &mut dp[next * k + t];
                if slot.as_ref().is_none_or(|s| cand < *s) {
                    *slot = Some(cand);
                    pred[next * k + t] = j as u8;
                }
            }
        }
    }
    let mut best: Option<(T, usize)> = None;
    for j in 0..k {
        if let Some(v) = &dp[full * k + j] {
            let total = v.clone() + &cost(arc(j + 1, 0));
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, j));
            }
        }
    }
    let (_, mut j) = best.expect("n >= 2 has a tour");
    let mut mask = full;
    let mut rev = Vec::with_capacity(n);
    loop {
        rev.push((j + 1) as NodeId);
        let p = pred[mask * k + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    rev.push(0);
    rev.reverse();
    rev
}

/// How static rows and cut columns enter the solver. Tour rows are always
/// separated lazily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Separation {
    /// Every triangle row and every `d_S` column is in the tableau.
    Eager,
    /// Triangle rows are separated and `d_S` columns priced on demand;
    /// the optimum is the same as with [`Separation::Eager`].
    #[default]
    Delayed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSolution {
    pub n: usize,
    /// Optimal gap LP value.
    pub objective: Rational,
    /// Optimal `c`, by arc id.
    pub costs: Vec<Rational>,
    /// Every variable of the complete model at the optimum.
    pub values: Vec<Rational>,
    /// Tour rows generated, in order.
    pub tours: Vec<Vec<NodeId>>,
    pub rounds: usize,
    pub pivots: usize,
}

impl GapSolution {
    /// Integrality gap of the vertex, the reciprocal of the optimum.
    pub fn gap(&self) -> Rational {
        self.objective.recip()
    }
}

/// Solves the gap LP of vertex `x` exactly and returns its gap.
pub fn solve_gap_instance(x: &HalfPoint) -> Result<Rational> {
    Ok(solve_gap(x, Separation::default())?.gap())
}

/// Solves the gap LP of vertex `x` and re-checks the optimum.
pub fn solve_gap(x: &HalfPoint, separation: Separation) -> Result<GapSolution> {
    let mut model = GapModel::build(x)?;
    let sol = match separation {
        Separation::Eager => solve_eager(&mut model)?,
        Separation::Delayed => solve_delayed(&mut model)?,
    };
    model.check_solution(&sol.values)?;
    if !sol.objective.is_positive() || sol.objective > Rational::one() {
        return Err(Error::Lp(format!("objective {} outside (0, 1]", sol.objective)));
    }
    if model.lp.objective_value(&sol.values) != sol.objective {
        return Err(Error::Lp("objective does not match the returned costs".into()));
    }
    Ok(sol)
}

fn expect_optimal(st: LpStatus) -> Result<()> {
    match st {
        LpStatus::Optimal => Ok(()),
        other => Err(Error::Lp(format!("gap LP ended {other:?}; the point is not a vertex or the model is wrong"))),
    }
}

fn violated_tour(costs: &[Rational], n: usize) -> Result<Option<Vec<NodeId>>> {
    let t = min_tour(costs, n)?;
    Ok((t.cost < Rational::one()).then_some(t.tour))
}

fn solve_eager(model: &mut GapModel) -> Result<GapSolution> {
    let n = model.n;
    model.add_tour(&canonical_tour(n))?;
    let mut solver = Solver::new(&model.lp)?;
    expect_optimal(solver.solve())?;
    let mut rounds = 1;
    loop {
        let values = solver.primal_values();
        let Some(tour) = violated_tour(&values[..arc_count(n)], n)? else {
            return Ok(GapSolution {
                n,
                objective: solver.objective(),
                costs: values[..arc_count(n)].to_vec(),
                tours: model.tours.clone(),
                values,
                rounds,
                pivots: solver.pivots(),
            });
        };
        let row = model.tour_row(&tour)?;
        model.add_tour(&tour)?;
        expect_optimal(solver.add_rows(&[row])?)?;
        rounds += 1;
    }
}

/// Restricted master problem: all arc and potential variables, the dual
/// rows first, and whichever triangle rows and cut columns were needed.
fn solve_delayed(model: &mut GapModel) -> Result<GapSolution> {
    let n = model.n;
    let m = arc_count(n);
    let mut lp = LinearProgram::new();
    for id in 0..m {
        lp.add_var(model.lp.objective[id].clone(), VarBound::NonNegative);
    }
    for _ in 0..2 * n {
        lp.add_var(Rational::zero(), VarBound::Free);
    }
    for id in 0..m {
        let a = Arc::from_id(id, n);
        let rel = model.lp.rows[model.dual_rows.start + id].rel;
        lp.add_row(Row::new(
            vec![
                (id, Rational::one()),
                (m + a.tail as usize, Rational::from(-1)),
                (m + n + a.head as usize, Rational::from(-1)),
            ],
            rel,
            Rational::zero(),
        ));
    }
    let first = canonical_tour(n);
    lp.add_row(model.tour_row(&first)?);
    model.tours.push(first);

    let mut solver = Solver::new(&lp)?;
    expect_optimal(solver.solve())?;
    // restricted variable index -> subset
    let mut cut_cols: BTreeMap<usize, SubsetMask> = BTreeMap::new();
    let mut in_model = vec![false; model.subsets.len()];
    let mut triangle_in = vec![false; model.triangle_rows.len()];
    let mut rounds = 1;
    loop {
        let duals = solver.duals();
        let mut priced = false;
        for (k, &s) in model.subsets.iter().enumerate() {
            if in_model[k] {
                continue;
            }
            // the column of d_S is -1 on each dual row of an arc leaving S
            let rc: Rational = out_cut(n, s).map(|id| duals[id].clone()).sum();
            if rc.is_negative() {
                let entries: Vec<(usize, Rational)> = out_cut(n, s).map(|id| (id, Rational::from(-1))).collect();
                let var = solver.add_column(Rational::zero(), VarBound::NonNegative, &entries)?;
                cut_cols.insert(var, s);
                in_model[k] = true;
                priced = true;
            }
        }
        if priced {
            expect_optimal(solver.reoptimize())?;
            rounds += 1;
            continue;
        }

        let values = solver.primal_values();
        let costs = &values[..m];
        let mut cuts = Vec::new();
        for (k, (a, w)) in triangles(n).enumerate() {
            if triangle_in[k] {
                continue;
            }
            let row = triangle_row(n, a, w, |id| id);
            if !row.holds(costs) {
                triangle_in[k] = true;
                cuts.push(row);
            }
        }
        if cuts.is_empty() {
            if let Some(tour) = violated_tour(costs, n)? {
                cuts.push(model.tour_row(&tour)?);
                model.tours.push(tour);
            }
        }
        if cuts.is_empty() {
            let mut full = vec![Rational::zero(); model.lp.num_vars()];
            full[..m + 2 * n].clone_from_slice(&values[..m + 2 * n]);
            for (&var, &s) in &cut_cols {
                full[model.d_var(s).expect("priced subsets are proper")] = values[var].clone();
            }
            for tour in model.tours.clone() {
                let row = model.tour_row(&tour)?;
                model.lp.add_row(row);
            }

            return Ok(GapSolution {
                n,
                objective: solver.objective(),
                costs: values[..m].to_vec(),
                values: full,
                tours: model.tours.clone(),
                rounds,
                pivots: solver.pivots(),
            });
        }
        expect_optimal(solver.add_rows(&cuts)?)?;

        rounds += 1;
    }
}

/// Largest per-vertex gap among the records that carry one.
pub fn gap_n(records: &[VertexRecord]) -> Result<Rational> {
    records
        .iter()
        .filter(|r| r.status == VertexStatus::Vertex)
        .filter_map(|r| r.gap.clone())
        .max()
        .ok_or(Error::Empty)
}

/// Per-certificate cache of gap values.
#[derive(Debug, Clone, Default)]
pub struct GapMemo {
    solved: BTreeMap<Certificate, Rational>,
    solves: usize,
}

impl GapMemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// The cached gap for `cert`, solving `x` on a miss.
    pub fn get_or_solve(&mut self, cert: &Certificate, x: &HalfPoint) -> Result<Rational> {
        if let Some(g) = self.solved.get(cert) {
            return Ok(g.clone());
        }
        let g = solve_gap_instance(x)?;
        self.solves += 1;
        self.solved.insert(cert.clone(), g.clone());
        Ok(g)
    }

    /// Number of LPs actually solved.
    pub fn solves(&self) -> usize {
        self.solves
    }

    pub fn len(&self) -> usize {
        self.solved.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solved.is_empty()
    }
}
