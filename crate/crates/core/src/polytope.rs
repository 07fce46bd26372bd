//! Property checks on half-integer points: decomposition into two covers,
//! subtour feasibility, active subtour sets and the circuit extremality test.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::model::{arc_count, Arc, CycleCover, HalfPoint, NodeId};
use crate::rational::Rational;
use crate::{Error, Result};

/// Node subset as a bitmask, bit `u` set iff `u` is in the set.
pub type SubsetMask = u16;

/// Two support arcs that are the only nonzero entries of an active subtour
/// row once it is projected onto the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectedPair {
    pub e1: Arc,
    pub e2: Arc,
}

/// Splits `x` into covers `y1`, `y2` with `x = (y1 + y2) / 2`.
///
/// `y1` is a perfect matching between tails and heads inside the support;
/// `y2 = 2x - y1`.
pub fn decompose_half_point(x: &HalfPoint) -> Result<(CycleCover, CycleCover)> {
    let n = x.n();
    let adj: Vec<u16> = (0..n).map(|u| x.out_mask(u as NodeId)).collect();
    let succ1 = perfect_matching(&adj).ok_or_else(|| {
        Error::Precondition(format!("support of {n}-node point has no perfect matching"))
    })?;
    let mut succ2 = vec![0; n];
    for u in 0..n {
        let a = Arc::new(u as NodeId, succ1[u]);
        let rest: Vec<NodeId> = (0..n as NodeId)
            .filter(|&v| v != u as NodeId)
            .filter(|&v| {
                let h = x.halves_at(Arc::new(u as NodeId, v));
                let used = if v == a.head { 1 } else { 0 };
                h > used
            })
            .collect();
        match rest.as_slice() {
            [v] => succ2[u] = *v,
            _ => {
                return Err(Error::Precondition(format!(
                    "2x - y1 is not a cover at node {u}"
                )))
            }
        }
    }
    let y1 = CycleCover::from_successors(succ1)?;
    let y2 = CycleCover::from_successors(succ2)?;
    Ok((y1, y2))
}

/// Kuhn's augmenting-path matching; `adj[u]` is the set of allowed heads.
/// Returns the head matched to every tail.
fn perfect_matching(adj: &[u16]) -> Option<Vec<NodeId>> {
    let n = adj.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(u: usize, adj: &[u16], seen: &mut u16, owner: &mut [Option<usize>]) -> bool {
        let mut m = adj[u] & !*seen;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            *seen |= 1 << v;
            if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    for u in 0..n {
        let mut seen = 0u16;
        if !augment(u, adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut succ = vec![0; n];
    for (v, w) in owner.iter().enumerate() {
        succ[w.expect("perfect")] = v as NodeId;
    }
    Some(succ)
}

/// Out-cut of `s` in half-units.
fn cut_halves(x: &HalfPoint, s: SubsetMask) -> u32 {
    let n = x.n();
    let mut total = 0u32;
    for u in 0..n {
        if s & (1 << u) == 0 {
            continue;
        }
        for v in 0..n {
            if s & (1 << v) == 0 {
                total += x.halves_at(Arc::new(u as NodeId, v as NodeId)) as u32;
            }
        }
    }
    total
}

/// Proper subsets with `2 <= |S| <= n - 2`, ascending by mask.
pub fn proper_subsets(n: usize) -> impl Iterator<Item = SubsetMask> {
    (0u32..1 << n)
        .filter(move |s| (2..=n as u32 - 2).contains(&s.count_ones()))
        .map(|s| s as SubsetMask)
}

/// Every subtour row `x(delta+(S)) >= 1` holds.
pub fn subtour_feasible(x: &HalfPoint) -> bool {
    let n = x.n();
    let out: Vec<[u16; 2]> = split_masks(x);
    proper_subsets(n).all(|s| fast_cut(&out, s, n) >= 2)
}

/// Per-node out-masks of half arcs and of unit arcs.
fn split_masks(x: &HalfPoint) -> Vec<[u16; 2]> {
    let n = x.n();
    (0..n)
        .map(|u| {
            let mut m = [0u16; 2];
            for v in 0..n {
                if u != v {
                    match x.halves_at(Arc::new(u as NodeId, v as NodeId)) {
                        1 => m[0] |= 1 << v,
                        2 => m[1] |= 1 << v,
                        _ => {}
                    }
                }
            }
            m
        })
        .collect()
}

#[inline]
fn fast_cut(out: &[[u16; 2]], s: SubsetMask, n: usize) -> u32 {
    let outside = !s & ((1u32 << n) - 1) as u16;
    let mut total = 0;
    let mut m = s;
    while m != 0 {
        let u = m.trailing_zeros() as usize;
        m &= m - 1;
        total += (out[u][0] & outside).count_ones() + 2 * (out[u][1] & outside).count_ones();
    }
    total
}

/// Every subset whose out-cut equals one, ascending by mask, with the two
/// arcs crossing it.
pub fn active_subtour_pairs(x: &HalfPoint) -> Result<Vec<(SubsetMask, ProjectedPair)>> {
    if !x.is_pure() {
        return Err(Error::Precondition("active pairs need a pure point".into()));
    }
    let n = x.n();
    let out = split_masks(x);
    let mut pairs = Vec::new();
    for s in proper_subsets(n) {
        let cut = fast_cut(&out, s, n);
        if cut < 2 {
            return Err(Error::Precondition(format!("subtour row violated for mask {s:#x}")));
        }
        if cut != 2 {
            continue;
        }
        let outside = !s & ((1u32 << n) - 1) as u16;
        let mut crossing = Vec::with_capacity(2);
        for u in 0..n {
            if s & (1 << u) != 0 {
                let mut m = out[u][0] & outside;
                while m != 0 {
                    let v = m.trailing_zeros();
                    m &= m - 1;
                    crossing.push(Arc::new(u as NodeId, v as NodeId));
                }
            }
        }
        debug_assert_eq!(crossing.len(), 2);
        pairs.push((s, ProjectedPair { e1: crossing[0], e2: crossing[1] }));
    }
    Ok(pairs)
}

/// Circuit partition of a pure point's support with merge bookkeeping.
///
/// Every support arc keeps its initial label `2k + side`; merges only touch
/// the union-find over labels, the dual links and the shorted flags.
#[derive(Debug, Clone)]
pub struct CircuitState {
    n: usize,
    label: Vec<u32>,
    parent: Vec<u32>,
    dual: Vec<u32>,
    shorted: Vec<bool>,
    c: usize,
}

/// Alternating out-sibling / in-sibling walk over the support of `x`.
pub fn circuit_partition(x: &HalfPoint) -> Result<CircuitState> {
    if !x.is_pure() {
        return Err(Error::Precondition("circuit partition needs a pure point".into()));
    }
    let n = x.n();
    let m = arc_count(n);
    let mut label = vec![u32::MAX; m];
    let out_sibling = |a: Arc| -> Arc {
        let mask = x.out_mask(a.tail) & !(1 << a.head);
        Arc::new(a.tail, mask.trailing_zeros() as NodeId)
    };
    let in_sibling = |a: Arc| -> Arc {
        let w = (0..n as NodeId)
            .find(|&u| u != a.tail && u != a.head && x.halves_at(Arc::new(u, a.head)) > 0)
            .expect("in-degree two");
        Arc::new(w, a.head)
    };
    let mut k = 0u32;
    for start in x.support_arcs() {
        if label[start.id(n)] != u32::MAX {
            continue;
        }
        let mut a = start;
        loop {
            label[a.id(n)] = 2 * k;
            let b = out_sibling(a);
            label[b.id(n)] = 2 * k + 1;
            a = in_sibling(b);
            if a == start {
                break;
            }
        }
        k += 1;
    }
    let labels = 2 * k as usize;
    Ok(CircuitState {
        n,
        label,
        parent: (0..labels as u32).collect(),
        dual: (0..labels as u32).map(|l| l ^ 1).collect(),
        shorted: vec![false; labels],
        c: k as usize,
    })
}

impl CircuitState {
    /// Number of non-shorted circuit pairs.
    pub fn c(&self) -> usize {
        self.c
    }

    /// Initial `(circuit id, side)` of a support arc.
    pub fn initial_label(&self, a: Arc) -> Option<(usize, u8)> {
        let l = self.label[a.id(self.n)];
        (l != u32::MAX).then_some(((l / 2) as usize, (l % 2) as u8))
    }

    fn find(&mut self, mut l: u32) -> u32 {
        while self.parent[l as usize] != l {
            let p = self.parent[l as usize];
            self.parent[l as usize] = self.parent[p as usize];
            l = p;
        }
        l
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a as usize] = b;
        }
        b
    }

    /// Current circuit of a support arc, as a representative label.
    pub fn circuit_of(&mut self, a: Arc) -> u32 {
        let l = self.label[a.id(self.n)];
        assert!(l != u32::MAX, "arc {a} is not in the support");
        self.find(l)
    }

    pub fn dual_of(&mut self, circuit: u32) -> u32 {
        let r = self.find(circuit);
        let d = self.dual[r as usize];
        self.find(d)
    }

    pub fn is_shorted(&mut self, circuit: u32) -> bool {
        let r = self.find(circuit);
        self.shorted[r as usize]
    }

    /// Folds the projected row `<e1 | e2>` into the partition.
    pub fn merge_step(&mut self, p: ProjectedPair) {
        let l1 = self.circuit_of(p.e1);
        let l2 = self.circuit_of(p.e2);
        let d1 = self.dual_of(l1);
        let d2 = self.dual_of(l2);
        if l2 == d1 {
            return;
        }
        let (s1, s2) = (self.shorted[l1 as usize], self.shorted[l2 as usize]);
        if l1 == l2 || s1 || s2 {
            self.union(l1, d1);
            self.union(l1, l2);
            let r = self.union(l1, d2);
            self.shorted[r as usize] = true;
            self.dual[r as usize] = r;
            if !(s1 && s2) {
                self.c -= 1;
            }
        } else {
            let a = self.union(l1, d2);
            let b = self.union(d1, l2);
            self.dual[a as usize] = b;
            self.dual[b as usize] = a;
            self.shorted[a as usize] = false;
            self.shorted[b as usize] = false;
            self.c -= 1;
        }
        #[cfg(debug_assertions)]
        {
            let c = self.c;
            debug_assert_eq!(c, self.recount());
        }
    }

    /// Non-shorted pairs counted from the union-find roots.
    pub fn recount(&mut self) -> usize {
        let mut open = 0;
        for l in 0..self.parent.len() as u32 {
            if self.find(l) == l && !self.shorted[l as usize] {
                open += 1;
            }
        }
        open / 2
    }
}

/// Circuit extremality test for a subtour-feasible pure point.
pub fn is_extreme_circuit(x: &HalfPoint) -> Result<bool> {
    let mut st = circuit_partition(x)?;
    if st.c() == 0 {
        return Ok(true);
    }
    for (_, p) in active_subtour_pairs(x)? {
        st.merge_step(p);
        if st.c() == 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Exact rank of a rational matrix given by rows.
pub fn rational_rank(rows: impl IntoIterator<Item = Vec<Rational>>) -> usize {
    let mut basis = RowBasis::default();
    for r in rows {
        basis.insert(r);
    }
    basis.rank()
}

/// Incrementally reduced rows, each with a unit pivot cleared in the others'
/// pivot columns below it.
#[derive(Default)]
struct RowBasis {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowBasis {
    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, mut r: Vec<Rational>) -> bool {
        for (pc, b) in &self.rows {
            if r[*pc].is_zero() {
                continue;
            }
            let f = r[*pc].clone();
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    r[j].sub_mul(&f, bj);
                }
            }
        }
        let Some(pc) = r.iter().position(|v| !v.is_zero()) else {
            return false;
        };
        let inv = r[pc].recip();
        for v in r.iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        self.rows.push((pc, r));
        true
    }
}

/// Rows of the subtour polytope's constraints tight at `values`: degree
/// equations, subtour rows with cut exactly one, and zero bounds.
pub fn active_rows(n: usize, values: &[Rational]) -> Vec<Vec<Rational>> {
    let m = arc_count(n);
    let mut rows = Vec::new();
    for id in 0..m {
        if values[id].is_zero() {
            let mut r = vec![Rational::zero(); m];
            r[id] = Rational::one();
            rows.push(r);
        }
    }
    for w in 0..n as NodeId {
        let mut out = vec![Rational::zero(); m];
        let mut inn = vec![Rational::zero(); m];
        for v in 0..n as NodeId {
            if v != w {
                out[Arc::new(w, v).id(n)] = Rational::one();
                inn[Arc::new(v, w).id(n)] = Rational::one();
            }
        }
        rows.push(out);
        rows.push(inn);
    }
    let one = Rational::one();
    for s in proper_subsets(n) {
        let mut r = vec![Rational::zero(); m];
        let mut cut = Rational::zero();
        for u in 0..n {
            for v in 0..n {
                if s & (1 << u) != 0 && s & (1 << v) == 0 {
                    let id = Arc::new(u as NodeId, v as NodeId).id(n);
                    r[id] = Rational::one();
                    cut += &values[id];
                }
            }
        }
        if cut == one {
            rows.push(r);
        }
    }
    rows
}

/// Whether a feasible point is a basic solution: its tight constraints
/// have full rank `n(n-1)`.
pub fn is_basic_point(n: usize, values: &[Rational]) -> bool {
    let m = arc_count(n);
    let mut basis = RowBasis::default();
    for r in active_rows(n, values) {
        basis.insert(r);
        if basis.rank() == m {
            return true;
        }
    }
    false
}

/// Extremality by exact rank of all tight constraints.
pub fn extremality_rank_oracle(x: &HalfPoint) -> bool {
    is_basic_point(x.n(), &x.values())
}

/// Subtour feasibility for an arbitrary rational point satisfying the
/// degree equations.
pub fn subtour_feasible_values(n: usize, values: &[Rational]) -> bool {
    let one = Rational::one();
    proper_subsets(n).all(|s| {
        let mut cut = Rational::zero();
        for u in 0..n {
            for v in 0..n {
                if s & (1 << u) != 0 && s & (1 << v) == 0 {
                    cut += &values[Arc::new(u as NodeId, v as NodeId).id(n)];
                }
            }
        }
        cut >= one
    })
}

/// Out-cut of `s` as a rational.
pub fn cut_value(x: &HalfPoint, s: SubsetMask) -> Rational {
    Rational::new(cut_halves(x, s) as i64, 2)
}
