//! Arcs of the complete digraph, cycle covers and half-integer points.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::canon::Certificate;
use crate::encoding::CoverPairEncoding;
use crate::rational::Rational;
use crate::{Error, Result};

/// Largest supported node count; node subsets fit in a `u16`.
pub const MAX_NODES: usize = 16;

/// Node label in `[0, n)`.
pub type NodeId = u8;

pub fn check_node_count(n: usize) -> Result<()> {
    if (2..=MAX_NODES).contains(&n) {
        Ok(())
    } else {
        Err(Error::NodeCount(n))
    }
}

/// Number of arcs of the loopless complete digraph on `n` nodes.
pub const fn arc_count(n: usize) -> usize {
    n * (n - 1)
}

/// A directed arc `tail -> head`, never a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
}

impl Arc {
    pub fn new(tail: NodeId, head: NodeId) -> Self {
        debug_assert!(tail != head, "self-loop {tail}->{head}");
        Arc { tail, head }
    }

    /// Dense index in `[0, n(n-1))`, row-major with the diagonal skipped.
    #[inline]
    pub fn id(self, n: usize) -> usize {
        let (t, h) = (self.tail as usize, self.head as usize);
        t * (n - 1) + if h < t { h } else { h - 1 }
    }

    #[inline]
    pub fn from_id(id: usize, n: usize) -> Arc {
        let t = id / (n - 1);
        let r = id % (n - 1);
        let h = if r < t { r } else { r + 1 };
        Arc::new(t as NodeId, h as NodeId)
    }
}

impl core::fmt::Display for Arc {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}->{}", self.tail, self.head)
    }
}

/// A spanning set of vertex-disjoint directed cycles, each of length at
/// least two, stored as its successor permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleCover {
    succ: Vec<NodeId>,
}

impl CycleCover {
    /// Validates that `succ` is a fixed-point-free permutation.
    pub fn from_successors(succ: Vec<NodeId>) -> Result<Self> {
        let n = succ.len();
        check_node_count(n)?;
        let mut seen = 0u32;
        for (u, &v) in succ.iter().enumerate() {
            if v as usize >= n {
                return Err(Error::InvalidEncoding(format!("successor {v} of {u} out of range")));
            }
            if v as usize == u {
                return Err(Error::InvalidEncoding(format!("node {u} is a fixed point")));
            }
            if seen & (1 << v) != 0 {
                return Err(Error::InvalidEncoding(format!("node {v} has in-degree 2")));
            }
            seen |= 1 << v;
        }
        Ok(CycleCover { succ })
    }

    pub fn n(&self) -> usize {
        self.succ.len()
    }

    #[inline]
    pub fn successor(&self, u: NodeId) -> NodeId {
        self.succ[u as usize]
    }

    pub fn successors(&self) -> &[NodeId] {
        &self.succ
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.succ.iter().enumerate().map(|(u, &v)| Arc::new(u as NodeId, v))
    }

    /// Cycles in order of their smallest node, each starting at that node.
    pub fn cycles(&self) -> Vec<Vec<NodeId>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut u = start;
            while !seen[u] {
                seen[u] = true;
                cyc.push(u as NodeId);
                u = self.succ[u] as usize;
            }
            out.push(cyc);
        }
        out
    }

    pub fn is_arc_disjoint(&self, other: &CycleCover) -> bool {
        self.succ.iter().zip(&other.succ).all(|(a, b)| a != b)
    }

    /// The cover obtained by renaming every node `u` to `sigma[u]`.
    pub fn relabeled(&self, sigma: &[NodeId]) -> CycleCover {
        let mut succ = vec![0; self.n()];
        for (u, &v) in self.succ.iter().enumerate() {
            succ[sigma[u] as usize] = sigma[v as usize];
        }
        CycleCover { succ }
    }
}

/// A point of the degree polytope with every coordinate in `{0, 1/2, 1}`.
///
/// Values are held as exact half-units (`0`, `1`, `2`); [`HalfPoint::value`]
/// exposes them as rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfPoint {
    n: usize,
    halves: Vec<u8>,
}

impl HalfPoint {
    /// Builds a point from per-arc half-units, checking entries and both
    /// degree equations.
    pub fn from_halves(n: usize, halves: Vec<u8>) -> Result<Self> {
        check_node_count(n)?;
        if halves.len() != arc_count(n) {
            return Err(Error::Precondition(format!(
                "expected {} arc values, got {}",
                arc_count(n),
                halves.len()
            )));
        }
        if let Some(bad) = halves.iter().find(|&&h| h > 2) {
            return Err(Error::Precondition(format!("entry {bad}/2 exceeds 1")));
        }
        let point = HalfPoint { n, halves };
        for w in 0..n as NodeId {
            let out: u32 = (0..n as NodeId).filter(|&v| v != w).map(|v| point.halves_at(Arc::new(w, v)) as u32).sum();
            let inn: u32 = (0..n as NodeId).filter(|&u| u != w).map(|u| point.halves_at(Arc::new(u, w)) as u32).sum();
            if out != 2 || inn != 2 {
                return Err(Error::Precondition(format!("degree constraint violated at node {w}")));
            }
        }
        Ok(point)
    }

    /// Builds a point from rational arc values in `{0, 1/2, 1}`.
    pub fn from_values(n: usize, values: &[Rational]) -> Result<Self> {
        let half = Rational::half();
        let halves = values
            .iter()
            .map(|v| {
                if v.is_zero() {
                    Ok(0)
                } else if *v == half {
                    Ok(1)
                } else if v.is_one() {
                    Ok(2)
                } else {
                    Err(Error::Precondition(format!("entry {v} not in {{0, 1/2, 1}}")))
                }
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_halves(n, halves)
    }

    /// The pure point whose support is exactly `arcs`, each at one half.
    pub fn from_half_arcs(n: usize, arcs: &[Arc]) -> Result<Self> {
        check_node_count(n)?;
        let mut halves = vec![0u8; arc_count(n)];
        for a in arcs {
            if a.tail == a.head || a.tail as usize >= n || a.head as usize >= n {
                return Err(Error::Precondition(format!("arc {a} invalid for n = {n}")));
            }
            halves[a.id(n)] += 1;
        }
        Self::from_halves(n, halves)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn halves(&self) -> &[u8] {
        &self.halves
    }

    #[inline]
    pub fn halves_at(&self, a: Arc) -> u8 {
        self.halves[a.id(self.n)]
    }

    pub fn value(&self, arc_id: usize) -> Rational {
        Rational::new(self.halves[arc_id] as i64, 2)
    }

    pub fn values(&self) -> Vec<Rational> {
        (0..self.halves.len()).map(|i| self.value(i)).collect()
    }

    /// No coordinate equals one.
    pub fn is_pure(&self) -> bool {
        self.halves.iter().all(|&h| h < 2)
    }

    /// Bitmask of heads `v` with a positive value on `u -> v`.
    pub fn out_mask(&self, u: NodeId) -> u16 {
        let mut m = 0u16;
        for v in 0..self.n as NodeId {
            if v != u && self.halves_at(Arc::new(u, v)) > 0 {
                m |= 1 << v;
            }
        }
        m
    }

    pub fn support_arcs(&self) -> Vec<Arc> {
        self.halves
            .iter()
            .enumerate()
            .filter(|(_, &h)| h > 0)
            .map(|(i, _)| Arc::from_id(i, self.n))
            .collect()
    }

    /// Relabels nodes by `sigma` (node `u` becomes `sigma[u]`).
    pub fn relabeled(&self, sigma: &[NodeId]) -> HalfPoint {
        let n = self.n;
        let mut halves = vec![0u8; arc_count(n)];
        for (i, &h) in self.halves.iter().enumerate() {
            let a = Arc::from_id(i, n);
            halves[Arc::new(sigma[a.tail as usize], sigma[a.head as usize]).id(n)] = h;
        }
        HalfPoint { n, halves }
    }
}

/// `(y1 + y2) / 2`; pure exactly when the covers share no arc.
pub fn combine_covers(y1: &CycleCover, y2: &CycleCover) -> HalfPoint {
    assert_eq!(y1.n(), y2.n(), "covers on different node counts");
    let n = y1.n();
    let mut halves = vec![0u8; arc_count(n)];
    for a in y1.arcs().chain(y2.arcs()) {
        halves[a.id(n)] += 1;
    }
    HalfPoint { n, halves }
}

/// Arcs carrying a positive value, in arc-id order.
pub fn support(x: &HalfPoint) -> Vec<Arc> {
    x.support_arcs()
}

/// Outcome of the property checks for one isomorphism class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexStatus {
    Candidate,
    Infeasible,
    NonExtreme,
    Vertex,
}

impl VertexStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexStatus::Candidate => "candidate",
            VertexStatus::Infeasible => "infeasible",
            VertexStatus::NonExtreme => "non_extreme",
            VertexStatus::Vertex => "vertex",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "candidate" => VertexStatus::Candidate,
            "infeasible" => VertexStatus::Infeasible,
            "non_extreme" => VertexStatus::NonExtreme,
            "vertex" => VertexStatus::Vertex,
            _ => return None,
        })
    }
}

/// One row of pipeline output. `gap` is set iff `status` is `Vertex`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRecord {
    pub n: usize,
    pub pair: CoverPairEncoding,
    pub certificate: Certificate,
    pub status: VertexStatus,
    pub gap: Option<Rational>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::CoverEncoding;
    use crate::testutil;
    use proptest::prelude::*;

    fn cover(s: &str) -> CycleCover {
        s.parse::<CoverEncoding>().unwrap().decode()
    }

    #[test]
    fn arc_id_is_a_bijection() {
        for n in 2..=MAX_NODES {
            for id in 0..arc_count(n) {
                let a = Arc::from_id(id, n);
                assert_ne!(a.tail, a.head);
                assert_eq!(a.id(n), id);
            }
        }
    }

    #[test]
    fn fig4_pair_combines_to_eighteen_halves() {
        let x = combine_covers(&cover("[0 1 2 3 4|5 6|7 8]"), &cover("[0 4 5 2 7|1 8|3 6]"));
        assert!(x.is_pure());
        assert_eq!(support(&x).len(), 18);
        assert!(x.halves().iter().all(|&h| h <= 1));
    }

    #[test]
    fn identical_covers_give_integral_point() {
        let y = cover("[0 1 2 3]");
        let x = combine_covers(&y, &y);
        assert!(!x.is_pure());
        let s = support(&x);
        assert_eq!(s, [Arc::new(0, 1), Arc::new(1, 2), Arc::new(2, 3), Arc::new(3, 0)]);
        assert!(s.iter().all(|&a| x.value(a.id(4)) == Rational::one()));
    }

    #[test]
    fn opposite_four_cycles_give_bidirected_square() {
        let x = combine_covers(&cover("[0 1 2 3]"), &cover("[0 3 2 1]"));
        assert!(x.is_pure());
        let n = 4;
        for w in 0..n as NodeId {
            let out: Rational = (0..n as NodeId).filter(|&v| v != w).map(|v| x.value(Arc::new(w, v).id(n))).sum();
            let inn: Rational = (0..n as NodeId).filter(|&u| u != w).map(|u| x.value(Arc::new(u, w).id(n))).sum();
            assert_eq!(out, Rational::one());
            assert_eq!(inn, Rational::one());
        }
        assert_eq!(support(&x).len(), 8);
    }

    #[test]
    fn fig5b_support() {
        let x = combine_covers(&cover("[0 1 2 3|4 5]"), &cover("[0 4 2 5|1 3]"));
        let mut got: Vec<(u8, u8)> = support(&x).iter().map(|a| (a.tail, a.head)).collect();
        got.sort();
        let mut want = vec![(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 4), (0, 4), (4, 2), (2, 5), (5, 0), (1, 3), (3, 1)];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(HalfPoint::from_halves(3, vec![1; 6]).is_ok());
        assert!(HalfPoint::from_halves(3, vec![2, 0, 0, 2, 2, 0]).is_ok());
        assert!(HalfPoint::from_halves(3, vec![1, 0, 0, 1, 1, 0]).is_err());
        assert!(HalfPoint::from_halves(3, vec![3, 0, 0, 0, 0, 0]).is_err());
        assert!(HalfPoint::from_values(3, &vec![Rational::new(1, 3); 6]).is_err());
        assert!(CycleCover::from_successors(vec![0, 1]).is_err());
        assert!(CycleCover::from_successors(vec![1, 1]).is_err());
    }

    proptest! {
        #[test]
        fn combined_degrees_are_exact(n in 4usize..=10, seed in any::<u64>()) {
            let mut rng = testutil::rng(seed);
            let y1 = testutil::random_cover(n, &mut rng);
            let y2 = testutil::random_cover(n, &mut rng);
            let x = combine_covers(&y1, &y2);
            prop_assert!(HalfPoint::from_halves(x.n(), x.halves().to_vec()).is_ok());
            let pure = y1.is_arc_disjoint(&y2);
            prop_assert_eq!(x.is_pure(), pure);
            if pure {
                prop_assert_eq!(support(&x).len(), 2 * x.n());
            }
        }
    }
}
