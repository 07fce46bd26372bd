//! Slow reference implementations used by `verify` and the test suites.
//!
//! None of these go through canonical labeling or the circuit test: points
//! come from every out-degree-two support, isomorphism is decided by trying
//! all node permutations, and extremality is a rank computation.

use std::collections::HashSet;

use halfgap_core::model::{Arc, CycleCover, HalfPoint, NodeId};
use halfgap_core::polytope::{decompose_half_point, extremality_rank_oracle, subtour_feasible_values};
use halfgap_core::{combine_covers, Result};
use itertools::Itertools;

/// Largest `n` the permutation oracle accepts; supports are packed in a u64.
pub const MAX_ORACLE_NODES: usize = 8;

/// Class counts from the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    /// Pure half-integer points satisfying the degree equations.
    pub points: usize,
    /// Isomorphism classes among them.
    pub classes: usize,
    pub feasible_classes: usize,
    pub vertex_classes: usize,
}

fn pack(n: usize, out: &[u16]) -> u64 {
    let mut key = 0u64;
    for (u, &m) in out.iter().enumerate() {
        key |= (m as u64) << (u * n);
    }
    key
}

fn relabel(out: &[u16], sigma: &[usize]) -> Vec<u16> {
    let mut r = vec![0u16; out.len()];
    for (u, &m) in out.iter().enumerate() {
        for v in 0..out.len() {
            if m & (1 << v) != 0 {
                r[sigma[u]] |= 1 << sigma[v];
            }
        }
    }
    r
}

/// Every digraph on `n` nodes with all in- and out-degrees equal to two,
/// as out-neighbour masks.
pub fn two_regular_supports(n: usize) -> Vec<Vec<u16>> {
    fn rec(u: usize, n: usize, out: &mut Vec<u16>, indeg: &mut [u8], acc: &mut Vec<Vec<u16>>) {
        if u == n {
            acc.push(out.clone());
            return;
        }
        let heads: Vec<usize> = (0..n).filter(|&v| v != u && indeg[v] < 2).collect();
        for pair in heads.into_iter().combinations(2) {
            let (v, w) = (pair[0], pair[1]);
            indeg[v] += 1;
            indeg[w] += 1;
            out.push((1 << v) | (1 << w));
            rec(u + 1, n, out, indeg, acc);
            out.pop();
            indeg[v] -= 1;
            indeg[w] -= 1;
        }
    }
    let mut acc = Vec::new();
    rec(0, n, &mut Vec::with_capacity(n), &mut vec![0; n], &mut acc);
    acc
}

pub fn point_of_support(n: usize, out: &[u16]) -> HalfPoint {
    let arcs: Vec<Arc> = out
        .iter()
        .enumerate()
        .flat_map(|(u, &m)| (0..n).filter(move |&v| m & (1 << v) != 0).map(move |v| Arc::new(u as NodeId, v as NodeId)))
        .collect();
    HalfPoint::from_half_arcs(n, &arcs).expect("two-regular support")
}

/// One representative per isomorphism class of two-regular supports.
pub fn support_classes(n: usize) -> (usize, Vec<Vec<u16>>) {
    assert!((2..=MAX_ORACLE_NODES).contains(&n), "oracle supports n <= {MAX_ORACLE_NODES}");
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let supports = two_regular_supports(n);
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    for out in &supports {
        if seen.contains(&pack(n, out)) {
            continue;
        }
        for sigma in &perms {
            seen.insert(pack(n, &relabel(out, sigma)));
        }
        reps.push(out.clone());
    }
    (supports.len(), reps)
}

/// Exhaustive census of pure half-integer points for `n`.
pub fn census(n: usize) -> Census {
    let (points, reps) = support_classes(n);
    let mut feasible_classes = 0;
    let mut vertex_classes = 0;
    for out in &reps {
        let x = point_of_support(n, out);
        if subtour_feasible_values(n, &x.values()) {
            feasible_classes += 1;
            if extremality_rank_oracle(&x) {
                vertex_classes += 1;
            }
        }
    }
    Census { points, classes: reps.len(), feasible_classes, vertex_classes }
}

/// Every cycle cover using only support arcs of `x`.
pub fn support_covers(x: &HalfPoint) -> Vec<CycleCover> {
    let n = x.n();
    let masks: Vec<u16> = (0..n).map(|u| x.out_mask(u as NodeId)).collect();
    masks
        .iter()
        .map(|&m| (0..n as NodeId).filter(move |&v| m & (1 << v) != 0))
        .multi_cartesian_product()
        .filter_map(|succ| CycleCover::from_successors(succ).ok())
        .collect()
}

/// Decomposition into two covers, and for each cover inside the support,
/// that `2x` minus it is again a cover.
pub fn check_cover_decomposition(x: &HalfPoint) -> Result<bool> {
    let (y1, y2) = decompose_half_point(x)?;
    if combine_covers(&y1, &y2) != *x {
        return Ok(false);
    }
    let n = x.n();
    for y in support_covers(x) {
        let rest: Option<Vec<NodeId>> = (0..n as NodeId)
            .map(|u| {
                let m = x.out_mask(u) & !(1 << y.successor(u));
                (m.count_ones() == 1).then(|| m.trailing_zeros() as NodeId)
            })
            .collect();
        let Some(rest) = rest else { return Ok(false) };
        match CycleCover::from_successors(rest) {
            Ok(z) if combine_covers(&y, &z) == *x => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}
