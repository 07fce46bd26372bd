//! Candidate generation: every pair of arc-disjoint cycle covers whose first
//! cover is the identity layout of its partition.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::encoding::{CoverEncoding, CoverPairEncoding};
use crate::model::{check_node_count, NodeId};
use crate::{Error, Result};

/// An integer partition of `n` with every part at least two.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionSpec {
    parts: Vec<u8>,
}

impl PartitionSpec {
    pub fn new(parts: Vec<u8>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Empty);
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.iter().any(|&p| p < 2) {
            return Err(Error::InvalidEncoding(format!("{parts:?} is not a partition into parts >= 2")));
        }
        Ok(PartitionSpec { parts })
    }

    pub fn parts(&self) -> &[u8] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    pub fn identity_layout(&self) -> CoverEncoding {
        CoverEncoding::identity_layout(&self.parts).expect("partition sums to a valid n")
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// Partitions of `n` into parts `>= 2`, in descending lexicographic order.
pub fn partitions_of(n: usize) -> Result<Vec<PartitionSpec>> {
    if n < 2 {
        return Err(Error::NodeCount(n));
    }
    fn rec(rest: usize, max: usize, cur: &mut Vec<u8>, out: &mut Vec<PartitionSpec>) {
        if rest == 0 {
            out.push(PartitionSpec { parts: cur.clone() });
            return;
        }
        for p in (2..=max.min(rest)).rev() {
            if rest - p == 1 {
                continue;
            }
            cur.push(p as u8);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Calls `emit` with the flat labels of every normalized cover of partition
/// `mu` that shares no arc with the cover given by `succ1`.
pub fn for_each_disjoint_cover(succ1: &[NodeId], mu: &[u8], mut emit: impl FnMut(&[NodeId])) {
    let n = succ1.len();
    let mut g = Gen { succ1, mu, n, flat: vec![0; n], emit: &mut emit };
    g.open_cycle(0, 0, 0);
}

struct Gen<'a, F: FnMut(&[NodeId])> {
    succ1: &'a [NodeId],
    mu: &'a [u8],
    n: usize,
    flat: Vec<NodeId>,
    emit: &'a mut F,
}

impl<F: FnMut(&[NodeId])> Gen<'_, F> {
    fn open_cycle(&mut self, j: usize, pos: usize, used: u32) {
        if j == self.mu.len() {
            (self.emit)(&self.flat);
            return;
        }
        let p = self.mu[j] as usize;
        let lower = if j > 0 && self.mu[j - 1] as usize == p {
            self.flat[pos - p] as usize + 1
        } else {
            0
        };
        for k in lower..self.n {
            if used & (1 << k) != 0 {
                continue;
            }
            // the cycle's remaining members must all exceed its first element
            let free_above = (!used & ((1u32 << self.n) - 1)) >> (k + 1);
            if (free_above.count_ones() as usize) < p - 1 {
                break;
            }
            self.flat[pos] = k as NodeId;
            self.extend(j, pos, 1, used | (1 << k));
        }
    }

    fn extend(&mut self, j: usize, start: usize, len: usize, used: u32) {
        let p = self.mu[j] as usize;
        let first = self.flat[start];
        let last = self.flat[start + len - 1];
        if len == p {
            if self.succ1[last as usize] != first {
                self.open_cycle(j + 1, start + p, used);
            }
            return;
        }
        for v in first as usize + 1..self.n {
            if used & (1 << v) != 0 || self.succ1[last as usize] as usize == v {
                continue;
            }
            self.flat[start + len] = v as NodeId;
            self.extend(j, start, len + 1, used | (1 << v));
        }
    }
}

/// All candidates whose covers have partitions `lambda` and `mu`, in
/// generation order.
pub fn candidates_for(lambda: &PartitionSpec, mu: &PartitionSpec) -> Vec<CoverPairEncoding> {
    let first = lambda.identity_layout();
    let succ1 = first.decode();
    let mut out = Vec::new();
    if mu > lambda {
        // larger second partitions violate the pair ordering
        return out;
    }
    for_each_disjoint_cover(succ1.successors(), mu.parts(), |flat| {
        let mut cycles = Vec::with_capacity(mu.parts().len());
        let mut start = 0;
        for &p in mu.parts() {
            cycles.push(&flat[start..start + p as usize]);
            start += p as usize;
        }
        let second = CoverEncoding::from_cycles(&cycles).expect("generator emits normalized covers");
        out.push(CoverPairEncoding::new(first.clone(), second).expect("identity layout sorts first"));
    });
    out
}

/// Resumable position in the candidate sequence: the index of the first
/// cover's partition and how many of its candidates were already consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Cursor {
    pub partition_index: usize,
    pub consumed: usize,
}

/// Deterministic stream of all candidates for one `n`.
///
/// Candidates are grouped by the first cover's partition; within a group
/// the second partitions run in descending order.
pub struct CandidateStream {
    n: usize,
    partitions: Vec<PartitionSpec>,
    cursor: Cursor,
    buffer: Vec<CoverPairEncoding>,
    buffered_for: Option<usize>,
}

impl CandidateStream {
    pub fn new(n: usize) -> Result<Self> {
        Self::resume(n, Cursor::default())
    }

    pub fn resume(n: usize, cursor: Cursor) -> Result<Self> {
        check_node_count(n)?;
        if n < 4 {
            return Err(Error::NodeCount(n));
        }
        Ok(CandidateStream {
            n,
            partitions: partitions_of(n)?,
            cursor,
            buffer: Vec::new(),
            buffered_for: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cursor(&self) -> Cursor {
        self.cursor
    }

    pub fn partitions(&self) -> &[PartitionSpec] {
        &self.partitions
    }

    /// Second-cover partitions paired with the first partition at `index`.
    pub fn work_units(&self, index: usize) -> impl Iterator<Item = (&PartitionSpec, &PartitionSpec)> + '_ {
        let lambda = &self.partitions[index];
        self.partitions[index..].iter().map(move |mu| (lambda, mu))
    }

    /// Every candidate whose first partition is the one at `index`.
    pub fn group(&self, index: usize) -> Vec<CoverPairEncoding> {
        self.work_units(index).flat_map(|(l, m)| candidates_for(l, m)).collect()
    }
}

impl Iterator for CandidateStream {
    type Item = CoverPairEncoding;

    fn next(&mut self) -> Option<CoverPairEncoding> {
        loop {
            let idx = self.cursor.partition_index;
            if idx >= self.partitions.len() {
                return None;
            }
            if self.buffered_for != Some(idx) {
                let mut group = self.group(idx);
                group.reverse();
                let skip = self.cursor.consumed.min(group.len());
                group.truncate(group.len() - skip);
                self.buffer = group;
                self.buffered_for = Some(idx);
            }
            if let Some(p) = self.buffer.pop() {
                self.cursor.consumed += 1;
                return Some(p);
            }
            self.cursor = Cursor { partition_index: idx + 1, consumed: 0 };
        }
    }
}

/// All candidates for `n` in stream order.
pub fn enumerate_candidates(n: usize) -> Result<CandidateStream> {
    CandidateStream::new(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::encode_cover;
    use crate::model::CycleCover;
    use alloc::collections::BTreeSet;
    use alloc::string::{String, ToString};

    fn parts(n: usize) -> Vec<Vec<u8>> {
        partitions_of(n).unwrap().into_iter().map(|p| p.parts).collect()
    }

    #[test]
    fn small_partitions() {
        assert_eq!(parts(4), vec![vec![4], vec![2, 2]]);
        assert_eq!(parts(6), vec![vec![6], vec![4, 2], vec![3, 3], vec![2, 2, 2]]);
        assert!(partitions_of(1).is_err());
    }

    fn brute_partitions(n: usize) -> Vec<Vec<u8>> {
        // every multiset of parts >= 2 as a descending list, via compositions
        let mut all = BTreeSet::new();
        for mask in 0u32..(1 << (n - 1)) {
            let mut cur = Vec::new();
            let mut len = 1u8;
            for i in 0..n - 1 {
                if mask & (1 << i) != 0 {
                    cur.push(len);
                    len = 1;
                } else {
                    len += 1;
                }
            }
            cur.push(len);
            if cur.iter().all(|&p| p >= 2) {
                cur.sort_unstable_by(|a, b| b.cmp(a));
                all.insert(cur);
            }
        }
        all.into_iter().rev().collect()
    }

    #[test]
    fn partitions_match_brute_force() {
        for n in 2..=14 {
            assert_eq!(parts(n), brute_partitions(n), "n = {n}");
        }
        assert_eq!(
            parts(9),
            vec![
                vec![9],
                vec![7, 2],
                vec![6, 3],
                vec![5, 4],
                vec![5, 2, 2],
                vec![4, 3, 2],
                vec![3, 3, 3],
                vec![3, 2, 2, 2]
            ]
        );
    }

    #[test]
    fn identity_layouts() {
        let show = |v: Vec<u8>| PartitionSpec::new(v).unwrap().identity_layout().to_string();
        assert_eq!(show(vec![4, 2]), "[0 1 2 3|4 5]");
        assert_eq!(show(vec![7]), "[0 1 2 3 4 5 6]");
        assert_eq!(show(vec![2, 2, 2]), "[0 1|2 3|4 5]");
        assert!(PartitionSpec::new(vec![2, 3]).is_err());
    }

    #[test]
    fn four_node_candidates() {
        let got: Vec<String> = enumerate_candidates(4).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(
            got,
            vec!["[0 1 2 3],[0 3 2 1]", "[0 1 2 3],[0 2|1 3]", "[0 1|2 3],[0 2|1 3]", "[0 1|2 3],[0 3|1 2]"]
        );
    }

    fn all_covers(n: usize) -> Vec<CycleCover> {
        let mut out = Vec::new();
        let mut perm: Vec<NodeId> = (0..n as NodeId).collect();
        loop {
            if let Ok(c) = CycleCover::from_successors(perm.clone()) {
                out.push(c);
            }
            let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        out
    }

    fn brute_candidates(n: usize) -> BTreeSet<CoverPairEncoding> {
        let covers = all_covers(n);
        let mut out = BTreeSet::new();
        for a in &covers {
            let ea = encode_cover(a);
            if !ea.is_identity_layout() {
                continue;
            }
            for b in &covers {
                let eb = encode_cover(b);
                if a.is_arc_disjoint(b) && ea <= eb {
                    out.insert(CoverPairEncoding::new(ea.clone(), eb).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn stream_matches_brute_force() {
        for n in 4..=7 {
            let got: Vec<_> = enumerate_candidates(n).unwrap().collect();
            let set: BTreeSet<_> = got.iter().cloned().collect();
            assert_eq!(set.len(), got.len(), "duplicates at n = {n}");
            assert_eq!(set, brute_candidates(n), "n = {n}");
        }
    }

    #[test]
    fn every_candidate_is_well_formed() {
        for p in enumerate_candidates(8).unwrap() {
            assert!(p.is_standard());
            assert!(p.first().partition() >= p.second().partition());
            let (a, b) = p.covers();
            assert!(a.is_arc_disjoint(&b));
        }
    }

    #[test]
    fn five_node_second_partitions() {
        let seen: BTreeSet<Vec<u8>> = enumerate_candidates(5)
            .unwrap()
            .filter(|p| p.first().partition() == [5])
            .map(|p| p.second().partition().to_vec())
            .collect();
        assert_eq!(seen, [vec![5], vec![3, 2]].into_iter().collect());
    }

    #[test]
    fn resume_is_consistent() {
        let all: Vec<_> = enumerate_candidates(6).unwrap().collect();
        let mut s = enumerate_candidates(6).unwrap();
        let head: Vec<_> = s.by_ref().take(37).collect();
        let cursor = s.cursor();
        let tail: Vec<_> = CandidateStream::resume(6, cursor).unwrap().collect();
        assert_eq!([head, tail].concat(), all);
        let again: Vec<_> = enumerate_candidates(6).unwrap().collect();
        assert_eq!(again, all);
    }
}
