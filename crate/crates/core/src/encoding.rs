//! Bracket encodings of cycle covers and of cover pairs.
//!
//! A cover is written `[0 4 5 7|1 8 2|3 6]`: cycles ordered by decreasing
//! length and then by increasing first label, each cycle starting at its
//! smallest node. A pair is two such encodings joined by a comma, the one
//! with the larger partition first.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::model::{check_node_count, CycleCover, NodeId};
use crate::{Error, Result};

/// Normalized encoding of one cycle cover.
///
/// Labels are stored flat in cycle order next to the cycle lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoverEncoding {
    flat: Vec<NodeId>,
    partition: Vec<u8>,
}

/// Encoding of the cover for `cover`: sort cycles by length descending, then
/// by smallest node, and rotate each to start at its smallest node.
pub fn encode_cover(cover: &CycleCover) -> CoverEncoding {
    // `cycles()` already yields cycles by ascending minimum, each starting there.
    let mut cycles = cover.cycles();
    cycles.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let partition = cycles.iter().map(|c| c.len() as u8).collect();
    let flat = cycles.concat();
    CoverEncoding { flat, partition }
}

fn check_permutation(sigma: &[NodeId], n: usize) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "expected {n} images, got {}",
            sigma.len()
        )));
    }
    let mut seen = 0u32;
    for &s in sigma {
        if s as usize >= n || seen & (1 << s) != 0 {
            return Err(Error::InvalidPermutation(format!("{sigma:?} is not a bijection on [0, {n})")));
        }
        seen |= 1 << s;
    }
    Ok(())
}

impl CoverEncoding {
    /// Builds an encoding from explicit cycles, rejecting anything that is
    /// not already in normalized form.
    pub fn from_cycles<C: AsRef<[NodeId]>>(cycles: &[C]) -> Result<Self> {
        if cycles.is_empty() {
            return Err(Error::Empty);
        }
        let flat: Vec<NodeId> = cycles.iter().flat_map(|c| c.as_ref().iter().copied()).collect();
        let n = flat.len();
        check_node_count(n)?;
        let mut seen = 0u32;
        for &k in &flat {
            if k as usize >= n {
                return Err(Error::InvalidEncoding(format!("label {k} is not below n = {n}")));
            }
            if seen & (1 << k) != 0 {
                return Err(Error::InvalidEncoding(format!("duplicate label {k}")));
            }
            seen |= 1 << k;
        }
        let mut partition = Vec::with_capacity(cycles.len());
        for (j, c) in cycles.iter().enumerate() {
            let c = c.as_ref();
            if c.len() < 2 {
                return Err(Error::InvalidEncoding(format!("cycle {j} has length {}", c.len())));
            }
            if c[1..].iter().any(|&k| k < c[0]) {
                return Err(Error::InvalidEncoding(format!(
                    "requirement 1: cycle {j} does not start at its minimum"
                )));
            }
            partition.push(c.len() as u8);
        }
        for j in 1..cycles.len() {
            let (a, b) = (cycles[j - 1].as_ref(), cycles[j].as_ref());
            if a.len() < b.len() {
                return Err(Error::InvalidEncoding(format!(
                    "cycle {j} is longer than cycle {}",
                    j - 1
                )));
            }
            if a.len() == b.len() && a[0] >= b[0] {
                return Err(Error::InvalidEncoding(format!(
                    "requirement 2: equal-length cycles {} and {j} out of order",
                    j - 1
                )));
            }
        }
        Ok(CoverEncoding { flat, partition })
    }

    /// The cover `[0 .. p1-1 | p1 .. p1+p2-1 | ...]` for a partition.
    pub fn identity_layout(partition: &[u8]) -> Result<Self> {
        let mut cycles = Vec::with_capacity(partition.len());
        let mut start = 0u8;
        for &p in partition {
            cycles.push((start..start.saturating_add(p)).collect::<Vec<_>>());
            start = start.saturating_add(p);
        }
        Self::from_cycles(&cycles)
    }

    pub fn n(&self) -> usize {
        self.flat.len()
    }

    /// Cycle lengths, non-increasing.
    pub fn partition(&self) -> &[u8] {
        &self.partition
    }

    /// All labels in cycle order.
    pub fn flat(&self) -> &[NodeId] {
        &self.flat
    }

    pub fn cycles(&self) -> impl Iterator<Item = &[NodeId]> + '_ {
        let mut start = 0;
        self.partition.iter().map(move |&p| {
            let c = &self.flat[start..start + p as usize];
            start += p as usize;
            c
        })
    }

    pub fn is_identity_layout(&self) -> bool {
        self.flat.iter().enumerate().all(|(i, &k)| i == k as usize)
    }

    pub fn decode(&self) -> CycleCover {
        let mut succ = vec![0; self.n()];
        for c in self.cycles() {
            for (i, &k) in c.iter().enumerate() {
                succ[k as usize] = c[(i + 1) % c.len()];
            }
        }
        CycleCover::from_successors(succ).expect("validated encoding decodes to a cover")
    }

    /// Relabels every node `u` as `sigma[u]` and renormalizes.
    pub fn apply_permutation(&self, sigma: &[NodeId]) -> Result<Self> {
        check_permutation(sigma, self.n())?;
        Ok(encode_cover(&self.decode().relabeled(sigma)))
    }
}

/// Larger partitions sort first; equal partitions compare by flat labels.
impl Ord for CoverEncoding {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .partition
            .cmp(&self.partition)
            .then_with(|| self.flat.cmp(&other.flat))
    }
}

impl PartialOrd for CoverEncoding {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for CoverEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (j, c) in self.cycles().enumerate() {
            if j > 0 {
                f.write_str("|")?;
            }
            for (i, k) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{k}")?;
            }
        }
        f.write_str("]")
    }
}

/// Minimal cursor over the bracket grammar.
struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer { s: s.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(b) if b == c => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(Error::Parse(format!(
                "expected '{}' at byte {}, found '{}'",
                c as char, self.pos, b as char
            ))),
            None => Err(Error::Parse(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn encoding(&mut self) -> Result<CoverEncoding> {
        self.expect(b'[')?;
        let mut cycles: Vec<Vec<NodeId>> = vec![Vec::new()];
        loop {
            match self.peek() {
                Some(b']') => {
                    self.pos += 1;
                    break;
                }
                Some(b'|') => {
                    self.pos += 1;
                    cycles.push(Vec::new());
                }
                Some(b) if b.is_ascii_digit() => {
                    let start = self.pos;
                    while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let text = core::str::from_utf8(&self.s[start..self.pos]).unwrap_or_default();
                    let k: NodeId = text
                        .parse()
                        .map_err(|_| Error::Parse(format!("label {text} out of range")))?;
                    cycles.last_mut().unwrap().push(k);
                }
                Some(b) => {
                    return Err(Error::Parse(format!(
                        "unexpected '{}' at byte {}",
                        b as char, self.pos
                    )))
                }
                None => return Err(Error::Parse(String::from("unterminated encoding"))),
            }
        }
        CoverEncoding::from_cycles(&cycles)
    }
}

impl FromStr for CoverEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lx = Lexer::new(s);
        let e = lx.encoding()?;
        if !lx.at_end() {
            return Err(Error::Parse(String::from("trailing input after encoding")));
        }
        Ok(e)
    }
}

/// Ordered encoding of a cover pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverPairEncoding {
    first: CoverEncoding,
    second: CoverEncoding,
}

impl CoverPairEncoding {
    /// Checks both ordering criteria.
    pub fn new(first: CoverEncoding, second: CoverEncoding) -> Result<Self> {
        if first.n() != second.n() {
            return Err(Error::InvalidEncoding(format!(
                "covers on {} and {} nodes",
                first.n(),
                second.n()
            )));
        }
        if first.partition < second.partition {
            return Err(Error::InvalidEncoding(String::from(
                "ordering criterion 1: first partition is smaller than second",
            )));
        }
        if first.partition == second.partition && first.flat > second.flat {
            return Err(Error::InvalidEncoding(String::from(
                "ordering criterion 2: equal partitions with first labels greater than second",
            )));
        }
        Ok(CoverPairEncoding { first, second })
    }

    /// Puts two encodings in pair order.
    pub fn ordered(a: CoverEncoding, b: CoverEncoding) -> Result<Self> {
        if a <= b {
            Self::new(a, b)
        } else {
            Self::new(b, a)
        }
    }

    pub fn from_covers(a: &CycleCover, b: &CycleCover) -> Result<Self> {
        Self::ordered(encode_cover(a), encode_cover(b))
    }

    pub fn first(&self) -> &CoverEncoding {
        &self.first
    }

    pub fn second(&self) -> &CoverEncoding {
        &self.second
    }

    pub fn n(&self) -> usize {
        self.first.n()
    }

    /// True iff the first cover is the identity layout of its partition.
    pub fn is_standard(&self) -> bool {
        self.first.is_identity_layout()
    }

    pub fn covers(&self) -> (CycleCover, CycleCover) {
        (self.first.decode(), self.second.decode())
    }

    pub fn apply_permutation(&self, sigma: &[NodeId]) -> Result<Self> {
        Self::ordered(
            self.first.apply_permutation(sigma)?,
            self.second.apply_permutation(sigma)?,
        )
    }

    /// Every standard-form translation reachable by choosing which cover is
    /// mapped to the identity layout, how its equal-length cycles are matched
    /// to layout slots, and how each cycle is rotated. Sorted, no duplicates.
    pub fn standardize_pair(&self) -> Vec<CoverPairEncoding> {
        let n = self.n();
        let mut out = BTreeSet::new();
        let mut sigma = vec![0 as NodeId; n];
        for chosen in [&self.first, &self.second] {
            if chosen.partition != self.first.partition {
                continue;
            }
            let cycles: Vec<&[NodeId]> = chosen.cycles().collect();
            let mut used = vec![false; cycles.len()];
            self.assign_slots(&cycles, 0, 0, &mut used, &mut sigma, &mut out);
        }
        out.into_iter().collect()
    }

    fn assign_slots(
        &self,
        cycles: &[&[NodeId]],
        slot: usize,
        start: usize,
        used: &mut [bool],
        sigma: &mut [NodeId],
        out: &mut BTreeSet<CoverPairEncoding>,
    ) {
        if slot == cycles.len() {
            let t = self.apply_permutation(sigma).expect("slot assignment is a bijection");
            debug_assert!(t.is_standard());
            out.insert(t);
            return;
        }
        let p = self.first.partition[slot] as usize;
        for j in 0..cycles.len() {
            if used[j] || cycles[j].len() != p {
                continue;
            }
            used[j] = true;
            for s in 0..p {
                for (i, &k) in cycles[j].iter().enumerate() {
                    sigma[k as usize] = (start + (s + i) % p) as NodeId;
                }
                self.assign_slots(cycles, slot + 1, start + p, used, sigma, out);
            }
            used[j] = false;
        }
    }
}

impl fmt::Display for CoverPairEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.first, self.second)
    }
}

impl FromStr for CoverPairEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lx = Lexer::new(s);
        let first = lx.encoding()?;
        lx.expect(b',')?;
        let second = lx.encoding()?;
        if !lx.at_end() {
            return Err(Error::Parse(String::from("trailing input after pair")));
        }
        Self::new(first, second)
    }
}
