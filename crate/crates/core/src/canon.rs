//! Canonical certificates for digraphs on at most 16 nodes.
//!
//! The labeling is found by individualization-refinement: colors are refined
//! by the multisets of out- and in-neighbor colors until stable, then the
//! first non-singleton cell is split by individualizing each of its nodes in
//! turn. Every discrete leaf yields a relabeled adjacency matrix and the
//! smallest one is the certificate. Automorphisms found along the way prune
//! equivalent branches.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::model::{Arc, HalfPoint, NodeId, MAX_NODES};

type Rows = [u16; MAX_NODES];

/// Unweighted digraph without loops, one out-neighbor bitmask per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportDigraph {
    n: usize,
    out: Rows,
    inn: Rows,
}

impl SupportDigraph {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_NODES, "at most {MAX_NODES} nodes");
        SupportDigraph { n, out: [0; MAX_NODES], inn: [0; MAX_NODES] }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = Arc>) -> Self {
        let mut g = Self::new(n);
        for a in arcs {
            g.add_arc(a.tail, a.head);
        }
        g
    }

    /// The arcs carrying a nonzero value.
    pub fn from_half_point(x: &HalfPoint) -> Self {
        let mut g = Self::new(x.n());
        for u in 0..x.n() {
            g.out[u] = x.out_mask(u as NodeId);
        }
        g.rebuild_in();
        g
    }

    pub fn add_arc(&mut self, u: NodeId, v: NodeId) {
        assert!(u != v && (u as usize) < self.n && (v as usize) < self.n);
        self.out[u as usize] |= 1 << v;
        self.inn[v as usize] |= 1 << u;
    }

    fn rebuild_in(&mut self) {
        self.inn = [0; MAX_NODES];
        for u in 0..self.n {
            let mut m = self.out[u];
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                self.inn[v] |= 1 << u;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.out[u as usize] & (1 << v) != 0
    }

    pub fn out_mask(&self, u: NodeId) -> u16 {
        self.out[u as usize]
    }

    pub fn arcs(&self) -> Vec<Arc> {
        let mut v = Vec::new();
        for u in 0..self.n {
            for w in 0..self.n {
                if self.out[u] & (1 << w) != 0 {
                    v.push(Arc::new(u as NodeId, w as NodeId));
                }
            }
        }
        v
    }

    /// Renames node `u` to `sigma[u]`.
    pub fn relabeled(&self, sigma: &[NodeId]) -> Self {
        let mut g = Self::new(self.n);
        for u in 0..self.n {
            g.out[sigma[u] as usize] = map_mask(self.out[u], sigma);
        }
        g.rebuild_in();
        g
    }

    /// Rows of the adjacency matrix after relabeling by `pos`, each row
    /// packed with column 0 as its most significant bit.
    fn packed_rows(&self, pos: &[u8]) -> Rows {
        let mut rows = [0u16; MAX_NODES];
        let n = self.n;
        for u in 0..n {
            let mut m = self.out[u];
            let mut r = 0u16;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                r |= 1 << (n - 1 - pos[v] as usize);
            }
            rows[pos[u] as usize] = r;
        }
        rows
    }
}

fn map_mask(mut m: u16, sigma: &[NodeId]) -> u16 {
    let mut r = 0;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        r |= 1 << sigma[v];
    }
    r
}

/// Canonical serialization: `n`, then the row-major adjacency bits of the
/// canonically relabeled graph packed most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Certificate {
    bytes: Vec<u8>,
}

impl Certificate {
    fn from_rows(n: usize, rows: &Rows) -> Self {
        let mut bytes = Vec::with_capacity(1 + (n * n).div_ceil(8));
        bytes.push(n as u8);
        let mut acc = 0u8;
        let mut filled = 0;
        for row in rows.iter().take(n) {
            for j in 0..n {
                acc = (acc << 1) | ((row >> (n - 1 - j)) & 1) as u8;
                filled += 1;
                if filled == 8 {
                    bytes.push(acc);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            bytes.push(acc << (8 - filled));
        }
        Certificate { bytes }
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Certificate { bytes }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// The digraph the certificate describes, in canonical labels.
    pub fn to_digraph(&self) -> Option<SupportDigraph> {
        let n = *self.bytes.first()? as usize;
        if n > MAX_NODES || self.bytes.len() != 1 + (n * n).div_ceil(8) {
            return None;
        }
        let mut g = SupportDigraph::new(n);
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                if self.bytes[1 + k / 8] & (0x80 >> (k % 8)) != 0 {
                    if i == j {
                        return None;
                    }
                    g.add_arc(i as NodeId, j as NodeId);
                }
            }
        }
        Some(g)
    }
}

/// Canonical certificate of `g`; equal exactly for isomorphic digraphs.
pub fn certificate(g: &SupportDigraph) -> Certificate {
    let (rows, _) = canonical_form(g);
    Certificate::from_rows(g.n, &rows)
}

/// Canonical labeling of `g`: node `u` receives label `labels[u]`.
pub fn canonical_labeling(g: &SupportDigraph) -> Vec<NodeId> {
    canonical_form(g).1
}

fn canonical_form(g: &SupportDigraph) -> (Rows, Vec<NodeId>) {
    let n = g.n;
    let mut search = Search { g, best: None, autos: Vec::new() };
    if n == 0 {
        return ([0; MAX_NODES], Vec::new());
    }
    let mut colors = [0u8; MAX_NODES];
    refine(g, &mut colors);
    search.descend(&colors, &mut Vec::new());
    let (rows, pos) = search.best.expect("search reaches at least one leaf");
    (rows, pos[..n].to_vec())
}

/// Refines an ordered partition to the coarsest equitable one. Colors are
/// positional: a cell's color is the number of nodes in earlier cells.
fn refine(g: &SupportDigraph, colors: &mut [u8; MAX_NODES]) {
    let n = g.n;
    let mut cells = count_cells(colors, n);
    loop {
        let mut sigs = [[u8::MAX; 2 * MAX_NODES + 1]; MAX_NODES];
        for v in 0..n {
            let s = &mut sigs[v];
            s[0] = colors[v];
            let k = fill_sorted(&mut s[1..], g.out[v], colors);
            s[1 + k] = u8::MAX - 1;
            fill_sorted(&mut s[2 + k..], g.inn[v], colors);
        }
        let mut next = [0u8; MAX_NODES];
        for v in 0..n {
            next[v] = (0..n).filter(|&w| sigs[w] < sigs[v]).count() as u8;
        }
        *colors = next;
        let c = count_cells(colors, n);
        if c == cells {
            return;
        }
        cells = c;
    }
}

fn fill_sorted(dst: &mut [u8], mut m: u16, colors: &[u8; MAX_NODES]) -> usize {
    let mut k = 0;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        dst[k] = colors[v];
        k += 1;
    }
    dst[..k].sort_unstable();
    k
}

fn count_cells(colors: &[u8; MAX_NODES], n: usize) -> usize {
    let mut seen = 0u32;
    for &c in &colors[..n] {
        seen |= 1 << c;
    }
    seen.count_ones() as usize
}

struct Search<'a> {
    g: &'a SupportDigraph,
    /// Smallest leaf so far and the labeling that produced it.
    best: Option<(Rows, [u8; MAX_NODES])>,
    /// Automorphisms found by comparing equal leaves.
    autos: Vec<[u8; MAX_NODES]>,
}

impl Search<'_> {
    fn descend(&mut self, colors: &[u8; MAX_NODES], prefix: &mut Vec<u8>) {
        let n = self.g.n;
        let mut size = [0u8; MAX_NODES];
        for &c in &colors[..n] {
            size[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| size[c] > 1) else {
            self.leaf(colors);
            return;
        };
        let cell: Vec<u8> = (0..n as u8).filter(|&v| colors[v as usize] as usize == target).collect();
        let mut explored: Vec<u8> = Vec::new();
        for &v in &cell {
            if explored.iter().any(|&w| self.same_orbit(prefix, w, v)) {
                continue;
            }
            explored.push(v);
            let mut child = *colors;
            for &w in &cell {
                if w != v {
                    child[w as usize] = target as u8 + 1;
                }
            }
            refine(self.g, &mut child);
            prefix.push(v);
            self.descend(&child, prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, pos: &[u8; MAX_NODES]) {
        let rows = self.g.packed_rows(pos);
        match &self.best {
            None => self.best = Some((rows, *pos)),
            Some((best, best_pos)) => {
                if rows < *best {
                    self.best = Some((rows, *pos));
                } else if rows == *best {
                    // best_pos^-1 . pos maps this leaf's nodes onto the best leaf's.
                    let n = self.g.n;
                    let mut inv = [0u8; MAX_NODES];
                    for v in 0..n {
                        inv[best_pos[v] as usize] = v as u8;
                    }
                    let mut gamma = [0u8; MAX_NODES];
                    for v in 0..n {
                        gamma[v] = inv[pos[v] as usize];
                    }
                    self.autos.push(gamma);
                }
            }
        }
    }

    /// Whether `a` and `b` share an orbit under the known automorphisms that
    /// fix every node of `prefix`.
    fn same_orbit(&self, prefix: &[u8], a: u8, b: u8) -> bool {
        let n = self.g.n;
        let mut parent: [u8; MAX_NODES] = core::array::from_fn(|i| i as u8);
        fn find(p: &mut [u8; MAX_NODES], mut x: u8) -> u8 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        let mut any = false;
        for gamma in &self.autos {
            if prefix.iter().any(|&v| gamma[v as usize] != v) {
                continue;
            }
            any = true;
            for v in 0..n {
                let (x, y) = (find(&mut parent, v as u8), find(&mut parent, gamma[v]));
                if x != y {
                    parent[x as usize] = y;
                }
            }
        }
        any && find(&mut parent, a) == find(&mut parent, b)
    }
}

/// Set of certificates seen so far.
#[derive(Debug, Clone, Default)]
pub struct CertificateStore {
    seen: BTreeSet<Certificate>,
}

impl CertificateStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns true iff `c` was not present before.
    pub fn dedup_insert(&mut self, c: Certificate) -> bool {
        self.seen.insert(c)
    }

    pub fn contains(&self, c: &Certificate) -> bool {
        self.seen.contains(c)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Certificate> {
        self.seen.iter()
    }
}
