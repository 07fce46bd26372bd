//! Exhaustive enumeration of pure half-integer extreme points of the
//! asymmetric subtour-elimination polytope on small complete digraphs, and
//! exact computation of their integrality gaps.
//!
//! Every half-integer vertex is the average of two cycle covers, so the
//! candidates are pairs of arc-disjoint cycle covers written in a normalized
//! bracket encoding. Candidates are deduplicated by a canonical digraph
//! certificate, filtered by subtour feasibility and by the circuit
//! extremality test, and each surviving vertex is fed to the gap LP, solved
//! with an exact rational simplex and lazily separated tour rows.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod canon;
pub mod encoding;
pub mod enumeration;
pub mod gap;
pub mod model;
pub mod polytope;
pub mod rational;
pub mod simplex;

use alloc::string::String;

pub use canon::{certificate, Certificate, CertificateStore, SupportDigraph};
pub use encoding::{CoverEncoding, CoverPairEncoding};
pub use enumeration::{enumerate_candidates, partitions_of, CandidateStream, PartitionSpec};
pub use gap::{gap_n, solve_gap_instance, GapModel, GapSolution};
pub use model::{combine_covers, support, Arc, CycleCover, HalfPoint, VertexRecord, VertexStatus};
pub use rational::Rational;
pub use simplex::{solve_lp, LinearProgram, LpSolution, LpStatus};

/// Errors reported by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("node count {0} outside the supported range")]
    NodeCount(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("empty input")]
    Empty,
    #[error("lp failure: {0}")]
    Lp(String),
}

pub type Result<T> = core::result::Result<T, Error>;
