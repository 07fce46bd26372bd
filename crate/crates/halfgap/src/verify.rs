//! Cross-checks of the fast pipeline against the slow oracles.

use halfgap_core::enumeration::enumerate_candidates;
use halfgap_core::gap::{solve_gap, Separation};
use halfgap_core::polytope::{extremality_rank_oracle, is_extreme_circuit, subtour_feasible};
use halfgap_core::VertexStatus;
use rayon::prelude::*;

use crate::oracle::{census, check_cover_decomposition};
use crate::pipeline::{half_point, run_pipeline, PipelineConfig, Stage};
use crate::Result;

/// Largest `n` for the exhaustive oracles; above it they are skipped.
pub const EXHAUSTIVE_LIMIT: usize = 7;
const CENSUS_LIMIT: usize = 6;
const EAGER_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: Option<bool>,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed: Some(passed), detail }
    }

    fn skipped(name: &'static str, detail: String) -> Self {
        Check { name, passed: None, detail }
    }
}

pub fn verify(n: usize, jobs: usize) -> Result<Vec<Check>> {
    let mut cfg = PipelineConfig::new(n);
    cfg.jobs = jobs;
    cfg.stage = Stage::Extreme;
    let run = run_pipeline(&cfg)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| crate::Error::Config(e.to_string()))?;
    let s = &run.summary;
    let counts = format!(
        "{} candidates, {} classes, {} feasible, {} vertices",
        s.candidates.unwrap_or(0),
        s.certificates.unwrap_or(0),
        s.feasible.unwrap_or(0),
        s.vertices.unwrap_or(0)
    );
    let mut checks = vec![Check::new("stage counts monotone", s.check_monotone().is_ok(), counts)];

    if n <= EXHAUSTIVE_LIMIT {
        let pairs: Vec<_> = enumerate_candidates(n)?.collect();
        let (compared, mismatches) = pool.install(|| {
            pairs
                .par_iter()
                .map(|p| {
                    let x = half_point(p);
                    if !subtour_feasible(&x) {
                        return Ok::<_, halfgap_core::Error>((0usize, 0usize));
                    }
                    let fast = is_extreme_circuit(&x)?;
                    Ok((1, usize::from(fast != extremality_rank_oracle(&x))))
                })
                .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
        })?;
        checks.push(Check::new(
            "circuit test agrees with rank oracle",
            mismatches == 0,
            format!("{compared} feasible candidates, {mismatches} mismatches"),
        ));
    } else {
        checks.push(Check::skipped("circuit test agrees with rank oracle", format!("n > {EXHAUSTIVE_LIMIT}")));
    }

    if n <= CENSUS_LIMIT {
        let c = census(n);
        let vertices = run.summary.vertices.unwrap_or(0);
        checks.push(Check::new(
            "vertex classes match brute force",
            c.vertex_classes == vertices,
            format!("pipeline {vertices}, oracle {} ({} points, {} classes)", c.vertex_classes, c.points, c.classes),
        ));
    } else {
        checks.push(Check::skipped("vertex classes match brute force", format!("n > {CENSUS_LIMIT}")));
    }

    let vertices: Vec<_> = run.records.iter().filter(|r| r.status == VertexStatus::Vertex).collect();
    let bad: Vec<String> = pool.install(|| {
        vertices
            .par_iter()
            .filter_map(|r| match check_cover_decomposition(&half_point(&r.pair)) {
                Ok(true) => None,
                Ok(false) => Some(r.pair.to_string()),
                Err(e) => Some(format!("{}: {e}", r.pair)),
            })
            .collect()
    });
    checks.push(Check::new(
        "vertices decompose into two covers",
        bad.is_empty(),
        format!("{} vertices, failures: {bad:?}", vertices.len()),
    ));

    // solve_gap re-checks every returned optimum against the full model
    let gaps: Vec<String> = pool.install(|| {
        vertices
            .par_iter()
            .filter_map(|r| {
                let x = half_point(&r.pair);
                let delayed = match solve_gap(&x, Separation::Delayed) {
                    Ok(s) => s,
                    Err(e) => return Some(format!("{}: {e}", r.pair)),
                };
                if n <= EAGER_LIMIT {
                    match solve_gap(&x, Separation::Eager) {
                        Ok(e) if e.objective == delayed.objective => None,
                        Ok(e) => Some(format!("{}: delayed {} eager {}", r.pair, delayed.gap(), e.gap())),
                        Err(e) => Some(format!("{}: {e}", r.pair)),
                    }
                } else {
                    None
                }
            })
            .collect()
    });
    checks.push(Check::new(
        "gap optima pass substitution checks",
        gaps.is_empty(),
        format!("{} vertices, failures: {gaps:?}", vertices.len()),
    ));
    Ok(checks)
}
