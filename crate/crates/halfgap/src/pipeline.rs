//! Generation, dedup, classification and gap stages.
//!
//! Work is processed one first-cover partition at a time. Inside a group,
//! certificates and classifications run on a rayon pool, while dedup walks
//! the group in stream order. The first candidate of each class is therefore
//! its representative no matter how the pool schedules work, and the output
//! does not depend on the worker count.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use halfgap_core::canon::{certificate, CertificateStore, SupportDigraph};
use halfgap_core::enumeration::{CandidateStream, Cursor};
use halfgap_core::model::{check_node_count, combine_covers, HalfPoint};
use halfgap_core::polytope::{is_extreme_circuit, subtour_feasible};
use halfgap_core::{gap_n, solve_gap_instance, Certificate, CoverPairEncoding, Rational, VertexRecord, VertexStatus};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::{Error, Result};

/// Last stage the pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Gen,
    Cert,
    Extreme,
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
    Table,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub n: usize,
    pub jobs: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub checkpoint: Option<PathBuf>,
    pub max_candidates: Option<u64>,
    pub stage: Stage,
}

impl PipelineConfig {
    pub fn new(n: usize) -> Self {
        PipelineConfig {
            n,
            jobs: 1,
            output: None,
            format: Format::Jsonl,
            checkpoint: None,
            max_candidates: None,
            stage: Stage::Gap,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_node_count(self.n)?;
        if self.n < 4 {
            return Err(Error::Config(format!("n = {} is below 4", self.n)));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Wall-clock seconds spent in each stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub generation: f64,
    pub certification: f64,
    pub extremality: f64,
    pub gap: f64,
}

impl StageTimings {
    pub fn total(&self) -> f64 {
        self.generation + self.certification + self.extremality + self.gap
    }
}

/// Stage counts for one `n`. `certificates` counts isomorphism classes of
/// candidates and `vertices` counts classes of confirmed vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n: usize,
    pub stage: Stage,
    pub candidates: Option<u64>,
    pub certificates: Option<usize>,
    pub feasible: Option<usize>,
    pub vertices: Option<usize>,
    #[serde(with = "opt_rational")]
    pub gap: Option<Rational>,
    pub timings: Option<StageTimings>,
    /// False when `max_candidates` stopped the run early.
    pub complete: bool,
}

impl RunSummary {
    pub fn check_monotone(&self) -> Result<()> {
        let le = |a: Option<usize>, b: Option<usize>| match (a, b) {
            (Some(a), Some(b)) => a <= b,
            _ => true,
        };
        let ok = le(self.certificates, self.candidates.map(|c| c as usize))
            && le(self.feasible, self.certificates)
            && le(self.vertices, self.feasible);
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!("stage counts are not monotone for n = {}", self.n)))
        }
    }
}

pub(crate) mod opt_rational {
    use halfgap_core::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Summary plus the per-class records, sorted by certificate.
#[derive(Debug, Clone)]
pub struct Run {
    pub summary: RunSummary,
    pub records: Vec<VertexRecord>,
}

pub fn half_point(pair: &CoverPairEncoding) -> HalfPoint {
    let (a, b) = pair.covers();
    combine_covers(&a, &b)
}

pub fn certificate_of(x: &HalfPoint) -> Certificate {
    certificate(&SupportDigraph::from_half_point(x))
}

/// Runs the property checks up to `stage` on one class representative.
pub fn classify(x: &HalfPoint, stage: Stage) -> Result<(VertexStatus, Option<Rational>)> {
    if stage < Stage::Extreme {
        return Ok((VertexStatus::Candidate, None));
    }
    if !subtour_feasible(x) {
        return Ok((VertexStatus::Infeasible, None));
    }
    if !is_extreme_circuit(x)? {
        return Ok((VertexStatus::NonExtreme, None));
    }
    if stage < Stage::Gap {
        return Ok((VertexStatus::Vertex, None));
    }
    Ok((VertexStatus::Vertex, Some(solve_gap_instance(x)?)))
}

struct State {
    cursor: Cursor,
    candidates: u64,
    store: CertificateStore,
    records: Vec<VertexRecord>,
    timings: StageTimings,
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Run> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;

    let mut st = match cfg.checkpoint.as_deref().map(Checkpoint::load).transpose()?.flatten() {
        Some(cp) => {
            cp.check_compatible(cfg)?;
            let records = cp.records()?;
            let mut store = CertificateStore::new();
            for r in &records {
                store.dedup_insert(r.certificate.clone());
            }
            State { cursor: cp.cursor(), candidates: cp.candidates, store, records, timings: cp.timings }
        }
        None => State {
            cursor: Cursor::default(),
            candidates: 0,
            store: CertificateStore::new(),
            records: Vec::new(),
            timings: StageTimings::default(),
        },
    };

    let stream = CandidateStream::new(cfg.n)?;
    let groups = stream.partitions().len();
    let budget = cfg.max_candidates.unwrap_or(u64::MAX);
    while st.cursor.partition_index < groups && st.candidates < budget {
        let idx = st.cursor.partition_index;
        let t = Instant::now();
        let mut group = stream.group(idx);
        group.drain(..st.cursor.consumed.min(group.len()));
        let room = usize::try_from(budget - st.candidates).unwrap_or(usize::MAX);
        let finished = group.len() <= room;
        group.truncate(room);
        st.candidates += group.len() as u64;
        st.cursor = if finished {
            Cursor { partition_index: idx + 1, consumed: 0 }
        } else {
            Cursor { partition_index: idx, consumed: st.cursor.consumed + group.len() }
        };
        st.timings.generation += secs(t.elapsed());

        if cfg.stage > Stage::Gen {
            process_group(&pool, cfg.n, cfg.stage, group, &mut st)?;
        }
        if let Some(path) = &cfg.checkpoint {
            Checkpoint::capture(cfg, st.cursor, st.candidates, &st.records, st.timings).save(path)?;
        }
    }

    let complete = st.cursor.partition_index >= groups;
    let mut records = st.records;
    records.sort_by(|a, b| a.certificate.cmp(&b.certificate));
    let summary = summarize(cfg, st.candidates, &records, st.timings, complete)?;
    summary.check_monotone()?;
    Ok(Run { summary, records })
}

fn process_group(pool: &rayon::ThreadPool, n: usize, stage: Stage, group: Vec<CoverPairEncoding>, st: &mut State) -> Result<()> {
    let t = Instant::now();
    let points: Vec<(HalfPoint, Certificate)> = pool.install(|| {
        group
            .par_iter()
            .map(|p| {
                let x = half_point(p);
                let c = certificate_of(&x);
                (x, c)
            })
            .collect()
    });
    let fresh: Vec<(CoverPairEncoding, HalfPoint, Certificate)> = group
        .into_iter()
        .zip(points)
        .filter_map(|(p, (x, c))| st.store.dedup_insert(c.clone()).then_some((p, x, c)))
        .collect();
    st.timings.certification += secs(t.elapsed());
    if fresh.is_empty() {
        return Ok(());
    }

    let t = Instant::now();
    let checks: Vec<(VertexStatus, Option<Rational>)> =
        pool.install(|| fresh.par_iter().map(|(_, x, _)| classify(x, stage.min(Stage::Extreme))).collect::<Result<_>>())?;
    st.timings.extremality += secs(t.elapsed());

    let t = Instant::now();
    let gaps: Vec<Option<Rational>> = if stage == Stage::Gap {
        pool.install(|| {
            fresh
                .par_iter()
                .zip(&checks)
                .map(|((_, x, _), (status, _))| match status {
                    VertexStatus::Vertex => solve_gap_instance(x).map(Some),
                    _ => Ok(None),
                })
                .collect::<halfgap_core::Result<_>>()
        })?
    } else {
        vec![None; fresh.len()]
    };
    st.timings.gap += secs(t.elapsed());

    for (((pair, _, certificate), (status, _)), gap) in fresh.into_iter().zip(checks).zip(gaps) {
        st.records.push(VertexRecord { n, pair, certificate, status, gap });
    }
    Ok(())
}

fn summarize(
    cfg: &PipelineConfig,
    candidates: u64,
    records: &[VertexRecord],
    timings: StageTimings,
    complete: bool,
) -> Result<RunSummary> {
    let count = |s: VertexStatus| records.iter().filter(|r| r.status == s).count();
    let gap = if cfg.stage == Stage::Gap && count(VertexStatus::Vertex) > 0 {
        Some(gap_n(records)?)
    } else {
        None
    };
    let reached = |s: Stage, v: usize| (cfg.stage >= s).then_some(v);
    Ok(RunSummary {
        n: cfg.n,
        stage: cfg.stage,
        candidates: Some(candidates),
        certificates: reached(Stage::Cert, records.len()),
        feasible: reached(Stage::Extreme, records.len() - count(VertexStatus::Infeasible)),
        vertices: reached(Stage::Extreme, count(VertexStatus::Vertex)),
        gap,
        timings: Some(timings),
        complete,
    })
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}
