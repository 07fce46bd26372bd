//! Plain-text summary tables.

use std::collections::BTreeMap;

use halfgap_core::{gap_n, VertexRecord, VertexStatus};

use crate::pipeline::{RunSummary, Stage};
use crate::Result;

const HEADER: [&str; 10] = [
    "n",
    "Gap_n",
    "candidates",
    "non-isom.",
    "feasible",
    "vertices",
    "gen (s)",
    "cert (s)",
    "extreme (s)",
    "gap (s)",
];

/// One row per summary. `non-isom.` counts candidate classes and
/// `vertices` counts vertex classes.
pub fn emit_table(summaries: &[RunSummary]) -> String {
    let dash = || "-".to_string();
    let opt = |v: Option<usize>| v.map_or_else(dash, |v| v.to_string());
    let rows: Vec<[String; 10]> = summaries
        .iter()
        .map(|s| {
            let t = |f: fn(&crate::StageTimings) -> f64| s.timings.as_ref().map_or_else(dash, |t| format!("{:.2}", f(t)));
            [
                s.n.to_string(),
                s.gap.as_ref().map_or_else(dash, |g| g.to_string()),
                s.candidates.map_or_else(dash, |c| c.to_string()),
                opt(s.certificates),
                opt(s.feasible),
                opt(s.vertices),
                t(|t| t.generation),
                t(|t| t.certification),
                t(|t| t.extremality),
                t(|t| t.gap),
            ]
        })
        .collect();
    let mut widths = HEADER.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&HEADER);
    for row in &rows {
        line(&row.each_ref().map(String::as_str));
    }
    out
}

/// Rebuilds per-`n` summaries from record files. Candidate totals and
/// timings are not recorded per class, so they stay empty.
pub fn summarize_records(records: &[VertexRecord]) -> Result<Vec<RunSummary>> {
    let mut by_n: BTreeMap<usize, Vec<VertexRecord>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.n).or_default().push(r.clone());
    }
    by_n.into_iter()
        .map(|(n, rs)| {
            let count = |s: VertexStatus| rs.iter().filter(|r| r.status == s).count();
            let classified = count(VertexStatus::Candidate) == 0;
            let has_gaps = rs.iter().any(|r| r.gap.is_some());
            let stage = match (classified, has_gaps) {
                (false, _) => Stage::Cert,
                (true, false) => Stage::Extreme,
                (true, true) => Stage::Gap,
            };
            Ok(RunSummary {
                n,
                stage,
                candidates: None,
                certificates: Some(rs.len()),
                feasible: classified.then(|| rs.len() - count(VertexStatus::Infeasible)),
                vertices: classified.then(|| count(VertexStatus::Vertex)),
                gap: if has_gaps { Some(gap_n(&rs)?) } else { None },
                timings: None,
                complete: true,
            })
        })
        .collect()
}
