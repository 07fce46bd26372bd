//! Line-oriented record formats.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use halfgap_core::{Certificate, CoverPairEncoding, Rational, VertexRecord, VertexStatus};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Parses `[…|…],[…|…]` into a validated pair.
pub fn parse_pair(s: &str) -> Result<CoverPairEncoding> {
    Ok(s.trim().parse::<CoverPairEncoding>()?)
}

/// Flat serialized form shared by the JSONL and CSV writers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordRow {
    pub n: usize,
    pub pair: String,
    pub cert: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<String>,
}

impl From<&VertexRecord> for RecordRow {
    fn from(r: &VertexRecord) -> Self {
        RecordRow {
            n: r.n,
            pair: r.pair.to_string(),
            cert: hex::encode(r.certificate.as_bytes()),
            status: r.status.as_str().to_string(),
            gap: r.gap.as_ref().map(|g| g.to_string()),
        }
    }
}

impl TryFrom<RecordRow> for VertexRecord {
    type Error = Error;

    fn try_from(row: RecordRow) -> Result<Self> {
        let pair = parse_pair(&row.pair)?;
        if pair.n() != row.n {
            return Err(Error::Record(format!("pair {} does not have {} nodes", row.pair, row.n)));
        }
        let bytes = hex::decode(&row.cert).map_err(|e| Error::Record(format!("certificate `{}`: {e}", row.cert)))?;
        let status = VertexStatus::parse(&row.status)
            .ok_or_else(|| Error::Record(format!("unknown status `{}`", row.status)))?;
        let gap = match row.gap.as_deref() {
            None | Some("") => None,
            Some(g) => Some(g.parse::<Rational>()?),
        };
        if gap.is_some() && status != VertexStatus::Vertex {
            return Err(Error::Record(format!("{} record carries a gap", row.status)));
        }
        Ok(VertexRecord { n: row.n, pair, certificate: Certificate::from_bytes(bytes), status, gap })
    }
}

/// Record formats; the summary table is handled by [`crate::table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Jsonl,
    Csv,
}

pub fn write_records(records: &[VertexRecord], format: RecordFormat, out: impl Write) -> Result<()> {
    match format {
        RecordFormat::Jsonl => {
            let mut out = std::io::BufWriter::new(out);
            for r in records {
                serde_json::to_writer(&mut out, &RecordRow::from(r))?;
                out.write_all(b"\n").map_err(Error::io("<output>"))?;
            }
            out.flush().map_err(Error::io("<output>"))?;
        }
        RecordFormat::Csv => {
            // csv cannot skip a trailing optional field, so every row has a gap column
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["n", "pair", "cert", "status", "gap"])?;
            for r in records {
                let row = RecordRow::from(r);
                w.write_record([
                    row.n.to_string(),
                    row.pair,
                    row.cert,
                    row.status,
                    row.gap.unwrap_or_default(),
                ])?;
            }
            w.flush().map_err(Error::io("<output>"))?;
        }
    }
    Ok(())
}

/// Reads a JSONL or (by `.csv` extension) CSV record file.
pub fn read_records(path: &Path) -> Result<Vec<VertexRecord>> {
    let file = fs::File::open(path).map_err(Error::io(path))?;
    let rows: Vec<RecordRow> = if path.extension().is_some_and(|e| e == "csv") {
        csv::Reader::from_reader(file).deserialize().collect::<std::result::Result<_, _>>()?
    } else {
        let mut rows = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(Error::io(path))?;
            if !line.trim().is_empty() {
                rows.push(serde_json::from_str(&line)?);
            }
        }
        rows
    };
    rows.into_iter().map(VertexRecord::try_from).collect()
}
