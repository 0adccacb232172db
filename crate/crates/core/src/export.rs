//! Deterministic CSV and JSON-lines output of short-interval cells.
//!
//! Floats are written in shortest round-trip form, so identical inputs give
//! byte-identical output.

use std::io::Write;

use serde::Serialize;

use crate::short_interval::{EnvelopeKind, IntervalMeanSquare};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 12] = [
    "X",
    "u",
    "U",
    "continuous",
    "discrete",
    "shifted_discrete",
    "trivial_env",
    "theorem1_env",
    "lindelofZ_env",
    "ratio_trivial",
    "ratio_theorem1",
    "ratio_lindelofZ",
];

/// One output row. Field order and names match [`CSV_HEADER`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "X")]
    pub x: u64,
    pub u: f64,
    #[serde(rename = "U")]
    pub big_u: f64,
    pub continuous: f64,
    pub discrete: f64,
    pub shifted_discrete: f64,
    pub trivial_env: f64,
    pub theorem1_env: f64,
    #[serde(rename = "lindelofZ_env")]
    pub lindelof_z_env: f64,
    pub ratio_trivial: f64,
    pub ratio_theorem1: f64,
    #[serde(rename = "ratio_lindelofZ")]
    pub ratio_lindelof_z: f64,
}

impl From<&IntervalMeanSquare> for SweepRow {
    fn from(c: &IntervalMeanSquare) -> Self {
        Self {
            x: c.x,
            u: c.u_exp,
            big_u: c.u,
            continuous: c.continuous,
            discrete: c.discrete,
            shifted_discrete: c.shifted_discrete,
            trivial_env: c.envelopes.trivial,
            theorem1_env: c.envelopes.theorem1,
            lindelof_z_env: c.envelopes.lindelof_z,
            ratio_trivial: c.ratio(EnvelopeKind::Trivial),
            ratio_theorem1: c.ratio(EnvelopeKind::Theorem1),
            ratio_lindelof_z: c.ratio(EnvelopeKind::LindelofZ),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("csv: {other:?}")),
    }
}

pub fn write_csv<W: Write>(out: W, cells: &[IntervalMeanSquare]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if cells.is_empty() {
        w.write_record(CSV_HEADER).map_err(csv_err)?;
    }
    for cell in cells {
        w.serialize(SweepRow::from(cell)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_json_lines<W: Write>(mut out: W, cells: &[IntervalMeanSquare]) -> Result<()> {
    for cell in cells {
        let line = serde_json::to_string(&SweepRow::from(cell))
            .map_err(|e| Error::invalid(format!("json: {e}")))?;
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}
