use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::OutputFormat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    AbepTheory,
    AbepSim,
    Stderr,
    RecoveryProb,
    RecognitionProb,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::AbepTheory => "abep_theory",
            Metric::AbepSim => "abep_sim",
            Metric::Stderr => "stderr",
            Metric::RecoveryProb => "recovery_prob",
            Metric::RecognitionProb => "recognition_prob",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One emitted measurement. `trials` is the number of Bernoulli trials
/// behind `value` (bits for simulated ABEP, transmissions for QR metrics,
/// channel realizations for the closed form).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub x: f64,
    #[serde(rename = "M")]
    pub m: u32,
    pub metric: Metric,
    pub value: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Serializes rows as CSV (with header) or JSON lines.
pub fn write_results<W: Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Jsonl => {
            let mut out = out;
            for r in rows {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Writes rows to `path`. Empty input is an error and creates no file.
pub fn emit_results(rows: &[ResultRow], format: OutputFormat, path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyResults);
    }
    let mut buf = Vec::new();
    write_results(rows, format, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_results_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    Ok(rows)
}

pub fn read_results_jsonl<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let rows = serde_json::Deserializer::from_reader(input)
        .into_iter::<ResultRow>()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(rows)
}
