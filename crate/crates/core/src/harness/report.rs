use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::measure::io::fmt_f64;

pub const CSV_HEADER: [&str; 10] = [
    "experiment",
    "N",
    "n",
    "replicate",
    "seed",
    "estimate",
    "stderr",
    "bound",
    "slack",
    "violated",
];

/// One `(N, replicate)` cell of an experiment (several rows per cell for
/// the sweep and median experiments).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub bound: f64,
    pub slack: f64,
    pub violated: bool,
}

impl ReportRow {
    /// Builds a row with `violated = estimate > bound + slack`.
    pub fn new(
        experiment: impl Into<String>,
        cell: Cell,
        estimate: f64,
        stderr: Option<f64>,
        bound: f64,
        slack: f64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            big_n: cell.big_n,
            n: cell.n,
            replicate: cell.replicate,
            seed: cell.seed,
            estimate,
            stderr,
            bound,
            slack,
            violated: !(estimate <= bound + slack),
        }
    }
}

/// Coordinates of one experiment cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub big_n: usize,
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub artifact: String,
    pub version: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: Metadata,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, rows: Vec<ReportRow>) -> Self {
        Self {
            metadata: Metadata {
                artifact: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                config,
            },
            rows,
        }
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violated).count()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Writes the report. CSV numbers carry 17 significant digits and missing
/// or non-finite values print as `NA`; JSON numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn write_report<W: Write>(report: &ExperimentReport, out: W, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, report).map_err(io_err)?;
            writeln!(out).map_err(io_err)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER).map_err(io_err)?;
            for r in &report.rows {
                w.write_record([
                    r.experiment.clone(),
                    r.big_n.to_string(),
                    r.n.to_string(),
                    r.replicate.to_string(),
                    r.seed.to_string(),
                    fmt_f64(r.estimate),
                    r.stderr.map_or_else(|| "NA".to_string(), fmt_f64),
                    fmt_f64(r.bound),
                    fmt_f64(r.slack),
                    r.violated.to_string(),
                ])
                .map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
    }
}

pub fn emit(report: &ExperimentReport, path: &Path, format: Format) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_report(report, std::io::BufWriter::new(file), format)
}

pub fn to_csv_string(report: &ExperimentReport) -> Result<String> {
    let mut buf = Vec::new();
    write_report(report, &mut buf, Format::Csv)?;
    String::from_utf8(buf).map_err(io_err)
}

/// Rows of a CSV report (inverse of the CSV writer; metadata is not kept in
/// CSV).
pub fn read_csv_rows(text: &str) -> Result<Vec<ReportRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let parse_f = |s: &str| -> Result<Option<f64>> {
        if s == "NA" {
            Ok(None)
        } else {
            s.parse::<f64>()
                .map(Some)
                .map_err(|e| Error::Config(format!("{s:?}: {e}")))
        }
    };
    let parse_u = |s: &str| s.parse::<u64>().map_err(|e| Error::Config(format!("{s:?}: {e}")));
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Config(e.to_string()))?;
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Config(format!(
                "expected {} columns, got {}",
                CSV_HEADER.len(),
                rec.len()
            )));
        }
        rows.push(ReportRow {
            experiment: rec[0].to_string(),
            big_n: parse_u(&rec[1])? as usize,
            n: parse_u(&rec[2])? as usize,
            replicate: parse_u(&rec[3])? as usize,
            seed: parse_u(&rec[4])?,
            estimate: parse_f(&rec[5])?.unwrap_or(f64::NAN),
            stderr: parse_f(&rec[6])?,
            bound: parse_f(&rec[7])?.unwrap_or(f64::NAN),
            slack: parse_f(&rec[8])?.unwrap_or(f64::NAN),
            violated: rec[9].parse::<bool>().map_err(|e| Error::Config(e.to_string()))?,
        });
    }
    Ok(rows)
}
