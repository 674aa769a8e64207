use std::fmt::Write as _;

use anyhow::Result;
use mzwigner::measure::{Histogram, OutcomeDistribution};
use mzwigner::scenario::{observables, CommutatorReport, PropertyReport};
use serde::Serialize;

use crate::numfmt;

pub const TOOL: &str = "mzwigner";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Context { id: String },
    /// `-` for standard input.
    Circuit { path: String },
}

#[derive(Debug, Serialize)]
pub struct ProbabilityRow {
    pub label: String,
    pub probability: f64,
    /// Matching small rational, if any.
    pub exact: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct CommutatorRow {
    pub pair: String,
    pub frobenius_norm: f64,
    pub anti_hermitian: bool,
}

impl From<&CommutatorReport> for CommutatorRow {
    fn from(c: &CommutatorReport) -> Self {
        Self {
            pair: format!("O{},O{}", c.pair.0, c.pair.1),
            frobenius_norm: c.frobenius_norm,
            anti_hermitian: c.anti_hermitian,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub source: Source,
    pub probabilities: Vec<ProbabilityRow>,
    pub total_probability: f64,
    pub properties: Vec<PropertyReport>,
    pub commutators: Vec<CommutatorRow>,
    pub histogram: Option<Histogram>,
    /// Present exactly when `histogram` is.
    pub seed: Option<u64>,
}

impl RunReport {
    pub fn new(
        source: Source,
        dist: &OutcomeDistribution,
        properties: Vec<PropertyReport>,
        histogram: Option<Histogram>,
    ) -> Self {
        let commutators = if properties.is_empty() {
            Vec::new()
        } else {
            observables().commutators.iter().map(CommutatorRow::from).collect()
        };
        Self {
            tool: TOOL,
            version: VERSION,
            source,
            probabilities: dist
                .entries
                .iter()
                .map(|o| ProbabilityRow {
                    label: o.label.clone(),
                    probability: o.probability,
                    exact: numfmt::rational(o.probability),
                })
                .collect(),
            total_probability: dist.total(),
            properties,
            commutators,
            seed: histogram.as_ref().map(|h| h.seed),
            histogram,
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => self.csv(),
            Format::Table => Ok(self.table()),
        }
    }

    fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["label", "probability", "exact"];
        if self.histogram.is_some() {
            header.push("count");
        }
        w.write_record(&header)?;
        for row in &self.probabilities {
            let mut rec = vec![
                row.label.clone(),
                numfmt::sig12(row.probability),
                row.exact.clone().unwrap_or_default(),
            ];
            if let Some(h) = &self.histogram {
                rec.push(h.count(&row.label).unwrap_or(0).to_string());
            }
            w.write_record(&rec)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let source = match &self.source {
            Source::Context { id } => id.clone(),
            Source::Circuit { path } => format!("circuit {path}"),
        };
        let _ = writeln!(out, "{TOOL} {VERSION}: {source}");
        let width = self
            .probabilities
            .iter()
            .map(|r| r.label.len())
            .max()
            .unwrap_or(0)
            .max("outcome".len());
        let _ = writeln!(out, "{:width$}  probability", "outcome");
        for r in &self.probabilities {
            let _ = writeln!(out, "{:width$}  {}", r.label, numfmt::annotated(r.probability));
        }
        let _ = writeln!(out, "{:width$}  {}", "total", numfmt::sig12(self.total_probability));
        if !self.properties.is_empty() {
            let _ = writeln!(out, "\nproperties");
            for p in &self.properties {
                let status = format!("{:?}", p.status).to_lowercase();
                match p.magnitude {
                    Some(m) => {
                        let _ = writeln!(out, "  {}  {status}, magnitude {}", p.property, numfmt::annotated(m));
                    }
                    None => {
                        let _ = writeln!(out, "  {}  {status}", p.property);
                    }
                }
            }
        }
        if !self.commutators.is_empty() {
            let _ = writeln!(out, "\ncommutators (Frobenius norm)");
            for c in &self.commutators {
                let _ = writeln!(out, "  [{}]  {}", c.pair, numfmt::sig12(c.frobenius_norm));
            }
        }
        if let Some(h) = &self.histogram {
            let _ = writeln!(out, "\nhistogram ({} shots, seed {})", h.shots, h.seed);
            for (label, count) in &h.counts {
                let _ = writeln!(out, "  {label:width$}  {count}");
            }
        }
        out
    }
}
