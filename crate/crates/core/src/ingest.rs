//! CSV ingestion and dataset validation.
//!
//! Rows with any missing or unparseable indicator cell are removed whole;
//! nothing is imputed.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;

use thiserror::Error;

use crate::model::{ModelError, RawDataset, Schema};

/// Literal header of the identifier column.
pub const ENTITY_ID_HEADER: &str = "entity_id";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("first column header must be `{ENTITY_ID_HEADER}`, found `{0}`")]
    MissingEntityIdColumn(String),
    #[error("no column matches indicator `{0}`")]
    HeaderMismatch(String),
    #[error("column `{0}` appears more than once in the header")]
    DuplicateColumn(String),
    #[error("input has no data rows")]
    EmptyInput,
    #[error("only {retained} complete rows remain after dropping {dropped}; at least 2 are needed")]
    TooFewRows { retained: usize, dropped: usize },
    #[error("entity id `{0}` appears more than once")]
    DuplicateEntityId(String),
    #[error("empty entity id on line {0}")]
    EmptyEntityId(u64),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub dropped_ids: Vec<String>,
}

impl IngestReport {
    pub fn rows_retained(&self) -> usize {
        self.rows_read - self.rows_dropped
    }
}

fn is_missing_marker(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
}

/// Parses one numeric cell. `None` means missing or unparseable; infinities
/// are kept so that [`validate`] can report them.
fn parse_cell(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if is_missing_marker(cell) {
        return None;
    }
    cell.parse::<f64>().ok()
}

/// Reads a comma-separated table whose first column is `entity_id` and whose
/// remaining columns are matched to `schema` by header name.
pub fn parse_csv<R: Read>(
    source: R,
    schema: &Schema,
) -> Result<(RawDataset, IngestReport), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    let first = headers.get(0).map(str::trim).unwrap_or("");
    if first != ENTITY_ID_HEADER {
        return Err(IngestError::MissingEntityIdColumn(first.to_owned()));
    }
    let mut by_name: HashMap<&str, usize> = HashMap::new();
    for (idx, h) in headers.iter().enumerate().skip(1) {
        if by_name.insert(h.trim(), idx).is_some() {
            return Err(IngestError::DuplicateColumn(h.trim().to_owned()));
        }
    }
    let column_of: Vec<usize> = schema
        .indicators()
        .iter()
        .map(|spec| {
            by_name
                .get(spec.name.as_str())
                .copied()
                .ok_or_else(|| IngestError::HeaderMismatch(spec.name.clone()))
        })
        .collect::<Result<_, _>>()?;

    let mut report = IngestReport::default();
    let mut seen_ids = HashSet::new();
    let mut ids = Vec::new();
    let mut grid = Vec::new();
    for record in reader.records() {
        let record = record?;
        report.rows_read += 1;
        let id = record.get(0).map(str::trim).unwrap_or("");
        if id.is_empty() {
            let line = record.position().map_or(0, |p| p.line());
            return Err(IngestError::EmptyEntityId(line));
        }
        if !seen_ids.insert(id.to_owned()) {
            return Err(IngestError::DuplicateEntityId(id.to_owned()));
        }
        let row: Option<Vec<f64>> = column_of
            .iter()
            .map(|&c| record.get(c).and_then(parse_cell))
            .collect();
        match row {
            Some(row) => {
                ids.push(id.to_owned());
                grid.push(row.into_iter().map(Some).collect());
            }
            None => {
                report.rows_dropped += 1;
                report.dropped_ids.push(id.to_owned());
            }
        }
    }

    if report.rows_read == 0 {
        return Err(IngestError::EmptyInput);
    }
    if grid.len() < 2 {
        return Err(IngestError::TooFewRows {
            retained: grid.len(),
            dropped: report.rows_dropped,
        });
    }
    let dataset = RawDataset::new(ids, grid, schema.clone())?;
    Ok((dataset, report))
}

/// A condition that makes a dataset unevaluable.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationFinding {
    /// All finite values in the column are equal (max = min).
    DegenerateColumn { indicator: String },
    /// Fewer than two distinct finite values, e.g. every cell non-finite.
    TooFewDistinctValues { indicator: String, distinct: usize },
    NonFiniteValue { indicator: String, entity_id: String },
    MissingValue { indicator: String, entity_id: String },
}

impl ValidationFinding {
    pub fn indicator(&self) -> &str {
        match self {
            ValidationFinding::DegenerateColumn { indicator }
            | ValidationFinding::TooFewDistinctValues { indicator, .. }
            | ValidationFinding::NonFiniteValue { indicator, .. }
            | ValidationFinding::MissingValue { indicator, .. } => indicator,
        }
    }
}

impl fmt::Display for ValidationFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFinding::DegenerateColumn { indicator } => {
                write!(f, "indicator `{indicator}`: degenerate column (max = min)")
            }
            ValidationFinding::TooFewDistinctValues {
                indicator,
                distinct,
            } => write!(
                f,
                "indicator `{indicator}`: {distinct} distinct finite values, at least 2 needed"
            ),
            ValidationFinding::NonFiniteValue {
                indicator,
                entity_id,
            } => write!(f, "indicator `{indicator}`, entity `{entity_id}`: non-finite value"),
            ValidationFinding::MissingValue {
                indicator,
                entity_id,
            } => write!(f, "indicator `{indicator}`, entity `{entity_id}`: missing value"),
        }
    }
}

/// Lists every problem that would stop evaluation. Empty means evaluable.
pub fn validate(dataset: &RawDataset) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    for (j, spec) in dataset.schema().indicators().iter().enumerate() {
        let mut finite = Vec::new();
        for (id, cell) in dataset.entity_ids().iter().zip(dataset.column(j)) {
            match cell {
                None => findings.push(ValidationFinding::MissingValue {
                    indicator: spec.name.clone(),
                    entity_id: id.clone(),
                }),
                Some(v) if !v.is_finite() => findings.push(ValidationFinding::NonFiniteValue {
                    indicator: spec.name.clone(),
                    entity_id: id.clone(),
                }),
                Some(v) => finite.push(v),
            }
        }
        finite.sort_by(f64::total_cmp);
        finite.dedup();
        match finite.len() {
            0 => findings.push(ValidationFinding::TooFewDistinctValues {
                indicator: spec.name.clone(),
                distinct: 0,
            }),
            1 => findings.push(ValidationFinding::DegenerateColumn {
                indicator: spec.name.clone(),
            }),
            _ => {}
        }
    }
    findings
}
