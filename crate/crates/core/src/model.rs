//! Shared domain types and the bundled indicator schema.
//!
//! Every type validates its invariants in its constructor, so a value that
//! exists is a value that is usable downstream.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Version tag of the bundled default schema, reported by `--version`.
pub const DEFAULT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("schema must contain at least one indicator")]
    EmptySchema,
    #[error("indicator name must not be empty")]
    EmptyIndicatorName,
    #[error("duplicate indicator name `{0}`")]
    DuplicateIndicator(String),
    #[error("grid has {rows} rows but {ids} entity ids")]
    RowCountMismatch { rows: usize, ids: usize },
    #[error("row {row} has {found} cells, schema has {expected} indicators")]
    ColumnCountMismatch {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("dataset needs at least 2 rows, found {0}")]
    TooFewRows(usize),
    #[error("normalized value {value} at row {row}, indicator `{indicator}` is outside [0, 1]")]
    NormalizedOutOfRange {
        row: usize,
        indicator: String,
        value: f64,
    },
    #[error("normalized column `{0}` does not attain both 0 and 1")]
    NormalizedEndpointsMissing(String),
    #[error("entropy {value} for indicator {index} is outside [0, 1]")]
    EntropyOutOfRange { index: usize, value: f64 },
    #[error("weight {value} for indicator {index} is negative or not finite")]
    InvalidWeight { index: usize, value: f64 },
    #[error("weights sum to {0}, expected 1")]
    WeightsNotNormalized(f64),
    #[error("score {value} of entity {index} is outside [0, {scale}]")]
    ScoreOutOfRange { index: usize, value: f64, scale: f64 },
    #[error("ranking is not a permutation of 0..{0}")]
    InvalidRanking(usize),
    #[error("scores increase along the ranking at position {0}")]
    RankingNotSorted(usize),
    #[error("descriptive statistics are inconsistent: {0}")]
    InconsistentStats(&'static str),
    #[error("malformed schema file: {0}")]
    SchemaFormat(String),
}

/// Indicator family. Carried as metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Profitability,
    Solvency,
    SustainableDevelopment,
    Operation,
}

impl Category {
    pub fn label(self) -> &'static str {
        match self {
            Category::Profitability => "Profitability capability",
            Category::Solvency => "Solvency",
            Category::SustainableDevelopment => "Capacity for sustainable development",
            Category::Operation => "Operation capacity",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Profitability => "profitability",
            Category::Solvency => "solvency",
            Category::SustainableDevelopment => "sustainable_development",
            Category::Operation => "operation",
        })
    }
}

/// Whether a larger raw value is better (`Positive`) or worse (`Inverse`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Positive,
    Inverse,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Positive => "positive",
            Direction::Inverse => "inverse",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorSpec {
    pub name: String,
    pub category: Category,
    pub direction: Direction,
    /// Human-readable label for reports; falls back to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl IndicatorSpec {
    pub fn new(
        name: impl Into<String>,
        category: Category,
        direction: Direction,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(ModelError::EmptyIndicatorName);
        }
        Ok(IndicatorSpec {
            name,
            category,
            direction,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }
}

/// Ordered, non-empty list of uniquely named indicators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schema {
    #[serde(rename = "indicator")]
    indicators: Vec<IndicatorSpec>,
}

#[derive(Deserialize)]
struct SchemaFile {
    #[serde(default)]
    indicator: Vec<IndicatorSpec>,
}

impl Schema {
    pub fn new(indicators: Vec<IndicatorSpec>) -> Result<Self, ModelError> {
        if indicators.is_empty() {
            return Err(ModelError::EmptySchema);
        }
        let mut seen = HashSet::with_capacity(indicators.len());
        for spec in &indicators {
            if spec.name.trim().is_empty() {
                return Err(ModelError::EmptyIndicatorName);
            }
            if !seen.insert(spec.name.as_str()) {
                return Err(ModelError::DuplicateIndicator(spec.name.clone()));
            }
        }
        Ok(Schema { indicators })
    }

    pub fn indicators(&self) -> &[IndicatorSpec] {
        &self.indicators
    }

    pub fn len(&self) -> usize {
        self.indicators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indicators.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.indicators.iter().position(|s| s.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&IndicatorSpec> {
        self.indicators.iter().find(|s| s.name == name)
    }

    /// Serializes to the TOML config form, one `[[indicator]]` table per entry.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("schema serialization is infallible")
    }

    pub fn from_toml(text: &str) -> Result<Self, ModelError> {
        let file: SchemaFile =
            toml::from_str(text).map_err(|e| ModelError::SchemaFormat(e.to_string()))?;
        Schema::new(file.indicator)
    }
}

impl FromStr for Schema {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::from_toml(s)
    }
}

/// The 17 financial competitiveness indicators, grouped into four categories.
/// `debt_asset_ratio` and `capital_intensity` are inverse; the rest positive.
pub fn default_schema() -> Schema {
    use Category::*;
    use Direction::*;
    const ROWS: [(&str, &str, Category, Direction); 17] = [
        ("operating_profit_ratio", "Operating profit ratio", Profitability, Positive),
        ("return_on_assets", "Return on assets", Profitability, Positive),
        ("return_on_invested_capital", "Return on invested capital", Profitability, Positive),
        ("debt_coverage_ratio", "Debt coverage ratio", Solvency, Positive),
        ("current_ratio", "Current ratio", Solvency, Positive),
        (
            "operating_cash_flow_to_operating_profit_ratio",
            "Operating cash flow to operating profit ratio",
            Solvency,
            Positive,
        ),
        ("debt_asset_ratio", "Debt asset ratio", Solvency, Inverse),
        ("sustainable_growth_rate", "Sustainable growth rate", SustainableDevelopment, Positive),
        (
            "hedging_and_proliferating_ratios",
            "Hedging and proliferating ratios",
            SustainableDevelopment,
            Positive,
        ),
        ("total_assets_growth_rate", "Total assets growth rate", SustainableDevelopment, Positive),
        ("revenue_growth_rate", "Revenue growth rate", SustainableDevelopment, Positive),
        ("net_profit_growth_rate", "Net profit growth rate", SustainableDevelopment, Positive),
        ("receivables_turnover", "Receivables turnover", Operation, Positive),
        ("inventory_turnover", "Inventory turnover", Operation, Positive),
        ("total_assets_turnover", "Total assets turnover", Operation, Positive),
        ("rate_of_cost_profit", "Rate of cost-profit", Operation, Positive),
        ("capital_intensity", "Capital intensity", Operation, Inverse),
    ];
    let indicators = ROWS
        .iter()
        .map(|&(name, label, category, direction)| IndicatorSpec {
            name: name.to_owned(),
            category,
            direction,
            label: Some(label.to_owned()),
        })
        .collect();
    Schema::new(indicators).expect("default schema is valid")
}

/// Entity ids plus the raw n×m grid, with `None` marking a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    entity_ids: Vec<String>,
    values: Vec<Vec<Option<f64>>>,
    schema: Schema,
}

impl RawDataset {
    pub fn new(
        entity_ids: Vec<String>,
        values: Vec<Vec<Option<f64>>>,
        schema: Schema,
    ) -> Result<Self, ModelError> {
        if values.len() != entity_ids.len() {
            return Err(ModelError::RowCountMismatch {
                rows: values.len(),
                ids: entity_ids.len(),
            });
        }
        if values.len() < 2 {
            return Err(ModelError::TooFewRows(values.len()));
        }
        let m = schema.len();
        if let Some((row, r)) = values.iter().enumerate().find(|(_, r)| r.len() != m) {
            return Err(ModelError::ColumnCountMismatch {
                row,
                found: r.len(),
                expected: m,
            });
        }
        Ok(RawDataset {
            entity_ids,
            values,
            schema,
        })
    }

    /// Convenience constructor for a fully observed grid.
    pub fn from_complete(
        entity_ids: Vec<String>,
        values: Vec<Vec<f64>>,
        schema: Schema,
    ) -> Result<Self, ModelError> {
        let values = values
            .into_iter()
            .map(|row| row.into_iter().map(Some).collect())
            .collect();
        RawDataset::new(entity_ids, values, schema)
    }

    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    pub fn values(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_indicators(&self) -> usize {
        self.schema.len()
    }

    /// Column `j` as raw options, in row order.
    pub fn column(&self, j: usize) -> Vec<Option<f64>> {
        self.values.iter().map(|row| row[j]).collect()
    }
}

/// The dimensionless n×m matrix: entries in [0, 1], each column hits 0 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    values: Vec<Vec<f64>>,
    schema: Schema,
}

impl NormalizedMatrix {
    pub fn new(values: Vec<Vec<f64>>, schema: Schema) -> Result<Self, ModelError> {
        let m = schema.len();
        if values.len() < 2 {
            return Err(ModelError::TooFewRows(values.len()));
        }
        for (row, r) in values.iter().enumerate() {
            if r.len() != m {
                return Err(ModelError::ColumnCountMismatch {
                    row,
                    found: r.len(),
                    expected: m,
                });
            }
            for (j, &v) in r.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(ModelError::NormalizedOutOfRange {
                        row,
                        indicator: schema.indicators()[j].name.clone(),
                        value: v,
                    });
                }
            }
        }
        for (j, spec) in schema.indicators().iter().enumerate() {
            let has_zero = values.iter().any(|r| r[j] == 0.0);
            let has_one = values.iter().any(|r| r[j] == 1.0);
            if !(has_zero && has_one) {
                return Err(ModelError::NormalizedEndpointsMissing(spec.name.clone()));
            }
        }
        Ok(NormalizedMatrix { values, schema })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.values.len()
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyVector(Vec<f64>);

impl EntropyVector {
    pub fn new(entropies: Vec<f64>) -> Result<Self, ModelError> {
        for (index, &value) in entropies.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ModelError::EntropyOutOfRange { index, value });
            }
        }
        Ok(EntropyVector(entropies))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Tolerance on `Σ w = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self, ModelError> {
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::InvalidWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(ModelError::WeightsNotNormalized(sum));
        }
        Ok(WeightVector(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Summary of the score distribution. Skewness and kurtosis are `None`
/// when undefined (fewer than four observations or zero variance).
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveStats {
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    pub kurtosis: Option<f64>,
    pub skewness: Option<f64>,
    pub smallest: f64,
    pub largest: f64,
    pub obs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    entropies: EntropyVector,
    weights: WeightVector,
    scores: Vec<f64>,
    ranking: Vec<usize>,
    stats: DescriptiveStats,
    scale: f64,
}

impl EvaluationReport {
    pub fn new(
        entropies: EntropyVector,
        weights: WeightVector,
        scores: Vec<f64>,
        ranking: Vec<usize>,
        stats: DescriptiveStats,
        scale: f64,
    ) -> Result<Self, ModelError> {
        let n = scores.len();
        for (index, &value) in scores.iter().enumerate() {
            if !(0.0..=scale).contains(&value) {
                return Err(ModelError::ScoreOutOfRange {
                    index,
                    value,
                    scale,
                });
            }
        }
        let mut seen = vec![false; n];
        if ranking.len() != n {
            return Err(ModelError::InvalidRanking(n));
        }
        for &i in &ranking {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(ModelError::InvalidRanking(n));
            }
        }
        if let Some(pos) = ranking
            .windows(2)
            .position(|w| scores[w[0]] < scores[w[1]])
        {
            return Err(ModelError::RankingNotSorted(pos + 1));
        }
        if stats.obs != n {
            return Err(ModelError::InconsistentStats("obs differs from score count"));
        }
        if !(stats.smallest <= stats.median && stats.median <= stats.largest) {
            return Err(ModelError::InconsistentStats("median outside [smallest, largest]"));
        }
        Ok(EvaluationReport {
            entropies,
            weights,
            scores,
            ranking,
            stats,
            scale,
        })
    }

    pub fn entropies(&self) -> &EntropyVector {
        &self.entropies
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn stats(&self) -> &DescriptiveStats {
        &self.stats
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}
