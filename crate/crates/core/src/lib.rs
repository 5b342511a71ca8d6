//! Entropy-weighted composite scoring of entities described by numeric
//! indicators.
//!
//! The pipeline min-max normalizes each indicator by its direction, estimates
//! each indicator's CDF with a Gaussian kernel, integrates `-e φ ln φ` over
//! [0, 1] to get a continuous entropy, sets weights proportional to those
//! entropies, and scores each entity as the weighted sum of its normalized
//! indicators on a 0-100 scale.
//!
//! ```
//! use entrank::model::{Category, Direction, IndicatorSpec, RawDataset, Schema};
//! use entrank::scoring::{evaluate, EvaluateOptions};
//!
//! let schema = Schema::new(vec![
//!     IndicatorSpec::new("roa", Category::Profitability, Direction::Positive).unwrap(),
//!     IndicatorSpec::new("leverage", Category::Solvency, Direction::Inverse).unwrap(),
//! ])
//! .unwrap();
//! let data = RawDataset::from_complete(
//!     vec!["a".into(), "b".into(), "c".into()],
//!     vec![vec![0.05, 0.7], vec![0.12, 0.4], vec![0.02, 0.9]],
//!     schema,
//! )
//! .unwrap();
//! let report = evaluate(&data, &EvaluateOptions::default()).unwrap();
//! assert_eq!(report.ranking(), [1, 0, 2]);
//! ```

pub mod cli;
pub mod density;
pub mod entropy;
pub mod ingest;
pub mod model;
pub mod normalize;
pub mod par;
pub mod report;
pub mod scoring;

use thiserror::Error;

pub use par::Execution;

/// Pipeline error carrying the indicator it arose in, where there is one.
#[derive(Debug, Error)]
pub enum Error {
    #[error("indicator `{indicator}`: {source}")]
    Normalize {
        indicator: String,
        source: normalize::NormalizeError,
    },
    #[error("indicator `{indicator}`: density estimation failed: {source}")]
    Density {
        indicator: String,
        source: density::DensityError,
    },
    #[error("indicator `{indicator}`: entropy failed: {source}")]
    Entropy {
        indicator: String,
        source: entropy::EntropyError,
    },
    #[error("weights: {0}")]
    Weights(#[source] entropy::EntropyError),
    #[error(transparent)]
    Scoring(#[from] scoring::ScoringError),
    #[error(transparent)]
    Model(#[from] model::ModelError),
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
}
