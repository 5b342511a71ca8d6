//! Composite scores, rankings, descriptive statistics, and the end-to-end
//! evaluation pipeline.

use std::fmt;
use std::str::FromStr;


use crate::density::{estimate_cdf, select_bandwidth, CdfEstimate};
use crate::entropy::{
    compute_weights_with, continuous_entropy, discrete_entropy, QuadratureConfig, WeightRule,
};
use crate::model::{
    DescriptiveStats, EntropyVector, EvaluationReport, NormalizedMatrix, RawDataset, WeightVector,
};
use crate::normalize::normalize_matrix;
use crate::par::Execution;
use crate::Error;

pub const DEFAULT_SCALE: f64 = 100.0;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ScoringError {
    #[error("matrix has {columns} indicators but {weights} weights were given")]
    DimensionMismatch { columns: usize, weights: usize },
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
}

/// `F_i = scale · Σ_j w_j s_ij`.
///
/// The weighted sum is divided by the floating-point sum of the weights, which
/// is 1 up to rounding, so that a row of all ones scores exactly `scale`.
pub fn composite_scores(
    matrix: &NormalizedMatrix,
    weights: &WeightVector,
    scale: f64,
    exec: Execution,
) -> Result<Vec<f64>, ScoringError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(ScoringError::InvalidScale(scale));
    }
    let w = weights.as_slice();
    if matrix.n_cols() != w.len() {
        return Err(ScoringError::DimensionMismatch {
            columns: matrix.n_cols(),
            weights: w.len(),
        });
    }
    let total = w.iter().fold(0.0, |acc, v| acc + v);
    let rows = matrix.rows();
    Ok(exec.map_indexed(rows.len(), |i| {
        let weighted = rows[i]
            .iter()
            .zip(w)
            .fold(0.0, |acc, (s, w)| acc + w * s);
        scale * (weighted / total)
    }))
}

/// Indices by descending score; ties keep input order.
pub fn rank(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Mean, median, sample standard deviation (n - 1), bias-corrected sample
/// skewness and excess kurtosis, extremes and count.
///
/// Skewness and kurtosis are `None` for fewer than four observations or when
/// all values are equal. An empty slice yields NaN fields and `obs = 0`.
pub fn describe(scores: &[f64]) -> DescriptiveStats {
    let n = scores.len();
    if n == 0 {
        return DescriptiveStats {
            mean: f64::NAN,
            median: f64::NAN,
            std_dev: f64::NAN,
            kurtosis: None,
            skewness: None,
            smallest: f64::NAN,
            largest: f64::NAN,
            obs: 0,
        };
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let smallest = sorted[0];
    let largest = sorted[n - 1];
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let nf = n as f64;
    let mean = sorted.iter().sum::<f64>() / nf;
    if smallest == largest {
        return DescriptiveStats {
            mean: smallest,
            median,
            std_dev: 0.0,
            kurtosis: None,
            skewness: None,
            smallest,
            largest,
            obs: n,
        };
    }

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in &sorted {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let std_dev = if n > 1 { (m2 / (nf - 1.0)).sqrt() } else { f64::NAN };
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    let (skewness, kurtosis) = if n >= 4 {
        let g1 = m3 / m2.powf(1.5);
        let g2 = m4 / (m2 * m2) - 3.0;
        let skew = (nf * (nf - 1.0)).sqrt() / (nf - 2.0) * g1;
        let kurt = (nf - 1.0) / ((nf - 2.0) * (nf - 3.0)) * ((nf + 1.0) * g2 + 6.0);
        (Some(skew), Some(kurt))
    } else {
        (None, None)
    };

    DescriptiveStats {
        mean,
        median,
        std_dev,
        kurtosis,
        skewness,
        smallest,
        largest,
        obs: n,
    }
}

/// Which entropy feeds the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyMethod {
    /// Kernel CDF plus quadrature.
    #[default]
    Continuous,
    /// Normalized Shannon entropy of the normalized column.
    Discrete,
}

impl fmt::Display for EntropyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntropyMethod::Continuous => "continuous",
            EntropyMethod::Discrete => "discrete",
        })
    }
}

impl FromStr for EntropyMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continuous" => Ok(EntropyMethod::Continuous),
            "discrete" => Ok(EntropyMethod::Discrete),
            other => Err(format!(
                "unknown method `{other}` (expected continuous|discrete)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    #[default]
    Silverman,
    Fixed(f64),
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Silverman => f.write_str("silverman"),
            Bandwidth::Fixed(h) => write!(f, "{h}"),
        }
    }
}

impl FromStr for Bandwidth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("silverman") {
            return Ok(Bandwidth::Silverman);
        }
        match s.parse::<f64>() {
            Ok(h) if h.is_finite() && h > 0.0 => Ok(Bandwidth::Fixed(h)),
            _ => Err(format!(
                "bandwidth must be `silverman` or a positive number, got `{s}`"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluateOptions {
    pub method: EntropyMethod,
    pub weight_rule: WeightRule,
    pub bandwidth: Bandwidth,
    pub boundary_correction: bool,
    pub quadrature: QuadratureConfig,
    pub scale: f64,
    pub execution: Execution,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        EvaluateOptions {
            method: EntropyMethod::Continuous,
            weight_rule: WeightRule::Paper,
            bandwidth: Bandwidth::Silverman,
            boundary_correction: true,
            quadrature: QuadratureConfig::default(),
            scale: DEFAULT_SCALE,
            execution: Execution::Parallel,
        }
    }
}

/// Report plus the intermediate artifacts the CLI can dump.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub normalized: NormalizedMatrix,
    /// One estimate per indicator; empty for the discrete method.
    pub cdfs: Vec<CdfEstimate>,
    pub report: EvaluationReport,
}

pub fn evaluate(dataset: &RawDataset, options: &EvaluateOptions) -> Result<EvaluationReport, Error> {
    evaluate_detailed(dataset, options).map(|e| e.report)
}

fn indicator_cdf(
    column: &[f64],
    options: &EvaluateOptions,
) -> Result<CdfEstimate, crate::density::DensityError> {
    let h = match options.bandwidth {
        Bandwidth::Silverman => select_bandwidth(column)?,
        Bandwidth::Fixed(h) => h,
    };
    estimate_cdf(column, h, options.boundary_correction)
}

/// normalize → kernel CDF → entropy → weights → scores, ranking, statistics.
pub fn evaluate_detailed(
    dataset: &RawDataset,
    options: &EvaluateOptions,
) -> Result<Evaluation, Error> {
    if !(options.scale.is_finite() && options.scale > 0.0) {
        return Err(ScoringError::InvalidScale(options.scale).into());
    }
    let exec = options.execution;
    let normalized = normalize_matrix(dataset, exec)?;
    let schema = normalized.schema();
    let name = |j: usize| schema.indicators()[j].name.clone();

    let (entropies, cdfs) = match options.method {
        EntropyMethod::Continuous => {
            let per_indicator = exec.try_map_indexed(normalized.n_cols(), |j| {
                let column = normalized.column(j);
                let cdf = indicator_cdf(&column, options).map_err(|source| Error::Density {
                    indicator: name(j),
                    source,
                })?;
                let h = continuous_entropy(&cdf, &options.quadrature).map_err(|source| {
                    Error::Entropy {
                        indicator: name(j),
                        source,
                    }
                })?;
                Ok::<_, Error>((h, cdf))
            })?;
            per_indicator.into_iter().unzip()
        }
        EntropyMethod::Discrete => {
            let h = exec.try_map_indexed(normalized.n_cols(), |j| {
                discrete_entropy(&normalized.column(j)).map_err(|source| Error::Entropy {
                    indicator: name(j),
                    source,
                })
            })?;
            (h, Vec::new())
        }
    };
    let entropies = EntropyVector::new(entropies)?;
    let weights = compute_weights_with(&entropies, options.weight_rule).map_err(Error::Weights)?;
    let scores = composite_scores(&normalized, &weights, options.scale, exec)?;
    let ranking = rank(&scores);
    let stats = describe(&scores);
    let report = EvaluationReport::new(entropies, weights, scores, ranking, stats, options.scale)?;
    Ok(Evaluation {
        normalized,
        cdfs,
        report,
    })
}
