//! Indicator entropies and the weights derived from them.
//!
//! The continuous entropy of an indicator is `H = -e ∫₀¹ φ(x) ln φ(x) dx`,
//! where φ is the indicator's estimated CDF. It lies in [0, 1] because
//! `0 ≤ -φ ln φ ≤ 1/e` pointwise. The discrete Shannon form over the
//! normalized column is kept as a baseline.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::density::Cdf;
use crate::model::{EntropyVector, ModelError, WeightVector};

/// Quadrature results may exceed [0, 1] by this much before it is an error.
pub const QUADRATURE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("quadrature points must be odd and at least 3, got {0}")]
    InvalidPoints(usize),
    #[error("integrand cutoff must lie in (0, 1e-6], got {0}")]
    InvalidEpsilon(f64),
    #[error("entropy {0} is outside [0, 1]; the CDF is not valid")]
    QuadratureOutOfRange(f64),
    #[error("column sums to zero")]
    ZeroColumn,
    #[error("column entry {0} is negative or not finite")]
    InvalidColumnValue(usize),
    #[error("at least 2 values are needed, found {0}")]
    TooFewValues(usize),
    #[error("no indicators to weight")]
    NoIndicators,
    #[error("entropy {value} of indicator {index} is negative or not finite")]
    InvalidEntropy { index: usize, value: f64 },
    #[error("all entropies are zero; no indicator carries weight")]
    AllZeroEntropy,
    #[error("all entropies equal 1; no indicator diverges under the classic rule")]
    NoDivergence,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Composite Simpson grid on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    points: usize,
    epsilon: f64,
}

impl QuadratureConfig {
    pub const DEFAULT_POINTS: usize = 10_001;
    pub const DEFAULT_EPSILON: f64 = 1e-12;

    pub fn new(points: usize, epsilon: f64) -> Result<Self, EntropyError> {
        if points < 3 || points.is_multiple_of(2) {
            return Err(EntropyError::InvalidPoints(points));
        }
        if !(epsilon > 0.0 && epsilon <= 1e-6) {
            return Err(EntropyError::InvalidEpsilon(epsilon));
        }
        Ok(QuadratureConfig { points, epsilon })
    }

    pub fn with_points(points: usize) -> Result<Self, EntropyError> {
        Self::new(points, Self::DEFAULT_EPSILON)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Same cutoff, twice as many intervals.
    pub fn refined(&self) -> Self {
        QuadratureConfig {
            points: 2 * (self.points - 1) + 1,
            epsilon: self.epsilon,
        }
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            points: Self::DEFAULT_POINTS,
            epsilon: Self::DEFAULT_EPSILON,
        }
    }
}

/// Composite Simpson's rule for `f` on [0, 1] with `points` nodes (odd).
fn simpson_unit<F: Fn(f64) -> f64>(f: F, points: usize) -> f64 {
    let intervals = points - 1;
    let step = 1.0 / intervals as f64;
    let mut sum = f(0.0) + f(1.0);
    for k in 1..intervals {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(k as f64 * step);
    }
    sum * step / 3.0
}

/// `-e ∫₀¹ φ ln φ dx`, with the integrand taken as 0 where `φ ≤ epsilon`.
pub fn continuous_entropy<C: Cdf + ?Sized>(
    cdf: &C,
    config: &QuadratureConfig,
) -> Result<f64, EntropyError> {
    let eps = config.epsilon;
    let integral = simpson_unit(
        |x| {
            let p = cdf.cdf(x);
            if p <= eps {
                0.0
            } else {
                p * p.ln()
            }
        },
        config.points,
    );
    let h = -E * integral;
    if !(-QUADRATURE_SLACK..=1.0 + QUADRATURE_SLACK).contains(&h) {
        return Err(EntropyError::QuadratureOutOfRange(h));
    }
    Ok(h.clamp(0.0, 1.0))
}

/// Normalized Shannon entropy `-(1/ln n) Σ p ln p` with `p_i = s_i / Σ s`.
pub fn discrete_entropy(column: &[f64]) -> Result<f64, EntropyError> {
    let n = column.len();
    if n < 2 {
        return Err(EntropyError::TooFewValues(n));
    }
    if let Some(i) = column.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(EntropyError::InvalidColumnValue(i));
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total <= 0.0 {
        return Err(EntropyError::ZeroColumn);
    }
    let plogp: f64 = sorted
        .iter()
        .map(|&s| s / total)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum();
    Ok((-plogp / (n as f64).ln()).clamp(0.0, 1.0))
}

/// How entropies map to weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightRule {
    /// `w ∝ H`: more dispersed indicators weigh more.
    #[default]
    Paper,
    /// `w ∝ 1 - H`, the conventional entropy weight method.
    Classic,
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightRule::Paper => "paper",
            WeightRule::Classic => "classic",
        })
    }
}

impl FromStr for WeightRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(WeightRule::Paper),
            "classic" => Ok(WeightRule::Classic),
            other => Err(format!("unknown weight rule `{other}` (expected paper|classic)")),
        }
    }
}

/// `w_j = H_j / Σ H_k`.
pub fn compute_weights(entropies: &EntropyVector) -> Result<WeightVector, EntropyError> {
    compute_weights_with(entropies, WeightRule::Paper)
}

pub fn compute_weights_with(
    entropies: &EntropyVector,
    rule: WeightRule,
) -> Result<WeightVector, EntropyError> {
    weights_from_raw(entropies.as_slice(), rule)
}

/// Weight computation on a plain slice; entropies need only be finite and
/// non-negative here, which lets unrounded external values through.
pub fn weights_from_raw(entropies: &[f64], rule: WeightRule) -> Result<WeightVector, EntropyError> {
    if entropies.is_empty() {
        return Err(EntropyError::NoIndicators);
    }
    for (index, &value) in entropies.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(EntropyError::InvalidEntropy { index, value });
        }
    }
    let scores: Vec<f64> = match rule {
        WeightRule::Paper => entropies.to_vec(),
        WeightRule::Classic => entropies.iter().map(|h| (1.0 - h).max(0.0)).collect(),
    };
    // Left-to-right in indicator order.
    let total = scores.iter().fold(0.0, |acc, v| acc + v);
    if total <= 0.0 {
        return Err(match rule {
            WeightRule::Paper => EntropyError::AllZeroEntropy,
            WeightRule::Classic => EntropyError::NoDivergence,
        });
    }
    Ok(WeightVector::new(
        scores.into_iter().map(|v| v / total).collect(),
    )?)
}
