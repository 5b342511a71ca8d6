//! Gaussian kernel estimate of an indicator's cumulative distribution on [0, 1].
//!
//! The estimate is the mean of per-sample Gaussian CDFs, which is monotone by
//! construction. With boundary correction the raw estimate is rescaled so
//! that it is exactly 0 at x = 0 and exactly 1 at x = 1.

use std::f64::consts::SQRT_2;

use statrs::function::erf::erfc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("at least 2 samples are needed, found {0}")]
    TooFewSamples(usize),
    #[error("sample {0} is not finite")]
    NonFiniteSample(usize),
    #[error("all samples are equal; bandwidth is undefined")]
    AllSamplesEqual,
    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("bandwidth {0} is too wide to separate the interval endpoints")]
    DegenerateCdf(f64),
}

/// Anything that can be evaluated as a CDF on [0, 1].
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Cdf for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>, DensityError> {
    if samples.len() < 2 {
        return Err(DensityError::TooFewSamples(samples.len()));
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(DensityError::NonFiniteSample(i));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Linear-interpolation quantile of sorted data (`(n - 1) p` positioning).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Silverman's rule of thumb, `0.9 · min(σ, IQR / 1.34) · n^(-1/5)`.
///
/// σ is the sample standard deviation (n - 1 denominator). If one operand of
/// the `min` is zero, the other is used.
pub fn select_bandwidth(samples: &[f64]) -> Result<f64, DensityError> {
    let sorted = sorted_finite(samples)?;
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread_iqr = iqr / 1.34;
    let spread = match (sd > 0.0, spread_iqr > 0.0) {
        (true, true) => sd.min(spread_iqr),
        (true, false) => sd,
        (false, true) => spread_iqr,
        (false, false) => return Err(DensityError::AllSamplesEqual),
    };
    Ok(0.9 * spread * n.powf(-0.2))
}

/// Kernel CDF estimate over a fixed sample. Immutable and `Sync`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfEstimate {
    // Sorted so that evaluation does not depend on input row order.
    samples: Vec<f64>,
    bandwidth: f64,
    boundary_correction: bool,
    raw_at_zero: f64,
    raw_span: f64,
}

impl CdfEstimate {
    pub fn support_samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn boundary_correction(&self) -> bool {
        self.boundary_correction
    }

    /// Uncorrected estimate `(1/n) Σ Φ((x - s_i) / h)`.
    pub fn raw(&self, x: f64) -> f64 {
        raw_kernel_cdf(&self.samples, self.bandwidth, x)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let raw = self.raw(x);
        let v = if self.boundary_correction {
            (raw - self.raw_at_zero) / self.raw_span
        } else {
            raw
        };
        v.clamp(0.0, 1.0)
    }

    /// `(x, φ(x))` on `points` evenly spaced nodes from 0 to 1 inclusive.
    pub fn grid(&self, points: usize) -> Vec<(f64, f64)> {
        let last = points.saturating_sub(1).max(1) as f64;
        (0..points)
            .map(|k| {
                let x = k as f64 / last;
                (x, self.evaluate(x))
            })
            .collect()
    }
}

impl Cdf for CdfEstimate {
    fn cdf(&self, x: f64) -> f64 {
        self.evaluate(x)
    }
}

fn raw_kernel_cdf(sorted: &[f64], h: f64, x: f64) -> f64 {
    let sum: f64 = sorted.iter().map(|&s| std_normal_cdf((x - s) / h)).sum();
    sum / sorted.len() as f64
}

pub fn estimate_cdf(
    samples: &[f64],
    bandwidth: f64,
    boundary_correction: bool,
) -> Result<CdfEstimate, DensityError> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(DensityError::InvalidBandwidth(bandwidth));
    }
    let samples = sorted_finite(samples)?;
    let raw_at_zero = raw_kernel_cdf(&samples, bandwidth, 0.0);
    let raw_span = raw_kernel_cdf(&samples, bandwidth, 1.0) - raw_at_zero;
    if boundary_correction && (raw_span.is_nan() || raw_span <= 0.0) {
        return Err(DensityError::DegenerateCdf(bandwidth));
    }
    Ok(CdfEstimate {
        samples,
        bandwidth,
        boundary_correction,
        raw_at_zero,
        raw_span,
    })
}
