//! Direction-aware min-max rescaling of raw indicator columns onto [0, 1].
//!
//! Min and max are taken over entities within one indicator column.

use crate::model::{Direction, NormalizedMatrix, RawDataset};
use crate::par::Execution;
use crate::Error;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum NormalizeError {
    #[error("degenerate column (max = min = {0})")]
    DegenerateColumn(f64),
    #[error("non-finite value at row {0}")]
    NonFiniteInput(usize),
    #[error("missing value at row {0}")]
    MissingValue(usize),
    #[error("column has {0} values, at least 2 needed")]
    TooFewValues(usize),
}

fn range(column: &[f64]) -> Result<(f64, f64), NormalizeError> {
    if column.len() < 2 {
        return Err(NormalizeError::TooFewValues(column.len()));
    }
    if let Some(i) = column.iter().position(|v| !v.is_finite()) {
        return Err(NormalizeError::NonFiniteInput(i));
    }
    let min = column.iter().copied().fold(f64::INFINITY, f64::min);
    let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Err(NormalizeError::DegenerateColumn(min));
    }
    Ok((min, max))
}

/// `(r - min) / (max - min)`: min maps to 0, max to 1.
pub fn normalize_positive(column: &[f64]) -> Result<Vec<f64>, NormalizeError> {
    let (min, max) = range(column)?;
    let span = max - min;
    Ok(column.iter().map(|&r| (r - min) / span).collect())
}

/// `(max - r) / (max - min)`: min maps to 1, max to 0.
pub fn normalize_inverse(column: &[f64]) -> Result<Vec<f64>, NormalizeError> {
    let (min, max) = range(column)?;
    let span = max - min;
    Ok(column.iter().map(|&r| (max - r) / span).collect())
}

pub fn normalize_column(column: &[f64], direction: Direction) -> Result<Vec<f64>, NormalizeError> {
    match direction {
        Direction::Positive => normalize_positive(column),
        Direction::Inverse => normalize_inverse(column),
    }
}

/// Normalizes every column by its schema direction. Errors name the indicator.
pub fn normalize_matrix(dataset: &RawDataset, exec: Execution) -> Result<NormalizedMatrix, Error> {
    let schema = dataset.schema();
    let columns = exec.try_map_indexed(schema.len(), |j| {
        let spec = &schema.indicators()[j];
        let annotate = |source| Error::Normalize {
            indicator: spec.name.clone(),
            source,
        };
        let raw: Vec<f64> = dataset
            .column(j)
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or(NormalizeError::MissingValue(i)))
            .collect::<Result<_, _>>()
            .map_err(annotate)?;
        normalize_column(&raw, spec.direction).map_err(annotate)
    })?;
    let n = dataset.n_rows();
    let rows = (0..n)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    Ok(NormalizedMatrix::new(rows, schema.clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Category, IndicatorSpec, Schema};
    use proptest::prelude::*;

    #[test]
    fn positive_examples() {
        assert_eq!(normalize_positive(&[2.0, 4.0, 6.0]).unwrap(), [0.0, 0.5, 1.0]);
        assert_eq!(normalize_positive(&[-1.0, 0.0, 3.0]).unwrap(), [0.0, 0.25, 1.0]);
        assert_eq!(
            normalize_positive(&[5.0, 5.0, 5.0]),
            Err(NormalizeError::DegenerateColumn(5.0))
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(normalize_inverse(&[2.0, 4.0, 6.0]).unwrap(), [1.0, 0.5, 0.0]);
        assert_eq!(normalize_inverse(&[0.0, 1.0]).unwrap(), [1.0, 0.0]);
    }

    #[test]
    fn input_errors() {
        assert_eq!(
            normalize_positive(&[1.0, f64::NAN]),
            Err(NormalizeError::NonFiniteInput(1))
        );
        assert_eq!(
            normalize_inverse(&[f64::INFINITY, 1.0]),
            Err(NormalizeError::NonFiniteInput(0))
        );
        assert_eq!(normalize_positive(&[1.0]), Err(NormalizeError::TooFewValues(1)));
    }

    fn two_col_schema() -> Schema {
        Schema::new(vec![
            IndicatorSpec::new("up", Category::Profitability, Direction::Positive).unwrap(),
            IndicatorSpec::new("down", Category::Solvency, Direction::Inverse).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn matrix_example() {
        let ds = RawDataset::from_complete(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 10.0], vec![3.0, 20.0]],
            two_col_schema(),
        )
        .unwrap();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let m = normalize_matrix(&ds, exec).unwrap();
            assert_eq!(m.rows(), [vec![0.0, 1.0], vec![1.0, 0.0]]);
        }
    }

    #[test]
    fn matrix_error_names_indicator() {
        let ds = RawDataset::from_complete(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 7.0], vec![3.0, 7.0]],
            two_col_schema(),
        )
        .unwrap();
        let err = normalize_matrix(&ds, Execution::Sequential).unwrap_err();
        assert!(matches!(
            &err,
            Error::Normalize { indicator, source: NormalizeError::DegenerateColumn(_) }
                if indicator == "down"
        ));
        assert!(err.to_string().contains("down"));
    }

    proptest! {
        #[test]
        fn output_in_unit_interval_with_both_endpoints(
            column in prop::collection::vec(-1e6f64..1e6, 2..50)
        ) {
            prop_assume!(column.iter().any(|&v| v != column[0]));
            for out in [normalize_positive(&column).unwrap(), normalize_inverse(&column).unwrap()] {
                prop_assert!(out.iter().all(|v| (0.0..=1.0).contains(v)));
                prop_assert!(out.contains(&0.0));
                prop_assert!(out.contains(&1.0));
            }
        }

        #[test]
        fn inverse_is_positive_of_negation_and_dual(
            column in prop::collection::vec(-1e6f64..1e6, 2..50)
        ) {
            prop_assume!(column.iter().any(|&v| v != column[0]));
            let pos = normalize_positive(&column).unwrap();
            let inv = normalize_inverse(&column).unwrap();
            let negated: Vec<f64> = column.iter().map(|v| -v).collect();
            prop_assert_eq!(&inv, &normalize_positive(&negated).unwrap());
            for (p, q) in pos.iter().zip(&inv) {
                prop_assert!((p + q - 1.0).abs() <= 1e-12);
            }
        }

        #[test]
        fn row_permutation_equivariance(
            column in prop::collection::vec(-1e3f64..1e3, 2..30),
            seed in any::<u64>(),
        ) {
            prop_assume!(column.iter().any(|&v| v != column[0]));
            let mut perm: Vec<usize> = (0..column.len()).collect();
            // Fisher-Yates driven by a small LCG so the permutation is seed-determined.
            let mut state = seed;
            for i in (1..perm.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (state >> 33) as usize % (i + 1));
            }
            let permuted: Vec<f64> = perm.iter().map(|&i| column[i]).collect();
            let base = normalize_positive(&column).unwrap();
            let out = normalize_positive(&permuted).unwrap();
            for (k, &i) in perm.iter().enumerate() {
                prop_assert_eq!(out[k], base[i]);
            }
        }
    }
}
