#![allow(dead_code)]

use entrank::model::{Category, Direction, IndicatorSpec, RawDataset, Schema};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal};

pub fn random_schema<R: Rng>(rng: &mut R, m: usize) -> Schema {
    let categories = [
        Category::Profitability,
        Category::Solvency,
        Category::SustainableDevelopment,
        Category::Operation,
    ];
    Schema::new(
        (0..m)
            .map(|j| {
                let direction = if rng.random_bool(0.3) {
                    Direction::Inverse
                } else {
                    Direction::Positive
                };
                IndicatorSpec::new(
                    format!("ind_{j}"),
                    *categories.choose(rng).unwrap(),
                    direction,
                )
                .unwrap()
            })
            .collect(),
    )
    .unwrap()
}

/// One column drawn from a randomly chosen shape; never constant.
pub fn random_column<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let column: Vec<f64> = match rng.random_range(0..4) {
            0 => (0..n).map(|_| rng.random_range(-5.0..5.0)).collect(),
            1 => {
                let d = Normal::new(rng.random_range(-2.0..2.0), rng.random_range(0.1..3.0))
                    .unwrap();
                (0..n).map(|_| d.sample(rng)).collect()
            }
            2 => {
                let d = LogNormal::new(0.0, rng.random_range(0.2..1.5)).unwrap();
                (0..n).map(|_| d.sample(rng)).collect()
            }
            // Heavy ties, as with ratio data rounded to few decimals.
            _ => (0..n).map(|_| rng.random_range(0..6) as f64 * 0.25).collect(),
        };
        if column.iter().any(|&v| v != column[0]) {
            return column;
        }
    }
}

pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, m: usize) -> RawDataset {
    let schema = random_schema(rng, m);
    let columns: Vec<Vec<f64>> = (0..m).map(|_| random_column(rng, n)).collect();
    let rows = (0..n)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    let ids = (0..n).map(|i| format!("E{i:04}")).collect();
    RawDataset::from_complete(ids, rows, schema).unwrap()
}

pub fn complete_rows(dataset: &RawDataset) -> Vec<Vec<f64>> {
    dataset
        .values()
        .iter()
        .map(|r| r.iter().map(|v| v.unwrap()).collect())
        .collect()
}

/// Returns a copy of `dataset` with rows reordered so that new row `k` is old
/// row `perm[k]`.
pub fn permute_rows(dataset: &RawDataset, perm: &[usize]) -> RawDataset {
    let rows = complete_rows(dataset);
    RawDataset::from_complete(
        perm.iter().map(|&i| dataset.entity_ids()[i].clone()).collect(),
        perm.iter().map(|&i| rows[i].clone()).collect(),
        dataset.schema().clone(),
    )
    .unwrap()
}

/// CSV text for a complete or partially missing grid under `schema`.
pub fn to_csv(ids: &[String], rows: &[Vec<Option<f64>>], schema: &Schema) -> String {
    let mut out = String::from("entity_id");
    for spec in schema.indicators() {
        out.push(',');
        out.push_str(&spec.name);
    }
    out.push('\n');
    for (id, row) in ids.iter().zip(rows) {
        out.push_str(id);
        for cell in row {
            out.push(',');
            if let Some(v) = cell {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    out
}
