//! Text and CSV renderings of an evaluation.
//!
//! Text tables are for people: fixed decimals, aligned columns. CSV output
//! keeps full precision using Rust's shortest round-trip float formatting,
//! which always uses `.` as the decimal separator.

use crate::density::CdfEstimate;
use crate::ingest::{IngestReport, ENTITY_ID_HEADER};
use crate::model::{DescriptiveStats, EvaluationReport, NormalizedMatrix, Schema};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Align {
    Left,
    Right,
}

fn render_table(header: &[&str], align: &[Align], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
        let parts: Vec<String> = cells
            .zip(&widths)
            .zip(align)
            .map(|((c, &w), a)| match a {
                Align::Left => format!("{c:<w$}"),
                Align::Right => format!("{c:>w$}"),
            })
            .collect();
        parts.join("  ").trim_end().to_owned()
    };
    let mut out = line(&mut header.iter().copied());
    out.push('\n');
    let rule: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    out.push_str(&"-".repeat(rule));
    out.push('\n');
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
        out.push('\n');
    }
    out
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("writing to memory");
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

fn opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "undefined".to_owned(), |v| format!("{v:.decimals$}"))
}

/// Category, indicator, entropy and weight per row.
pub fn weights_text(schema: &Schema, report: &EvaluationReport) -> String {
    let rows: Vec<Vec<String>> = schema
        .indicators()
        .iter()
        .zip(report.entropies().as_slice())
        .zip(report.weights().as_slice())
        .map(|((spec, h), w)| {
            vec![
                spec.category.label().to_owned(),
                spec.display_label().to_owned(),
                format!("{h:.6}"),
                format!("{w:.6}"),
            ]
        })
        .collect();
    render_table(
        &["Category", "Indicator", "Entropy", "Weight"],
        &[Align::Left, Align::Left, Align::Right, Align::Right],
        &rows,
    )
}

pub fn weights_csv(schema: &Schema, report: &EvaluationReport) -> Vec<u8> {
    csv_bytes(
        &["category", "indicator", "direction", "entropy", "weight"],
        schema
            .indicators()
            .iter()
            .zip(report.entropies().as_slice())
            .zip(report.weights().as_slice())
            .map(|((spec, h), w)| {
                vec![
                    spec.category.to_string(),
                    spec.name.clone(),
                    spec.direction.to_string(),
                    h.to_string(),
                    w.to_string(),
                ]
            }),
    )
}

/// Ranking table; `top` limits the number of rows shown.
pub fn ranking_text(entity_ids: &[String], report: &EvaluationReport, top: Option<usize>) -> String {
    let shown = top.unwrap_or(usize::MAX);
    let rows: Vec<Vec<String>> = report
        .ranking()
        .iter()
        .take(shown)
        .enumerate()
        .map(|(pos, &i)| {
            vec![
                (pos + 1).to_string(),
                entity_ids[i].clone(),
                format!("{:.2}", report.scores()[i]),
            ]
        })
        .collect();
    render_table(
        &["Ranking", "Entity", "Score"],
        &[Align::Right, Align::Left, Align::Right],
        &rows,
    )
}

pub fn scores_csv(entity_ids: &[String], report: &EvaluationReport) -> Vec<u8> {
    csv_bytes(
        &["rank", ENTITY_ID_HEADER, "score"],
        report.ranking().iter().enumerate().map(|(pos, &i)| {
            vec![
                (pos + 1).to_string(),
                entity_ids[i].clone(),
                report.scores()[i].to_string(),
            ]
        }),
    )
}

fn stats_rows(stats: &DescriptiveStats, full: bool) -> Vec<(&'static str, String)> {
    let fmt = |v: f64, d: usize| if full { v.to_string() } else { format!("{v:.d$}") };
    let fmt_opt = |v: Option<f64>| {
        if full {
            v.map_or_else(|| "NA".to_owned(), |v| v.to_string())
        } else {
            opt(v, 8)
        }
    };
    vec![
        ("Mean", fmt(stats.mean, 8)),
        ("median", fmt(stats.median, 8)),
        ("Std. Dev", fmt(stats.std_dev, 8)),
        ("Kurtosis", fmt_opt(stats.kurtosis)),
        ("Skewness", fmt_opt(stats.skewness)),
        ("Smallest", fmt(stats.smallest, 2)),
        ("Largest", fmt(stats.largest, 2)),
        ("Obs", stats.obs.to_string()),
    ]
}

pub fn stats_text(stats: &DescriptiveStats) -> String {
    let rows: Vec<Vec<String>> = stats_rows(stats, false)
        .into_iter()
        .map(|(k, v)| vec![k.to_owned(), v])
        .collect();
    render_table(&["Statistic", "Value"], &[Align::Left, Align::Right], &rows)
}

pub fn stats_csv(stats: &DescriptiveStats) -> Vec<u8> {
    csv_bytes(
        &["statistic", "value"],
        stats_rows(stats, true)
            .into_iter()
            .map(|(k, v)| vec![k.to_owned(), v]),
    )
}

pub fn normalized_csv(entity_ids: &[String], matrix: &NormalizedMatrix) -> Vec<u8> {
    let mut header = vec![ENTITY_ID_HEADER];
    header.extend(matrix.schema().indicators().iter().map(|s| s.name.as_str()));
    csv_bytes(
        &header,
        entity_ids.iter().zip(matrix.rows()).map(|(id, row)| {
            std::iter::once(id.clone())
                .chain(row.iter().map(f64::to_string))
                .collect()
        }),
    )
}

/// Grid size used for CDF dumps.
pub const CDF_DUMP_POINTS: usize = 101;

pub fn cdf_csv(cdf: &CdfEstimate) -> Vec<u8> {
    csv_bytes(
        &["x", "phi"],
        cdf.grid(CDF_DUMP_POINTS)
            .into_iter()
            .map(|(x, y)| vec![x.to_string(), y.to_string()]),
    )
}

pub fn ingest_text(report: &IngestReport) -> String {
    let mut out = format!(
        "rows read: {}\nrows retained: {}\nrows dropped: {}\n",
        report.rows_read,
        report.rows_retained(),
        report.rows_dropped
    );
    if !report.dropped_ids.is_empty() {
        out.push_str(&format!("dropped: {}\n", report.dropped_ids.join(", ")));
    }
    out
}
