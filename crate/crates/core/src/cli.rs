//! Command-line front end.
//!
//! Exit codes: 0 success, 1 data errors, 2 usage or configuration errors.
//! Flag values override `--config` file values, which override defaults.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::entropy::{QuadratureConfig, WeightRule};
use crate::ingest::{parse_csv, validate, IngestReport};
use crate::model::{default_schema, RawDataset, Schema, DEFAULT_SCHEMA_VERSION};
use crate::par::{with_threads, Execution};
use crate::report;
use crate::scoring::{evaluate_detailed, Bandwidth, EntropyMethod, EvaluateOptions, DEFAULT_SCALE};

// Keep the schema tag in step with DEFAULT_SCHEMA_VERSION.
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (default schema v1)");

#[derive(Debug, Parser)]
#[command(
    name = "entrank",
    version = VERSION,
    about = "Entropy-weighted scoring and ranking of entities by numeric indicators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute weights, scores, ranking and score statistics.
    Evaluate(EvaluateArgs),
    /// Compute and print indicator entropies and weights.
    Weights(WeightsArgs),
    /// Check an input file without evaluating it.
    Validate(InputArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV file with an `entity_id` column followed by indicator columns.
    #[arg(long)]
    input: PathBuf,
    /// Schema TOML file, or `default` for the bundled 17-indicator schema.
    #[arg(long)]
    schema: Option<String>,
    /// TOML file with default values for any of the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    Paper,
    Classic,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum)]
    weight_rule: Option<RuleArg>,
    /// `silverman` or a positive number.
    #[arg(long)]
    bandwidth: Option<String>,
    #[arg(long)]
    no_boundary_correction: bool,
    /// Odd number of Simpson nodes on [0, 1].
    #[arg(long)]
    quadrature_points: Option<usize>,
    #[arg(long)]
    scale: Option<f64>,
    /// Worker threads; defaults to the number of available processors.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Directory for weights.csv, scores.csv and stats.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write the normalized matrix; without a path, to <out-dir>/normalized.csv.
    #[arg(long, num_args = 0..=1)]
    dump_normalized: Option<Option<PathBuf>>,
    /// Write cdf_<indicator>.csv files; without a directory, into <out-dir>.
    #[arg(long, num_args = 0..=1)]
    dump_cdf: Option<Option<PathBuf>>,
    /// Show only the first N ranked entities in the text report.
    #[arg(long)]
    top: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
}

#[derive(Debug, Args)]
struct WeightsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
}

/// Values accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    schema: Option<String>,
    method: Option<String>,
    weight_rule: Option<String>,
    bandwidth: Option<String>,
    boundary_correction: Option<bool>,
    quadrature_points: Option<usize>,
    scale: Option<f64>,
    out_dir: Option<PathBuf>,
    threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchemaSource {
    Default,
    File(PathBuf),
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub schema: SchemaSource,
    pub method: EntropyMethod,
    pub weight_rule: WeightRule,
    pub bandwidth: Bandwidth,
    pub boundary_correction: bool,
    pub quadrature_points: usize,
    pub scale: f64,
    pub out_dir: Option<PathBuf>,
    pub dump_normalized: Option<PathBuf>,
    pub dump_cdf: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn evaluate_options(&self) -> Result<EvaluateOptions, String> {
        let quadrature = QuadratureConfig::with_points(self.quadrature_points).map_err(|e| {
            format!("--quadrature-points: {e}")
        })?;
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(format!("--scale must be positive, got {}", self.scale));
        }
        Ok(EvaluateOptions {
            method: self.method,
            weight_rule: self.weight_rule,
            bandwidth: self.bandwidth,
            boundary_correction: self.boundary_correction,
            quadrature,
            scale: self.scale,
            execution: Execution::Parallel,
        })
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Data(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Data(m) | Failure::Usage(m) => m,
        }
    }
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config `{}`: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::Usage(format!("invalid config `{}`: {e}", path.display())))
}

fn parse_config_value<T: std::str::FromStr<Err = String> + Default>(
    value: Option<&str>,
    key: &str,
) -> Result<T, Failure> {
    value.map_or_else(
        || Ok(T::default()),
        |s| {
            s.parse()
                .map_err(|e| Failure::Usage(format!("config `{key}`: {e}")))
        },
    )
}

fn resolve(
    input: &InputArgs,
    pipeline: Option<&PipelineArgs>,
    out_dir: Option<&PathBuf>,
) -> Result<RunConfig, Failure> {
    let file = load_file_config(input.config.as_deref())?;
    let schema = match input.schema.as_deref().or(file.schema.as_deref()) {
        None | Some("default") => SchemaSource::Default,
        Some(path) => SchemaSource::File(PathBuf::from(path)),
    };
    let mut cfg = RunConfig {
        input: input.input.clone(),
        schema,
        method: parse_config_value(file.method.as_deref(), "method")?,
        weight_rule: parse_config_value(file.weight_rule.as_deref(), "weight_rule")?,
        bandwidth: parse_config_value(file.bandwidth.as_deref(), "bandwidth")?,
        boundary_correction: file.boundary_correction.unwrap_or(true),
        quadrature_points: file
            .quadrature_points
            .unwrap_or(QuadratureConfig::DEFAULT_POINTS),
        scale: file.scale.unwrap_or(DEFAULT_SCALE),
        out_dir: out_dir.cloned().or(file.out_dir),
        dump_normalized: None,
        dump_cdf: None,
        threads: file.threads,
    };
    if let Some(p) = pipeline {
        if let Some(m) = p.method {
            cfg.method = match m {
                MethodArg::Continuous => EntropyMethod::Continuous,
                MethodArg::Discrete => EntropyMethod::Discrete,
            };
        }
        if let Some(r) = p.weight_rule {
            cfg.weight_rule = match r {
                RuleArg::Paper => WeightRule::Paper,
                RuleArg::Classic => WeightRule::Classic,
            };
        }
        if let Some(b) = &p.bandwidth {
            cfg.bandwidth = b
                .parse()
                .map_err(|e| Failure::Usage(format!("--bandwidth: {e}")))?;
        }
        if p.no_boundary_correction {
            cfg.boundary_correction = false;
        }
        if let Some(q) = p.quadrature_points {
            cfg.quadrature_points = q;
        }
        if let Some(s) = p.scale {
            cfg.scale = s;
        }
        if p.threads.is_some() {
            cfg.threads = p.threads;
        }
    }
    if cfg.threads == Some(0) {
        return Err(Failure::Usage("--threads must be at least 1".into()));
    }
    Ok(cfg)
}

fn load_schema(source: &SchemaSource) -> Result<Schema, Failure> {
    match source {
        SchemaSource::Default => Ok(default_schema()),
        SchemaSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Failure::Usage(format!("cannot read schema `{}`: {e}", path.display()))
            })?;
            Schema::from_toml(&text)
                .map_err(|e| Failure::Usage(format!("schema `{}`: {e}", path.display())))
        }
    }
}

fn load_dataset(cfg: &RunConfig) -> Result<(RawDataset, IngestReport), Failure> {
    let schema = load_schema(&cfg.schema)?;
    let file = fs::File::open(&cfg.input)
        .map_err(|e| Failure::Data(format!("cannot open input `{}`: {e}", cfg.input.display())))?;
    parse_csv(std::io::BufReader::new(file), &schema)
        .map_err(|e| Failure::Data(format!("input `{}`: {e}", cfg.input.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .map_err(|e| Failure::Data(format!("cannot create `{}`: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| Failure::Data(format!("cannot write `{}`: {e}", path.display())))
}

fn dump_target(
    requested: Option<&Option<PathBuf>>,
    out_dir: Option<&PathBuf>,
    default_name: &str,
    flag: &str,
) -> Result<Option<PathBuf>, Failure> {
    match requested {
        None => Ok(None),
        Some(Some(p)) => Ok(Some(p.clone())),
        Some(None) => match out_dir {
            Some(dir) => Ok(Some(if default_name.is_empty() {
                dir.clone()
            } else {
                dir.join(default_name)
            })),
            None => Err(Failure::Usage(format!(
                "{flag} without a path needs --out-dir"
            ))),
        },
    }
}

fn note_dropped(report: &IngestReport, err: &mut dyn Write) {
    if report.rows_dropped > 0 {
        let _ = writeln!(
            err,
            "note: dropped {} of {} rows with missing values: {}",
            report.rows_dropped,
            report.rows_read,
            report.dropped_ids.join(", ")
        );
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Data(format!("cannot write output: {e}"))
}

fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut cfg = resolve(&args.input, Some(&args.pipeline), args.out_dir.as_ref())?;
    cfg.dump_normalized = dump_target(
        args.dump_normalized.as_ref(),
        cfg.out_dir.as_ref(),
        "normalized.csv",
        "--dump-normalized",
    )?;
    cfg.dump_cdf = dump_target(args.dump_cdf.as_ref(), cfg.out_dir.as_ref(), "", "--dump-cdf")?;
    let options = cfg.evaluate_options().map_err(Failure::Usage)?;
    if cfg.dump_cdf.is_some() && options.method == EntropyMethod::Discrete {
        return Err(Failure::Usage(
            "--dump-cdf requires --method continuous".into(),
        ));
    }

    let (dataset, ingest) = load_dataset(&cfg)?;
    note_dropped(&ingest, err);
    let evaluation = with_threads(cfg.threads, || evaluate_detailed(&dataset, &options))
        .map_err(|e| Failure::Data(e.to_string()))?;
    let schema = dataset.schema();
    let ids = dataset.entity_ids();
    let rep = &evaluation.report;

    let text = format!(
        "Entropy and weight of indicators\n{}\nRanking\n{}\nDescriptive statistics of score\n{}",
        report::weights_text(schema, rep),
        report::ranking_text(ids, rep, args.top),
        report::stats_text(rep.stats()),
    );
    out.write_all(text.as_bytes()).map_err(io_failure)?;

    if let Some(dir) = &cfg.out_dir {
        write_file(&dir.join("weights.csv"), &report::weights_csv(schema, rep))?;
        write_file(&dir.join("scores.csv"), &report::scores_csv(ids, rep))?;
        write_file(&dir.join("stats.csv"), &report::stats_csv(rep.stats()))?;
    }
    if let Some(path) = &cfg.dump_normalized {
        write_file(path, &report::normalized_csv(ids, &evaluation.normalized))?;
    }
    if let Some(dir) = &cfg.dump_cdf {
        for (spec, cdf) in schema.indicators().iter().zip(&evaluation.cdfs) {
            write_file(&dir.join(format!("cdf_{}.csv", spec.name)), &report::cdf_csv(cdf))?;
        }
    }
    Ok(())
}

fn cmd_weights(args: &WeightsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let cfg = resolve(&args.input, Some(&args.pipeline), args.out_dir.as_ref())?;
    let options = cfg.evaluate_options().map_err(Failure::Usage)?;
    let (dataset, ingest) = load_dataset(&cfg)?;
    note_dropped(&ingest, err);
    let evaluation = with_threads(cfg.threads, || evaluate_detailed(&dataset, &options))
        .map_err(|e| Failure::Data(e.to_string()))?;
    let schema = dataset.schema();
    let rep = &evaluation.report;
    let csv = report::weights_csv(schema, rep);
    match args.format {
        FormatArg::Text => out
            .write_all(report::weights_text(schema, rep).as_bytes())
            .map_err(io_failure)?,
        FormatArg::Csv => out.write_all(&csv).map_err(io_failure)?,
    }
    if let Some(dir) = &cfg.out_dir {
        write_file(&dir.join("weights.csv"), &csv)?;
    }
    Ok(())
}

fn cmd_validate(args: &InputArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let cfg = resolve(args, None, None)?;
    let (dataset, ingest) = load_dataset(&cfg)?;
    out.write_all(report::ingest_text(&ingest).as_bytes())
        .map_err(io_failure)?;
    let findings = validate(&dataset);
    if findings.is_empty() {
        writeln!(out, "ok: {} rows x {} indicators", dataset.n_rows(), dataset.n_indicators())
            .map_err(io_failure)?;
        return Ok(());
    }
    let lines: Vec<String> = findings.iter().map(ToString::to_string).collect();
    Err(Failure::Data(format!(
        "{} problem(s) found:\n  {}",
        findings.len(),
        lines.join("\n  ")
    )))
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    debug_assert_eq!(DEFAULT_SCHEMA_VERSION, 1);
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            let code = e.exit_code();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Evaluate(args) => cmd_evaluate(args, out, err),
        Command::Weights(args) => cmd_weights(args, out, err),
        Command::Validate(args) => cmd_validate(args, out),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message());
            failure.code()
        }
    }
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run_with(argv, &mut out, &mut err);
    let _ = out.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(extra: &[&str]) -> Vec<String> {
        std::iter::once("entrank")
            .chain(extra.iter().copied())
            .map(String::from)
            .collect()
    }

    fn run_capture(extra: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(args(extra), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn version_mentions_schema() {
        let (code, out, _) = run_capture(&["--version"]);
        assert_eq!(code, 0);
        assert!(out.contains(env!("CARGO_PKG_VERSION")));
        assert!(out.contains("schema v1"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_capture(&["evaluate", "--input", "x.csv", "--bogus"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn even_quadrature_grid_is_usage_error() {
        let (code, _, err) =
            run_capture(&["evaluate", "--input", "data.csv", "--quadrature-points", "4"]);
        assert_eq!(code, 2);
        assert!(err.contains("quadrature"), "{err}");
    }

    #[test]
    fn missing_input_names_path() {
        let (code, _, err) = run_capture(&["evaluate", "--input", "/nonexistent/missing.csv"]);
        assert_eq!(code, 1);
        assert!(err.contains("/nonexistent/missing.csv"), "{err}");
    }

    #[test]
    fn bad_bandwidth_and_threads_are_usage_errors() {
        let (code, _, _) = run_capture(&["evaluate", "--input", "x.csv", "--bandwidth", "wide"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(&["evaluate", "--input", "x.csv", "--threads", "0"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(&["evaluate", "--input", "x.csv", "--scale", "-1"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn dump_without_destination_needs_out_dir() {
        let (code, _, err) = run_capture(&["evaluate", "--input", "x.csv", "--dump-normalized"]);
        assert_eq!(code, 2);
        assert!(err.contains("--out-dir"), "{err}");
    }

    #[test]
    fn config_file_layers_under_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.toml");
        fs::write(
            &cfg_path,
            "method = \"discrete\"\nquadrature_points = 101\nscale = 10.0\n",
        )
        .unwrap();
        let input = InputArgs {
            input: "x.csv".into(),
            schema: None,
            config: Some(cfg_path.clone()),
        };
        let cfg = resolve(&input, None, None).unwrap_or_else(|_| panic!("resolve"));
        assert_eq!(cfg.method, EntropyMethod::Discrete);
        assert_eq!(cfg.quadrature_points, 101);
        assert_eq!(cfg.scale, 10.0);
        assert_eq!(cfg.schema, SchemaSource::Default);

        let pipeline = PipelineArgs {
            method: Some(MethodArg::Continuous),
            weight_rule: None,
            bandwidth: None,
            no_boundary_correction: false,
            quadrature_points: None,
            scale: Some(50.0),
            threads: None,
        };
        let cfg = resolve(&input, Some(&pipeline), None).unwrap_or_else(|_| panic!("resolve"));
        assert_eq!(cfg.method, EntropyMethod::Continuous);
        assert_eq!(cfg.scale, 50.0);
        assert_eq!(cfg.quadrature_points, 101);
    }

    #[test]
    fn unknown_config_key_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.toml");
        fs::write(&cfg_path, "kernel = \"epanechnikov\"\n").unwrap();
        let (code, _, err) = run_capture(&[
            "evaluate",
            "--input",
            "x.csv",
            "--config",
            cfg_path.to_str().unwrap(),
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("kernel"), "{err}");
    }
}
