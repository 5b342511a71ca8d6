mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use entrank::model::default_schema;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn entrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entrank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_default_input(dir: &Path, n: usize, holes: &[(usize, usize)]) -> String {
    let schema = default_schema();
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let mut rows: Vec<Vec<Option<f64>>> = (0..n)
        .map(|_| (0..schema.len()).map(|_| Some(rng.random_range(0.0..5.0))).collect())
        .collect();
    for &(i, j) in holes {
        rows[i][j] = None;
    }
    let ids: Vec<String> = (0..n).map(|i| format!("{:06}", 100 + i)).collect();
    let path = dir.join("data.csv");
    fs::write(&path, common::to_csv(&ids, &rows, &schema)).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn evaluate_emits_three_tables_and_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_default_input(dir.path(), 30, &[(4, 2)]);
    let out_dir = dir.path().join("out");
    let o = entrank(&[
        "evaluate",
        "--input",
        &input,
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--quadrature-points",
        "2001",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("Entropy and weight of indicators"));
    assert!(text.contains("Ranking"));
    assert!(text.contains("Descriptive statistics of score"));
    assert!(text.contains("Std. Dev"));
    assert!(stderr(&o).contains("dropped 1 of 30"));

    let scores = fs::read_to_string(out_dir.join("scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 30);
    assert!(scores.starts_with("rank,entity_id,score\n1,"));
    let weights = fs::read_to_string(out_dir.join("weights.csv")).unwrap();
    assert_eq!(weights.lines().count(), 18);
    let stats = fs::read_to_string(out_dir.join("stats.csv")).unwrap();
    assert!(stats.contains("Obs,29\n"));
    assert!(!out_dir.join("normalized.csv").exists());
}

#[test]
fn dumps_go_to_explicit_paths() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_default_input(dir.path(), 12, &[]);
    let norm = dir.path().join("audit/norm.csv");
    let cdf_dir = dir.path().join("cdfs");
    let o = entrank(&[
        "evaluate",
        "--input",
        &input,
        "--dump-normalized",
        norm.to_str().unwrap(),
        "--dump-cdf",
        cdf_dir.to_str().unwrap(),
        "--quadrature-points",
        "1001",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let normalized = fs::read_to_string(&norm).unwrap();
    assert_eq!(normalized.lines().count(), 13);
    assert!(normalized.starts_with("entity_id,operating_profit_ratio,"));
    let cdf = fs::read_to_string(cdf_dir.join("cdf_capital_intensity.csv")).unwrap();
    let lines: Vec<&str> = cdf.lines().collect();
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[0], "x,phi");
    assert_eq!(lines[1], "0,0");
    assert_eq!(lines[101], "1,1");
}

#[test]
fn weights_subcommand_text_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_default_input(dir.path(), 20, &[]);
    let o = entrank(&["weights", "--input", &input, "--quadrature-points", "1001"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("Category"));
    assert!(text.contains("Capital intensity"));
    assert_eq!(text.lines().count(), 19);

    let o = entrank(&[
        "weights",
        "--input",
        &input,
        "--format",
        "csv",
        "--method",
        "discrete",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("category,indicator,direction,entropy,weight\n"));
}

#[test]
fn validate_reports_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_default_input(dir.path(), 10, &[(0, 0)]);
    let before: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    let o = entrank(&["validate", "--input", &input]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("rows dropped: 1"));
    assert!(stdout(&o).contains("ok: 9 rows x 17 indicators"));
    let after: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(before.len(), after.len());

    let flat = dir.path().join("flat.csv");
    fs::write(&flat, "entity_id,a,b\nx,1,5\ny,2,5\nz,3,5\n").unwrap();
    let schema = dir.path().join("schema.toml");
    fs::write(
        &schema,
        "[[indicator]]\nname = \"a\"\ncategory = \"solvency\"\ndirection = \"positive\"\n\n\
         [[indicator]]\nname = \"b\"\ncategory = \"operation\"\ndirection = \"inverse\"\n",
    )
    .unwrap();
    let o = entrank(&[
        "validate",
        "--input",
        flat.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`b`"), "{}", stderr(&o));
}

#[test]
fn degenerate_column_fails_evaluate_with_name() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.csv");
    fs::write(&flat, "entity_id,a,b\nx,1,5\ny,2,5\nz,3,5\n").unwrap();
    let schema = dir.path().join("schema.toml");
    fs::write(
        &schema,
        "[[indicator]]\nname = \"a\"\ncategory = \"solvency\"\ndirection = \"positive\"\n\n\
         [[indicator]]\nname = \"b\"\ncategory = \"operation\"\ndirection = \"inverse\"\n",
    )
    .unwrap();
    let o = entrank(&[
        "evaluate",
        "--input",
        flat.to_str().unwrap(),
        "--schema",
        schema.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("indicator `b`"), "{}", stderr(&o));
    assert!(!stderr(&o).contains("panicked"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(entrank(&[]).status.code(), Some(2));
    let o = entrank(&["evaluate", "--input", "data.csv", "--quadrature-points", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = entrank(&["evaluate", "--input", "data.csv", "--method", "pdf"]);
    assert_eq!(o.status.code(), Some(2));
    let o = entrank(&["evaluate", "--input", "data.csv", "--schema", "/no/such/schema.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_input_exits_one_naming_path() {
    let o = entrank(&["evaluate", "--input", "missing.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.csv"));
}

#[test]
fn version_flag() {
    let o = entrank(&["--version"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("entrank "));
    assert!(stdout(&o).contains("schema v1"));
}

#[test]
fn config_file_then_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_default_input(dir.path(), 15, &[]);
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "scale = 10.0\nquadrature_points = 1001\n").unwrap();

    let max_score = |extra: &[&str]| -> f64 {
        let out_dir = dir.path().join("o");
        let mut args = vec![
            "evaluate",
            "--input",
            &input,
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let o = entrank(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let scores = fs::read_to_string(out_dir.join("scores.csv")).unwrap();
        scores.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap()
    };
    assert!(max_score(&[]) <= 10.0);
    assert!(max_score(&["--scale", "100"]) > 10.0);
}
