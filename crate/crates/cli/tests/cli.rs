use std::path::Path;
use std::process::{Command, Output};

use chenstein::pointproc::SeedSpec;
use chenstein_cli::config::KernelSpec;
use chenstein_cli::experiments::kernel_integral;
use chenstein_cli::{
    schema, schema_document, Cell, Column, Experiment, ExperimentConfig, Kind, Table, EXIT_CONFIG, EXIT_PASS,
    EXIT_RUNTIME,
};
use proptest::prelude::*;
use rand::Rng;

fn run(dir: &Path, name: &str, text: &str, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{name}.cfg"));
    std::fs::write(&cfg, text).unwrap();
    Command::new(env!("CARGO_BIN_EXE_chenstein"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join(name))
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn selftest_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "self", "experiment = core_selftest\n", &[]);
    assert_eq!(out.status.code(), Some(i32::from(EXIT_PASS)), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("self/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert!(summary["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn runs_k_above_n_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "bad", "experiment = runs\nn = 3\nk = 5\np = 0.5\nv = 0\n", &[]);
    assert_eq!(out.status.code(), Some(i32::from(EXIT_CONFIG)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k ≤ n"));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "bad", "experiment = interpoint\nd = 1\nt = 50\nlambda = 2\n", &[]);
    assert_eq!(out.status.code(), Some(i32::from(EXIT_CONFIG)));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
}

#[test]
fn missing_config_is_a_runtime_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_chenstein")).args(["--config", "/nonexistent/x.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(i32::from(EXIT_RUNTIME)));
}

#[test]
fn interpoint_output_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let text = "experiment = interpoint\nd = 2\nt = 100\nreps = 10000\nseed = 42\n";
    let a = run(dir.path(), "w1", text, &["--workers", "1"]);
    let b = run(dir.path(), "w8", text, &["--workers", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    for file in ["results.csv", "results.jsonl"] {
        let x = std::fs::read(dir.path().join("w1").join(file)).unwrap();
        let y = std::fs::read(dir.path().join("w8").join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn runs_report_has_uniform_bound_and_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "runs", "experiment = runs\nn = 10\nk = 2\np = 0.3\nv = 1\n", &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("runs/results.csv")).unwrap();
    assert!(csv.lines().next().unwrap().split(',').any(|c| c == "bound_uniform"));
    let jsonl = std::fs::read_to_string(dir.path().join("runs/results.jsonl")).unwrap();
    let table = Table::parse_jsonl(&jsonl, &schema(Experiment::Runs)).unwrap();
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.to_jsonl(), jsonl);
    assert_eq!(table.to_csv().unwrap(), csv);
}

#[test]
fn empty_result_set_is_header_only() {
    for e in Experiment::ALL {
        let cols = schema(e);
        let csv = Table::new(cols.clone()).to_csv().unwrap();
        let header: Vec<&str> = cols.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(csv, format!("{}\n", header.join(",")));
    }
}

#[test]
fn checked_in_schema_matches() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schemas/reports.json")).unwrap();
    let checked_in: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(checked_in, schema_document());
}

#[test]
fn config_overrides_revalidate() {
    let mut cfg = ExperimentConfig::parse("experiment = interpoint\nd = 1\nt = 50\n").unwrap();
    cfg.workers = 0;
    assert!(cfg.validate().is_err());
}

#[test]
fn distance_kernel_integral_matches_monte_carlo() {
    let mut rng = SeedSpec::new(7, 1).rng();
    let n = 400_000;
    for (d, delta) in [(1usize, 0.1), (1, 0.7), (2, 0.05), (2, 0.3), (2, 1.0)] {
        let hits = (0..n)
            .filter(|_| {
                let d2: f64 = (0..d).map(|_| (rng.random::<f64>() - rng.random::<f64>()).powi(2)).sum();
                d2 <= delta * delta
            })
            .count() as f64;
        let p = hits / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let exact = kernel_integral(&KernelSpec::Distance { delta }, d).unwrap();
        assert!((p - exact).abs() <= 4.0 * se, "d={d} delta={delta}: {p} vs {exact}");
    }
}

fn cell_strategy(kind: Kind) -> BoxedStrategy<Cell> {
    match kind {
        Kind::Int => any::<i64>().prop_map(Cell::Int).boxed(),
        Kind::Float => prop_oneof![
            any::<f64>().prop_map(Cell::Float),
            Just(Cell::Float(f64::INFINITY)),
            Just(Cell::Float(f64::NEG_INFINITY)),
        ]
        .boxed(),
        Kind::Bool => any::<bool>().prop_map(Cell::Bool).boxed(),
        Kind::Str => ".{0,12}".prop_map(Cell::Str).boxed(),
    }
}

fn table_strategy() -> impl Strategy<Value = Table> {
    let kinds = prop::collection::vec(prop_oneof![Just(Kind::Int), Just(Kind::Float), Just(Kind::Bool), Just(Kind::Str)], 1..6);
    kinds.prop_flat_map(|kinds| {
        let columns: Vec<Column> = kinds.iter().enumerate().map(|(i, &k)| Column::new(&format!("c{i}"), k)).collect();
        let row = kinds.iter().map(|&k| cell_strategy(k)).collect::<Vec<_>>();
        prop::collection::vec(row, 0..8).prop_map(move |rows| {
            let mut t = Table::new(columns.clone());
            for r in rows {
                t.push(r);
            }
            t
        })
    })
}

proptest! {
    #[test]
    fn jsonl_round_trips(t in table_strategy()) {
        let back = Table::parse_jsonl(&t.to_jsonl(), &t.columns).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn csv_has_one_record_per_row(t in table_strategy()) {
        let text = t.to_csv().unwrap();
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        prop_assert_eq!(reader.records().count(), t.rows.len());
    }
}

#[test]
fn fuzz_seeds_are_well_formed() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    for entry in std::fs::read_dir(root.join("jsonl")).unwrap() {
        let bytes = std::fs::read(entry.unwrap().path()).unwrap();
        let e = Experiment::ALL[usize::from(bytes[0]) % Experiment::ALL.len()];
        let t = Table::parse_jsonl(std::str::from_utf8(&bytes[1..]).unwrap(), &schema(e)).unwrap();
        assert!(!t.rows.is_empty());
    }
    for entry in std::fs::read_dir(root.join("config")).unwrap() {
        let path = entry.unwrap().path();
        let parsed = ExperimentConfig::parse(&std::fs::read_to_string(&path).unwrap());
        assert_eq!(parsed.is_ok(), !path.ends_with("bad_k"), "{}", path.display());
    }
}
