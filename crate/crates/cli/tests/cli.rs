use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use shadow_cli::experiment::read_results_csv;
use tempfile::TempDir;

const SMALL: &str = r#"{
  "name": "small",
  "state": { "kind": "zxz", "n": 8 },
  "observable": { "family": "zxz_string", "k_range": [3, 4] },
  "ensemble": ["contractive", "random_clifford"],
  "location_mode": { "sliding": { "random_offset": true } },
  "snapshots": 4000
}"#;

fn shadows(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shadows"));
    cmd.args(args).env_remove("SHADOWS_SEED");
    if let Some(s) = env_seed {
        cmd.env("SHADOWS_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_to_string(config: &str, extra: &[&str], env_seed: Option<&str>) -> String {
    let mut args = vec!["run", config, "-o", "-"];
    args.extend_from_slice(extra);
    let out = shadows(&args, env_seed);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn config_errors_exit_2_with_field_path() {
    let dir = TempDir::new().unwrap();
    let bad = SMALL.replace("\"snapshots\": 4000", "\"snapshots\": \"many\"");
    let cfg = write_config(&dir, "bad.json", &bad);
    let out = shadows(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("snapshots"));

    let unknown = SMALL.replace("\"n\": 8", "\"n\": 8, \"qubits\": 3");
    let cfg = write_config(&dir, "unknown.json", &unknown);
    let out = shadows(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("state"));

    let out = shadows(&["weights", "--ensembles", "haar"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_is_an_error() {
    let out = shadows(&["run", "/nonexistent/config.json"], None);
    assert!(!out.status.success());
}

#[test]
fn weights_table_rows() {
    let out = shadows(&["weights", "--k-max", "10", "--ensembles", "contractive,random_clifford"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ensemble,k,q,weight,shadow_norm,reference"));
    assert!(text.contains("contractive,10,0,0.00140884449253334,709.801546799415,"));
    assert!(text.contains("random_clifford,10,0,0.000975609756097561,1025,1025"));
    assert!(text.contains("contractive,2,0,0.209876543209877,"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn verify_passes() {
    let out = shadows(&["verify", "weights"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
}

#[test]
fn run_is_deterministic_across_workers() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "small.json", SMALL);
    let a = run_to_string(&cfg, &["--seed", "9", "--workers", "1"], None);
    let b = run_to_string(&cfg, &["--seed", "9", "--workers", "3"], None);
    assert_eq!(a, b);
    let c = run_to_string(&cfg, &["--seed", "10"], None);
    assert_ne!(a, c);
}

#[test]
fn csv_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "small.json", SMALL);
    let csv_path = dir.path().join("out.csv");
    let out = shadows(&["run", &cfg, "--seed", "3", "-o", csv_path.to_str().unwrap()], None);
    assert!(out.status.success());
    let rows = read_results_csv(fs::File::open(&csv_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r.snapshots, 4000);
        assert_eq!(r.n, 8);
        assert!(r.offset < 8);
        assert!((r.std_error - (r.variance / r.snapshots as f64).sqrt()).abs() <= 1e-12 * r.std_error.max(1.0));
        assert!((r.mean - r.exact_expectation).abs() <= 6.0 * r.std_error);
    }
    assert_eq!(rows[0].exact_expectation, 1.0);
    assert_eq!(rows[2].exact_expectation, 1.0);
}

#[test]
fn seed_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "small.json", SMALL);
    let from_env = run_to_string(&cfg, &[], Some("5"));
    let from_flag = run_to_string(&cfg, &["--seed", "5"], None);
    assert_eq!(from_env, from_flag);
    let flag_wins = run_to_string(&cfg, &["--seed", "5"], Some("6"));
    assert_eq!(flag_wins, from_flag);

    let seeded = SMALL.replace("\"snapshots\": 4000", "\"snapshots\": 4000, \"master_seed\": 5");
    let seeded_cfg = write_config(&dir, "seeded.json", &seeded);
    assert_eq!(run_to_string(&seeded_cfg, &[], Some("6")), from_flag);

    let out = shadows(&["run", &cfg, "-o", "-"], Some("not-a-number"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn snapshot_log_has_one_line_per_snapshot() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "small.json", SMALL);
    let log = dir.path().join("snapshots.tsv");
    let out = shadows(
        &["run", &cfg, "--seed", "1", "--snapshots", "50", "-o", "-", "--snapshot-log", log.to_str().unwrap()],
        None,
    );
    assert!(out.status.success());
    let text = fs::read_to_string(&log).unwrap();
    let headers = text.lines().filter(|l| l.starts_with('#')).count();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(headers, 4);
    assert_eq!(data.len(), 200);
    assert!(data.iter().all(|l| l.split('\t').count() >= 3));
}

#[test]
fn figure_data_is_wide() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "small.json", &SMALL.replace("[\"contractive\", \"random_clifford\"]", "\"contractive\""));
    let out = shadows(&["figure-data", &cfg, "--seed", "2", "-o", "-"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("k,mode,n,offset,snapshots,exact_expectation,contractive_mean"));
    assert!(header.contains("random_clifford_theory_second_moment"));
    assert_eq!(text.lines().count(), 3);
    assert!(!Path::new("small.csv").exists());
}
