use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
arrival_rates_mhz = [0.2]
serving_rates_mhz = [0.1]
memory_units = [1, 3]
k_values = [3]
edge_counts = [1, 2]
decode_edge_counts = [2]
trials = 10000
served_target = 10000
"#;

fn qcache(dir: &Path, args: &[&str]) -> Output {
    let config = dir.join("small.toml");
    fs::write(&config, SMALL).unwrap();
    Command::new(env!("CARGO_BIN_EXE_qcache"))
        .arg("--config")
        .arg(&config)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn fidelity_sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcache(dir.path(), &["fidelity-sweep"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("length_km,edge_count,memory_units"));
    // 2 lengths x 2 edge counts x 2 capacities
    assert_eq!(lines.count(), 8);
}

#[test]
fn queue_wait_json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q.json");
    let o = qcache(dir.path(), &["queue-wait", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2 * 3);
    assert_eq!(rows[0]["backend"], "markov");
}

#[test]
fn decode_error_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = stdout(&qcache(dir.path(), &["decode-error", "--seed", "11"]));
    let b = stdout(&qcache(dir.path(), &["decode-error", "--seed", "11"]));
    let c = stdout(&qcache(dir.path(), &["decode-error", "--seed", "12"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.contains(",mwm,") && a.contains(",lut,"));
}

#[test]
fn optimize_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcache(dir.path(), &["optimize", "--threshold", "0.99"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"infeasible\""));
    let o = qcache(dir.path(), &["optimize", "--threshold", "0.0", "--decoder", "mwm"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"optimal\""));
}

#[test]
fn flags_reach_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcache(
        dir.path(),
        &["config", "--mapping", "bitflip", "--queue-backend", "des", "--compat-eq13b-exponent", "--compat-literal-constraint"],
    );
    assert!(o.status.success());
    let text = stdout(&o);
    for line in [
        "mapping = \"bitflip\"",
        "queue_backend = \"des\"",
        "compat_swap_exponent = true",
        "literal_constraint = true",
    ] {
        assert!(text.contains(line), "{line} missing from\n{text}");
    }
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "threshhold = 0.4\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qcache"))
        .args(["config", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("threshhold") && err.contains("line 1"), "{err}");
}

#[test]
fn reproduce_figures_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = qcache(dir.path(), &["reproduce-figures", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 7);
    for name in names {
        assert!(fs::read(a.join(&name)).unwrap() == fs::read(b.join(&name)).unwrap(), "{name:?} differs");
    }
}
