use std::path::Path;
use std::process::{Command, Output};

fn cv2x(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cv2x")).args(args).output().unwrap()
}

fn fig(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

const SMALL: &str = "
roads.mu_per_km = 5
tier1.density_per_km2 = 0.5
tier1.power_dbm = 43
tier1.bias_db = 0
tier2.density_per_km = 5
tier2.power_dbm = 23
tier2.bias_db = 0
channel.alpha = 4
";

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn analytic_sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pc.csv");
    let o = cv2x(&["coverage", "--config", &fig("fig6.toml"), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "b2_db,pc_analytic,pc_mc,ci95");
    assert_eq!(lines.len(), 8);
    assert!(lines[4].starts_with("5,0.8145"));
}

#[test]
fn small_monte_carlo_run_fills_both_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        &format!("{SMALL}sweep.variable = \"beta_db\"\nsweep.values = [0, 10]\n"),
    );
    let out = dir.path().join("o.csv");
    let o = cv2x(&["coverage", "--config", &cfg, "--out", out.to_str().unwrap(), "--trials", "200", "--mode", "both"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    for row in csv.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert!(cols.iter().all(|c| !c.is_empty()), "{row}");
    }
}

#[test]
fn invalid_path_loss_exponent_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &SMALL.replace("alpha = 4", "alpha = 2"));
    let o = cv2x(&["coverage", "--config", &cfg, "--out", dir.path().join("x.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn unknown_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", &format!("{SMALL}tier2.powr_dbm = 20\n"));
    let o = cv2x(&["assoc", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validation_breach_sets_exit_code_and_pass_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        &format!("{SMALL}sweep.variable = \"beta_db\"\nsweep.values = [0]\ntolerance.abs = 1e-9\n"),
    );
    let out = dir.path().join("v.csv");
    // A single trial estimates 0 or 1 with a zero-width interval, so the
    // tolerance cannot hold.
    let o = cv2x(&["validate", "--config", &cfg, "--out", out.to_str().unwrap(), "--trials", "1"]);
    assert_eq!(o.status.code(), Some(4));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().ends_with(",pass"));
    assert!(lines.next().unwrap().ends_with(",0"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn void_probability_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        &format!("{SMALL}sweep.variable = \"radius_km\"\nsweep.values = [0.2, 0.5]\nrun.trials = 2000\n"),
    );
    let out = dir.path().join("v.csv");
    let o = cv2x(&["voidprob", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "radius_km,void_analytic,void_mc,ci95");
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn missing_config_file_is_reported() {
    let o = cv2x(&["coverage", "--config", "/nonexistent/cv2x.toml"]);
    assert_ne!(o.status.code(), Some(0));
}
