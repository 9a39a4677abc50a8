use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_spinrelax");

fn config(n: usize, sites: &str, extra: &str) -> String {
    format!(
        r#"
[model]
N = {n}
J = 0.3
Omega = -1.0
omega = -0.13

[sector]
m = 3

[initial]
sites = {sites}

[grid]
t_max = {n}.0
steps = 800
{extra}
"#
    )
}

fn spinrelax(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("SPINRELAX_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const OUTPUTS: [&str; 11] = [
    "populations.csv",
    "entropy.csv",
    "correlation.csv",
    "energies.csv",
    "steady.json",
    "gobbs.json",
    "wavefront.json",
    "populations.svg",
    "entropy.svg",
    "correlation.svg",
    "site1.svg",
];

#[test]
fn dims_and_version() {
    let tmp = tempfile::tempdir().unwrap();
    let o = spinrelax(&["dims", "30", "3"], tmp.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "4930");
    assert_eq!(stdout(&spinrelax(&["dims", "10", "3"], tmp.path())).trim(), "210");
    let v = spinrelax(&["version"], tmp.path());
    assert!(stdout(&v).starts_with("spinrelax "));
}

#[test]
fn dry_run_reports_the_sector() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), config(30, "[1, 2, 3]", "")).unwrap();
    let o = spinrelax(&["run", "c.toml", "--dry-run"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("sector dimension: 4930"), "{text}");
    assert!(text.contains("steps = 800"));
    assert!(!tmp.path().join("spinrelax-out").exists());
}

#[test]
fn invalid_configs_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), config(10, "[1, 1, 1]", "")).unwrap();
    let o = spinrelax(&["run", "c.toml"], tmp.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("initial.sites"), "{}", stderr(&o));

    fs::write(tmp.path().join("c.toml"), config(30, "[1, 2, 3]", "")).unwrap();
    let capped = fs::read_to_string(tmp.path().join("c.toml"))
        .unwrap()
        .replace("m = 3", "m = 3\nmax_dim = 1000");
    fs::write(tmp.path().join("c.toml"), capped).unwrap();
    let o = spinrelax(&["run", "c.toml"], tmp.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("4930"), "{}", stderr(&o));

    let o = spinrelax(&["run", "missing.toml"], tmp.path());
    assert!(!o.status.success());
}

#[test]
fn small_ring_run_is_complete_and_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), config(10, "[1, 2, 3]", "")).unwrap();
    for out in ["a", "b"] {
        let o = spinrelax(&["run", "c.toml", "--out", out], tmp.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for name in OUTPUTS {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert!(a == b, "{name} differs between runs");
    }

    let csv = fs::read_to_string(tmp.path().join("a/populations.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..5], &["t", "Jt", "P_1_-1", "P_1_0", "P_1_+1"]);
    assert_eq!(header.len(), 2 + 30);
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[3], "1.00000000000e0");
    assert_eq!(csv.lines().count(), 801);

    let steady: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("a/steady.json")).unwrap()).unwrap();
    assert_eq!(steady["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(steady["config"]["model"]["N"], 10);
    assert_eq!(steady["p_inf"].as_array().unwrap().len(), 10);

    let front: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("a/wavefront.json")).unwrap()).unwrap();
    let tau = front["tau_rec"].as_f64().unwrap();
    assert!((tau / 9.086 - 1.0).abs() < 0.1, "tau_rec {tau}");
}

#[test]
fn environment_overrides_the_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let extra = "[analyses]\nsteady = false\nwavefront = false\n[output]\nsvg = false\n";
    fs::write(tmp.path().join("c.toml"), config(6, "[1, 2, 3]", extra)).unwrap();
    let o = Command::new(BIN)
        .args(["run", "c.toml"])
        .current_dir(tmp.path())
        .env("SPINRELAX_OUT", "elsewhere")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = tmp.path().join("elsewhere");
    assert!(dir.join("correlation.csv").exists());
    assert!(dir.join("gobbs.json").exists());
    assert!(!dir.join("steady.json").exists());
    assert!(!dir.join("site1.svg").exists());
    assert!(!tmp.path().join("spinrelax-out").exists());
}

#[test]
fn gobbs_subcommand_reproduces_the_boundary_optimum() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.toml"), config(30, "[1, 2, 3]", "")).unwrap();
    let o = spinrelax(&["gobbs", "c.toml"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = v["C_max_per_site"].as_f64().unwrap();
    assert!((c - 0.3251).abs() < 5e-4, "{c}");
    assert_eq!(v["boundary_flag"], true);
    assert_eq!(v["beta_E"], serde_json::Value::Null);
    assert_eq!(v["S_z"], -27.0);
}

#[test]
fn full_size_run_writes_every_output() {
    let tmp = tempfile::tempdir().unwrap();
    let text = config(30, "[1, 2, 3]", "").replace("steps = 800", "steps = 2000");
    fs::write(tmp.path().join("c.toml"), text).unwrap();
    let o = spinrelax(&["run", "c.toml", "--out", "fig"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for name in OUTPUTS {
        let path = tmp.path().join("fig").join(name);
        assert!(fs::metadata(&path).map(|m| m.len() > 0).unwrap_or(false), "{name}");
    }
    let g: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("fig/gobbs.json")).unwrap()).unwrap();
    assert!((g["C_max_per_site"].as_f64().unwrap() - 0.3251).abs() < 5e-4);
    let s: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("fig/steady.json")).unwrap()).unwrap();
    assert!((s["C_T_inf_per_site"].as_f64().unwrap() - 0.3342).abs() < 5e-3);
}
