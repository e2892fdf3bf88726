use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.toml"))
}

fn impduff(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_impduff"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap()
}

#[test]
fn simulate_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("riccati-jumps");
    let out = impduff(
        &["simulate", "--scenario", sc.to_str().unwrap(), "--at", "0.39269908169872414"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(dir.path().join("riccati-jumps.simulate.json"));
    let u = v["at"][0]["u"][0].as_f64().unwrap();
    assert!((u - (2f64.sqrt() - 1.0)).abs() < 1e-8, "u = {u}");
    assert!(dir.path().join("riccati-jumps.simulate.csv").exists());
}

#[test]
fn area_check_on_remark_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("remark-2.1-basic");
    let out = impduff(&["area-check", "--scenario", sc.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let v = json(dir.path().join("remark-2.1-basic.area-check.json"));
    assert!(v["max_abs_det_minus_one"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["points"], 100);
}

#[test]
fn unforced_sweep_is_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("unforced");
    let out = impduff(&["sweep", "--scenario", sc.to_str().unwrap(), "--horizon", "200"], dir.path());
    assert!(out.status.success());
    let v = json(dir.path().join("unforced.sweep.json"));
    assert_eq!(v["fraction_bounded"], 1.0);
    assert_eq!(v["horizon"], 200);
}

#[test]
fn manifest_records_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("unforced");
    let out = impduff(&["smooth-rate", "--scenario", sc.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    let manifest = fs::read_to_string(dir.path().join("MANIFEST.csv")).unwrap();
    let lines: Vec<&str> = manifest.lines().collect();
    assert!(lines[0].starts_with("file,scenario,scenario_sha256"));
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("unforced.smooth-rate.csv,unforced,"));
    assert!(lines.iter().skip(1).all(|l| l.contains(",true,")));
}

#[test]
fn invalid_scenario_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"bad\"\nmodel = \"duffing\"\nn = 0\n").unwrap();
    let out = impduff(&["sweep", "--scenario", bad.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    let wrong_model = scenario("riccati-jumps");
    let out = impduff(&["poincare", "--scenario", wrong_model.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_scenario_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = impduff(&["sweep", "--scenario", "/nonexistent/x.toml"], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn data_files_are_deterministic() {
    let sc = scenario("unforced");
    let read = |dir: &Path| {
        let out = impduff(
            &["rotation", "--scenario", sc.to_str().unwrap(), "--horizon", "512", "--threads", "2"],
            dir,
        );
        assert!(out.status.success());
        (
            fs::read(dir.join("unforced.rotation.csv")).unwrap(),
            fs::read(dir.join("unforced.rotation.json")).unwrap(),
        )
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert_eq!(read(a.path()), read(b.path()));
}
