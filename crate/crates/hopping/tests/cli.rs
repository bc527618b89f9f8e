use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hopping::formats::{read_pgm, read_points_csv};
use hopping::manifest::{manifest_path, sha256_hex};

fn hopping(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopping"))
        .env("HOPPING_THREADS", "2")
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn eps_prints_seventeen_digits() {
    let o = hopping(&["eps", "2"]);
    assert!(o.status.success());
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn usage_errors() {
    assert_eq!(hopping(&["sweep", "3"]).status.code(), Some(64));
    assert_eq!(hopping(&["smin", "3", "--lambda", "oops"]).status.code(), Some(64));
    assert_eq!(hopping(&["numrange"]).status.code(), Some(64));
    assert_eq!(hopping(&["--version"]).status.code(), Some(0));
}

#[test]
fn sigma_writes_points_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sigma3.csv");
    let o = hopping(&["sigma", "3", "--out", p(&out)]);
    assert!(o.status.success(), "{o:?}");
    let bytes = fs::read(&out).unwrap();
    let pts = read_points_csv(&bytes[..]).unwrap();
    assert_eq!(pts.len(), 9);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(manifest_path(&out)).unwrap()).unwrap();
    assert_eq!(manifest["command"], "sigma");
    assert_eq!(manifest["outputs"][0]["sha256"], sha256_hex(&bytes));
    assert_eq!(manifest["complete"], true);
}

#[test]
fn resource_caps_exit_65() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(hopping(&["sigma", "17", "--out", p(&out)]).status.code(), Some(65));
    assert_eq!(hopping(&["pi", "12", "--max-points", "1000", "--out", p(&out)]).status.code(), Some(65));
    assert_eq!(hopping(&["sweep", "40", "--box", "-3,3,-3,3", "--pgm", p(&out)]).status.code(), Some(65));
    assert!(!out.exists());
}

#[test]
fn certify_exit_codes_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let o = hopping(&["certify", "4", "--lambda", "3+0i", "--out", p(&cert)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(doc["valid"], true);
    assert_eq!(doc["centers"].as_array().unwrap().len(), 4);
    assert!(doc["radius"].as_f64().unwrap() < doc["eta"].as_f64().unwrap());
    for key in ["version", "lambda", "n", "s_value", "eps_n", "kernel_tolerances"] {
        assert!(!doc[key].is_null(), "{key}");
    }

    let o = hopping(&["certify", "8", "--lambda", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("not certified"));
}

#[test]
fn checkpoint_kill_resume_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("run.jsonl");
    let base = ["smin", "12", "--lambda", "-0.3,1.1", "--chunk", "128"];
    let with = |extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend(["--checkpoint", p(&ck)]);
        args.extend(extra);
        hopping(&args)
    };
    assert_eq!(with(&["--stop-after-chunks", "5"]).status.code(), Some(75));
    let resumed = with(&[]);
    assert!(resumed.status.success());
    assert_eq!(stdout(&resumed), stdout(&hopping(&base)));

    // other parameters against the same file
    let o = hopping(&["smin", "12", "--lambda", "0.3,1.1", "--chunk", "128", "--checkpoint", p(&ck)]);
    assert_eq!(o.status.code(), Some(66));

    fs::write(&ck, "not json\n").unwrap();
    assert_eq!(with(&[]).status.code(), Some(66));
}

#[test]
fn member_reports_in_and_out() {
    assert!(stdout(&hopping(&["member", "10", "--lambda", "0"])).starts_with("in"));
    assert!(stdout(&hopping(&["member", "4", "--lambda", "10", "--eta", "1"])).starts_with("out"));
}

#[test]
fn sweep_writes_raster_and_cells() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("s.pgm");
    let csv = dir.path().join("s.csv");
    let o = hopping(&[
        "sweep", "6", "--box", "-3,3,-3,3", "--resolution", "8", "--depth", "2", "--pgm", p(&pgm), "--csv", p(&csv),
    ]);
    assert!(o.status.success(), "{o:?}");
    let (w, h, px) = read_pgm(&fs::read(&pgm).unwrap()).unwrap();
    assert_eq!((w, h), (32, 32));
    assert!(px.contains(&0) && px.contains(&255));
    let cells = fs::read_to_string(&csv).unwrap();
    assert!(cells.starts_with("re,im,half_width,half_height,depth,class,s\n"));
    assert!(cells.contains(",excluded,"));
    assert!(manifest_path(&pgm).exists());
}

#[test]
fn boundary_and_numrange_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let lines = dir.path().join("b.csv");
    let o = hopping(&["boundary", "5", "--box", "-3,3,-3,3", "--resolution", "41", "--out", p(&lines)]);
    assert!(o.status.success(), "{o:?}");
    assert!(fs::read_to_string(&lines).unwrap().lines().count() > 10);

    let support = dir.path().join("w.csv");
    let o = hopping(&["numrange", "--b", "+-+-", "--angles", "90", "--out", p(&support)]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(fs::read_to_string(&support).unwrap().lines().count(), 91);
    let a = stdout(&hopping(&["numrange", "--seed", "7", "--n", "50"]));
    let b = stdout(&hopping(&["numrange", "--seed", "7", "--n", "50"]));
    assert_eq!(a, b);
    assert_eq!(hopping(&["numrange", "--b", "+-", "--n", "5"]).status.code(), Some(64));
}
