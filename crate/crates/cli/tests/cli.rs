//! End-to-end runs of the `isi` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use isi_core::lattice::{c3, BoxDims};
use isi_core::spins::SpinConfig;
use serde_json::Value;
use tempfile::TempDir;

fn isi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isi")).args(args).output().expect("spawn isi")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_snap(dir: &Path, name: &str, cfg: &SpinConfig) -> PathBuf {
    let path = dir.join(name);
    let mut f = fs::File::create(&path).unwrap();
    cfg.write_snapshot(&mut f, 1.0, 0).unwrap();
    path
}

/// One plus cell on top of the base face (0,0).
fn bump(d: BoxDims) -> SpinConfig {
    let mut s = SpinConfig::ground(d);
    s.set(c3(1, 1, 1), 1).unwrap();
    s
}

#[test]
fn cold_sample_is_flat_and_reproducible() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = isi(&[
            "sample", "--box", "3,3,2", "--beta", "50", "--samples", "3", "--seed", "7", "--burn-in", "5", "--thin",
            "2", "--out", p(dir),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for k in 0..3 {
        for ext in ["snap", "iface"] {
            let name = format!("sample_{k:05}.{ext}");
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
        }
    }
    let run: Value = serde_json::from_str(&fs::read_to_string(a.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["provenance"]["seed"], 7);
    assert_eq!(run["samples"], 3);

    let dec = json_of(&isi(&["decompose", "--input", p(&a.join("sample_00002.snap"))]));
    assert_eq!(dec["walls"], 0);
    assert_eq!(dec["ceilings"], 1);
    assert_eq!(dec["faces"], 4 * 3 * 3);
    assert_eq!(dec["excess"], 0);

    // the binary interface file decodes to the same thing given the box
    let dec2 = json_of(&isi(&["decompose", "--input", p(&a.join("sample_00002.iface")), "--box", "3,3,2"]));
    assert_eq!(dec2["faces"], dec["faces"]);
}

#[test]
fn bump_decomposes_into_one_wall() {
    let tmp = TempDir::new().unwrap();
    let d = BoxDims::new(3, 3, 2);
    let snap = write_snap(tmp.path(), "bump.snap", &bump(d));
    let dec = json_of(&isi(&["decompose", "--input", p(&snap)]));
    assert_eq!(dec["walls"], 1);
    assert_eq!(dec["wall_faces"], 4);
    assert_eq!(dec["excess"], 4);
    assert_eq!(dec["max_height"], 1);

    let pil = json_of(&isi(&["pillar", "--input", p(&snap), "--x", "0,0"]));
    assert_eq!(pil["hgt"], 1);
    assert_eq!(pil["cells"], 1);
    assert_eq!(pil["empty_base"], true);

    let other = json_of(&isi(&["pillar", "--input", p(&snap), "--x", "2,2"]));
    assert_eq!(other["hgt"], 0);
}

#[test]
fn psi_removes_a_bump() {
    let tmp = TempDir::new().unwrap();
    let d = BoxDims::new(4, 4, 3);
    let snap = write_snap(tmp.path(), "bump.snap", &bump(d));
    let out_iface = tmp.path().join("out.iface");
    let v = json_of(&isi(&["maps", "--psi", "--input", p(&snap), "--x", "0,0", "--out", p(&out_iface)]));
    assert_eq!(v["height"], 1);
    assert_eq!(v["bound_4h_minus_1"], true);
    let dec = json_of(&isi(&["decompose", "--input", p(&out_iface), "--box", "4,4,3"]));
    assert_eq!(dec["walls"], 0);
}

#[test]
fn phi_iso_reports_witness() {
    let tmp = TempDir::new().unwrap();
    let d = BoxDims::new(6, 6, 4);
    let snap = write_snap(tmp.path(), "bump.snap", &bump(d));
    let v = json_of(&isi(&["maps", "--input", p(&snap), "--x", "0,0", "--l", "1", "--h", "1"]));
    assert_eq!(v["map"], "phi_iso");
    assert_eq!(v["output_isolated"]["isolated"], true);
    assert_eq!(v["formula_consistent"], true);
    assert_eq!(v["witness"]["reconstructs"], true);
}

#[test]
fn mstar_on_linear_table() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("alpha.csv");
    let mut body = String::from("h,alpha\n");
    for h in 1..=6 {
        body.push_str(&format!("{h},{}\n", 4 * h));
    }
    fs::write(&csv, body).unwrap();
    let s = 10f64.exp().to_string();
    let v = json_of(&isi(&["stats", "mstar", "--s", &s, "--beta", "1", "--alpha-file", p(&csv)]));
    // inf{h : 4h > 10 - 2} = 3, and gamma = e^10 e^-12
    assert_eq!(v["m_star"], 3);
    let g = v["gamma"].as_f64().unwrap();
    assert!((g - (-2f64).exp()).abs() < 1e-12, "{g}");
    assert_eq!(v["gamma_in_band"], true);
}

#[test]
fn maxstats_on_cold_samples() {
    let tmp = TempDir::new().unwrap();
    let d = BoxDims::new(3, 3, 2);
    let flat = write_snap(tmp.path(), "flat.snap", &SpinConfig::ground(d));
    let b = write_snap(tmp.path(), "bump.snap", &bump(d));
    let v = json_of(&isi(&["stats", "maxstats", "--inputs", p(&flat), p(&b)]));
    assert_eq!(v["samples"], 2);
    assert_eq!(v["identity_holds"], true);
    assert_eq!(v["mean"].as_f64().unwrap(), 0.5);
}

#[test]
fn tails_reports_shortfall() {
    let tmp = TempDir::new().unwrap();
    let flat = write_snap(tmp.path(), "flat.snap", &SpinConfig::ground(BoxDims::new(3, 3, 2)));
    let out = isi(&["stats", "tails", "--inputs", p(&flat), "--min-samples", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("short by 4"));
}

#[test]
fn config_file_supplies_flags() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.json");
    let out_dir = tmp.path().join("s");
    fs::write(
        &cfg,
        serde_json::json!({ "box": "2,2,2", "beta": 40.0, "samples": 1, "seed": 3, "burn_in": 1, "out": out_dir })
            .to_string(),
    )
    .unwrap();
    // the flag overrides the file's seed
    let out = isi(&["--config", p(&cfg), "sample", "--seed", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["provenance"]["seed"], 5);
    assert_eq!(run["config"]["args"]["beta"], 40.0);

    fs::write(&cfg, r#"{ "bogus": 1 }"#).unwrap();
    assert_eq!(isi(&["--config", p(&cfg), "sample"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    // missing flags and bad values are usage errors
    assert_eq!(isi(&["sample", "--box", "3"]).status.code(), Some(1));
    assert_eq!(isi(&["sample", "--box", "0", "--beta", "1"]).status.code(), Some(1));
    assert_eq!(isi(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(isi(&["verify", "quick", "--only", "13"]).status.code(), Some(1));
    // unreadable input is a precondition failure
    let missing = tmp.path().join("nope.snap");
    assert_eq!(isi(&["decompose", "--input", p(&missing)]).status.code(), Some(2));
    let flat = write_snap(tmp.path(), "flat.snap", &SpinConfig::ground(BoxDims::new(3, 3, 2)));
    assert_eq!(isi(&["pillar", "--input", p(&flat), "--x", "9,9"]).status.code(), Some(2));
}

#[test]
fn verify_single_criterion() {
    let tmp = TempDir::new().unwrap();
    let report = tmp.path().join("report.jsonl");
    let out = isi(&["verify", "quick", "--only", "12", "--out", p(&report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("C12 PASS"), "{stdout}");
    let line: Value = serde_json::from_str(fs::read_to_string(&report).unwrap().trim()).unwrap();
    assert_eq!(line["id"], 12);
    assert_eq!(line["pass"], true);
}
