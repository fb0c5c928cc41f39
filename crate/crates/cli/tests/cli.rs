//! Drives the binary end to end: demo objects, analyze, render, plan, a tiny
//! dataset round and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vacugrasp"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vacugrasp_cli_{}_{}", tag, std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_small_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        r#"
seed = 5

[dataset]
grasps_per_object = 12
images_per_pose = 1
max_poses_per_object = 1
thumbnail_px = 16
shard_size = 128

[perturbation]
samples = 6

[camera]
fx = 131.25
fy = 131.25
cx = 79.5
cy = 59.5
width = 160
height = 120
"#,
    )
    .unwrap();
    path
}

#[test]
fn analyze_render_plan_pipeline() {
    let dir = workdir("pipeline");
    let objs = dir.join("objs");
    assert!(bin()
        .args(["dataset", "demo-objects", "--out"])
        .arg(&objs)
        .status()
        .unwrap()
        .success());

    let cube = objs.join("cube_50mm.obj");
    let out = bin()
        .args(["analyze", "--mesh"])
        .arg(&cube)
        .args([
            "--point",
            "0,0,0.05",
            "--approach",
            "0,0,-1",
            "--seed",
            "0",
        ])
        .arg("--json")
        .arg(dir.join("report.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report[0]["seal_feasible"], true);
    assert_eq!(report[0]["resists"], true);
    assert!(report[0]["lambda"].as_f64().unwrap() >= 0.9);

    let prefix = dir.join("cube");
    assert!(bin()
        .args(["render", "--mesh"])
        .arg(&cube)
        .arg("--out")
        .arg(&prefix)
        .status()
        .unwrap()
        .success());
    for ext in ["depth", "depth.json", "camera.json", "png"] {
        assert!(prefix.with_extension(ext).exists(), "missing .{}", ext);
    }

    let out = bin()
        .args(["plan", "--depth"])
        .arg(prefix.with_extension("depth"))
        .arg("--camera")
        .arg(prefix.with_extension("camera.json"))
        .args(["--metric", "pc", "--seed", "3"])
        .arg("--out")
        .arg(dir.join("plan.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plan: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("plan.json")).unwrap()).unwrap();
    // Planarity-centroid on the cube picks a top-face point near the center.
    assert!((plan["point"][2].as_f64().unwrap() - 0.05).abs() < 2e-3);
    assert!(plan["point"][0].as_f64().unwrap().abs() < 0.02);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn dataset_round_trip_via_cli() {
    let dir = workdir("dataset");
    let objs = dir.join("objs");
    assert!(bin()
        .args(["dataset", "demo-objects", "--out"])
        .arg(&objs)
        .status()
        .unwrap()
        .success());
    let config = write_small_config(&dir);

    let ds = dir.join("ds");
    let out = bin()
        .arg("--config")
        .arg(&config)
        .args(["dataset", "generate", "--objects"])
        .arg(&objs)
        .arg("--out")
        .arg(&ds)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(ds.join("manifest.json").exists());

    let out = bin()
        .args(["dataset", "verify", "--dir"])
        .arg(&ds)
        .arg("--objects")
        .arg(&objs)
        .args(["--audit", "0.05"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0 label mismatches"), "{}", text);

    let out = bin()
        .args(["dataset", "stats", "--dir"])
        .arg(&ds)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("positive fraction"));

    let out = bin()
        .args(["plotdata", "--dataset"])
        .arg(&ds)
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8_lossy(&out.stdout);
    assert!(csv.starts_with("tau,precision,recall,attempt_rate,success_rate"));
    assert!(csv.lines().count() > 1);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn every_subcommand_has_help() {
    for args in [
        vec!["analyze", "--help"],
        vec!["plan", "--help"],
        vec!["render", "--help"],
        vec!["dataset", "--help"],
        vec!["dataset", "generate", "--help"],
        vec!["dataset", "verify", "--help"],
        vec!["dataset", "stats", "--help"],
        vec!["plotdata", "--help"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert!(out.status.success(), "{:?}", args);
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn exit_codes() {
    let dir = workdir("exits");
    // Usage error: 2 (clap).
    let code = bin().arg("--bogus").output().unwrap().status.code();
    assert_eq!(code, Some(2));
    // Config error: 2.
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "bogus_key = 1\n").unwrap();
    let out = bin()
        .arg("--config")
        .arg(&bad)
        .args(["analyze", "--mesh", "x.obj", "--sample", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    // Runtime error: 1.
    let out = bin()
        .args(["analyze", "--mesh", "missing.obj", "--sample", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seeded_runs_are_bit_reproducible() {
    let dir = workdir("repro");
    let objs = dir.join("objs");
    assert!(bin()
        .args(["dataset", "demo-objects", "--out"])
        .arg(&objs)
        .status()
        .unwrap()
        .success());
    let config = write_small_config(&dir);
    let mut outputs = Vec::new();
    for tag in ["a", "b"] {
        let ds = dir.join(tag);
        assert!(bin()
            .arg("--config")
            .arg(&config)
            .args(["--seed", "77", "dataset", "generate", "--objects"])
            .arg(&objs)
            .arg("--out")
            .arg(&ds)
            .status()
            .unwrap()
            .success());
        let manifest: serde_json::Value =
            serde_json::from_slice(&std::fs::read(ds.join("manifest.json")).unwrap()).unwrap();
        let mut bytes = Vec::new();
        for shard in manifest["shards"].as_array().unwrap() {
            bytes.extend(std::fs::read(ds.join(shard["file"].as_str().unwrap())).unwrap());
        }
        outputs.push(bytes);
    }
    assert_eq!(outputs[0], outputs[1]);
    std::fs::remove_dir_all(&dir).ok();
}
