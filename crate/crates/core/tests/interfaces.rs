//! Command-line and file-format contract: exit codes, configuration
//! handling, manifest completeness and binary/CSV round trips.

use std::fs;
use std::path::Path;
use std::process::Command;

use scalerel::fields::io::read_complex_binary;
use scalerel::scenario::{sha256_hex, RunManifest, MANIFEST_NAME};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scalerel"))
}

fn write_cfg(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.cfg");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn solve_produces_checksummed_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "scenario = sho\nseed = 4\nt_total = 0.5\n");
    let out = tmp.path().join("run");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let manifest = RunManifest::load(&out).unwrap();
    assert!(manifest.pass && !manifest.incomplete);
    assert_eq!(manifest.scenario, "sho");
    assert_eq!(manifest.config["seed"], "4");

    // every file in the directory except the manifest is listed, with a
    // checksum that matches the bytes on disk
    let mut on_disk: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != MANIFEST_NAME)
        .collect();
    on_disk.sort();
    let mut listed: Vec<String> = manifest.files.iter().map(|f| f.path.clone()).collect();
    listed.sort();
    assert_eq!(on_disk, listed);
    for f in &manifest.files {
        let bytes = fs::read(out.join(&f.path)).unwrap();
        assert_eq!(sha256_hex(&bytes), f.sha256, "{}", f.path);
    }

    // the binary snapshot reads back as a normalized state on the run grid
    let mut reader = fs::File::open(out.join("psi_final.bin")).unwrap();
    let psi = read_complex_binary(&mut reader).unwrap();
    assert_eq!(psi.grid.n(0), 512);
    assert!((psi.norm2() - 1.0).abs() < 1e-8);

    // CSV outputs carry a header and one row per node
    let csv = fs::read_to_string(out.join("density_final.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().contains(','));
    assert_eq!(lines.count(), 512);
}

#[test]
fn plots_cover_every_csv_and_extend_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "scenario = fractal-scan\nseed = 4\npaths = 20\n");
    let out = tmp.path().join("run");
    assert!(bin()
        .args(["fractal", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    assert!(bin().arg("plots").arg("--out").arg(&out).status().unwrap().success());

    let manifest = RunManifest::load(&out).unwrap();
    let listed: Vec<&str> = manifest.files.iter().map(|f| f.path.as_str()).collect();
    for f in &manifest.files {
        if let Some(stem) = f.path.strip_suffix(".csv") {
            let script = format!("plot_{stem}.gp");
            assert!(listed.contains(&script.as_str()), "missing {script}");
            assert!(out.join(&script).exists());
        }
    }
}

#[test]
fn exit_codes_distinguish_config_errors() {
    let tmp = tempfile::tempdir().unwrap();

    // missing mandatory seed
    let status = bin().arg("solve").arg("--out").arg(tmp.path().join("a")).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // unknown key in the config file
    let cfg = write_cfg(tmp.path(), "scenario = sho\nseed = 1\nbogus = 2\n");
    let status = bin().args(["solve", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // unreadable config path
    let status = bin()
        .args(["solve", "--config"])
        .arg(tmp.path().join("missing.cfg"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn flag_overrides_beat_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "scenario = fractal-scan\nseed = 9\npaths = 15\nt_total = 0.5\n",
    );
    let out = tmp.path().join("run");
    assert!(bin()
        .args(["fractal", "--config"])
        .arg(&cfg)
        .args(["--seed", "123"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let manifest = RunManifest::load(&out).unwrap();
    assert_eq!(manifest.config["seed"], "123");
    assert_eq!(manifest.config["paths"], "15");
}

#[test]
fn identical_seeds_reproduce_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "scenario = fractal-scan\nseed = 6\npaths = 15\n");
    let mut digests = Vec::new();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        assert!(bin()
            .args(["fractal", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap()
            .success());
        let manifest = RunManifest::load(&out).unwrap();
        let mut files: Vec<(String, String)> =
            manifest.files.into_iter().map(|f| (f.path, f.sha256)).collect();
        files.sort();
        digests.push(files);
    }
    assert_eq!(digests[0], digests[1]);
}
