//! Runs the command-line binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pointset-qubo"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(out: &Path, args: &[&str]) -> String {
    let o = run(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

#[test]
fn build_writes_dense_and_coo_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["build", "--theta", "0.5"]);
    let csv = fs::read_to_string(dir.path().join("P.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 22);
    assert!(lines[0].starts_with("label,clamp,"));
    assert!(lines.iter().all(|l| l.split(',').count() == 22));

    let side: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("P.json")).unwrap()).unwrap();
    assert_eq!(side["dim"], 2);
    assert_eq!(side["basisSize"], 20);
    assert_eq!(side["N"], 91);
    assert_eq!(side["M"], 91);
    assert_eq!(side["linkDegree"], 1);
    assert_eq!(side["clampedBit"], 0);

    ok(dir.path(), &["build", "--mode", "psr", "--k", "5", "--format", "coo"]);
    let coo = fs::read_to_string(dir.path().join("P.coo")).unwrap();
    assert!(coo.starts_with("# i j value"));
    for line in coo.lines().skip(1) {
        let t: Vec<&str> = line.split(' ').collect();
        let (i, j): (usize, usize) = (t[0].parse().unwrap(), t[1].parse().unwrap());
        assert!(i <= j && j < 21);
        t[2].parse::<f64>().unwrap();
    }
}

#[test]
fn solve_prints_decoded_transform() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let stdout = ok(
        dir.path(),
        &[
            "solve",
            "--theta",
            "0.3",
            "--sampler",
            "sa",
            "--sweeps",
            "500",
            "--trace",
            trace.to_str().unwrap(),
        ],
    );
    let v: Value = serde_json::from_str(&stdout).unwrap();
    for key in ["R_affine", "R_projected", "t", "degenerate", "energy", "bitstring"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["R_affine"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("solution.json").exists());
    assert!(dir.path().join("eval.json").exists());
    assert!(fs::read_to_string(trace).unwrap().starts_with("step,energy,bitstring"));
}

#[test]
fn spectrum_lists_levels() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(dir.path(), &["spectrum", "--theta", "0.2", "--levels", "4"]);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "energy,multiplicity,bitstring");
    assert_eq!(lines.len(), 5);
    let energies: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(energies.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn basis_dump_sizes() {
    let dir = tempfile::tempdir().unwrap();
    for (dim, n) in [("2", 20), ("3", 80)] {
        let stdout = ok(dir.path(), &["basis", "--dim", dim, "--dump"]);
        let lines: Vec<&str> = stdout.lines().collect();
        assert_eq!(lines.len(), n);
        for l in lines {
            serde_json::from_str::<Value>(l).unwrap();
        }
    }
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        run(dir.path(), &["build", "--dataset", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(dir.path(), &["basis", "--dim", "4"]).status.code(), Some(1));
    assert_eq!(
        run(dir.path(), &["build", "--mode", "te", "--k", "3"]).status.code(),
        Some(1)
    );
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"trials": 3, "unknownKey": 1}"#).unwrap();
    assert_eq!(
        run(dir.path(), &["--config", cfg.to_str().unwrap(), "bench", "misalign"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(1));
}

#[test]
fn anneal_sim_from_ising_file() {
    let dir = tempfile::tempdir().unwrap();
    let ising = dir.path().join("toy.ising");
    fs::write(&ising, "# toy\nh 0 0.5\nh 1 -0.3\nh 2 0.2\nJ 0 1 0.4\nJ 1 2 -0.6\n").unwrap();
    let stdout = ok(
        dir.path(),
        &["anneal-sim", "--ising", ising.to_str().unwrap(), "--time", "1,100"],
    );
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "time,steps,ground_overlap,rate_bound");
    let overlaps: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(overlaps[1] > 0.99 && overlaps[0] < overlaps[1]);
    let gap = fs::read_to_string(dir.path().join("gap_curve.csv")).unwrap();
    assert_eq!(gap.lines().count(), 102);
}

#[test]
fn same_seed_same_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["bench", "noise", "--trials", "2", "--seed", "9"];
    ok(a.path(), &args);
    ok(b.path(), &args);
    for name in ["bench_noise.csv", "bench_noise_trials.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn shrinkage_and_p_export() {
    let dir = tempfile::tempdir().unwrap();
    let v: Value = serde_json::from_str(&ok(dir.path(), &["shrinkage"])).unwrap();
    assert!(v["full"]["sigma_max"].as_f64().unwrap() < v["local"]["sigma_max"].as_f64().unwrap());
    ok(dir.path(), &["p-export"]);
    assert!(dir.path().join("P_heatmap.csv").exists());
    assert!(dir.path().join("P_blocks.json").exists());
}
