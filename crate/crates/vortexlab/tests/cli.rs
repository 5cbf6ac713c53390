//! End-to-end checks of the command-line surface: exit codes, config
//! round-trips, deterministic output, and seeded reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn vortexlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vortexlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn stability_json_output() {
    let out = vortexlab(&[
        "stability",
        "--family",
        "sphere-ring",
        "--n",
        "6",
        "--theta0",
        "0.4",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // cos² 0.4 ≈ 0.848 > 4/5: stable
    assert_eq!(v["verdict"], "S");
    assert!(!v["hessian_eigs"].as_array().unwrap().is_empty());
    assert!(v["linearization_eigs"][0].as_array().unwrap().len() == 2);

    let out = vortexlab(&[
        "stability",
        "--family",
        "planar-ring-center",
        "--n",
        "5",
        "--lambda",
        "2.0",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "S");
    assert!((v["xi"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn simulate_round_trip_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("ring.json");
    write(
        &config,
        r#"{"model": "sphere-rotating", "omega": 0.3,
            "vortices": [{"lambda": 1.0, "theta": 0.6, "phi": 0.0},
                         {"lambda": 1.0, "theta": 0.6, "phi": 2.0943951023931953},
                         {"lambda": 1.0, "theta": 0.6, "phi": 4.1887902047863905}]}"#,
    );
    let out1 = dir.path().join("a.csv");
    let st = vortexlab(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--t-end",
        "2.0",
        "--dt",
        "0.1",
        "--out",
        out1.to_str().unwrap(),
    ]);
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );

    // identical command, identical bytes
    let out2 = dir.path().join("b.csv");
    vortexlab(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--t-end",
        "2.0",
        "--dt",
        "0.1",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());

    // final state reloads and re-simulates
    let final_state = out1.with_extension("final.json");
    assert!(final_state.exists());
    let out3 = dir.path().join("c.csv");
    let st = vortexlab(&[
        "simulate",
        "--config",
        final_state.to_str().unwrap(),
        "--t-end",
        "1.0",
        "--dt",
        "0.1",
        "--out",
        out3.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    // the reloaded run starts exactly at the stored energy/momentum
    let row = |p: &Path, k: usize| -> Vec<f64> {
        let text = std::fs::read_to_string(p).unwrap();
        text.lines()
            .nth(k)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect()
    };
    let end_of_first = row(&out1, 21);
    let start_of_second = row(&out3, 1);
    let (h1, j1) = (end_of_first[7], end_of_first[8]);
    let (h2, j2) = (start_of_second[7], start_of_second[8]);
    assert!((h1 - h2).abs() < 1e-9, "H: {h1} vs {h2}");
    assert!((j1 - j2).abs() < 1e-9, "J: {j1} vs {j2}");
}

#[test]
fn exit_codes() {
    // 1: unusable config
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    write(&bad, r#"{"model": "torus", "vortices": []}"#);
    let st = vortexlab(&[
        "simulate",
        "--config",
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(1));

    // 3: collision abort, with the colliding pair in the report
    let coll = dir.path().join("collide.json");
    write(
        &coll,
        r#"{"model": "planar",
            "vortices": [{"lambda": 1.0, "x": 0.0, "y": 0.0},
                         {"lambda": 1.0, "x": 5e-9, "y": 0.0},
                         {"lambda": 1.0, "x": 1.0, "y": 0.0}]}"#,
    );
    let st = vortexlab(&[
        "simulate",
        "--config",
        coll.to_str().unwrap(),
        "--t-end",
        "1.0",
        "--dt",
        "0.01",
        "--out",
        dir.path().join("y.csv").to_str().unwrap(),
    ]);
    assert_eq!(st.status.code(), Some(3));
    let err = String::from_utf8_lossy(&st.stderr);
    assert!(err.contains("pair (0, 1)"), "stderr: {err}");

    // 0: a passing verification suite
    let st = vortexlab(&["verify", "--suite", "trig"]);
    assert_eq!(st.status.code(), Some(0));

    // 2: a failing verification suite (the ring-sum identity is false for
    // finite rings; the suite documents this)
    let st = vortexlab(&["verify", "--suite", "appendix-a"]);
    assert_eq!(st.status.code(), Some(2));

    // 1: unknown suite
    let st = vortexlab(&["verify", "--suite", "nonsense"]);
    assert_eq!(st.status.code(), Some(1));
}

#[test]
fn seeded_suites_reproduce_bit_for_bit() {
    let run = || vortexlab(&["verify", "--suite", "conservation", "--seed", "7"]).stdout;
    assert_eq!(run(), run());
    // different seed, different sampled systems, still passing
    let st = vortexlab(&["verify", "--suite", "conservation", "--seed", "8"]);
    assert_eq!(st.status.code(), Some(0));
}

#[test]
fn specfun_csv_table() {
    let out = vortexlab(&["verify", "--suite", "specfun", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,k0,k1,seam_residual");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 4);
    let x: f64 = first[0].parse().unwrap();
    assert!((x - 1e-6).abs() < 1e-12);
    assert_eq!(
        text.lines().count(),
        201 + text.lines().filter(|l| l.starts_with("suite")).count()
            + text
                .lines()
                .filter(|l| l.trim_start().starts_with("["))
                .count()
    );
}

#[test]
fn sweep_writes_csv_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("diagram.csv");
    let st = vortexlab(&[
        "sweep",
        "--family",
        "geostrophic-ring-center",
        "--n",
        "4",
        "--kappa",
        "0:1:0.5",
        "--lambda",
        "-1:2:0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        st.status.success(),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("kappa,lambda,verdict"));
    assert_eq!(text.lines().count(), 1 + 3 * 7);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["family"], "geostrophic-ring-center");
    assert_eq!(meta["n"], 4);
}

#[test]
fn rotating_frame_flag() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("one.json");
    write(
        &config,
        r#"{"model": "sphere-rotating", "omega": 0.5,
            "vortices": [{"lambda": 1.0, "theta": 0.8, "phi": 0.0}]}"#,
    );
    let out = dir.path().join("t.csv");
    let st = vortexlab(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--t-end",
        "2.0",
        "--dt",
        "0.5",
        "--frame",
        "rotating",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    // a single vortex precesses at exactly Ω, so it is frozen in the
    // rotating frame
    let text = std::fs::read_to_string(&out).unwrap();
    for line in text.lines().skip(1) {
        let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(row[2].abs() < 1e-8 || (row[2] - 2.0 * std::f64::consts::PI).abs() < 1e-8);
    }
}
