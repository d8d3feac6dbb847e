use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use solwave::{read_solution, write_solution, ModeBasis, Parameters, ReducedState};
use tempfile::TempDir;

fn solwave(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solwave"))
        .current_dir(dir)
        .args(args)
        .env_remove("SOLWAVE_GAMMA")
        .env_remove("SOLWAVE_MAX_STEPS")
        .env_remove("SOLWAVE_OUT")
        .env_remove("SOLWAVE_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap())
        .collect()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let idx = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn malformed_config_exits_64_without_output() {
    let tmp = TempDir::new().unwrap();
    for text in [
        "{not json",
        r#"{"schema_version": 1, "gama": 0.0}"#,
        r#"{"schema_version": 1, "eps0": -1.0}"#,
    ] {
        fs::write(tmp.path().join("bad.json"), text).unwrap();
        let o = solwave(tmp.path(), &["--config", "bad.json", "--out", "out", "continue"]);
        assert_eq!(o.status.code(), Some(64), "{text}");
        assert!(!tmp.path().join("out").exists());
    }
    let o = solwave(tmp.path(), &["--config", "absent.json", "--out", "out", "continue"]);
    assert_eq!(o.status.code(), Some(66));
    let o = solwave(tmp.path(), &["continue", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(64));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn zero_steps_writes_only_the_seed() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("run.json"),
        r#"{"schema_version": 1, "gamma": -1.0, "continuation": {"max_steps": 0}, "output_dir": "out"}"#,
    )
    .unwrap();
    let o = solwave(tmp.path(), &["--config", "run.json", "continue"]);
    assert_eq!(o.status.code(), Some(0));
    let out = tmp.path().join("out");
    let header = fs::read_to_string(out.join("branch.csv")).unwrap();
    assert_eq!(
        header.lines().next().unwrap(),
        "step,s,alpha,F,crest_w1,m1,m2,m3,lopatinskii,flow_force,newton_iters,nodal,overhang"
    );
    assert_eq!(csv_rows(&out.join("branch.csv")).len(), 1);
    assert_eq!(
        fs::read_to_string(out.join("diagnostics.ndjson"))
            .unwrap()
            .lines()
            .count(),
        1
    );
    assert!(out.join("solutions/step_00000.json").exists());
    assert!(stdout(&o).contains("MaxSteps"));
}

#[test]
fn environment_overrides_the_file() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("run.json"),
        r#"{"schema_version": 1, "continuation": {"max_steps": 500}}"#,
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_solwave"))
        .current_dir(tmp.path())
        .args(["--config", "run.json", "continue"])
        .env("SOLWAVE_MAX_STEPS", "1")
        .env("SOLWAVE_GAMMA", "0")
        .env("SOLWAVE_OUT", "envout")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let csv = tmp.path().join("envout/branch.csv");
    assert_eq!(csv_rows(&csv).len(), 2);
    // Seed at α = 1 - γ - ε0 with γ = 0.
    assert!((column(&csv, "alpha")[0] - 0.99).abs() < 1e-15);
}

#[test]
fn reruns_are_bitwise_identical() {
    let tmp = TempDir::new().unwrap();
    for out in ["a", "b"] {
        let o = solwave(tmp.path(), &["--max-steps", "4", "--out", out, "continue"]);
        assert_eq!(o.status.code(), Some(0));
    }
    for file in ["branch.csv", "diagnostics.ndjson", "solutions/step_00004.json"] {
        assert_eq!(
            fs::read(tmp.path().join("a").join(file)).unwrap(),
            fs::read(tmp.path().join("b").join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn diagnostics_records_carry_report_fields() {
    let tmp = TempDir::new().unwrap();
    let o = solwave(tmp.path(), &["--max-steps", "2", "--out", "out", "continue"]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("out/diagnostics.ndjson")).unwrap();
    let steps = column(&tmp.path().join("out/branch.csv"), "step");
    assert_eq!(text.lines().count(), steps.len());
    for (line, step) in text.lines().zip(steps) {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["step"].as_f64().unwrap(), step);
        for key in [
            "gamma",
            "alpha",
            "froude",
            "crest",
            "flow_force_values",
            "flow_force_spread",
            "phi_identity_residual",
            "integral_identity_residual",
            "complementing_identity",
            "monitor",
            "nodal",
            "overhang",
            "stagnation_points",
            "psi_bound_ok",
        ] {
            assert!(v.get(key).is_some(), "{key} missing");
        }
    }
}

#[test]
fn invariants_on_trivial_missing_and_tampered_files() {
    let tmp = TempDir::new().unwrap();
    let basis = ModeBasis::new(32.0, 64).unwrap();
    let trivial = ReducedState::trivial(basis, Parameters::new(-1.0, 1.5).unwrap());
    write_solution(&tmp.path().join("trivial.json"), &trivial).unwrap();
    let o = solwave(tmp.path(), &["invariants", "trivial.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = solwave(tmp.path(), &["invariants", "missing.json"]);
    assert_eq!(o.status.code(), Some(66));
    fs::write(tmp.path().join("garbage.json"), "{}").unwrap();
    assert_eq!(
        solwave(tmp.path(), &["invariants", "garbage.json"]).status.code(),
        Some(66)
    );

    let o = solwave(tmp.path(), &["--max-steps", "0", "--out", "out", "continue"]);
    assert_eq!(o.status.code(), Some(0));
    let seed_path = tmp.path().join("out/solutions/step_00000.json");
    let o = solwave(tmp.path(), &["invariants", seed_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut state = read_solution(&seed_path).unwrap();
    state.w1.coeffs_mut()[3] += 1e-3;
    write_solution(&tmp.path().join("tampered.json"), &state).unwrap();
    let o = solwave(tmp.path(), &["invariants", "tampered.json"]);
    assert_ne!(o.status.code(), Some(0));
    let table = stdout(&o);
    let spread = table.lines().find(|l| l.starts_with("flow_force_spread")).unwrap();
    assert!(spread.ends_with("FAIL"), "{table}");
}

#[test]
fn conjugate_cases() {
    let tmp = TempDir::new().unwrap();
    let o = solwave(tmp.path(), &["--gamma", "0", "conjugate", "--alpha", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let value = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    // 0.6 d² - d - 1 = 0 after removing the trivial root d = 1.
    assert!((value("d_* ") - (1.0 + 3.4f64.sqrt()) / 1.2).abs() < 1e-12);
    assert!(text.contains("PASS"));

    let o = solwave(tmp.path(), &["--gamma", "-1", "conjugate", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("degenerate"));

    let o = solwave(tmp.path(), &["--gamma", "0", "conjugate", "--alpha", "0.999"]);
    let text = stdout(&o);
    let value = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    assert!(value("d_* ") > value("d_cr"));

    let o = solwave(tmp.path(), &["conjugate", "--alpha", "-1"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn dispersion_output() {
    let tmp = TempDir::new().unwrap();
    let o = solwave(tmp.path(), &["--gamma", "0.2", "dispersion", "--alpha", "1.0"]);
    let k: f64 = stdout(&o).split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((k / k.tanh() - 1.2).abs() < 1e-12);
    let o = solwave(tmp.path(), &["--gamma", "0", "dispersion", "--alpha", "0.5"]);
    assert!(stdout(&o).starts_with("none"));
}

#[test]
fn reduced_ode_loop_reaches_turning_point() {
    let tmp = TempDir::new().unwrap();
    let o = solwave(
        tmp.path(),
        &["--gamma", "-1", "--out", "out", "reduced-ode", "--step", "0.01"],
    );
    assert_eq!(o.status.code(), Some(0));
    let file = tmp.path().join("out/reduced_ode.csv");
    let q = column(&file, "Q");
    let p = column(&file, "P");
    let closest = q
        .iter()
        .zip(&p)
        .map(|(q, p)| ((q - 3.0 / 7.0).powi(2) + p * p).sqrt())
        .fold(f64::INFINITY, f64::min);
    assert!(closest < 1e-4);
    // The loop closes: both ends are back near the saddle.
    assert!(q[0].abs() < 1e-6 && q.last().unwrap().abs() < 1e-4);
}

#[test]
fn profiles_of_flat_and_small_waves() {
    let tmp = TempDir::new().unwrap();
    let basis = ModeBasis::new(32.0, 64).unwrap();
    write_solution(
        &tmp.path().join("trivial.json"),
        &ReducedState::trivial(basis, Parameters::new(0.0, 0.5).unwrap()),
    )
    .unwrap();
    let o = solwave(
        tmp.path(),
        &["--out", "flat", "profile", "trivial.json", "--samples", "33"],
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&tmp.path().join("flat/profile.csv"));
    assert_eq!(rows.iter().filter(|r| &r[0] == "surface").count(), 33);
    for r in rows.iter().filter(|r| &r[0] == "surface") {
        assert_eq!(r[4].parse::<f64>().unwrap(), 1.0);
    }
    assert!(stdout(&o).contains("overhang false"));

    let o = solwave(
        tmp.path(),
        &["--eps0", "0.05", "--max-steps", "0", "--out", "run", "continue"],
    );
    assert_eq!(o.status.code(), Some(0));
    let o = solwave(
        tmp.path(),
        &[
            "--out",
            "hump",
            "profile",
            "run/solutions/step_00000.json",
            "--samples",
            "257",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let surface: Vec<(f64, f64)> = csv_rows(&tmp.path().join("hump/profile.csv"))
        .iter()
        .filter(|r| &r[0] == "surface")
        .map(|r| (r[3].parse().unwrap(), r[4].parse().unwrap()))
        .collect();
    let top = surface
        .iter()
        .cloned()
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    assert_eq!(top.0, 0.0);
    let n = surface.len();
    for i in 0..n {
        let (a, b) = (surface[i], surface[n - 1 - i]);
        assert!((a.0 + b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }
    // Single hump: Y falls monotonically away from the crest.
    for w in surface[n / 2..].windows(2) {
        assert!(w[1].1 <= w[0].1 + 1e-12);
    }
}

#[test]
fn default_branch_for_negative_vorticity() {
    let tmp = TempDir::new().unwrap();
    let o = solwave(tmp.path(), &["--gamma", "-1", "--out", "out", "continue"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = tmp.path().join("out/branch.csv");
    let crest = column(&csv, "crest_w1");
    assert!(crest.len() >= 50, "{} rows", crest.len());
    assert!(crest.windows(2).all(|w| w[1] > w[0]));
    let alpha = column(&csv, "alpha");
    assert!(alpha.iter().all(|&a| a < 2.0));

    let last = format!("out/solutions/step_{:05}.json", crest.len() - 1);
    let o = solwave(tmp.path(), &["invariants", &last]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
