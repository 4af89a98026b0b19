use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_interwave");

const P1: &str = "params.gamma = 0.5
params.epsilon = 0.1
params.mu = 0.1
params.a = -0.08333333333333333
params.b = 0.25
params.c = -0.08333333333333333
params.d = 0.25
";

fn run(cmd: &str, toml: &str, out: &Path) -> i32 {
    let cfg = out.with_extension("toml");
    fs::write(&cfg, toml).unwrap();
    let st = Command::new(BIN).arg(cmd).arg("--config").arg(&cfg).arg("--out").arg(out).output().unwrap();
    st.status.code().unwrap()
}

fn report(path: &Path) -> Value {
    let doc: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    assert!(doc["config"].is_object() && doc["metadata"]["version"].is_string());
    doc["report"].clone()
}

#[test]
fn every_subcommand_is_exposed() {
    let out = Command::new(BIN).arg("--help").output().unwrap();
    let help = String::from_utf8(out.stdout).unwrap();
    for c in ["validate", "solve", "continue", "decay", "kernel-check", "evolve", "sweep"] {
        assert!(help.contains(c), "{c} missing from\n{help}");
    }
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run("validate", &format!("{P1}wave.speed = 0.1\n"), &d.path().join("ok")), 0);
    assert_eq!(run("validate", &format!("{P1}wave.speed = 0.2\n"), &d.path().join("fast")), 1);
    assert_eq!(run("validate", &format!("{P1}wave.sped = 0.1\n"), &d.path().join("typo")), 2);
    assert_eq!(run("validate", "params.gamma = 0.5\n", &d.path().join("missing")), 2);
    assert_eq!(run("solve", &format!("{P1}grid.N = 7\n"), &d.path().join("grid")), 2);
    let st = Command::new(BIN).arg("solve").output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}

#[test]
fn inadmissible_validate_still_writes_report() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("fast");
    assert_eq!(run("validate", &format!("{P1}wave.speed = 0.175\n"), &out), 1);
    let r = report(&out.join("validate.json"));
    assert_eq!(r["admissibility"]["admissible"], Value::Bool(false));
    assert!(r["quadratic_form"]["split_global_min"].as_f64().unwrap() < 0.0);
}

#[test]
fn solve_then_decay_from_file() {
    let d = tempfile::tempdir().unwrap();
    let solve = d.path().join("solve");
    let base = format!("{P1}grid.L = 200.0\ngrid.N = 4096\nwave.speed = 0.1\n");
    assert_eq!(run("solve", &base, &solve), 0);
    assert!(report(&solve.join("solution.json"))["residual"].as_f64().unwrap() < 1e-10);
    let csv = solve.join("solution.csv");
    let decay = d.path().join("decay");
    assert_eq!(run("decay", &format!("{base}decay.input = {:?}\n", csv.to_str().unwrap()), &decay), 0);
    let r = report(&decay.join("decay.json"));
    assert_eq!(r["kind"], "algebraic");
    assert!(r["fits"]["nu"]["max_deviation"].as_f64().unwrap() < 0.1);
    assert!(decay.join("tail_nu.csv").exists() && decay.join("schema.json").exists());
}

#[test]
fn kernel_check_and_continue() {
    let d = tempfile::tempdir().unwrap();
    let k = d.path().join("k");
    let toml = format!("{P1}params.mu2 = 4.0\nkernels.L = 128.0\nkernels.N = 65536\n");
    assert_eq!(run("kernel-check", &toml, &k), 0);
    let r = report(&k.join("kernels.json"));
    for name in ["K", "K1", "K2", "K3"] {
        assert!(r["kernels"][name]["max_abs_diff"].as_f64().unwrap() < 1e-4, "{name}");
    }
    let c = d.path().join("c");
    let toml = "params.gamma = 0.5\nparams.epsilon = 0.1\nparams.mu = 0.1\ngrid.L = 100.0\ngrid.N = 2048\n\
                wave.family = \"bo\"\ncontinuation.target = 0.02\n";
    assert_eq!(run("continue", toml, &c), 0);
    let doc: Value = serde_json::from_str(&fs::read_to_string(c.join("branch/branch.json")).unwrap()).unwrap();
    let files = doc["branch"]["files"].as_array().unwrap();
    assert!(!files.is_empty());
    assert!(c.join("branch").join(files[0].as_str().unwrap()).exists());
}

#[test]
fn evolve_and_sweep_are_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let evolve = format!("{P1}grid.L = 20.0\ngrid.N = 128\nevolution.t_final = 1.0\nevolution.dt = 0.05\n");
    let sweep = format!("{P1}seed = 3\ngrid.L = 10.0\ngrid.N = 64\nsweep.draws = 8\nsweep.symbol_grid.N = 256\n");
    for (cmd, toml, files) in [
        ("evolve", &evolve, &["monitors.csv", "final.csv", "trajectory.json"][..]),
        ("sweep", &sweep, &["sweep.csv", "sweep.json"][..]),
    ] {
        let (a, b) = (d.path().join(format!("{cmd}_a")), d.path().join(format!("{cmd}_b")));
        assert_eq!(run(cmd, toml, &a), 0);
        assert_eq!(run(cmd, toml, &b), 0);
        for f in files {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{cmd}/{f}");
        }
    }
}
