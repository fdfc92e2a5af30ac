use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydberg-cz")).args(args).current_dir(cwd).output().unwrap()
}

#[test]
fn simulate_writes_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--preset", "to", "--out", "res", "simulate", "--trajectory", "11"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let base = dir.path().join("res").join("simulate");
    let gate = std::fs::read_to_string(base.join("gate_result.csv")).unwrap();
    assert!(gate.starts_with("preset,"));
    assert_eq!(gate.lines().count(), 2);
    let traj = std::fs::read_to_string(base.join("trajectory.csv")).unwrap();
    assert_eq!(traj.lines().count(), 12);
    let manifest = std::fs::read_to_string(base.join("manifest.toml")).unwrap();
    for key in ["version", "config_sha256", "seed", "samples", "[config"] {
        assert!(manifest.contains(key), "manifest lacks {key}");
    }
}

#[test]
fn config_subcommand_output_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--preset", "der", "--seed", "9", "config"], dir.path());
    assert!(out.status.success());
    std::fs::write(dir.path().join("run.toml"), &out.stdout).unwrap();
    let again = run(&["--config", "run.toml", "config"], dir.path());
    assert!(again.status.success());
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn manifest_config_reruns_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = run(&["--preset", "der", "--samples", "3", "--seed", "4", "--out", "a", "montecarlo"], dir.path());
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let manifest: toml::Table =
        std::fs::read_to_string(dir.path().join("a/montecarlo/manifest.toml")).unwrap().parse().unwrap();
    let config = manifest["config"].as_table().unwrap();
    std::fs::write(dir.path().join("rerun.toml"), toml::to_string(config).unwrap()).unwrap();
    let second = run(&["--config", "rerun.toml", "--out", "b", "montecarlo"], dir.path());
    assert!(second.status.success(), "{}", String::from_utf8_lossy(&second.stderr));
    let read = |d: &str| std::fs::read(dir.path().join(d).join("montecarlo/samples.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
}

#[test]
fn exit_codes_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["--preset", "bogus", "simulate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["--config", "missing.toml", "simulate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["reproduce", "9z"], dir.path()).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.toml"), "[pulse]\nunknown = 1\n").unwrap();
    assert_eq!(run(&["--config", "bad.toml", "simulate"], dir.path()).status.code(), Some(2));

    std::fs::write(dir.path().join("blocker"), "").unwrap();
    assert_eq!(run(&["--out", "blocker/sub", "simulate"], dir.path()).status.code(), Some(4));

    std::fs::write(dir.path().join("tiny.toml"), "[integrator]\nmax_steps = 10\n").unwrap();
    assert_eq!(run(&["--config", "tiny.toml", "--out", "x", "simulate"], dir.path()).status.code(), Some(3));
}
