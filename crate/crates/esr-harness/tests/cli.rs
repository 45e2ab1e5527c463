//! End-to-end checks of the command-line binary: exit codes, CSV output
//! and reproducibility.

use std::fs;
use std::process::Command;

fn harness() -> Command {
    Command::new(env!("CARGO_BIN_EXE_esr-harness"))
}

#[test]
fn a_valid_run_exits_zero_and_writes_the_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let output = harness()
        .args([
            "--env", "fishwood", "--algo", "dmcts", "--utility", "fishwood-min",
            "--episodes", "10", "--n-exec", "2", "--runs", "2", "--seed", "3",
        ])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("env=fishwood"), "{stdout}");
    assert!(stdout.contains("trailing_mean="), "{stdout}");
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "episode,mean_utility,stderr,run_0,run_1,trailing_mean"
    );
    assert_eq!(lines.count(), 10);
}

#[test]
fn reruns_with_the_same_seed_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    for out in [&first, &second] {
        let status = harness()
            .args([
                "--env", "stock", "--algo", "dmcts", "--utility", "risk-seeking-sq",
                "--episodes", "8", "--n-exec", "2", "--runs", "2", "--seed", "11",
                "--J", "20",
            ])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
}

#[test]
fn different_seeds_change_the_curves() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, seed) in [(&a, "1"), (&b, "2")] {
        let status = harness()
            .args([
                "--env", "stock", "--algo", "nlu-mcts", "--utility", "risk-seeking-sq",
                "--episodes", "8", "--n-exec", "2", "--runs", "2", "--seed", seed,
            ])
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn mismatched_utility_and_environment_exit_with_the_config_code() {
    let output = harness()
        .args([
            "--env", "momab", "--algo", "nlu-mcts", "--utility", "risk-seeking-sq",
            "--episodes", "2",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("expects 1 objectives"), "{stderr}");
}

#[test]
fn unknown_environment_is_a_usage_error() {
    let output = harness()
        .args(["--env", "gridworld", "--algo", "dmcts", "--utility", "product"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn missing_env_config_file_exits_with_the_runtime_code() {
    let output = harness()
        .args([
            "--env", "fishwood", "--algo", "dmcts", "--utility", "fishwood-min",
            "--episodes", "2", "--env-config", "/nonexistent/params.toml",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn utility_parameters_parse_from_the_flag() {
    let output = harness()
        .args([
            "--env", "stock", "--algo", "dmcts", "--utility", "risk-averse-sqrt:shift=200",
            "--episodes", "4", "--runs", "2",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("utility=risk-averse-sqrt:shift=200"), "{stdout}");
}
