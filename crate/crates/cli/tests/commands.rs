use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopfdeform")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn validate_accepts_shipped_algebras() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["example4.dga", "loopspace.dga", "cup_one.dga"] {
        let out = run(dir.path(), &["validate", data(name).to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{name}: {}", stdout(&out));
    }
}

#[test]
fn malformed_input_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.dga");
    fs::write(&bad, "this is not a presentation\n").unwrap();
    let out = run(dir.path(), &["validate", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 3);

    let missing = run(dir.path(), &["validate", "no-such-file.dga"]);
    assert_eq!(code(&missing), 3);

    let usage = run(dir.path(), &["demo", "loopspace", "--pin-i", "7"]);
    assert_eq!(code(&usage), 3);
}

#[test]
fn emitted_homology_round_trips_and_is_a_zero_cochain_host() {
    let dir = tempfile::tempdir().unwrap();
    let alg = data("example4.dga");
    let out = run(dir.path(), &["bar", alg.to_str().unwrap(), "--cap", "5", "--emit", "h.pres"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(code(&run(dir.path(), &["validate", "h.pres"])), 0);

    fs::write(dir.path().join("zero.txt"), "").unwrap();
    let out = run(dir.path(), &["gs-trivial", "h.pres", "zero.txt"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("cls = 0: TRIVIAL"));

    let out = run(dir.path(), &["gs-d2", "h.pres", "--window", "4", "--samples", "5"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
}

#[test]
fn homology_lists_the_expected_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let alg = data("example4.dga");
    let out = run(dir.path(), &["homology", alg.to_str().unwrap(), "--cap", "4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("dimensions: [1, 1, 3, 4, 9]"), "{}", stdout(&out));
}

#[test]
fn example4_demo_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = run(dir.path(), &["demo", "example4"]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(stdout(&ok).contains("cls = 0: TRIVIAL"));

    let corrupt = run(dir.path(), &["demo", "example4", "--corrupt"]);
    assert_eq!(code(&corrupt), 1);
    assert!(stdout(&corrupt).contains("[FAIL]"));

    let short = run(dir.path(), &["demo", "example4", "--cap", "3"]);
    assert_eq!(code(&short), 2);
}

#[test]
fn json_report_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["--json", "demo", "example4"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "pass");
    assert!(v["checks"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn loopspace_demo_and_skip_transfer_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["demo", "loopspace", "--certificate", "cert.txt", "--emit", "omega.txt"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("NON-TRIVIAL"));
    let cert = fs::read_to_string(dir.path().join("cert.txt")).unwrap();
    assert!(cert.contains("beta*beta"), "{cert}");

    let again = run(
        dir.path(),
        &["demo", "loopspace", "--skip-transfer", "--omega", "omega.txt", "--certificate", "cert2.txt"],
    );
    assert_eq!(code(&again), 0, "{}", stdout(&again));
    assert!(stdout(&again).contains("NON-TRIVIAL"));
}

#[test]
fn transfer4_emits_a_cocycle_that_is_not_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let alg = data("loopspace.dga");
    fs::write(dir.path().join("pins.txt"), "pin g 2 1 : h2_1 h2_1 -> [a2|a3]\n").unwrap();
    let out =
        run(dir.path(), &["transfer4", alg.to_str().unwrap(), "--cap", "6", "--pins", "pins.txt", "--emit", "t.out"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let emitted = fs::read_to_string(dir.path().join("t.out")).unwrap();
    assert!(emitted.contains("omega 2 2 : h2_1 h2_1 -> h1_0*h2_2"), "{emitted}");
    let omega: String = emitted.lines().filter(|l| l.starts_with("omega")).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("w.txt"), omega).unwrap();

    let out = run(dir.path(), &["bar", alg.to_str().unwrap(), "--cap", "6", "--emit", "h.pres"]);
    assert_eq!(code(&out), 0);
    let out = run(dir.path(), &["gs-cocycle", "h.pres", "w.txt"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = run(dir.path(), &["gs-trivial", "h.pres", "w.txt", "--certificate", "c.txt"]);
    assert_eq!(code(&out), 1);
    assert!(dir.path().join("c.txt").exists());
}
