use std::path::Path;
use std::process::{Command, Output};

fn efikit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_efikit"))
        .args(args)
        .output()
        .expect("spawn efikit")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn entropy_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = efikit(&["entropy", "--seed", "3", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("report.json").is_file());
    assert!(out_dir.join("checks.csv").is_file());
    assert!(out_dir.join("entropy.csv").is_file());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("entropy:") && stdout.contains("0 failed"));
}

#[test]
fn no_output_dir_means_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_efikit"))
        .arg("kolmo")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn quick_verify_of_one_suite() {
    let out = efikit(&["verify", "--suite", "metrics", "--quick"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[input]\npair = \"identical\"\n");
    let out_dir = dir.path().join("out");
    let out = efikit(&[
        "pipeline",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("FAIL"));
    assert!(stderr.contains("downstream stages skipped"));
    // The failing report is still written.
    assert!(out_dir.join("report.json").is_file());
}

#[test]
fn malformed_config_exits_two_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    for text in [
        "[params]\nepsilon = 0.1\n",
        "[params]\neps = 3.0\n",
        "seed = \"x\"\n",
    ] {
        let cfg = write_config(dir.path(), text);
        let out = efikit(&[
            "pipeline",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 2, "{text:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("config error:"));
        assert!(!out_dir.exists());
    }
}

#[test]
fn runtime_config_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[params]\nl_max = 27\n");
    let out_dir = dir.path().join("out");
    let out = efikit(&[
        "kolmo",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!out_dir.exists());
}

#[test]
fn missing_config_file_exits_two() {
    let out = efikit(&["entropy", "--config", "/nonexistent/efikit.toml"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn seed_flag_overrides_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed = 5\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(
        code(&efikit(&[
            "entropy",
            "--config",
            &cfg,
            "--seed",
            "9",
            "--out",
            a.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&efikit(&[
            "entropy",
            "--seed",
            "9",
            "--out",
            b.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        std::fs::read(a.join("entropy.csv")).unwrap(),
        std::fs::read(b.join("entropy.csv")).unwrap()
    );
}

#[test]
fn usage_errors_come_from_clap() {
    assert_eq!(code(&efikit(&["frobnicate"])), 2);
    assert_eq!(code(&efikit(&["verify", "--suite", "everything"])), 2);
    assert_eq!(code(&efikit(&["--help"])), 0);
}
