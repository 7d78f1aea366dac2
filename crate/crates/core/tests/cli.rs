use std::process::Command;

fn hiddencut() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hiddencut"))
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"name":"bell-ish","recipe":{"kind":"product","factors":[1,2]},"t":[1,4]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = hiddencut()
        .args(["dist-scan", "--config"])
        .arg(&cfg)
        .args(["--seed", "9", "--override", "t=[2]", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let text = std::fs::read_to_string(out.join("distribution_scan.csv")).unwrap();
    assert!(text.contains("# seed: 9"));
    assert!(text.contains("\"name\":\"bell-ish\""));
    assert!(text.lines().any(|l| l == "bitstring,weight,p_t2"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 9);
    // the output location is not recorded
    assert!(!text.contains(out.to_str().unwrap()));
}

#[test]
fn failures_report_json_and_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = hiddencut()
        .args(["purity-scan", "--override", "shots=0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["error"]["kind"], "config");
    assert_eq!(report["error"]["command"], "purity-scan");

    let missing = hiddencut()
        .args(["abelian-demo", "--config", "/nonexistent/cfg.json"])
        .output()
        .unwrap();
    assert!(!missing.status.success());
    let report: serde_json::Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(report["error"]["kind"], "io");

    let usage = hiddencut().arg("no-such-verb").output().unwrap();
    assert!(!usage.status.success());
}
