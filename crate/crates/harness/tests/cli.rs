use std::process::Command;

use dr_harness::{parse_scenario, read_csv, render_scenario, Scheme};

fn drsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drsim"))
}

fn small_scenario(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("small.json");
    std::fs::write(&path, render_scenario(&dr_core::reference::heterogeneous(4, 4000.0))).unwrap();
    path
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = drsim()
            .arg("--scenario")
            .arg(&scenario)
            .args(["--scheme", "lm,sg1", "--capacity", "400:4000:3", "--kmax", "8", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let rows = read_csv(a.as_slice()).unwrap();
    // two schemes, three capacities, two classes plus the total
    assert_eq!(rows.len(), 18);
    assert!(rows[..9].iter().all(|r| r.scheme == Scheme::Lm));
    assert!(rows.iter().all(|r| r.wall_s == 0.0));
}

#[test]
fn trace_output() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path());
    let trace = dir.path().join("trace.csv");
    let out = drsim()
        .arg("--scenario")
        .arg(&scenario)
        .args(["--scheme", "sg2", "--capacity", "2500", "--kmax", "6", "--trace"])
        .arg(&trace)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(trace).unwrap();
    assert!(text.starts_with("k,alpha,total_vital,total_comfort,best\n1,"));
    // the sweep itself went to standard output
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("capacity,scheme,class"));

    let two = drsim()
        .arg("--scenario")
        .arg(&scenario)
        .args(["--scheme", "sg1,sg2", "--capacity", "2500", "--trace"])
        .arg(dir.path().join("t2.csv"))
        .output()
        .unwrap();
    assert!(!two.status.success());
}

#[test]
fn bad_inputs_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"horizon\": 3,\n  \"homes\": [ }").unwrap();
    let out = drsim().arg("--scenario").arg(&broken).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let scenario = small_scenario(dir.path());
    let out = drsim()
        .arg("--scenario")
        .arg(&scenario)
        .args(["--scheme", "xx"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(parse_scenario(&std::fs::read_to_string(&scenario).unwrap()).is_ok());
}

#[test]
fn oracle_check_flag() {
    let out = drsim().args(["--oracle-check", "--oracle-cases", "15"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("15 cases") && text.contains("0 failures"), "{text}");
}
