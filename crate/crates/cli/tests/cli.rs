use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surfbraid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn present_closed_json_has_sixteen_relators() {
    let o = run(&[
        "present", "--group", "closed", "--m", "3", "--g", "2", "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["relators"].as_array().unwrap().len(), 16);
    assert_eq!(v["group"], "closed");
}

#[test]
fn present_kernel_ab_has_sigma_square() {
    let o = run(&[
        "present",
        "--group",
        "kernel-ab",
        "--m",
        "2",
        "--g",
        "1",
        "--n",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l.ends_with(": s^2")));
}

#[test]
fn present_rejects_zero_m() {
    let o = run(&[
        "present", "--group", "mixed", "--m", "0", "--g", "1", "--n", "2",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("m = 0"));
}

#[test]
fn present_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    let o = run(&[
        "present",
        "--group",
        "mixed",
        "--m",
        "2",
        "--g",
        "1",
        "--n",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
    assert!(fs::read_to_string(&path)
        .unwrap()
        .starts_with("group mixed\n"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(
        code(&run(&[
            "present", "--group", "torus", "--g", "1", "--m", "1"
        ])),
        2
    );
}

#[test]
fn obstruct_report() {
    let o = run(&["obstruct", "--g", "2", "--m", "4"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["modulus"], 6);
}

#[test]
fn obstruct_single_n() {
    let o = run(&["obstruct", "--g", "1", "--m", "3", "--n", "7"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "obstructed\n"));
    let o = run(&["obstruct", "--g", "1", "--m", "1", "--n", "13"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "admissible\n"));
    assert_eq!(
        code(&run(&["obstruct", "--g", "0", "--m", "1", "--n", "1"])),
        2
    );
}

#[test]
fn obstruct_n_max_lists_multiples() {
    let o = run(&["obstruct", "--g", "1", "--m", "3", "--n-max", "10"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["admissible"], serde_json::json!([3, 6, 9]));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["obstruct", "--g", "2", "--m", "3"]);
    let b = run(&["obstruct", "--g", "2", "--m", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&[
        "present",
        "--group",
        "mixed-quotient",
        "--g",
        "2",
        "--m",
        "3",
        "--n",
        "2",
    ]);
    let b = run(&[
        "present",
        "--group",
        "mixed-quotient",
        "--g",
        "2",
        "--m",
        "3",
        "--n",
        "2",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_round_trips_obstruct_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = run(&["obstruct", "--g", "2", "--m", "3"]);
    fs::write(&path, &o.stdout).unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let n = v["witness_n"].to_string();
    let o = run(&[
        "verify",
        "--g",
        "2",
        "--m",
        "3",
        "--n",
        &n,
        "--witness",
        path.to_str().unwrap(),
    ]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "pass\n"));
}

#[test]
fn verify_zero_witness_fails_on_surface_relation() {
    let dir = tempfile::tempdir().unwrap();
    let report: Value =
        serde_json::from_str(&stdout(&run(&["obstruct", "--g", "2", "--m", "2"]))).unwrap();
    let cols = report["cols"].as_u64().unwrap() as usize;
    let path = dir.path().join("zero.json");
    fs::write(&path, serde_json::to_string(&vec![0; cols]).unwrap()).unwrap();
    let o = run(&[
        "verify",
        "--g",
        "2",
        "--m",
        "2",
        "--n",
        "1",
        "--witness",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.starts_with("SR-bar")), "{out}");
}

#[test]
fn verify_rejects_malformed_witness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "[1, 2").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(
        code(&run(&[
            "verify",
            "--g",
            "1",
            "--m",
            "2",
            "--n",
            "2",
            "--witness",
            p
        ])),
        2
    );
    fs::write(&path, "[1, 2]").unwrap();
    assert_eq!(
        code(&run(&[
            "verify",
            "--g",
            "1",
            "--m",
            "2",
            "--n",
            "2",
            "--witness",
            p
        ])),
        2
    );
}

#[test]
fn abelianize_group_and_word() {
    let o = run(&[
        "abelianize",
        "--g",
        "2",
        "--n",
        "3",
        "--m",
        "2",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, serde_json::json!({"free_rank": 5, "torsion": [2]}));
    let o = run(&[
        "abelianize",
        "--g",
        "1",
        "--n",
        "2",
        "--m",
        "2",
        "--word",
        "s a1 z1^-2 s",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["z"], serde_json::json!([-2]));
    assert_eq!(v["sigma"], 0);
}

#[test]
fn section_demo_torus() {
    let o = run(&["section-demo", "--g", "1", "--n", "3", "--resolution", "8"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("min separation 1/4 turn"), "{out}");
    assert!(out.ends_with("verified\n"));
}

#[test]
fn section_demo_exports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let o = run(&[
        "section-demo",
        "--g",
        "2",
        "--n",
        "5",
        "--resolution",
        "12",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["min_separation_turns"], "1/6");
    let data: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(data["n"], 5);
    assert!(data["samples"]
        .as_array()
        .unwrap()
        .iter()
        .all(|s| s["images"].as_array().unwrap().len() == 5));
}

#[test]
fn section_demo_rejects_genus_zero() {
    assert_eq!(
        code(&run(&[
            "section-demo",
            "--g",
            "0",
            "--n",
            "2",
            "--resolution",
            "8"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "section-demo",
            "--g",
            "1",
            "--n",
            "2",
            "--resolution",
            "2"
        ])),
        2
    );
}
