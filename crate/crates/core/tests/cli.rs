use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bogomolov")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn compute_g9_text_and_json() {
    let o = run(&["compute", "--catalog", "G9", "--prime", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("B0(G) = Z_5"), "{s}");
    assert!(s.contains("[c,b][d,a]^-1"), "{s}");
    assert!(s.contains("free rank 7"), "{s}");

    let o = run(&["compute", "--catalog", "G9", "--prime", "5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bogomolov"]["invariants"], serde_json::json!([5]));
    assert_eq!(v["bogomolov"]["generators"], serde_json::json!(["[c,b][d,a]^-1"]));
    assert_eq!(v["free_rank"], 7);
    assert!(v["timings_ms"].is_null());
}

#[test]
fn cp_extension_output() {
    let o = run(&["compute", "--catalog", "G9", "--prime", "5", "--cp-extension"]);
    let s = stdout(&o);
    assert!(s.contains("comm [d,a] = e T1"), "{s}");
    assert!(s.contains("pow T1 = 1"), "{s}");
}

#[test]
fn verify_prop31_passes() {
    let o = run(&["verify", "--prime", "7", "--set", "prop3.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_reports_known_mismatches() {
    let o = run(&["verify", "--prime", "5", "--set", "exp5", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let text = v.to_string();
    assert!(text.contains("G37") && text.contains("G141"));
}

#[test]
fn catalog_listing() {
    let s = stdout(&run(&["catalog", "list"]));
    for id in ["G9", "G190", "G110"] {
        assert!(s.lines().any(|l| l.split_whitespace().next() == Some(id)), "{id}");
    }
    let o = run(&["catalog", "show", "G9"]);
    assert!(stdout(&o).contains("comm [d,a] = e"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["compute", "--catalog", "G0", "--prime", "5"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--prime", "5"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--catalog", "G9", "--prime", "9"]).status.code(), Some(2));
    assert_eq!(run(&["compute", "--catalog", "G9", "--prime", "5", "--strategy", "sampled"]).status.code(), Some(2));
    let o = run(&["compute", "--catalog", "G122", "--prime", "7"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&["lemma24", "--catalog", "G9", "--prime", "7"]).status.code(), Some(0));
    assert_eq!(run(&["schur", "--catalog", "G2", "--prime", "5"]).status.code(), Some(0));
    assert_eq!(run(&["consistency", "--catalog", "G9", "--prime", "3"]).status.code(), Some(1));
    assert_eq!(run(&["consistency", "--catalog", "G9", "--prime", "5"]).status.code(), Some(0));
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let args = |w: &'static str| {
        vec!["--workers", w, "compute", "--catalog", "G37", "--prime", "3", "--strategy", "full", "--mode", "full", "--json", "--dump-rows"]
    };
    let one = run(&args("1"));
    let four = run(&args("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_bogomolov"))
        .env("BOGOMOLOV_WORKERS", "3")
        .args(["compute", "--catalog", "G110", "--prime", "5", "--json"])
        .output()
        .unwrap();
    assert_eq!(env.stdout, run(&["--workers", "1", "compute", "--catalog", "G110", "--prime", "5", "--json"]).stdout);
}
