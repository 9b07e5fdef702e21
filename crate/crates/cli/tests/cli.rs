use std::path::Path;
use std::process::Command;

fn votectl(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_votectl")).args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn winners_of_a_small_election() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("e.txt");
    std::fs::write(&f, "rule=fallback\n3 3\n0\n\n1 0\n").unwrap();
    let (ok, out, _) = votectl(&["winners", "--election", path(&f)]);
    assert!(ok);
    // maj = 2 reached by candidate 0 at level 2.
    assert_eq!(out.trim(), "winners=0 level=2");
}

#[test]
fn solve_and_oracle_agree_on_generated_instances() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("i.txt");
    for (control, rule) in [("CCDV", "bucklin"), ("DCPC-TP", "fallback"), ("CCAC", "plurality"), ("CCAV", "fallback")] {
        for trial in 0..5 {
            let t = trial.to_string();
            let (ok, _, err) = votectl(&[
                "gen", "--rule", rule, "--dist", "TM", "--m", "4", "--n", "6", "--control", control, "--seed", "11",
                "--trial", &t, "--out", path(&f),
            ]);
            assert!(ok, "{err}");
            let (_, solved, _) = votectl(&["solve", "--instance", path(&f), "--timeout-secs", "30"]);
            let (_, oracle, _) = votectl(&["oracle", "--instance", path(&f)]);
            let first = |s: &str| s.split_whitespace().next().unwrap_or("").to_string();
            assert_eq!(first(&solved), first(&oracle), "{control} {rule} trial {trial}");
            assert!(oracle.contains("witnesses_checked="));
        }
    }
}

#[test]
fn gen_is_reproducible_and_accepts_tie_suffix() {
    let a = votectl(&["gen", "--rule", "bucklin", "--m", "4", "--n", "5", "--control", "DCPV", "--tie", "TE", "--seed", "3"]);
    let b = votectl(&["gen", "--rule", "bucklin", "--m", "4", "--n", "5", "--control", "DCPV-TE", "--seed", "3"]);
    assert!(a.0);
    assert_eq!(a.1, b.1);
    assert!(a.1.contains("control=DCPV\ntie=TE\n"));
}

#[test]
fn timeout_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("i.txt");
    // Candidate 0 is second everywhere behind 1; deleting one voter can
    // never help, but with the pruning off the search still has to run.
    let mut text = String::from("rule=bucklin\n3 40\n");
    for _ in 0..40 {
        text.push_str("1 0 2\n");
    }
    text.push_str("control=CCDV\ntie=-\nc=0\nk=13\n");
    std::fs::write(&f, text).unwrap();
    let (ok, out, _) = votectl(&["solve", "--instance", path(&f), "--timeout-secs", "0.001", "--no-conditions"]);
    assert!(ok);
    assert!(out.starts_with("TIMEOUT elapsed_ms="), "{out}");
    let (_, out, _) = votectl(&["solve", "--instance", path(&f), "--timeout-secs", "10"]);
    assert_eq!(out.trim(), "NO");
}

#[test]
fn experiment_then_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let summary = dir.path().join("s.txt");
    let (ok, _, err) = votectl(&[
        "experiment", "--rules", "fallback", "--controls", "CCDV,DCAC", "--dists", "IC,TM", "--m-list", "4",
        "--n-list", "4,8", "--trials", "10", "--timeout-secs", "10", "--seed", "2", "--jobs", "2", "--out", path(&csv),
        "--no-timing",
    ]);
    assert!(ok, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 8);
    assert!(text.starts_with("rule,control,tie,dist,m,n,trials,k,cp,ci,to,avg_ms_yes,avg_ms_no,avg_ms_decided,seed\n"));
    let (ok, _, err) = votectl(&["summarize", "--in", path(&csv), "--out", path(&summary)]);
    assert!(ok, "{err}");
    let s = std::fs::read_to_string(&summary).unwrap();
    assert!(s.contains("IC model") && s.contains("TM model") && s.contains("DCAC"));
}

#[test]
fn unstudied_pairs_need_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let base = [
        "experiment", "--rules", "plurality", "--controls", "CCDV", "--dists", "IC", "--m-list", "3", "--n-list", "3",
        "--trials", "2", "--out", path(&csv),
    ];
    let (ok, _, err) = votectl(&base);
    assert!(!ok);
    assert!(err.contains("CCDV"), "{err}");
    let mut with_flag = base.to_vec();
    with_flag.push("--allow-unstudied");
    assert!(votectl(&with_flag).0);
}

#[test]
fn malformed_instance_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    std::fs::write(&f, "rule=bucklin\n3 1\n0 1\ncontrol=CCDV\nc=0\nk=0\n").unwrap();
    let (ok, _, err) = votectl(&["solve", "--instance", path(&f)]);
    assert!(!ok);
    assert!(err.starts_with("error:"));
}
