use sector_algebra::cli::run_args;
use sector_algebra::io::{emit_document, parse_document, Verdict};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_sector-algebra")).args(args).current_dir(corpus()).output().unwrap();
    let code = out.status.code().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

#[test]
fn circle_homology_is_z_z() {
    let (code, r) = run(&["homology", "-i", "circle.json"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "computed");
    assert_eq!(r["results"]["homology"]["summary"], "H0 = Z, H1 = Z");
}

#[test]
fn identity_idempotent_on_a2_passes() {
    let (code, r) = run(&["verify-lemma", "--id", "identity-idempotent", "-i", "a2.json"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["results"]["report"]["exact"], true);
}

#[test]
fn shrunk_cover_fails_with_exit_one() {
    let (code, r) = run(&["hypercover", "-i", "hexagon.json", "-i", "subsets-2.json", "-i", "circle-cover-shrunk.json"]);
    assert_eq!(code, 1);
    assert_eq!(r["results"]["verdict"], false);
}

#[test]
fn undetermined_never_exits_zero() {
    let (code, r) = run(&["local-to-global", "-i", "local-to-global-broken.json"]);
    assert_eq!(r["verdict"], "undetermined");
    assert_eq!(code, 1);
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["homology", "-i", "missing.json"][..],
        &["homology"],
        &["no-such-verb"],
        &["verify-lemma", "--id", "no-such-lemma", "-i", "a2.json"],
        &["homology", "-i", "circle.json", "-i", "circle.json"],
        &["cone", "-i", "circle-collapse.json"],
    ] {
        let (code, _) = run(args);
        assert_eq!(code, 2, "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn pipeline_is_deterministic() {
    let a = Command::new(env!("CARGO_BIN_EXE_sector-algebra"))
        .args(["pipeline", "-i", "pipeline.json"])
        .current_dir(corpus())
        .output()
        .unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_sector-algebra"))
        .args(["pipeline", "-i", "pipeline.json"])
        .current_dir(corpus())
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text: Vec<_> = (0..2)
        .map(|_| run_args(&["--format".into(), "text".into(), "pipeline".into(), "-i".into(), "pipeline.json".into()], &corpus()).unwrap())
        .collect();
    assert_eq!(text[0].0.render(text[0].1, false), text[1].0.render(text[1].1, false));
}

#[test]
fn pipeline_verdict_is_the_worst_step() {
    let (report, _) = run_args(&["pipeline".into(), "-i".into(), "pipeline.json".into()], &corpus()).unwrap();
    assert_eq!(report.verdict, Verdict::Pass);
    let steps = report.results["steps"].as_array().unwrap();
    assert!(steps.iter().all(|s| s["verdict"] != "fail"));
}

#[test]
fn corpus_documents_round_trip() {
    let mut n = 0;
    for entry in std::fs::read_dir(corpus()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = parse_document(&emit_document(&doc)).unwrap();
        assert_eq!(doc, again, "{}", path.display());
        n += 1;
    }
    assert!(n >= 20);
}

#[test]
fn text_format_has_the_header() {
    let out = Command::new(env!("CARGO_BIN_EXE_sector-algebra"))
        .args(["--format", "text", "adams", "profile", "--x", "0"])
        .env("NO_COLOR", "1")
        .output()
        .unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("sector-algebra report\ncommand: --format text adams profile --x 0\nverdict: computed\n"), "{s}");
    assert!(s.contains("closed_form: 0.500000000000"));
}
