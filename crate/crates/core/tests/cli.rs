//! End-to-end runs of the `exrec` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use exrec::corpus::remote::{cache_key, manifest_path, Manifest, ManifestEntry};
use exrec::eval::EvalReport;
use exrec::query::SearchQuery;
use exrec::ranking::ScoreBreakdown;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn exrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exrec"))
        .args(args)
        .env_remove("GITHUB_TOKEN")
        .current_dir(std::env::temp_dir())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn query_prints_the_inferred_terms() {
    let o = exrec(&["query", p(&fixture("listings/context.java"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "IOException URL\n");
}

#[test]
fn recommend_json_round_trips() {
    let o = exrec(&[
        "--format",
        "json",
        "recommend",
        p(&fixture("listings/context.java")),
        "--corpus",
        p(&fixture("pool")),
        "--no-filter",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let ranked: Vec<ScoreBreakdown> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(ranked.len(), 5);
    assert_eq!(ranked[0].origin.to_string(), "listing2.java");
    let again = serde_json::to_string_pretty(&ranked).unwrap() + "\n";
    assert_eq!(again, stdout(&o));
}

#[test]
fn analyze_emits_each_view() {
    let file = fixture("listings/recommended.java");
    for emit in ["graph", "tokens", "handlers", "quality"] {
        let o = exrec(&["analyze", p(&file), "--emit", emit]);
        assert_eq!(o.status.code(), Some(0), "{emit}");
        assert!(!o.stdout.is_empty(), "{emit}");
    }
    let dot = stdout(&exrec(&["analyze", p(&file)]));
    assert!(dot.starts_with("digraph"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(exrec(&[]).status.code(), Some(1));
    assert_eq!(exrec(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(exrec(&["recommend", "x.java"]).status.code(), Some(1));
    assert_eq!(exrec(&["--config", "/nonexistent/exrec.toml", "query", "x"]).status.code(), Some(1));
    assert_eq!(exrec(&["--help"]).status.code(), Some(0));
    assert_eq!(exrec(&["--version"]).status.code(), Some(0));
}

#[test]
fn pipeline_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.java");
    std::fs::write(&empty, "int x = 1;\n").unwrap();
    let o = exrec(&["query", p(&empty)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn missing_oracle_writes_no_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = exrec(&[
        "evaluate",
        "--cases",
        p(&fixture("eval/cases.json")),
        "--oracle",
        p(&dir.path().join("missing.json")),
        "--out",
        p(&out),
    ]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!out.exists());
    assert!(o.stdout.is_empty());
}

#[test]
fn evaluate_writes_the_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = exrec(&[
        "--format",
        "json",
        "evaluate",
        "--cases",
        p(&fixture("eval/cases.json")),
        "--oracle",
        p(&fixture("eval/oracle.json")),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(written, std::fs::read_to_string(fixture("eval/report.json")).unwrap());
    let report: EvalReport = serde_json::from_str(&written).unwrap();
    assert_eq!(report.cases.len(), 10);

    let csv = stdout(&exrec(&[
        "--format",
        "csv",
        "evaluate",
        "--cases",
        p(&fixture("eval/cases.json")),
        "--oracle",
        p(&fixture("eval/oracle.json")),
    ]));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn fetch_without_token_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = exrec(&["fetch", "--query", "IOException URL", "--orgs", "acme", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn fetch_from_a_warm_cache_needs_no_token() {
    let dir = tempfile::tempdir().unwrap();
    let q = SearchQuery::new("IOException", "URL");
    let orgs = vec!["acme".to_string()];
    let text = "try { new URL(u).openStream(); } catch (IOException e) { log(e); }";
    let object = "0".repeat(64);
    std::fs::create_dir_all(dir.path().join("objects")).unwrap();
    std::fs::write(dir.path().join("objects").join(format!("{object}.java")), text).unwrap();
    let manifest = Manifest {
        query: q.rendered.clone(),
        orgs: orgs.clone(),
        limit: 5,
        entries: vec![ManifestEntry {
            id: "00000000000000aa".into(),
            repo: "acme/net".into(),
            path: "Fetch.java".into(),
            url: "https://example.invalid/Fetch.java".into(),
            object,
        }],
    };
    let path = manifest_path(dir.path(), &cache_key(&q, &orgs, 5));
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(&path, serde_json::to_string(&manifest).unwrap()).unwrap();

    let o = exrec(&["fetch", "--query", "IOException URL", "--orgs", "acme", "--limit", "5", "--out", p(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("(cached)"));
    assert!(stdout(&o).contains("acme/net/Fetch.java"));
}
