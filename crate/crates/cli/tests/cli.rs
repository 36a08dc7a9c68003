use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn concordia(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_concordia"))
        .current_dir(dir)
        .args(args)
        .env("CONCORDIA_LOG", "off")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = concordia(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = concordia(dir, args);
    assert!(!out.status.success(), "{args:?} succeeded");
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

/// Ingested fixtures matched into `s.session.json` with concepts applied.
fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    for f in ["orders.sql", "sales.xsd"] {
        fs::copy(data.join(f), dir.path().join(f)).unwrap();
    }
    let d = dir.path();
    assert!(ok(d, &["ingest", "orders.sql", "--out", "orders.json"]).contains("with 17 elements"));
    assert!(ok(d, &["ingest", "sales.xsd", "--out", "sales.json"]).contains("with 13 elements"));
    assert!(ok(d, &["match", "orders.json", "sales.json", "--out", "s.session.json"]).contains("221 pairs"));
    ok(d, &["summarize", "s.session.json", "--schema", "orders", "--suggest", "--apply"]);
    ok(d, &["summarize", "s.session.json", "--schema", "sales", "--suggest", "--apply"]);
    dir
}

#[test]
fn user_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (code, err) = fails(d, &["ingest", "missing.sql", "--out", "x.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: ") && err.contains("missing.sql"), "{err}");
    assert_eq!(err.lines().count(), 1);

    assert_eq!(fails(d, &["frobnicate"]).0, 1);
    assert_eq!(fails(d, &["analyze", "s.session.json"]).0, 1);

    fs::write(d.join("odd.txt"), "x").unwrap();
    let (code, err) = fails(d, &["ingest", "odd.txt", "--out", "x.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("--format"), "{err}");

    fs::write(d.join("bad.sql"), "CREATE TABLE (").unwrap();
    assert_eq!(fails(d, &["ingest", "bad.sql", "--out", "x.json"]).0, 1);
    assert!(!d.join("x.json").exists());
}

#[test]
fn help_and_version_exit_with_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ok(dir.path(), &["--help"]).contains("ingest"));
    assert!(ok(dir.path(), &["--version"]).starts_with("concordia "));
}

#[test]
fn review_decide_and_reports() {
    let dir = workspace();
    let d = dir.path();
    let review = ok(d, &["review", "s.session.json", "--concept", "orders/customer", "--min-score", "0.2"]);
    let mut lines = review.lines();
    assert!(lines.next().unwrap().starts_with("orders/customer vs sales:"));
    let first: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(first[1], "candidate");
    assert_eq!(first[2], "customer/first_name");

    let out = ok(d, &["decide", "s.session.json", "--pair", "orders:2:sales:2", "--status", "accepted", "--author", "kim"]);
    assert_eq!(out.trim(), "accepted orders:2 -> sales:2 (equivalent)");
    ok(d, &["decide", "s.session.json", "--pair", "orders:0:sales:0", "--status", "accepted"]);
    let (code, err) = fails(d, &["decide", "s.session.json", "--pair", "orders:2:nowhere", "--status", "rejected"]);
    assert_eq!(code, 1, "{err}");
    let (code, err) = fails(d, &["decide", "s.session.json", "--pair", "orders:2:sales:2", "--status", "accepted", "--at", "yesterday"]);
    assert_eq!(code, 1);
    assert!(err.contains("RFC 3339"), "{err}");

    let partition = ok(d, &["analyze", "s.session.json", "--partition"]);
    assert!(partition.contains("[left] orders: 17 elements\nCOMMON: 2 (12%)\nLEFT_ONLY: 15 (88%)"), "{partition}");
    assert!(partition.contains("MATCHED_PAIRS: 2"));

    let json = ok(d, &["analyze", "s.session.json", "--partition", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["right"]["common_percent"], 15);

    let concepts = ok(d, &["summarize", "s.session.json", "--schema", "sales"]);
    assert!(concepts.contains("sales/Client\t5 elements"), "{concepts}");

    let vocab = ok(d, &["analyze", "s.session.json", "--vocabulary"]);
    assert!(vocab.contains("CELL {orders, sales}: 2 terms"), "{vocab}");

    let clusters = ok(d, &["analyze", "s.session.json", "--cluster", "--cutoff", "0.99"]);
    assert!(clusters.contains("cluster 1: orders, sales"), "{clusters}");

    ok(d, &["export", "s.session.json", "--concepts", "--out", "c.csv"]);
    let sheet = fs::read_to_string(d.join("c.csv")).unwrap();
    assert!(sheet.contains("MATCHED,customer,6,Client,5,2\n"), "{sheet}");
    assert_eq!(sheet.lines().count() - 1, 3 + 3 - 1);
}

#[test]
fn tampered_schema_is_refused() {
    let dir = workspace();
    let d = dir.path();
    let text = fs::read_to_string(d.join("sales.json")).unwrap();
    fs::write(d.join("sales.json"), text.replace("Invoice", "Receipt")).unwrap();
    let (code, err) = fails(d, &["analyze", "s.session.json", "--partition"]);
    assert_eq!(code, 1);
    assert!(err.contains("sales"), "{err}");
}

#[test]
fn search_ranks_the_query_first() {
    let dir = workspace();
    let d = dir.path();
    fs::create_dir(d.join("repo")).unwrap();
    fs::copy(d.join("orders.json"), d.join("repo/orders.json")).unwrap();
    fs::copy(d.join("sales.json"), d.join("repo/sales.json")).unwrap();
    let out = ok(d, &["analyze", "s.session.json", "--search", "orders.json", "repo", "--threshold", "0.2"]);
    let ranked: Vec<&str> = out.lines().skip(1).collect();
    assert!(ranked[0].starts_with("1. orders\t1.000000"), "{out}");
    assert!(ranked[1].starts_with("2. sales"), "{out}");
}
