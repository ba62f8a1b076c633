use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn idealfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idealfree"))
        .args(args)
        .env_remove("IDEALFREE_WORKERS")
        .env_remove("IDEALFREE_DB")
        .env_remove("IDEALFREE_CERTIFICATES")
        .env_remove("IDEALFREE_STRATEGY")
        .env_remove("IDEALFREE_CHARPOLY_RANK")
        .env_remove("IDEALFREE_CONJUGACY_RANKS")
        .output()
        .expect("spawn idealfree")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = idealfree(&full);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (code, v)
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn exponents(v: &Value) -> Vec<u64> {
    v["report"]["records"][0]["verdict"]["exponents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect()
}

#[test]
fn roots_counts() {
    for (ty, n) in [("A1", 1), ("A2", 3), ("G2", 6), ("E8", 120)] {
        let (code, v) = json(&["roots", ty]);
        assert_eq!(code, 0);
        assert_eq!(v["roots"].as_array().unwrap().len(), n);
        let out = idealfree(&["roots", ty]);
        assert!(stdout(&out).starts_with(&format!("{ty}: {n} positive roots")), "{}", stdout(&out));
    }
}

#[test]
fn ideal_counts() {
    for (ty, n) in [("A3", 14), ("G2", 8), ("F4", 105), ("E8", 25080)] {
        let (code, v) = json(&["ideals", ty]);
        assert_eq!(code, 0);
        assert_eq!(v["ideals"], n, "{ty}");
        assert_eq!(v["nonempty_arrangements"], n - 1, "{ty}");
    }
    let (_, v) = json(&["ideals", "A2", "--list"]);
    assert_eq!(v["list"].as_array().unwrap().len(), 5);
}

#[test]
fn check_single_ideals() {
    let (code, v) = json(&["check", "G2", "--ideal", "empty"]);
    assert_eq!(code, 0);
    assert_eq!(exponents(&v), [1, 5]);
    assert_eq!(v["report"]["records"][0]["arrangement_size"], 6);

    let (code, v) = json(&["check", "A2", "--ideal", "full"]);
    assert_eq!(code, 0);
    assert_eq!(exponents(&v), [0, 0]);

    let (code, v) = json(&["check", "A3", "--ideal", "gen=3"]);
    assert_eq!(code, 0);
    assert_eq!(exponents(&v), [1, 1, 2]);
    assert_eq!(v["report"]["records"][0]["matches_prediction"], true);

    let out = idealfree(&["check", "B3", "--ideal", "empty"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("arrangement: 9 of 9 hyperplanes"), "{text}");
    assert!(text.contains("1, 3, 5"), "{text}");
}

#[test]
fn check_all_f4() {
    let (code, v) = json(&["check", "F4", "--all", "--workers", "2"]);
    assert_eq!(code, 0);
    let r = &v["report"];
    assert_eq!(r["ideal_count"], 105);
    assert_eq!(r["free_count"], 105);
    assert_eq!(r["prediction_mismatches"], 0);
    assert_eq!(r["errors"], 0);
    assert_eq!(v["config"]["workers"], 2);
    assert_eq!(v["tool"]["name"], "idealfree");
    assert!(v["census_checksum"].as_str().unwrap().len() == 64);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["check", "A2", "--ideal", "labels=0"][..],
        &["check", "A2", "--ideal", "labels=900"],
        &["check", "A2", "--ideal", "gen=7"],
        &["check", "A2", "--ideal", "bogus"],
        &["check", "Z9", "--all"],
        &["check", "A2"],
        &["check", "A2", "--all", "--conjugacy-ranks", "9..3"],
        &["check", "A2", "--all", "--strategy", "sideways"],
        &["roots", "E9"],
        &["charpoly", "/nonexistent/file"],
    ] {
        let out = idealfree(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn restrictions_census() {
    let (code, v) = json(&["restrictions", "A3"]);
    assert_eq!(code, 0);
    assert_eq!(v["census"]["2"], serde_json::json!([3]));
    assert_eq!(v["census"]["1"], serde_json::json!([1]));

    let out = idealfree(&["restrictions", "A1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("empty census"));

    let (_, v) = json(&["restrictions", "E8"]);
    let census = &v["census"];
    assert_eq!(census["7"], serde_json::json!([91]));
    assert_eq!(census["6"], serde_json::json!([63, 68]));
    assert_eq!(census["5"], serde_json::json!([41, 46, 49]));
    assert_eq!(census["4"], serde_json::json!([24, 25, 28, 30, 32, 32]));
    assert_eq!(census["3"], serde_json::json!([13, 13, 13, 16, 17, 17, 19, 19]));
}

#[test]
fn restriction_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("d4.json");
    let cache = cache.to_str().unwrap();
    let (_, first) = json(&["restrictions", "D4", "--cache", cache]);
    assert!(Path::new(cache).exists());
    let (_, second) = json(&["restrictions", "D4", "--cache", cache]);
    assert_eq!(first, second);
}

#[test]
fn charpoly_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = dir.path().join("a2.txt");
    std::fs::write(&a2, "# A2\n1 0\n0 1\n1 1\n[2, 2]\n").unwrap();
    let (code, v) = json(&["charpoly", a2.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["coefficients"], serde_json::json!([2, -3, 1]));
    assert_eq!(v["integer_roots"], serde_json::json!([1, 2]));
    let out = idealfree(&["charpoly", a2.to_str().unwrap()]);
    assert!(stdout(&out).starts_with("t^2 - 3t + 2\n"));

    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let (code, v) = json(&["charpoly", empty.to_str().unwrap(), "--rank", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["polynomial"], "t^3");
    assert_eq!(idealfree(&["charpoly", empty.to_str().unwrap()]).status.code(), Some(2));

    // four generic lines through the origin of a plane
    let generic = dir.path().join("generic.txt");
    std::fs::write(&generic, "1 0 0\n0 1 0\n0 0 1\n1 1 1\n").unwrap();
    let (_, v) = json(&["charpoly", generic.to_str().unwrap()]);
    assert_eq!(v["integer_roots"], Value::Null);
}

#[test]
fn database_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let db_a = dir.path().join("a.json");
    let db_b = dir.path().join("b.json");
    let merged = dir.path().join("m.json");
    let report = dir.path().join("report.json");
    let certs = dir.path().join("certs.json");

    let out = idealfree(&[
        "check", "A4", "--ideal", "empty",
        "--db", db_a.to_str().unwrap(),
        "--report", report.to_str().unwrap(),
        "--certificates", certs.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(exponents(&rep), [1, 2, 3, 4]);
    assert_eq!(rep["config"]["certificates"], certs.to_str().unwrap());
    let cert: Value = serde_json::from_slice(&std::fs::read(&certs).unwrap()).unwrap();
    let c = &cert[0]["certificate"];
    assert_eq!(c["exponents"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(c["steps"].as_array().unwrap().len(), 10);

    let out = idealfree(&["check", "A4", "--ideal", "gen=9", "--db", db_b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let (code, a) = json(&["db", "inspect", db_a.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(a["records"].as_u64().unwrap() > 0);
    assert_eq!(a["meta"]["ordering_policy"], "height-lex/1");

    let out = idealfree(&["db", "merge", db_a.to_str().unwrap(), db_b.to_str().unwrap(), "-o", merged.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, m) = json(&["db", "inspect", merged.to_str().unwrap()]);
    assert!(m["records"].as_u64() >= a["records"].as_u64());

    // a database from a different type is refused
    let out = idealfree(&["check", "D4", "--ideal", "empty", "--db", db_a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = idealfree(&["db", "merge", db_a.to_str().unwrap(), "/nonexistent", "-o", merged.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn environment_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("env.json");
    let out = Command::new(env!("CARGO_BIN_EXE_idealfree"))
        .args(["--json", "check", "B3", "--all"])
        .env("IDEALFREE_WORKERS", "1")
        .env("IDEALFREE_DB", &db)
        .env("IDEALFREE_STRATEGY", "greedy")
        .env("IDEALFREE_CHARPOLY_RANK", "0")
        .env("IDEALFREE_CONJUGACY_RANKS", "none")
        .env_remove("IDEALFREE_CERTIFICATES")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let cfg = &v["config"];
    assert_eq!(cfg["workers"], 1);
    assert_eq!(cfg["strategy"], "greedy");
    assert_eq!(cfg["charpoly_max_rank"], 0);
    assert_eq!(cfg["conjugacy_ranks"], Value::Null);
    assert_eq!(v["report"]["free_count"], 20);
    assert!(db.exists());

    let out = Command::new(env!("CARGO_BIN_EXE_idealfree"))
        .args(["check", "B3", "--all"])
        .env("IDEALFREE_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
