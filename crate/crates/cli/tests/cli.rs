use std::path::Path;
use std::process::{Command, Output};

fn hoplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoplab")).args(args).env("HOPLAB_THREADS", "2").output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = hoplab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn degree_table() {
    let text = ok(&["degrees", "--tau", "2.5", "--jmax", "5"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,f_j,g_j,tail_f,tail_g");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0,0,"));
}

#[test]
fn degree_sample_and_graph_files() {
    let dir = tempfile::tempdir().unwrap();
    let deg = dir.path().join("deg.txt");
    ok(&["degrees", "--n", "500", "--seed", "3", "--out", deg.to_str().unwrap()]);
    assert_eq!(String::from_utf8(read(&deg)).unwrap().lines().count(), 500);
    let edges = dir.path().join("g.txt");
    let summary = ok(&["graph", "--n", "300", "--out", edges.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(v["nodes"], 300);
    let rows = String::from_utf8(read(&edges)).unwrap().lines().count();
    assert_eq!(v["edges"], rows);
}

#[test]
fn exit_codes() {
    assert_eq!(hoplab(&["degrees", "--tau", "3.5"]).status.code(), Some(2));
    assert_eq!(hoplab(&["limitlaw", "--a", "0.5", "--ysamples", "10"]).status.code(), Some(2));
    assert_eq!(hoplab(&["compare", "--n", "100", "--external", "/nonexistent/h.csv"]).status.code(), Some(3));
    assert_eq!(hoplab(&["bogus"]).status.code(), Some(2));
}

#[test]
fn malformed_external_histogram_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    std::fs::write(&h, "distance,count\n3,5\n4,-1\n").unwrap();
    let out = hoplab(&["compare", "--n", "200", "--pairs", "10", "--external", h.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":3:"));
}

#[test]
fn hopcount_batch_csv() {
    let text = ok(&["hopcount", "--n", "2000", "--pairs", "20", "--seed", "4"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "seed,u,v,distance,status");
    assert_eq!(lines.len(), 21);
    let dir = tempfile::tempdir().unwrap();
    ok(&["hopcount", "--n", "2000", "--pairs", "1", "--traces", dir.path().to_str().unwrap()]);
    assert!(String::from_utf8(read(&dir.path().join("trace_u.csv"))).unwrap().starts_with("k,Z_k,Y_k,M_k"));
}

#[test]
fn survival_outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        ok(&["survival", "--n1", "1000", "--kmax", "2", "--pairs", "300", "--seed", "9", "--out", d.path().to_str().unwrap()]);
    }
    for name in ["survival_N1000.csv", "survival_N5623.csv", "hopcounts_N5623.csv", "run.json"] {
        assert_eq!(read(&a.path().join(name)), read(&b.path().join(name)), "{name}");
    }
}

#[test]
fn survival_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"tau": 2.6, "sizes": {"list": [400]}, "pairs_per_n": 50}"#).unwrap();
    let v: serde_json::Value = serde_json::from_str(&ok(&["survival", "--config", cfg.to_str().unwrap()])).unwrap();
    assert_eq!(v["curves"][0]["n"], 400);
    assert_eq!(v["curves"][0]["pairs"], 50);
}

#[test]
fn bp_samples_feed_the_limit_law() {
    let dir = tempfile::tempdir().unwrap();
    let v: serde_json::Value = serde_json::from_str(&ok(&["bp", "--replicas", "400", "--out", dir.path().to_str().unwrap()])).unwrap();
    assert_eq!(v["survival_fraction"], 1.0);
    let ys = dir.path().join("y.csv");
    let out = dir.path().join("law");
    ok(&["limitlaw", "--n", "48696", "--ys", ys.to_str().unwrap(), "--lmin", "-5", "--lmax", "5", "--out", out.to_str().unwrap()]);
    let text = String::from_utf8(read(&out.join("limit_law.csv"))).unwrap();
    assert_eq!(text.lines().next().unwrap(), "l,c_l,threshold,survival,survival_ci,pmf");
    assert_eq!(text.lines().count(), 12);
    // Samples drawn at another tau are refused.
    assert_eq!(hoplab(&["limitlaw", "--tau", "2.5", "--a", "0", "--ys", ys.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn compare_modes() {
    let text = ok(&["compare", "--n", "500", "--pairs", "200", "--ysamples", "2000"]);
    assert!(text.starts_with("l,empirical,empirical_ci,predicted,predicted_ci,diff"));
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    std::fs::write(&h, "distance,count\n5,10\n6,20\n7,5\n").unwrap();
    let out = dir.path().join("cmp.csv");
    let v: serde_json::Value =
        serde_json::from_str(&ok(&["compare", "--n", "300", "--pairs", "100", "--external", h.to_str().unwrap(), "--out", out.to_str().unwrap()]))
            .unwrap();
    assert!(v["tv"].as_f64().unwrap() <= 1.0);
    assert!(String::from_utf8(read(&out)).unwrap().starts_with("distance,simulated,external"));
}

#[test]
fn couple_summary() {
    let v: serde_json::Value = serde_json::from_str(&ok(&["couple", "--n", "5000", "--replicas", "30"])).unwrap();
    assert_eq!(v["replicas"], 30);
    assert!(v.get("reports").is_none());
    assert!(v["b"]["trials"].as_u64().unwrap() <= 30);
}
