use std::io::Write;
use std::process::Command;

use chipfire::cli::{parse_graph_text, serialize_graph};

const BIN: &str = env!("CARGO_BIN_EXE_chipfire");

const GRAPH: &str = "\
# four vertices, universal sink q
vertex v1
vertex v2
vertex v3
vertex q
sink q
edge v1 v2 -
edge v2 v3 +
edge v1 q +
edge v2 q +
edge v3 q +
";

fn graph_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    f.write_all(text.as_bytes()).expect("write graph");
    f
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().expect("spawn chipfire");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn group_reports_order_and_factors() {
    let f = graph_file(GRAPH);
    let path = f.path().to_str().unwrap();
    let (code, stdout, _) = run(&["group", path]);
    assert_eq!(code, 0);
    assert!(stdout.contains("order: 8"), "stdout: {stdout}");

    let (code, stdout, _) = run(&["--format", "json", "group", path]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["order"], serde_json::json!(8));
    assert_eq!(doc["invariant_factors"], serde_json::json!([8]));
}

#[test]
fn stabilize_matches_hand_computation() {
    let f = graph_file(GRAPH);
    let (code, stdout, _) = run(&[
        "--format",
        "json",
        "stabilize",
        f.path().to_str().unwrap(),
        "--config",
        "6,6,2",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["stable"], serde_json::json!([3, 3, 1]));
}

#[test]
fn family_verify_matches_prediction() {
    let (code, stdout, _) = run(&[
        "--format",
        "json",
        "family",
        "--kind",
        "fan",
        "--n",
        "3",
        "--variant",
        "all_negative",
        "--verify",
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["predicted"], serde_json::json!([8]));
    assert_eq!(doc["matches"], serde_json::json!(true));
}

#[test]
fn json_output_is_deterministic() {
    let f = graph_file(GRAPH);
    let path = f.path().to_str().unwrap();
    let args = ["--format", "json", "superstables", path];
    let (c1, s1, _) = run(&args);
    let (c2, s2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(s1, s2, "identical runs must print identical bytes");
    assert!(s1.ends_with('\n'));
}

#[test]
fn graph_round_trips_through_serializer() {
    let g = parse_graph_text(GRAPH).unwrap();
    let text = serialize_graph(&g);
    let g2 = parse_graph_text(&text).unwrap();
    assert_eq!(g.vertex_names(), g2.vertex_names());
    assert_eq!(g.sink(), g2.sink());
    assert_eq!(g.edges(), g2.edges());
    assert_eq!(text, serialize_graph(&g2));
}

#[test]
fn domain_error_exits_one_with_coded_message() {
    let f = graph_file(GRAPH);
    let (code, stdout, stderr) = run(&[
        "check-critical",
        f.path().to_str().unwrap(),
        "--config",
        "1,2",
    ]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    assert!(stderr.contains("error[dimension]"), "stderr: {stderr}");

    let (code, _, stderr) = run(&[
        "--format",
        "json",
        "switch",
        f.path().to_str().unwrap(),
        "--vertex",
        "nope",
    ]);
    assert_eq!(code, 1);
    let doc: serde_json::Value = serde_json::from_str(&stderr).unwrap();
    assert_eq!(doc["error"]["code"], serde_json::json!("unknown_vertex"));
}

#[test]
fn usage_error_exits_two() {
    let (code, _, stderr) = run(&["no-such-command"]);
    assert_eq!(code, 2);
    assert!(!stderr.is_empty());
}

#[test]
fn parse_errors_carry_line_numbers() {
    let f = graph_file("vertex a\nvertex b\nsink a\nsink b\nedge a b +\n");
    let (code, _, stderr) = run(&["balanced", f.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("line 4"), "stderr: {stderr}");
}
