use std::io::Write;
use std::process::{Command, Output, Stdio};

fn binres(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_binres"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const PAIR: &str = "left 1 1 1\nright 2 3\nextra 1\nboundary preset paper-pair\n";
const NON_NORMAL: &str = "left 5 1\nright 3\nboundary preset zero\n";

#[test]
fn lc_holds_for_the_pair() {
    let out = binres(&["check", "--criterion", "lc"], PAIR);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("min ledger -1; all records -1"));
}

#[test]
fn canonical_fails_with_a_located_violation() {
    let out = binres(&["check", "--criterion", "canonical"], NON_NORMAL);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("value -2"), "{}", stdout(&out));
}

#[test]
fn canonical_on_a_nonzero_boundary_is_an_input_error() {
    let out = binres(&["check", "--criterion", "canonical"], PAIR);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_reports_its_position() {
    let out = binres(&["resolve"], "left 1 0\nright 2\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1, column 8"), "{}", stderr(&out));
}

#[test]
fn unknown_flags_are_input_errors() {
    let out = binres(&["resolve", "--strategy", "random"], PAIR);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn depth_limit_is_an_input_error() {
    let out = binres(&["resolve", "--max-depth", "1"], "left 1 1\nright 2\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("chart=x1"), "{}", stderr(&out));
}

#[test]
fn oracle_agrees_on_the_control() {
    let out = binres(&["oracle", "--format", "record"], NON_NORMAL);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["oracle"]["all_agree"], true);
}

#[test]
fn dot_output_labels_nodes_and_charts() {
    let out = binres(&["resolve", "--format", "dot"], "left 1 1\nright 2\n");
    let text = stdout(&out);
    assert!(text.starts_with("digraph resolution {"));
    assert!(text.contains("label=\"(2,2)\""));
    assert!(text.contains("label=\"chart=x1\""));
}

#[test]
fn report_goes_to_the_out_file() {
    let dir = std::env::temp_dir().join(format!("binres-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let input = dir.join("pair.txt");
    let report = dir.join("report.json");
    std::fs::write(&input, PAIR).unwrap();
    let out = binres(
        &["resolve", "--format", "record", "--out", report.to_str().unwrap(), input.to_str().unwrap()],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["verdict"]["lc"], true);
    std::fs::remove_dir_all(&dir).unwrap();
}
