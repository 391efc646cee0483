//! Command surface shared by the `binres` binary and the tests.

pub mod input;
pub mod report;

use std::fmt;
use std::str::FromStr;

use crate::discrepancy::{classify, Criterion};
use crate::oracle::{exhaustive_verdict, oracle_value, ExhaustiveOptions};
use crate::resolver::{resolve, ResolveError, ResolveOptions, Strategy, DEFAULT_MAX_DEPTH};

pub use input::{parse_input, InputDocument, ParseError};
pub use report::{ExhaustiveSummary, OracleCheck, RunView};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CRITERION_FAILS: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Default cap on tree size for the command line.
pub const DEFAULT_MAX_NODES: usize = 500_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Resolve,
    Check { criterion: Criterion },
    Oracle { exhaustive: bool },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Resolve => "resolve",
            Command::Check { .. } => "check",
            Command::Oracle { .. } => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Dot,
    Record,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "dot" => Ok(Format::Dot),
            "record" => Ok(Format::Record),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Dot => "dot",
            Format::Record => "record",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunFlags {
    pub strategy: Strategy,
    pub max_depth: usize,
    pub format: Format,
    pub parallel: bool,
    pub max_nodes: Option<usize>,
    pub exhaustive: ExhaustiveOptions,
}

impl Default for RunFlags {
    fn default() -> Self {
        Self {
            strategy: Strategy::GreedyLo,
            max_depth: DEFAULT_MAX_DEPTH,
            format: Format::Text,
            parallel: true,
            max_nodes: Some(DEFAULT_MAX_NODES),
            exhaustive: ExhaustiveOptions::default(),
        }
    }
}

/// Report for standard output, an optional diagnostic, and the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub report: String,
    pub error: Option<String>,
    pub exit_code: i32,
}

impl Outcome {
    fn failure(exit_code: i32, error: impl Into<String>) -> Self {
        Self { report: String::new(), error: Some(error.into()), exit_code }
    }
}

pub fn run(command: Command, document: &InputDocument, flags: &RunFlags) -> Outcome {
    let state = match document.to_state() {
        Ok(s) => s,
        Err(e) => return Outcome::failure(EXIT_INPUT_ERROR, format!("invalid input: {e}")),
    };
    let options = ResolveOptions {
        strategy: flags.strategy,
        max_depth: flags.max_depth,
        parallel: flags.parallel,
        max_nodes: flags.max_nodes,
    };
    let tree = match resolve(state.clone(), &options) {
        Ok(t) => t,
        Err(
            e @ (ResolveError::DepthExceeded { .. }
            | ResolveError::InvalidMaxDepth
            | ResolveError::NodeBudget { .. }),
        ) => return Outcome::failure(EXIT_INPUT_ERROR, format!("resolution failed: {e}")),
        Err(e) => return Outcome::failure(EXIT_INTERNAL, format!("internal invariant violated: {e}")),
    };
    let verdict = match classify(&tree) {
        Ok(v) => v,
        Err(e) => return Outcome::failure(EXIT_INTERNAL, format!("internal invariant violated: {e}")),
    };

    let mut exit_code = EXIT_OK;
    let mut error = None;
    let mut check = None;
    let mut oracle_checks = None;
    let mut exhaustive = None;

    match command {
        Command::Resolve => {}
        Command::Check { criterion } => {
            let holds = verdict.holds(criterion);
            check = Some((criterion, holds));
            match holds {
                Some(true) => {}
                Some(false) => exit_code = EXIT_CRITERION_FAILS,
                None => {
                    exit_code = EXIT_INPUT_ERROR;
                    error = Some(format!("criterion {criterion} is only decided for a zero boundary"));
                }
            }
        }
        Command::Oracle { exhaustive: run_exhaustive } => {
            let checks: Vec<OracleCheck> = tree
                .nodes()
                .iter()
                .filter_map(|n| n.record.as_ref().map(|r| (n.id, r)))
                .map(|(id, r)| OracleCheck {
                    node: id,
                    divisor: r.divisor.name.clone(),
                    ledger: r.ledger_value.clone(),
                    oracle: oracle_value(&tree, id).map_err(|e| e.to_string()),
                })
                .collect();
            if !checks.iter().all(OracleCheck::agrees) {
                exit_code = EXIT_INTERNAL;
                error = Some("oracle disagrees with the ledger".to_string());
            }
            oracle_checks = Some(checks);
            if run_exhaustive {
                match exhaustive_verdict(&state, &flags.exhaustive) {
                    Ok(runs) => {
                        let summary = ExhaustiveSummary {
                            traces: runs.iter().map(|(t, v)| (t.render(), v.is_lc)).collect(),
                            tree_lc: verdict.is_lc,
                        };
                        if !summary.consistent() && exit_code == EXIT_OK {
                            exit_code = EXIT_INTERNAL;
                            error = Some("lc verdict depends on the center choices".to_string());
                        }
                        exhaustive = Some(summary);
                    }
                    Err(e) => {
                        return Outcome::failure(EXIT_INPUT_ERROR, format!("exhaustive search failed: {e}"))
                    }
                }
            }
        }
    }

    let view = RunView {
        command: command.name(),
        document,
        state: &state,
        tree: &tree,
        verdict: &verdict,
        max_depth: flags.max_depth,
        check,
        oracle: oracle_checks.as_deref(),
        exhaustive: exhaustive.as_ref(),
        exit_code,
    };
    let report = match flags.format {
        Format::Text => report::render_text(&view),
        Format::Dot => report::render_dot(&tree),
        Format::Record => report::render_record(&view),
    };
    Outcome { report, error, exit_code }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> InputDocument {
        parse_input(text.as_bytes()).unwrap()
    }

    #[test]
    fn lc_check_on_paper_pair() {
        let d = doc("left 1 1 1\nright 2 3\nextra 1\nboundary preset paper-pair");
        let out = run(Command::Check { criterion: Criterion::Lc }, &d, &RunFlags::default());
        assert_eq!(out.exit_code, EXIT_OK);
        assert!(out.report.contains("min ledger -1; all records -1"), "{}", out.report);
    }

    #[test]
    fn canonical_check_fails_with_path() {
        let d = doc("left 5 1\nright 3\nboundary preset zero");
        let out = run(Command::Check { criterion: Criterion::Canonical }, &d, &RunFlags::default());
        assert_eq!(out.exit_code, EXIT_CRITERION_FAILS);
        assert!(out.report.contains("violation [canonical]: E1 at node 0 (root) value -2"), "{}", out.report);
    }

    #[test]
    fn canonical_needs_zero_boundary() {
        let d = doc("left 1 1\nright 2\nboundary preset paper-pair");
        let out = run(Command::Check { criterion: Criterion::Canonical }, &d, &RunFlags::default());
        assert_eq!(out.exit_code, EXIT_INPUT_ERROR);
    }

    #[test]
    fn dot_root_label() {
        let d = doc("left 1 1\nright 2\nboundary preset zero");
        let flags = RunFlags { format: Format::Dot, ..RunFlags::default() };
        let out = run(Command::Resolve, &d, &flags);
        assert_eq!(out.exit_code, EXIT_OK);
        assert!(out.report.starts_with("digraph resolution {"));
        assert!(out.report.contains("n0 [label=\"(2,2)\""), "{}", out.report);
        assert!(out.report.contains("n0 -> n1 [label=\"chart=x1\"]"));
    }

    #[test]
    fn depth_limit_is_an_input_error() {
        let d = doc("left 1 1\nright 2");
        let flags = RunFlags { max_depth: 1, ..RunFlags::default() };
        let out = run(Command::Resolve, &d, &flags);
        assert_eq!(out.exit_code, EXIT_INPUT_ERROR);
        assert!(out.error.unwrap().contains("chart=x1"));
    }

    #[test]
    fn node_budget_is_an_input_error() {
        let d = doc("left 1 1\nright 2");
        let flags = RunFlags { max_nodes: Some(3), ..RunFlags::default() };
        let out = run(Command::Resolve, &d, &flags);
        assert_eq!(out.exit_code, EXIT_INPUT_ERROR);
        assert!(out.error.unwrap().contains("node budget of 3"));
    }

    #[test]
    fn oracle_command_agrees() {
        let d = doc("left 2 2\nright 2\nboundary preset zero");
        let flags = RunFlags { format: Format::Record, ..RunFlags::default() };
        let out = run(Command::Oracle { exhaustive: true }, &d, &flags);
        assert_eq!(out.exit_code, EXIT_OK, "{:?}", out.error);
        let json: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        assert_eq!(json["oracle"]["all_agree"], true);
        assert_eq!(json["oracle"]["exhaustive"]["consistent"], true);
    }

    #[test]
    fn record_is_self_describing() {
        let d = doc("left 5 1\nright 3");
        let flags = RunFlags { format: Format::Record, ..RunFlags::default() };
        let out = run(Command::Resolve, &d, &flags);
        let json: serde_json::Value = serde_json::from_str(&out.report).unwrap();
        assert_eq!(json["format"], report::RECORD_FORMAT);
        assert_eq!(json["records"][0]["value"], "-2/1");
        assert_eq!(json["tree"]["nodes"][0]["measure"], serde_json::json!([3, 6]));
        assert_eq!(json["verdict"]["lc"], false);
    }
}
