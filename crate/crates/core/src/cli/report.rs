//! Text, DOT and record renderings of a run.

use std::fmt::Write as _;

use serde::Serialize;

use crate::binomial::{BoundaryPreset, PairState};
use crate::discrepancy::{Criterion, Subject, Verdict, Violation};
use crate::rational::{render_compact, render_fraction, Rational};
use crate::resolver::{render_path, ResolutionTree};

use super::input::InputDocument;

pub const RECORD_FORMAT: &str = "binres-record/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCheck {
    pub node: usize,
    pub divisor: String,
    pub ledger: Rational,
    pub oracle: Result<Rational, String>,
}

impl OracleCheck {
    pub fn agrees(&self) -> bool {
        matches!(&self.oracle, Ok(v) if *v == self.ledger)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveSummary {
    pub traces: Vec<(String, bool)>,
    pub tree_lc: bool,
}

impl ExhaustiveSummary {
    pub fn consistent(&self) -> bool {
        self.traces.iter().all(|(_, lc)| *lc == self.tree_lc)
    }
}

/// Everything a report may show.
pub struct RunView<'a> {
    pub command: &'a str,
    pub document: &'a InputDocument,
    pub state: &'a PairState,
    pub tree: &'a ResolutionTree,
    pub verdict: &'a Verdict,
    pub max_depth: usize,
    pub check: Option<(Criterion, Option<bool>)>,
    pub oracle: Option<&'a [OracleCheck]>,
    pub exhaustive: Option<&'a ExhaustiveSummary>,
    pub exit_code: i32,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn opt_yes_no(b: Option<bool>) -> &'static str {
    b.map_or("n/a", yes_no)
}

fn subject_text(subject: &Subject) -> String {
    match subject {
        Subject::Record { node, divisor, path } => {
            format!("{divisor} at node {node} ({})", render_path(path))
        }
        Subject::Boundary { coordinate } => format!("boundary coefficient of {coordinate}"),
    }
}

fn violation_line(v: &Violation) -> String {
    format!("violation [{}]: {} value {}", v.criterion, subject_text(&v.subject), render_compact(&v.value))
}

fn ledger_summary(tree: &ResolutionTree, verdict: &Verdict) -> String {
    let Some(min) = &verdict.min_ledger else {
        return "no blow-ups; no records".to_string();
    };
    let mut values = tree.nodes().iter().filter_map(|n| n.record.as_ref()).map(|r| &r.ledger_value);
    let first = values.next().expect("min implies a record");
    if values.all(|v| v == first) {
        format!("min ledger {}; all records {}", render_compact(min), render_compact(first))
    } else {
        format!("min ledger {}; {} records", render_compact(min), verdict.record_count)
    }
}

fn boundary_text(doc: &InputDocument) -> String {
    let mut parts = vec![format!("preset {}", doc.boundary.preset.as_str())];
    parts.extend(doc.boundary.coords.iter().map(|(n, v)| format!("{n}={}", render_compact(v))));
    if let Some(t) = &doc.boundary.t {
        parts.push(format!("t={}", render_compact(t)));
    }
    parts.join(", ")
}

pub fn render_text(view: &RunView<'_>) -> String {
    let mut out = String::new();
    let tree = view.tree;
    let verdict = view.verdict;
    let _ = writeln!(
        out,
        "input: {} in A^{} (boundary: {})",
        view.state,
        view.state.dimension(),
        boundary_text(view.document)
    );
    let _ = writeln!(
        out,
        "strategy: {}; nodes: {}; depth: {}; records: {}{}",
        tree.strategy(),
        tree.len(),
        tree.depth(),
        verdict.record_count,
        if verdict.degenerate { "; degenerate input (1 = 1)" } else { "" }
    );

    if view.command == "resolve" {
        for node in tree.nodes() {
            let chart = node
                .parent
                .and_then(|p| tree.nodes()[p].edges.iter().find(|e| e.child == node.id))
                .map(|e| format!(" via chart={}", e.chart_name))
                .unwrap_or_default();
            let _ = writeln!(out, "node {} {}{}: {}", node.id, node.measure, chart, node.state);
            if let (Some(center), Some(record)) = (&node.center, &node.record) {
                let _ = writeln!(
                    out,
                    "  blow up {} -> {} a={} ({})",
                    center.render(&node.state),
                    record.divisor.name,
                    render_compact(&record.ledger_value),
                    if record.is_exceptional { "exceptional" } else { "non-exceptional" }
                );
                let children: Vec<String> = node
                    .edges
                    .iter()
                    .map(|e| format!("chart={} -> node {}", e.chart_name, e.child))
                    .collect();
                let _ = writeln!(out, "  {}", children.join(", "));
            }
        }
    }

    let _ = writeln!(out, "{}", ledger_summary(tree, verdict));
    let _ = writeln!(
        out,
        "verdict: lc {}, klt {}, canonical {}, terminal {}; min exceptional {}",
        yes_no(verdict.is_lc),
        yes_no(verdict.is_klt),
        opt_yes_no(verdict.is_canonical),
        opt_yes_no(verdict.is_terminal_sing),
        verdict.min_exceptional.as_ref().map_or("n/a".to_string(), render_compact)
    );

    if let Some((criterion, holds)) = view.check {
        let status = match holds {
            Some(true) => "holds",
            Some(false) => "fails",
            None => "undecided (requires a zero boundary)",
        };
        let _ = writeln!(out, "criterion {criterion}: {status}");
        for v in verdict.violations_for(criterion) {
            let _ = writeln!(out, "{}", violation_line(v));
        }
    }

    if let Some(checks) = view.oracle {
        for c in checks {
            let oracle = match &c.oracle {
                Ok(v) => render_compact(v),
                Err(e) => format!("error: {e}"),
            };
            let _ = writeln!(
                out,
                "oracle node {} {}: ledger {} oracle {} {}",
                c.node,
                c.divisor,
                render_compact(&c.ledger),
                oracle,
                if c.agrees() { "ok" } else { "MISMATCH" }
            );
        }
        let agree = checks.iter().filter(|c| c.agrees()).count();
        let _ = writeln!(out, "oracle: {agree}/{} nodes agree", checks.len());
    }
    if let Some(ex) = view.exhaustive {
        let _ = writeln!(
            out,
            "exhaustive: {} traces; lc verdict {} across all traces",
            ex.traces.len(),
            if ex.consistent() { "identical" } else { "DIFFERS" }
        );
    }
    out
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn render_dot(tree: &ResolutionTree) -> String {
    let mut out = String::from("digraph resolution {\n  node [shape=box];\n");
    for node in tree.nodes() {
        let mut attrs =
            format!("label=\"{}\", tooltip=\"{}\"", node.measure, escape(&node.state.to_string()));
        if let Some(record) = &node.record {
            let _ = write!(
                attrs,
                ", xlabel=\"{} a={}{}\"",
                record.divisor.name,
                render_compact(&record.ledger_value),
                if record.is_exceptional { "" } else { " (non-exc)" }
            );
        } else {
            attrs.push_str(", style=rounded");
        }
        let _ = writeln!(out, "  n{} [{}];", node.id, attrs);
    }
    for node in tree.nodes() {
        for edge in &node.edges {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"chart={}\"];",
                node.id,
                edge.child,
                escape(&edge.chart_name)
            );
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct RecordDoc<'a> {
    format: &'static str,
    command: &'a str,
    strategy: &'static str,
    max_depth: usize,
    input: InputView,
    tree: TreeView,
    records: Vec<RecordView>,
    verdict: VerdictView,
    check: Option<CheckView>,
    oracle: Option<OracleView>,
    exit_code: i32,
}

#[derive(Serialize)]
struct InputView {
    left: Vec<u32>,
    right: Vec<u32>,
    extra: usize,
    equation: String,
    coordinates: Vec<String>,
    preset: &'static str,
    boundary: Vec<String>,
    t_coeff: String,
}

#[derive(Serialize)]
struct TreeView {
    root: usize,
    node_count: usize,
    depth: usize,
    degenerate: bool,
    nodes: Vec<NodeView>,
}

#[derive(Serialize)]
struct CenterView {
    s: Vec<String>,
    t: Vec<String>,
}

#[derive(Serialize)]
struct EdgeView {
    chart: String,
    child: usize,
}

#[derive(Serialize)]
struct NodeView {
    id: usize,
    parent: Option<usize>,
    depth: usize,
    path: Vec<String>,
    measure: [u64; 2],
    equation: String,
    terminal: bool,
    center: Option<CenterView>,
    divisor: Option<String>,
    children: Vec<EdgeView>,
}

#[derive(Serialize)]
struct RecordView {
    node: usize,
    divisor: String,
    value: String,
    exceptional: bool,
    k: u64,
    l: u64,
    sigma_s: u64,
    sigma_t: u64,
    mu: u64,
    path: Vec<String>,
}

#[derive(Serialize)]
struct ViolationView {
    criterion: &'static str,
    subject: String,
    value: String,
}

#[derive(Serialize)]
struct VerdictView {
    min_ledger: Option<String>,
    min_exceptional: Option<String>,
    lc: bool,
    klt: bool,
    canonical: Option<bool>,
    terminal: Option<bool>,
    degenerate: bool,
    record_count: usize,
    unit_side_boundary_leaves: usize,
    violations: Vec<ViolationView>,
}

#[derive(Serialize)]
struct CheckView {
    criterion: &'static str,
    holds: Option<bool>,
}

#[derive(Serialize)]
struct OracleNodeView {
    node: usize,
    divisor: String,
    ledger: String,
    oracle: Option<String>,
    error: Option<String>,
    agrees: bool,
}

#[derive(Serialize)]
struct TraceView {
    trace: String,
    lc: bool,
}

#[derive(Serialize)]
struct ExhaustiveView {
    traces: Vec<TraceView>,
    tree_lc: bool,
    consistent: bool,
}

#[derive(Serialize)]
struct OracleView {
    checks: Vec<OracleNodeView>,
    all_agree: bool,
    exhaustive: Option<ExhaustiveView>,
}

pub fn render_record(view: &RunView<'_>) -> String {
    let tree = view.tree;
    let state = view.state;
    let input = InputView {
        left: view.document.left.clone(),
        right: view.document.right.clone(),
        extra: view.document.extra,
        equation: state.to_string(),
        coordinates: state.coordinates().iter().map(|c| c.name.clone()).collect(),
        preset: match view.document.boundary.preset {
            BoundaryPreset::Zero => "zero",
            BoundaryPreset::PaperPair => "paper-pair",
        },
        boundary: state.boundary().coeffs().iter().map(render_fraction).collect(),
        t_coeff: render_fraction(state.boundary().t_coeff()),
    };
    let nodes = tree
        .nodes()
        .iter()
        .map(|n| NodeView {
            id: n.id,
            parent: n.parent,
            depth: n.depth,
            path: tree.path(n.id),
            measure: [n.measure.min_sum, n.measure.max_sum],
            equation: n.state.to_string(),
            terminal: n.state.is_terminal(),
            center: n.center.as_ref().map(|c| CenterView {
                s: c.s.iter().map(|&p| n.state.coordinate(p).name.clone()).collect(),
                t: c.t.iter().map(|&p| n.state.coordinate(p).name.clone()).collect(),
            }),
            divisor: n.record.as_ref().map(|r| r.divisor.name.clone()),
            children: n
                .edges
                .iter()
                .map(|e| EdgeView { chart: e.chart_name.clone(), child: e.child })
                .collect(),
        })
        .collect();
    let records = tree
        .nodes()
        .iter()
        .filter_map(|n| n.record.as_ref().map(|r| (n.id, r)))
        .map(|(id, r)| RecordView {
            node: id,
            divisor: r.divisor.name.clone(),
            value: render_fraction(&r.ledger_value),
            exceptional: r.is_exceptional,
            k: r.center.k,
            l: r.center.l,
            sigma_s: r.center.sigma_s,
            sigma_t: r.center.sigma_t,
            mu: r.center.mu,
            path: tree.path(id),
        })
        .collect();
    let v = view.verdict;
    let verdict = VerdictView {
        min_ledger: v.min_ledger.as_ref().map(render_fraction),
        min_exceptional: v.min_exceptional.as_ref().map(render_fraction),
        lc: v.is_lc,
        klt: v.is_klt,
        canonical: v.is_canonical,
        terminal: v.is_terminal_sing,
        degenerate: v.degenerate,
        record_count: v.record_count,
        unit_side_boundary_leaves: v.unit_side_boundary_leaves,
        violations: v
            .violations
            .iter()
            .map(|x| ViolationView {
                criterion: x.criterion.as_str(),
                subject: subject_text(&x.subject),
                value: render_fraction(&x.value),
            })
            .collect(),
    };
    let oracle = view.oracle.map(|checks| OracleView {
        checks: checks
            .iter()
            .map(|c| OracleNodeView {
                node: c.node,
                divisor: c.divisor.clone(),
                ledger: render_fraction(&c.ledger),
                oracle: c.oracle.as_ref().ok().map(render_fraction),
                error: c.oracle.as_ref().err().cloned(),
                agrees: c.agrees(),
            })
            .collect(),
        all_agree: checks.iter().all(OracleCheck::agrees),
        exhaustive: view.exhaustive.map(|ex| ExhaustiveView {
            traces: ex.traces.iter().map(|(t, lc)| TraceView { trace: t.clone(), lc: *lc }).collect(),
            tree_lc: ex.tree_lc,
            consistent: ex.consistent(),
        }),
    });
    let doc = RecordDoc {
        format: RECORD_FORMAT,
        command: view.command,
        strategy: tree.strategy().as_str(),
        max_depth: view.max_depth,
        input,
        tree: TreeView {
            root: 0,
            node_count: tree.len(),
            depth: tree.depth(),
            degenerate: tree.is_degenerate(),
            nodes,
        },
        records,
        verdict,
        check: view.check.map(|(criterion, holds)| CheckView { criterion: criterion.as_str(), holds }),
        oracle,
        exit_code: view.exit_code,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("record view serializes");
    text.push('\n');
    text
}
