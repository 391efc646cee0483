//! Verdicts over the divisor records of a resolution tree.
//!
//! Every record value is a discrepancy over the input pair. A record that is
//! not exceptional is the negated coefficient of a strict transform in the
//! crepant pullback, so the log canonical test is a uniform `>= -1` over all
//! records. Canonical and terminal verdicts need the exceptional flag and are
//! only offered for an all-zero input boundary.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use thiserror::Error;

use crate::binomial::{BoundaryLedger, DivisorRecord, NodeId, PairState};
use crate::rational::{int, Rational};
use crate::resolver::ResolutionTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    Lc,
    Klt,
    Canonical,
    Terminal,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Lc => "lc",
            Criterion::Klt => "klt",
            Criterion::Canonical => "canonical",
            Criterion::Terminal => "terminal",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lc" => Ok(Criterion::Lc),
            "klt" => Ok(Criterion::Klt),
            "canonical" => Ok(Criterion::Canonical),
            "terminal" => Ok(Criterion::Terminal),
            other => Err(format!("unknown criterion `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subject {
    /// A divisor record; `node` is the tree node (or trace position) that created it.
    Record { node: NodeId, divisor: String, path: Vec<String> },
    /// An input boundary coefficient on a coordinate divisor.
    Boundary { coordinate: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub criterion: Criterion,
    pub subject: Subject,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    /// `None` when no blow-up happened.
    pub min_ledger: Option<Rational>,
    pub min_exceptional: Option<Rational>,
    pub is_lc: bool,
    pub is_klt: bool,
    pub is_canonical: Option<bool>,
    pub is_terminal_sing: Option<bool>,
    pub violations: Vec<Violation>,
    pub degenerate: bool,
    pub record_count: usize,
    /// Leaves whose unit side carries nonzero boundary (restricts to zero on the leaf).
    pub unit_side_boundary_leaves: usize,
}

impl Verdict {
    /// `None` when the criterion is not decided for this boundary.
    pub fn holds(&self, criterion: Criterion) -> Option<bool> {
        match criterion {
            Criterion::Lc => Some(self.is_lc),
            Criterion::Klt => Some(self.is_klt),
            Criterion::Canonical => self.is_canonical,
            Criterion::Terminal => self.is_terminal_sing,
        }
    }

    pub fn violations_for(&self, criterion: Criterion) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.criterion == criterion)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscrepancyError {
    #[error("node {0} is a non-terminal leaf; the tree is not fully expanded")]
    Unexpanded(NodeId),
    #[error("state is not terminal: {0}")]
    NotTerminal(String),
}

/// A record together with where it came from.
#[derive(Clone, Debug)]
pub struct LocatedRecord<'a> {
    pub node: NodeId,
    pub record: &'a DivisorRecord,
    pub path: Vec<String>,
}

/// One record per expanded node, in birth-node order.
pub fn collect(tree: &ResolutionTree) -> Vec<&DivisorRecord> {
    tree.nodes().iter().filter_map(|n| n.record.as_ref()).collect()
}

/// Builds a verdict from records and the input pair's boundary.
pub fn verdict_from_records<'a>(
    records: impl IntoIterator<Item = LocatedRecord<'a>>,
    input: &PairState,
) -> Verdict {
    let boundary: &BoundaryLedger = input.boundary();
    let minus_one = int(-1);
    let one = int(1);
    let zero = Rational::zero();
    let zero_boundary = boundary.is_zero();

    let mut violations = Vec::new();
    let mut min_ledger: Option<Rational> = None;
    let mut min_exceptional: Option<Rational> = None;
    let mut is_lc = true;
    let mut is_klt = true;
    let mut canonical = true;
    let mut terminal = true;
    let mut record_count = 0;

    for (pos, c) in boundary.coeffs().iter().enumerate() {
        let subject = || Subject::Boundary { coordinate: input.coordinate(pos).name.clone() };
        if *c > one {
            is_lc = false;
            violations.push(Violation { criterion: Criterion::Lc, subject: subject(), value: c.clone() });
        }
        if *c >= one {
            is_klt = false;
            violations.push(Violation { criterion: Criterion::Klt, subject: subject(), value: c.clone() });
        }
    }

    for located in records {
        record_count += 1;
        let value = &located.record.ledger_value;
        if min_ledger.as_ref().is_none_or(|m| value < m) {
            min_ledger = Some(value.clone());
        }
        if located.record.is_exceptional && min_exceptional.as_ref().is_none_or(|m| value < m) {
            min_exceptional = Some(value.clone());
        }
        let mut fail = |criterion| {
            violations.push(Violation {
                criterion,
                subject: Subject::Record {
                    node: located.node,
                    divisor: located.record.divisor.name.clone(),
                    path: located.path.clone(),
                },
                value: value.clone(),
            })
        };
        if *value < minus_one {
            is_lc = false;
            fail(Criterion::Lc);
        }
        if *value <= minus_one {
            is_klt = false;
            fail(Criterion::Klt);
        }
        if zero_boundary {
            if *value < zero {
                canonical = false;
                fail(Criterion::Canonical);
            }
            if *value < zero || (located.record.is_exceptional && *value <= zero) {
                terminal = false;
                fail(Criterion::Terminal);
            }
        }
    }

    Verdict {
        min_ledger,
        min_exceptional,
        is_lc,
        is_klt,
        is_canonical: zero_boundary.then_some(canonical),
        is_terminal_sing: zero_boundary.then_some(terminal),
        violations,
        degenerate: input.is_degenerate(),
        record_count,
        unit_side_boundary_leaves: 0,
    }
}

pub fn classify(tree: &ResolutionTree) -> Result<Verdict, DiscrepancyError> {
    let mut unit_side = 0;
    for leaf in tree.leaves() {
        if !leaf.state.is_terminal() {
            return Err(DiscrepancyError::Unexpanded(leaf.id));
        }
        // t restricts to a unit: one side is the constant 1, so the other
        // side's coordinates are all units on the leaf.
        if !verify_terminal_snc(&leaf.state)?.holds {
            unit_side += 1;
        }
    }
    let located = tree.nodes().iter().filter_map(|n| {
        n.record.as_ref().map(|record| LocatedRecord { node: n.id, record, path: tree.path(n.id) })
    });
    let mut verdict = verdict_from_records(located, &tree.root().state);
    verdict.unit_side_boundary_leaves = unit_side;
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SncReport {
    pub holds: bool,
    /// Unit-side coordinates carrying a nonzero coefficient.
    pub violations: Vec<(String, Rational)>,
}

/// Checks that a terminal chart is in normal form: the boundary lives on
/// coordinate hyperplanes off the unit side of `monomial = 1`.
pub fn verify_terminal_snc(leaf: &PairState) -> Result<SncReport, DiscrepancyError> {
    if !leaf.is_terminal() {
        return Err(DiscrepancyError::NotTerminal(leaf.to_string()));
    }
    let eq = leaf.equation();
    let violations: Vec<(String, Rational)> = eq
        .left_support()
        .chain(eq.right_support())
        .filter(|&p| !leaf.boundary().coeff(p).is_zero())
        .map(|p| (leaf.coordinate(p).name.clone(), leaf.boundary().coeff(p).clone()))
        .collect();
    Ok(SncReport { holds: violations.is_empty(), violations })
}
