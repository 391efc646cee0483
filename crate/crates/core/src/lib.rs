//! Resolution of binomial hypersurface pairs by coordinate blow-ups, with
//! exact discrepancy bookkeeping.
//!
//! The pipeline is [`binomial::make_state`] → [`resolver::resolve`] →
//! [`discrepancy::classify`], with [`oracle`] recomputing every reported
//! discrepancy through an independent route. [`cli`] holds the input grammar
//! and the report formats used by the `binres` binary.

pub mod binomial;
pub mod cli;
pub mod discrepancy;
pub mod oracle;
pub mod rational;
pub mod resolver;

pub use binomial::{
    chart_blowup, make_state, BinomialEquation, BlowUpCenter, BoundaryLedger, BoundaryPreset, BoundarySpec,
    Coordinate, DivisorRecord, Measure, NodeId, PairState, Provenance,
};
pub use discrepancy::{classify, collect, verify_terminal_snc, Criterion, Verdict};
pub use oracle::{compose_path, enumerate_valid_centers, exhaustive_verdict, oracle_value};
pub use rational::Rational;
pub use resolver::{lex_measure_trace, resolve, select_center, ResolutionTree, ResolveOptions, Strategy};
