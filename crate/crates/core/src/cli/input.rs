//! Line-oriented input documents.
//!
//! ```text
//! # A1 surface singularity
//! left 1 1
//! right 2
//! extra 0
//! boundary preset zero
//! boundary x1 1/2
//! boundary t -1
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::binomial::{make_state, BoundaryPreset, BoundarySpec, PairState, StateError};
use crate::rational::{parse_rational, render_literal};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDocument {
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub extra: usize,
    pub boundary: BoundarySpec,
}

impl InputDocument {
    pub fn to_state(&self) -> Result<PairState, StateError> {
        make_state(&self.left, &self.right, self.extra, &self.boundary)
    }
}

impl fmt::Display for InputDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(|e| format!(" {e}")).collect::<String>();
        writeln!(f, "left{}", join(&self.left))?;
        writeln!(f, "right{}", join(&self.right))?;
        writeln!(f, "extra {}", self.extra)?;
        writeln!(f, "boundary preset {}", self.boundary.preset.as_str())?;
        for (name, value) in &self.boundary.coords {
            writeln!(f, "boundary {name} {}", render_literal(value))?;
        }
        if let Some(t) = &self.boundary.t {
            writeln!(f, "boundary t {}", render_literal(t))?;
        }
        Ok(())
    }
}

/// A parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line, column, message: message.into() }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &content[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &content[s..], column: s + 1 });
    }
    out
}

fn parse_exponents(line: usize, args: &[Token<'_>]) -> Result<Vec<u32>, ParseError> {
    args.iter()
        .map(|tok| {
            if !tok.text.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParseError::at(
                    line,
                    tok.column,
                    format!("expected a positive integer exponent, found `{}`", tok.text),
                ));
            }
            let value: u32 = tok.text.parse().map_err(|_| {
                ParseError::at(line, tok.column, format!("exponent `{}` is too large", tok.text))
            })?;
            if value == 0 {
                return Err(ParseError::at(line, tok.column, "exponent must be >= 1"));
            }
            Ok(value)
        })
        .collect()
}

/// Parses an input document. Every byte sequence yields either a document or
/// a positioned error.
pub fn parse_input(bytes: &[u8]) -> Result<InputDocument, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let prefix = &bytes[..e.valid_up_to()];
        let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = prefix.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        ParseError::at(line, prefix.len() - line_start + 1, "input is not valid UTF-8")
    })?;

    let mut left: Option<Vec<u32>> = None;
    let mut right: Option<Vec<u32>> = None;
    let mut extra: Option<usize> = None;
    let mut preset: Option<BoundaryPreset> = None;
    let mut spec = BoundarySpec::default();
    let mut coord_lines: Vec<(String, usize, usize)> = Vec::new();
    let mut last_line = 1;

    for (index, raw) in text.split('\n').enumerate() {
        let line = index + 1;
        last_line = line;
        let toks = tokens(raw);
        let Some((head, args)) = toks.split_first() else { continue };
        match head.text {
            "left" | "right" => {
                let slot = if head.text == "left" { &mut left } else { &mut right };
                if slot.is_some() {
                    return Err(ParseError::at(line, head.column, format!("duplicate `{}` line", head.text)));
                }
                if head.text == "left" && args.is_empty() {
                    return Err(ParseError::at(line, head.column, "`left` needs at least one exponent"));
                }
                *slot = Some(parse_exponents(line, args)?);
            }
            "extra" => {
                if extra.is_some() {
                    return Err(ParseError::at(line, head.column, "duplicate `extra` line"));
                }
                let [arg] = args else {
                    return Err(ParseError::at(line, head.column, "`extra` takes exactly one count"));
                };
                if !arg.text.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ParseError::at(
                        line,
                        arg.column,
                        format!("expected a nonnegative integer, found `{}`", arg.text),
                    ));
                }
                let count = arg.text.parse().map_err(|_| {
                    ParseError::at(line, arg.column, format!("count `{}` is too large", arg.text))
                })?;
                extra = Some(count);
            }
            "boundary" => {
                let [target, value] = args else {
                    return Err(ParseError::at(
                        line,
                        head.column,
                        "expected `boundary preset <name>`, `boundary t <rational>` or `boundary <coordinate> <rational>`",
                    ));
                };
                if target.text == "preset" {
                    if preset.is_some() {
                        return Err(ParseError::at(line, head.column, "duplicate `boundary preset` line"));
                    }
                    preset = Some(match value.text {
                        "zero" => BoundaryPreset::Zero,
                        "paper-pair" => BoundaryPreset::PaperPair,
                        other => {
                            return Err(ParseError::at(
                                line,
                                value.column,
                                format!("unknown preset `{other}` (expected zero or paper-pair)"),
                            ))
                        }
                    });
                    continue;
                }
                let rational = parse_rational(value.text)
                    .map_err(|e| ParseError::at(line, value.column, e.to_string()))?;
                if target.text == "t" {
                    if spec.t.is_some() {
                        return Err(ParseError::at(line, target.column, "duplicate `boundary t` line"));
                    }
                    spec.t = Some(rational);
                } else {
                    if spec.coords.contains_key(target.text) {
                        return Err(ParseError::at(
                            line,
                            target.column,
                            format!("duplicate boundary for `{}`", target.text),
                        ));
                    }
                    coord_lines.push((target.text.to_string(), line, target.column));
                    spec.coords.insert(target.text.to_string(), rational);
                }
            }
            other => {
                return Err(ParseError::at(line, head.column, format!("unknown directive `{other}`")));
            }
        }
    }

    let left = left.ok_or_else(|| ParseError::at(last_line, 1, "missing `left` line"))?;
    let right = right.unwrap_or_default();
    let extra = extra.unwrap_or(0);
    spec.preset = preset.unwrap_or(BoundaryPreset::Zero);

    let known: BTreeSet<String> = (1..=left.len())
        .map(|i| format!("x{i}"))
        .chain((1..=right.len()).map(|j| format!("y{j}")))
        .chain((1..=extra).map(|k| format!("z{k}")))
        .collect();
    for (name, line, column) in coord_lines {
        if !known.contains(&name) {
            return Err(ParseError::at(line, column, format!("unknown coordinate `{name}`")));
        }
    }
    Ok(InputDocument { left, right, extra, boundary: spec })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    #[test]
    fn a1_document() {
        let doc = parse_input(b"left 1 1\nright 2\nboundary preset zero").unwrap();
        assert_eq!(doc.left, [1, 1]);
        assert_eq!(doc.right, [2]);
        assert_eq!(doc.extra, 0);
        assert_eq!(doc.boundary, BoundarySpec::preset(BoundaryPreset::Zero));
    }

    #[test]
    fn paper_pair_document() {
        let doc = parse_input(b"left 1 1 1\nright 2 3\nextra 1\nboundary preset paper-pair").unwrap();
        let state = doc.to_state().unwrap();
        assert!(state.boundary().is_paper_pair());
        assert_eq!(state.dimension(), 6);
    }

    #[test]
    fn comments_blank_lines_and_overrides() {
        let text = "# header\n\n  left 2 1   # trailing\r\nright\nboundary preset paper-pair\nboundary x1 -1/2\nboundary t 0\n";
        let doc = parse_input(text.as_bytes()).unwrap();
        assert!(doc.right.is_empty());
        let state = doc.to_state().unwrap();
        assert_eq!(*state.boundary().coeff(0), crate::rational::parse_rational("-1/2").unwrap());
        assert_eq!(*state.boundary().coeff(1), int(1));
        assert_eq!(*state.boundary().t_coeff(), int(0));
    }

    #[test]
    fn zero_exponent_is_positioned() {
        let err = parse_input(b"left 0 1\nright 2").unwrap_err();
        assert_eq!((err.line, err.column), (1, 6));
        assert!(err.message.contains(">= 1"));
    }

    #[test]
    fn error_cases() {
        let cases: &[(&[u8], usize, &str)] = &[
            (b"left 1\nleft 2", 2, "duplicate `left`"),
            (b"left 1\nright 1\nright 2", 3, "duplicate `right`"),
            (b"left 1\nboundary z1 1", 2, "unknown coordinate `z1`"),
            (b"left 1\nboundary x2 1", 2, "unknown coordinate"),
            (b"right 1", 1, "missing `left`"),
            (b"left\n", 1, "at least one"),
            (b"left 1\nfoo 2", 2, "unknown directive"),
            (b"left 1\nboundary x1 1/0", 2, "denominator"),
            (b"left 1\nboundary x1 0.5", 2, "malformed"),
            (b"left 1\nboundary preset wild", 2, "unknown preset"),
            (b"left 1\nextra -1", 2, "nonnegative"),
            (b"left 1 a", 1, "positive integer"),
            (b"left 1\n\xff", 2, "UTF-8"),
            (b"left 99999999999", 1, "too large"),
        ];
        for (input, line, fragment) in cases {
            let err = parse_input(input).unwrap_err();
            assert_eq!(err.line, *line, "{err}");
            assert!(err.message.contains(fragment), "{err}");
        }
    }

    fn arb_document() -> impl Strategy<Value = InputDocument> {
        (
            prop::collection::vec(1u32..20, 1..5),
            prop::collection::vec(1u32..20, 0..5),
            0usize..3,
            prop::bool::ANY,
            prop::collection::vec((prop::bool::ANY, -9i64..10, 1i64..7), 0..11),
            prop::option::of((-9i64..10, 1i64..7)),
        )
            .prop_map(|(left, right, extra, paper, picks, t)| {
                let names: Vec<String> = (1..=left.len())
                    .map(|i| format!("x{i}"))
                    .chain((1..=right.len()).map(|j| format!("y{j}")))
                    .chain((1..=extra).map(|k| format!("z{k}")))
                    .collect();
                let mut spec = BoundarySpec::preset(if paper {
                    BoundaryPreset::PaperPair
                } else {
                    BoundaryPreset::Zero
                });
                for (name, (keep, p, q)) in names.iter().zip(picks) {
                    if keep {
                        spec.coords.insert(name.clone(), crate::Rational::new(p.into(), q.into()));
                    }
                }
                spec.t = t.map(|(p, q)| crate::Rational::new(p.into(), q.into()));
                InputDocument { left, right, extra, boundary: spec }
            })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(doc in arb_document()) {
            let printed = doc.to_string();
            prop_assert_eq!(parse_input(printed.as_bytes()).unwrap(), doc);
        }

        #[test]
        fn parse_is_total(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
            match parse_input(&bytes) {
                Ok(doc) => prop_assert!(!doc.left.is_empty()),
                Err(e) => prop_assert!(e.line >= 1 && e.column >= 1),
            }
        }

        #[test]
        fn parse_is_total_on_near_miss_text(
            lines in prop::collection::vec(
                prop::sample::select(vec![
                    "left 1 2", "left 0", "right", "right 3 -1", "extra 2", "extra x",
                    "boundary preset zero", "boundary preset paper-pair", "boundary x1 1/2",
                    "boundary t -3", "boundary y9 1", "boundary", "# c", "", "left 1 1 # c",
                ]),
                0..8,
            )
        ) {
            let text = lines.join("\n");
            match parse_input(text.as_bytes()) {
                Ok(doc) => prop_assert!(doc.to_state().is_ok()),
                Err(e) => prop_assert!(e.line >= 1 && e.line <= lines.len().max(1)),
            }
        }
    }
}
