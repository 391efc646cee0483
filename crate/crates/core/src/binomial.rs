//! Pair states of binomial hypersurfaces and the single blow-up chart step.
//!
//! A [`PairState`] is an affine chart `A^N` with coordinates, a binomial
//! equation `left monomial = right monomial` and a rational boundary
//! `sum_i c_i D(u_i) + d D(t)` where `t` is the common value of both sides.
//! [`chart_blowup`] blows up a coordinate center and returns one chart of the
//! strict transform together with the discrepancy of the new divisor. The
//! boundary on the chart is the crepant pullback, so every later discrepancy
//! is measured against the original pair.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::rational::{int, Rational};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Left,
    Right,
    Extra,
    Exceptional { birth: NodeId },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coordinate {
    pub name: String,
    pub provenance: Provenance,
}

impl Coordinate {
    pub fn new(name: impl Into<String>, provenance: Provenance) -> Self {
        Self { name: name.into(), provenance }
    }

    pub fn exceptional(index: usize, birth: NodeId) -> Self {
        Self::new(format!("E{index}"), Provenance::Exceptional { birth })
    }
}

/// Two exponent vectors indexed by coordinate position, with disjoint support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinomialEquation {
    left: Vec<u32>,
    right: Vec<u32>,
}

impl BinomialEquation {
    pub fn new(left: Vec<u32>, right: Vec<u32>) -> Result<Self, StateError> {
        if left.len() != right.len() {
            return Err(StateError::LengthMismatch { expected: left.len(), found: right.len() });
        }
        if let Some(pos) = (0..left.len()).find(|&i| left[i] > 0 && right[i] > 0) {
            return Err(StateError::SharedSupport(pos));
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &[u32] {
        &self.left
    }

    pub fn right(&self) -> &[u32] {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn left_sum(&self) -> u64 {
        self.left.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn right_sum(&self) -> u64 {
        self.right.iter().map(|&e| u64::from(e)).sum()
    }

    pub fn left_support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.left.len()).filter(|&i| self.left[i] > 0)
    }

    pub fn right_support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.right.len()).filter(|&i| self.right[i] > 0)
    }
}

/// Coefficient per coordinate divisor plus the coefficient of `D(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryLedger {
    coeff: Vec<Rational>,
    t_coeff: Rational,
}

impl BoundaryLedger {
    pub fn zero(len: usize) -> Self {
        Self { coeff: vec![Rational::zero(); len], t_coeff: Rational::zero() }
    }

    /// `D(product of all coordinates) - D(t)`.
    pub fn paper_pair(len: usize) -> Self {
        Self { coeff: vec![int(1); len], t_coeff: int(-1) }
    }

    pub fn new(coeff: Vec<Rational>, t_coeff: Rational) -> Self {
        Self { coeff, t_coeff }
    }

    pub fn coeff(&self, pos: usize) -> &Rational {
        &self.coeff[pos]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeff
    }

    pub fn t_coeff(&self) -> &Rational {
        &self.t_coeff
    }

    pub fn is_zero(&self) -> bool {
        self.t_coeff.is_zero() && self.coeff.iter().all(Zero::is_zero)
    }

    pub fn is_paper_pair(&self) -> bool {
        self.t_coeff == int(-1) && self.coeff.iter().all(|c| *c == int(1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryPreset {
    Zero,
    PaperPair,
}

impl BoundaryPreset {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryPreset::Zero => "zero",
            BoundaryPreset::PaperPair => "paper-pair",
        }
    }
}

/// A preset plus explicit per-coordinate and `t` overrides, keyed by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySpec {
    pub preset: BoundaryPreset,
    pub coords: BTreeMap<String, Rational>,
    pub t: Option<Rational>,
}

impl BoundarySpec {
    pub fn preset(preset: BoundaryPreset) -> Self {
        Self { preset, coords: BTreeMap::new(), t: None }
    }
}

impl Default for BoundarySpec {
    fn default() -> Self {
        Self::preset(BoundaryPreset::Zero)
    }
}

/// The `(m, M)` termination measure, ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Measure {
    pub min_sum: u64,
    pub max_sum: u64,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.min_sum, self.max_sum)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("exponent vectors have different lengths ({expected} vs {found})")]
    LengthMismatch { expected: usize, found: usize },
    #[error("coordinate at position {0} has a positive exponent on both sides")]
    SharedSupport(usize),
    #[error("{side} exponent #{index} must be >= 1")]
    NonPositiveExponent { side: &'static str, index: usize },
    #[error("boundary references unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("boundary has {found} coefficients for {expected} coordinates")]
    BoundaryLength { expected: usize, found: usize },
}

/// Immutable chart state: coordinates, binomial equation and boundary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairState {
    coordinates: Vec<Coordinate>,
    equation: BinomialEquation,
    boundary: BoundaryLedger,
}

impl PairState {
    pub fn new(
        coordinates: Vec<Coordinate>,
        equation: BinomialEquation,
        boundary: BoundaryLedger,
    ) -> Result<Self, StateError> {
        if equation.len() != coordinates.len() {
            return Err(StateError::LengthMismatch { expected: coordinates.len(), found: equation.len() });
        }
        if boundary.coeff.len() != coordinates.len() {
            return Err(StateError::BoundaryLength {
                expected: coordinates.len(),
                found: boundary.coeff.len(),
            });
        }
        let mut seen = HashSet::new();
        for c in &coordinates {
            if !seen.insert(c.name.as_str()) {
                return Err(StateError::DuplicateName(c.name.clone()));
            }
        }
        Ok(Self { coordinates, equation, boundary })
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coordinates
    }

    pub fn coordinate(&self, pos: usize) -> &Coordinate {
        &self.coordinates[pos]
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.coordinates.iter().position(|c| c.name == name)
    }

    pub fn equation(&self) -> &BinomialEquation {
        &self.equation
    }

    pub fn boundary(&self) -> &BoundaryLedger {
        &self.boundary
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    pub fn measure(&self) -> Measure {
        let (l, r) = (self.equation.left_sum(), self.equation.right_sum());
        Measure { min_sum: l.min(r), max_sum: l.max(r) }
    }

    /// One side of the equation has empty support: the chart is `monomial = 1`.
    pub fn is_terminal(&self) -> bool {
        self.equation.left_support().next().is_none() || self.equation.right_support().next().is_none()
    }

    /// Both sides empty: the equation reads `1 = 1` and cuts out nothing.
    pub fn is_degenerate(&self) -> bool {
        self.equation.left_support().next().is_none() && self.equation.right_support().next().is_none()
    }

    fn render_side(&self, exps: &[u32]) -> String {
        let factors: Vec<String> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| match e {
                1 => self.coordinates[i].name.clone(),
                _ => format!("{}^{}", self.coordinates[i].name, e),
            })
            .collect();
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }
}

impl fmt::Display for PairState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.render_side(&self.equation.left), self.render_side(&self.equation.right))
    }
}

/// Builds the input pair `x1^e1..xn^en = y1^f1..ym^fm` in `A^(n+m+r)`.
pub fn make_state(
    left: &[u32],
    right: &[u32],
    extra: usize,
    boundary: &BoundarySpec,
) -> Result<PairState, StateError> {
    for (side, exps) in [("left", left), ("right", right)] {
        if let Some(index) = exps.iter().position(|&e| e == 0) {
            return Err(StateError::NonPositiveExponent { side, index: index + 1 });
        }
    }
    let (n, m) = (left.len(), right.len());
    let dim = n + m + extra;
    let mut coordinates = Vec::with_capacity(dim);
    coordinates.extend((1..=n).map(|i| Coordinate::new(format!("x{i}"), Provenance::Left)));
    coordinates.extend((1..=m).map(|j| Coordinate::new(format!("y{j}"), Provenance::Right)));
    coordinates.extend((1..=extra).map(|k| Coordinate::new(format!("z{k}"), Provenance::Extra)));

    let mut left_exps = vec![0; dim];
    let mut right_exps = vec![0; dim];
    left_exps[..n].copy_from_slice(left);
    right_exps[n..n + m].copy_from_slice(right);
    let equation = BinomialEquation::new(left_exps, right_exps)?;

    let mut ledger = match boundary.preset {
        BoundaryPreset::Zero => BoundaryLedger::zero(dim),
        BoundaryPreset::PaperPair => BoundaryLedger::paper_pair(dim),
    };
    for (name, value) in &boundary.coords {
        let pos = coordinates
            .iter()
            .position(|c| &c.name == name)
            .ok_or_else(|| StateError::UnknownCoordinate(name.clone()))?;
        ledger.coeff[pos] = value.clone();
    }
    if let Some(t) = &boundary.t {
        ledger.t_coeff = t.clone();
    }
    PairState::new(coordinates, equation, ledger)
}

/// A coordinate center `Z = V(x_s : s in S, y_t : t in T)`.
///
/// `s` holds positions with positive left exponent, `t` positions with
/// positive right exponent, both sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlowUpCenter {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

impl BlowUpCenter {
    pub fn new(mut s: Vec<usize>, mut t: Vec<usize>) -> Self {
        s.sort_unstable();
        t.sort_unstable();
        Self { s, t }
    }

    pub fn size(&self) -> usize {
        self.s.len() + self.t.len()
    }

    /// Chart order: `S` positions, then `T` positions.
    pub fn charts(&self) -> impl Iterator<Item = usize> + '_ {
        self.s.iter().chain(self.t.iter()).copied()
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.s.contains(&pos) || self.t.contains(&pos)
    }

    pub fn validate(&self, state: &PairState) -> Result<(), BlowUpError> {
        if self.size() < 2 {
            return Err(BlowUpError::CenterTooSmall(self.size()));
        }
        let dim = state.dimension();
        let mut seen = HashSet::new();
        for (side, positions, exps) in
            [("left", &self.s, state.equation.left()), ("right", &self.t, state.equation.right())]
        {
            for &pos in positions {
                if pos >= dim {
                    return Err(BlowUpError::UnknownPosition(pos));
                }
                if !seen.insert(pos) {
                    return Err(BlowUpError::RepeatedCoordinate(state.coordinates[pos].name.clone()));
                }
                if state.coordinates[pos].provenance == Provenance::Extra {
                    return Err(BlowUpError::ExtraCoordinate(state.coordinates[pos].name.clone()));
                }
                if exps[pos] == 0 {
                    return Err(BlowUpError::NotOnSide { name: state.coordinates[pos].name.clone(), side });
                }
            }
        }
        Ok(())
    }

    pub fn summary(&self, state: &PairState) -> CenterSummary {
        let eq = state.equation();
        let sigma_s: u64 = self.s.iter().map(|&i| u64::from(eq.left[i])).sum();
        let sigma_t: u64 = self.t.iter().map(|&j| u64::from(eq.right[j])).sum();
        CenterSummary {
            k: self.s.len() as u64,
            l: self.t.len() as u64,
            sigma_s,
            sigma_t,
            mu: sigma_s.min(sigma_t),
        }
    }

    pub fn render(&self, state: &PairState) -> String {
        let names = |ps: &[usize]| -> String {
            ps.iter().map(|&p| state.coordinates[p].name.as_str()).collect::<Vec<_>>().join(",")
        };
        format!("S={{{}}} T={{{}}}", names(&self.s), names(&self.t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CenterSummary {
    pub k: u64,
    pub l: u64,
    pub sigma_s: u64,
    pub sigma_t: u64,
    pub mu: u64,
}

impl CenterSummary {
    /// Whether `Z ∩ H` has codimension at least two in `H`.
    ///
    /// Both sides vanish on `Z` when `S` and `T` are nonempty, so `Z ∩ H` has
    /// codimension `k + l - 1` in `H`; otherwise `k + l`.
    pub fn is_exceptional(&self) -> bool {
        let both = self.k > 0 && self.l > 0;
        (both && self.k + self.l >= 3) || (!both && self.k + self.l >= 2)
    }
}

/// The divisor produced by one blow-up and its discrepancy over the input pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorRecord {
    pub divisor: Coordinate,
    pub ledger_value: Rational,
    pub is_exceptional: bool,
    pub center: CenterSummary,
    pub birth_node: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowUpError {
    #[error("center has {0} coordinates; at least 2 are required")]
    CenterTooSmall(usize),
    #[error("center position {0} is out of range")]
    UnknownPosition(usize),
    #[error("coordinate `{0}` appears twice in the center")]
    RepeatedCoordinate(String),
    #[error("center touches extra coordinate `{0}`")]
    ExtraCoordinate(String),
    #[error("coordinate `{name}` has no positive {side} exponent")]
    NotOnSide { name: String, side: &'static str },
    #[error("chart coordinate at position {0} is not in the center")]
    ChartNotInCenter(usize),
    #[error("exceptional coordinate must have exceptional provenance and a fresh name, got `{0}`")]
    BadExceptional(String),
}

/// Discrepancy of the divisor of a blow-up of `state` along `center`.
///
/// `a(E) = (k + l - 1) - mu - sum_{S ∪ T} c_i - d * mu`: the relative
/// canonical class of the ambient blow-up, minus the `mu` copies of `E` split
/// off the strict transform, minus the pulled-back boundary.
pub fn discrepancy(state: &PairState, center: &BlowUpCenter) -> Rational {
    let summary = center.summary(state);
    let boundary = state.boundary();
    let mut value = int((summary.k + summary.l) as i64 - 1) - int(summary.mu as i64);
    for pos in center.charts() {
        value -= boundary.coeff(pos);
    }
    value - boundary.t_coeff() * int(summary.mu as i64)
}

/// Blows up `center` and returns the chart where `chart` generates the
/// exceptional ideal, with `chart` renamed to `exceptional`.
pub fn chart_blowup(
    state: &PairState,
    center: &BlowUpCenter,
    chart: usize,
    exceptional: Coordinate,
) -> Result<(PairState, DivisorRecord), BlowUpError> {
    center.validate(state)?;
    if !center.contains(chart) {
        return Err(BlowUpError::ChartNotInCenter(chart));
    }
    let birth_node = match exceptional.provenance {
        Provenance::Exceptional { birth } => birth,
        _ => return Err(BlowUpError::BadExceptional(exceptional.name)),
    };
    if state.coordinates.iter().enumerate().any(|(i, c)| i != chart && c.name == exceptional.name) {
        return Err(BlowUpError::BadExceptional(exceptional.name));
    }

    let summary = center.summary(state);
    let value = discrepancy(state, center);

    let mut left = state.equation.left.clone();
    let mut right = state.equation.right.clone();
    left[chart] = (summary.sigma_s - summary.mu) as u32;
    right[chart] = (summary.sigma_t - summary.mu) as u32;

    let mut coeff = state.boundary.coeff.clone();
    coeff[chart] = -value.clone();
    let boundary = BoundaryLedger::new(coeff, state.boundary.t_coeff.clone());

    let mut coordinates = state.coordinates.clone();
    coordinates[chart] = exceptional.clone();

    let child = PairState { coordinates, equation: BinomialEquation { left, right }, boundary };
    let record = DivisorRecord {
        divisor: exceptional,
        ledger_value: value,
        is_exceptional: summary.is_exceptional(),
        center: summary,
        birth_node,
    };
    Ok((child, record))
}
