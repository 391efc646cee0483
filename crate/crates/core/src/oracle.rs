//! Independent recomputation of discrepancies and exhaustive center search.
//!
//! The oracle never looks at propagated boundaries. For a divisor `E` it
//! composes the monomial chart maps from the root down to a chart where `E`
//! is a coordinate hyperplane and reads off, along `E`,
//!
//! * the order of the Jacobian of the composed map (chain rule over steps),
//! * the order of the total transform of `left - right` (the smaller of the
//!   two side orders, the sides being distinct monomials),
//! * the order of each pulled-back input boundary monomial,
//!
//! and assembles `a(E) = jacobian - binomial - boundary` by adjunction.

use num_traits::Zero;
use thiserror::Error;

use crate::binomial::{chart_blowup, BlowUpCenter, BlowUpError, Coordinate, NodeId, PairState, Provenance};
use crate::discrepancy::{verdict_from_records, LocatedRecord, Verdict};
use crate::rational::{int, render_compact, Rational};
use crate::resolver::{orient, ResolutionTree};

/// Pullbacks of source coordinates as exponent vectors over target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMap {
    images: Vec<Vec<u64>>,
}

impl MonomialMap {
    pub fn identity(dim: usize) -> Self {
        let images = (0..dim)
            .map(|i| {
                let mut row = vec![0; dim];
                row[i] = 1;
                row
            })
            .collect();
        Self { images }
    }

    /// The chart map of a blow-up: `u_j -> u_chart * u_j` for `j` in the center.
    pub fn chart_step(dim: usize, center: &BlowUpCenter, chart: usize) -> Self {
        let mut map = Self::identity(dim);
        for j in center.charts().filter(|&j| j != chart) {
            map.images[j][chart] = 1;
        }
        map
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, source: usize) -> &[u64] {
        &self.images[source]
    }

    /// Pulls a monomial over the source coordinates back to the target.
    pub fn pullback(&self, monomial: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.target_dim()];
        for (source, &e) in monomial.iter().enumerate() {
            if e > 0 {
                for (o, &a) in out.iter_mut().zip(&self.images[source]) {
                    *o += e * a;
                }
            }
        }
        out
    }

    fn target_dim(&self) -> usize {
        self.images.first().map_or(0, Vec::len)
    }

    /// `self` maps target -> source; `inner` maps a further target into
    /// `self`'s target. The result maps `inner`'s target to `self`'s source.
    pub fn then(&self, inner: &MonomialMap) -> MonomialMap {
        MonomialMap { images: self.images.iter().map(|row| inner.pullback(row)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} is not expanded")]
    NotExpanded(NodeId),
    #[error("node {0}: centers with an empty side are not supported by the adjunction route")]
    Unsupported(NodeId),
    #[error("node {0}: both sides pulled back to the same monomial")]
    CoincidentSides(NodeId),
    #[error("node {node}: charts disagree ({first} vs {other})")]
    ChartDisagreement { node: NodeId, first: String, other: String },
    #[error("state `{0}` is terminal; no centers to enumerate")]
    Terminal(String),
    #[error("exhaustive search exceeded depth bound {0}")]
    DepthExceeded(usize),
    #[error("exhaustive search exceeded the budget of {0} traces")]
    BudgetExceeded(usize),
    #[error(transparent)]
    BlowUp(#[from] BlowUpError),
}

/// `(center, chart)` steps from the root down to `node`.
fn path_steps(tree: &ResolutionTree, node: NodeId) -> Result<Vec<(BlowUpCenter, usize)>, OracleError> {
    let mut current = tree.node(node).ok_or(OracleError::UnknownNode(node))?;
    let mut steps = Vec::new();
    while let Some(parent_id) = current.parent {
        let parent = tree.node(parent_id).ok_or(OracleError::UnknownNode(parent_id))?;
        let edge = parent
            .edges
            .iter()
            .find(|e| e.child == current.id)
            .ok_or(OracleError::UnknownNode(current.id))?;
        let center = parent.center.clone().ok_or(OracleError::NotExpanded(parent_id))?;
        steps.push((center, edge.chart));
        current = parent;
    }
    steps.reverse();
    Ok(steps)
}

fn compose(dim: usize, steps: &[(BlowUpCenter, usize)]) -> MonomialMap {
    steps.iter().fold(MonomialMap::identity(dim), |acc, (center, chart)| {
        acc.then(&MonomialMap::chart_step(dim, center, *chart))
    })
}

/// Substitution from the chart coordinates of `node` to the root coordinates.
pub fn compose_path(tree: &ResolutionTree, node: NodeId) -> Result<MonomialMap, OracleError> {
    let steps = path_steps(tree, node)?;
    Ok(compose(tree.root().state.dimension(), &steps))
}

fn dot(a: &[u32], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(&x, &y)| u64::from(x) * y).sum()
}

/// Discrepancy over the root pair of the divisor `u_divisor = 0` on the chart
/// reached by `steps`.
fn value_along(
    root: &PairState,
    steps: &[(BlowUpCenter, usize)],
    divisor: usize,
    node: NodeId,
) -> Result<Rational, OracleError> {
    let dim = root.dimension();
    let total = compose(dim, steps);

    // Chain rule: step j contributes (k_j + l_j - 1) times the order along E
    // of its chart coordinate pulled back through the later steps.
    let mut jacobian = 0u64;
    let mut suffix = MonomialMap::identity(dim);
    for (center, chart) in steps.iter().rev() {
        let factor = center.size() as u64 - 1;
        jacobian += factor * suffix.image(*chart)[divisor];
        suffix = MonomialMap::chart_step(dim, center, *chart).then(&suffix);
    }

    let eq = root.equation();
    let column: Vec<u64> = (0..dim).map(|i| total.image(i)[divisor]).collect();
    let left_order = dot(eq.left(), &column);
    let right_order = dot(eq.right(), &column);
    let pulled = |exps: &[u32]| {
        let wide: Vec<u64> = exps.iter().map(|&e| u64::from(e)).collect();
        total.pullback(&wide)
    };
    if pulled(eq.left()) == pulled(eq.right()) {
        return Err(OracleError::CoincidentSides(node));
    }
    let binomial = left_order.min(right_order);

    let boundary = root.boundary();
    let mut pulled_boundary = boundary.t_coeff() * int(binomial as i64);
    for (i, &order) in column.iter().enumerate() {
        if order > 0 && !boundary.coeff(i).is_zero() {
            pulled_boundary += boundary.coeff(i) * int(order as i64);
        }
    }
    Ok(int(jacobian as i64) - int(binomial as i64) - pulled_boundary)
}

/// Recomputes the discrepancy recorded at an expanded node, through every chart.
pub fn oracle_value(tree: &ResolutionTree, node: NodeId) -> Result<Rational, OracleError> {
    let n = tree.node(node).ok_or(OracleError::UnknownNode(node))?;
    let center = n.center.as_ref().ok_or(OracleError::NotExpanded(node))?;
    if center.s.is_empty() || center.t.is_empty() {
        return Err(OracleError::Unsupported(node));
    }
    let prefix = path_steps(tree, node)?;
    let root = &tree.root().state;
    let mut value: Option<Rational> = None;
    for chart in center.charts() {
        let mut steps = prefix.clone();
        steps.push((center.clone(), chart));
        let v = value_along(root, &steps, chart, node)?;
        match &value {
            None => value = Some(v),
            Some(first) if *first != v => {
                return Err(OracleError::ChartDisagreement {
                    node,
                    first: render_compact(first),
                    other: render_compact(&v),
                })
            }
            Some(_) => {}
        }
    }
    Ok(value.expect("center has charts"))
}

/// Every `S` on the large side with `0 <= sigma_S - m < min e_s`, `T` the full
/// small side. Ordered by subset size, then lexicographically by position.
pub fn enumerate_valid_centers(state: &PairState) -> Result<Vec<BlowUpCenter>, OracleError> {
    if state.is_terminal() {
        return Err(OracleError::Terminal(state.to_string()));
    }
    let (large, small, large_is_left) = orient(state);
    let m: u64 = small.iter().map(|&e| u64::from(e)).sum();
    let small_support: Vec<usize> = (0..small.len()).filter(|&i| small[i] > 0).collect();
    let support: Vec<usize> = (0..large.len()).filter(|&i| large[i] > 0).collect();

    let mut subsets: Vec<Vec<usize>> = Vec::new();
    for mask in 1u64..(1u64 << support.len()) {
        let subset: Vec<usize> =
            (0..support.len()).filter(|b| mask & (1 << b) != 0).map(|b| support[b]).collect();
        let sigma: u64 = subset.iter().map(|&p| u64::from(large[p])).sum();
        let min_e = subset.iter().map(|&p| u64::from(large[p])).min().unwrap_or(0);
        if sigma >= m && sigma - m < min_e {
            subsets.push(subset);
        }
    }
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(subsets
        .into_iter()
        .map(|chosen| {
            if large_is_left {
                BlowUpCenter::new(chosen, small_support.clone())
            } else {
                BlowUpCenter::new(small_support.clone(), chosen)
            }
        })
        .collect())
}

/// One center decision inside an exhaustive trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Choice {
    pub path: Vec<String>,
    pub center: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub choices: Vec<Choice>,
}

impl Trace {
    pub fn render(&self) -> String {
        if self.choices.is_empty() {
            return "(no blow-ups)".to_string();
        }
        self.choices
            .iter()
            .map(|c| format!("[{}] {}", crate::resolver::render_path(&c.path), c.center))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExhaustiveOptions {
    pub depth_bound: usize,
    pub max_traces: usize,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        Self { depth_bound: 32, max_traces: 4096 }
    }
}

#[derive(Clone, Default)]
struct Branch {
    choices: Vec<Choice>,
    records: Vec<(Vec<String>, crate::binomial::DivisorRecord)>,
}

fn product(acc: Vec<Branch>, sub: Vec<Branch>, budget: usize) -> Result<Vec<Branch>, OracleError> {
    if acc.len().saturating_mul(sub.len()) > budget {
        return Err(OracleError::BudgetExceeded(budget));
    }
    let mut out = Vec::with_capacity(acc.len() * sub.len());
    for a in &acc {
        for b in &sub {
            let mut merged = a.clone();
            merged.choices.extend(b.choices.iter().cloned());
            merged.records.extend(b.records.iter().cloned());
            out.push(merged);
        }
    }
    Ok(out)
}

fn explore(
    state: &PairState,
    path: &mut Vec<String>,
    options: &ExhaustiveOptions,
) -> Result<Vec<Branch>, OracleError> {
    if state.is_terminal() {
        return Ok(vec![Branch::default()]);
    }
    let depth = path.len();
    if depth >= options.depth_bound {
        return Err(OracleError::DepthExceeded(options.depth_bound));
    }
    // Names only need to be unique along a path; tag them by depth.
    let exceptional = Coordinate::new(format!("E{}", depth + 1), Provenance::Exceptional { birth: depth });
    let mut out = Vec::new();
    for center in enumerate_valid_centers(state)? {
        let mut combos: Option<Vec<Branch>> = None;
        for chart in center.charts() {
            let (child, record) = chart_blowup(state, &center, chart, exceptional.clone())?;
            let combos = combos.get_or_insert_with(|| {
                vec![Branch {
                    choices: vec![Choice { path: path.clone(), center: center.render(state) }],
                    records: vec![(path.clone(), record)],
                }]
            });
            path.push(state.coordinate(chart).name.clone());
            let sub = explore(&child, path, options);
            path.pop();
            *combos = product(std::mem::take(combos), sub?, options.max_traces)?;
        }
        out.extend(combos.unwrap_or_default());
        if out.len() > options.max_traces {
            return Err(OracleError::BudgetExceeded(options.max_traces));
        }
    }
    Ok(out)
}

/// Resolves `state` under every sequence of valid center choices and returns
/// the verdict of each. Record node ids in these verdicts are positions within
/// the trace.
pub fn exhaustive_verdict(
    state: &PairState,
    options: &ExhaustiveOptions,
) -> Result<Vec<(Trace, Verdict)>, OracleError> {
    let branches = explore(state, &mut Vec::new(), options)?;
    Ok(branches
        .into_iter()
        .map(|b| {
            let located = b.records.iter().enumerate().map(|(i, (path, record))| LocatedRecord {
                node: i,
                record,
                path: path.clone(),
            });
            let verdict = verdict_from_records(located, state);
            (Trace { choices: b.choices }, verdict)
        })
        .collect())
}
