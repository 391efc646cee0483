//! Chart-tree resolution driver.
//!
//! Orient the equation so the larger side is "large", blow up the full
//! support of the small side together with a greedy subset `S` of the large
//! side satisfying `0 <= sigma_S - m < min_{s in S} e_s`, and recurse on every
//! chart until each chart equation has an empty side. `(m, M)` decreases
//! lexicographically along every edge; the driver checks this on each edge.
//!
//! Trees are expanded level by level. Each level's work is computed (in
//! parallel when enabled) into slots that are then numbered in breadth-first
//! order, so node ids and divisor names never depend on the schedule.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::binomial::{
    chart_blowup, BlowUpCenter, BlowUpError, Coordinate, DivisorRecord, Measure, NodeId, PairState,
};

pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// Ties in exponent broken by smaller coordinate position.
    #[default]
    GreedyLo,
    /// Ties in exponent broken by larger coordinate position.
    GreedyHi,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::GreedyLo, Strategy::GreedyHi];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::GreedyLo => "greedy-lo",
            Strategy::GreedyHi => "greedy-hi",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy-lo" => Ok(Strategy::GreedyLo),
            "greedy-hi" => Ok(Strategy::GreedyHi),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("state `{0}` is terminal; no center to select")]
    Terminal(String),
    #[error("max depth must be at least 1")]
    InvalidMaxDepth,
    #[error("depth limit {max_depth} exceeded at node {node} (path: {})", render_path(path))]
    DepthExceeded { max_depth: usize, node: NodeId, path: Vec<String> },
    #[error("measure did not decrease lexicographically: {parent} -> {child} (path: {})", render_path(path))]
    LexViolation { parent: Measure, child: Measure, path: Vec<String> },
    #[error("tree exceeds the node budget of {limit}")]
    NodeBudget { limit: usize },
    #[error("selected center violates 0 <= sigma_S - m < min e_s: {0}")]
    CenterCondition(String),
    #[error(transparent)]
    BlowUp(#[from] BlowUpError),
}

pub fn render_path(path: &[String]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|c| format!("chart={c}")).collect::<Vec<_>>().join(" > ")
    }
}

/// Splits the equation into (large side, small side) views, left winning ties.
/// Returns `(large exps, small exps, large_is_left)`.
pub(crate) fn orient(state: &PairState) -> (&[u32], &[u32], bool) {
    let eq = state.equation();
    if eq.left_sum() >= eq.right_sum() {
        (eq.left(), eq.right(), true)
    } else {
        (eq.right(), eq.left(), false)
    }
}

pub fn select_center(state: &PairState, strategy: Strategy) -> Result<BlowUpCenter, ResolveError> {
    if state.is_terminal() {
        return Err(ResolveError::Terminal(state.to_string()));
    }
    let (large, small, large_is_left) = orient(state);
    let m: u64 = small.iter().map(|&e| u64::from(e)).sum();
    let small_support: Vec<usize> = (0..small.len()).filter(|&i| small[i] > 0).collect();

    let mut candidates: Vec<usize> = (0..large.len()).filter(|&i| large[i] > 0).collect();
    candidates.sort_by(|&a, &b| {
        large[b].cmp(&large[a]).then(match strategy {
            Strategy::GreedyLo => a.cmp(&b),
            Strategy::GreedyHi => b.cmp(&a),
        })
    });

    let mut chosen = Vec::new();
    let mut sum = 0u64;
    for pos in candidates {
        if sum >= m {
            break;
        }
        chosen.push(pos);
        sum += u64::from(large[pos]);
    }
    let min_e = chosen.iter().map(|&p| u64::from(large[p])).min().unwrap_or(0);
    if sum < m || sum - m >= min_e {
        return Err(ResolveError::CenterCondition(state.to_string()));
    }
    Ok(if large_is_left {
        BlowUpCenter::new(chosen, small_support)
    } else {
        BlowUpCenter::new(small_support, chosen)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEdge {
    pub chart: usize,
    pub chart_name: String,
    pub child: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionNode {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub depth: usize,
    pub state: PairState,
    pub center: Option<BlowUpCenter>,
    pub record: Option<DivisorRecord>,
    pub edges: Vec<ChartEdge>,
    pub measure: Measure,
}

impl ResolutionNode {
    pub fn is_expanded(&self) -> bool {
        self.center.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionTree {
    nodes: Vec<ResolutionNode>,
    strategy: Strategy,
}

impl ResolutionTree {
    /// A tree holding only the unexpanded root.
    pub fn seed(state: PairState, strategy: Strategy) -> Self {
        let measure = state.measure();
        Self {
            nodes: vec![ResolutionNode {
                id: 0,
                parent: None,
                depth: 0,
                state,
                center: None,
                record: None,
                edges: Vec::new(),
                measure,
            }],
            strategy,
        }
    }

    pub fn root(&self) -> &ResolutionNode {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[ResolutionNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Option<&ResolutionNode> {
        self.nodes.get(id)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn is_degenerate(&self) -> bool {
        self.root().state.is_degenerate()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ResolutionNode> {
        self.nodes.iter().filter(|n| n.edges.is_empty())
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    /// Chart coordinate names from the root down to `id`.
    pub fn path(&self, id: NodeId) -> Vec<String> {
        let mut path = Vec::new();
        let mut current = id;
        while let Some(parent) = self.nodes[current].parent {
            let edge = self.nodes[parent]
                .edges
                .iter()
                .find(|e| e.child == current)
                .expect("child listed under its parent");
            path.push(edge.chart_name.clone());
            current = parent;
        }
        path.reverse();
        path
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolveOptions {
    pub strategy: Strategy,
    pub max_depth: usize,
    pub parallel: bool,
    /// Upper bound on the number of tree nodes, if any.
    pub max_nodes: Option<usize>,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        Self { strategy: Strategy::default(), max_depth: DEFAULT_MAX_DEPTH, parallel: true, max_nodes: None }
    }
}

impl ResolveOptions {
    pub fn with_strategy(strategy: Strategy) -> Self {
        Self { strategy, ..Self::default() }
    }
}

struct Expansion {
    center: BlowUpCenter,
    record: DivisorRecord,
    children: Vec<(usize, String, PairState)>,
}

fn expand(
    state: &PairState,
    node: NodeId,
    divisor_index: usize,
    strategy: Strategy,
) -> Result<Expansion, ResolveError> {
    let center = select_center(state, strategy)?;
    let mut record = None;
    let mut children = Vec::with_capacity(center.size());
    for chart in center.charts() {
        let (child, rec) = chart_blowup(state, &center, chart, Coordinate::exceptional(divisor_index, node))?;
        record.get_or_insert(rec);
        children.push((chart, state.coordinate(chart).name.clone(), child));
    }
    let record = record.expect("center has at least two charts");
    Ok(Expansion { center, record, children })
}

pub fn resolve(state: PairState, options: &ResolveOptions) -> Result<ResolutionTree, ResolveError> {
    if options.max_depth == 0 {
        return Err(ResolveError::InvalidMaxDepth);
    }
    let mut tree = ResolutionTree::seed(state, options.strategy);
    let mut frontier: Vec<NodeId> = vec![0];
    let mut next_divisor = 1;

    while !frontier.is_empty() {
        let mut work = Vec::new();
        for &id in &frontier {
            let node = &tree.nodes[id];
            if node.state.is_terminal() {
                continue;
            }
            if node.depth >= options.max_depth {
                return Err(ResolveError::DepthExceeded {
                    max_depth: options.max_depth,
                    node: id,
                    path: tree.path(id),
                });
            }
            work.push((id, next_divisor));
            next_divisor += 1;
        }

        let nodes = &tree.nodes;
        let run = |&(id, q): &(NodeId, usize)| expand(&nodes[id].state, id, q, options.strategy);
        let expansions: Vec<Result<Expansion, ResolveError>> = if options.parallel {
            work.par_iter().map(run).collect()
        } else {
            work.iter().map(run).collect()
        };

        frontier.clear();
        for (&(id, _), expansion) in work.iter().zip(expansions) {
            let Expansion { center, record, children } = expansion?;
            if let Some(limit) = options.max_nodes {
                if tree.nodes.len() + children.len() > limit {
                    return Err(ResolveError::NodeBudget { limit });
                }
            }
            let parent_measure = tree.nodes[id].measure;
            let depth = tree.nodes[id].depth + 1;
            let mut edges = Vec::with_capacity(children.len());
            for (chart, chart_name, child_state) in children {
                let measure = child_state.measure();
                if measure >= parent_measure {
                    let mut path = tree.path(id);
                    path.push(chart_name);
                    return Err(ResolveError::LexViolation { parent: parent_measure, child: measure, path });
                }
                let child = tree.nodes.len();
                tree.nodes.push(ResolutionNode {
                    id: child,
                    parent: Some(id),
                    depth,
                    state: child_state,
                    center: None,
                    record: None,
                    edges: Vec::new(),
                    measure,
                });
                edges.push(ChartEdge { chart, chart_name, child });
                frontier.push(child);
            }
            let node = &mut tree.nodes[id];
            node.center = Some(center);
            node.record = Some(record);
            node.edges = edges;
        }
    }
    Ok(tree)
}

/// `(parent measure, child measure)` for every edge, in child-id order.
pub fn lex_measure_trace(tree: &ResolutionTree) -> Vec<(Measure, Measure)> {
    tree.nodes().iter().filter_map(|n| n.parent.map(|p| (tree.nodes[p].measure, n.measure))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binomial::{make_state, BoundarySpec};
    use crate::rational::int;

    fn zero(left: &[u32], right: &[u32]) -> PairState {
        make_state(left, right, 0, &BoundarySpec::default()).unwrap()
    }

    fn names(state: &PairState, positions: &[usize]) -> Vec<String> {
        positions.iter().map(|&p| state.coordinate(p).name.clone()).collect()
    }

    fn measure(m: u64, big: u64) -> Measure {
        Measure { min_sum: m, max_sum: big }
    }

    #[test]
    fn select_center_examples() {
        let s = zero(&[5, 1], &[3]);
        let c = select_center(&s, Strategy::GreedyLo).unwrap();
        assert_eq!((names(&s, &c.s), names(&s, &c.t)), (vec!["x1".into()], vec!["y1".into()]));

        let s = zero(&[1, 1], &[2]);
        let c = select_center(&s, Strategy::GreedyLo).unwrap();
        assert_eq!(names(&s, &c.s), ["x1", "x2"]);
        assert_eq!(names(&s, &c.t), ["y1"]);

        let s = zero(&[2, 2, 2], &[2, 3]);
        let c = select_center(&s, Strategy::GreedyLo).unwrap();
        assert_eq!(c.s, [0, 1, 2]);
        assert_eq!(c.t, [3, 4]);
        assert_eq!(c.summary(&s).sigma_s - 5, 1);
    }

    #[test]
    fn tie_breaks_differ_by_strategy() {
        let s = zero(&[2, 2], &[2]);
        assert_eq!(select_center(&s, Strategy::GreedyLo).unwrap().s, [0]);
        assert_eq!(select_center(&s, Strategy::GreedyHi).unwrap().s, [1]);
        // The larger right side is the one searched.
        let s = zero(&[1], &[3, 3]);
        let c = select_center(&s, Strategy::GreedyHi).unwrap();
        assert_eq!((c.s.as_slice(), c.t.as_slice()), (&[0][..], &[2][..]));
    }

    #[test]
    fn select_center_rejects_terminal() {
        assert!(matches!(
            select_center(&zero(&[2], &[]), Strategy::GreedyLo),
            Err(ResolveError::Terminal(_))
        ));
    }

    #[test]
    fn a1_tree() {
        let tree = resolve(zero(&[1, 1], &[2]), &ResolveOptions::default()).unwrap();
        assert_eq!(tree.root().measure, measure(2, 2));
        assert_eq!(tree.root().record.as_ref().unwrap().ledger_value, int(0));
        assert!(tree.leaves().all(|n| n.state.is_terminal()));
        assert!(tree.depth() <= 4);
        let trace = lex_measure_trace(&tree);
        assert_eq!(trace[0], (measure(2, 2), measure(1, 2)));
        assert!(trace.contains(&(measure(1, 2), measure(1, 1))));
        assert!(trace.iter().all(|(p, c)| c < p));
        // Divisor names follow breadth-first expansion order.
        let expanded: Vec<_> =
            tree.nodes().iter().filter_map(|n| n.record.as_ref()).map(|r| r.divisor.name.clone()).collect();
        let expected: Vec<_> = (1..=expanded.len()).map(|i| format!("E{i}")).collect();
        assert_eq!(expanded, expected);
    }

    #[test]
    fn terminal_input_is_a_single_node() {
        let tree = resolve(zero(&[2], &[]), &ResolveOptions::default()).unwrap();
        assert_eq!(tree.len(), 1);
        assert!(lex_measure_trace(&tree).is_empty());
        let degenerate = resolve(zero(&[], &[]), &ResolveOptions::default()).unwrap();
        assert!(degenerate.is_degenerate());
        assert_eq!(degenerate.len(), 1);
    }

    #[test]
    fn odp_tree() {
        let tree = resolve(zero(&[1, 1], &[1, 1]), &ResolveOptions::default()).unwrap();
        assert_eq!(tree.root().record.as_ref().unwrap().ledger_value, int(1));
        assert!(tree.nodes().iter().filter_map(|n| n.record.as_ref()).all(|r| r.ledger_value >= int(0)));
    }

    #[test]
    fn chart_y_raises_max_while_min_drops() {
        let tree = resolve(zero(&[5, 1], &[3]), &ResolveOptions::default()).unwrap();
        let trace = lex_measure_trace(&tree);
        assert!(trace.contains(&(measure(3, 6), measure(0, 8))));
        assert!(trace.iter().any(|(p, c)| c.max_sum > p.max_sum && c.min_sum < p.min_sum));
    }

    #[test]
    fn depth_limit_reports_path() {
        let err =
            resolve(zero(&[1, 1], &[2]), &ResolveOptions { max_depth: 1, ..Default::default() }).unwrap_err();
        match err {
            ResolveError::DepthExceeded { node, path, .. } => {
                assert_eq!(node, 1);
                assert_eq!(path, ["x1"]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            resolve(zero(&[1], &[1]), &ResolveOptions { max_depth: 0, ..Default::default() }),
            Err(ResolveError::InvalidMaxDepth)
        );
    }

    #[test]
    fn node_budget_stops_expansion() {
        let a1 = zero(&[1, 1], &[2]);
        let size = resolve(a1.clone(), &ResolveOptions::default()).unwrap().len();
        let opts = ResolveOptions { max_nodes: Some(size - 1), ..Default::default() };
        assert_eq!(resolve(a1.clone(), &opts), Err(ResolveError::NodeBudget { limit: size - 1 }));
        let opts = ResolveOptions { max_nodes: Some(size), ..Default::default() };
        assert_eq!(resolve(a1, &opts).unwrap().len(), size);
    }

    #[test]
    fn parallel_and_sequential_trees_match() {
        for (l, r) in [(&[3u32, 2, 2][..], &[4u32, 1][..]), (&[1, 1, 1], &[2, 3]), (&[6, 5], &[4, 4, 3])] {
            for strategy in Strategy::ALL {
                let par =
                    resolve(zero(l, r), &ResolveOptions { strategy, parallel: true, ..Default::default() });
                let seq =
                    resolve(zero(l, r), &ResolveOptions { strategy, parallel: false, ..Default::default() });
                assert_eq!(par, seq);
            }
        }
    }
}
