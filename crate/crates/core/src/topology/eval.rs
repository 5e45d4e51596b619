//! Breadth-first property-path evaluation over graph × automaton.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::automaton::Dfa;
use super::graph::TopologyGraph;
use super::path::{Direction, PathExpr, PathPattern};
use crate::error::GraphError;
use crate::term::TermId;

/// Endpoint set of a path evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeSpec {
    Bound(BTreeSet<TermId>),
    Unbound,
}

impl NodeSpec {
    pub fn one(id: TermId) -> Self {
        NodeSpec::Bound(BTreeSet::from([id]))
    }

    pub fn set(ids: impl IntoIterator<Item = TermId>) -> Self {
        NodeSpec::Bound(ids.into_iter().collect())
    }

    pub fn bound(&self) -> Option<&BTreeSet<TermId>> {
        match self {
            NodeSpec::Bound(s) => Some(s),
            NodeSpec::Unbound => None,
        }
    }
}

/// Work counters of one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TraversalStats {
    /// (node, automaton state) pairs dequeued.
    pub nodes_visited: u64,
    /// Adjacency entries examined.
    pub edges_expanded: u64,
}

impl std::ops::AddAssign for TraversalStats {
    fn add_assign(&mut self, rhs: Self) {
        self.nodes_visited += rhs.nodes_visited;
        self.edges_expanded += rhs.edges_expanded;
    }
}

/// Distinct (source, target) pairs, sorted, with the counters of the
/// evaluation that produced them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReachResult {
    pub pairs: Vec<(TermId, TermId)>,
    pub stats: TraversalStats,
}

impl ReachResult {
    pub fn stats(&self) -> TraversalStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// How per-start-node searches are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Fan out across rayon's pool when built with the `parallel` feature
    /// and there are enough start nodes to pay for it.
    #[default]
    Auto,
    /// Fan out regardless of start-node count (sequential without the
    /// `parallel` feature).
    Parallel,
}

const AUTO_PARALLEL_THRESHOLD: usize = 64;

impl TopologyGraph {
    /// All (u, v) with u in `sources`, v in `targets` and a path u → v whose
    /// label sequence matches `pattern`.
    ///
    /// Zero-length matches pair each bound endpoint with itself, or every
    /// graph node with itself when both endpoints are unbound.
    pub fn eval_path(
        &self,
        sources: &NodeSpec,
        targets: &NodeSpec,
        pattern: &PathPattern,
    ) -> Result<ReachResult, GraphError> {
        self.eval_path_with(sources, targets, pattern, Parallelism::Auto)
    }

    pub fn eval_path_with(
        &self,
        sources: &NodeSpec,
        targets: &NodeSpec,
        pattern: &PathPattern,
        parallelism: Parallelism,
    ) -> Result<ReachResult, GraphError> {
        if !self.is_sealed() {
            return Err(GraphError::NotSealed);
        }
        let (starts, filter, backward): (Vec<TermId>, Option<&BTreeSet<TermId>>, bool) = match (sources, targets) {
            (NodeSpec::Bound(src), tgt) => (src.iter().copied().collect(), tgt.bound(), false),
            (NodeSpec::Unbound, NodeSpec::Bound(tgt)) => (tgt.iter().copied().collect(), None, true),
            (NodeSpec::Unbound, NodeSpec::Unbound) => (self.node_slice().to_vec(), None, false),
        };
        let plan = match single_link_closure(pattern, backward) {
            Some((pred, dir, reflexive)) => Search::Closure { pred, dir, reflexive },
            None => {
                let dfa = if backward { Dfa::backward(pattern) } else { Dfa::forward(pattern) };
                if dfa.is_empty() {
                    return Ok(ReachResult::default());
                }
                Search::Automaton(dfa)
            }
        };

        let search = |&start: &TermId| match &plan {
            Search::Automaton(dfa) => self.bfs(dfa, start, filter),
            Search::Closure { pred, dir, reflexive } => self.closure_bfs(*pred, *dir, *reflexive, start, filter),
        };
        let per_start: Vec<(Vec<TermId>, TraversalStats)> = if fan_out(parallelism, starts.len()) {
            par_map(&starts, search)
        } else {
            starts.iter().map(search).collect()
        };

        let mut stats = TraversalStats::default();
        let mut pairs = Vec::new();
        for (start, (found, st)) in starts.iter().zip(per_start) {
            stats += st;
            if backward {
                pairs.extend(found.into_iter().map(|u| (u, *start)));
            } else {
                pairs.extend(found.into_iter().map(|v| (*start, v)));
            }
        }
        pairs.sort_unstable();
        Ok(ReachResult { pairs, stats })
    }

    /// Plain BFS for a closure over one link: every node is expanded at
    /// most once, so the counters stay within |V| and |E|.
    fn closure_bfs(
        &self,
        pred: TermId,
        dir: Direction,
        reflexive: bool,
        start: TermId,
        filter: Option<&BTreeSet<TermId>>,
    ) -> (Vec<TermId>, TraversalStats) {
        let mut stats = TraversalStats::default();
        let mut found = Vec::new();
        let mut accepted: HashSet<TermId> = HashSet::new();
        let mut remaining = filter.map(BTreeSet::len);
        // true once every wanted target is found
        let mut accept = |n: TermId, found: &mut Vec<TermId>| {
            if filter.is_none_or(|f| f.contains(&n)) && accepted.insert(n) {
                found.push(n);
                if let Some(r) = remaining.as_mut() {
                    *r -= 1;
                    return *r == 0;
                }
            }
            false
        };
        let mut done = reflexive && accept(start, &mut found);
        let mut expanded: HashSet<TermId> = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while !done {
            let Some(node) = queue.pop_front() else { break };
            stats.nodes_visited += 1;
            let neighbours = match dir {
                Direction::Forward => self.successors(node, pred),
                Direction::Backward => self.predecessors(node, pred),
            };
            for &m in neighbours {
                stats.edges_expanded += 1;
                if accept(m, &mut found) {
                    done = true;
                    break;
                }
                if expanded.insert(m) {
                    queue.push_back(m);
                }
            }
        }
        found.sort_unstable();
        (found, stats)
    }

    /// Single-start BFS; returns accepted nodes (sorted) and counters.
    fn bfs(
        &self,
        dfa: &Dfa,
        start: TermId,
        filter: Option<&BTreeSet<TermId>>,
    ) -> (Vec<TermId>, TraversalStats) {
        let mut stats = TraversalStats::default();
        let mut found = Vec::new();
        let Some(q0) = dfa.start() else {
            return (found, stats);
        };
        let mut remaining = filter.map(BTreeSet::len);
        let mut accepted: HashSet<TermId> = HashSet::new();
        let mut seen: HashSet<(TermId, usize)> = HashSet::from([(start, q0)]);
        let mut queue = VecDeque::from([(start, q0)]);
        while let Some((node, q)) = queue.pop_front() {
            stats.nodes_visited += 1;
            let state = dfa.state(q);
            if state.accepting
                && filter.is_none_or(|f| f.contains(&node))
                && accepted.insert(node)
            {
                found.push(node);
                if let Some(r) = remaining.as_mut() {
                    *r -= 1;
                    if *r == 0 {
                        break;
                    }
                }
            }
            for &((pred, dir), next) in &state.transitions {
                let neighbours = match dir {
                    Direction::Forward => self.successors(node, pred),
                    Direction::Backward => self.predecessors(node, pred),
                };
                for &m in neighbours {
                    stats.edges_expanded += 1;
                    if seen.insert((m, next)) {
                        queue.push_back((m, next));
                    }
                }
            }
        }
        found.sort_unstable();
        (found, stats)
    }
}

enum Search {
    Automaton(Dfa),
    Closure { pred: TermId, dir: Direction, reflexive: bool },
}

/// `p*` or `p+` over a single (possibly inverted) link, oriented for the
/// search direction.
fn single_link_closure(pattern: &PathPattern, backward: bool) -> Option<(TermId, Direction, bool)> {
    let directed = if backward { pattern.reversed() } else { pattern.directed() };
    let (inner, reflexive) = match directed {
        PathExpr::ZeroOrMore(e) => (e, true),
        PathExpr::OneOrMore(e) => (e, false),
        _ => return None,
    };
    match *inner {
        PathExpr::Link((Some(p), dir)) => Some((p, dir, reflexive)),
        _ => None,
    }
}

fn fan_out(parallelism: Parallelism, starts: usize) -> bool {
    cfg!(feature = "parallel")
        && match parallelism {
            Parallelism::Sequential => false,
            Parallelism::Auto => starts >= AUTO_PARALLEL_THRESHOLD,
            Parallelism::Parallel => starts > 1,
        }
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}
