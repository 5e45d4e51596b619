//! Join-based path evaluation, the relational baseline BFS is compared to.
//!
//! Links are edge-relation scans, sequences are hash joins, alternations are
//! unions and closures are iterated self-joins (semi-naive) until no new
//! pair appears. Bound endpoints select on the outermost scan only; the
//! other side of every join is materialized in full.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::eval::NodeSpec;
use super::graph::TopologyGraph;
use super::path::{Direction, PathExpr, PathPattern};
use crate::error::{ExecError, GraphError};
use crate::term::TermId;

type Pair = (TermId, TermId);

/// Result of a join-based evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JoinResult {
    /// Distinct pairs, sorted.
    pub pairs: Vec<Pair>,
    /// Rows produced by all scans, joins and unions before deduplication.
    pub intermediate_rows: u64,
}

struct Ctx<'a> {
    graph: &'a TopologyGraph,
    identity: Vec<Pair>,
    rows: u64,
    budget: Option<u64>,
}

impl Ctx<'_> {
    fn emit(&mut self, n: usize) -> Result<(), ExecError> {
        self.rows += n as u64;
        match self.budget {
            Some(b) if self.rows > b => Err(ExecError::JoinBudget(b)),
            _ => Ok(()),
        }
    }

    fn eval(&mut self, e: &PathExpr<(Option<TermId>, Direction)>, only: Restrict) -> Result<HashSet<Pair>, ExecError> {
        Ok(match e {
            PathExpr::Link((None, _)) => HashSet::new(),
            PathExpr::Link((Some(p), dir)) => {
                let r = self.scan(*p, *dir, only);
                self.emit(r.len())?;
                r
            }
            PathExpr::Inverse(_) => unreachable!("inverse is pushed down before evaluation"),
            PathExpr::Sequence(a, b) => {
                let (ra, rb) = match only {
                    Restrict::Subject(_) => (only, Restrict::None),
                    _ => (Restrict::None, only),
                };
                let left = self.eval(a, ra)?;
                let right = self.eval(b, rb)?;
                self.join(&left, &right)?
            }
            PathExpr::Alternation(a, b) => {
                let mut left = self.eval(a, only)?;
                let right = self.eval(b, only)?;
                self.emit(left.len() + right.len())?;
                left.extend(right);
                left
            }
            PathExpr::ZeroOrOne(inner) => {
                let mut r = self.eval(inner, only)?;
                self.add_identity(&mut r, only)?;
                r
            }
            PathExpr::OneOrMore(inner) => self.closure(inner, only)?,
            PathExpr::ZeroOrMore(inner) => {
                let mut r = self.closure(inner, only)?;
                self.add_identity(&mut r, only)?;
                r
            }
        })
    }

    fn scan(&self, p: TermId, dir: Direction, only: Restrict) -> HashSet<Pair> {
        let step = |x: TermId, forward: bool| {
            if forward == (dir == Direction::Forward) {
                self.graph.successors(x, p)
            } else {
                self.graph.predecessors(x, p)
            }
        };
        match only {
            Restrict::None => {
                let edges = self.graph.edges_of(p);
                match dir {
                    Direction::Forward => edges.into_iter().collect(),
                    Direction::Backward => edges.into_iter().map(|(s, o)| (o, s)).collect(),
                }
            }
            Restrict::Subject(set) => set.iter().flat_map(|&x| step(x, true).iter().map(move |&y| (x, y))).collect(),
            Restrict::Object(set) => set.iter().flat_map(|&y| step(y, false).iter().map(move |&x| (x, y))).collect(),
        }
    }

    fn add_identity(&mut self, r: &mut HashSet<Pair>, only: Restrict) -> Result<(), ExecError> {
        let keep: Vec<Pair> = self.identity.iter().copied().filter(|(x, _)| only.admits(*x, *x)).collect();
        self.emit(keep.len())?;
        r.extend(keep);
        Ok(())
    }

    fn join(&mut self, left: &HashSet<Pair>, right: &HashSet<Pair>) -> Result<HashSet<Pair>, ExecError> {
        let mut by_first: HashMap<TermId, Vec<TermId>> = HashMap::new();
        for &(y, z) in right {
            by_first.entry(y).or_default().push(z);
        }
        let mut out = HashSet::new();
        for &(x, y) in left {
            if let Some(zs) = by_first.get(&y) {
                self.emit(zs.len())?;
                out.extend(zs.iter().map(|&z| (x, z)));
            }
        }
        Ok(out)
    }

    /// Transitive closure by semi-naive iteration: each round joins only
    /// the pairs discovered in the previous round with the full relation.
    fn closure(&mut self, inner: &PathExpr<(Option<TermId>, Direction)>, only: Restrict) -> Result<HashSet<Pair>, ExecError> {
        let base = self.eval(inner, Restrict::None)?;
        let start: HashSet<Pair> = base.iter().copied().filter(|&(x, y)| only.admits(x, y)).collect();
        let mut all = start.clone();
        let mut delta = start;
        while !delta.is_empty() {
            let next = match only {
                Restrict::Object(_) => self.join(&base, &delta)?,
                _ => self.join(&delta, &base)?,
            };
            delta = next.into_iter().filter(|p| !all.contains(p)).collect();
            all.extend(delta.iter().copied());
        }
        Ok(all)
    }
}

/// Selection on the first or last column of a relation.
#[derive(Clone, Copy)]
enum Restrict<'a> {
    None,
    Subject(&'a BTreeSet<TermId>),
    Object(&'a BTreeSet<TermId>),
}

impl Restrict<'_> {
    fn admits(self, x: TermId, y: TermId) -> bool {
        match self {
            Restrict::None => true,
            Restrict::Subject(s) => s.contains(&x),
            Restrict::Object(o) => o.contains(&y),
        }
    }
}

impl TopologyGraph {
    /// Same answer as [`TopologyGraph::eval_path`], computed with joins over
    /// edge relations. Fails with [`ExecError::JoinBudget`] once more than
    /// `budget` intermediate rows have been produced.
    pub fn eval_path_joins(
        &self,
        sources: &NodeSpec,
        targets: &NodeSpec,
        pattern: &PathPattern,
        budget: Option<u64>,
    ) -> Result<JoinResult, ExecError> {
        if !self.is_sealed() {
            return Err(GraphError::NotSealed.into());
        }
        // zero-length matches: graph nodes plus any bound endpoint
        let mut ident: BTreeSet<TermId> = self.nodes().collect();
        ident.extend(sources.bound().into_iter().flatten());
        ident.extend(targets.bound().into_iter().flatten());
        let mut ctx = Ctx {
            graph: self,
            identity: ident.into_iter().map(|x| (x, x)).collect(),
            rows: 0,
            budget,
        };
        let only = match (sources.bound(), targets.bound()) {
            (Some(s), _) => Restrict::Subject(s),
            (None, Some(t)) => Restrict::Object(t),
            (None, None) => Restrict::None,
        };
        let rel = ctx.eval(&pattern.directed(), only)?;
        let keep = |spec: &NodeSpec, x: &TermId| spec.bound().is_none_or(|s| s.contains(x));
        let mut pairs: Vec<Pair> = rel
            .into_iter()
            .filter(|(u, v)| keep(sources, u) && keep(targets, v))
            .collect();
        pairs.sort_unstable();
        Ok(JoinResult {
            pairs,
            intermediate_rows: ctx.rows,
        })
    }
}
