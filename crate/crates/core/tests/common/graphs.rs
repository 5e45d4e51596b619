//! Random labelled graphs and their in-memory topology graphs.

use std::collections::{BTreeSet, HashMap};

use pathtriple_core::topology::{NodeSpec, PathExpr, PathPattern, TopologyGraph};
use pathtriple_core::{Dictionary, Term, TermId};
use rand::Rng;

use super::matrix::{path_relation, BitMatrix};

/// Nodes `0..n`, predicates `0..n_preds`; nodes without edges are not
/// part of the topology graph but still have ids.
#[derive(Debug, Clone)]
pub struct RandGraph {
    pub n: usize,
    pub n_preds: usize,
    pub edges: Vec<(usize, usize, usize)>,
}

impl RandGraph {
    pub fn random(rng: &mut impl Rng, max_nodes: usize, max_preds: usize) -> Self {
        let n = rng.gen_range(1..=max_nodes);
        let n_preds = rng.gen_range(1..=max_preds);
        let density = rng.gen_range(0.2..3.0);
        let m = (n as f64 * density) as usize;
        let edges = (0..m)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n_preds), rng.gen_range(0..n)))
            .collect();
        RandGraph { n, n_preds, edges }
    }

    pub fn graph_nodes(&self) -> Vec<bool> {
        let mut in_graph = vec![false; self.n];
        for &(s, _, o) in &self.edges {
            in_graph[s] = true;
            in_graph[o] = true;
        }
        in_graph
    }

    pub fn adjacency(&self) -> Vec<BitMatrix> {
        let mut adj = vec![BitMatrix::new(self.n); self.n_preds];
        for &(s, p, o) in &self.edges {
            adj[p].set(s, o);
        }
        adj
    }

    pub fn build(&self) -> Built {
        let mut dict = Dictionary::new();
        let nodes: Vec<TermId> = (0..self.n).map(|i| dict.intern(Term::iri(format!("ex:v{i}"))).unwrap()).collect();
        let preds: Vec<TermId> =
            (0..self.n_preds).map(|k| dict.intern(Term::iri(format!("ex:p{k}"))).unwrap()).collect();
        let mut graph = TopologyGraph::new();
        for &(s, p, o) in &self.edges {
            graph.add_edge(nodes[s], preds[p], nodes[o]).unwrap();
        }
        graph.seal();
        let index = nodes.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        Built { graph, nodes, preds, index }
    }

    /// Brute-force answer for `expr` between `src` and `tgt` node sets
    /// (`None` = unbound), as sorted index pairs.
    pub fn oracle(
        &self,
        expr: &PathExpr<Option<usize>>,
        src: Option<&BTreeSet<usize>>,
        tgt: Option<&BTreeSet<usize>>,
    ) -> Vec<(usize, usize)> {
        let mut mask = self.graph_nodes();
        for set in [src, tgt].into_iter().flatten() {
            for &i in set {
                mask[i] = true;
            }
        }
        let rel = path_relation(expr, &self.adjacency(), &BitMatrix::diagonal(&mask));
        rel.pairs()
            .into_iter()
            .filter(|(a, b)| src.is_none_or(|s| s.contains(a)) && tgt.is_none_or(|t| t.contains(b)))
            .collect()
    }
}

pub struct Built {
    pub graph: TopologyGraph,
    pub nodes: Vec<TermId>,
    pub preds: Vec<TermId>,
    pub index: HashMap<TermId, usize>,
}

impl Built {
    pub fn pattern(&self, expr: &PathExpr<Option<usize>>) -> PathPattern {
        expr.map_links(&mut |l| l.map(|p| self.preds[p]))
    }

    pub fn spec(&self, set: Option<&BTreeSet<usize>>) -> NodeSpec {
        match set {
            None => NodeSpec::Unbound,
            Some(s) => NodeSpec::set(s.iter().map(|&i| self.nodes[i])),
        }
    }

    pub fn to_indices(&self, pairs: &[(TermId, TermId)]) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = pairs.iter().map(|(a, b)| (self.index[a], self.index[b])).collect();
        out.sort();
        out
    }
}

/// Labels every link of `shape` with a random predicate, occasionally an
/// absent one.
pub fn label(shape: &PathExpr<()>, n_preds: usize, rng: &mut impl Rng) -> PathExpr<Option<usize>> {
    shape.map_links(&mut |_| if rng.gen_bool(0.05) { None } else { Some(rng.gen_range(0..n_preds)) })
}

/// Unbound, or one to three random nodes.
pub fn random_endpoint(rng: &mut impl Rng, n: usize) -> Option<BTreeSet<usize>> {
    if rng.gen_bool(0.4) {
        None
    } else {
        let k = rng.gen_range(1..=3);
        Some((0..k).map(|_| rng.gen_range(0..n)).collect())
    }
}
