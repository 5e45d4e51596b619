use std::collections::{BTreeSet, HashMap};

use crate::error::{GraphError, StoreError};
use crate::store::DiskStore;
use crate::term::TermId;

type Adjacency = HashMap<TermId, HashMap<TermId, Vec<TermId>>>;

/// In-memory topology triples with predicate-major adjacency in both
/// directions: `forward[p][s]` lists objects (PSO), `backward[p][o]` lists
/// subjects (POS). Lists are sorted and duplicate-free.
#[derive(Debug, Clone, Default)]
pub struct TopologyGraph {
    forward: Adjacency,
    backward: Adjacency,
    nodes: BTreeSet<TermId>,
    node_list: Vec<TermId>,
    edge_count: usize,
    sealed: bool,
}

impl TopologyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds the graph from a sealed store's topology triples and seals it.
    pub fn from_store(store: &DiskStore) -> Result<Self, StoreError> {
        let mut g = TopologyGraph::new();
        for t in store.topology_triples() {
            g.add_edge(t.s, t.p, t.o).expect("fresh graph is writable");
        }
        g.seal();
        let expected = store.catalog().n_topology;
        if g.edge_count() as u64 != expected {
            return Err(StoreError::integrity(
                store.dir(),
                format!("rebuilt {} topology edges, catalog says {expected}", g.edge_count()),
            ));
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, s: TermId, p: TermId, o: TermId) -> Result<bool, GraphError> {
        if self.sealed {
            return Err(GraphError::Sealed);
        }
        let fwd = self.forward.entry(p).or_default().entry(s).or_default();
        let Err(at) = fwd.binary_search(&o) else {
            return Ok(false);
        };
        fwd.insert(at, o);
        let bwd = self.backward.entry(p).or_default().entry(o).or_default();
        let at = bwd.binary_search(&s).unwrap_err();
        bwd.insert(at, s);
        self.nodes.insert(s);
        self.nodes.insert(o);
        self.edge_count += 1;
        Ok(true)
    }

    pub fn seal(&mut self) {
        self.node_list = self.nodes.iter().copied().collect();
        self.sealed = true;
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn successors(&self, node: TermId, p: TermId) -> &[TermId] {
        lookup(&self.forward, p, node)
    }

    pub fn predecessors(&self, node: TermId, p: TermId) -> &[TermId] {
        lookup(&self.backward, p, node)
    }

    /// |V_EE|, sorted.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = TermId> + '_ {
        self.nodes.iter().copied()
    }

    pub(crate) fn node_slice(&self) -> &[TermId] {
        &self.node_list
    }

    pub fn contains_node(&self, node: TermId) -> bool {
        self.nodes.contains(&node)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// |E_EE|
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn predicates(&self) -> impl Iterator<Item = TermId> + '_ {
        self.forward.keys().copied()
    }

    /// All edges as (s, p, o), in no particular order.
    pub fn edges(&self) -> impl Iterator<Item = (TermId, TermId, TermId)> + '_ {
        self.forward.iter().flat_map(|(p, by_s)| {
            by_s.iter()
                .flat_map(move |(s, objs)| objs.iter().map(move |o| (*s, *p, *o)))
        })
    }

    /// Edges of one predicate as (s, o), sorted.
    pub fn edges_of(&self, p: TermId) -> Vec<(TermId, TermId)> {
        let mut out: Vec<_> = self
            .forward
            .get(&p)
            .into_iter()
            .flat_map(|by_s| by_s.iter().flat_map(|(s, objs)| objs.iter().map(move |o| (*s, *o))))
            .collect();
        out.sort_unstable();
        out
    }
}

fn lookup(adj: &Adjacency, p: TermId, node: TermId) -> &[TermId] {
    adj.get(&p)
        .and_then(|m| m.get(&node))
        .map_or(&[], Vec::as_slice)
}
