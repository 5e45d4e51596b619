//! Bottom-up plan execution over the disk store and topology graph.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::plan::{PathLeaf, Plan, TripleLeaf};
use crate::error::{ExecError, GraphError};
use crate::store::{DiskStore, PatternTerm};
use crate::term::TermId;
use crate::topology::{NodeSpec, Parallelism, TopologyGraph};

/// Result rows; a cell is `None` where a union branch left the variable
/// unbound.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BindingTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<TermId>>>,
}

impl BindingTable {
    pub fn new(columns: Vec<String>) -> Self {
        BindingTable {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Sorts rows and drops duplicates.
    pub fn dedup(&mut self) {
        self.rows.sort_unstable();
        self.rows.dedup();
    }

    /// Rows over `vars`, in that column order, deduplicated. Variables not
    /// in the table come out unbound.
    pub fn project(&self, vars: &[String]) -> BindingTable {
        let idx: Vec<Option<usize>> = vars.iter().map(|v| self.column(v)).collect();
        let mut out = BindingTable::new(vars.to_vec());
        out.rows = self
            .rows
            .iter()
            .map(|r| idx.iter().map(|i| i.and_then(|i| r[i])).collect())
            .collect();
        out.dedup();
        out
    }

    /// Distinct values of `var`, or `None` if some row leaves it unbound.
    fn values_of(&self, var: &str) -> Option<BTreeSet<TermId>> {
        let i = self.column(var)?;
        self.rows.iter().map(|r| r[i]).collect()
    }
}

/// Hash join on the shared columns. Rows with an unbound shared cell join
/// with every row that agrees on the remaining shared cells.
pub fn hash_join(left: &BindingTable, right: &BindingTable) -> BindingTable {
    let shared: Vec<(usize, usize)> = left
        .columns
        .iter()
        .enumerate()
        .filter_map(|(i, c)| right.column(c).map(|j| (i, j)))
        .collect();
    let right_only: Vec<usize> = (0..right.columns.len())
        .filter(|j| !shared.iter().any(|(_, sj)| sj == j))
        .collect();
    let mut out = BindingTable::new(
        left.columns
            .iter()
            .cloned()
            .chain(right_only.iter().map(|&j| right.columns[j].clone()))
            .collect(),
    );

    let key = |row: &[Option<TermId>], pick: &dyn Fn(&(usize, usize)) -> usize| -> Option<Vec<TermId>> {
        shared.iter().map(|s| row[pick(s)]).collect()
    };
    let mut table: HashMap<Vec<TermId>, Vec<usize>> = HashMap::new();
    let mut partial = Vec::new();
    for (n, row) in right.rows.iter().enumerate() {
        match key(row, &|s| s.1) {
            Some(k) => table.entry(k).or_default().push(n),
            None => partial.push(n),
        }
    }
    let compatible = |l: &[Option<TermId>], r: &[Option<TermId>]| {
        shared
            .iter()
            .all(|&(i, j)| matches!((l[i], r[j]), (Some(a), Some(b)) if a == b) || l[i].is_none() || r[j].is_none())
    };
    let mut emit = |l: &[Option<TermId>], r: &[Option<TermId>]| {
        let mut row = l.to_vec();
        for &(i, j) in &shared {
            row[i] = row[i].or(r[j]);
        }
        row.extend(right_only.iter().map(|&j| r[j]));
        out.rows.push(row);
    };
    for l in &left.rows {
        match key(l, &|s| s.0) {
            Some(k) => {
                for &n in table.get(&k).into_iter().flatten() {
                    emit(l, &right.rows[n]);
                }
                for &n in &partial {
                    if compatible(l, &right.rows[n]) {
                        emit(l, &right.rows[n]);
                    }
                }
            }
            None => {
                for r in right.rows.iter().filter(|r| compatible(l, r)) {
                    emit(l, r);
                }
            }
        }
    }
    out
}

/// How path operands are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathEvaluation {
    /// Traversal over the in-memory graph, with bindings from the left of
    /// a join pushed in as start sets.
    #[default]
    Bfs,
    /// Iterated joins over edge relations, no bindings pushed in. Stops
    /// with an error past `budget` intermediate rows.
    Joins { budget: Option<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExecOptions {
    pub path_evaluation: PathEvaluation,
    pub parallelism: Parallelism,
}

/// Work counters of one execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExecStats {
    pub nodes_visited: u64,
    pub edges_expanded: u64,
    /// Rows produced by scans, joins and path operators, including the
    /// internal rows of join-based path evaluation.
    pub intermediate_rows: u64,
    pub path_evaluations: u64,
}

/// Runs `plan` and returns its result rows.
pub fn execute(
    plan: &Plan,
    store: &DiskStore,
    graph: &TopologyGraph,
    options: &ExecOptions,
) -> Result<(BindingTable, ExecStats), ExecError> {
    if !graph.is_sealed() {
        return Err(GraphError::NotSealed.into());
    }
    let mut ex = Executor {
        store,
        graph,
        options,
        stats: ExecStats::default(),
    };
    let table = ex.run(plan, None)?;
    Ok((table, ex.stats))
}

struct Executor<'a> {
    store: &'a DiskStore,
    graph: &'a TopologyGraph,
    options: &'a ExecOptions,
    stats: ExecStats,
}

impl Executor<'_> {
    /// `left` is the already-computed left operand when `plan` is the right
    /// side of a join.
    fn run(&mut self, plan: &Plan, left: Option<&BindingTable>) -> Result<BindingTable, ExecError> {
        let table = match plan {
            Plan::Triple(t) => self.triple(t),
            Plan::Path(p) => self.path(p, left)?,
            Plan::Join(l, r) => {
                let lt = self.run(l, left)?;
                let rt = self.run(r, Some(&lt))?;
                hash_join(&lt, &rt)
            }
            Plan::Union(bs) => {
                let tables = bs.iter().map(|b| self.run(b, None)).collect::<Result<Vec<_>, _>>()?;
                let mut cols: Vec<String> = Vec::new();
                for t in &tables {
                    for c in &t.columns {
                        if !cols.contains(c) {
                            cols.push(c.clone());
                        }
                    }
                }
                let mut out = BindingTable::new(cols.clone());
                for t in &tables {
                    let idx: Vec<Option<usize>> = cols.iter().map(|c| t.column(c)).collect();
                    out.rows
                        .extend(t.rows.iter().map(|r| idx.iter().map(|i| i.and_then(|i| r[i])).collect()));
                }
                out
            }
            Plan::Distinct(c) => {
                let mut t = self.run(c, left)?;
                t.dedup();
                t
            }
            Plan::Project(vars, c) => self.run(c, left)?.project(vars),
        };
        self.stats.intermediate_rows += table.len() as u64;
        Ok(table)
    }

    fn triple(&self, leaf: &TripleLeaf) -> BindingTable {
        let pat = &leaf.pattern;
        let slots = [&pat.s, &pat.p, &pat.o];
        let mut columns: Vec<String> = Vec::new();
        // column index for each position holding a variable
        let mut at = [None; 3];
        for (k, t) in slots.iter().enumerate() {
            if let Some(v) = t.var() {
                let i = columns.iter().position(|c| c == v).unwrap_or_else(|| {
                    columns.push(v.to_string());
                    columns.len() - 1
                });
                at[k] = Some(i);
            }
        }
        let mut out = BindingTable::new(columns);
        if leaf.empty {
            return out;
        }
        'triples: for t in self.store.match_pattern(pat) {
            let mut row = vec![None; out.columns.len()];
            for (k, id) in [t.s, t.p, t.o].into_iter().enumerate() {
                if let Some(i) = at[k] {
                    match row[i] {
                        Some(prev) if prev != id => continue 'triples,
                        _ => row[i] = Some(id),
                    }
                }
            }
            out.rows.push(row);
        }
        out
    }

    fn endpoint(&self, term: &PatternTerm, leaf: &PathLeaf, left: Option<&BindingTable>) -> NodeSpec {
        match term {
            PatternTerm::Bound(id) => NodeSpec::one(*id),
            PatternTerm::Var(v) => {
                let pushed = match self.options.path_evaluation {
                    PathEvaluation::Bfs => left.and_then(|t| t.values_of(v)),
                    PathEvaluation::Joins { .. } => None,
                };
                match pushed {
                    // Only graph nodes and this operand's own constants can
                    // take part in a match; keeping other values would add
                    // zero-length pairs the unrestricted operand never has.
                    Some(values) => NodeSpec::Bound(
                        values
                            .into_iter()
                            .filter(|x| self.graph.contains_node(*x) || [&leaf.subject, &leaf.object].iter().any(|t| t.bound() == Some(*x)))
                            .collect(),
                    ),
                    None => NodeSpec::Unbound,
                }
            }
        }
    }

    fn path(&mut self, leaf: &PathLeaf, left: Option<&BindingTable>) -> Result<BindingTable, ExecError> {
        let mut columns: Vec<String> = Vec::new();
        for t in [&leaf.subject, &leaf.object] {
            if let Some(v) = t.var() {
                if !columns.iter().any(|c| c == v) {
                    columns.push(v.to_string());
                }
            }
        }
        let mut out = BindingTable::new(columns);
        if leaf.empty {
            return Ok(out);
        }
        let sources = self.endpoint(&leaf.subject, leaf, left);
        let targets = self.endpoint(&leaf.object, leaf, left);
        self.stats.path_evaluations += 1;
        let pairs = match self.options.path_evaluation {
            PathEvaluation::Bfs => {
                let r = self
                    .graph
                    .eval_path_with(&sources, &targets, &leaf.path, self.options.parallelism)?;
                self.stats.nodes_visited += r.stats.nodes_visited;
                self.stats.edges_expanded += r.stats.edges_expanded;
                r.pairs
            }
            PathEvaluation::Joins { budget } => {
                let r = self.graph.eval_path_joins(&sources, &targets, &leaf.path, budget)?;
                self.stats.intermediate_rows += r.intermediate_rows;
                r.pairs
            }
        };
        let same_var = leaf.subject.var().is_some() && leaf.subject.var() == leaf.object.var();
        for (u, v) in pairs {
            let row = match (leaf.subject.var(), leaf.object.var()) {
                _ if same_var => {
                    if u != v {
                        continue;
                    }
                    vec![Some(u)]
                }
                (Some(_), Some(_)) => vec![Some(u), Some(v)],
                (Some(_), None) => vec![Some(u)],
                (None, Some(_)) => vec![Some(v)],
                (None, None) => vec![],
            };
            out.rows.push(row);
        }
        if out.columns.is_empty() {
            // a ground path either holds (one empty row) or not
            out.rows.truncate(1);
        }
        Ok(out)
    }
}
