//! Algebra plans: lowering, cost-based join ordering and execution.

mod cost;
mod exec;
mod order;
mod plan;

pub use cost::{
    binomial_mass, estimate_path_cardinality, path_cardinality_raw, raw_p, CostEstimate, CostModelParams,
    PClampPolicy, DEFAULT_L_MAX,
};
pub use exec::{execute, hash_join, BindingTable, ExecOptions, ExecStats, PathEvaluation};
pub use order::{Estimator, OrderMode};
pub use plan::{has_resolved_link, lower, PathLeaf, Plan, TripleLeaf};

use crate::error::RunError;
use crate::sparql::{parse_query, Prefixes};
use crate::store::DiskStore;
use crate::topology::TopologyGraph;

/// Everything that shapes how one query is planned and run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QueryOptions {
    pub mode: OrderMode,
    pub params: CostModelParams,
    pub exec: ExecOptions,
}

/// A finished query: result rows, the plan that produced them and its
/// work counters.
#[derive(Debug, Clone)]
pub struct QueryOutput {
    pub table: BindingTable,
    pub plan: Plan,
    pub stats: ExecStats,
}

/// Parses, lowers and orders a query against `store`'s dictionary and
/// statistics.
pub fn prepare(text: &str, prefixes: &Prefixes, store: &DiskStore, options: &QueryOptions) -> Result<Plan, RunError> {
    let query = parse_query(text, prefixes)?;
    let plan = lower(&query, store.dictionary());
    Ok(Estimator::new(store.catalog(), &options.params).order(&plan, options.mode))
}

/// Parses, plans and executes a query.
pub fn run_query(
    text: &str,
    prefixes: &Prefixes,
    store: &DiskStore,
    graph: &TopologyGraph,
    options: &QueryOptions,
) -> Result<QueryOutput, RunError> {
    let plan = prepare(text, prefixes, store, options)?;
    let (table, stats) = execute(&plan, store, graph, &options.exec)?;
    Ok(QueryOutput { table, plan, stats })
}
