//! Repeated timing of a query suite under each planning and evaluation mode.

use std::fmt::{self, Write as _};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::ingest::LoadReport;
use crate::planner::{run_query, CostModelParams, ExecOptions, OrderMode, PathEvaluation, QueryOptions};
use crate::sparql::Prefixes;
use crate::store::DiskStore;
use crate::topology::{Parallelism, TopologyGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BenchMode {
    CostBased,
    NoCE,
    /// Cost-based order, with path operands evaluated by iterated joins.
    JoinOnly,
}

impl BenchMode {
    pub const ALL: [BenchMode; 3] = [BenchMode::CostBased, BenchMode::NoCE, BenchMode::JoinOnly];
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMode::CostBased => "CostBased",
            BenchMode::NoCE => "NoCE",
            BenchMode::JoinOnly => "JoinOnly",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchQuery {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub runs: u32,
    pub params: CostModelParams,
    /// Row budget for join-based path evaluation; exceeding it fails the row.
    pub join_budget: Option<u64>,
    pub parallelism: Parallelism,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            runs: 10,
            params: CostModelParams::default(),
            join_budget: Some(50_000_000),
            parallelism: Parallelism::default(),
        }
    }
}

/// Averages over the runs of one query in one mode. Counters are the same
/// on every run, so they are reported once.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryRow {
    pub query_id: String,
    pub mode: BenchMode,
    pub wall_time_ms: f64,
    pub nodes_visited: u64,
    pub edges_expanded: u64,
    pub intermediate_rows: u64,
    pub result_rows: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl QueryRow {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LoadRow {
    pub dataset_id: String,
    pub load_time_ms: f64,
    pub disk_bytes: u64,
    /// Triples held by the in-memory graph.
    pub memory_resident_triples: u64,
}

impl LoadRow {
    pub fn new(dataset_id: impl Into<String>, report: &LoadReport, store: &DiskStore, graph: &TopologyGraph) -> Self {
        LoadRow {
            dataset_id: dataset_id.into(),
            load_time_ms: report.elapsed.as_secs_f64() * 1e3,
            disk_bytes: store.disk_bytes(),
            memory_resident_triples: graph.edge_count() as u64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchReport {
    pub loads: Vec<LoadRow>,
    pub queries: Vec<QueryRow>,
}

impl BenchReport {
    /// Query ids whose successful rows disagree on the result count.
    pub fn mode_mismatches(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for row in self.queries.iter().filter(|r| !r.failed()) {
            let differs = self
                .queries
                .iter()
                .any(|o| o.query_id == row.query_id && !o.failed() && o.result_rows != row.result_rows);
            if differs && !out.contains(&row.query_id.as_str()) {
                out.push(&row.query_id);
            }
        }
        out
    }

    /// Tab-separated tables: load rows, a blank line, then query rows.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("datasetId\tloadTimeMs\tdiskBytes\tmemoryResidentTriples\n");
        for l in &self.loads {
            let _ = writeln!(
                s,
                "{}\t{:.3}\t{}\t{}",
                l.dataset_id, l.load_time_ms, l.disk_bytes, l.memory_resident_triples
            );
        }
        s.push_str("\nqueryId\tmode\twallTimeMs\tnodesVisited\tedgesExpanded\tintermediateRows\tresultRows\tstatus\n");
        for q in &self.queries {
            let status = q.error.as_deref().map_or("ok".to_string(), |e| format!("failed: {e}"));
            let _ = writeln!(
                s,
                "{}\t{}\t{:.3}\t{}\t{}\t{}\t{}\t{}",
                q.query_id, q.mode, q.wall_time_ms, q.nodes_visited, q.edges_expanded, q.intermediate_rows, q.result_rows, status
            );
        }
        s
    }
}

fn options(mode: BenchMode, config: &BenchConfig) -> QueryOptions {
    let (order, path_evaluation) = match mode {
        BenchMode::CostBased => (OrderMode::CostBased, PathEvaluation::Bfs),
        BenchMode::NoCE => (OrderMode::NoCE, PathEvaluation::Bfs),
        BenchMode::JoinOnly => (OrderMode::CostBased, PathEvaluation::Joins { budget: config.join_budget }),
    };
    QueryOptions {
        mode: order,
        params: config.params,
        exec: ExecOptions {
            path_evaluation,
            parallelism: config.parallelism,
        },
    }
}

/// Runs every query `config.runs` times in each mode. A failing query is
/// recorded with its error and the suite moves on.
pub fn run_suite(
    store: &DiskStore,
    graph: &TopologyGraph,
    prefixes: &Prefixes,
    queries: &[BenchQuery],
    config: &BenchConfig,
) -> Vec<QueryRow> {
    let runs = config.runs.max(1);
    let mut rows = Vec::new();
    for q in queries {
        for mode in BenchMode::ALL {
            let opts = options(mode, config);
            let mut row = QueryRow {
                query_id: q.id.clone(),
                mode,
                wall_time_ms: 0.0,
                nodes_visited: 0,
                edges_expanded: 0,
                intermediate_rows: 0,
                result_rows: 0,
                error: None,
            };
            let mut total = 0.0;
            for _ in 0..runs {
                let started = Instant::now();
                match run_query(&q.text, prefixes, store, graph, &opts) {
                    Ok(out) => {
                        total += started.elapsed().as_secs_f64() * 1e3;
                        row.nodes_visited = out.stats.nodes_visited;
                        row.edges_expanded = out.stats.edges_expanded;
                        row.intermediate_rows = out.stats.intermediate_rows;
                        row.result_rows = out.table.len() as u64;
                    }
                    Err(e) => {
                        row.error = Some(e.to_string());
                        break;
                    }
                }
            }
            if row.error.is_none() {
                row.wall_time_ms = total / f64::from(runs);
            }
            rows.push(row);
        }
    }
    rows
}
