//! Benchmark runner on generated graphs.

use pathtriple_core::bench::{run_suite, BenchConfig, BenchMode, BenchQuery, BenchReport, QueryRow};
use pathtriple_core::ingest::{load_into, LoadedStore, ParseMode, PartitionConfig};
use pathtriple_core::sparql::default_prefixes;
use pathtriple_core::synth::{generate, SynthGraphSpec};

fn load(spec: &SynthGraphSpec) -> (tempfile::TempDir, LoadedStore) {
    let mut text = Vec::new();
    generate(spec, &mut text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let loaded = load_into(dir.path(), text.as_slice(), &PartitionConfig::default(), ParseMode::Strict, false).unwrap();
    (dir, loaded)
}

fn q(id: &str, text: &str) -> BenchQuery {
    BenchQuery { id: id.into(), text: text.into() }
}

fn config(runs: u32) -> BenchConfig {
    BenchConfig { runs, ..BenchConfig::default() }
}

#[test]
fn empty_suite_gives_no_rows() {
    let (_d, l) = load(&SynthGraphSpec::bibliographic(50, 1));
    assert!(run_suite(&l.store, &l.graph, &default_prefixes(), &[], &config(1)).is_empty());
}

#[test]
fn a_failing_query_is_marked_and_the_rest_still_run() {
    let (_d, l) = load(&SynthGraphSpec::bibliographic(50, 1));
    let suite = [q("bad", "SELECT ?x WHERE {"), q("good", "SELECT ?x WHERE { <ex:n0> knows+ ?x }")];
    let rows = run_suite(&l.store, &l.graph, &default_prefixes(), &suite, &config(2));
    assert_eq!(rows.len(), 6);
    assert!(rows[..3].iter().all(|r| r.failed() && r.query_id == "bad"));
    assert!(rows[3..].iter().all(|r| !r.failed() && r.query_id == "good"));
    let modes: Vec<BenchMode> = rows[3..].iter().map(|r| r.mode).collect();
    assert_eq!(modes, BenchMode::ALL);
}

#[test]
fn join_budget_failure_is_reported_not_fatal() {
    let (_d, l) = load(&SynthGraphSpec::bibliographic(300, 2));
    let cfg = BenchConfig { join_budget: Some(10), ..config(1) };
    let rows = run_suite(&l.store, &l.graph, &default_prefixes(), &[q("all", "SELECT * WHERE { ?a knows* ?b }")], &cfg);
    let join = rows.iter().find(|r| r.mode == BenchMode::JoinOnly).unwrap();
    assert!(join.error.as_deref().is_some_and(|e| e.contains("10")), "{join:?}");
    assert!(rows.iter().filter(|r| r.mode != BenchMode::JoinOnly).all(|r| !r.failed()));
}

#[test]
fn same_seed_same_counts_and_modes_agree() {
    let suite = [
        q("reach", "SELECT ?x WHERE { <ex:n1> knows* ?x }"),
        q("two-hop", "SELECT ?a ?c WHERE { ?a knows/knows ?c . ?a a <ex:Person> }"),
        q("attr", "SELECT ?x ?v WHERE { <ex:n2> knows+ ?x . ?x <ex:attr1> ?v }"),
    ];
    let run = || {
        let (_d, l) = load(&SynthGraphSpec::social(400, 9));
        run_suite(&l.store, &l.graph, &default_prefixes(), &suite, &config(1))
    };
    let counts = |rows: &[QueryRow]| {
        rows.iter()
            .map(|r| (r.query_id.clone(), r.mode, r.result_rows, r.nodes_visited, r.edges_expanded))
            .collect::<Vec<_>>()
    };
    let report = BenchReport { loads: vec![], queries: run() };
    assert_eq!(counts(&report.queries), counts(&run()));
    assert!(report.mode_mismatches().is_empty());
    assert!(report.queries.iter().all(|r| !r.failed()));
    let tsv = report.to_tsv();
    assert_eq!(tsv.lines().count(), 1 + 1 + 1 + 9);
}

#[test]
fn traversal_expands_fewer_edges_than_joins_produce_rows() {
    let (_d, l) = load(&SynthGraphSpec::bibliographic(10_000, 42));
    assert_eq!(l.graph.edge_count(), 30_000);
    let rows = run_suite(
        &l.store,
        &l.graph,
        &default_prefixes(),
        &[q("knows-star", "SELECT ?x WHERE { <ex:n0> knows* ?x }")],
        &config(1),
    );
    let bfs = rows.iter().find(|r| r.mode == BenchMode::CostBased).unwrap();
    let joins = rows.iter().find(|r| r.mode == BenchMode::JoinOnly).unwrap();
    assert!(!joins.failed(), "{joins:?}");
    assert_eq!(bfs.result_rows, joins.result_rows);
    assert!(bfs.edges_expanded <= 30_000);
    assert!(bfs.edges_expanded < joins.intermediate_rows, "{bfs:?} vs {joins:?}");
}

#[test]
fn generated_graphs_hit_their_topology_share() {
    for (spec, target) in [(SynthGraphSpec::social(2000, 5), 0.26), (SynthGraphSpec::bibliographic(2000, 5), 0.25)] {
        let (_d, l) = load(&spec);
        let ratio = l.report.topology_ratio();
        assert!((ratio - target).abs() < 0.01, "{ratio} vs {target}");
        assert!((ratio - spec.design_ratio()).abs() < 1e-12);
        assert_eq!(l.graph.edge_count() as u64, spec.edge_target());
    }
}
