//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use pathtriple_core::ingest::{classify, load_into, LoadedStore, ParseMode, PartitionConfig, RDF_TYPE};
use pathtriple_core::planner::{
    estimate_path_cardinality, path_cardinality_raw, prepare, raw_p, run_query, CostModelParams, Estimator,
    OrderMode, PClampPolicy, QueryOptions,
};
use pathtriple_core::sparql::default_prefixes;
use pathtriple_core::store::{DiskStore, IndexOrder, PatternTerm, StoreCatalog, TriplePattern};
use pathtriple_core::synth::{generate, SynthGraphSpec};
use pathtriple_core::topology::{NodeSpec, PathExpr};
use pathtriple_core::{Dictionary, Term, TermId, Triple, TripleClass};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::graphs::{label, random_endpoint, RandGraph};
use common::matrix::shapes;
use common::query::{brute_force, decode, RandQuery, RandStore};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn load_text(dir: &tempfile::TempDir, text: &str) -> LoadedStore {
    load_into(dir.path(), text.as_bytes(), &PartitionConfig::default(), ParseMode::Strict, false).unwrap()
}

fn figure1_text() -> String {
    std::fs::read_to_string(common::fixture("figure1.nt")).unwrap()
}

fn decoded_rows(loaded: &LoadedStore, opts: &QueryOptions, text: &str) -> Result<BTreeSet<Vec<String>>, String> {
    let out = run_query(text, &default_prefixes(), &loaded.store, &loaded.graph, opts).map_err(|e| e.to_string())?;
    let dict = loaded.store.dictionary();
    Ok(out
        .table
        .rows
        .iter()
        .map(|r| r.iter().map(|c| dict.resolve(c.unwrap()).unwrap().display_value()).collect())
        .collect())
}

fn figure1_end_to_end() -> Outcome {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let input = BufReader::new(File::open(common::fixture("figure1.nt")).unwrap());
    let loaded = load_into(dir.path(), input, &PartitionConfig::default(), ParseMode::Strict, false).unwrap();
    let query = std::fs::read_to_string(common::fixture("figure1.rq")).unwrap();
    let expected: BTreeSet<Vec<String>> = BTreeSet::from([vec!["ex:P1".to_string(), "ex:P3".to_string()]]);
    for mode in [OrderMode::CostBased, OrderMode::NoCE] {
        let opts = QueryOptions { mode, ..QueryOptions::default() };
        let rows = decoded_rows(&loaded, &opts, &query)?;
        ensure!(rows == expected, "{mode:?} returned {rows:?}");
    }
    let elapsed = started.elapsed();
    ensure!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    Ok(format!("{{(ex:P1, ex:P3)}} in both modes, {:.1} ms", elapsed.as_secs_f64() * 1e3))
}

fn path_semantics_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let trees = shapes(3);
    let mut checks = 0u64;
    for g in 0..200 {
        let rg = RandGraph::random(&mut rng, 200, 3);
        let built = rg.build();
        for shape in &trees {
            let expr = label(shape, rg.n_preds, &mut rng);
            let src = random_endpoint(&mut rng, rg.n);
            let tgt = random_endpoint(&mut rng, rg.n);
            let want = rg.oracle(&expr, src.as_ref(), tgt.as_ref());
            let got = built
                .graph
                .eval_path(&built.spec(src.as_ref()), &built.spec(tgt.as_ref()), &built.pattern(&expr))
                .map_err(|e| e.to_string())?;
            ensure!(
                built.to_indices(&got.pairs) == want,
                "graph {g} ({} nodes), pattern {expr:?}, sources {src:?}, targets {tgt:?}",
                rg.n
            );
            checks += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    Ok(format!("{checks} evaluations over 200 graphs and {} shapes, 0 mismatches, {elapsed:.1?}", trees.len()))
}

fn full_query_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut nonempty = 0;
    let mut total = 0;
    for s in 0..50 {
        let store = RandStore::random(&mut rng);
        let dir = tempfile::tempdir().unwrap();
        let loaded = load_text(&dir, &store.ntriples());
        for _ in 0..20 {
            let q = RandQuery::random(&mut rng, &store);
            let text = q.text();
            let want = brute_force(&store, &q);
            for mode in [OrderMode::CostBased, OrderMode::NoCE] {
                let opts = QueryOptions { mode, ..QueryOptions::default() };
                let out = run_query(&text, &default_prefixes(), &loaded.store, &loaded.graph, &opts)
                    .map_err(|e| format!("store {s}: {text}: {e}"))?;
                let got = decode(&out.table, loaded.store.dictionary());
                ensure!(got == want, "store {s}, {mode:?}: {text}\nexpected {want:?}\ngot {got:?}");
            }
            total += 1;
            nonempty += usize::from(!want.is_empty());
        }
    }
    Ok(format!("{total} queries on 50 stores, both modes, 0 mismatches ({nonempty} with non-empty answers)"))
}

fn complexity_witness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut runs = 0;
    for _ in 0..200 {
        let rg = RandGraph::random(&mut rng, 200, 3);
        let built = rg.build();
        let (v, e) = (built.graph.node_count() as u64, built.graph.edge_count() as u64);
        let in_graph: Vec<usize> = (0..rg.n).filter(|&i| rg.graph_nodes()[i]).collect();
        for _ in 0..5 {
            let Some(&start) = in_graph.choose(&mut rng) else { break };
            let p = Some(rng.gen_range(0..rg.n_preds));
            let link = PathExpr::link(p);
            for expr in [
                PathExpr::star(link.clone()),
                PathExpr::plus(link.clone()),
                PathExpr::star(PathExpr::inverse(link.clone())),
            ] {
                let r = built
                    .graph
                    .eval_path(&NodeSpec::one(built.nodes[start]), &NodeSpec::Unbound, &built.pattern(&expr))
                    .unwrap();
                ensure!(
                    r.stats.edges_expanded <= e && r.stats.nodes_visited <= v,
                    "{expr:?} from {start}: {:?} with |V|={v} |E|={e}",
                    r.stats
                );
                runs += 1;
            }
        }
    }

    let spec = SynthGraphSpec {
        n_nodes: 10_000,
        target_out_degree: 3.0,
        n_topology_predicates: 1,
        attribute_triples_per_entity: 1,
        seed: 4,
    };
    let mut data = Vec::new();
    generate(&spec, &mut data).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let loaded = load_into(dir.path(), data.as_slice(), &PartitionConfig::default(), ParseMode::Strict, false).unwrap();
    ensure!(loaded.graph.edge_count() == 30_000, "generated {} edges", loaded.graph.edge_count());
    let dict = loaded.store.dictionary();
    let knows = Some(dict.lookup(&Term::iri("ex:knows")).unwrap());
    let hop = || PathExpr::link(knows);
    let four = PathExpr::seq(PathExpr::seq(PathExpr::seq(hop(), hop()), hop()), hop());
    let src = NodeSpec::one(dict.lookup(&Term::iri("ex:n0")).unwrap());
    let bfs = loaded.graph.eval_path(&src, &NodeSpec::Unbound, &four).unwrap();
    let joins = loaded.graph.eval_path_joins(&src, &NodeSpec::Unbound, &four, None).unwrap();
    ensure!(!bfs.pairs.is_empty(), "nothing reachable in four hops");
    ensure!(bfs.pairs == joins.pairs, "join baseline disagrees with traversal");
    let ratio = joins.intermediate_rows as f64 / bfs.stats.edges_expanded as f64;
    ensure!(
        ratio >= 10.0,
        "join rows {} vs edges expanded {}",
        joins.intermediate_rows,
        bfs.stats.edges_expanded
    );
    Ok(format!(
        "{runs} closure runs within |V|,|E|; 4-hop on 10k/30k: {} join rows vs {} edges expanded ({ratio:.0}x)",
        joins.intermediate_rows, bfs.stats.edges_expanded
    ))
}

fn estimator_exactness() -> Outcome {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/oracle/eq1_sweep.csv");
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let rel = |got: f64, want: f64| if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
    let mut worst = 0.0f64;
    let mut points = 0;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (s, o, l): (f64, f64, u32) = (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap());
        let c: f64 = f[3].parse().unwrap();
        let (v, e): (u64, u64) = (f[4].parse().unwrap(), f[5].parse().unwrap());
        let policy = match f[6] {
            "one" => PClampPolicy::ClampToOne,
            m => PClampPolicy::ClampTo(m.parse().unwrap()),
        };
        let (want_raw, want): (f64, f64) = (f[7].parse().unwrap(), f[8].parse().unwrap());
        let catalog = StoreCatalog {
            n_entity_nodes: v,
            n_topology_edges: e,
            ..StoreCatalog::default()
        };
        let params = CostModelParams::new(c, 6, policy).unwrap();
        let est = |s: f64, o: f64, l: u32| estimate_path_cardinality(s, o, l, &catalog, &params).unwrap();
        let raw = path_cardinality_raw(s, o, l, v as f64, c, policy.apply(raw_p(&catalog))).unwrap();
        let got = est(s, o, l);
        worst = worst.max(rel(raw, want_raw)).max(rel(got, want));
        ensure!(rel(raw, want_raw) <= 1e-9 && rel(got, want) <= 1e-9, "{line}: got {raw} / {got}");
        ensure!(
            est(s + 1.0, o, l) >= got && est(s, o + 1.0, l) >= got && est(s, o, l + 1) >= got,
            "not monotone at {line}"
        );
        points += 1;
    }
    ensure!(points == 200, "sweep has {points} points");
    Ok(format!("{points} points, worst relative error {worst:.2e}, monotone in s, o and l"))
}

fn partition_correctness() -> Outcome {
    let subjects = [Term::iri("ex:s"), Term::blank("b0")];
    let predicates = ["ex:knows", RDF_TYPE, "ex:unlisted"];
    let objects = [
        Term::iri("ex:o"),
        Term::blank("b1"),
        Term::literal("x"),
        Term::typed_literal("1", "http://www.w3.org/2001/XMLSchema#integer"),
        Term::lang_literal("x", "en"),
    ];
    let configs = [
        PartitionConfig::default(),
        PartitionConfig::empty(TripleClass::Topology),
        PartitionConfig::empty(TripleClass::Attribute),
        PartitionConfig::new(["ex:knows".to_string()], [], TripleClass::Topology).unwrap(),
    ];
    let mut combos = 0;
    for cfg in &configs {
        for s in &subjects {
            for p in predicates {
                for o in &objects {
                    let mut dict = Dictionary::new();
                    let t = Triple::new(
                        dict.intern(s.clone()).unwrap(),
                        dict.intern(Term::iri(p)).unwrap(),
                        dict.intern(o.clone()).unwrap(),
                    );
                    let class = classify(&t, cfg, &dict);
                    ensure!(!(o.is_literal() && class == TripleClass::Topology), "{s} {p} {o} classified topology");
                    ensure!(class == cfg.classify_terms(p, o), "{s} {p} {o}: classifiers disagree");
                    combos += 1;
                }
            }
        }
    }
    let mut ratios = Vec::new();
    for (spec, target) in [(SynthGraphSpec::social(5_000, 6), 0.26), (SynthGraphSpec::bibliographic(5_000, 6), 0.25)] {
        let mut data = Vec::new();
        generate(&spec, &mut data).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let loaded = load_into(dir.path(), data.as_slice(), &PartitionConfig::default(), ParseMode::Strict, false).unwrap();
        let ratio = loaded.report.topology_ratio();
        ensure!((ratio - target).abs() <= 0.02, "ratio {ratio:.4} vs target {target}");
        ensure!(
            (loaded.store.catalog().topology_ratio() - ratio).abs() < 1e-12,
            "catalog and report ratios differ"
        );
        ratios.push(format!("{ratio:.4} (target {target})"));
    }
    Ok(format!("{combos} term-kind combinations; ratios {}", ratios.join(", ")))
}

fn random_ntriples(rng: &mut impl Rng, n: usize) -> String {
    let mut set = BTreeSet::new();
    let preds = ["ex:knows", "ex:follows", "ex:worksFor", "ex:name", "ex:age", RDF_TYPE];
    while set.len() < n {
        let s = format!("<ex:e{}>", rng.gen_range(0..600));
        let p = preds.choose(rng).unwrap();
        let o = match *p {
            "ex:name" => format!("\"n{}\"", rng.gen_range(0..300)),
            "ex:age" => format!("\"{}\"^^<http://www.w3.org/2001/XMLSchema#integer>", rng.gen_range(0..90)),
            RDF_TYPE => format!("<ex:C{}>", rng.gen_range(0..5)),
            _ => format!("<ex:e{}>", rng.gen_range(0..600)),
        };
        set.insert(format!("{s} <{p}> {o} .\n"));
    }
    set.into_iter().collect()
}

fn store_integrity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut matches = 0;
    for round in 0..3 {
        let text = random_ntriples(&mut rng, 10_000);
        let dir = tempfile::tempdir().unwrap();
        let loaded = load_text(&dir, &text);
        let catalog = loaded.store.catalog().clone();
        drop(loaded);
        let store = DiskStore::open(dir.path()).map_err(|e| e.to_string())?;
        ensure!(*store.catalog() == catalog, "round {round}: catalog changed on reopen");
        ensure!(store.len() == 10_000, "round {round}: {} triples", store.len());

        let dict = store.dictionary();
        let expected: BTreeSet<Triple> = text
            .lines()
            .map(|l| {
                let st = pathtriple_core::ingest::parse_line(l, 1).unwrap().unwrap();
                Triple::new(
                    dict.lookup(&st.subject).unwrap(),
                    dict.lookup(&st.predicate).unwrap(),
                    dict.lookup(&st.object).unwrap(),
                )
            })
            .collect();
        for order in IndexOrder::ALL {
            let idx = store.index(order);
            let got: BTreeSet<Triple> = (0..idx.len()).map(|i| idx.triple(i)).collect();
            ensure!(got == expected, "round {round}: {order:?} differs from input");
        }

        let all: Vec<Triple> = expected.iter().copied().collect();
        let absent = TermId(u64::MAX >> 1);
        for shape in 0..8u8 {
            for k in 0..25 {
                let t = all[rng.gen_range(0..all.len())];
                let pick = |bit: u8, id: TermId| {
                    if shape & bit == 0 {
                        PatternTerm::var_name("v")
                    } else if k == 0 {
                        PatternTerm::Bound(absent)
                    } else {
                        PatternTerm::Bound(id)
                    }
                };
                let pat = TriplePattern::new(pick(1, t.s), pick(2, t.p), pick(4, t.o));
                let mut got: Vec<Triple> = store.match_pattern(&pat).collect();
                got.sort();
                let want: Vec<Triple> = all.iter().copied().filter(|x| pat.matches(x)).collect();
                ensure!(got == want, "round {round}: pattern {pat:?}");
                matches += 1;
            }
        }
    }
    Ok(format!("3 loads of 10,000 triples: catalog survives reopen, SPO/POS/OSP agree, {matches} pattern checks"))
}

fn leaf_order(explain: &str) -> Vec<&str> {
    explain
        .lines()
        .map(str::trim_start)
        .filter(|l| l.starts_with("OpTriple") || l.starts_with("OpPath"))
        .map(|l| if l.starts_with("OpPath") { "path" } else { "triple" })
        .collect()
}

fn leaf_card(explain: &str, op: &str) -> f64 {
    let line = explain.lines().map(str::trim_start).find(|l| l.starts_with(op)).unwrap();
    let start = line.find("card=").unwrap() + 5;
    line[start..].split_whitespace().next().unwrap().parse().unwrap()
}

fn noce_ablation() -> Outcome {
    let mut text = figure1_text();
    for p in 1..=4 {
        for k in 0..40 {
            text.push_str(&format!("<ex:P{p}> <ex:hasTag> \"tag{k}\" .\n"));
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let loaded = load_text(&dir, &text);
    let query = "SELECT ?p ?t WHERE { ?p hasTag ?t . <ex:P1> knows* ?p }";
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for mode in [OrderMode::CostBased, OrderMode::NoCE] {
        let opts = QueryOptions { mode, ..QueryOptions::default() };
        let plan = prepare(query, &default_prefixes(), &loaded.store, &opts).map_err(|e| e.to_string())?;
        let explain = Estimator::new(loaded.store.catalog(), &opts.params).explain(&plan);
        let order = leaf_order(&explain);
        let path_last = order.last() == Some(&"path");
        match mode {
            OrderMode::NoCE => ensure!(path_last, "NoCE order {order:?}\n{explain}"),
            OrderMode::CostBased => {
                ensure!(
                    leaf_card(&explain, "OpPath") < leaf_card(&explain, "OpTriple"),
                    "path estimate is not below the scan\n{explain}"
                );
                ensure!(!path_last, "CostBased order {order:?}\n{explain}");
            }
        }
        summary.push(format!("{mode:?} {}", order.join(",")));
        rows.push(decoded_rows(&loaded, &opts, query)?);
    }
    ensure!(rows[0] == rows[1], "modes disagree");
    ensure!(rows[0].len() == 160, "{} rows", rows[0].len());
    Ok(format!("{}; identical {} rows", summary.join("; "), rows[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 figure-1 end-to-end", figure1_end_to_end),
        ("2 path-semantics oracle", path_semantics_oracle),
        ("3 full-query oracle", full_query_oracle),
        ("4 complexity witness", complexity_witness),
        ("5 estimator exactness", estimator_exactness),
        ("6 partition correctness", partition_correctness),
        ("7 store integrity", store_integrity),
        ("8 NoCE ablation", noce_ablation),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {name}: {reason}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
