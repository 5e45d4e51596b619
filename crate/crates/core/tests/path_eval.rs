//! Path evaluation against the boolean-matrix oracle, the join baseline and
//! the sequential scheduler.

mod common;

use std::collections::BTreeSet;

use pathtriple_core::topology::{NodeSpec, Parallelism, PathExpr};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::graphs::{label, random_endpoint, RandGraph};
use common::matrix::shapes;

#[test]
fn shape_enumeration_counts() {
    assert_eq!(shapes(1).len(), 1);
    assert_eq!(shapes(2).len(), 7);
    assert_eq!(shapes(3).len(), 127);
}

fn expr() -> impl Strategy<Value = PathExpr<()>> {
    Just(PathExpr::link(())).prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(PathExpr::inverse),
            inner.clone().prop_map(PathExpr::star),
            inner.clone().prop_map(PathExpr::plus),
            inner.clone().prop_map(PathExpr::opt),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PathExpr::seq(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| PathExpr::alt(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn deep_expressions_match_the_oracle(shape in expr(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rg = RandGraph::random(&mut rng, 40, 3);
        let built = rg.build();
        let e = label(&shape, rg.n_preds, &mut rng);
        let src = random_endpoint(&mut rng, rg.n);
        let tgt = random_endpoint(&mut rng, rg.n);
        let want = rg.oracle(&e, src.as_ref(), tgt.as_ref());
        let got = built.graph.eval_path(&built.spec(src.as_ref()), &built.spec(tgt.as_ref()), &built.pattern(&e)).unwrap();
        prop_assert_eq!(built.to_indices(&got.pairs), want);
    }

    #[test]
    fn join_baseline_agrees_with_bfs(shape in expr(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rg = RandGraph::random(&mut rng, 25, 2);
        let built = rg.build();
        let e = built.pattern(&label(&shape, rg.n_preds, &mut rng));
        let src = built.spec(random_endpoint(&mut rng, rg.n).as_ref());
        let tgt = built.spec(random_endpoint(&mut rng, rg.n).as_ref());
        let bfs = built.graph.eval_path(&src, &tgt, &e).unwrap();
        let joins = built.graph.eval_path_joins(&src, &tgt, &e, None).unwrap();
        prop_assert_eq!(bfs.pairs, joins.pairs);
    }

    #[test]
    fn scheduling_does_not_change_answers(shape in expr(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rg = RandGraph::random(&mut rng, 120, 3);
        let built = rg.build();
        let e = built.pattern(&label(&shape, rg.n_preds, &mut rng));
        let src = built.spec(random_endpoint(&mut rng, rg.n).as_ref());
        let seq = built.graph.eval_path_with(&src, &NodeSpec::Unbound, &e, Parallelism::Sequential).unwrap();
        let par = built.graph.eval_path_with(&src, &NodeSpec::Unbound, &e, Parallelism::Parallel).unwrap();
        prop_assert_eq!(&seq.pairs, &par.pairs);
        prop_assert_eq!(seq.stats(), par.stats());
    }
}

#[test]
fn closure_counters_stay_within_graph_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let rg = RandGraph::random(&mut rng, 100, 2);
        let built = rg.build();
        let (v, e) = (built.graph.node_count() as u64, built.graph.edge_count() as u64);
        for p in 0..rg.n_preds {
            for start in [0, rg.n / 2, rg.n - 1] {
                let src = built.spec(Some(&BTreeSet::from([start])));
                for pat in [PathExpr::star(PathExpr::link(Some(p))), PathExpr::plus(PathExpr::inverse(PathExpr::link(Some(p))))] {
                    let s = built.graph.eval_path(&src, &NodeSpec::Unbound, &built.pattern(&pat)).unwrap().stats();
                    assert!(s.nodes_visited <= v.max(1), "{s:?} on |V|={v}");
                    assert!(s.edges_expanded <= e, "{s:?} on |E|={e}");
                }
            }
        }
    }
}
