//! Random small stores and queries, and an evaluator that tries every
//! assignment of store terms to query variables.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use pathtriple_core::ingest::RDF_TYPE;
use pathtriple_core::planner::BindingTable;
use pathtriple_core::topology::PathExpr;
use pathtriple_core::{Dictionary, Term};
use rand::seq::SliceRandom;
use rand::Rng;

use super::matrix::{path_relation, shapes, BitMatrix};

pub const TOPOLOGY_PREDICATES: [&str; 2] = ["ex:knows", "ex:follows"];

pub type Row = BTreeMap<String, String>;

#[derive(Debug, Clone)]
pub struct RandStore {
    pub nodes: Vec<Term>,
    pub triples: Vec<(Term, Term, Term)>,
}

impl RandStore {
    pub fn random(rng: &mut impl Rng) -> Self {
        let k: usize = rng.gen_range(2..=8);
        let nodes: Vec<Term> = (0..k).map(|i| Term::iri(format!("ex:n{i}"))).collect();
        let mut set = BTreeSet::new();
        let m = (k as f64 * rng.gen_range(0.5..2.5)) as usize;
        for _ in 0..m {
            let p = TOPOLOGY_PREDICATES.choose(rng).unwrap();
            set.insert((nodes.choose(rng).unwrap().clone(), Term::iri(*p), nodes.choose(rng).unwrap().clone()));
        }
        for n in &nodes {
            if rng.gen_bool(0.6) {
                let v = rng.gen_range(0..k.div_ceil(2));
                set.insert((n.clone(), Term::iri("ex:name"), Term::literal(format!("name{v}"))));
            }
            if rng.gen_bool(0.5) {
                set.insert((n.clone(), Term::iri(RDF_TYPE), Term::iri("ex:Person")));
            }
        }
        RandStore {
            nodes,
            triples: set.into_iter().collect(),
        }
    }

    pub fn ntriples(&self) -> String {
        self.triples.iter().map(|(s, p, o)| format!("{s} {p} {o} .\n")).collect()
    }

    fn literals(&self) -> Vec<Term> {
        let set: BTreeSet<Term> = self.triples.iter().filter(|t| t.2.is_literal()).map(|t| t.2.clone()).collect();
        set.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QTerm {
    Var(String),
    Const(Term),
}

impl QTerm {
    fn text(&self) -> String {
        match self {
            QTerm::Var(v) => format!("?{v}"),
            QTerm::Const(t) => t.to_string(),
        }
    }

    fn var(&self) -> Option<&str> {
        match self {
            QTerm::Var(v) => Some(v),
            QTerm::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum QPattern {
    Triple(QTerm, QTerm, QTerm),
    Path(QTerm, PathExpr<String>, QTerm),
}

#[derive(Debug, Clone)]
pub struct RandQuery {
    pub distinct: bool,
    /// `None` is `SELECT *`.
    pub projection: Option<Vec<String>>,
    pub patterns: Vec<QPattern>,
}

fn path_text(e: &PathExpr<String>) -> String {
    match e {
        PathExpr::Link(iri) => format!("<{iri}>"),
        PathExpr::Inverse(x) => format!("^({})", path_text(x)),
        PathExpr::Sequence(a, b) => format!("({}/{})", path_text(a), path_text(b)),
        PathExpr::Alternation(a, b) => format!("({}|{})", path_text(a), path_text(b)),
        PathExpr::ZeroOrMore(x) => format!("({})*", path_text(x)),
        PathExpr::OneOrMore(x) => format!("({})+", path_text(x)),
        PathExpr::ZeroOrOne(x) => format!("({})?", path_text(x)),
    }
}

impl RandQuery {
    pub fn vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.patterns {
            let terms: Vec<&QTerm> = match p {
                QPattern::Triple(s, p, o) => vec![s, p, o],
                QPattern::Path(s, _, o) => vec![s, o],
            };
            for v in terms.into_iter().filter_map(QTerm::var) {
                if !out.iter().any(|x| x == v) {
                    out.push(v.to_string());
                }
            }
        }
        out
    }

    pub fn projected(&self) -> Vec<String> {
        self.projection.clone().unwrap_or_else(|| self.vars())
    }

    pub fn text(&self) -> String {
        let head = match &self.projection {
            None => "*".to_string(),
            Some(vs) => vs.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" "),
        };
        let body: Vec<String> = self
            .patterns
            .iter()
            .map(|p| match p {
                QPattern::Triple(s, p, o) => format!("{} {} {}", s.text(), p.text(), o.text()),
                QPattern::Path(s, e, o) => format!("{} {} {}", s.text(), path_text(e), o.text()),
            })
            .collect();
        let distinct = if self.distinct { "DISTINCT " } else { "" };
        format!("SELECT {distinct}{head} WHERE {{ {} }}", body.join(" . "))
    }

    pub fn random(rng: &mut impl Rng, store: &RandStore) -> Self {
        const VARS: [&str; 4] = ["a", "b", "c", "d"];
        let node = |rng: &mut dyn rand::RngCore| -> QTerm {
            if rng.gen_bool(0.7) {
                QTerm::Var(VARS.choose(rng).unwrap().to_string())
            } else if rng.gen_bool(0.1) {
                QTerm::Const(Term::iri("ex:absent"))
            } else {
                QTerm::Const(store.nodes.choose(rng).unwrap().clone())
            }
        };
        let literals = store.literals();
        let trees = shapes(3);
        let n = rng.gen_range(1..=4);
        let path_at = rng.gen_range(0..n);
        let mut patterns = Vec::new();
        for i in 0..n {
            if i == path_at || rng.gen_bool(0.25) {
                let shape = trees.choose(rng).unwrap();
                let expr = shape.map_links(&mut |_| {
                    if rng.gen_bool(0.05) {
                        "ex:nope".to_string()
                    } else {
                        TOPOLOGY_PREDICATES.choose(rng).unwrap().to_string()
                    }
                });
                patterns.push(QPattern::Path(node(rng), expr, node(rng)));
                continue;
            }
            let s = node(rng);
            let roll = rng.gen_range(0..10);
            let (p, o) = match roll {
                0 => (QTerm::Var(VARS.choose(rng).unwrap().to_string()), node(rng)),
                1 | 2 => {
                    let o = if rng.gen_bool(0.6) || literals.is_empty() {
                        QTerm::Var(VARS.choose(rng).unwrap().to_string())
                    } else {
                        QTerm::Const(literals.choose(rng).unwrap().clone())
                    };
                    (QTerm::Const(Term::iri("ex:name")), o)
                }
                3 => {
                    let o = if rng.gen_bool(0.5) {
                        QTerm::Var(VARS.choose(rng).unwrap().to_string())
                    } else {
                        QTerm::Const(Term::iri("ex:Person"))
                    };
                    (QTerm::Const(Term::iri(RDF_TYPE)), o)
                }
                _ => (QTerm::Const(Term::iri(*TOPOLOGY_PREDICATES.choose(rng).unwrap())), node(rng)),
            };
            patterns.push(QPattern::Triple(s, p, o));
        }
        let mut q = RandQuery {
            distinct: rng.gen_bool(0.5),
            projection: None,
            patterns,
        };
        let vars = q.vars();
        if !vars.is_empty() && rng.gen_bool(0.7) {
            let picked: Vec<String> = vars.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
            q.projection = Some(if picked.is_empty() { vec![vars[0].clone()] } else { picked });
        }
        q
    }
}

/// Set of solutions, each a map from projected variable to the N-Triples
/// form of its value.
pub fn brute_force(store: &RandStore, q: &RandQuery) -> BTreeSet<Row> {
    let domain: Vec<Term> = {
        let mut set = BTreeSet::new();
        for (s, p, o) in &store.triples {
            set.insert(s.clone());
            set.insert(p.clone());
            set.insert(o.clone());
        }
        set.into_iter().collect()
    };
    let pos: HashMap<&Term, usize> = domain.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let triples: HashSet<(usize, usize, usize)> =
        store.triples.iter().map(|(s, p, o)| (pos[s], pos[p], pos[o])).collect();

    let topo: Vec<&(Term, Term, Term)> =
        store.triples.iter().filter(|t| TOPOLOGY_PREDICATES.iter().any(|p| t.1 == Term::iri(*p))).collect();
    let mut in_graph = vec![false; domain.len()];
    for (s, _, o) in &topo {
        in_graph[pos[s]] = true;
        in_graph[pos[o]] = true;
    }
    let adj: Vec<BitMatrix> = TOPOLOGY_PREDICATES
        .iter()
        .map(|p| {
            let mut m = BitMatrix::new(domain.len());
            for (s, _, o) in topo.iter().filter(|t| t.1 == Term::iri(*p)) {
                m.set(pos[s], pos[o]);
            }
            m
        })
        .collect();

    let vars = q.vars();
    let var_at: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();

    // A constant absent from the store can never be matched.
    enum Slot {
        Var(usize),
        Fixed(usize),
        Missing,
    }
    let slot = |t: &QTerm| match t {
        QTerm::Var(v) => Slot::Var(var_at[v.as_str()]),
        QTerm::Const(c) => pos.get(c).map_or(Slot::Missing, |&i| Slot::Fixed(i)),
    };
    enum Check {
        Triple([Slot; 3]),
        Path(Slot, BitMatrix, Slot),
    }
    let checks: Vec<(usize, Check)> = q
        .patterns
        .iter()
        .map(|p| {
            let (check, terms): (Check, Vec<&QTerm>) = match p {
                QPattern::Triple(s, p, o) => (Check::Triple([slot(s), slot(p), slot(o)]), vec![s, p, o]),
                QPattern::Path(s, e, o) => {
                    let mut mask = in_graph.clone();
                    for t in [s, o] {
                        if let QTerm::Const(c) = t {
                            if let Some(&i) = pos.get(c) {
                                mask[i] = true;
                            }
                        }
                    }
                    let labelled = e.map_links(&mut |iri| TOPOLOGY_PREDICATES.iter().position(|p| p == iri));
                    let rel = path_relation(&labelled, &adj, &BitMatrix::diagonal(&mask));
                    (Check::Path(slot(s), rel, slot(o)), vec![s, o])
                }
            };
            let level = terms.iter().filter_map(|t| t.var()).map(|v| var_at[v] + 1).max().unwrap_or(0);
            (level, check)
        })
        .collect();

    let value = |s: &Slot, a: &[usize]| match s {
        Slot::Var(i) => Some(a[*i]),
        Slot::Fixed(i) => Some(*i),
        Slot::Missing => None,
    };
    let holds = |c: &Check, a: &[usize]| match c {
        Check::Triple([s, p, o]) => match (value(s, a), value(p, a), value(o, a)) {
            (Some(s), Some(p), Some(o)) => triples.contains(&(s, p, o)),
            _ => false,
        },
        Check::Path(s, rel, o) => match (value(s, a), value(o, a)) {
            (Some(s), Some(o)) => rel.get(s, o),
            _ => false,
        },
    };

    let projected = q.projected();
    let mut out = BTreeSet::new();
    let mut assignment = vec![0usize; vars.len()];
    fn search(
        depth: usize,
        assignment: &mut Vec<usize>,
        domain_len: usize,
        ok: &dyn Fn(usize, &[usize]) -> bool,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if !ok(depth, assignment) {
            return;
        }
        if depth == assignment.len() {
            emit(assignment);
            return;
        }
        for v in 0..domain_len {
            assignment[depth] = v;
            search(depth + 1, assignment, domain_len, ok, emit);
        }
    }
    let ok = |level: usize, a: &[usize]| checks.iter().filter(|(l, _)| *l == level).all(|(_, c)| holds(c, a));
    let mut emit = |a: &[usize]| {
        let row: Row = projected.iter().map(|v| (v.clone(), domain[a[var_at[v.as_str()]]].to_string())).collect();
        out.insert(row);
    };
    search(0, &mut assignment, domain.len(), &ok, &mut emit);
    out
}

/// Result rows as the same kind of set the brute-force evaluator returns.
pub fn decode(table: &BindingTable, dict: &Dictionary) -> BTreeSet<Row> {
    table
        .rows
        .iter()
        .map(|r| {
            table
                .columns
                .iter()
                .zip(r)
                .map(|(c, v)| (c.clone(), v.map_or("UNBOUND".to_string(), |id| dict.resolve(id).unwrap().to_string())))
                .collect()
        })
        .collect()
}
