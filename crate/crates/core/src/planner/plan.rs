//! Algebra operator tree and lowering from the query AST.

use std::collections::BTreeSet;

use crate::dictionary::Dictionary;
use crate::sparql::{Node, Pattern, Query};
use crate::store::{PatternTerm, TriplePattern};
use crate::term::{Term, TermId};
use crate::topology::{PathExpr, PathPattern};

#[derive(Debug, Clone, PartialEq)]
pub struct TripleLeaf {
    pub pattern: TriplePattern,
    /// Source text, for explain output.
    pub text: String,
    /// A constant is not in the dictionary, so nothing can match.
    pub empty: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathLeaf {
    pub subject: PatternTerm,
    pub path: PathPattern,
    pub object: PatternTerm,
    pub text: String,
    /// An endpoint constant is not in the dictionary.
    pub empty: bool,
    /// Ordered as if infinitely expensive.
    pub cost_overridden: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Triple(TripleLeaf),
    Path(PathLeaf),
    Join(Box<Plan>, Box<Plan>),
    Union(Vec<Plan>),
    Distinct(Box<Plan>),
    Project(Vec<String>, Box<Plan>),
}

impl Plan {
    pub fn join(left: Plan, right: Plan) -> Plan {
        Plan::Join(Box::new(left), Box::new(right))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Plan::Triple(_) => "OpTriple",
            Plan::Path(_) => "OpPath",
            Plan::Join(..) => "OpJoin",
            Plan::Union(_) => "OpUnion",
            Plan::Distinct(_) => "OpDistinct",
            Plan::Project(..) => "OpProject",
        }
    }

    /// Variables this operator can bind, in first-appearance order.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        let mut push = |t: &PatternTerm| {
            if let Some(v) = t.var() {
                if !out.iter().any(|x| x == v) {
                    out.push(v.to_string());
                }
            }
        };
        match self {
            Plan::Triple(t) => {
                push(&t.pattern.s);
                push(&t.pattern.p);
                push(&t.pattern.o);
            }
            Plan::Path(p) => {
                push(&p.subject);
                push(&p.object);
            }
            Plan::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Plan::Union(bs) => bs.iter().for_each(|b| b.collect_vars(out)),
            Plan::Distinct(c) => c.collect_vars(out),
            Plan::Project(vs, _) => {
                for v in vs {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        self.vars().into_iter().collect()
    }

    /// Join operands of a left-deep (or any) join tree, left to right.
    pub fn join_operands(&self) -> Vec<&Plan> {
        match self {
            Plan::Join(a, b) => {
                let mut v = a.join_operands();
                v.extend(b.join_operands());
                v
            }
            other => vec![other],
        }
    }

    /// All path leaves in evaluation order.
    pub fn path_leaves(&self) -> Vec<&PathLeaf> {
        match self {
            Plan::Path(p) => vec![p],
            Plan::Triple(_) => vec![],
            Plan::Join(a, b) => {
                let mut v = a.path_leaves();
                v.extend(b.path_leaves());
                v
            }
            Plan::Union(bs) => bs.iter().flat_map(|b| b.path_leaves()).collect(),
            Plan::Distinct(c) | Plan::Project(_, c) => c.path_leaves(),
        }
    }
}

fn left_deep(mut items: impl Iterator<Item = Plan>) -> Option<Plan> {
    let first = items.next()?;
    Some(items.fold(first, Plan::join))
}

/// Translates a parsed query into operators: triple patterns become
/// [`Plan::Triple`], path patterns [`Plan::Path`], groups left-deep joins in
/// syntax order, with projection (and distinct) on top.
///
/// Constants missing from the dictionary yield leaves marked empty; a path
/// link over a missing predicate matches nothing but can still take part in
/// zero-length matches.
pub fn lower(query: &Query, dict: &Dictionary) -> Plan {
    let body = lower_group(&query.patterns, dict).expect("parser guarantees a non-empty WHERE clause");
    let projected = Plan::Project(query.projected_vars(), Box::new(body));
    if query.distinct {
        Plan::Distinct(Box::new(projected))
    } else {
        projected
    }
}

fn lower_group(patterns: &[Pattern], dict: &Dictionary) -> Option<Plan> {
    left_deep(patterns.iter().map(|p| lower_pattern(p, dict)))
}

fn lower_node(node: &Node, dict: &Dictionary, empty: &mut bool) -> PatternTerm {
    match node {
        Node::Var(v) => PatternTerm::Var(v.clone()),
        Node::Term(t) => match dict.lookup(t) {
            Some(id) => PatternTerm::Bound(id),
            None => {
                *empty = true;
                PatternTerm::Bound(TermId::INVALID)
            }
        },
    }
}

fn lower_pattern(pattern: &Pattern, dict: &Dictionary) -> Plan {
    match pattern {
        Pattern::Triple(t) => {
            let mut empty = false;
            let s = lower_node(&t.subject, dict, &mut empty);
            let p = lower_node(&t.predicate, dict, &mut empty);
            let o = lower_node(&t.object, dict, &mut empty);
            Plan::Triple(TripleLeaf {
                pattern: TriplePattern::new(s, p, o),
                text: pattern.to_string(),
                empty,
            })
        }
        Pattern::Path(p) => {
            let mut empty = false;
            let subject = lower_node(&p.subject, dict, &mut empty);
            let object = lower_node(&p.object, dict, &mut empty);
            let path: PathPattern = p.path.map_links(&mut |iri| dict.lookup(&Term::Iri(iri.0.clone())));
            Plan::Path(PathLeaf {
                subject,
                path,
                object,
                text: pattern.to_string(),
                empty,
                cost_overridden: false,
            })
        }
        Pattern::Union(branches) => Plan::Union(
            branches
                .iter()
                .filter_map(|b| lower_group(b, dict))
                .collect(),
        ),
    }
}

/// True if at least one link names a predicate present in the dictionary.
pub fn has_resolved_link(path: &PathExpr<Option<TermId>>) -> bool {
    path.links().iter().any(|l| l.is_some())
}
