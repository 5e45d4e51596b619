//! SELECT queries over triple and property-path patterns.
//!
//! ```text
//! query    := prefix* SELECT DISTINCT? ('*' | var (','? var)*) WHERE? group
//! group    := '{' (item '.'?)* '}'
//! item     := group (UNION group)* | node verb node
//! verb     := var | path
//! path     := seq ('|' seq)*
//! seq      := elt ('/' elt)*
//! elt      := '^' elt | primary ('*' | '+' | '?')?
//! primary  := iri | 'a' | '(' path ')'
//! ```
//!
//! Bare words such as `knows` resolve through the empty prefix.

mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

pub use parser::parse_query;

use crate::term::Term;
use crate::topology::PathExpr;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// Prefix label (without colon) → namespace IRI.
pub type Prefixes = BTreeMap<String, String>;

/// Prefixes in scope when a query declares none: the empty prefix and
/// `ex:` map to `ex:`, plus the usual `rdf:` and `foaf:`.
pub fn default_prefixes() -> Prefixes {
    [
        ("", "ex:"),
        ("ex", "ex:"),
        ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
        ("foaf", "http://xmlns.com/foaf/0.1/"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

/// An absolute IRI in a path link.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(pub String);

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// Subject, predicate or object position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Var(String),
    Term(Term),
}

impl Node {
    pub fn var(&self) -> Option<&str> {
        match self {
            Node::Var(v) => Some(v),
            Node::Term(_) => None,
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Var(v) => write!(f, "?{v}"),
            Node::Term(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSyntax {
    pub subject: Node,
    pub predicate: Node,
    pub object: Node,
}

/// A pattern whose verb uses at least one path operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSyntax {
    pub subject: Node,
    pub path: PathExpr<Iri>,
    pub object: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Triple(TripleSyntax),
    Path(PathSyntax),
    /// Two or more alternative groups.
    Union(Vec<Vec<Pattern>>),
}

impl Pattern {
    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        let mut push = |n: &'a Node| {
            if let Some(v) = n.var() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Pattern::Triple(t) => {
                push(&t.subject);
                push(&t.predicate);
                push(&t.object);
            }
            Pattern::Path(p) => {
                push(&p.subject);
                push(&p.object);
            }
            Pattern::Union(branches) => {
                for p in branches.iter().flatten() {
                    p.collect_vars(out);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    All,
    Vars(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub distinct: bool,
    pub projection: Projection,
    pub patterns: Vec<Pattern>,
}

impl Query {
    /// Variables of the WHERE clause in order of first appearance.
    pub fn where_vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for p in &self.patterns {
            p.collect_vars(&mut out);
        }
        out
    }

    /// Output columns, with `*` expanded.
    pub fn projected_vars(&self) -> Vec<String> {
        match &self.projection {
            Projection::All => self.where_vars().into_iter().map(str::to_string).collect(),
            Projection::Vars(v) => v.clone(),
        }
    }

    pub fn path_count(&self) -> usize {
        fn count(ps: &[Pattern]) -> usize {
            ps.iter()
                .map(|p| match p {
                    Pattern::Path(_) => 1,
                    Pattern::Triple(_) => 0,
                    Pattern::Union(bs) => bs.iter().map(|b| count(b)).sum(),
                })
                .sum()
        }
        count(&self.patterns)
    }
}

fn write_group(f: &mut fmt::Formatter<'_>, patterns: &[Pattern]) -> fmt::Result {
    f.write_str("{ ")?;
    for (i, p) in patterns.iter().enumerate() {
        if i > 0 {
            f.write_str(" . ")?;
        }
        write!(f, "{p}")?;
    }
    f.write_str(" }")
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Triple(t) => write!(f, "{} {} {}", t.subject, t.predicate, t.object),
            Pattern::Path(p) => write!(f, "{} {} {}", p.subject, p.path, p.object),
            Pattern::Union(branches) => {
                for (i, b) in branches.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" UNION ")?;
                    }
                    write_group(f, b)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        match &self.projection {
            Projection::All => f.write_str("*")?,
            Projection::Vars(vs) => {
                let vs: Vec<String> = vs.iter().map(|v| format!("?{v}")).collect();
                f.write_str(&vs.join(" "))?;
            }
        }
        f.write_str(" WHERE ")?;
        write_group(f, &self.patterns)
    }
}
