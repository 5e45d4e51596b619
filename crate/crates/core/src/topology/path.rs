use std::fmt;

use crate::term::TermId;

/// Regular expression over predicates.
///
/// `L` is the link label: IRIs in parsed queries, resolved ids (or `None`
/// for an IRI absent from the dictionary) once lowered.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathExpr<L> {
    Link(L),
    Inverse(Box<PathExpr<L>>),
    Sequence(Box<PathExpr<L>>, Box<PathExpr<L>>),
    Alternation(Box<PathExpr<L>>, Box<PathExpr<L>>),
    ZeroOrMore(Box<PathExpr<L>>),
    OneOrMore(Box<PathExpr<L>>),
    ZeroOrOne(Box<PathExpr<L>>),
}

/// A lowered path: each link is a predicate id, or `None` when the
/// predicate does not exist and the link can never match.
pub type PathPattern = PathExpr<Option<TermId>>;

/// Traversal direction of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl<L> PathExpr<L> {
    pub fn link(l: L) -> Self {
        PathExpr::Link(l)
    }

    pub fn inverse(e: Self) -> Self {
        PathExpr::Inverse(Box::new(e))
    }

    pub fn seq(a: Self, b: Self) -> Self {
        PathExpr::Sequence(Box::new(a), Box::new(b))
    }

    pub fn alt(a: Self, b: Self) -> Self {
        PathExpr::Alternation(Box::new(a), Box::new(b))
    }

    pub fn star(e: Self) -> Self {
        PathExpr::ZeroOrMore(Box::new(e))
    }

    pub fn plus(e: Self) -> Self {
        PathExpr::OneOrMore(Box::new(e))
    }

    pub fn opt(e: Self) -> Self {
        PathExpr::ZeroOrOne(Box::new(e))
    }

    pub fn map_links<M>(&self, f: &mut impl FnMut(&L) -> M) -> PathExpr<M> {
        match self {
            PathExpr::Link(l) => PathExpr::Link(f(l)),
            PathExpr::Inverse(e) => PathExpr::inverse(e.map_links(f)),
            PathExpr::Sequence(a, b) => PathExpr::seq(a.map_links(f), b.map_links(f)),
            PathExpr::Alternation(a, b) => PathExpr::alt(a.map_links(f), b.map_links(f)),
            PathExpr::ZeroOrMore(e) => PathExpr::star(e.map_links(f)),
            PathExpr::OneOrMore(e) => PathExpr::plus(e.map_links(f)),
            PathExpr::ZeroOrOne(e) => PathExpr::opt(e.map_links(f)),
        }
    }

    pub fn links(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.visit_links(&mut |l| out.push(l));
        out
    }

    fn visit_links<'a>(&'a self, f: &mut impl FnMut(&'a L)) {
        match self {
            PathExpr::Link(l) => f(l),
            PathExpr::Inverse(e)
            | PathExpr::ZeroOrMore(e)
            | PathExpr::OneOrMore(e)
            | PathExpr::ZeroOrOne(e) => e.visit_links(f),
            PathExpr::Sequence(a, b) | PathExpr::Alternation(a, b) => {
                a.visit_links(f);
                b.visit_links(f);
            }
        }
    }

    /// Nesting depth; a bare link has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            PathExpr::Link(_) => 0,
            PathExpr::Inverse(e)
            | PathExpr::ZeroOrMore(e)
            | PathExpr::OneOrMore(e)
            | PathExpr::ZeroOrOne(e) => 1 + e.depth(),
            PathExpr::Sequence(a, b) | PathExpr::Alternation(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn is_link(&self) -> bool {
        matches!(self, PathExpr::Link(_))
    }

    pub fn has_closure(&self) -> bool {
        match self {
            PathExpr::Link(_) => false,
            PathExpr::ZeroOrMore(_) | PathExpr::OneOrMore(_) => true,
            PathExpr::Inverse(e) | PathExpr::ZeroOrOne(e) => e.has_closure(),
            PathExpr::Sequence(a, b) | PathExpr::Alternation(a, b) => a.has_closure() || b.has_closure(),
        }
    }

    /// Whether the empty path matches.
    pub fn nullable(&self) -> bool {
        match self {
            PathExpr::Link(_) => false,
            PathExpr::ZeroOrMore(_) | PathExpr::ZeroOrOne(_) => true,
            PathExpr::Inverse(e) | PathExpr::OneOrMore(e) => e.nullable(),
            PathExpr::Sequence(a, b) => a.nullable() && b.nullable(),
            PathExpr::Alternation(a, b) => a.nullable() || b.nullable(),
        }
    }

    /// Path length used by the cost model: closures count as `horizon`,
    /// sequences add up, alternations take the longer branch.
    pub fn cost_length(&self, horizon: u32) -> u32 {
        let len = match self {
            PathExpr::Link(_) => 1,
            PathExpr::ZeroOrMore(_) | PathExpr::OneOrMore(_) => horizon,
            PathExpr::Inverse(e) | PathExpr::ZeroOrOne(e) => e.cost_length(horizon),
            PathExpr::Sequence(a, b) => a.cost_length(horizon).saturating_add(b.cost_length(horizon)),
            PathExpr::Alternation(a, b) => a.cost_length(horizon).max(b.cost_length(horizon)),
        };
        len.max(1)
    }
}

impl<L: Clone> PathExpr<L> {
    /// Rewrites into an inverse-free expression over directed links.
    pub fn directed(&self) -> PathExpr<(L, Direction)> {
        self.push_inverse(Direction::Forward)
    }

    /// The expression matching exactly the reversed paths.
    pub fn reversed(&self) -> PathExpr<(L, Direction)> {
        self.push_inverse(Direction::Backward)
    }

    fn push_inverse(&self, dir: Direction) -> PathExpr<(L, Direction)> {
        match self {
            PathExpr::Link(l) => PathExpr::Link((l.clone(), dir)),
            PathExpr::Inverse(e) => e.push_inverse(dir.flip()),
            PathExpr::Sequence(a, b) => match dir {
                Direction::Forward => PathExpr::seq(a.push_inverse(dir), b.push_inverse(dir)),
                Direction::Backward => PathExpr::seq(b.push_inverse(dir), a.push_inverse(dir)),
            },
            PathExpr::Alternation(a, b) => PathExpr::alt(a.push_inverse(dir), b.push_inverse(dir)),
            PathExpr::ZeroOrMore(e) => PathExpr::star(e.push_inverse(dir)),
            PathExpr::OneOrMore(e) => PathExpr::plus(e.push_inverse(dir)),
            PathExpr::ZeroOrOne(e) => PathExpr::opt(e.push_inverse(dir)),
        }
    }
}

/// SPARQL property-path syntax with minimal parentheses.
impl<L: fmt::Display> fmt::Display for PathExpr<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec<L>(e: &PathExpr<L>) -> u8 {
            match e {
                PathExpr::Alternation(..) => 0,
                PathExpr::Sequence(..) => 1,
                PathExpr::Inverse(_) => 2,
                PathExpr::ZeroOrMore(_) | PathExpr::OneOrMore(_) | PathExpr::ZeroOrOne(_) => 3,
                PathExpr::Link(_) => 4,
            }
        }
        fn child<L: fmt::Display>(f: &mut fmt::Formatter<'_>, e: &PathExpr<L>, min: u8) -> fmt::Result {
            if prec(e) < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            PathExpr::Link(l) => write!(f, "{l}"),
            PathExpr::Inverse(e) => {
                f.write_str("^")?;
                child(f, e, 3)
            }
            PathExpr::Sequence(a, b) => {
                child(f, a, 1)?;
                f.write_str("/")?;
                child(f, b, 2)
            }
            PathExpr::Alternation(a, b) => {
                child(f, a, 0)?;
                f.write_str("|")?;
                child(f, b, 1)
            }
            PathExpr::ZeroOrMore(e) | PathExpr::OneOrMore(e) | PathExpr::ZeroOrOne(e) => {
                child(f, e, 4)?;
                f.write_str(match self {
                    PathExpr::ZeroOrMore(_) => "*",
                    PathExpr::OneOrMore(_) => "+",
                    _ => "?",
                })
            }
        }
    }
}
