use super::lexer::{tokenize, Spanned, Tok};
use super::{Iri, Node, PathSyntax, Pattern, Prefixes, Projection, Query, TripleSyntax, RDF_TYPE};
use crate::error::QueryError;
use crate::term::Term;
use crate::topology::PathExpr;

/// Parses `text`; `prefixes` are in scope in addition to any `PREFIX`
/// declarations, which take precedence.
pub fn parse_query(text: &str, prefixes: &Prefixes) -> Result<Query, QueryError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        prefixes: prefixes.clone(),
    };
    p.query()
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    prefixes: Prefixes,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> QueryError {
        let t = &self.toks[self.pos];
        QueryError::Syntax {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<(), QueryError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&[&format!("'{p}'")]))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek().is_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        while self.eat_keyword("PREFIX") {
            let (label, ns) = match (self.bump().tok, self.peek().clone()) {
                (Tok::PName(label, local), Tok::Iri(ns)) if local.is_empty() => (label, ns),
                (Tok::PName(_, local), _) if !local.is_empty() => {
                    self.pos -= 1;
                    return Err(self.error(&["prefix label ending in ':'"]));
                }
                (Tok::PName(..), _) => return Err(self.error(&["IRI"])),
                _ => {
                    self.pos -= 1;
                    return Err(self.error(&["prefix label ending in ':'"]));
                }
            };
            self.bump();
            self.prefixes.insert(label, ns);
        }
        if !self.eat_keyword("SELECT") {
            return Err(self.error(&["PREFIX", "SELECT"]));
        }
        let distinct = self.eat_keyword("DISTINCT");
        let projection = if self.eat_punct("*") {
            Projection::All
        } else {
            let mut vars = Vec::new();
            loop {
                match self.peek().clone() {
                    Tok::Var(v) => {
                        self.bump();
                        vars.push(v);
                    }
                    Tok::Punct(",") if !vars.is_empty() => {
                        self.bump();
                        if !matches!(self.peek(), Tok::Var(_)) {
                            return Err(self.error(&["variable"]));
                        }
                    }
                    _ if vars.is_empty() => return Err(self.error(&["DISTINCT", "'*'", "variable"])),
                    _ => break,
                }
            }
            Projection::Vars(vars)
        };
        self.eat_keyword("WHERE");
        if !matches!(self.peek(), Tok::Punct("{")) {
            return Err(self.error(&["WHERE", "'{'"]));
        }
        let patterns = self.group()?;
        if *self.peek() != Tok::Eof {
            return Err(self.error(&["end of input"]));
        }
        let q = Query {
            distinct,
            projection,
            patterns,
        };
        let used = q.where_vars();
        if let Projection::Vars(vs) = &q.projection {
            if let Some(v) = vs.iter().find(|v| !used.contains(&v.as_str())) {
                return Err(QueryError::UnboundProjection(v.clone()));
            }
        }
        Ok(q)
    }

    fn group(&mut self) -> Result<Vec<Pattern>, QueryError> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        loop {
            if matches!(self.peek(), Tok::Punct("}")) && !out.is_empty() {
                self.bump();
                return Ok(out);
            }
            if matches!(self.peek(), Tok::Punct("}") | Tok::Eof) {
                return Err(self.error(&["pattern"]));
            }
            out.extend(self.item()?);
            self.eat_punct(".");
        }
    }

    fn item(&mut self) -> Result<Vec<Pattern>, QueryError> {
        if matches!(self.peek(), Tok::Punct("{")) {
            let mut branches = vec![self.group()?];
            while self.eat_keyword("UNION") {
                if !matches!(self.peek(), Tok::Punct("{")) {
                    return Err(self.error(&["'{'"]));
                }
                branches.push(self.group()?);
            }
            // a lone group is just a nested conjunction
            return Ok(if branches.len() == 1 {
                branches.pop().unwrap_or_default()
            } else {
                vec![Pattern::Union(branches)]
            });
        }
        let subject = self.node(false)?;
        let pattern = if let Tok::Var(v) = self.peek().clone() {
            self.bump();
            let object = self.node(true)?;
            Pattern::Triple(TripleSyntax {
                subject,
                predicate: Node::Var(v),
                object,
            })
        } else {
            let path = self.path()?;
            let object = self.node(true)?;
            match path {
                PathExpr::Link(Iri(iri)) => Pattern::Triple(TripleSyntax {
                    subject,
                    predicate: Node::Term(Term::Iri(iri)),
                    object,
                }),
                path => Pattern::Path(PathSyntax { subject, path, object }),
            }
        };
        Ok(vec![pattern])
    }

    fn node(&mut self, allow_literal: bool) -> Result<Node, QueryError> {
        let expected: &[&str] = if allow_literal {
            &["variable", "IRI", "prefixed name", "literal"]
        } else {
            &["variable", "IRI", "prefixed name", "'{'"]
        };
        Ok(match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Node::Var(v)
            }
            Tok::Str(lexical) if allow_literal => {
                self.bump();
                if let Tok::Lang(lang) = self.peek().clone() {
                    self.bump();
                    Node::Term(Term::lang_literal(lexical, lang))
                } else if self.eat_punct("^^") {
                    let dt = self.iri_token().ok_or_else(|| self.error(&["datatype IRI"]))??;
                    Node::Term(Term::typed_literal(lexical, dt))
                } else {
                    Node::Term(Term::literal(lexical))
                }
            }
            _ => match self.iri_token() {
                Some(iri) => Node::Term(Term::Iri(iri?)),
                None => return Err(self.error(expected)),
            },
        })
    }

    /// Consumes an IRI, prefixed name or bare word; `None` if the next token
    /// is none of these.
    fn iri_token(&mut self) -> Option<Result<String, QueryError>> {
        let t = &self.toks[self.pos];
        let (prefix, local) = match &t.tok {
            Tok::Iri(i) => {
                let i = i.clone();
                self.bump();
                return Some(Ok(i));
            }
            Tok::PName(p, l) => (p.clone(), l.clone()),
            Tok::Word(w) if !is_reserved(w) => (String::new(), w.clone()),
            _ => return None,
        };
        let Some(ns) = self.prefixes.get(&prefix) else {
            return Some(Err(QueryError::UnknownPrefix {
                line: t.line,
                column: t.column,
                prefix,
            }));
        };
        let iri = format!("{ns}{local}");
        self.bump();
        Some(Ok(iri))
    }

    fn path(&mut self) -> Result<PathExpr<Iri>, QueryError> {
        let mut left = self.path_seq()?;
        while self.eat_punct("|") {
            left = PathExpr::alt(left, self.path_seq()?);
        }
        Ok(left)
    }

    fn path_seq(&mut self) -> Result<PathExpr<Iri>, QueryError> {
        let mut left = self.path_elt()?;
        while self.eat_punct("/") {
            left = PathExpr::seq(left, self.path_elt()?);
        }
        Ok(left)
    }

    fn path_elt(&mut self) -> Result<PathExpr<Iri>, QueryError> {
        if self.eat_punct("^") {
            return Ok(PathExpr::inverse(self.path_elt()?));
        }
        let primary = if self.eat_punct("(") {
            let inner = self.path()?;
            self.expect_punct(")")?;
            inner
        } else if matches!(self.peek(), Tok::Word(w) if w == "a") {
            self.bump();
            PathExpr::link(Iri(RDF_TYPE.into()))
        } else {
            match self.iri_token() {
                Some(iri) => PathExpr::link(Iri(iri?)),
                None => return Err(self.error(&["variable", "IRI", "prefixed name", "'a'", "'^'", "'('"])),
            }
        };
        Ok(if self.eat_punct("*") {
            PathExpr::star(primary)
        } else if self.eat_punct("+") {
            PathExpr::plus(primary)
        } else if self.eat_punct("?") {
            PathExpr::opt(primary)
        } else {
            primary
        })
    }
}

fn is_reserved(w: &str) -> bool {
    w == "a" || ["SELECT", "DISTINCT", "WHERE", "PREFIX", "UNION"]
        .iter()
        .any(|k| w.eq_ignore_ascii_case(k))
}
