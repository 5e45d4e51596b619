//! RDF terms, interned identifiers and triples.

use std::fmt;

use crate::error::TermError;

/// An RDF term as it appears in N-Triples or a query.
///
/// Literals compare by their exact lexical form, datatype and language tag;
/// no value-space canonicalization is applied (`"1"` and `"01"` differ).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal {
        lexical: String,
        datatype: Option<String>,
        language: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermKind {
    Iri,
    BlankNode,
    Literal,
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        Term::Iri(iri.into())
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::BlankNode(label.into())
    }

    /// A plain (untyped, untagged) literal.
    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: Some(datatype.into()),
            language: None,
        }
    }

    pub fn lang_literal(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Term::Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language.into()),
        }
    }

    pub fn kind(&self) -> TermKind {
        match self {
            Term::Iri(_) => TermKind::Iri,
            Term::BlankNode(_) => TermKind::BlankNode,
            Term::Literal { .. } => TermKind::Literal,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    /// IRI or blank node: the kinds allowed in subject position.
    pub fn is_resource(&self) -> bool {
        !self.is_literal()
    }

    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(s) | Term::BlankNode(s) => s,
            Term::Literal { lexical, .. } => lexical,
        }
    }

    pub fn validate(&self) -> Result<(), TermError> {
        match self {
            Term::Iri(iri) if iri.is_empty() => Err(TermError::EmptyIri),
            Term::BlankNode(label) if label.is_empty() => Err(TermError::EmptyBlankLabel),
            Term::Literal {
                datatype: Some(dt),
                language: Some(_),
                ..
            } => Err(TermError::DatatypeAndLanguage(dt.clone())),
            Term::Literal {
                datatype: Some(dt), ..
            } if dt.is_empty() => Err(TermError::EmptyIri),
            Term::Literal {
                language: Some(lang),
                ..
            } if lang.is_empty() => Err(TermError::EmptyLanguage),
            _ => Ok(()),
        }
    }

    /// Human-oriented rendering used for result rows: IRIs bare, literals
    /// and blank nodes in N-Triples form.
    pub fn display_value(&self) -> String {
        match self {
            Term::Iri(iri) => iri.clone(),
            other => other.to_string(),
        }
    }
}

/// N-Triples rendering.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Literal {
                lexical,
                datatype,
                language,
            } => {
                f.write_str("\"")?;
                for c in lexical.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")?;
                if let Some(lang) = language {
                    write!(f, "@{lang}")?;
                } else if let Some(dt) = datatype {
                    write!(f, "^^<{dt}>")?;
                }
                Ok(())
            }
        }
    }
}

/// Dictionary-issued identifier of a [`Term`].
///
/// The high 16 bits carry the issuing dictionary's tag and the low 48 bits a
/// sequence number starting at 1, so id 0 is never issued and ids from a
/// different dictionary are detected on lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u64);

impl TermId {
    pub const INVALID: TermId = TermId(0);
    pub(crate) const SEQ_BITS: u32 = 48;
    pub(crate) const SEQ_MASK: u64 = (1 << Self::SEQ_BITS) - 1;

    pub(crate) fn compose(tag: u16, seq: u64) -> TermId {
        TermId(((tag as u64) << Self::SEQ_BITS) | (seq & Self::SEQ_MASK))
    }

    pub fn tag(self) -> u16 {
        (self.0 >> Self::SEQ_BITS) as u16
    }

    pub fn seq(self) -> u64 {
        self.0 & Self::SEQ_MASK
    }

    pub fn is_valid(self) -> bool {
        self.0 != 0
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:x}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub s: TermId,
    pub p: TermId,
    pub o: TermId,
}

impl Triple {
    pub fn new(s: TermId, p: TermId, o: TermId) -> Self {
        Triple { s, p, o }
    }
}

/// Which side of the topology/attribute partition a triple falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TripleClass {
    Topology,
    Attribute,
}
