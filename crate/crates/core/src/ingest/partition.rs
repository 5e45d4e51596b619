//! Topology/attribute partition rules.
//!
//! A triple whose object is a literal is always an attribute triple. For
//! IRI or blank-node objects the predicate decides: an explicit topology
//! predicate, an explicit attribute predicate, or the configured default.

use std::collections::BTreeSet;

use crate::dictionary::Dictionary;
use crate::error::ConfigError;
use crate::term::{Term, Triple, TripleClass};

pub const FOAF_KNOWS: &str = "http://xmlns.com/foaf/0.1/knows";
pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionConfig {
    topology_predicates: BTreeSet<String>,
    attribute_predicates: BTreeSet<String>,
    default_for_iri_objects: TripleClass,
}

impl Default for PartitionConfig {
    /// `foaf:knows` plus the social relations used by the bundled example
    /// data; `rdf:type` is an attribute even though its objects are IRIs.
    fn default() -> Self {
        let topology = [
            FOAF_KNOWS,
            "ex:knows",
            "ex:creatorOf",
            "ex:likedBy",
            "ex:worksFor",
            "ex:follows",
        ];
        PartitionConfig {
            topology_predicates: topology.iter().map(|s| s.to_string()).collect(),
            attribute_predicates: [RDF_TYPE, "ex:type"].iter().map(|s| s.to_string()).collect(),
            default_for_iri_objects: TripleClass::Topology,
        }
    }
}

impl PartitionConfig {
    pub fn empty(default_for_iri_objects: TripleClass) -> Self {
        PartitionConfig {
            topology_predicates: BTreeSet::new(),
            attribute_predicates: BTreeSet::new(),
            default_for_iri_objects,
        }
    }

    pub fn new(
        topology: impl IntoIterator<Item = String>,
        attribute: impl IntoIterator<Item = String>,
        default_for_iri_objects: TripleClass,
    ) -> Result<Self, ConfigError> {
        let mut cfg = Self::empty(default_for_iri_objects);
        for iri in topology {
            cfg.add_topology(iri, 0)?;
        }
        for iri in attribute {
            cfg.add_attribute(iri, 0)?;
        }
        Ok(cfg)
    }

    fn add_topology(&mut self, iri: String, line: usize) -> Result<(), ConfigError> {
        if self.attribute_predicates.contains(&iri) {
            return Err(conflict(&iri, line));
        }
        self.topology_predicates.insert(iri);
        Ok(())
    }

    fn add_attribute(&mut self, iri: String, line: usize) -> Result<(), ConfigError> {
        if self.topology_predicates.contains(&iri) {
            return Err(conflict(&iri, line));
        }
        self.attribute_predicates.insert(iri);
        Ok(())
    }

    pub fn topology_predicates(&self) -> impl Iterator<Item = &str> {
        self.topology_predicates.iter().map(String::as_str)
    }

    pub fn attribute_predicates(&self) -> impl Iterator<Item = &str> {
        self.attribute_predicates.iter().map(String::as_str)
    }

    pub fn default_for_iri_objects(&self) -> TripleClass {
        self.default_for_iri_objects
    }

    /// Parses the line-oriented config format:
    ///
    /// ```text
    /// # comment
    /// topology <http://xmlns.com/foaf/0.1/knows>
    /// attribute <http://www.w3.org/1999/02/22-rdf-syntax-ns#type>
    /// default attribute
    /// ```
    ///
    /// Angle brackets around IRIs are optional. The result starts empty
    /// (default `topology`), not from [`PartitionConfig::default`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::empty(TripleClass::Topology);
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = strip_comment(raw);
            let mut words = content.split_whitespace();
            let Some(directive) = words.next() else {
                continue;
            };
            let arg = words.next().ok_or_else(|| ConfigError {
                line,
                message: format!("'{directive}' needs an argument"),
            })?;
            if let Some(extra) = words.next() {
                return Err(ConfigError {
                    line,
                    message: format!("unexpected '{extra}'"),
                });
            }
            match directive {
                "topology" => cfg.add_topology(strip_iri(arg, line)?, line)?,
                "attribute" => cfg.add_attribute(strip_iri(arg, line)?, line)?,
                "default" => {
                    cfg.default_for_iri_objects = match arg {
                        "topology" => TripleClass::Topology,
                        "attribute" => TripleClass::Attribute,
                        other => {
                            return Err(ConfigError {
                                line,
                                message: format!("default must be topology or attribute, got '{other}'"),
                            })
                        }
                    }
                }
                other => {
                    return Err(ConfigError {
                        line,
                        message: format!("unknown directive '{other}'"),
                    })
                }
            }
        }
        Ok(cfg)
    }

    /// Classification on decoded terms.
    pub fn classify_terms(&self, predicate: &str, object: &Term) -> TripleClass {
        if object.is_literal() {
            return TripleClass::Attribute;
        }
        if self.topology_predicates.contains(predicate) {
            TripleClass::Topology
        } else if self.attribute_predicates.contains(predicate) {
            TripleClass::Attribute
        } else {
            self.default_for_iri_objects
        }
    }
}

/// Cuts a trailing `#` comment; a `#` inside `<...>` belongs to the IRI.
fn strip_comment(line: &str) -> &str {
    let mut in_iri = false;
    for (i, c) in line.char_indices() {
        match c {
            '<' => in_iri = true,
            '>' => in_iri = false,
            '#' if !in_iri => return &line[..i],
            _ => {}
        }
    }
    line
}

fn conflict(iri: &str, line: usize) -> ConfigError {
    ConfigError {
        line,
        message: format!("<{iri}> is listed as both topology and attribute"),
    }
}

fn strip_iri(arg: &str, line: usize) -> Result<String, ConfigError> {
    let iri = match (arg.strip_prefix('<'), arg.ends_with('>')) {
        (Some(rest), true) => &rest[..rest.len() - 1],
        (None, false) => arg,
        _ => {
            return Err(ConfigError {
                line,
                message: format!("malformed IRI '{arg}'"),
            })
        }
    };
    if iri.is_empty() {
        return Err(ConfigError {
            line,
            message: "empty IRI".into(),
        });
    }
    Ok(iri.to_string())
}

/// Classifies an encoded triple. Terms that do not resolve are treated as
/// non-literal IRIs.
pub fn classify(triple: &Triple, config: &PartitionConfig, dict: &Dictionary) -> TripleClass {
    let object = dict.resolve(triple.o).ok();
    if object.is_some_and(Term::is_literal) {
        return TripleClass::Attribute;
    }
    let predicate = dict.resolve(triple.p).map(Term::lexical).unwrap_or("");
    let placeholder = Term::Iri(String::new());
    config.classify_terms(predicate, object.unwrap_or(&placeholder))
}
