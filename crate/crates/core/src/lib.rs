//! Hybrid RDF store: all triples on disk in permutation indices, topology
//! triples additionally in memory, and property paths answered by BFS.

pub mod bench;
pub mod dictionary;
pub mod error;
pub mod ingest;
pub mod planner;
pub mod sparql;
pub mod store;
pub mod term;
pub mod synth;
pub mod topology;

pub use dictionary::Dictionary;
pub use term::{Term, TermId, TermKind, Triple, TripleClass};
