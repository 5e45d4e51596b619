//! N-Triples ingestion: parse, intern, classify, store.

mod ntriples;
mod partition;

use std::io::{BufRead, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

pub use ntriples::{parse_line, NTriplesReader, ReadError, Statement};
pub use partition::{classify, PartitionConfig, FOAF_KNOWS, RDF_TYPE};

use crate::dictionary::Dictionary;
use crate::error::{IngestError, StoreError};
use crate::store::{DiskStore, StoreBuilder};
use crate::term::{Triple, TripleClass};
use crate::topology::TopologyGraph;

/// What happens to a malformed statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Abort on the first error.
    Strict,
    /// Skip the line and count it.
    #[default]
    Lenient,
}

/// One encoded, classified statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseEvent {
    pub triple: Triple,
    pub line: usize,
    pub class: TripleClass,
}

/// Streams [`ParseEvent`]s, interning terms as it goes.
///
/// In lenient mode malformed lines are skipped and counted; in strict mode
/// the first error is yielded and the stream ends.
pub struct TripleStream<'a, R> {
    reader: NTriplesReader<R>,
    dict: &'a mut Dictionary,
    config: &'a PartitionConfig,
    mode: ParseMode,
    errors: u64,
    failed: bool,
}

impl<'a, R: BufRead> TripleStream<'a, R> {
    pub fn new(input: R, dict: &'a mut Dictionary, config: &'a PartitionConfig, mode: ParseMode) -> Self {
        TripleStream {
            reader: NTriplesReader::new(input),
            dict,
            config,
            mode,
            errors: 0,
            failed: false,
        }
    }

    /// Lines skipped so far in lenient mode.
    pub fn parse_errors(&self) -> u64 {
        self.errors
    }

    fn encode(&mut self, st: Statement) -> Result<ParseEvent, IngestError> {
        let line = st.line;
        let class = self.config.classify_terms(st.predicate.lexical(), &st.object);
        let mut intern = |t| {
            self.dict
                .intern(t)
                .map_err(|source| IngestError::Dictionary { line, source })
        };
        let triple = Triple::new(intern(st.subject)?, intern(st.predicate)?, intern(st.object)?);
        Ok(ParseEvent { triple, line, class })
    }
}

impl<R: BufRead> Iterator for TripleStream<'_, R> {
    type Item = Result<ParseEvent, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            let result = match self.reader.next()? {
                Ok(st) => self.encode(st),
                Err(ReadError::Syntax(e)) => Err(e.into()),
                Err(ReadError::Io(e)) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
            };
            match result {
                Ok(ev) => return Some(Ok(ev)),
                Err(e) if self.mode == ParseMode::Strict => {
                    self.failed = true;
                    return Some(Err(e));
                }
                Err(_) => self.errors += 1,
            }
        }
    }
}

/// Counts from one load. `triples_total` is every statement seen, so
/// `triples_total = triples_topology + triples_attribute + parse_errors + duplicates`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LoadReport {
    pub triples_total: u64,
    pub triples_topology: u64,
    pub triples_attribute: u64,
    pub parse_errors: u64,
    pub duplicates: u64,
    #[serde(rename = "elapsedMs", serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

impl LoadReport {
    pub fn topology_ratio(&self) -> f64 {
        let stored = self.triples_topology + self.triples_attribute;
        if stored == 0 {
            0.0
        } else {
            self.triples_topology as f64 / stored as f64
        }
    }
}

/// Parses `input` into `store` and, for topology triples, `graph`.
///
/// On error the store builder is left unsealed, so its partial-load marker
/// stays on disk.
pub fn load_dataset<R: BufRead>(
    input: R,
    config: &PartitionConfig,
    store: &mut StoreBuilder,
    graph: &mut TopologyGraph,
    dict: &mut Dictionary,
    mode: ParseMode,
) -> Result<LoadReport, IngestError> {
    let started = Instant::now();
    let mut report = LoadReport::default();
    let mut stream = TripleStream::new(input, dict, config, mode);
    for ev in stream.by_ref() {
        let ev = ev?;
        report.triples_total += 1;
        if !store.insert(ev.triple, ev.class) {
            report.duplicates += 1;
            continue;
        }
        match ev.class {
            TripleClass::Topology => {
                graph.add_edge(ev.triple.s, ev.triple.p, ev.triple.o)?;
                report.triples_topology += 1;
            }
            TripleClass::Attribute => report.triples_attribute += 1,
        }
    }
    report.parse_errors = stream.parse_errors();
    report.triples_total += report.parse_errors;
    report.elapsed = started.elapsed();
    Ok(report)
}

/// A sealed store with its topology graph, ready to query.
pub struct LoadedStore {
    pub store: DiskStore,
    pub graph: TopologyGraph,
    pub report: LoadReport,
}

/// Creates a store at `dir`, loads `input` into it and seals both the store
/// and the in-memory graph.
pub fn load_into(
    dir: impl AsRef<Path>,
    input: impl BufRead,
    config: &PartitionConfig,
    mode: ParseMode,
    overwrite: bool,
) -> Result<LoadedStore, IngestError> {
    let started = Instant::now();
    let mut builder = StoreBuilder::create(dir, overwrite)?;
    let mut graph = TopologyGraph::new();
    let mut dict = Dictionary::new();
    let mut report = load_dataset(input, config, &mut builder, &mut graph, &mut dict, mode)?;
    let store = builder.seal(dict)?;
    graph.seal();
    report.elapsed = started.elapsed();
    Ok(LoadedStore { store, graph, report })
}

/// Writes every stored triple as N-Triples, in SPO order.
pub fn export_ntriples(store: &DiskStore, mut out: impl Write) -> Result<(), StoreError> {
    let dict = store.dictionary();
    let spo = store.index(crate::store::IndexOrder::Spo);
    for i in 0..spo.len() {
        let t = spo.triple(i);
        writeln!(out, "{} {} {} .", dict.resolve(t.s)?, dict.resolve(t.p)?, dict.resolve(t.o)?)
            .map_err(|e| StoreError::io(store.dir(), e))?;
    }
    Ok(())
}
