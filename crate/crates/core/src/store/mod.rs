//! Disk-resident triple store holding every loaded triple.
//!
//! Loading goes through a [`StoreBuilder`], which buffers triples in memory
//! and writes sorted permutation indices on [`seal`](StoreBuilder::seal).
//! A sealed [`DiskStore`] is read-only and memory-maps its index files, so
//! it can be shared between threads freely.

mod catalog;
pub mod format;
mod index;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

pub use catalog::{PredicateStats, StoreCatalog, DEFAULT_DENSIFICATION};
pub use index::{IndexFile, IndexOrder};

use crate::dictionary::Dictionary;
use crate::error::StoreError;
use crate::term::{TermId, Triple, TripleClass};
use format::{CATALOG_FILE, DICT_FILE, DICT_MAGIC, FORMAT_VERSION, PARTIAL_MARKER};

/// A triple-pattern position: a constant or a named variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternTerm {
    Bound(TermId),
    Var(String),
}

impl PatternTerm {
    pub fn bound(&self) -> Option<TermId> {
        match self {
            PatternTerm::Bound(id) => Some(*id),
            PatternTerm::Var(_) => None,
        }
    }

    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Bound(_) => None,
        }
    }

    pub fn var_name(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Bound(id) => write!(f, "{id}"),
            PatternTerm::Var(v) => write!(f, "?{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub s: PatternTerm,
    pub p: PatternTerm,
    pub o: PatternTerm,
}

impl TriplePattern {
    pub fn new(s: PatternTerm, p: PatternTerm, o: PatternTerm) -> Self {
        TriplePattern { s, p, o }
    }

    /// Fully unbound pattern `?s ?p ?o`.
    pub fn any() -> Self {
        Self::new(
            PatternTerm::var_name("s"),
            PatternTerm::var_name("p"),
            PatternTerm::var_name("o"),
        )
    }

    pub fn bound_positions(&self) -> (Option<TermId>, Option<TermId>, Option<TermId>) {
        (self.s.bound(), self.p.bound(), self.o.bound())
    }

    pub fn matches(&self, t: &Triple) -> bool {
        let (s, p, o) = self.bound_positions();
        s.is_none_or(|x| x == t.s) && p.is_none_or(|x| x == t.p) && o.is_none_or(|x| x == t.o)
    }
}

/// Accumulates triples for a new store directory.
///
/// Creating a builder writes `partial.marker`; only a successful
/// [`seal`](Self::seal) removes it, so an interrupted load leaves a store
/// that refuses to open.
#[derive(Debug)]
pub struct StoreBuilder {
    dir: PathBuf,
    triples: HashMap<Triple, TripleClass>,
    catalog: StoreCatalog,
}

impl StoreBuilder {
    /// Starts a store at `dir`. An existing store there is an error unless
    /// `overwrite` is set.
    pub fn create(dir: impl AsRef<Path>, overwrite: bool) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        let known: Vec<&str> = [CATALOG_FILE, DICT_FILE, PARTIAL_MARKER]
            .into_iter()
            .chain(IndexOrder::ALL.iter().map(|o| o.file_name()))
            .collect();
        if dir.exists() {
            let present: Vec<_> = known.iter().filter(|f| dir.join(f).exists()).collect();
            if !present.is_empty() {
                if !overwrite {
                    return Err(StoreError::AlreadyExists(dir));
                }
                for f in present {
                    let path = dir.join(f);
                    fs::remove_file(&path).map_err(|e| StoreError::io(&path, e))?;
                }
            }
        } else {
            fs::create_dir_all(&dir).map_err(|e| StoreError::io(&dir, e))?;
        }
        let marker = dir.join(PARTIAL_MARKER);
        fs::write(&marker, b"load in progress\n").map_err(|e| StoreError::io(&marker, e))?;
        Ok(StoreBuilder {
            dir,
            triples: HashMap::new(),
            catalog: StoreCatalog::default(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn set_densification(&mut self, c: f64) {
        self.catalog.densification = c;
    }

    /// Adds a triple; returns false if it was already present.
    pub fn insert(&mut self, triple: Triple, class: TripleClass) -> bool {
        if self.triples.contains_key(&triple) {
            return false;
        }
        self.triples.insert(triple, class);
        let cat = &mut self.catalog;
        let stats = cat.per_predicate.entry(triple.p).or_default();
        stats.count += 1;
        cat.n_triples_total += 1;
        match class {
            TripleClass::Topology => {
                stats.topology += 1;
                cat.n_topology += 1;
                cat.n_topology_edges += 1;
            }
            TripleClass::Attribute => cat.n_attribute += 1,
        }
        true
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Running counters; `n_entity_nodes` is only computed on seal.
    pub fn catalog(&self) -> &StoreCatalog {
        &self.catalog
    }

    /// Writes indices, dictionary and catalog, removes the partial-load
    /// marker and reopens the directory read-only.
    pub fn seal(self, mut dict: Dictionary) -> Result<DiskStore, StoreError> {
        let StoreBuilder {
            dir,
            triples,
            mut catalog,
        } = self;
        let mut entity_nodes = HashSet::new();
        let mut non_literal_by_pred: HashMap<TermId, u64> = HashMap::new();
        for (t, class) in &triples {
            for id in [t.s, t.p, t.o] {
                dict.resolve(id)?;
            }
            let object_is_literal = dict.resolve(t.o)?.is_literal();
            if *class == TripleClass::Topology {
                if object_is_literal {
                    return Err(StoreError::integrity(&dir, "topology triple with a literal object"));
                }
                entity_nodes.insert(t.s);
                entity_nodes.insert(t.o);
            }
            if !object_is_literal {
                *non_literal_by_pred.entry(t.p).or_default() += 1;
            }
        }
        // The topology graph is rebuilt from (predicate, non-literal object);
        // that only works if a predicate's IRI-object triples share one class.
        for (p, stats) in &catalog.per_predicate {
            let non_literal = non_literal_by_pred.get(p).copied().unwrap_or(0);
            if stats.topology != 0 && stats.topology != non_literal {
                return Err(StoreError::integrity(
                    &dir,
                    format!("predicate {p} mixes topology and attribute triples with non-literal objects"),
                ));
            }
        }
        catalog.n_entity_nodes = entity_nodes.len() as u64;
        catalog.check_consistency().map_err(|m| StoreError::integrity(&dir, m))?;

        let all: Vec<Triple> = triples.into_keys().collect();
        for order in IndexOrder::ALL {
            index::write_index(&dir.join(order.file_name()), order, &all)?;
        }
        dict.seal();
        write_dictionary(&dir.join(DICT_FILE), &dict)?;
        catalog.write(&dir.join(CATALOG_FILE))?;
        let marker = dir.join(PARTIAL_MARKER);
        fs::remove_file(&marker).map_err(|e| StoreError::io(&marker, e))?;
        DiskStore::open(&dir)
    }
}

fn write_dictionary(path: &Path, dict: &Dictionary) -> Result<(), StoreError> {
    let io = |e| StoreError::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(DICT_MAGIC).map_err(io)?;
    format::put_u32(&mut w, FORMAT_VERSION).map_err(io)?;
    w.write_all(&dict.tag().to_le_bytes()).map_err(io)?;
    w.write_all(&[0, 0]).map_err(io)?;
    format::put_u64(&mut w, dict.len() as u64).map_err(io)?;
    for (_, term) in dict.iter() {
        format::put_term(&mut w, term).map_err(io)?;
    }
    let file = w.into_inner().map_err(|e| io(e.into_error()))?;
    file.sync_all().map_err(io)
}

fn read_dictionary(path: &Path) -> Result<Dictionary, StoreError> {
    let file = File::open(path).map_err(|e| StoreError::io(path, e))?;
    let mut r = BufReader::new(file);
    let bad = |msg: String| StoreError::integrity(path, msg);
    let trunc = |e: std::io::Error| bad(format!("truncated or malformed: {e}"));
    let mut header = [0u8; 24];
    r.read_exact(&mut header).map_err(trunc)?;
    if &header[..8] != DICT_MAGIC {
        return Err(bad("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format version {version}")));
    }
    let tag = u16::from_le_bytes(header[12..14].try_into().unwrap());
    if tag == 0 {
        return Err(bad("dictionary tag 0 is reserved".into()));
    }
    let count = u64::from_le_bytes(header[16..24].try_into().unwrap());
    let mut terms = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        terms.push(format::get_term(&mut r).map_err(trunc)?);
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(trunc)? != 0 {
        return Err(bad("trailing bytes".into()));
    }
    let mut dict = Dictionary::from_terms(tag, terms).map_err(|e| bad(e.to_string()))?;
    dict.seal();
    Ok(dict)
}

/// A sealed, read-only store.
#[derive(Debug)]
pub struct DiskStore {
    dir: PathBuf,
    catalog: StoreCatalog,
    dict: Dictionary,
    spo: IndexFile,
    pos: IndexFile,
    osp: IndexFile,
}

impl DiskStore {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        if dir.join(PARTIAL_MARKER).exists() {
            return Err(StoreError::PartialLoad(dir));
        }
        if !dir.join(CATALOG_FILE).exists() {
            return Err(StoreError::Missing(dir));
        }
        let catalog = StoreCatalog::read(&dir.join(CATALOG_FILE))?;
        let dict = read_dictionary(&dir.join(&catalog.dictionary_location))?;
        let spo = IndexFile::open(&dir.join(IndexOrder::Spo.file_name()), IndexOrder::Spo)?;
        let pos = IndexFile::open(&dir.join(IndexOrder::Pos.file_name()), IndexOrder::Pos)?;
        let osp = IndexFile::open(&dir.join(IndexOrder::Osp.file_name()), IndexOrder::Osp)?;
        for idx in [&spo, &pos, &osp] {
            if idx.len() as u64 != catalog.n_triples_total {
                return Err(StoreError::integrity(
                    idx.path(),
                    "record count disagrees with catalog",
                ));
            }
        }
        Ok(DiskStore {
            dir,
            catalog,
            dict,
            spo,
            pos,
            osp,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn catalog(&self) -> &StoreCatalog {
        &self.catalog
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn index(&self, order: IndexOrder) -> &IndexFile {
        match order {
            IndexOrder::Spo => &self.spo,
            IndexOrder::Pos => &self.pos,
            IndexOrder::Osp => &self.osp,
        }
    }

    /// Total size of the store's files in bytes.
    pub fn disk_bytes(&self) -> u64 {
        let mut files = vec![CATALOG_FILE.to_string(), self.catalog.dictionary_location.clone()];
        files.extend(IndexOrder::ALL.iter().map(|o| o.file_name().to_string()));
        files
            .iter()
            .filter_map(|f| fs::metadata(self.dir.join(f)).ok())
            .map(|m| m.len())
            .sum()
    }

    /// Triples matching every bound position, in the order of the index
    /// whose key puts the bound positions first.
    pub fn match_pattern(&self, pattern: &TriplePattern) -> MatchIter<'_> {
        let (order, prefix) = choose_index(pattern.bound_positions());
        let index = self.index(order);
        let range = index.prefix_range(&prefix);
        MatchIter { index, range }
    }

    /// Every topology triple, grouped by predicate.
    pub fn topology_triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.catalog
            .per_predicate
            .iter()
            .filter(|(_, stats)| stats.topology > 0)
            .flat_map(move |(p, _)| {
                let range = self.pos.prefix_range(&[p.0]);
                range.map(move |i| self.pos.triple(i))
            })
            .filter(move |t| self.dict.resolve(t.o).is_ok_and(|o| !o.is_literal()))
    }

    /// Independence-assumption estimate of how many triples match.
    pub fn cardinality_of(&self, pattern: &TriplePattern) -> f64 {
        estimate_pattern(&self.catalog, pattern)
    }
}

fn choose_index(bound: (Option<TermId>, Option<TermId>, Option<TermId>)) -> (IndexOrder, Vec<u64>) {
    match bound {
        (Some(s), Some(p), Some(o)) => (IndexOrder::Spo, vec![s.0, p.0, o.0]),
        (Some(s), Some(p), None) => (IndexOrder::Spo, vec![s.0, p.0]),
        (Some(s), None, Some(o)) => (IndexOrder::Osp, vec![o.0, s.0]),
        (None, Some(p), Some(o)) => (IndexOrder::Pos, vec![p.0, o.0]),
        (Some(s), None, None) => (IndexOrder::Spo, vec![s.0]),
        (None, Some(p), None) => (IndexOrder::Pos, vec![p.0]),
        (None, None, Some(o)) => (IndexOrder::Osp, vec![o.0]),
        (None, None, None) => (IndexOrder::Spo, vec![]),
    }
}

/// Pattern cardinality from catalog counters alone.
pub fn estimate_pattern(catalog: &StoreCatalog, pattern: &TriplePattern) -> f64 {
    let total = catalog.n_triples_total as f64;
    if total == 0.0 {
        return 0.0;
    }
    let nodes = catalog.n_entity_nodes.max(1) as f64;
    let clamp = |x: f64| x.clamp(1.0, total);
    match pattern.bound_positions() {
        (Some(_), Some(_), Some(_)) => 1.0,
        (None, None, None) => total,
        (None, Some(p), None) => catalog.predicate_count(p) as f64,
        (Some(_), Some(p), None) | (None, Some(p), Some(_)) => match catalog.predicate_count(p) {
            0 => 0.0,
            n => clamp(n as f64 / nodes),
        },
        (Some(_), None, None) | (None, None, Some(_)) => clamp(total / nodes),
        (Some(_), None, Some(_)) => clamp(total / (nodes * nodes)),
    }
}

pub struct MatchIter<'a> {
    index: &'a IndexFile,
    range: Range<usize>,
}

impl Iterator for MatchIter<'_> {
    type Item = Triple;

    fn next(&mut self) -> Option<Triple> {
        self.range.next().map(|i| self.index.triple(i))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.range.size_hint()
    }
}

impl ExactSizeIterator for MatchIter<'_> {}
