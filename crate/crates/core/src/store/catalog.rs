use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::format::{self, CATALOG_MAGIC, FORMAT_VERSION};
use crate::error::StoreError;
use crate::term::TermId;

pub const DEFAULT_DENSIFICATION: f64 = 1.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct PredicateStats {
    pub count: u64,
    pub topology: u64,
}

/// Store statistics; the path cost model reads |V_EE| and |E_EE| from here.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StoreCatalog {
    pub n_triples_total: u64,
    /// |T_G|
    pub n_topology: u64,
    /// |T_A|
    pub n_attribute: u64,
    /// |V_EE|: distinct subjects and objects of topology triples.
    pub n_entity_nodes: u64,
    /// |E_EE|
    pub n_topology_edges: u64,
    pub densification: f64,
    pub dictionary_location: String,
    #[serde(skip)]
    pub per_predicate: BTreeMap<TermId, PredicateStats>,
}

impl Default for StoreCatalog {
    fn default() -> Self {
        StoreCatalog {
            n_triples_total: 0,
            n_topology: 0,
            n_attribute: 0,
            n_entity_nodes: 0,
            n_topology_edges: 0,
            densification: DEFAULT_DENSIFICATION,
            dictionary_location: format::DICT_FILE.to_string(),
            per_predicate: BTreeMap::new(),
        }
    }
}

impl StoreCatalog {
    pub fn predicate_count(&self, p: TermId) -> u64 {
        self.per_predicate.get(&p).map_or(0, |s| s.count)
    }

    /// |T_G| / |T_OSN|, 0 for an empty store.
    pub fn topology_ratio(&self) -> f64 {
        if self.n_triples_total == 0 {
            0.0
        } else {
            self.n_topology as f64 / self.n_triples_total as f64
        }
    }

    pub(crate) fn check_consistency(&self) -> Result<(), String> {
        if self.n_triples_total != self.n_topology + self.n_attribute {
            return Err("total != topology + attribute".into());
        }
        if self.n_topology_edges != self.n_topology {
            return Err("edge count != topology count".into());
        }
        let (sum, topo) = self
            .per_predicate
            .values()
            .fold((0, 0), |(a, b), s| (a + s.count, b + s.topology));
        if sum != self.n_triples_total || topo != self.n_topology {
            return Err("per-predicate counts do not sum to totals".into());
        }
        Ok(())
    }

    pub(crate) fn write(&self, path: &Path) -> Result<(), StoreError> {
        let io = |e| StoreError::io(path, e);
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        w.write_all(CATALOG_MAGIC).map_err(io)?;
        format::put_u32(&mut w, FORMAT_VERSION).map_err(io)?;
        format::put_u32(&mut w, 0).map_err(io)?;
        for v in [
            self.n_triples_total,
            self.n_topology,
            self.n_attribute,
            self.n_entity_nodes,
            self.n_topology_edges,
            self.densification.to_bits(),
        ] {
            format::put_u64(&mut w, v).map_err(io)?;
        }
        format::put_str(&mut w, &self.dictionary_location).map_err(io)?;
        format::put_u64(&mut w, self.per_predicate.len() as u64).map_err(io)?;
        for (p, stats) in &self.per_predicate {
            for v in [p.0, stats.count, stats.topology] {
                format::put_u64(&mut w, v).map_err(io)?;
            }
        }
        let file = w.into_inner().map_err(|e| io(e.into_error()))?;
        file.sync_all().map_err(io)
    }

    pub(crate) fn read(path: &Path) -> Result<Self, StoreError> {
        let file = File::open(path).map_err(|e| StoreError::io(path, e))?;
        let mut r = BufReader::new(file);
        let bad = |msg: String| StoreError::integrity(path, msg);
        let trunc = |e: std::io::Error| bad(format!("truncated or malformed: {e}"));
        let mut magic = [0u8; 8];
        std::io::Read::read_exact(&mut r, &mut magic).map_err(trunc)?;
        if &magic != CATALOG_MAGIC {
            return Err(bad("bad magic bytes".into()));
        }
        let version = format::get_u32(&mut r).map_err(trunc)?;
        if version != FORMAT_VERSION {
            return Err(bad(format!("unsupported format version {version}")));
        }
        format::get_u32(&mut r).map_err(trunc)?;
        let mut next = || format::get_u64(&mut r).map_err(trunc);
        let mut cat = StoreCatalog {
            n_triples_total: next()?,
            n_topology: next()?,
            n_attribute: next()?,
            n_entity_nodes: next()?,
            n_topology_edges: next()?,
            densification: f64::from_bits(next()?),
            ..StoreCatalog::default()
        };
        cat.dictionary_location = format::get_str(&mut r).map_err(trunc)?;
        let n = format::get_u64(&mut r).map_err(trunc)?;
        for _ in 0..n {
            let p = TermId(format::get_u64(&mut r).map_err(trunc)?);
            let count = format::get_u64(&mut r).map_err(trunc)?;
            let topology = format::get_u64(&mut r).map_err(trunc)?;
            cat.per_predicate.insert(p, PredicateStats { count, topology });
        }
        let mut rest = [0u8; 1];
        if std::io::Read::read(&mut r, &mut rest).map_err(trunc)? != 0 {
            return Err(bad("trailing bytes".into()));
        }
        cat.check_consistency().map_err(bad)?;
        Ok(cat)
    }
}
