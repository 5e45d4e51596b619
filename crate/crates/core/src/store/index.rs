use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

use memmap2::Mmap;

use super::format::{self, FORMAT_VERSION, HEADER_LEN, INDEX_MAGIC, RECORD_LEN};
use crate::error::StoreError;
use crate::term::{TermId, Triple};

/// Component order of a permutation index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexOrder {
    Spo,
    Pos,
    Osp,
}

impl IndexOrder {
    pub const ALL: [IndexOrder; 3] = [IndexOrder::Spo, IndexOrder::Pos, IndexOrder::Osp];

    pub fn file_name(self) -> &'static str {
        match self {
            IndexOrder::Spo => "spo.idx",
            IndexOrder::Pos => "pos.idx",
            IndexOrder::Osp => "osp.idx",
        }
    }

    fn code(self) -> u8 {
        match self {
            IndexOrder::Spo => 0,
            IndexOrder::Pos => 1,
            IndexOrder::Osp => 2,
        }
    }

    pub fn key(self, t: &Triple) -> [u64; 3] {
        let (s, p, o) = (t.s.0, t.p.0, t.o.0);
        match self {
            IndexOrder::Spo => [s, p, o],
            IndexOrder::Pos => [p, o, s],
            IndexOrder::Osp => [o, s, p],
        }
    }

    pub fn triple(self, key: [u64; 3]) -> Triple {
        let [a, b, c] = key.map(TermId);
        match self {
            IndexOrder::Spo => Triple::new(a, b, c),
            IndexOrder::Pos => Triple::new(c, a, b),
            IndexOrder::Osp => Triple::new(b, c, a),
        }
    }
}

pub(crate) fn write_index(path: &Path, order: IndexOrder, triples: &[Triple]) -> Result<(), StoreError> {
    let io = |e| StoreError::io(path, e);
    let mut keys: Vec<[u64; 3]> = triples.iter().map(|t| order.key(t)).collect();
    keys.sort_unstable();
    keys.dedup();
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    w.write_all(INDEX_MAGIC).map_err(io)?;
    format::put_u32(&mut w, FORMAT_VERSION).map_err(io)?;
    w.write_all(&[order.code(), 0, 0, 0]).map_err(io)?;
    format::put_u64(&mut w, keys.len() as u64).map_err(io)?;
    for key in &keys {
        for part in key {
            format::put_u64(&mut w, *part).map_err(io)?;
        }
    }
    let file = w.into_inner().map_err(|e| io(e.into_error()))?;
    file.sync_all().map_err(io)
}

/// A sealed, memory-mapped permutation index.
#[derive(Debug)]
pub struct IndexFile {
    order: IndexOrder,
    path: PathBuf,
    map: Mmap,
    len: usize,
}

impl IndexFile {
    pub(crate) fn open(path: &Path, order: IndexOrder) -> Result<Self, StoreError> {
        let file = File::open(path).map_err(|e| StoreError::io(path, e))?;
        // Safety: sealed stores are never written again; the map is read-only.
        let map = unsafe { Mmap::map(&file) }.map_err(|e| StoreError::io(path, e))?;
        let bad = |msg: &str| StoreError::integrity(path, msg);
        if map.len() < HEADER_LEN || &map[..8] != INDEX_MAGIC {
            return Err(bad("bad magic bytes"));
        }
        let version = u32::from_le_bytes(map[8..12].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(bad(&format!("unsupported format version {version}")));
        }
        if map[12] != order.code() || map[13..16] != [0, 0, 0] {
            return Err(bad("index ordering does not match file name"));
        }
        let count = u64::from_le_bytes(map[16..24].try_into().unwrap()) as usize;
        if map.len() != HEADER_LEN + count * RECORD_LEN {
            return Err(bad("file length does not match record count"));
        }
        let index = IndexFile {
            order,
            path: path.to_path_buf(),
            map,
            len: count,
        };
        if (1..count).any(|i| index.key(i - 1) >= index.key(i)) {
            return Err(bad("records are not strictly ascending"));
        }
        Ok(index)
    }

    pub fn order(&self) -> IndexOrder {
        self.order
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    #[inline]
    pub fn key(&self, i: usize) -> [u64; 3] {
        let base = HEADER_LEN + i * RECORD_LEN;
        let rec = &self.map[base..base + RECORD_LEN];
        let word = |k: usize| u64::from_le_bytes(rec[k * 8..k * 8 + 8].try_into().unwrap());
        [word(0), word(1), word(2)]
    }

    pub fn triple(&self, i: usize) -> Triple {
        self.order.triple(self.key(i))
    }

    /// Record positions whose key starts with `prefix` (0 to 3 components).
    pub fn prefix_range(&self, prefix: &[u64]) -> Range<usize> {
        debug_assert!(prefix.len() <= 3);
        let cmp_prefix = |i: usize| self.key(i)[..prefix.len()].cmp(prefix);
        let start = partition_point(self.len, |i| cmp_prefix(i).is_lt());
        let end = start + partition_point(self.len - start, |j| cmp_prefix(start + j).is_le());
        start..end
    }
}

fn partition_point(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}
