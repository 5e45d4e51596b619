//! On-disk layout. All integers little-endian.
//!
//! ```text
//! spo.idx / pos.idx / osp.idx
//!   0  magic    "PTRIPIDX"
//!   8  version  u32
//!   12 ordering u8 (0 SPO, 1 POS, 2 OSP), 3 bytes zero
//!   16 count    u64
//!   24 count × 24-byte records: three u64 ids in the index's key order,
//!      strictly ascending
//!
//! dict.bin
//!   0  magic    "PTRIPDIC"
//!   8  version  u32
//!   12 tag      u16, 2 bytes zero
//!   16 count    u64
//!   24 count entries in id order:
//!      kind u8 (0 IRI, 1 blank node, 2 literal)
//!      literal only: flags u8 (bit 0 datatype, bit 1 language)
//!      lexical, then datatype / language if flagged: u32 length + UTF-8
//!
//! catalog.bin
//!   0  magic    "PTRIPCAT"
//!   8  version  u32, 4 bytes zero
//!   16 nTriplesTotal, nTopology, nAttribute, nEntityNodes, nTopologyEdges: u64
//!   56 densification c: f64
//!   64 dictionary location: u32 length + UTF-8
//!      nPredicates u64, then per predicate (ascending id):
//!      predicate u64, count u64, topologyCount u64
//! ```

use std::io::{self, Read, Write};

use crate::term::Term;

pub const FORMAT_VERSION: u32 = 1;
pub const INDEX_MAGIC: &[u8; 8] = b"PTRIPIDX";
pub const DICT_MAGIC: &[u8; 8] = b"PTRIPDIC";
pub const CATALOG_MAGIC: &[u8; 8] = b"PTRIPCAT";
pub const HEADER_LEN: usize = 24;
pub const RECORD_LEN: usize = 24;

pub const CATALOG_FILE: &str = "catalog.bin";
pub const DICT_FILE: &str = "dict.bin";
pub const PARTIAL_MARKER: &str = "partial.marker";

pub(crate) fn put_u64(w: &mut impl Write, v: u64) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub(crate) fn put_u32(w: &mut impl Write, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

pub(crate) fn put_str(w: &mut impl Write, s: &str) -> io::Result<()> {
    let len = u32::try_from(s.len())
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "string longer than 4 GiB"))?;
    put_u32(w, len)?;
    w.write_all(s.as_bytes())
}

pub(crate) fn get_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub(crate) fn get_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub(crate) fn get_u8(r: &mut impl Read) -> io::Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

pub(crate) fn get_str(r: &mut impl Read) -> io::Result<String> {
    let len = get_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

pub(crate) fn put_term(w: &mut impl Write, term: &Term) -> io::Result<()> {
    match term {
        Term::Iri(iri) => {
            w.write_all(&[0])?;
            put_str(w, iri)
        }
        Term::BlankNode(label) => {
            w.write_all(&[1])?;
            put_str(w, label)
        }
        Term::Literal {
            lexical,
            datatype,
            language,
        } => {
            let flags = u8::from(datatype.is_some()) | (u8::from(language.is_some()) << 1);
            w.write_all(&[2, flags])?;
            put_str(w, lexical)?;
            if let Some(dt) = datatype {
                put_str(w, dt)?;
            }
            if let Some(lang) = language {
                put_str(w, lang)?;
            }
            Ok(())
        }
    }
}

pub(crate) fn get_term(r: &mut impl Read) -> io::Result<Term> {
    match get_u8(r)? {
        0 => Ok(Term::Iri(get_str(r)?)),
        1 => Ok(Term::BlankNode(get_str(r)?)),
        2 => {
            let flags = get_u8(r)?;
            if flags & !0b11 != 0 {
                return Err(io::Error::new(io::ErrorKind::InvalidData, "bad literal flags"));
            }
            let lexical = get_str(r)?;
            let datatype = if flags & 1 != 0 { Some(get_str(r)?) } else { None };
            let language = if flags & 2 != 0 { Some(get_str(r)?) } else { None };
            Ok(Term::Literal {
                lexical,
                datatype,
                language,
            })
        }
        kind => Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unknown term kind {kind}"),
        )),
    }
}
