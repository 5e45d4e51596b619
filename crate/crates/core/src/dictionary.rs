//! Bijective term ↔ id encoding.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU16, Ordering};
use std::sync::OnceLock;

use crate::error::DictionaryError;
use crate::term::{Term, TermId};

static NEXT_TAG: OnceLock<AtomicU16> = OnceLock::new();

fn fresh_tag() -> u16 {
    let counter = NEXT_TAG.get_or_init(|| AtomicU16::new(rand::random::<u16>()));
    loop {
        let tag = counter.fetch_add(1, Ordering::Relaxed);
        if tag != 0 {
            return tag;
        }
    }
}

/// Interns terms to [`TermId`]s.
///
/// Single writer while loading; once [`seal`](Dictionary::seal)ed it is
/// immutable and can be shared by reference across threads.
#[derive(Debug, Clone)]
pub struct Dictionary {
    tag: u16,
    term_to_id: HashMap<Term, TermId>,
    // id_to_term[seq - 1]
    id_to_term: Vec<Term>,
    sealed: bool,
}

impl Default for Dictionary {
    fn default() -> Self {
        Self::new()
    }
}

impl Dictionary {
    pub fn new() -> Self {
        Self::with_tag(fresh_tag())
    }

    pub(crate) fn with_tag(tag: u16) -> Self {
        assert_ne!(tag, 0, "dictionary tag 0 would allow id 0");
        Dictionary {
            tag,
            term_to_id: HashMap::new(),
            id_to_term: Vec::new(),
            sealed: false,
        }
    }

    pub fn tag(&self) -> u16 {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.id_to_term.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_term.is_empty()
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    pub fn seal(&mut self) {
        self.sealed = true;
    }

    /// Returns the id of `term`, assigning the next id if it is new.
    pub fn intern(&mut self, term: Term) -> Result<TermId, DictionaryError> {
        if let Some(&id) = self.term_to_id.get(&term) {
            return Ok(id);
        }
        if self.sealed {
            return Err(DictionaryError::Sealed);
        }
        term.validate()?;
        let seq = self.id_to_term.len() as u64 + 1;
        if seq > TermId::SEQ_MASK {
            return Err(DictionaryError::Exhausted);
        }
        let id = TermId::compose(self.tag, seq);
        self.id_to_term.push(term.clone());
        self.term_to_id.insert(term, id);
        Ok(id)
    }

    /// Looks up an already-interned term without assigning.
    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.term_to_id.get(term).copied()
    }

    pub fn resolve(&self, id: TermId) -> Result<&Term, DictionaryError> {
        if !id.is_valid() {
            return Err(DictionaryError::Reserved(id));
        }
        if id.tag() != self.tag {
            return Err(DictionaryError::ForeignId {
                id,
                expected: self.tag,
                found: id.tag(),
            });
        }
        self.id_to_term
            .get((id.seq() - 1) as usize)
            .ok_or(DictionaryError::Unknown(id))
    }

    /// Terms in id order.
    pub fn iter(&self) -> impl Iterator<Item = (TermId, &Term)> + '_ {
        self.id_to_term
            .iter()
            .enumerate()
            .map(|(i, t)| (TermId::compose(self.tag, i as u64 + 1), t))
    }

    pub(crate) fn from_terms(tag: u16, terms: Vec<Term>) -> Result<Self, DictionaryError> {
        let mut dict = Dictionary::with_tag(tag);
        for term in terms {
            let before = dict.len();
            dict.intern(term)?;
            if dict.len() == before {
                return Err(DictionaryError::Duplicate(TermId::compose(tag, before as u64 + 1)));
            }
        }
        Ok(dict)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn intern_is_idempotent_and_injective() {
        let mut d = Dictionary::new();
        let a = d.intern(Term::iri("ex:P1")).unwrap();
        let a2 = d.intern(Term::iri("ex:P1")).unwrap();
        let b = d.intern(Term::iri("ex:P2")).unwrap();
        assert_eq!(a, a2);
        assert_ne!(a, b);
        assert_eq!(d.len(), 2);
        assert!(b > a);
    }

    #[test]
    fn resolve_round_trip_and_reserved() {
        let mut d = Dictionary::new();
        let id = d.intern(Term::iri("ex:P1")).unwrap();
        assert_eq!(d.resolve(id).unwrap(), &Term::iri("ex:P1"));
        assert_eq!(d.resolve(TermId(0)), Err(DictionaryError::Reserved(TermId(0))));
    }

    #[test]
    fn foreign_ids_are_detected() {
        let mut d1 = Dictionary::new();
        let mut d2 = Dictionary::new();
        let id1 = d1.intern(Term::iri("ex:a")).unwrap();
        d2.intern(Term::iri("ex:a")).unwrap();
        assert!(matches!(d2.resolve(id1), Err(DictionaryError::ForeignId { .. })));
    }

    #[test]
    fn unknown_id_within_own_space() {
        let d = Dictionary::new();
        let id = TermId::compose(d.tag(), 5);
        assert_eq!(d.resolve(id), Err(DictionaryError::Unknown(id)));
    }

    #[test]
    fn malformed_terms_are_rejected() {
        let mut d = Dictionary::new();
        assert!(d.intern(Term::iri("")).is_err());
        assert!(d.is_empty());
    }

    #[test]
    fn sealed_dictionary_still_answers_existing_terms() {
        let mut d = Dictionary::new();
        let id = d.intern(Term::iri("ex:a")).unwrap();
        d.seal();
        assert_eq!(d.intern(Term::iri("ex:a")).unwrap(), id);
        assert_eq!(d.intern(Term::iri("ex:b")), Err(DictionaryError::Sealed));
    }

    pub(crate) fn arb_term() -> impl Strategy<Value = Term> {
        let text = "[a-zA-Z0-9 :/#_\"\\\\\\n-]{0,12}";
        prop_oneof![
            "[a-z]{1,3}:[A-Za-z0-9/#_-]{0,10}".prop_map(Term::Iri),
            "[A-Za-z][A-Za-z0-9]{0,8}".prop_map(Term::BlankNode),
            text.prop_map(Term::literal),
            (text, "[a-z]{1,3}:[a-z]{1,6}").prop_map(|(l, d)| Term::typed_literal(l, d)),
            (text, "[a-z]{2}(-[A-Z]{2})?").prop_map(|(l, g)| Term::lang_literal(l, g)),
        ]
    }

    proptest! {
        #[test]
        fn round_trip_over_random_terms(terms in proptest::collection::vec(arb_term(), 1..1000)) {
            let mut d = Dictionary::new();
            let ids: Vec<_> = terms.iter().map(|t| d.intern(t.clone()).unwrap()).collect();
            for (t, id) in terms.iter().zip(&ids) {
                prop_assert_eq!(d.resolve(*id).unwrap(), t);
            }
            let distinct: std::collections::HashSet<_> = terms.iter().collect();
            prop_assert_eq!(d.len(), distinct.len());
        }
    }
}
