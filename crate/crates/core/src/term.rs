//! RDF terms and the interning dictionary.
//!
//! All indexes and closures downstream operate on dense [`TermId`] handles;
//! the [`TermStore`] is the only place holding term text. Construction is
//! single-writer (interning needs `&mut`); once built, a store is shared
//! immutably across materializer workers.

use crate::error::{Error, Result};
use crate::vocab;
use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

/// Dense handle for an interned [`Term`]. Ids are stable for the lifetime
/// of one store and count up from zero in interning order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermId(pub u32);

impl TermId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An IRI, blank node, or literal.
///
/// Literal equality is purely syntactic: `(lexical, datatype, lang)` triple
/// equality with no value-space normalization, so `"1939"^^xsd:integer` and
/// `"1939"` (an `xsd:string`) are distinct terms. Plain literals carry the
/// `xsd:string` datatype and language-tagged ones `rdf:langString`, matching
/// the RDF 1.1 abstract syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Iri(String),
    /// Label is document-scoped: parsers prefix it with a document ordinal
    /// so `_:b1` from two files interns to two distinct terms.
    Blank(String),
    Literal {
        lexical: String,
        datatype: String,
        lang: Option<String>,
    },
}

// Hash is written by hand so the borrowed TermRef below can mirror it
// exactly; the parsers look up terms without allocating.
impl std::hash::Hash for Term {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.as_ref().hash(state)
    }
}

impl Term {
    fn as_ref(&self) -> TermRef<'_> {
        match self {
            Term::Iri(iri) => TermRef::Iri(iri),
            Term::Blank(label) => TermRef::Blank(label),
            Term::Literal {
                lexical,
                datatype,
                lang,
            } => TermRef::Literal {
                lexical,
                datatype,
                lang: lang.as_deref(),
            },
        }
    }
}

/// Borrowed view of a [`Term`] for hash lookups without allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TermRef<'a> {
    Iri(&'a str),
    Blank(&'a str),
    Literal {
        lexical: &'a str,
        datatype: &'a str,
        lang: Option<&'a str>,
    },
}

impl std::hash::Hash for TermRef<'_> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match *self {
            TermRef::Iri(iri) => {
                state.write_u8(0);
                iri.hash(state);
            }
            TermRef::Blank(label) => {
                state.write_u8(1);
                label.hash(state);
            }
            TermRef::Literal {
                lexical,
                datatype,
                lang,
            } => {
                state.write_u8(2);
                lexical.hash(state);
                datatype.hash(state);
                lang.hash(state);
            }
        }
    }
}

impl indexmap::Equivalent<Term> for TermRef<'_> {
    fn equivalent(&self, key: &Term) -> bool {
        *self == key.as_ref()
    }
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Term {
        Term::Iri(value.into())
    }

    pub fn blank(label: impl Into<String>) -> Term {
        Term::Blank(label.into())
    }

    /// Plain literal; datatype defaults to `xsd:string`.
    pub fn literal(lexical: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: vocab::XSD_STRING.to_owned(),
            lang: None,
        }
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: datatype.into(),
            lang: None,
        }
    }

    pub fn lang_literal(lexical: impl Into<String>, lang: impl Into<String>) -> Term {
        Term::Literal {
            lexical: lexical.into(),
            datatype: vocab::RDF_LANG_STRING.to_owned(),
            lang: Some(lang.into()),
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal { .. })
    }

    fn validate(&self) -> Result<()> {
        match self {
            Term::Iri(iri) => {
                if iri.is_empty() {
                    return Err(Error::MalformedTerm("empty IRI".into()));
                }
                if iri.chars().any(|c| c.is_whitespace()) {
                    return Err(Error::MalformedTerm(format!(
                        "IRI <{iri}> contains whitespace"
                    )));
                }
            }
            Term::Blank(label) => {
                if label.is_empty() {
                    return Err(Error::MalformedTerm("empty blank node label".into()));
                }
            }
            Term::Literal { datatype, .. } => {
                if datatype.is_empty() {
                    return Err(Error::MalformedTerm("literal with empty datatype".into()));
                }
            }
        }
        Ok(())
    }
}

/// Interning dictionary: injective Term -> TermId, dense ids.
#[derive(Debug, Default)]
pub struct TermStore {
    terms: IndexSet<Term>,
}

impl TermStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the existing id if the term was seen before, else a fresh id
    /// equal to the current store size.
    pub fn intern(&mut self, term: Term) -> Result<TermId> {
        term.validate()?;
        let (index, _) = self.terms.insert_full(term);
        assert!(index < u32::MAX as usize, "term store exceeds u32 id space");
        Ok(TermId(index as u32))
    }

    /// Id of an already-interned term, if any.
    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.terms.get_index_of(term).map(|i| TermId(i as u32))
    }

    fn intern_ref(&mut self, r: TermRef<'_>, build: impl FnOnce() -> Term) -> TermId {
        if let Some(i) = self.terms.get_index_of(&r) {
            return TermId(i as u32);
        }
        let (index, _) = self.terms.insert_full(build());
        assert!(index < u32::MAX as usize, "term store exceeds u32 id space");
        TermId(index as u32)
    }

    /// Interns an IRI without allocating when it was seen before.
    pub fn intern_iri(&mut self, iri: &str) -> Result<TermId> {
        if iri.is_empty() || iri.chars().any(|c| c.is_whitespace()) {
            return Err(Error::MalformedTerm(format!("malformed IRI <{iri}>")));
        }
        Ok(self.intern_ref(TermRef::Iri(iri), || Term::Iri(iri.to_owned())))
    }

    /// Interns a (scoped) blank node label.
    pub fn intern_blank(&mut self, label: &str) -> Result<TermId> {
        if label.is_empty() {
            return Err(Error::MalformedTerm("empty blank node label".into()));
        }
        Ok(self.intern_ref(TermRef::Blank(label), || Term::Blank(label.to_owned())))
    }

    /// Interns a literal from its parts.
    pub fn intern_literal(
        &mut self,
        lexical: &str,
        datatype: &str,
        lang: Option<&str>,
    ) -> Result<TermId> {
        if datatype.is_empty() {
            return Err(Error::MalformedTerm("literal with empty datatype".into()));
        }
        Ok(self.intern_ref(
            TermRef::Literal {
                lexical,
                datatype,
                lang,
            },
            || Term::Literal {
                lexical: lexical.to_owned(),
                datatype: datatype.to_owned(),
                lang: lang.map(str::to_owned),
            },
        ))
    }

    /// Resolves an id issued by this store. Panics on an id that was never
    /// issued: that indicates internal corruption, not a recoverable state.
    pub fn resolve(&self, id: TermId) -> &Term {
        self.terms
            .get_index(id.index())
            .unwrap_or_else(|| panic!("TermId({}) was never issued by this store", id.0))
    }

    /// Non-panicking resolve, for callers validating foreign ids.
    pub fn get(&self, id: TermId) -> Option<&Term> {
        self.terms.get_index(id.index())
    }

    /// IRI text of `id`; panics if `id` is not an IRI.
    pub fn iri(&self, id: TermId) -> &str {
        match self.resolve(id) {
            Term::Iri(s) => s,
            other => panic!("TermId({}) is not an IRI: {other:?}", id.0),
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermId, &Term)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| (TermId(i as u32), t))
    }
}
