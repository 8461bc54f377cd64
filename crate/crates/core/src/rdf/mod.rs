//! Streaming RDF I/O: a Turtle-subset parser, a fast N-Triples parser,
//! and an N-Triples serializer.
//!
//! Parsers emit triples in document order and never buffer the document;
//! peak memory is the term dictionary plus constant-size buffers. Inputs
//! may be gzip-compressed (detected by magic bytes, not extension).
//!
//! One parser instance serves one file. Files can be parsed in parallel
//! against a shared store by wrapping it in a mutex around the interning
//! step (the only cross-thread contention point); give each file its own
//! `doc_id` so blank node labels stay document-scoped.

mod ntriples;
mod turtle;

pub use ntriples::{write_ntriples, NtParser, NtWriter};
pub use turtle::TurtleParser;

use crate::error::{Error, Result};
use crate::term::{TermId, TermStore};
use indexmap::IndexMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

/// One RDF triple over interned term handles.
///
/// Invariants: `predicate` is an IRI and `subject` is never a literal;
/// both are enforced at parse/build time, not by this struct.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: TermId,
    pub predicate: TermId,
    pub object: TermId,
}

impl Triple {
    pub fn new(subject: TermId, predicate: TermId, object: TermId) -> Self {
        Triple {
            subject,
            predicate,
            object,
        }
    }
}

/// Prefix label -> absolute namespace IRI.
#[derive(Debug, Clone, Default)]
pub struct PrefixMap {
    map: IndexMap<String, String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Later bindings of the same label shadow earlier ones, as in Turtle.
    pub fn insert(&mut self, label: impl Into<String>, namespace: impl Into<String>) {
        self.map.insert(label.into(), namespace.into());
    }

    pub fn resolve(&self, label: &str) -> Option<&str> {
        self.map.get(label).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Turtle,
    NTriples,
}

/// Format by file extension, looking through a trailing `.gz`.
/// Unknown extensions fall back to Turtle, which is a superset of the
/// N-Triples lines the engine consumes.
pub fn detect_format(path: &Path) -> Format {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    let name = name.strip_suffix(".gz").unwrap_or(name);
    if name.ends_with(".nt") || name.ends_with(".ntriples") {
        Format::NTriples
    } else {
        Format::Turtle
    }
}

/// Dataset name for report/manifest keys: file stem with `.gz` and the
/// format extension stripped (`clg_10.nt.gz` -> `clg_10`).
pub fn dataset_name(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    let name = name.strip_suffix(".gz").unwrap_or(name);
    for ext in [".nt", ".ntriples", ".ttl", ".turtle"] {
        if let Some(stem) = name.strip_suffix(ext) {
            return stem.to_owned();
        }
    }
    name.to_owned()
}

/// Opens a file for reading, transparently decompressing gzip input
/// (sniffed from the 1f 8b magic bytes).
pub fn open_reader(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::from_io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let magic = {
        let buf = reader.fill_buf().map_err(|e| Error::from_io(path, e))?;
        buf.len() >= 2 && buf[0] == 0x1f && buf[1] == 0x8b
    };
    if magic {
        let gz = flate2::bufread::GzDecoder::new(reader);
        Ok(Box::new(BufReader::with_capacity(1 << 16, gz)))
    } else {
        Ok(Box::new(reader))
    }
}

/// Pull-based triple source shared by both parsers.
pub trait TripleSource {
    /// Next triple in document order, or `None` at end of input.
    fn next_triple(&mut self, store: &mut TermStore) -> Result<Option<Triple>>;

    /// Prefixes declared so far (empty for N-Triples).
    fn prefixes(&self) -> &PrefixMap;
}

/// Parser for `reader` in the given format. `doc_id` scopes blank node
/// labels: the same `_:b1` in two documents interns to two distinct terms.
pub fn parser_for<R: BufRead + 'static>(
    reader: R,
    format: Format,
    file_label: &str,
    doc_id: u32,
) -> Box<dyn TripleSource> {
    match format {
        Format::Turtle => Box::new(TurtleParser::new(reader, file_label, doc_id)),
        Format::NTriples => Box::new(NtParser::new(reader, file_label, doc_id)),
    }
}

pub fn parser_for_path(path: &Path, doc_id: u32) -> Result<Box<dyn TripleSource>> {
    let reader = open_reader(path)?;
    Ok(parser_for(
        reader,
        detect_format(path),
        &path.display().to_string(),
        doc_id,
    ))
}

/// Parses a whole file into memory. Suits datasets that fit in RAM;
/// use [`stream_path`] for bounded-memory scans.
pub fn parse_path(
    path: &Path,
    store: &mut TermStore,
    doc_id: u32,
) -> Result<(Vec<Triple>, PrefixMap)> {
    let mut parser = parser_for_path(path, doc_id)?;
    let mut triples = Vec::new();
    while let Some(t) = parser.next_triple(store)? {
        triples.push(t);
    }
    Ok((triples, parser.prefixes().clone()))
}

/// Streams a file through `sink` without accumulating triples. The sink
/// also receives the store, which is not borrowed between triples.
/// Returns the number of triples seen.
pub fn stream_path(
    path: &Path,
    store: &mut TermStore,
    doc_id: u32,
    mut sink: impl FnMut(Triple, &TermStore) -> Result<()>,
) -> Result<u64> {
    let mut parser = parser_for_path(path, doc_id)?;
    let mut count = 0u64;
    while let Some(t) = parser.next_triple(store)? {
        sink(t, store)?;
        count += 1;
    }
    Ok(count)
}

/// Parses an in-memory document; test and tooling convenience.
pub fn parse_str(
    text: &str,
    format: Format,
    store: &mut TermStore,
    doc_id: u32,
) -> Result<(Vec<Triple>, PrefixMap)> {
    let mut parser = parser_for(
        std::io::Cursor::new(text.as_bytes().to_vec()),
        format,
        "<input>",
        doc_id,
    );
    let mut triples = Vec::new();
    while let Some(t) = parser.next_triple(store)? {
        triples.push(t);
    }
    Ok((triples, parser.prefixes().clone()))
}

/// Internal label for a user blank node label in document `doc_id`.
pub(crate) fn scoped_blank_label(doc_id: u32, label: &str) -> String {
    format!("d{doc_id}:{label}")
}

/// Internal label for the `n`-th generated (anonymous) blank node of a
/// document. The `g` sigil keeps generated labels disjoint from every
/// user label, which always scopes under `d`.
pub(crate) fn generated_blank_label(doc_id: u32, n: u64) -> String {
    format!("g{doc_id}:gen{n}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::term::Term;
    use proptest::prelude::*;
    use std::io::Write;

    const CLG_10: &str = include_str!("../../../../data/clg_10.ttl");

    fn parse_turtle(text: &str) -> (TermStore, Vec<Triple>, PrefixMap) {
        let mut store = TermStore::new();
        let (triples, prefixes) = parse_str(text, Format::Turtle, &mut store, 0).unwrap();
        (store, triples, prefixes)
    }

    #[test]
    fn sandbox_document_has_35_triples() {
        let (_, triples, prefixes) = parse_turtle(CLG_10);
        assert_eq!(triples.len(), 35);
        assert_eq!(prefixes.len(), 5);
        assert_eq!(prefixes.resolve("clgo"), Some("http://caligraph.org/ontology/"));
    }

    #[test]
    fn object_list_expands_to_shared_subject_predicate() {
        let text = r#"
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix clgo: <http://caligraph.org/ontology/> .
@prefix clgr: <http://caligraph.org/resource/> .
clgr:X a owl:NamedIndividual, clgo:C .
"#;
        let (mut store, triples, _) = parse_turtle(text);
        assert_eq!(triples.len(), 2);
        let x = store.intern(Term::iri("http://caligraph.org/resource/X")).unwrap();
        let ty = store.intern(Term::iri(crate::vocab::RDF_TYPE)).unwrap();
        assert!(triples.iter().all(|t| t.subject == x && t.predicate == ty));
        assert_ne!(triples[0].object, triples[1].object);
    }

    #[test]
    fn empty_document_is_empty() {
        let (_, triples, prefixes) = parse_turtle("");
        assert!(triples.is_empty());
        assert!(prefixes.is_empty());
        let (_, triples, _) = parse_turtle("# only a comment\n\n");
        assert!(triples.is_empty());
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let mut store = TermStore::new();
        let err = parse_str("<http://x.org/a> <http://x.org/p> ;", Format::Turtle, &mut store, 0)
            .unwrap_err();
        match err {
            Error::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col > 30);
            }
            other => panic!("expected syntax error, got {other}"),
        }
    }

    #[test]
    fn unknown_prefix_error_names_the_prefix() {
        let mut store = TermStore::new();
        let err = parse_str("mystery:a mystery:p mystery:o .", Format::Turtle, &mut store, 0)
            .unwrap_err();
        match err {
            Error::UnknownPrefix { prefix, .. } => assert_eq!(prefix, "mystery"),
            other => panic!("expected unknown prefix error, got {other}"),
        }
    }

    #[test]
    fn unsupported_constructs_are_rejected_clearly() {
        for (doc, what) in [
            ("@base <http://x.org/> .", "@base"),
            ("<http://x.org/a> <http://x.org/p> ( 1 2 ) .", "collection"),
            ("<http://x.org/a> <http://x.org/p> 1939 .", "numeric"),
            ("<http://x.org/a> <http://x.org/p> true .", "boolean"),
            ("PREFIX ex: <http://x.org/>", "PREFIX"),
            ("<http://x.org/a> <http://x.org/p> 'single' .", "single-quoted"),
        ] {
            let mut store = TermStore::new();
            let err = parse_str(doc, Format::Turtle, &mut store, 0).unwrap_err();
            match err {
                Error::Unsupported { what: w, .. } => {
                    assert!(w.contains(what), "{w:?} should mention {what:?}")
                }
                other => panic!("expected unsupported-construct error for {doc:?}, got {other}"),
            }
        }
    }

    #[test]
    fn non_utf8_input_reports_byte_offset() {
        let mut bytes = b"<http://x.org/a> <http://x.org/p> \"caf".to_vec();
        bytes.push(0xE9); // latin-1 e-acute, invalid UTF-8
        bytes.extend_from_slice(b"\" .\n");
        let mut store = TermStore::new();
        let mut parser = parser_for(
            std::io::Cursor::new(bytes.clone()),
            Format::Turtle,
            "<input>",
            0,
        );
        let err = parser.next_triple(&mut store).unwrap_err();
        match err {
            Error::Utf8 { offset, .. } => assert_eq!(offset, 38),
            other => panic!("expected utf8 error, got {other}"),
        }
        // same document through the N-Triples lane
        let mut parser = parser_for(std::io::Cursor::new(bytes), Format::NTriples, "<input>", 0);
        let err = parser.next_triple(&mut store).unwrap_err();
        assert!(matches!(err, Error::Utf8 { offset: 38, .. }));
    }

    #[test]
    fn anonymous_blank_nodes_expand_with_generated_labels() {
        let text = r#"
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
@prefix ex: <http://x.org/> .
ex:C rdfs:subClassOf [ a owl:Restriction ; owl:onProperty ex:p ; owl:hasValue ex:v ], _:user .
"#;
        let (store, triples, _) = parse_turtle(text);
        assert_eq!(triples.len(), 5);
        let anon_labels: Vec<&str> = triples
            .iter()
            .flat_map(|t| [t.subject, t.object])
            .filter_map(|id| match store.resolve(id) {
                Term::Blank(label) => Some(label.as_str()),
                _ => None,
            })
            .collect();
        assert!(anon_labels.iter().any(|l| l.starts_with("g0:")));
        assert!(anon_labels.iter().any(|l| l.starts_with("d0:")));
    }

    #[test]
    fn blank_labels_scope_per_document() {
        let mut store = TermStore::new();
        let (t1, _) = parse_str("_:b1 <http://x.org/p> <http://x.org/o> .", Format::Turtle, &mut store, 0).unwrap();
        let (t2, _) = parse_str("_:b1 <http://x.org/p> <http://x.org/o> .", Format::Turtle, &mut store, 1).unwrap();
        assert_ne!(t1[0].subject, t2[0].subject);
        assert_eq!(t1[0].predicate, t2[0].predicate);
    }

    #[test]
    fn digit_leading_local_names_and_unicode_parse() {
        let text = "@prefix clgr: <http://caligraph.org/resource/> .\nclgr:46th_Mixed_Brigade clgr:knows clgr:Dennis_Lyxz\u{e9}n .";
        let (store, triples, _) = parse_turtle(text);
        assert_eq!(triples.len(), 1);
        match store.resolve(triples[0].object) {
            Term::Iri(iri) => assert_eq!(iri, "http://caligraph.org/resource/Dennis_Lyxzén"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn local_name_escapes_unescape() {
        let text = r"@prefix ex: <http://x.org/> .
ex:AC\/DC ex:p ex:A\(B\) .";
        let (store, triples, _) = parse_turtle(text);
        match store.resolve(triples[0].subject) {
            Term::Iri(iri) => assert_eq!(iri, "http://x.org/AC/DC"),
            other => panic!("{other:?}"),
        }
        match store.resolve(triples[0].object) {
            Term::Iri(iri) => assert_eq!(iri, "http://x.org/A(B)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_unicode_escapes_are_errors_not_panics() {
        for doc in [
            "<http://x.org/a> <http://x.org/p> \"\\u12\u{e9}9\" .",
            "<http://x.org/a> <http://x.org/p> \"\\u12\" .",
            "<http://x.org/a\\uZZZZ> <http://x.org/p> <http://x.org/o> .",
        ] {
            let mut store = TermStore::new();
            let err = parse_str(doc, Format::NTriples, &mut store, 0).unwrap_err();
            assert!(matches!(err, Error::Syntax { .. }), "{doc:?} -> {err}");
        }
    }

    #[test]
    fn literal_with_embedded_quote_round_trips() {
        let mut store = TermStore::new();
        let s = store.intern(Term::iri("http://x.org/s")).unwrap();
        let p = store.intern(Term::iri("http://x.org/p")).unwrap();
        let o = store
            .intern(Term::literal("he said \"hi\"\nand left\ttab\\slash"))
            .unwrap();
        let triples = vec![Triple::new(s, p, o)];
        let bytes = write_ntriples(Vec::new(), &store, &triples).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains(r#"\"hi\""#));
        let mut store2 = TermStore::new();
        let (reparsed, _) = parse_str(&text, Format::NTriples, &mut store2, 0).unwrap();
        assert_eq!(reparsed.len(), 1);
        assert_eq!(store2.resolve(reparsed[0].object), store.resolve(o));
    }

    #[test]
    fn serialize_empty_set_is_empty_output() {
        let store = TermStore::new();
        let bytes = write_ntriples(Vec::new(), &store, &[]).unwrap();
        assert!(bytes.is_empty());
    }

    #[test]
    fn sandbox_round_trip_is_isomorphic() {
        let (store, triples, _) = parse_turtle(CLG_10);
        let bytes = write_ntriples(Vec::new(), &store, &triples).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let mut store2 = TermStore::new();
        let (reparsed, _) = parse_str(&text, Format::NTriples, &mut store2, 0).unwrap();
        assert_eq!(reparsed.len(), triples.len());
        // blank-node-free triples must match exactly after resolution;
        // blank nodes must map bijectively
        let mut blank_map: std::collections::HashMap<String, String> = Default::default();
        let mut blank_rev: std::collections::HashMap<String, String> = Default::default();
        for (a, b) in triples.iter().zip(reparsed.iter()) {
            for (x, y) in [(a.subject, b.subject), (a.predicate, b.predicate), (a.object, b.object)] {
                match (store.resolve(x), store2.resolve(y)) {
                    (Term::Blank(l1), Term::Blank(l2)) => {
                        let fwd = blank_map.entry(l1.clone()).or_insert_with(|| l2.clone());
                        assert_eq!(fwd, l2);
                        let rev = blank_rev.entry(l2.clone()).or_insert_with(|| l1.clone());
                        assert_eq!(rev, l1);
                    }
                    (t1, t2) => assert_eq!(t1, t2),
                }
            }
        }
    }

    #[test]
    fn gzip_input_is_sniffed_by_magic_bytes() {
        let dir = tempfile::tempdir().unwrap();
        // .ttl extension but gzip content: magic bytes decide compression
        let path = dir.path().join("sandbox.ttl");
        let f = std::fs::File::create(&path).unwrap();
        let mut gz = flate2::write::GzEncoder::new(f, flate2::Compression::default());
        gz.write_all(CLG_10.as_bytes()).unwrap();
        gz.finish().unwrap();

        let mut store = TermStore::new();
        let (triples, _) = parse_path(&path, &mut store, 0).unwrap();
        assert_eq!(triples.len(), 35);
    }

    #[test]
    fn format_and_name_detection() {
        assert_eq!(detect_format(Path::new("x/clg_10.nt")), Format::NTriples);
        assert_eq!(detect_format(Path::new("x/clg_10.nt.gz")), Format::NTriples);
        assert_eq!(detect_format(Path::new("x/clg_10.ttl")), Format::Turtle);
        assert_eq!(detect_format(Path::new("x/clg_10.ttl.gz")), Format::Turtle);
        assert_eq!(dataset_name(Path::new("x/clg_10.nt.gz")), "clg_10");
        assert_eq!(dataset_name(Path::new("clg_10e5.ttl")), "clg_10e5");
    }

    #[test]
    fn trailing_semicolon_and_repeats_parse() {
        let text = r#"
@prefix ex: <http://x.org/> .
ex:a ex:p ex:b ; ; ex:q ex:c ; .
"#;
        let (_, triples, _) = parse_turtle(text);
        assert_eq!(triples.len(), 2);
    }

    #[test]
    fn long_strings_support_newlines_and_quotes() {
        let text = "@prefix ex: <http://x.org/> .\nex:a ex:p \"\"\"line one\nline \"two\"\"\"\"@en .";
        let (store, triples, _) = parse_turtle(text);
        match store.resolve(triples[0].object) {
            Term::Literal { lexical, lang, .. } => {
                assert_eq!(lexical, "line one\nline \"two\"");
                assert_eq!(lang.as_deref(), Some("en"));
            }
            other => panic!("{other:?}"),
        }
    }

    fn arb_nt_term(blanks: bool) -> impl Strategy<Value = Term> {
        let iri = "[a-z]{1,8}".prop_map(|s| Term::iri(format!("http://x.org/{s}")));
        let blank = "[a-z0-9]{1,6}".prop_map(|l| Term::blank(format!("d0:{l}")));
        let lit = (
            "\\PC{0,12}",
            prop_oneof![
                Just(None),
                Just(Some(crate::vocab::XSD_INTEGER.to_owned())),
            ],
            prop_oneof![Just(None), Just(Some("en".to_owned()))],
        )
            .prop_map(|(lex, dt, lang)| match (dt, lang) {
                (_, Some(l)) => Term::lang_literal(lex, l),
                (Some(d), None) => Term::typed_literal(lex, d),
                (None, None) => Term::literal(lex),
            });
        if blanks {
            prop_oneof![iri, blank, lit].boxed()
        } else {
            prop_oneof![iri, lit].boxed()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn random_triple_sets_round_trip(
            spec in proptest::collection::vec(
                (arb_nt_term(true), arb_nt_term(false), arb_nt_term(true)),
                0..25
            )
        ) {
            let mut store = TermStore::new();
            let mut triples = Vec::new();
            for (s, p, o) in spec {
                let s = match s { Term::Literal { .. } => Term::iri("http://x.org/s"), t => t };
                let p = match p { Term::Iri(_) => p, _ => Term::iri("http://x.org/p") };
                let s = store.intern(s).unwrap();
                let p = store.intern(p).unwrap();
                let o = store.intern(o).unwrap();
                triples.push(Triple::new(s, p, o));
            }
            let bytes = write_ntriples(Vec::new(), &store, &triples).unwrap();
            let text = String::from_utf8(bytes).unwrap();
            let mut store2 = TermStore::new();
            let (reparsed, _) = parse_str(&text, Format::NTriples, &mut store2, 0).unwrap();
            prop_assert_eq!(reparsed.len(), triples.len());
            let mut fwd: std::collections::HashMap<String, String> = Default::default();
            let mut rev: std::collections::HashMap<String, String> = Default::default();
            for (a, b) in triples.iter().zip(reparsed.iter()) {
                for (x, y) in [(a.subject, b.subject), (a.predicate, b.predicate), (a.object, b.object)] {
                    match (store.resolve(x), store2.resolve(y)) {
                        (Term::Blank(l1), Term::Blank(l2)) => {
                            let f = fwd.entry(l1.clone()).or_insert_with(|| l2.clone());
                            prop_assert_eq!(&*f, l2);
                            let r = rev.entry(l2.clone()).or_insert_with(|| l1.clone());
                            prop_assert_eq!(&*r, l1);
                        }
                        (t1, t2) => prop_assert_eq!(t1, t2),
                    }
                }
            }
        }
    }
}
