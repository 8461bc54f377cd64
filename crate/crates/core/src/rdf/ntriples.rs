//! Line-oriented N-Triples reader and writer.
//!
//! The reader is the fast path for multi-million-triple dumps: one triple
//! per line, no prefix machinery, byte-level scanning over a reusable
//! line buffer. The writer emits canonical escaping, UTF-8, `\n` line
//! endings, and relabels blank nodes into a fresh `_:b{n}` sequence.

use super::{scoped_blank_label, PrefixMap, Triple, TripleSource};
use crate::error::{Error, Result};
use crate::term::{Term, TermId, TermStore};
use crate::vocab;
use std::collections::HashMap;
use std::io::{BufRead, Write};

pub struct NtParser<R: BufRead> {
    inner: R,
    file: String,
    doc_id: u32,
    buf: Vec<u8>,
    line_no: u64,
    /// Absolute byte offset of the current line start.
    line_offset: u64,
    prefixes: PrefixMap,
    done: bool,
}

impl<R: BufRead> NtParser<R> {
    pub fn new(inner: R, file_label: &str, doc_id: u32) -> Self {
        NtParser {
            inner,
            file: file_label.to_owned(),
            doc_id,
            buf: Vec::with_capacity(256),
            line_no: 0,
            line_offset: 0,
            prefixes: PrefixMap::new(),
            done: false,
        }
    }

    fn syntax_err<T>(&self, col: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            file: self.file.clone(),
            line: self.line_no,
            col: col as u64 + 1,
            msg: msg.into(),
        })
    }
}

/// Cursor over one line of text.
struct Cur<'a> {
    s: &'a str,
    i: usize,
}

impl<'a> Cur<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.as_bytes().get(self.i).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t') | Some(b'\r')) {
            self.i += 1;
        }
    }

    fn at_end_or_comment(&self) -> bool {
        matches!(self.peek(), None | Some(b'#'))
    }
}

fn unescape_unicode(cur: &mut Cur, digits: usize) -> Option<char> {
    let end = cur.i + digits;
    if end > cur.s.len() || !cur.s.is_char_boundary(end) {
        return None;
    }
    let v = u32::from_str_radix(&cur.s[cur.i..end], 16).ok()?;
    cur.i = end;
    char::from_u32(v)
}

impl<R: BufRead> NtParser<R> {
    fn scan_iri(&self, cur: &mut Cur) -> Result<String> {
        let start = cur.i;
        debug_assert_eq!(cur.peek(), Some(b'<'));
        cur.i += 1;
        let mut out = String::new();
        loop {
            match cur.peek() {
                None => return self.syntax_err(start, "unterminated IRI"),
                Some(b'>') => {
                    cur.i += 1;
                    return Ok(out);
                }
                Some(b'\\') => {
                    cur.i += 1;
                    match cur.peek() {
                        Some(b'u') => {
                            cur.i += 1;
                            match unescape_unicode(cur, 4) {
                                Some(c) => out.push(c),
                                None => return self.syntax_err(cur.i, "bad \\u escape in IRI"),
                            }
                        }
                        Some(b'U') => {
                            cur.i += 1;
                            match unescape_unicode(cur, 8) {
                                Some(c) => out.push(c),
                                None => return self.syntax_err(cur.i, "bad \\U escape in IRI"),
                            }
                        }
                        _ => return self.syntax_err(cur.i, "invalid IRI escape (only \\u/\\U)"),
                    }
                }
                Some(c) if c == b' ' || c == b'\t' => {
                    return self.syntax_err(cur.i, "whitespace in IRI")
                }
                Some(_) => {
                    // copy one full UTF-8 char
                    let ch = cur.s[cur.i..].chars().next().expect("valid utf8");
                    out.push(ch);
                    cur.i += ch.len_utf8();
                }
            }
        }
    }

    fn scan_blank(&self, cur: &mut Cur) -> Result<String> {
        let start = cur.i;
        cur.i += 1; // '_'
        if cur.peek() != Some(b':') {
            return self.syntax_err(start, "expected `:` in blank node label");
        }
        cur.i += 1;
        let begin = cur.i;
        while let Some(c) = cur.peek() {
            let ch = cur.s[cur.i..].chars().next().expect("valid utf8");
            if ch.is_alphanumeric() || c == b'_' || c == b'-' {
                cur.i += ch.len_utf8();
            } else if c == b'.' {
                // dot belongs to the label only if the label continues
                let next = cur.s[cur.i + 1..].chars().next();
                match next {
                    Some(n) if n.is_alphanumeric() || n == '_' || n == '-' || n == '.' => {
                        cur.i += 1;
                    }
                    _ => break,
                }
            } else {
                break;
            }
        }
        if cur.i == begin {
            return self.syntax_err(start, "empty blank node label");
        }
        Ok(cur.s[begin..cur.i].to_owned())
    }

    fn scan_literal(&self, cur: &mut Cur, store: &mut TermStore) -> Result<TermId> {
        let start = cur.i;
        cur.i += 1; // '"'
        let mut lexical = String::new();
        loop {
            match cur.peek() {
                None => return self.syntax_err(start, "unterminated literal"),
                Some(b'"') => {
                    cur.i += 1;
                    break;
                }
                Some(b'\\') => {
                    cur.i += 1;
                    let c = match cur.peek() {
                        Some(b't') => '\t',
                        Some(b'b') => '\u{8}',
                        Some(b'n') => '\n',
                        Some(b'r') => '\r',
                        Some(b'f') => '\u{C}',
                        Some(b'"') => '"',
                        Some(b'\'') => '\'',
                        Some(b'\\') => '\\',
                        Some(b'u') => {
                            cur.i += 1;
                            match unescape_unicode(cur, 4) {
                                Some(c) => {
                                    lexical.push(c);
                                    continue;
                                }
                                None => return self.syntax_err(cur.i, "bad \\u escape"),
                            }
                        }
                        Some(b'U') => {
                            cur.i += 1;
                            match unescape_unicode(cur, 8) {
                                Some(c) => {
                                    lexical.push(c);
                                    continue;
                                }
                                None => return self.syntax_err(cur.i, "bad \\U escape"),
                            }
                        }
                        other => {
                            return self.syntax_err(cur.i, format!("invalid escape {other:?}"))
                        }
                    };
                    lexical.push(c);
                    cur.i += 1;
                }
                Some(_) => {
                    let ch = cur.s[cur.i..].chars().next().expect("valid utf8");
                    lexical.push(ch);
                    cur.i += ch.len_utf8();
                }
            }
        }
        match cur.peek() {
            Some(b'^') => {
                cur.i += 1;
                if cur.peek() != Some(b'^') {
                    return self.syntax_err(cur.i, "expected `^^` before datatype");
                }
                cur.i += 1;
                if cur.peek() != Some(b'<') {
                    return self.syntax_err(cur.i, "datatype must be an absolute IRI");
                }
                let dt = self.scan_iri(cur)?;
                store.intern_literal(&lexical, &dt, None)
            }
            Some(b'@') => {
                cur.i += 1;
                let begin = cur.i;
                while let Some(c) = cur.peek() {
                    if c.is_ascii_alphanumeric() || c == b'-' {
                        cur.i += 1;
                    } else {
                        break;
                    }
                }
                if cur.i == begin {
                    return self.syntax_err(begin, "empty language tag");
                }
                let lang = cur.s[begin..cur.i].to_owned();
                store.intern_literal(&lexical, vocab::RDF_LANG_STRING, Some(&lang))
            }
            _ => store.intern_literal(&lexical, vocab::XSD_STRING, None),
        }
    }
}

impl<R: BufRead> TripleSource for NtParser<R> {
    fn next_triple(&mut self, store: &mut TermStore) -> Result<Option<Triple>> {
        loop {
            if self.done {
                return Ok(None);
            }
            self.buf.clear();
            self.line_offset += {
                let n = self.inner.read_until(b'\n', &mut self.buf)?;
                if n == 0 {
                    self.done = true;
                    return Ok(None);
                }
                n as u64
            };
            self.line_no += 1;
            let line = match std::str::from_utf8(&self.buf) {
                Ok(s) => s,
                Err(e) => {
                    let consumed = self.buf.len() as u64;
                    return Err(Error::Utf8 {
                        file: self.file.clone(),
                        offset: self.line_offset - consumed + e.valid_up_to() as u64,
                    });
                }
            };
            let line = line.strip_suffix('\n').unwrap_or(line);
            let mut cur = Cur { s: line, i: 0 };
            cur.skip_ws();
            if cur.at_end_or_comment() {
                continue;
            }
            let subject = match cur.peek() {
                Some(b'<') => {
                    let iri = self.scan_iri(&mut cur)?;
                    store.intern_iri(&iri)?
                }
                Some(b'_') => {
                    let label = self.scan_blank(&mut cur)?;
                    store.intern_blank(&scoped_blank_label(self.doc_id, &label))?
                }
                Some(b'"') => return self.syntax_err(cur.i, "literal cannot be a subject"),
                _ => return self.syntax_err(cur.i, "expected subject"),
            };
            cur.skip_ws();
            let predicate = match cur.peek() {
                Some(b'<') => {
                    let iri = self.scan_iri(&mut cur)?;
                    store.intern_iri(&iri)?
                }
                _ => return self.syntax_err(cur.i, "expected predicate IRI"),
            };
            cur.skip_ws();
            let object = match cur.peek() {
                Some(b'<') => {
                    let iri = self.scan_iri(&mut cur)?;
                    store.intern_iri(&iri)?
                }
                Some(b'_') => {
                    let label = self.scan_blank(&mut cur)?;
                    store.intern_blank(&scoped_blank_label(self.doc_id, &label))?
                }
                Some(b'"') => self.scan_literal(&mut cur, store)?,
                _ => return self.syntax_err(cur.i, "expected object"),
            };
            cur.skip_ws();
            if cur.peek() != Some(b'.') {
                return self.syntax_err(cur.i, "expected `.` at end of triple");
            }
            cur.i += 1;
            cur.skip_ws();
            if !cur.at_end_or_comment() {
                return self.syntax_err(cur.i, "trailing content after `.`");
            }
            return Ok(Some(Triple::new(subject, predicate, object)));
        }
    }

    fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }
}

/// Appends canonical N-Triples escaping of `s` to `out`.
fn escape_literal_into(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
}

/// N-Triples serializer. Blank nodes are relabeled `_:b0, _:b1, ...` in
/// order of first appearance, so output never leaks the parser's
/// document-scoped internal labels.
pub struct NtWriter<W: Write> {
    out: W,
    blank_labels: HashMap<TermId, u64>,
    line: String,
}

impl<W: Write> NtWriter<W> {
    pub fn new(out: W) -> Self {
        NtWriter {
            out,
            blank_labels: HashMap::new(),
            line: String::with_capacity(256),
        }
    }

    fn push_term(&mut self, store: &TermStore, id: TermId) {
        match store.resolve(id) {
            Term::Iri(iri) => {
                self.line.push('<');
                self.line.push_str(iri);
                self.line.push('>');
            }
            Term::Blank(_) => {
                let next = self.blank_labels.len() as u64;
                let n = *self.blank_labels.entry(id).or_insert(next);
                self.line.push_str("_:b");
                self.line.push_str(&n.to_string());
            }
            Term::Literal {
                lexical,
                datatype,
                lang,
            } => {
                self.line.push('"');
                escape_literal_into(lexical, &mut self.line);
                self.line.push('"');
                if let Some(lang) = lang {
                    self.line.push('@');
                    self.line.push_str(lang);
                } else if datatype != vocab::XSD_STRING {
                    self.line.push_str("^^<");
                    self.line.push_str(datatype);
                    self.line.push('>');
                }
            }
        }
    }

    pub fn write_triple(&mut self, store: &TermStore, triple: &Triple) -> Result<()> {
        self.line.clear();
        self.push_term(store, triple.subject);
        self.line.push(' ');
        self.push_term(store, triple.predicate);
        self.line.push(' ');
        self.push_term(store, triple.object);
        self.line.push_str(" .\n");
        self.out.write_all(self.line.as_bytes())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Serializes `triples` in the given order to `out`.
pub fn write_ntriples<W: Write>(out: W, store: &TermStore, triples: &[Triple]) -> Result<W> {
    let mut w = NtWriter::new(out);
    for t in triples {
        w.write_triple(store, t)?;
    }
    w.finish()
}
