//! Streaming parser for the Turtle subset used by large class-hierarchy
//! dumps: `@prefix`, prefixed names, angle-bracket IRIs, the `a` keyword,
//! object and predicate-object lists, labeled and anonymous blank nodes,
//! typed/plain/language-tagged literals, and `#` comments.
//!
//! Collections `( )`, numeric/boolean literal shorthand, and `@base` are
//! outside the subset and rejected with an "unsupported construct" error.
//! Anonymous `[ ... ]` property lists expand to generated blank node
//! labels in a reserved namespace disjoint from user labels.

use super::{generated_blank_label, scoped_blank_label, PrefixMap, Triple, TripleSource};
use crate::error::{Error, Result};
use crate::term::TermStore;
use crate::vocab;
use std::collections::VecDeque;
use std::io::BufRead;

/// Incremental UTF-8 decoder over a byte stream with line/column/offset
/// tracking. Holds one chunk of decoded text plus at most three carry
/// bytes for a split code point.
struct CharReader<R: BufRead> {
    inner: R,
    window: String,
    pos: usize,
    carry: Vec<u8>,
    lookahead: Option<char>,
    /// Absolute byte offset of the next unread char.
    offset: u64,
    /// Position (1-based) of the next unread char.
    line: u64,
    col: u64,
    at_eof: bool,
    file: String,
}

const CHUNK: usize = 1 << 16;

impl<R: BufRead> CharReader<R> {
    fn new(inner: R, file: &str) -> Self {
        CharReader {
            inner,
            window: String::new(),
            pos: 0,
            carry: Vec::new(),
            lookahead: None,
            offset: 0,
            line: 1,
            col: 1,
            at_eof: false,
            file: file.to_owned(),
        }
    }

    fn refill(&mut self) -> Result<()> {
        // a pending lookahead char was decoded but not yet counted into
        // `offset`; error offsets must account for it
        let pending = self.lookahead.map(|c| c.len_utf8() as u64).unwrap_or(0);
        let mut buf = std::mem::take(&mut self.carry);
        let start = buf.len();
        buf.resize(start + CHUNK, 0);
        let n = self.inner.read(&mut buf[start..])?;
        buf.truncate(start + n);
        if n == 0 {
            self.at_eof = true;
            if !buf.is_empty() {
                return Err(Error::Utf8 {
                    file: self.file.clone(),
                    offset: self.offset + pending,
                });
            }
            return Ok(());
        }
        match std::str::from_utf8(&buf) {
            Ok(s) => {
                self.window = s.to_owned();
                self.pos = 0;
            }
            Err(e) => {
                let valid = e.valid_up_to();
                if e.error_len().is_some() {
                    return Err(Error::Utf8 {
                        file: self.file.clone(),
                        offset: self.offset + pending + valid as u64,
                    });
                }
                self.carry = buf.split_off(valid);
                self.window = String::from_utf8(buf).expect("validated prefix");
                self.pos = 0;
            }
        }
        Ok(())
    }

    fn decode_next(&mut self) -> Result<Option<char>> {
        loop {
            if self.pos < self.window.len() {
                let ch = self.window[self.pos..].chars().next().expect("in bounds");
                self.pos += ch.len_utf8();
                return Ok(Some(ch));
            }
            if self.at_eof {
                return Ok(None);
            }
            self.refill()?;
        }
    }

    /// Next char without consuming it.
    fn peek(&mut self) -> Result<Option<char>> {
        if self.lookahead.is_none() {
            self.lookahead = self.decode_next()?;
        }
        Ok(self.lookahead)
    }

    /// Consumes and returns the next char, updating position.
    fn next(&mut self) -> Result<Option<char>> {
        let ch = match self.lookahead.take() {
            Some(c) => Some(c),
            None => self.decode_next()?,
        };
        if let Some(c) = ch {
            self.offset += c.len_utf8() as u64;
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        Ok(ch)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Dot,
    Semi,
    Comma,
    LBracket,
    RBracket,
    PrefixDecl,
    A,
    Iri(String),
    PName { prefix: String, local: String },
    Blank(String),
    Literal {
        lexical: String,
        datatype: Option<String>,
        lang: Option<String>,
    },
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: u64,
    col: u64,
}

pub struct TurtleParser<R: BufRead> {
    chars: CharReader<R>,
    file: String,
    doc_id: u32,
    prefixes: PrefixMap,
    pending: VecDeque<Triple>,
    pushed_back: Option<(Tok, Pos)>,
    gen_counter: u64,
    done: bool,
}

fn is_pn_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-' || c == '\u{00B7}'
}

/// Chars valid inside a prefixed-name local part (colons allowed).
fn is_local_char(c: char) -> bool {
    is_pn_char(c) || c == ':'
}

const LOCAL_ESCAPABLE: &str = "_~.-!$&'()*+,;=/?#@%";

impl<R: BufRead> TurtleParser<R> {
    pub fn new(reader: R, file_label: &str, doc_id: u32) -> Self {
        TurtleParser {
            chars: CharReader::new(reader, file_label),
            file: file_label.to_owned(),
            doc_id,
            prefixes: PrefixMap::new(),
            pending: VecDeque::new(),
            pushed_back: None,
            gen_counter: 0,
            done: false,
        }
    }

    fn syntax_err<T>(&self, pos: Pos, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            file: self.file.clone(),
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        })
    }

    fn unsupported<T>(&self, pos: Pos, what: impl Into<String>) -> Result<T> {
        Err(Error::Unsupported {
            file: self.file.clone(),
            line: pos.line,
            col: pos.col,
            what: what.into(),
        })
    }

    fn here(&self) -> Pos {
        Pos {
            line: self.chars.line,
            col: self.chars.col,
        }
    }

    // ----- lexer -----

    fn skip_ws_and_comments(&mut self) -> Result<()> {
        loop {
            match self.chars.peek()? {
                Some(c) if c.is_whitespace() => {
                    self.chars.next()?;
                }
                Some('#') => {
                    while let Some(c) = self.chars.next()? {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<(Tok, Pos)> {
        if let Some(t) = self.pushed_back.take() {
            return Ok(t);
        }
        self.skip_ws_and_comments()?;
        let pos = self.here();
        let c = match self.chars.peek()? {
            None => return Ok((Tok::Eof, pos)),
            Some(c) => c,
        };
        let tok = match c {
            '.' => {
                self.chars.next()?;
                Tok::Dot
            }
            ';' => {
                self.chars.next()?;
                Tok::Semi
            }
            ',' => {
                self.chars.next()?;
                Tok::Comma
            }
            '[' => {
                self.chars.next()?;
                Tok::LBracket
            }
            ']' => {
                self.chars.next()?;
                Tok::RBracket
            }
            '(' | ')' => return self.unsupported(pos, "RDF collection `( )`"),
            '<' => self.lex_iriref(pos)?,
            '"' => self.lex_string(pos)?,
            '\'' => return self.unsupported(pos, "single-quoted string"),
            '@' => self.lex_directive(pos)?,
            '_' => self.lex_blank(pos)?,
            ':' => {
                self.chars.next()?;
                let local = self.lex_name_chars(true)?;
                Tok::PName {
                    prefix: String::new(),
                    local,
                }
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => {
                return self.unsupported(pos, format!("numeric literal shorthand starting with {c:?}"))
            }
            c if is_pn_char(c) => self.lex_word(pos)?,
            other => return self.syntax_err(pos, format!("unexpected character {other:?}")),
        };
        Ok((tok, pos))
    }

    fn push_back(&mut self, tok: Tok, pos: Pos) {
        debug_assert!(self.pushed_back.is_none());
        self.pushed_back = Some((tok, pos));
    }

    fn lex_iriref(&mut self, pos: Pos) -> Result<Tok> {
        self.chars.next()?; // '<'
        let mut iri = String::new();
        loop {
            match self.chars.next()? {
                None => return self.syntax_err(pos, "unterminated IRI"),
                Some('>') => break,
                Some('\\') => {
                    let here = self.here();
                    match self.chars.next()? {
                        Some('u') => iri.push(self.lex_unicode_escape(4, here)?),
                        Some('U') => iri.push(self.lex_unicode_escape(8, here)?),
                        other => {
                            return self.syntax_err(
                                here,
                                format!("invalid IRI escape {other:?} (only \\u/\\U allowed)"),
                            )
                        }
                    }
                }
                Some(c) if c.is_whitespace() || c.is_control() => {
                    return self.syntax_err(pos, format!("whitespace or control char {c:?} in IRI"))
                }
                Some(c) => iri.push(c),
            }
        }
        Ok(Tok::Iri(iri))
    }

    fn lex_unicode_escape(&mut self, digits: u32, pos: Pos) -> Result<char> {
        let mut v: u32 = 0;
        for _ in 0..digits {
            let c = self
                .chars
                .next()?
                .ok_or(())
                .or_else(|_| self.syntax_err(pos, "truncated unicode escape"))?;
            let d = c
                .to_digit(16)
                .ok_or(())
                .or_else(|_| self.syntax_err(pos, format!("bad hex digit {c:?} in unicode escape")))?;
            v = v * 16 + d;
        }
        char::from_u32(v)
            .ok_or(())
            .or_else(|_| self.syntax_err(pos, format!("invalid code point U+{v:04X}")))
    }

    fn lex_string_escape(&mut self, pos: Pos) -> Result<char> {
        match self.chars.next()? {
            Some('t') => Ok('\t'),
            Some('b') => Ok('\u{8}'),
            Some('n') => Ok('\n'),
            Some('r') => Ok('\r'),
            Some('f') => Ok('\u{C}'),
            Some('"') => Ok('"'),
            Some('\'') => Ok('\''),
            Some('\\') => Ok('\\'),
            Some('u') => self.lex_unicode_escape(4, pos),
            Some('U') => self.lex_unicode_escape(8, pos),
            other => self.syntax_err(pos, format!("invalid string escape {other:?}")),
        }
    }

    fn lex_string(&mut self, pos: Pos) -> Result<Tok> {
        self.chars.next()?; // opening '"'
        let mut lexical = String::new();
        if self.chars.peek()? == Some('"') {
            self.chars.next()?;
            if self.chars.peek()? == Some('"') {
                // long string """..."""; quotes directly before the
                // terminator belong to the content, so the closing run
                // is the last three quotes of a quote run
                self.chars.next()?;
                let mut quotes = 0u8;
                loop {
                    match self.chars.next()? {
                        None => return self.syntax_err(pos, "unterminated long string"),
                        Some('"') => {
                            quotes += 1;
                            if quotes == 3 && self.chars.peek()? != Some('"') {
                                break;
                            }
                            if quotes == 4 {
                                // shift one quote into the content
                                lexical.push('"');
                                quotes = 3;
                                if self.chars.peek()? != Some('"') {
                                    break;
                                }
                            }
                        }
                        Some(c) => {
                            for _ in 0..quotes {
                                lexical.push('"');
                            }
                            quotes = 0;
                            if c == '\\' {
                                let here = self.here();
                                lexical.push(self.lex_string_escape(here)?);
                            } else {
                                lexical.push(c);
                            }
                        }
                    }
                }
            }
            // else: empty short string, fall through
        } else {
            loop {
                match self.chars.next()? {
                    None => return self.syntax_err(pos, "unterminated string"),
                    Some('"') => break,
                    Some('\n') | Some('\r') => {
                        return self.syntax_err(pos, "newline in single-line string")
                    }
                    Some('\\') => {
                        let here = self.here();
                        lexical.push(self.lex_string_escape(here)?);
                    }
                    Some(c) => lexical.push(c),
                }
            }
        }
        // optional language tag or datatype, attached without whitespace
        match self.chars.peek()? {
            Some('@') => {
                self.chars.next()?;
                let mut lang = String::new();
                while let Some(c) = self.chars.peek()? {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        lang.push(c);
                        self.chars.next()?;
                    } else {
                        break;
                    }
                }
                if lang.is_empty() {
                    return self.syntax_err(pos, "empty language tag");
                }
                Ok(Tok::Literal {
                    lexical,
                    datatype: None,
                    lang: Some(lang),
                })
            }
            Some('^') => {
                self.chars.next()?;
                let here = self.here();
                if self.chars.next()? != Some('^') {
                    return self.syntax_err(here, "expected `^^` before datatype");
                }
                let (dt_tok, dt_pos) = self.next_token()?;
                let datatype = match dt_tok {
                    Tok::Iri(iri) => iri,
                    Tok::PName { prefix, local } => self.resolve_pname(&prefix, &local, dt_pos)?,
                    other => {
                        return self.syntax_err(dt_pos, format!("expected datatype IRI, found {other:?}"))
                    }
                };
                Ok(Tok::Literal {
                    lexical,
                    datatype: Some(datatype),
                    lang: None,
                })
            }
            _ => Ok(Tok::Literal {
                lexical,
                datatype: None,
                lang: None,
            }),
        }
    }

    fn lex_directive(&mut self, pos: Pos) -> Result<Tok> {
        self.chars.next()?; // '@'
        let mut word = String::new();
        while let Some(c) = self.chars.peek()? {
            if c.is_ascii_alphabetic() {
                word.push(c);
                self.chars.next()?;
            } else {
                break;
            }
        }
        match word.as_str() {
            "prefix" => Ok(Tok::PrefixDecl),
            "base" => self.unsupported(pos, "`@base` directive"),
            other => self.syntax_err(pos, format!("unknown directive `@{other}`")),
        }
    }

    fn lex_blank(&mut self, pos: Pos) -> Result<Tok> {
        self.chars.next()?; // '_'
        if self.chars.next()? != Some(':') {
            return self.syntax_err(pos, "expected `:` after `_` in blank node label");
        }
        let label = self.lex_name_chars(false)?;
        if label.is_empty() {
            return self.syntax_err(pos, "empty blank node label");
        }
        Ok(Tok::Blank(scoped_blank_label(self.doc_id, &label)))
    }

    /// Scans name characters with the trailing-dot rule: a `.` belongs to
    /// the name only when the char after it continues the name.
    fn lex_name_chars(&mut self, local: bool) -> Result<String> {
        let mut out = String::new();
        loop {
            match self.chars.peek()? {
                Some(c) if (local && is_local_char(c)) || (!local && is_pn_char(c)) => {
                    out.push(c);
                    self.chars.next()?;
                }
                Some('.') => {
                    // need one more char of lookahead: consume the dot
                    // provisionally only if the name continues
                    self.chars.next()?;
                    match self.chars.peek()? {
                        Some(n)
                            if (local && (is_local_char(n) || n == '%' || n == '\\'))
                                || (!local && is_pn_char(n))
                                || n == '.' =>
                        {
                            out.push('.');
                        }
                        _ => {
                            // statement-terminating dot; hand it back as a token
                            self.push_back(
                                Tok::Dot,
                                Pos {
                                    line: self.chars.line,
                                    col: self.chars.col.saturating_sub(1),
                                },
                            );
                            return Ok(out);
                        }
                    }
                }
                Some('%') if local => {
                    self.chars.next()?;
                    let here = self.here();
                    let mut hex = String::from("%");
                    for _ in 0..2 {
                        match self.chars.next()? {
                            Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                            other => {
                                return self.syntax_err(
                                    here,
                                    format!("bad percent escape `%{other:?}` in local name"),
                                )
                            }
                        }
                    }
                    out.push_str(&hex);
                }
                Some('\\') if local => {
                    self.chars.next()?;
                    let here = self.here();
                    match self.chars.next()? {
                        Some(c) if LOCAL_ESCAPABLE.contains(c) => out.push(c),
                        other => {
                            return self.syntax_err(
                                here,
                                format!("invalid local name escape \\{other:?}"),
                            )
                        }
                    }
                }
                _ => return Ok(out),
            }
        }
    }

    fn lex_word(&mut self, pos: Pos) -> Result<Tok> {
        let word = self.lex_name_chars(false)?;
        if self.chars.peek()? == Some(':') {
            self.chars.next()?;
            let local = self.lex_name_chars(true)?;
            return Ok(Tok::PName {
                prefix: word,
                local,
            });
        }
        match word.as_str() {
            "a" => Ok(Tok::A),
            "true" | "false" => self.unsupported(pos, "boolean literal shorthand"),
            "PREFIX" | "BASE" => {
                self.unsupported(pos, format!("SPARQL-style `{word}` directive (use `@prefix`)"))
            }
            other => self.syntax_err(pos, format!("unexpected token `{other}`")),
        }
    }

    // ----- parser -----

    fn resolve_pname(&self, prefix: &str, local: &str, pos: Pos) -> Result<String> {
        match self.prefixes.resolve(prefix) {
            Some(ns) => Ok(format!("{ns}{local}")),
            None => Err(Error::UnknownPrefix {
                file: self.file.clone(),
                line: pos.line,
                col: pos.col,
                prefix: prefix.to_owned(),
            }),
        }
    }

    fn parse_prefix_directive(&mut self) -> Result<()> {
        let (tok, pos) = self.next_token()?;
        let label = match tok {
            Tok::PName { prefix, local } if local.is_empty() => prefix,
            other => return self.syntax_err(pos, format!("expected `label:` after @prefix, found {other:?}")),
        };
        let (tok, pos) = self.next_token()?;
        let ns = match tok {
            Tok::Iri(iri) => iri,
            other => return self.syntax_err(pos, format!("expected IRI after @prefix label, found {other:?}")),
        };
        let (tok, pos) = self.next_token()?;
        if tok != Tok::Dot {
            return self.syntax_err(pos, format!("expected `.` after @prefix directive, found {tok:?}"));
        }
        self.prefixes.insert(label, ns);
        Ok(())
    }

    fn fresh_anon(&mut self, store: &mut TermStore) -> Result<crate::term::TermId> {
        let label = generated_blank_label(self.doc_id, self.gen_counter);
        self.gen_counter += 1;
        store.intern(crate::term::Term::blank(label))
    }

    /// Parses `[ predObjList? ]` after the `[` token, emitting the inner
    /// triples, and returns the generated anchor node.
    fn parse_anon(&mut self, store: &mut TermStore) -> Result<crate::term::TermId> {
        let anon = self.fresh_anon(store)?;
        let (tok, pos) = self.next_token()?;
        if tok == Tok::RBracket {
            return Ok(anon);
        }
        self.push_back(tok, pos);
        self.parse_pred_obj_list(store, anon)?;
        let (tok, pos) = self.next_token()?;
        if tok != Tok::RBracket {
            return self.syntax_err(pos, format!("expected `]`, found {tok:?}"));
        }
        Ok(anon)
    }

    fn parse_subject(&mut self, store: &mut TermStore, tok: Tok, pos: Pos) -> Result<crate::term::TermId> {
        match tok {
            Tok::Iri(iri) => store.intern(crate::term::Term::iri(iri)),
            Tok::PName { prefix, local } => {
                let iri = self.resolve_pname(&prefix, &local, pos)?;
                store.intern(crate::term::Term::iri(iri))
            }
            Tok::Blank(label) => store.intern(crate::term::Term::blank(label)),
            Tok::LBracket => self.parse_anon(store),
            Tok::Literal { .. } => self.syntax_err(pos, "literal cannot be a subject"),
            other => self.syntax_err(pos, format!("expected subject, found {other:?}")),
        }
    }

    fn parse_verb(&mut self, store: &mut TermStore) -> Result<crate::term::TermId> {
        let (tok, pos) = self.next_token()?;
        match tok {
            Tok::A => store.intern(crate::term::Term::iri(vocab::RDF_TYPE)),
            Tok::Iri(iri) => store.intern(crate::term::Term::iri(iri)),
            Tok::PName { prefix, local } => {
                let iri = self.resolve_pname(&prefix, &local, pos)?;
                store.intern(crate::term::Term::iri(iri))
            }
            other => self.syntax_err(pos, format!("expected predicate, found {other:?}")),
        }
    }

    fn parse_object(&mut self, store: &mut TermStore) -> Result<crate::term::TermId> {
        let (tok, pos) = self.next_token()?;
        match tok {
            Tok::Iri(iri) => store.intern(crate::term::Term::iri(iri)),
            Tok::PName { prefix, local } => {
                let iri = self.resolve_pname(&prefix, &local, pos)?;
                store.intern(crate::term::Term::iri(iri))
            }
            Tok::Blank(label) => store.intern(crate::term::Term::blank(label)),
            Tok::LBracket => self.parse_anon(store),
            Tok::Literal {
                lexical,
                datatype,
                lang,
            } => {
                let term = match (datatype, lang) {
                    (_, Some(l)) => crate::term::Term::lang_literal(lexical, l),
                    (Some(dt), None) => crate::term::Term::typed_literal(lexical, dt),
                    (None, None) => crate::term::Term::literal(lexical),
                };
                store.intern(term)
            }
            other => self.syntax_err(pos, format!("expected object, found {other:?}")),
        }
    }

    fn parse_object_list(&mut self, store: &mut TermStore, subject: crate::term::TermId, verb: crate::term::TermId) -> Result<()> {
        loop {
            let object = self.parse_object(store)?;
            self.pending.push_back(Triple::new(subject, verb, object));
            let (tok, pos) = self.next_token()?;
            if tok == Tok::Comma {
                continue;
            }
            self.push_back(tok, pos);
            return Ok(());
        }
    }

    fn parse_pred_obj_list(&mut self, store: &mut TermStore, subject: crate::term::TermId) -> Result<()> {
        loop {
            let verb = self.parse_verb(store)?;
            self.parse_object_list(store, subject, verb)?;
            let (tok, pos) = self.next_token()?;
            if tok != Tok::Semi {
                self.push_back(tok, pos);
                return Ok(());
            }
            // swallow repeated semicolons and a trailing one
            loop {
                let (tok, pos) = self.next_token()?;
                if tok != Tok::Semi {
                    match tok {
                        Tok::Dot | Tok::RBracket | Tok::Eof => {
                            self.push_back(tok, pos);
                            return Ok(());
                        }
                        _ => {
                            self.push_back(tok, pos);
                            break;
                        }
                    }
                }
            }
        }
    }

    fn parse_statement(&mut self, store: &mut TermStore) -> Result<()> {
        let (tok, pos) = self.next_token()?;
        match tok {
            Tok::Eof => {
                self.done = true;
                Ok(())
            }
            Tok::PrefixDecl => self.parse_prefix_directive(),
            tok => {
                let subject = self.parse_subject(store, tok, pos)?;
                self.parse_pred_obj_list(store, subject)?;
                let (tok, pos) = self.next_token()?;
                if tok != Tok::Dot {
                    return self.syntax_err(pos, format!("expected `.` at end of statement, found {tok:?}"));
                }
                Ok(())
            }
        }
    }
}

impl<R: BufRead> TripleSource for TurtleParser<R> {
    fn next_triple(&mut self, store: &mut TermStore) -> Result<Option<Triple>> {
        loop {
            if let Some(t) = self.pending.pop_front() {
                return Ok(Some(t));
            }
            if self.done {
                return Ok(None);
            }
            self.parse_statement(store)?;
        }
    }

    fn prefixes(&self) -> &PrefixMap {
        &self.prefixes
    }
}
