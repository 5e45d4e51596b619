//! Line-oriented N-Triples tokenizer.

use std::io::BufRead;

use crate::error::SyntaxError;
use crate::term::Term;

/// One parsed statement with its 1-based source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub line: usize,
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

/// Parses a single N-Triples line. Blank and comment-only lines yield `None`.
pub fn parse_line(text: &str, line: usize) -> Result<Option<Statement>, SyntaxError> {
    let mut cur = Cursor::new(text, line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::BlankNode(cur.blank()?),
        _ => return Err(cur.error("expected IRI or blank node as subject")),
    };
    cur.skip_ws();
    let predicate = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        _ => return Err(cur.error("expected IRI as predicate")),
    };
    cur.skip_ws();
    let object = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::BlankNode(cur.blank()?),
        Some('"') => cur.literal()?,
        _ => return Err(cur.error("expected IRI, blank node or literal as object")),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err(cur.error("expected '.' to end the statement"));
    }
    cur.bump();
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(cur.error("unexpected content after '.'"));
    }
    Ok(Some(Statement {
        line,
        subject,
        predicate,
        object,
    }))
}

/// Streams statements from a reader, one line at a time.
pub struct NTriplesReader<R> {
    input: R,
    line: usize,
    buf: String,
    done: bool,
}

impl<R: BufRead> NTriplesReader<R> {
    pub fn new(input: R) -> Self {
        NTriplesReader {
            input,
            line: 0,
            buf: String::new(),
            done: false,
        }
    }

    pub fn line(&self) -> usize {
        self.line
    }
}

/// Either a syntax error (recoverable: the reader continues on the next
/// line) or an I/O error (the reader stops).
#[derive(Debug)]
pub enum ReadError {
    Syntax(SyntaxError),
    Io(std::io::Error),
}

impl<R: BufRead> Iterator for NTriplesReader<R> {
    type Item = Result<Statement, ReadError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.input.read_line(&mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    self.line += 1;
                    let text = self.buf.trim_end_matches(['\n', '\r']);
                    match parse_line(text, self.line) {
                        Ok(Some(st)) => return Some(Ok(st)),
                        Ok(None) => continue,
                        Err(e) => return Some(Err(ReadError::Syntax(e))),
                    }
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(ReadError::Io(e)));
                }
            }
        }
        None
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), SyntaxError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{want}'")))
        }
    }

    fn iri(&mut self) -> Result<String, SyntaxError> {
        self.expect('<')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => break,
                Some('\\') => out.push(self.uchar()?),
                Some(c)
                    if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') =>
                {
                    self.pos -= 1;
                    return Err(self.error(format!("character {c:?} not allowed in IRI")));
                }
                Some(c) => out.push(c),
            }
        }
        if out.is_empty() {
            return Err(self.error("empty IRI"));
        }
        Ok(out)
    }

    fn uchar(&mut self) -> Result<char, SyntaxError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape in IRI")),
        };
        self.hex(width)
    }

    fn hex(&mut self, width: usize) -> Result<char, SyntaxError> {
        let mut value = 0u32;
        for _ in 0..width {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error("invalid hex digit in escape"))?;
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| self.error("escape is not a valid code point"))
    }

    fn blank(&mut self) -> Result<String, SyntaxError> {
        self.expect('_')?;
        self.expect(':')?;
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphanumeric() || c == '_' => self.pos += 1,
            _ => return Err(self.error("invalid blank node label")),
        }
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\u{00B7}') {
                self.pos += 1;
            } else {
                break;
            }
        }
        // a label may not end with '.', which is then the statement terminator
        while self.pos > start + 1 && self.chars[self.pos - 1] == '.' {
            self.pos -= 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn literal(&mut self) -> Result<Term, SyntaxError> {
        self.expect('"')?;
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated string literal")),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex(4)?,
                        Some('U') => self.hex(8)?,
                        _ => return Err(self.error("invalid escape in string literal")),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(self.error("empty language tag"));
                }
                while self.peek() == Some('-') {
                    self.pos += 1;
                    let sub = self.pos;
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
                        self.pos += 1;
                    }
                    if self.pos == sub {
                        return Err(self.error("empty language subtag"));
                    }
                }
                let tag: String = self.chars[start..self.pos].iter().collect();
                Ok(Term::lang_literal(lexical, tag))
            }
            Some('^') => {
                self.pos += 1;
                self.expect('^')?;
                let dt = self.iri()?;
                Ok(Term::typed_literal(lexical, dt))
            }
            _ => Ok(Term::literal(lexical)),
        }
    }
}
