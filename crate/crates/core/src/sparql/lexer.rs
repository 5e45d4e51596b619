//! Tokenizer for the query subset.

use crate::error::QueryError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Iri(String),
    /// `prefix:local`; `local` may be empty.
    PName(String, String),
    /// Keyword or bare local name.
    Word(String),
    Var(String),
    Str(String),
    /// `@tag` directly after a string.
    Lang(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Iri(i) => format!("<{i}>"),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::Word(w) => format!("'{w}'"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Str(_) => "string literal".into(),
            Tok::Lang(l) => format!("@{l}"),
            Tok::Punct(p) => format!("'{p}'"),
            Tok::Eof => "end of input".into(),
        }
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(self, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const PUNCT: [&str; 12] = ["^^", "{", "}", "(", ")", ".", ",", "*", "+", "/", "|", "^"];

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut out = Vec::new();
    let err = |line, column, expected: &[&str], found: String| QueryError::Syntax {
        line,
        column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        let take_name = |from: usize| {
            let mut j = from;
            while j < chars.len() && is_name_char(chars[j]) {
                j += 1;
            }
            j
        };
        let (tok, len) = match c {
            '<' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '>' {
                    if chars[j].is_whitespace() || matches!(chars[j], '<' | '"' | '{' | '}') {
                        break;
                    }
                    j += 1;
                }
                if chars.get(j) != Some(&'>') {
                    return Err(err(line, col + (j - i), &["'>'"], found_at(&chars, j)));
                }
                (Tok::Iri(chars[i + 1..j].iter().collect()), j + 1 - i)
            }
            '?' | '$' if chars.get(i + 1).copied().is_some_and(is_name_char) => {
                let j = take_name(i + 1);
                (Tok::Var(chars[i + 1..j].iter().collect()), j - i)
            }
            '?' => (Tok::Punct("?"), 1),
            '"' | '\'' => {
                let (lexical, consumed) = string(&chars[i..]).map_err(|(off, msg)| {
                    err(line, col + off, &[msg], found_at(&chars, i + off))
                })?;
                (Tok::Str(lexical), consumed)
            }
            '@' if matches!(out.last(), Some(Spanned { tok: Tok::Str(_), .. })) => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '-') {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err(line, col + 1, &["language tag"], found_at(&chars, j)));
                }
                (Tok::Lang(chars[i + 1..j].iter().collect()), j - i)
            }
            _ if is_name_start(c) || c == ':' => {
                let j = if c == ':' { i } else { take_name(i) };
                if chars.get(j) == Some(&':') {
                    let k = take_name(j + 1);
                    let prefix = chars[i..j].iter().collect();
                    (Tok::PName(prefix, chars[j + 1..k].iter().collect()), k - i)
                } else {
                    (Tok::Word(chars[i..j].iter().collect()), j - i)
                }
            }
            _ => {
                let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                match PUNCT.iter().find(|p| rest.starts_with(**p)) {
                    Some(p) => (Tok::Punct(p), p.chars().count()),
                    None => return Err(err(line, col, &["token"], format!("'{c}'"))),
                }
            }
        };
        out.push(Spanned {
            tok,
            line: start.0,
            column: start.1,
        });
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

fn found_at(chars: &[char], i: usize) -> String {
    match chars.get(i) {
        Some(c) => format!("'{c}'"),
        None => "end of input".into(),
    }
}

/// Reads a quoted string starting at `s[0]`; returns the unescaped value
/// and the number of chars consumed, or an error offset and message.
fn string(s: &[char]) -> Result<(String, usize), (usize, &'static str)> {
    let quote = s[0];
    let mut out = String::new();
    let mut i = 1;
    loop {
        match s.get(i) {
            None | Some('\n') => return Err((i, "closing quote")),
            Some(&c) if c == quote => return Ok((out, i + 1)),
            Some('\\') => {
                let c = match s.get(i + 1) {
                    Some('t') => '\t',
                    Some('n') => '\n',
                    Some('r') => '\r',
                    Some('b') => '\u{8}',
                    Some('f') => '\u{c}',
                    Some(&c @ ('"' | '\'' | '\\')) => c,
                    Some(&k @ ('u' | 'U')) => {
                        let n = if k == 'u' { 4 } else { 8 };
                        let hex: String = s.get(i + 2..i + 2 + n).ok_or((i, "hex escape"))?.iter().collect();
                        let c = u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or((i, "hex escape"))?;
                        out.push(c);
                        i += 2 + n;
                        continue;
                    }
                    _ => return Err((i + 1, "escape sequence")),
                };
                out.push(c);
                i += 2;
            }
            Some(&c) => {
                out.push(c);
                i += 1;
            }
        }
    }
}
