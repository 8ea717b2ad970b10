//! Parser for Erlang term files: `.app.src`, `sys.config`, and friends.
//!
//! Reads a sequence of dot-terminated literal terms. Only data is allowed —
//! variables, macros, and reserved words are errors, matching what
//! `file:consult/1` would accept.

use std::fmt;

use thiserror::Error;

use crate::form::{is_punct, significant};
use crate::lexer::{atom_value, string_value, tokenize, Token, TokenKind};

/// A literal Erlang term. Maps preserve entry order; binaries are reduced to
/// their textual content, which is all the analysis ever needs.
#[derive(Debug, Clone, PartialEq)]
pub enum TermValue {
    Atom(String),
    Integer(i64),
    Float(f64),
    String(String),
    List(Vec<TermValue>),
    Tuple(Vec<TermValue>),
    Map(Vec<(TermValue, TermValue)>),
    Binary(String),
}

impl TermValue {
    /// The name an atom-like term denotes, if any. Strings are accepted so
    /// ignore lists may spell names either way.
    pub fn as_name(&self) -> Option<&str> {
        match self {
            TermValue::Atom(s) | TermValue::String(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            TermValue::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[TermValue]> {
        match self {
            TermValue::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[TermValue]> {
        match self {
            TermValue::Tuple(items) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for TermValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermValue::Atom(s) => write!(f, "{s}"),
            TermValue::Integer(n) => write!(f, "{n}"),
            TermValue::Float(x) => write!(f, "{x}"),
            TermValue::String(s) => write!(f, "\"{s}\""),
            TermValue::Binary(s) => write!(f, "<<\"{s}\">>"),
            TermValue::List(items) => {
                write!(f, "[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, "]")
            }
            TermValue::Tuple(items) => {
                write!(f, "{{")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, "}}")
            }
            TermValue::Map(pairs) => {
                write!(f, "#{{")?;
                for (i, (k, v)) in pairs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k} => {v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct TermError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

/// Parses every term in `source`. Each term must end with a dot.
pub fn read_terms(source: &str) -> Result<Vec<TermValue>, TermError> {
    let tokens = tokenize(source).map_err(|e| TermError {
        line: e.line,
        column: e.column,
        message: format!("unterminated {}", e.what),
    })?;
    let sig = significant(&tokens);
    let mut parser = TermParser { toks: &sig, pos: 0 };
    let mut terms = Vec::new();
    while !parser.at_end() {
        terms.push(parser.term()?);
        parser.expect_dot()?;
    }
    Ok(terms)
}

/// Parses a complete term out of an attribute body. Trailing tokens are an
/// error: the caller wants exactly one term.
pub(crate) fn from_tokens(sig: &[&Token]) -> Result<TermValue, TermError> {
    let mut parser = TermParser { toks: sig, pos: 0 };
    let term = parser.term()?;
    if !parser.at_end() {
        return Err(parser.error("trailing tokens after term"));
    }
    Ok(term)
}

struct TermParser<'a, 'b> {
    toks: &'a [&'b Token],
    pos: usize,
}

impl TermParser<'_, '_> {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos).copied()
    }

    fn advance(&mut self) -> Option<&Token> {
        let tok = self.toks.get(self.pos).copied();
        self.pos += 1;
        tok
    }

    /// Position for error reporting: the current token, or just past the
    /// last one at EOF.
    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or((1, 1), |t| (t.line, t.column))
    }

    fn error(&self, message: impl Into<String>) -> TermError {
        let (line, column) = self.here();
        TermError { line, column, message: message.into() }
    }

    fn expect_punct(&mut self, text: &str) -> Result<(), TermError> {
        match self.peek() {
            Some(tok) if is_punct(tok, text) => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(self.error(format!("expected `{text}`, found `{}`", tok.text))),
            None => Err(self.error(format!("expected `{text}`, found end of input"))),
        }
    }

    fn expect_dot(&mut self) -> Result<(), TermError> {
        match self.peek() {
            Some(tok) if tok.kind == TokenKind::Dot => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(self.error(format!("expected `.`, found `{}`", tok.text))),
            None => Err(self.error("expected `.`, found end of input")),
        }
    }

    fn term(&mut self) -> Result<TermValue, TermError> {
        let Some(tok) = self.peek() else {
            return Err(self.error("expected term, found end of input"));
        };
        match tok.kind {
            TokenKind::Atom => {
                let value = atom_value(&tok.text);
                self.pos += 1;
                Ok(TermValue::Atom(value))
            }
            TokenKind::Integer => {
                let value = parse_integer(&tok.text).ok_or_else(|| {
                    self.error(format!("invalid integer literal `{}`", tok.text))
                })?;
                self.pos += 1;
                Ok(TermValue::Integer(value))
            }
            TokenKind::Float => {
                let value = tok.text.replace('_', "").parse::<f64>().map_err(|_| {
                    self.error(format!("invalid float literal `{}`", tok.text))
                })?;
                self.pos += 1;
                Ok(TermValue::Float(value))
            }
            TokenKind::String => self.string_run(),
            TokenKind::Char => {
                let value = char_code(&tok.text)
                    .ok_or_else(|| self.error(format!("invalid character `{}`", tok.text)))?;
                self.pos += 1;
                Ok(TermValue::Integer(value))
            }
            TokenKind::Punct => match tok.text.as_str() {
                "-" | "+" => self.signed(),
                "[" => self.list(),
                "{" => self.tuple(),
                "#" => self.map(),
                "<<" => self.binary(),
                other => Err(self.error(format!("unexpected `{other}` in term"))),
            },
            TokenKind::Variable => Err(self.error("variable not allowed in term")),
            TokenKind::MacroMarker => Err(self.error("macro not allowed in term")),
            TokenKind::Keyword => {
                Err(self.error(format!("reserved word `{}` not allowed in term", tok.text)))
            }
            TokenKind::Dot => Err(self.error("expected term, found `.`")),
            TokenKind::Comment | TokenKind::Whitespace => unreachable!("trivia filtered out"),
        }
    }

    fn signed(&mut self) -> Result<TermValue, TermError> {
        let negative = self.advance().map(|t| t.text == "-").unwrap_or(false);
        match self.term()? {
            TermValue::Integer(n) => {
                Ok(TermValue::Integer(if negative { -n } else { n }))
            }
            TermValue::Float(x) => Ok(TermValue::Float(if negative { -x } else { x })),
            _ => Err(self.error("sign must precede a number")),
        }
    }

    /// Adjacent string literals concatenate, as in `"a" "b"`.
    fn string_run(&mut self) -> Result<TermValue, TermError> {
        let mut value = String::new();
        while let Some(tok) = self.peek() {
            if tok.kind != TokenKind::String {
                break;
            }
            value.push_str(&string_value(&tok.text));
            self.pos += 1;
        }
        Ok(TermValue::String(value))
    }

    fn list(&mut self) -> Result<TermValue, TermError> {
        self.expect_punct("[")?;
        let mut items = Vec::new();
        if matches!(self.peek(), Some(t) if is_punct(t, "]")) {
            self.pos += 1;
            return Ok(TermValue::List(items));
        }
        loop {
            items.push(self.term()?);
            match self.peek() {
                Some(t) if is_punct(t, ",") => {
                    self.pos += 1;
                }
                Some(t) if is_punct(t, "|") => {
                    self.pos += 1;
                    // Only a proper tail keeps this a list we can represent.
                    match self.term()? {
                        TermValue::List(tail) => items.extend(tail),
                        _ => return Err(self.error("improper list tail")),
                    }
                    self.expect_punct("]")?;
                    return Ok(TermValue::List(items));
                }
                Some(t) if is_punct(t, "]") => {
                    self.pos += 1;
                    return Ok(TermValue::List(items));
                }
                Some(t) => {
                    return Err(self.error(format!("expected `,` or `]`, found `{}`", t.text)))
                }
                None => return Err(self.error("unterminated list")),
            }
        }
    }

    fn tuple(&mut self) -> Result<TermValue, TermError> {
        self.expect_punct("{")?;
        let mut items = Vec::new();
        if matches!(self.peek(), Some(t) if is_punct(t, "}")) {
            self.pos += 1;
            return Ok(TermValue::Tuple(items));
        }
        loop {
            items.push(self.term()?);
            match self.peek() {
                Some(t) if is_punct(t, ",") => {
                    self.pos += 1;
                }
                Some(t) if is_punct(t, "}") => {
                    self.pos += 1;
                    return Ok(TermValue::Tuple(items));
                }
                Some(t) => {
                    return Err(self.error(format!("expected `,` or `}}`, found `{}`", t.text)))
                }
                None => return Err(self.error("unterminated tuple")),
            }
        }
    }

    fn map(&mut self) -> Result<TermValue, TermError> {
        self.expect_punct("#")?;
        self.expect_punct("{")?;
        let mut pairs = Vec::new();
        if matches!(self.peek(), Some(t) if is_punct(t, "}")) {
            self.pos += 1;
            return Ok(TermValue::Map(pairs));
        }
        loop {
            let key = self.term()?;
            match self.peek() {
                Some(t) if is_punct(t, "=>") || is_punct(t, ":=") => {
                    self.pos += 1;
                }
                _ => return Err(self.error("expected `=>` or `:=` in map")),
            }
            pairs.push((key, self.term()?));
            match self.peek() {
                Some(t) if is_punct(t, ",") => {
                    self.pos += 1;
                }
                Some(t) if is_punct(t, "}") => {
                    self.pos += 1;
                    return Ok(TermValue::Map(pairs));
                }
                Some(t) => {
                    return Err(self.error(format!("expected `,` or `}}`, found `{}`", t.text)))
                }
                None => return Err(self.error("unterminated map")),
            }
        }
    }

    /// Literal binaries: segments of strings, integers, or chars, with any
    /// `:Size` and `/type-spec` suffixes skipped. Content is collected as
    /// bytes and re-read as text.
    fn binary(&mut self) -> Result<TermValue, TermError> {
        self.expect_punct("<<")?;
        let mut bytes: Vec<u8> = Vec::new();
        loop {
            match self.peek() {
                Some(t) if is_punct(t, ">>") => {
                    self.pos += 1;
                    return Ok(TermValue::Binary(
                        String::from_utf8_lossy(&bytes).into_owned(),
                    ));
                }
                Some(t) if is_punct(t, ",") => {
                    self.pos += 1;
                }
                Some(_) => {
                    match self.term()? {
                        TermValue::String(s) => bytes.extend_from_slice(s.as_bytes()),
                        TermValue::Integer(n) => bytes.push(n as u8),
                        _ => return Err(self.error("unsupported binary segment")),
                    }
                    self.skip_segment_spec()?;
                }
                None => return Err(self.error("unterminated binary")),
            }
        }
    }

    fn skip_segment_spec(&mut self) -> Result<(), TermError> {
        if matches!(self.peek(), Some(t) if is_punct(t, ":")) {
            self.pos += 1;
            match self.peek() {
                Some(t) if t.kind == TokenKind::Integer => self.pos += 1,
                _ => return Err(self.error("expected size after `:`")),
            }
        }
        if matches!(self.peek(), Some(t) if is_punct(t, "/")) {
            self.pos += 1;
            loop {
                match self.peek() {
                    Some(t)
                        if t.kind == TokenKind::Atom
                            || t.kind == TokenKind::Integer
                            || is_punct(t, "-")
                            || is_punct(t, ":") =>
                    {
                        self.pos += 1;
                    }
                    _ => break,
                }
            }
        }
        Ok(())
    }
}

fn parse_integer(text: &str) -> Option<i64> {
    let digits = text.replace('_', "");
    if let Some((base, rest)) = digits.split_once('#') {
        let base: u32 = base.parse().ok()?;
        if !(2..=36).contains(&base) {
            return None;
        }
        i64::from_str_radix(rest, base).ok()
    } else {
        digits.parse().ok()
    }
}

/// Code point of a character literal like `$a`, `$\n`, `$\x{1F600}`, `$\101`.
fn char_code(text: &str) -> Option<i64> {
    let body = text.strip_prefix('$')?;
    let mut chars = body.chars();
    let first = chars.next()?;
    if first != '\\' {
        return Some(first as i64);
    }
    let esc = chars.next()?;
    let rest: String = chars.collect();
    match esc {
        'n' => Some('\n' as i64),
        'r' => Some('\r' as i64),
        't' => Some('\t' as i64),
        'v' => Some(0x0b),
        'f' => Some(0x0c),
        'b' => Some(0x08),
        'e' => Some(0x1b),
        's' => Some(' ' as i64),
        'd' => Some(0x7f),
        'x' => {
            let hex = rest.trim_start_matches('{').trim_end_matches('}');
            i64::from_str_radix(hex, 16).ok()
        }
        '^' => rest.chars().next().map(|c| (c as i64) & 0x1f),
        '0'..='7' => {
            let octal: String = std::iter::once(esc).chain(rest.chars()).collect();
            i64::from_str_radix(&octal, 8).ok()
        }
        other if rest.is_empty() => Some(other as i64),
        _ => None,
    }
}
