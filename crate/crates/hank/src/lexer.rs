//! Lossless tokenizer for Erlang source text.
//!
//! Every byte of the input ends up in exactly one token, including comments
//! and whitespace, so that concatenating the token texts reproduces the
//! original file. The analysis layers above only ever *read* tokens; nothing
//! here expands macros or resolves includes.

use std::fmt;

use thiserror::Error;

/// What a token is, not what it means. Classification is purely lexical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    /// Unquoted (`foo`) or quoted (`'foo bar'`) atom.
    Atom,
    /// Variable: starts with an uppercase letter or underscore.
    Variable,
    Integer,
    Float,
    /// String literal, including the quotes (and triple-quoted strings).
    String,
    /// Character literal such as `$a` or `$\n`.
    Char,
    /// The `?` that introduces a macro use.
    MacroMarker,
    /// Operators, separators, and any byte we do not otherwise recognize.
    Punct,
    /// Reserved word such as `case` or `end`.
    Keyword,
    /// A `.` that terminates a form (followed by whitespace, `%`, or EOF).
    Dot,
    Comment,
    Whitespace,
}

/// One lexical token. `text` is the exact source slice, untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the token's first character.
    pub line: u32,
    /// 1-based column (in characters) of the token's first character.
    pub column: u32,
}

impl Token {
    /// True for tokens the parser skips: comments and whitespace.
    pub fn is_trivia(&self) -> bool {
        matches!(self.kind, TokenKind::Comment | TokenKind::Whitespace)
    }
}

/// The only unrecoverable lexical situation: a quote that never closes.
/// Everything else degrades to `Punct` tokens instead of failing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: unterminated {what}")]
pub struct LexError {
    pub line: u32,
    pub column: u32,
    /// `"string"` or `"quoted atom"`.
    pub what: &'static str,
}

/// Reserved words recognized by the scanner. `maybe`/`else` are deliberately
/// absent: treating them as atoms keeps `-else.` and `-ifdef` blocks parsing
/// as ordinary attributes.
const KEYWORDS: &[&str] = &[
    "after", "and", "andalso", "band", "begin", "bnot", "bor", "bsl", "bsr", "bxor", "case",
    "catch", "cond", "div", "end", "fun", "if", "let", "not", "of", "or", "orelse", "receive",
    "rem", "try", "when", "xor",
];

pub fn is_keyword(text: &str) -> bool {
    KEYWORDS.contains(&text)
}

/// Multi-character operators, longest first so the lexer can take the first
/// prefix match (maximal munch).
const OPERATORS: &[&str] = &[
    "=:=", "=/=", "...", "<:-", "<:=", "->", "<-", "=>", ":=", "::", "++", "--", "==", "/=",
    "=<", ">=", "<<", ">>", "||", "..", "<=", "?=",
];

/// Returns the atom name denoted by an atom token's text: unquoted atoms are
/// returned as-is, quoted atoms have their quotes stripped and escape
/// sequences decoded, so `'foo'` and `foo` name the same atom.
pub fn atom_value(text: &str) -> String {
    if let Some(inner) = text.strip_prefix('\'').and_then(|t| t.strip_suffix('\'')) {
        unescape(inner)
    } else {
        text.to_string()
    }
}

/// Returns the contents of a string token with quotes stripped and escapes
/// decoded. Triple-quoted strings keep their body verbatim.
pub fn string_value(text: &str) -> String {
    if text.starts_with("\"\"\"") {
        // Triple-quoted: find the delimiter length, drop it from both ends.
        let delim = text.chars().take_while(|&c| c == '"').count();
        let body: String = text.chars().skip(delim).collect();
        let keep = body.chars().count().saturating_sub(delim);
        return body.chars().take(keep).collect();
    }
    if let Some(inner) = text.strip_prefix('"').and_then(|t| t.strip_suffix('"')) {
        unescape(inner)
    } else {
        text.to_string()
    }
}

/// Decodes the escape sequences that matter for names and paths. Unknown
/// escapes decode to the escaped character itself, which is what the Erlang
/// scanner does for the common cases.
fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('t') => out.push('\t'),
            Some('v') => out.push('\x0b'),
            Some('f') => out.push('\x0c'),
            Some('b') => out.push('\x08'),
            Some('e') => out.push('\x1b'),
            Some('s') => out.push(' '),
            Some('d') => out.push('\x7f'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            TokenKind::Atom => "atom",
            TokenKind::Variable => "variable",
            TokenKind::Integer => "integer",
            TokenKind::Float => "float",
            TokenKind::String => "string",
            TokenKind::Char => "char",
            TokenKind::MacroMarker => "macro marker",
            TokenKind::Punct => "punct",
            TokenKind::Keyword => "keyword",
            TokenKind::Dot => "dot",
            TokenKind::Comment => "comment",
            TokenKind::Whitespace => "whitespace",
        };
        f.write_str(name)
    }
}

struct Cursor<'a> {
    src: &'a str,
    /// Byte offset into `src`.
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0, line: 1, column: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Consumes characters while `pred` holds.
    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while matches!(self.peek(), Some(c) if pred(c)) {
            self.bump();
        }
    }
}

fn is_ws(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r' | '\x0b' | '\x0c')
}

fn is_name_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '@'
}

fn is_digit(c: char) -> bool {
    c.is_ascii_digit()
}

/// Splits `source` into tokens. Infallible except for an unterminated string
/// or quoted atom, where no token boundary can be recovered.
///
/// Invariant: on success, concatenating `token.text` in order reproduces
/// `source` exactly.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor::new(source);
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        let start = cur.pos;
        let line = cur.line;
        let column = cur.column;
        let kind = scan_token(&mut cur, c).map_err(|what| LexError { line, column, what })?;
        debug_assert!(cur.pos > start, "lexer must always make progress");
        tokens.push(Token {
            kind,
            text: source[start..cur.pos].to_string(),
            line,
            column,
        });
    }
    debug_assert_eq!(
        tokens.iter().map(|t| t.text.as_str()).collect::<String>(),
        source,
        "token texts must cover the source"
    );
    Ok(tokens)
}

/// Scans one token starting at `c`; the cursor is advanced past it.
/// Returns the kind, or the name of an unterminated construct.
fn scan_token(cur: &mut Cursor, c: char) -> Result<TokenKind, &'static str> {
    match c {
        _ if is_ws(c) => {
            cur.eat_while(is_ws);
            Ok(TokenKind::Whitespace)
        }
        '%' => {
            cur.eat_while(|c| c != '\n');
            Ok(TokenKind::Comment)
        }
        'a'..='z' => {
            let start = cur.pos;
            cur.eat_while(is_name_continue);
            if is_keyword(&cur.src[start..cur.pos]) {
                Ok(TokenKind::Keyword)
            } else {
                Ok(TokenKind::Atom)
            }
        }
        'A'..='Z' | '_' => {
            cur.eat_while(is_name_continue);
            Ok(TokenKind::Variable)
        }
        '0'..='9' => Ok(scan_number(cur)),
        '"' => scan_string(cur),
        '\'' => scan_quoted_atom(cur),
        '$' => Ok(scan_char(cur)),
        '?' => {
            cur.bump();
            if cur.peek() == Some('=') {
                cur.bump();
                Ok(TokenKind::Punct) // the `?=` operator, not a macro use
            } else {
                Ok(TokenKind::MacroMarker)
            }
        }
        '.' => {
            cur.bump();
            match cur.peek() {
                Some('.') => {
                    cur.bump();
                    if cur.peek() == Some('.') {
                        cur.bump();
                    }
                    Ok(TokenKind::Punct) // `..` or `...`
                }
                None => Ok(TokenKind::Dot),
                Some(n) if is_ws(n) || n == '%' => Ok(TokenKind::Dot),
                Some(_) => Ok(TokenKind::Punct), // e.g. the `.` in `#rec.field`
            }
        }
        _ => {
            for op in OPERATORS {
                if cur.rest().starts_with(op) {
                    for _ in 0..op.len() {
                        cur.bump();
                    }
                    return Ok(TokenKind::Punct);
                }
            }
            cur.bump();
            Ok(TokenKind::Punct)
        }
    }
}

/// Integer or float, tolerating `_` digit separators and `Base#digits`
/// notation. Anything that stops looking like a number simply ends the
/// token; the next characters are lexed on their own.
fn scan_number(cur: &mut Cursor) -> TokenKind {
    eat_digits(cur);
    if cur.peek() == Some('#') && matches!(cur.peek_at(1), Some(c) if c.is_ascii_alphanumeric()) {
        cur.bump();
        cur.eat_while(|c| c.is_ascii_alphanumeric() || c == '_');
        return TokenKind::Integer;
    }
    if cur.peek() == Some('.') && matches!(cur.peek_at(1), Some(c) if is_digit(c)) {
        cur.bump();
        eat_digits(cur);
        if matches!(cur.peek(), Some('e' | 'E')) {
            let sign = matches!(cur.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if matches!(cur.peek_at(digit_at), Some(c) if is_digit(c)) {
                cur.bump();
                if sign {
                    cur.bump();
                }
                eat_digits(cur);
            }
        }
        return TokenKind::Float;
    }
    TokenKind::Integer
}

fn eat_digits(cur: &mut Cursor) {
    cur.eat_while(is_digit);
    // `_` separators are only valid between digits.
    while cur.peek() == Some('_') && matches!(cur.peek_at(1), Some(c) if is_digit(c)) {
        cur.bump();
        cur.eat_while(is_digit);
    }
}

fn scan_string(cur: &mut Cursor) -> Result<TokenKind, &'static str> {
    let mut quotes = 0;
    while cur.peek() == Some('"') && quotes < 3 {
        cur.bump();
        quotes += 1;
    }
    if quotes == 2 {
        return Ok(TokenKind::String); // empty string
    }
    if quotes == 3 {
        // Triple-quoted string: delimiters may be longer than three quotes.
        while cur.peek() == Some('"') {
            cur.bump();
            quotes += 1;
        }
        let mut run = 0;
        while let Some(c) = cur.bump() {
            if c == '"' {
                run += 1;
                if run == quotes {
                    return Ok(TokenKind::String);
                }
            } else {
                run = 0;
            }
        }
        return Err("string");
    }
    scan_delimited(cur, '"').map(|_| TokenKind::String).ok_or("string")
}

fn scan_quoted_atom(cur: &mut Cursor) -> Result<TokenKind, &'static str> {
    cur.bump();
    scan_delimited(cur, '\'').map(|_| TokenKind::Atom).ok_or("quoted atom")
}

/// Consumes up to and including the closing `delim`, honoring backslash
/// escapes. Returns `None` when EOF arrives first.
fn scan_delimited(cur: &mut Cursor, delim: char) -> Option<()> {
    while let Some(c) = cur.bump() {
        if c == '\\' {
            cur.bump();
        } else if c == delim {
            return Some(());
        }
    }
    None
}

/// `$c` and its escaped forms. A `$` at EOF degrades to punctuation.
fn scan_char(cur: &mut Cursor) -> TokenKind {
    cur.bump();
    match cur.peek() {
        None => TokenKind::Punct,
        Some('\\') => {
            cur.bump();
            match cur.peek() {
                Some('x') => {
                    cur.bump();
                    if cur.peek() == Some('{') {
                        cur.eat_while(|c| c != '}');
                        cur.bump();
                    } else {
                        cur.eat_while(|c| c.is_ascii_hexdigit());
                    }
                }
                Some('^') => {
                    cur.bump();
                    cur.bump();
                }
                Some(c) if ('0'..='7').contains(&c) => {
                    let mut n = 0;
                    while n < 3 && matches!(cur.peek(), Some(d) if ('0'..='7').contains(&d)) {
                        cur.bump();
                        n += 1;
                    }
                }
                Some(_) => {
                    cur.bump();
                }
                None => {}
            }
            TokenKind::Char
        }
        Some(_) => {
            cur.bump();
            TokenKind::Char
        }
    }
}
