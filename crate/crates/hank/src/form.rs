//! Groups a token stream into forms: the attribute and function definitions
//! that make up an Erlang file.
//!
//! A form ends at a terminating dot that sits at bracket depth zero, so dots
//! inside `[...]`, `{...}`, `(...)`, or `<<...>>` never split a form. A file
//! that ends mid-form still produces a final form so no token is lost.

use crate::lexer::{atom_value, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// `-name(...).` style module attribute.
    Attribute,
    /// One or more function clauses ending in a dot.
    Function,
    /// Anything else, including unterminated trailing token runs.
    Other,
}

/// A form borrows its token slice from the file's token vector; forms are a
/// transient view used to drive parsing, not a stored artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form<'a> {
    pub kind: FormKind,
    /// Attribute name or function name, when the shape reveals one.
    pub name: Option<String>,
    /// Argument count of the first clause head, for function forms.
    pub arity: Option<u32>,
    pub tokens: &'a [Token],
    /// Line of the first significant token.
    pub line: u32,
}

/// Collects the non-trivia tokens of a slice; the parser works on this view.
pub(crate) fn significant(tokens: &[Token]) -> Vec<&Token> {
    tokens.iter().filter(|t| !t.is_trivia()).collect()
}

pub(crate) fn is_punct(tok: &Token, text: &str) -> bool {
    tok.kind == TokenKind::Punct && tok.text == text
}

fn open_delta(tok: &Token) -> i32 {
    if tok.kind != TokenKind::Punct {
        return 0;
    }
    match tok.text.as_str() {
        "(" | "[" | "{" | "<<" => 1,
        ")" | "]" | "}" | ">>" => -1,
        _ => 0,
    }
}

/// Index of the token that closes the bracket opened at `open`, treating all
/// bracket kinds as one family. `None` when the region never closes.
pub(crate) fn matching(sig: &[&Token], open: usize) -> Option<usize> {
    let mut depth = 0i32;
    for (i, tok) in sig.iter().enumerate().skip(open) {
        depth += open_delta(tok);
        if depth <= 0 {
            return Some(i);
        }
    }
    None
}

/// Splits `sig[range]` on commas at bracket depth zero, returning sub-ranges.
/// An empty region yields no pieces.
pub(crate) fn split_commas(sig: &[&Token], start: usize, end: usize) -> Vec<(usize, usize)> {
    let mut pieces = Vec::new();
    let mut depth = 0i32;
    let mut piece_start = start;
    for i in start..end {
        let tok = sig[i];
        depth += open_delta(tok);
        if depth == 0 && is_punct(tok, ",") {
            pieces.push((piece_start, i));
            piece_start = i + 1;
        }
    }
    if piece_start < end {
        pieces.push((piece_start, end));
    } else if piece_start > start {
        // Trailing comma: keep the empty piece so arities stay honest.
        pieces.push((piece_start, end));
    }
    pieces
}

/// Splits a token stream into forms. Trivia between forms attaches to the
/// following form; trivia after the last dot attaches to the preceding form.
pub fn split_forms(tokens: &[Token]) -> Vec<Form<'_>> {
    let mut ranges: Vec<(usize, usize, bool)> = Vec::new(); // (start, end, terminated)
    let mut depth = 0i32;
    let mut start = 0;
    for (i, tok) in tokens.iter().enumerate() {
        depth += open_delta(tok);
        if depth < 0 {
            depth = 0; // stray closer; recover rather than wedge the splitter
        }
        if tok.kind == TokenKind::Dot && depth == 0 {
            ranges.push((start, i + 1, true));
            start = i + 1;
        }
    }
    if start < tokens.len() {
        if tokens[start..].iter().any(|t| !t.is_trivia()) {
            ranges.push((start, tokens.len(), false));
        } else if let Some(last) = ranges.last_mut() {
            last.1 = tokens.len();
        }
        // A trivia-only tail with no preceding form belongs to no form.
    }

    ranges
        .into_iter()
        .map(|(s, e, terminated)| classify_form(&tokens[s..e], terminated))
        .collect()
}

fn classify_form(tokens: &[Token], terminated: bool) -> Form<'_> {
    let sig = significant(tokens);
    let line = sig
        .first()
        .map(|t| t.line)
        .or_else(|| tokens.first().map(|t| t.line))
        .unwrap_or(1);
    if !terminated {
        // EOF closed this form for us; treat it as opaque.
        return Form { kind: FormKind::Other, name: None, arity: None, tokens, line };
    }
    match (sig.first(), sig.get(1)) {
        (Some(dash), Some(name))
            if is_punct(dash, "-")
                && matches!(name.kind, TokenKind::Atom | TokenKind::Keyword) =>
        {
            let name = match name.kind {
                TokenKind::Atom => atom_value(&name.text),
                _ => name.text.clone(),
            };
            Form { kind: FormKind::Attribute, name: Some(name), arity: None, tokens, line }
        }
        (Some(head), Some(paren)) if head.kind == TokenKind::Atom && is_punct(paren, "(") => {
            let arity = matching(&sig, 1)
                .map(|close| split_commas(&sig, 2, close).len() as u32);
            Form {
                kind: FormKind::Function,
                name: Some(atom_value(&head.text)),
                arity,
                tokens,
                line,
            }
        }
        _ => Form { kind: FormKind::Other, name: None, arity: None, tokens, line },
    }
}
