//! Tolerant structure recognition over token streams.
//!
//! Builds a lightweight node tree per form. The tree is *not* a faithful
//! Erlang AST: it recognizes exactly the shapes the rules query (defines,
//! records, includes, macro uses, function clause heads, calls) and degrades
//! everything else to generic nodes while keeping every atom and variable
//! visible. Losing structure is always safe here; losing a *use* of
//! something is not, so the scanner errs on the side of surfacing names.

use crate::form::{is_punct, matching, significant, split_commas, split_forms, Form, FormKind};
use crate::lexer::{atom_value, string_value, Token, TokenKind};
use crate::term::{self, TermValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Atom,
    Variable,
    Underscore,
    MacroUse,
    DefineAttr,
    RecordAttr,
    RecordExpr,
    RecordAccess,
    RecordIndex,
    IncludeAttr,
    IncludeLibAttr,
    BehaviorAttr,
    CallbackAttr,
    HankAttr,
    FunctionDef,
    Clause,
    Call,
    Other,
}

/// How a clause argument pattern looks, as far as the unused-argument
/// analysis cares: exactly `_`, a variable spelled `_Name`, or anything
/// else (which counts as a use of the position).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgShape {
    Wildcard,
    UnderscoredVar,
    Other,
}

/// A field declared by a record attribute, with the line it sits on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordField {
    pub name: String,
    pub line: u32,
}

/// Node data. Names of records, macros, and fields are stored normalized
/// (quoted atoms lose their quotes) so lookups match across spellings.
///
/// Record names are `Option` because `#?MACRO{...}` leaves the record
/// unresolved; the record-field analysis treats those conservatively.
#[derive(Debug, Clone, PartialEq)]
pub enum NodePayload {
    Atom { value: String },
    Variable { name: String },
    Underscore,
    MacroUse { name: String, arity: Option<u32> },
    DefineAttr { name: String, arity: Option<u32> },
    RecordAttr { name: String, fields: Vec<RecordField> },
    RecordExpr { name: Option<String>, fields: Vec<String>, wildcard: bool },
    RecordAccess { name: Option<String>, field: String },
    RecordIndex { name: Option<String>, field: String },
    IncludeAttr { path: Option<String> },
    IncludeLibAttr { path: Option<String> },
    BehaviorAttr { name: String },
    CallbackAttr { name: String, arity: u32 },
    HankAttr { term: Option<TermValue> },
    FunctionDef { name: String, arity: u32, irregular: bool },
    Clause { args: Vec<ArgShape> },
    Call { module: Option<String>, name: String, arity: u32 },
    Other { attr: Option<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynNode {
    pub payload: NodePayload,
    pub line: u32,
    pub children: Vec<SynNode>,
}

impl SynNode {
    fn new(payload: NodePayload, line: u32) -> Self {
        SynNode { payload, line, children: Vec::new() }
    }

    fn with(payload: NodePayload, line: u32, children: Vec<SynNode>) -> Self {
        SynNode { payload, line, children }
    }

    pub fn kind(&self) -> NodeKind {
        match self.payload {
            NodePayload::Atom { .. } => NodeKind::Atom,
            NodePayload::Variable { .. } => NodeKind::Variable,
            NodePayload::Underscore => NodeKind::Underscore,
            NodePayload::MacroUse { .. } => NodeKind::MacroUse,
            NodePayload::DefineAttr { .. } => NodeKind::DefineAttr,
            NodePayload::RecordAttr { .. } => NodeKind::RecordAttr,
            NodePayload::RecordExpr { .. } => NodeKind::RecordExpr,
            NodePayload::RecordAccess { .. } => NodeKind::RecordAccess,
            NodePayload::RecordIndex { .. } => NodeKind::RecordIndex,
            NodePayload::IncludeAttr { .. } => NodeKind::IncludeAttr,
            NodePayload::IncludeLibAttr { .. } => NodeKind::IncludeLibAttr,
            NodePayload::BehaviorAttr { .. } => NodeKind::BehaviorAttr,
            NodePayload::CallbackAttr { .. } => NodeKind::CallbackAttr,
            NodePayload::HankAttr { .. } => NodeKind::HankAttr,
            NodePayload::FunctionDef { .. } => NodeKind::FunctionDef,
            NodePayload::Clause { .. } => NodeKind::Clause,
            NodePayload::Call { .. } => NodeKind::Call,
            NodePayload::Other { .. } => NodeKind::Other,
        }
    }

    /// Depth-first preorder walk.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SynNode)) {
        f(self);
        for child in &self.children {
            child.walk(f);
        }
    }
}

/// All nodes of `kind` under `roots`, in stable preorder.
pub fn query_nodes<'a>(roots: &'a [SynNode], kind: NodeKind) -> Vec<&'a SynNode> {
    let mut out = Vec::new();
    for root in roots {
        root.walk(&mut |n| {
            if n.kind() == kind {
                out.push(n);
            }
        });
    }
    out
}

/// Tokenized file to node trees, one per form.
pub fn parse_source(tokens: &[Token]) -> Vec<SynNode> {
    split_forms(tokens).iter().map(parse_form).collect()
}

/// Builds the node tree for one form. Never fails: unrecognized shapes
/// become `Other` nodes whose children still carry every atom, variable,
/// and macro use in the region.
pub fn parse_form(form: &Form) -> SynNode {
    let sig = significant(form.tokens);
    let body: &[&Token] = match sig.last() {
        Some(last) if last.kind == TokenKind::Dot => &sig[..sig.len() - 1],
        _ => &sig,
    };
    match form.kind {
        FormKind::Attribute => parse_attribute(form, body),
        FormKind::Function => parse_function(form, body),
        FormKind::Other => {
            SynNode::with(NodePayload::Other { attr: None }, form.line, scan_region(body))
        }
    }
}

fn atom_node(tok: &Token) -> SynNode {
    SynNode::new(NodePayload::Atom { value: atom_value(&tok.text) }, tok.line)
}

fn var_node(tok: &Token) -> SynNode {
    if tok.text == "_" {
        SynNode::new(NodePayload::Underscore, tok.line)
    } else {
        SynNode::new(NodePayload::Variable { name: tok.text.clone() }, tok.line)
    }
}

/// Strips one pair of parentheses when they enclose the whole region, as in
/// `-define( ... )` or `-export( ... )`.
fn unwrap_parens<'a, 'b>(sig: &'a [&'b Token]) -> &'a [&'b Token] {
    if let Some(first) = sig.first() {
        if is_punct(first, "(") && matching(sig, 0) == Some(sig.len() - 1) {
            return &sig[1..sig.len() - 1];
        }
    }
    sig
}

fn parse_attribute(form: &Form, body: &[&Token]) -> SynNode {
    let name = form.name.clone().unwrap_or_default();
    let line = form.line;
    let mut children = Vec::new();
    // The attribute name itself is an atom occurrence (unless it lexed as a
    // keyword, as in `-if(...)`).
    if let Some(name_tok) = body.get(1) {
        if name_tok.kind == TokenKind::Atom {
            children.push(atom_node(name_tok));
        }
    }
    let rest = if body.len() > 2 { &body[2..] } else { &[][..] };
    let inner = unwrap_parens(rest);

    match name.as_str() {
        "define" => parse_define(line, inner, children),
        "record" => parse_record(line, inner, children),
        "include" => parse_include(line, inner, children, false),
        "include_lib" => parse_include(line, inner, children, true),
        "behavior" | "behaviour" => parse_behavior(line, inner, children),
        "callback" => parse_callback(line, inner, children),
        "hank" => {
            let term = term::from_tokens(inner).ok();
            children.extend(scan_region(inner));
            SynNode::with(NodePayload::HankAttr { term }, line, children)
        }
        _ => {
            children.extend(scan_region(inner));
            SynNode::with(NodePayload::Other { attr: Some(name) }, line, children)
        }
    }
}

fn parse_define(line: u32, inner: &[&Token], mut children: Vec<SynNode>) -> SynNode {
    let Some(name_tok) = inner.first() else {
        return SynNode::with(NodePayload::Other { attr: Some("define".into()) }, line, children);
    };
    let name = match name_tok.kind {
        TokenKind::Atom => {
            children.push(atom_node(name_tok));
            atom_value(&name_tok.text)
        }
        TokenKind::Variable => {
            children.push(var_node(name_tok));
            name_tok.text.clone()
        }
        _ => {
            children.extend(scan_region(inner));
            return SynNode::with(
                NodePayload::Other { attr: Some("define".into()) },
                line,
                children,
            );
        }
    };
    let mut arity = None;
    let mut next = 1;
    if matches!(inner.get(1), Some(t) if is_punct(t, "(")) {
        if let Some(close) = matching(inner, 1) {
            arity = Some(split_commas(inner, 2, close).len() as u32);
            children.extend(scan_region(&inner[2..close]));
            next = close + 1;
        }
    }
    // Whatever follows the comma is the replacement text; macro uses inside
    // it count, per the textual-occurrence policy.
    let replacement = match inner.get(next) {
        Some(t) if is_punct(t, ",") => &inner[next + 1..],
        _ => &inner[next.min(inner.len())..],
    };
    children.extend(scan_region(replacement));
    SynNode::with(NodePayload::DefineAttr { name, arity }, line, children)
}

fn parse_record(line: u32, inner: &[&Token], mut children: Vec<SynNode>) -> SynNode {
    let braces_at = 2;
    let well_formed = matches!(inner.first(), Some(t) if t.kind == TokenKind::Atom)
        && matches!(inner.get(1), Some(t) if is_punct(t, ","))
        && matches!(inner.get(braces_at), Some(t) if is_punct(t, "{"));
    let close = if well_formed { matching(inner, braces_at) } else { None };
    let (Some(close), true) = (close, well_formed) else {
        children.extend(scan_region(inner));
        return SynNode::with(NodePayload::Other { attr: Some("record".into()) }, line, children);
    };

    let name_tok = inner[0];
    children.push(atom_node(name_tok));
    let mut fields = Vec::new();
    for (s, e) in split_commas(inner, braces_at + 1, close) {
        if s >= e {
            continue;
        }
        let first = inner[s];
        if first.kind == TokenKind::Atom {
            fields.push(RecordField { name: atom_value(&first.text), line: first.line });
            children.push(atom_node(first));
            children.extend(scan_region(&inner[s + 1..e]));
        } else {
            children.extend(scan_region(&inner[s..e]));
        }
    }
    children.extend(scan_region(&inner[close + 1..]));
    SynNode::with(
        NodePayload::RecordAttr { name: atom_value(&name_tok.text), fields },
        line,
        children,
    )
}

fn parse_include(line: u32, inner: &[&Token], mut children: Vec<SynNode>, lib: bool) -> SynNode {
    // Only a literal string (possibly split into adjacent pieces) gives a
    // resolvable path; `-include(?HDR)` stays unresolved.
    let path = if !inner.is_empty() && inner.iter().all(|t| t.kind == TokenKind::String) {
        Some(inner.iter().map(|t| string_value(&t.text)).collect::<String>())
    } else {
        None
    };
    children.extend(scan_region(inner));
    let payload = if lib {
        NodePayload::IncludeLibAttr { path }
    } else {
        NodePayload::IncludeAttr { path }
    };
    SynNode::with(payload, line, children)
}

fn parse_behavior(line: u32, inner: &[&Token], mut children: Vec<SynNode>) -> SynNode {
    match inner.first() {
        Some(tok) if tok.kind == TokenKind::Atom && inner.len() == 1 => {
            children.push(atom_node(tok));
            SynNode::with(
                NodePayload::BehaviorAttr { name: atom_value(&tok.text) },
                line,
                children,
            )
        }
        _ => {
            children.extend(scan_region(inner));
            SynNode::with(
                NodePayload::Other { attr: Some("behaviour".into()) },
                line,
                children,
            )
        }
    }
}

fn parse_callback(line: u32, inner: &[&Token], mut children: Vec<SynNode>) -> SynNode {
    let shaped = matches!(inner.first(), Some(t) if t.kind == TokenKind::Atom)
        && matches!(inner.get(1), Some(t) if is_punct(t, "("));
    if let (true, Some(close)) = (shaped, matching(inner, 1)) {
        let name_tok = inner[0];
        children.push(atom_node(name_tok));
        let arity = split_commas(inner, 2, close).len() as u32;
        children.extend(scan_region(&inner[1..]));
        return SynNode::with(
            NodePayload::CallbackAttr { name: atom_value(&name_tok.text), arity },
            line,
            children,
        );
    }
    children.extend(scan_region(inner));
    SynNode::with(NodePayload::Other { attr: Some("callback".into()) }, line, children)
}

// ---------------------------------------------------------------------------
// Function forms
// ---------------------------------------------------------------------------

fn parse_function(form: &Form, body: &[&Token]) -> SynNode {
    let name = form.name.clone().unwrap_or_default();
    let mut irregular = form.arity.is_none();
    let arity = form.arity.unwrap_or(0);
    let mut children = Vec::new();
    for (s, e) in split_clauses(body) {
        let (meta, clause) = parse_clause(&body[s..e], form.line);
        match meta {
            Some((clause_name, clause_arity))
                if clause_name == name && clause_arity == arity => {}
            _ => irregular = true,
        }
        children.push(clause);
    }
    SynNode::with(NodePayload::FunctionDef { name, arity, irregular }, form.line, children)
}

/// Splits a function form into clause ranges at `;` tokens that sit at
/// bracket depth zero, outside block expressions, and *after* the clause's
/// `->` (so guard disjunctions like `when X > 1; X < 5` stay intact).
fn split_clauses(body: &[&Token]) -> Vec<(usize, usize)> {
    let mut ranges = Vec::new();
    let mut depth = 0i32;
    let mut blocks = 0i32;
    let mut seen_arrow = false;
    let mut start = 0;
    for (i, tok) in body.iter().enumerate() {
        match tok.kind {
            TokenKind::Punct => match tok.text.as_str() {
                "(" | "[" | "{" | "<<" => depth += 1,
                ")" | "]" | "}" | ">>" => depth = (depth - 1).max(0),
                "->" if depth == 0 && blocks == 0 => seen_arrow = true,
                ";" if depth == 0 && blocks == 0 && seen_arrow => {
                    ranges.push((start, i));
                    start = i + 1;
                    seen_arrow = false;
                }
                _ => {}
            },
            TokenKind::Keyword => match tok.text.as_str() {
                "if" | "case" | "receive" | "try" | "begin" => blocks += 1,
                "fun" if fun_opens_block(body, i) => blocks += 1,
                "end" => blocks = (blocks - 1).max(0),
                _ => {}
            },
            _ => {}
        }
    }
    if start < body.len() || ranges.is_empty() {
        ranges.push((start, body.len()));
    }
    ranges
}

/// `fun (...) -> ... end` and `fun Name(...) -> ... end` open a block;
/// `fun f/1` and `fun m:f/1` do not.
fn fun_opens_block(body: &[&Token], fun_at: usize) -> bool {
    match body.get(fun_at + 1) {
        Some(t) if is_punct(t, "(") => true,
        Some(t) if t.kind == TokenKind::Variable => {
            matches!(body.get(fun_at + 2), Some(p) if is_punct(p, "("))
        }
        _ => false,
    }
}

/// Parses one clause. Returns its (name, arity) when the head is regular;
/// `None` flags the clause — and thus the whole function — as irregular, so
/// the argument analysis keeps its hands off.
///
/// A head is regular when it is `name(...)` followed directly by `->` or by
/// a `when` guard, with the `->` present at depth zero. A guard that mixes
/// a top-level `;` with macro uses is treated as irregular too: the macro
/// could hide arbitrary clause structure.
fn parse_clause(slice: &[&Token], fallback_line: u32) -> (Option<(String, u32)>, SynNode) {
    let line = slice.first().map_or(fallback_line, |t| t.line);
    let irregular = |children: Vec<SynNode>| {
        (None, SynNode::with(NodePayload::Clause { args: Vec::new() }, line, children))
    };

    let Some(name_tok) = slice.first() else {
        return irregular(Vec::new());
    };
    if name_tok.kind != TokenKind::Atom || !matches!(slice.get(1), Some(t) if is_punct(t, "(")) {
        return irregular(scan_region(slice));
    }
    let Some(close) = matching(slice, 1) else {
        let mut children = vec![atom_node(name_tok)];
        children.extend(scan_region(&slice[2..]));
        return irregular(children);
    };

    let mut children = vec![atom_node(name_tok)];
    let mut args = Vec::new();
    for (s, e) in split_commas(slice, 2, close) {
        args.push(classify_arg(&slice[s..e]));
        children.extend(scan_region(&slice[s..e]));
    }
    let rest = &slice[close + 1..];
    children.extend(scan_region(rest));

    let regular = match rest.first() {
        Some(t) if is_punct(t, "->") => true,
        Some(t) if t.kind == TokenKind::Keyword && t.text == "when" => {
            guard_is_plain(&rest[1..])
        }
        _ => false,
    };
    if !regular || !has_toplevel_arrow(rest) {
        return (
            None,
            SynNode::with(NodePayload::Clause { args }, line, children),
        );
    }

    let name = atom_value(&name_tok.text);
    let arity = args.len() as u32;
    (
        Some((name, arity)),
        SynNode::with(NodePayload::Clause { args }, line, children),
    )
}

fn classify_arg(slice: &[&Token]) -> ArgShape {
    match slice {
        [single] if single.kind == TokenKind::Variable => {
            if single.text == "_" {
                ArgShape::Wildcard
            } else if single.text.starts_with('_') {
                ArgShape::UnderscoredVar
            } else {
                ArgShape::Other
            }
        }
        _ => ArgShape::Other,
    }
}

fn has_toplevel_arrow(sig: &[&Token]) -> bool {
    let mut depth = 0i32;
    for tok in sig {
        if tok.kind == TokenKind::Punct {
            match tok.text.as_str() {
                "(" | "[" | "{" | "<<" => depth += 1,
                ")" | "]" | "}" | ">>" => depth = (depth - 1).max(0),
                "->" if depth == 0 => return true,
                _ => {}
            }
        }
    }
    false
}

/// Guard region check: up to the first depth-zero `->`, a `;` and a macro
/// marker may not both appear at depth zero.
fn guard_is_plain(sig: &[&Token]) -> bool {
    let mut depth = 0i32;
    let mut semi = false;
    let mut marker = false;
    for tok in sig {
        match tok.kind {
            TokenKind::Punct => match tok.text.as_str() {
                "(" | "[" | "{" | "<<" => depth += 1,
                ")" | "]" | "}" | ">>" => depth = (depth - 1).max(0),
                "->" if depth == 0 => break,
                ";" if depth == 0 => semi = true,
                _ => {}
            },
            TokenKind::MacroMarker => marker = true,
            _ => {}
        }
    }
    !(semi && marker)
}

// ---------------------------------------------------------------------------
// Generic region scan
// ---------------------------------------------------------------------------

/// Walks a token region left to right, lifting the shapes the rules care
/// about into nodes and passing everything else through. Bracketed regions
/// that belong to a recognized construct are scanned recursively; all other
/// tokens are visited in this same linear pass.
fn scan_region(sig: &[&Token]) -> Vec<SynNode> {
    let mut out = Vec::new();
    let mut i = 0;
    // Whether the previous token could end an expression; decides between
    // record access (`X#r.f`) and record index (`#r.f`).
    let mut prev_ends_expr = false;
    while i < sig.len() {
        let tok = sig[i];
        match tok.kind {
            TokenKind::Atom => {
                if let Some(next_i) = scan_call(sig, i, &mut out) {
                    i = next_i;
                } else {
                    out.push(atom_node(tok));
                    i += 1;
                }
                prev_ends_expr = true;
            }
            TokenKind::Variable => {
                out.push(var_node(tok));
                i += 1;
                prev_ends_expr = true;
            }
            TokenKind::MacroMarker => {
                // `??Arg` inside define bodies stringifies; the second
                // marker plus name still registers as a use.
                match sig.get(i + 1) {
                    Some(t) if t.kind == TokenKind::MacroMarker => {
                        i += 1;
                        prev_ends_expr = false;
                    }
                    Some(t)
                        if t.kind == TokenKind::Atom || t.kind == TokenKind::Variable =>
                    {
                        i = scan_macro_use(sig, i, &mut out);
                        prev_ends_expr = true;
                    }
                    _ => {
                        i += 1;
                        prev_ends_expr = false;
                    }
                }
            }
            TokenKind::Punct if tok.text == "#" => {
                if let Some(next_i) = scan_record_shape(sig, i, prev_ends_expr, &mut out) {
                    i = next_i;
                    prev_ends_expr = true;
                } else {
                    i += 1;
                    prev_ends_expr = false;
                }
            }
            TokenKind::Punct => {
                prev_ends_expr = matches!(tok.text.as_str(), ")" | "]" | "}" | ">>");
                i += 1;
            }
            TokenKind::Keyword => {
                prev_ends_expr = tok.text == "end";
                i += 1;
            }
            TokenKind::Integer
            | TokenKind::Float
            | TokenKind::String
            | TokenKind::Char => {
                prev_ends_expr = true;
                i += 1;
            }
            TokenKind::Dot => {
                prev_ends_expr = false;
                i += 1;
            }
            TokenKind::Comment | TokenKind::Whitespace => {
                unreachable!("trivia filtered before scanning")
            }
        }
    }
    out
}

/// `name(...)` or `mod:name(...)` starting at `i`. Returns the index after
/// the call, or `None` when the shape does not match.
fn scan_call(sig: &[&Token], i: usize, out: &mut Vec<SynNode>) -> Option<usize> {
    let tok = sig[i];
    let qualified = matches!(sig.get(i + 1), Some(t) if is_punct(t, ":"))
        && matches!(sig.get(i + 2), Some(t) if t.kind == TokenKind::Atom)
        && matches!(sig.get(i + 3), Some(t) if is_punct(t, "("));
    if qualified {
        let close = matching(sig, i + 3)?;
        let name_tok = sig[i + 2];
        let mut children = vec![atom_node(tok), atom_node(name_tok)];
        let args = split_commas(sig, i + 4, close);
        for (s, e) in &args {
            children.extend(scan_region(&sig[*s..*e]));
        }
        out.push(SynNode::with(
            NodePayload::Call {
                module: Some(atom_value(&tok.text)),
                name: atom_value(&name_tok.text),
                arity: args.len() as u32,
            },
            tok.line,
            children,
        ));
        return Some(close + 1);
    }
    if matches!(sig.get(i + 1), Some(t) if is_punct(t, "(")) {
        let close = matching(sig, i + 1)?;
        let mut children = vec![atom_node(tok)];
        let args = split_commas(sig, i + 2, close);
        for (s, e) in &args {
            children.extend(scan_region(&sig[*s..*e]));
        }
        out.push(SynNode::with(
            NodePayload::Call {
                module: None,
                name: atom_value(&tok.text),
                arity: args.len() as u32,
            },
            tok.line,
            children,
        ));
        return Some(close + 1);
    }
    None
}

/// `?Name` or `?Name(...)` starting at the marker. Returns the index after
/// the use.
fn scan_macro_use(sig: &[&Token], marker: usize, out: &mut Vec<SynNode>) -> usize {
    let name_tok = sig[marker + 1];
    let name = match name_tok.kind {
        TokenKind::Atom => atom_value(&name_tok.text),
        _ => name_tok.text.clone(),
    };
    let name_child = match name_tok.kind {
        TokenKind::Atom => atom_node(name_tok),
        _ => var_node(name_tok),
    };
    let mut children = vec![name_child];
    if matches!(sig.get(marker + 2), Some(t) if is_punct(t, "(")) {
        if let Some(close) = matching(sig, marker + 2) {
            let args = split_commas(sig, marker + 3, close);
            for (s, e) in &args {
                children.extend(scan_region(&sig[*s..*e]));
            }
            out.push(SynNode::with(
                NodePayload::MacroUse { name, arity: Some(args.len() as u32) },
                sig[marker].line,
                children,
            ));
            return close + 1;
        }
    }
    out.push(SynNode::with(
        NodePayload::MacroUse { name, arity: None },
        sig[marker].line,
        children,
    ));
    marker + 2
}

/// Record shapes starting at a `#`: construction/update `#r{...}`, access
/// `X#r.f`, and index `#r.f`. The record name may be a macro use, which
/// leaves it unresolved. Returns the index after the construct, or `None`
/// when the `#` is something else (maps, for one) and should be skipped.
fn scan_record_shape(
    sig: &[&Token],
    hash: usize,
    prev_ends_expr: bool,
    out: &mut Vec<SynNode>,
) -> Option<usize> {
    let line = sig[hash].line;
    // Resolve the record name: a plain atom, or ?MACRO (name unresolved).
    let (name, name_child, after_name) = match sig.get(hash + 1) {
        Some(t) if t.kind == TokenKind::Atom => {
            (Some(atom_value(&t.text)), atom_node(t), hash + 2)
        }
        Some(t) if t.kind == TokenKind::MacroMarker => match sig.get(hash + 2) {
            Some(n) if n.kind == TokenKind::Atom || n.kind == TokenKind::Variable => {
                let mut uses = Vec::new();
                let after = scan_macro_use(sig, hash + 1, &mut uses);
                (None, uses.remove(0), after)
            }
            _ => return None,
        },
        _ => return None,
    };

    match sig.get(after_name) {
        Some(t) if is_punct(t, "{") => {
            let close = matching(sig, after_name)?;
            let mut fields = Vec::new();
            let mut wildcard = false;
            let mut children = vec![name_child];
            for (s, e) in split_commas(sig, after_name + 1, close) {
                if s >= e {
                    continue;
                }
                let first = sig[s];
                if first.kind == TokenKind::Atom {
                    fields.push(atom_value(&first.text));
                    children.push(atom_node(first));
                    children.extend(scan_region(&sig[s + 1..e]));
                } else if first.kind == TokenKind::Variable && first.text == "_" {
                    // `_ = Default` sets every remaining field: all used.
                    wildcard = true;
                    children.push(var_node(first));
                    children.extend(scan_region(&sig[s + 1..e]));
                } else {
                    // A field group hidden behind a macro (or anything else
                    // we cannot name) may touch any field; treat the whole
                    // record as used rather than guess.
                    wildcard = true;
                    children.extend(scan_region(&sig[s..e]));
                }
            }
            out.push(SynNode::with(
                NodePayload::RecordExpr { name, fields, wildcard },
                line,
                children,
            ));
            Some(close + 1)
        }
        Some(t) if is_punct(t, ".") => match sig.get(after_name + 1) {
            Some(f) if f.kind == TokenKind::Atom => {
                let field = atom_value(&f.text);
                let children = vec![name_child, atom_node(f)];
                let payload = if prev_ends_expr {
                    NodePayload::RecordAccess { name, field }
                } else {
                    NodePayload::RecordIndex { name, field }
                };
                out.push(SynNode::with(payload, line, children));
                Some(after_name + 2)
            }
            _ => None,
        },
        _ => None,
    }
}
