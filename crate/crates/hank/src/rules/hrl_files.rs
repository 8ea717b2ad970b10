//! Rule: header files nothing includes.
//!
//! A `.hrl` file is reported when no `-include`/`-include_lib` attribute in
//! the project can refer to it. Matching is deliberately loose — include
//! paths depend on compiler include dirs we do not know, so any plausible
//! path correspondence counts as a use. One include attribute whose path we
//! cannot read (macro-composed, usually) silences the whole rule: that one
//! include could point at any header.

use crate::engine::{IgnorePattern, Rule, RuleId, RuleResult};
use crate::scanner::{FileKind, ProjectContext};
use crate::syntax::{query_nodes, NodeKind, NodePayload};
use crate::term::TermValue;

/// Whether an include path plausibly refers to a header at `hrl_path`
/// (relative to the project root). Four steps: exact match; otherwise drop
/// `.` and `..` segments from the include path, then compare again; equal
/// paths match, and so does either path ending with `/` + the other.
pub fn paths_match(include_path: &str, hrl_path: &str) -> bool {
    if include_path == hrl_path {
        return true;
    }
    let cleaned = drop_dot_segments(include_path);
    let (longer, shorter) = if cleaned.len() >= hrl_path.len() {
        (cleaned.as_str(), hrl_path)
    } else {
        (hrl_path, cleaned.as_str())
    };
    longer == shorter || longer.ends_with(&format!("/{shorter}"))
}

fn drop_dot_segments(path: &str) -> String {
    path.split('/')
        .filter(|seg| *seg != "." && *seg != "..")
        .collect::<Vec<_>>()
        .join("/")
}

/// Full relative resolution: `..` pops the previous segment where it can.
/// `paths_match` only drops dot segments, which is stricter than real
/// resolution when `..` follows a named segment — so headers are also
/// checked against the resolved path, lest a `src/../include/x.hrl`
/// include fail to mark `include/x.hrl` as used.
fn resolve_dot_segments(path: &str) -> String {
    let mut stack: Vec<&str> = Vec::new();
    for seg in path.split('/') {
        match seg {
            "." => {}
            ".." => {
                stack.pop();
            }
            other => stack.push(other),
        }
    }
    stack.join("/")
}

pub struct UnusedHrlFiles;

impl Rule for UnusedHrlFiles {
    fn id(&self) -> RuleId {
        RuleId::new("unused_hrl_files")
    }

    fn analyze(&self, ctx: &ProjectContext) -> Vec<RuleResult> {
        let mut candidates: Vec<String> = Vec::new();
        for (_, forms) in ctx.form_files() {
            for kind in [NodeKind::IncludeAttr, NodeKind::IncludeLibAttr] {
                for node in query_nodes(forms, kind) {
                    let path = match &node.payload {
                        NodePayload::IncludeAttr { path }
                        | NodePayload::IncludeLibAttr { path } => path,
                        _ => unreachable!(),
                    };
                    let Some(path) = path else {
                        // An unreadable include path could point anywhere.
                        return Vec::new();
                    };
                    let path = path.replace('\\', "/");
                    let resolved = resolve_dot_segments(&path);
                    if resolved != path {
                        candidates.push(resolved);
                    }
                    candidates.push(path);
                }
            }
        }
        ctx.files
            .iter()
            .filter(|entry| entry.kind == FileKind::HrlHeader)
            .filter(|entry| !candidates.iter().any(|inc| paths_match(inc, &entry.path)))
            .map(|entry| RuleResult {
                rule: self.id(),
                file: entry.path.clone(),
                line: 0,
                text: "this file is unused".to_string(),
                pattern: IgnorePattern::File,
            })
            .collect()
    }

    fn ignored(&self, _pattern: &IgnorePattern, _detail: &TermValue) -> bool {
        // Whole-file findings carry no finer detail; file-scoped ignores
        // (handled by the engine) are the way to silence this rule.
        false
    }
}
