//! Rule: macros that are defined but never used.
//!
//! A `-define(NAME, ...)` and a `-define(NAME(A), ...)` are different
//! macros, so uses are matched by name *and* arity — with one wrinkle: a
//! parenthesized use `?NAME(x)` also reaches a parameterless definition of
//! `NAME` (the expansion is applied to the argument list), so it marks both
//! arities. Names tested by `-ifdef`/`-ifndef`/`-undef` or `defined(...)`
//! inside `-if`/`-elif` are never reported: their mere definedness is load-
//! bearing, whatever their arity.

use std::collections::BTreeSet;

use crate::engine::{IgnorePattern, Rule, RuleId, RuleResult};
use crate::rules::MacroKey;
use crate::scanner::ProjectContext;
use crate::syntax::{query_nodes, NodeKind, NodePayload, SynNode};
use crate::term::TermValue;

/// Names the preprocessor defines on its own. User code cannot redefine
/// them, so a `-define` under one of these names is broken input, not an
/// oxbow — and uses of them never correspond to a project definition.
const PREDEFINED: &[&str] = &[
    "MODULE",
    "MODULE_STRING",
    "FILE",
    "LINE",
    "MACHINE",
    "FUNCTION_NAME",
    "FUNCTION_ARITY",
    "OTP_RELEASE",
    "FEATURE_AVAILABLE",
    "FEATURE_ENABLED",
];

pub struct UnusedMacros;

impl Rule for UnusedMacros {
    fn id(&self) -> RuleId {
        RuleId::new("unused_macros")
    }

    fn analyze(&self, ctx: &ProjectContext) -> Vec<RuleResult> {
        let mut defined: Vec<(String, u32, MacroKey)> = Vec::new();
        let mut used: BTreeSet<MacroKey> = BTreeSet::new();
        let mut tested: BTreeSet<String> = BTreeSet::new();

        for (entry, forms) in ctx.form_files() {
            for node in query_nodes(forms, NodeKind::DefineAttr) {
                let NodePayload::DefineAttr { name, arity } = &node.payload else {
                    unreachable!()
                };
                if !PREDEFINED.contains(&name.as_str()) {
                    defined.push((
                        entry.path.clone(),
                        node.line,
                        MacroKey { name: name.clone(), arity: *arity },
                    ));
                }
            }
            for node in query_nodes(forms, NodeKind::MacroUse) {
                let NodePayload::MacroUse { name, arity } = &node.payload else {
                    unreachable!()
                };
                used.insert(MacroKey { name: name.clone(), arity: *arity });
                if arity.is_some() {
                    // ?NAME(x) also works when NAME is defined without
                    // parameters: the expansion is applied to `(x)`.
                    used.insert(MacroKey { name: name.clone(), arity: None });
                }
            }
            for node in query_nodes(forms, NodeKind::Other) {
                let NodePayload::Other { attr: Some(attr) } = &node.payload else {
                    continue;
                };
                match attr.as_str() {
                    "ifdef" | "ifndef" | "undef" => {
                        // children[0] is the attribute name; the tested
                        // name follows it.
                        if let Some(cond) = node.children.get(1) {
                            match &cond.payload {
                                NodePayload::Atom { value } => {
                                    tested.insert(value.clone());
                                }
                                NodePayload::Variable { name } => {
                                    tested.insert(name.clone());
                                }
                                _ => {}
                            }
                        }
                    }
                    "if" | "elif" => {
                        for name in defined_call_targets(&node.children) {
                            tested.insert(name);
                        }
                    }
                    _ => {}
                }
            }
        }

        defined
            .into_iter()
            .filter(|(_, _, key)| !used.contains(key) && !tested.contains(&key.name))
            .map(|(file, line, key)| RuleResult {
                rule: self.id(),
                file,
                line,
                text: format!("?{} is unused", key.name),
                pattern: IgnorePattern::Macro(key),
            })
            .collect()
    }

    /// Ignore details: `'NAME'` (any arity), `{'NAME', 2}` (that arity), or
    /// `{'NAME', none}` (the parameterless definition).
    fn ignored(&self, pattern: &IgnorePattern, detail: &TermValue) -> bool {
        let IgnorePattern::Macro(key) = pattern else { return false };
        match detail {
            TermValue::Atom(name) | TermValue::String(name) => *name == key.name,
            TermValue::Tuple(parts) => match parts.as_slice() {
                [name, TermValue::Integer(arity)] => {
                    name.as_name() == Some(&key.name)
                        && u32::try_from(*arity).ok() == key.arity
                }
                [name, TermValue::Atom(none)] if none == "none" => {
                    name.as_name() == Some(&key.name) && key.arity.is_none()
                }
                _ => false,
            },
            _ => false,
        }
    }
}

/// Names passed to `defined(...)` anywhere under the given nodes.
fn defined_call_targets(nodes: &[SynNode]) -> Vec<String> {
    let mut names = Vec::new();
    for call in query_nodes(nodes, NodeKind::Call) {
        let NodePayload::Call { module: None, name, arity: 1 } = &call.payload else {
            continue;
        };
        if name != "defined" {
            continue;
        }
        for child in &call.children {
            match &child.payload {
                NodePayload::Atom { value } => names.push(value.clone()),
                NodePayload::Variable { name } => names.push(name.clone()),
                _ => {}
            }
        }
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;

    fn results(sources: &[(&str, &str)]) -> Vec<RuleResult> {
        let ctx = ProjectContext::from_sources(sources.iter().copied());
        UnusedMacros.analyze(&ctx)
    }

    fn texts(sources: &[(&str, &str)]) -> Vec<(String, u32, String)> {
        results(sources)
            .into_iter()
            .map(|r| (r.file, r.line, r.text))
            .collect()
    }

    #[test]
    fn unused_define_is_reported() {
        let got = texts(&[(
            "src/m.erl",
            "-module(m).\n\n-define(UNUSED, 1).\n\nf() -> ok.\n",
        )]);
        assert_eq!(
            got,
            vec![("src/m.erl".to_string(), 3, "?UNUSED is unused".to_string())]
        );
    }

    #[test]
    fn used_define_is_not_reported() {
        let got = results(&[(
            "src/m.erl",
            "-module(m).\n-define(USED, used).\nf() -> ?USED.\n",
        )]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn arity_distinguishes_macros() {
        // ?M(1) uses M/1 and could use a parameterless M, but not M/2.
        let got = texts(&[(
            "src/m.erl",
            "-module(m).\n-define(M(A), A).\n-define(M(A, B), {A, B}).\nf() -> ?M(1).\n",
        )]);
        assert_eq!(
            got,
            vec![("src/m.erl".to_string(), 3, "?M is unused".to_string())]
        );
    }

    #[test]
    fn parenthesized_use_reaches_parameterless_define() {
        let got = results(&[(
            "src/m.erl",
            "-module(m).\n-define(CHECK, check).\nf() -> ?CHECK(1, 2).\n",
        )]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn bare_use_does_not_reach_parameterized_define() {
        let got = texts(&[(
            "src/m.erl",
            "-module(m).\n-define(M(A), A).\nf() -> ?M.\n",
        )]);
        assert_eq!(got.len(), 1, "got: {got:?}");
        assert_eq!(got[0].2, "?M is unused");
    }

    #[test]
    fn cross_file_use_counts() {
        let got = results(&[
            ("include/defs.hrl", "-define(SHARED, shared).\n"),
            ("src/m.erl", "-module(m).\n-include(\"defs.hrl\").\nf() -> ?SHARED.\n"),
        ]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn use_inside_another_define_counts() {
        let got = texts(&[(
            "src/m.erl",
            "-module(m).\n-define(INNER, 1).\n-define(OUTER, ?INNER + 1).\nf() -> ?OUTER.\n",
        )]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn ifdef_protects_every_arity_of_the_name() {
        let got = results(&[(
            "src/m.erl",
            "-module(m).\n-define(DEBUG(Msg), Msg).\n-ifdef(DEBUG).\nf() -> on.\n-else.\nf() -> off.\n-endif.\n",
        )]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn ifndef_and_undef_protect_names() {
        let got = results(&[(
            "src/m.erl",
            "-module(m).\n-define(GUARD, 1).\n-ifndef(GUARD).\n-endif.\n-define(GONE, 2).\n-undef(GONE).\n",
        )]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn if_defined_protects_names() {
        let got = results(&[(
            "src/m.erl",
            "-module(m).\n-define(FLAG, 1).\n-if(defined(FLAG)).\nf() -> a.\n-elif(defined(OTHER)).\nf() -> b.\n-else.\nf() -> c.\n-endif.\n",
        )]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn lowercase_macro_names_work() {
        let got = texts(&[(
            "src/m.erl",
            "-module(m).\n-define(dead, 1).\n-define(alive, 2).\nf() -> ?alive.\n",
        )]);
        assert_eq!(
            got,
            vec![("src/m.erl".to_string(), 2, "?dead is unused".to_string())]
        );
    }

    #[test]
    fn predefined_names_are_never_reported() {
        // A -define of a predefined name is invalid Erlang anyway; the rule
        // must not trip over it.
        let got = results(&[(
            "src/m.erl",
            "-module(m).\n-define(MODULE, wrong).\nf() -> ok.\n",
        )]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn unresolved_define_reports_nothing() {
        // A -define whose shape defies parsing degrades to an opaque form.
        let got = results(&[("src/m.erl", "-module(m).\n-define(?WAT, 1).\n")]);
        assert!(got.is_empty(), "got: {got:?}");
    }

    #[test]
    fn ignore_details() {
        let rule = UnusedMacros;
        let bare = IgnorePattern::Macro(MacroKey { name: "M".into(), arity: None });
        let two = IgnorePattern::Macro(MacroKey { name: "M".into(), arity: Some(2) });

        let atom = TermValue::Atom("M".into());
        assert!(rule.ignored(&bare, &atom));
        assert!(rule.ignored(&two, &atom));

        let with_arity =
            TermValue::Tuple(vec![TermValue::Atom("M".into()), TermValue::Integer(2)]);
        assert!(rule.ignored(&two, &with_arity));
        assert!(!rule.ignored(&bare, &with_arity));

        let with_none =
            TermValue::Tuple(vec![TermValue::Atom("M".into()), TermValue::Atom("none".into())]);
        assert!(rule.ignored(&bare, &with_none));
        assert!(!rule.ignored(&two, &with_none));

        let other = TermValue::Atom("OTHER".into());
        assert!(!rule.ignored(&bare, &other));
    }
}
