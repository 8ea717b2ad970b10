//! Rule: argument slots no clause of a function looks at.
//!
//! A slot is reported when every clause binds it to `_` or to a variable
//! starting with `_` (which Erlang itself promises is unused). Functions
//! whose signatures are not their own are exempt: behaviour callbacks
//! (declared behaviours must *all* be known — one unknown behaviour and the
//! module is left alone), common-test suites, and NIF stubs whose bodies
//! just call `erlang:nif_error/1,2`. Functions with macro-distorted heads
//! are marked irregular by the parser and skipped here.

use crate::behaviors::CallbackSet;
use crate::engine::{IgnorePattern, Rule, RuleId, RuleResult};
use crate::rules::ArgPosition;
use crate::scanner::{module_name, FileKind, ProjectContext};
use crate::syntax::{query_nodes, ArgShape, NodeKind, NodePayload, SynNode};
use crate::term::TermValue;

pub struct UnnecessaryFunctionArguments;

impl Rule for UnnecessaryFunctionArguments {
    fn id(&self) -> RuleId {
        RuleId::new("unnecessary_function_arguments")
    }

    fn analyze(&self, ctx: &ProjectContext) -> Vec<RuleResult> {
        let mut results = Vec::new();
        for (entry, forms) in ctx.form_files() {
            if entry.kind != FileKind::ErlModule {
                continue;
            }
            let Some(expected) = expected_callbacks(ctx, &entry.path, forms) else {
                // Some behaviour here has callbacks we cannot enumerate;
                // any function could be one of them.
                continue;
            };
            for form in forms {
                let NodePayload::FunctionDef { name, arity, irregular } = &form.payload else {
                    continue;
                };
                if *irregular || *arity == 0 || expected.contains(name, *arity) {
                    continue;
                }
                let clauses: Vec<&SynNode> = form
                    .children
                    .iter()
                    .filter(|child| matches!(child.payload, NodePayload::Clause { .. }))
                    .collect();
                if clauses.is_empty()
                    || clauses.iter().any(|clause| clause_args(clause).len() != *arity as usize)
                {
                    continue;
                }
                if calls_nif_error(form) {
                    continue;
                }
                // Highest index first: dropping the last argument is the
                // refactoring that needs no re-numbering of the others.
                for index in (1..=*arity).rev() {
                    let unused_everywhere = clauses
                        .iter()
                        .all(|clause| clause_args(clause)[(index - 1) as usize] != ArgShape::Other);
                    if unused_everywhere {
                        results.push(RuleResult {
                            rule: self.id(),
                            file: entry.path.clone(),
                            line: form.line,
                            text: format!("{name}/{arity} does not need its #{index} argument"),
                            pattern: IgnorePattern::FunctionArg(ArgPosition {
                                function: name.clone(),
                                arity: *arity,
                                index,
                            }),
                        });
                    }
                }
            }
        }
        results
    }

    /// Ignore details: `function_name` (every slot), `{function, Arity}`,
    /// or `{function, Arity, Index}`.
    fn ignored(&self, pattern: &IgnorePattern, detail: &TermValue) -> bool {
        let IgnorePattern::FunctionArg(pos) = pattern else { return false };
        let arity_matches = |term: &TermValue| {
            matches!(term, TermValue::Integer(a) if u32::try_from(*a).ok() == Some(pos.arity))
        };
        let index_matches = |term: &TermValue| {
            matches!(term, TermValue::Integer(i) if u32::try_from(*i).ok() == Some(pos.index))
        };
        match detail {
            TermValue::Atom(name) | TermValue::String(name) => *name == pos.function,
            TermValue::Tuple(parts) => match parts.as_slice() {
                [name, arity] => name.as_name() == Some(&pos.function) && arity_matches(arity),
                [name, arity, index] => {
                    name.as_name() == Some(&pos.function)
                        && arity_matches(arity)
                        && index_matches(index)
                }
                _ => false,
            },
            _ => false,
        }
    }
}

/// Every callback signature functions in this module may be implementing,
/// or `None` when a declared behaviour is unknown (or unreadable) and the
/// module must be skipped entirely.
fn expected_callbacks(
    ctx: &ProjectContext,
    path: &str,
    forms: &[SynNode],
) -> Option<CallbackSet> {
    let mut expected = CallbackSet::default();
    for node in query_nodes(forms, NodeKind::BehaviorAttr) {
        let NodePayload::BehaviorAttr { name } = &node.payload else { unreachable!() };
        expected.merge(ctx.expected_callbacks(name)?);
    }
    for node in query_nodes(forms, NodeKind::Other) {
        if matches!(&node.payload, NodePayload::Other { attr: Some(attr) } if attr == "behaviour")
        {
            // `-behaviour(?SOMETHING)`: no way to tell what it expects.
            return None;
        }
    }
    if module_name(path).ends_with("_SUITE") {
        expected.merge(ctx.expected_callbacks("ct_suite").expect("built-in table has ct_suite"));
    }
    Some(expected)
}

fn clause_args(clause: &SynNode) -> &[ArgShape] {
    let NodePayload::Clause { args } = &clause.payload else { unreachable!() };
    args
}

fn calls_nif_error(form: &SynNode) -> bool {
    query_nodes(std::slice::from_ref(form), NodeKind::Call)
        .iter()
        .any(|call| match &call.payload {
            NodePayload::Call { module, name, arity } => {
                name == "nif_error"
                    && (1..=2).contains(arity)
                    && module.as_deref().map_or(true, |m| m == "erlang")
            }
            _ => false,
        })
}
