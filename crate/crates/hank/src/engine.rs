//! The rule engine: runs each rule over the shared project context,
//! filters results through the ignore specs, and orders the output.
//!
//! Rules run strictly one after another — their results must not depend on
//! scheduling — and a panicking rule aborts the run with an error rather
//! than shipping a half-analyzed report. Parallelism lives in the scanner,
//! where it cannot affect results.

use std::collections::BTreeSet;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use thiserror::Error;

use crate::config::{ConfigError, IgnoreSpec};
use crate::glob::glob_match;
use crate::rules::{ArgPosition, MacroKey, RecordFieldKey};
use crate::scanner::ProjectContext;
use crate::syntax::{query_nodes, NodeKind, NodePayload};
use crate::term::TermValue;

/// Rule name, as written in configuration and `-hank` attributes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId(String);

impl RuleId {
    pub fn new(name: impl Into<String>) -> Self {
        RuleId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RuleId {
    fn from(name: &str) -> Self {
        RuleId::new(name)
    }
}

/// What a warning is *about*, in matchable form. Ignore details from
/// `-hank` attributes are matched against this, not against the rendered
/// message text.
#[derive(Debug, Clone, PartialEq)]
pub enum IgnorePattern {
    Macro(MacroKey),
    RecordField(RecordFieldKey),
    FunctionArg(ArgPosition),
    ConfigKey(String),
    /// Whole-file findings; only file-scoped ignores apply.
    File,
}

/// One warning. `line` 0 means the finding concerns the file as a whole.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleResult {
    pub rule: RuleId,
    pub file: String,
    pub line: u32,
    pub text: String,
    pub pattern: IgnorePattern,
}

pub trait Rule: Send + Sync {
    fn id(&self) -> RuleId;

    /// Produces every warning this rule can justify from the context. Must
    /// be deterministic for a given context.
    fn analyze(&self, ctx: &ProjectContext) -> Vec<RuleResult>;

    /// Whether an ignore `detail` term (the payload of a `-hank` attribute
    /// entry) suppresses a warning with this `pattern`.
    fn ignored(&self, pattern: &IgnorePattern, detail: &TermValue) -> bool;
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("no rules selected")]
    NoRules,
    #[error("rule {0} crashed: {1}")]
    RuleCrash(RuleId, String),
}

/// Runs `rules` in order over `ctx`, drops ignored results, and returns the
/// remainder sorted by (file, line, rule). The sort is stable, so a rule's
/// own emission order breaks ties.
pub fn run(
    ctx: &ProjectContext,
    rules: &[Box<dyn Rule>],
    ignores: &[IgnoreSpec],
) -> Result<Vec<RuleResult>, EngineError> {
    if rules.is_empty() {
        return Err(EngineError::NoRules);
    }
    let mut results = Vec::new();
    for rule in rules {
        let analyzed = catch_unwind(AssertUnwindSafe(|| rule.analyze(ctx)))
            .map_err(|payload| EngineError::RuleCrash(rule.id(), panic_text(payload)))?;
        results.extend(
            analyzed
                .into_iter()
                .filter(|result| !is_ignored(rule.as_ref(), result, ignores)),
        );
    }
    results.sort_by(|a, b| {
        (a.file.as_str(), a.line, a.rule.as_str()).cmp(&(b.file.as_str(), b.line, b.rule.as_str()))
    });
    Ok(results)
}

fn panic_text(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".to_string()
    }
}

/// Collects ignore specs: the configured ones plus every `-hank` attribute
/// in the context. Malformed attributes and unknown rule names are
/// configuration errors — silently ignoring less (or more) than the author
/// asked for is exactly the kind of surprise this tool exists to prevent.
pub fn gather_ignores(
    ctx: &ProjectContext,
    configured: &[IgnoreSpec],
    known_rules: &BTreeSet<RuleId>,
) -> Result<Vec<IgnoreSpec>, ConfigError> {
    let mut specs = configured.to_vec();
    for (entry, forms) in ctx.form_files() {
        for node in query_nodes(forms, NodeKind::HankAttr) {
            let NodePayload::HankAttr { term } = &node.payload else { unreachable!() };
            let at = || (entry.path.clone(), node.line);
            let Some(term) = term else {
                let (file, line) = at();
                return Err(ConfigError::in_file(
                    file,
                    Some(line),
                    "cannot parse -hank attribute",
                ));
            };
            match term {
                TermValue::Atom(word) if word == "ignore" => {
                    specs.push(IgnoreSpec {
                        file_scope: entry.path.clone(),
                        rule: None,
                        detail: None,
                    });
                }
                TermValue::List(items) => {
                    for item in items {
                        let (file, line) = at();
                        specs.extend(attr_entry_specs(item, file, line, known_rules)?);
                    }
                }
                other => {
                    let (file, line) = at();
                    return Err(ConfigError::in_file(
                        file,
                        Some(line),
                        format!("invalid -hank attribute value: {other}"),
                    ));
                }
            }
        }
    }
    Ok(specs)
}

/// One entry of a `-hank([...])` list: either a rule name, or
/// `{rule, [Detail, ...]}` scoping the ignore to particular findings.
fn attr_entry_specs(
    item: &TermValue,
    file: String,
    line: u32,
    known_rules: &BTreeSet<RuleId>,
) -> Result<Vec<IgnoreSpec>, ConfigError> {
    let check_rule = |name: &str| -> Result<RuleId, ConfigError> {
        let id = RuleId::new(name);
        if known_rules.contains(&id) {
            Ok(id)
        } else {
            Err(ConfigError::in_file(
                file.clone(),
                Some(line),
                format!("unknown rule `{name}` in -hank attribute"),
            ))
        }
    };
    match item {
        TermValue::Atom(rule) => Ok(vec![IgnoreSpec {
            file_scope: file.clone(),
            rule: Some(check_rule(rule)?),
            detail: None,
        }]),
        TermValue::Tuple(parts) => match parts.as_slice() {
            [TermValue::Atom(rule), TermValue::List(details)] => {
                let id = check_rule(rule)?;
                Ok(details
                    .iter()
                    .map(|detail| IgnoreSpec {
                        file_scope: file.clone(),
                        rule: Some(id.clone()),
                        detail: Some(detail.clone()),
                    })
                    .collect())
            }
            _ => Err(ConfigError::in_file(
                file,
                Some(line),
                format!("malformed -hank ignore entry: {item}"),
            )),
        },
        other => Err(ConfigError::in_file(
            file,
            Some(line),
            format!("malformed -hank ignore entry: {other}"),
        )),
    }
}

/// A result is ignored when any spec covers it: the file scope must match,
/// then the rule (absent = all rules), then the detail (absent = all
/// findings; present = the rule decides).
pub fn is_ignored(rule: &dyn Rule, result: &RuleResult, specs: &[IgnoreSpec]) -> bool {
    specs.iter().any(|spec| {
        if !glob_match(&spec.file_scope, &result.file) {
            return false;
        }
        match &spec.rule {
            None => true,
            Some(id) if *id == result.rule => match &spec.detail {
                None => true,
                Some(detail) => rule.ignored(&result.pattern, detail),
            },
            Some(_) => false,
        }
    })
}
