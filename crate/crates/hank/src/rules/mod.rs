//! The oxbow-code rules.
//!
//! Every rule follows the same bargain: a warning is only emitted when the
//! analysis can *prove* the element is unused under the documented
//! assumptions. Whenever a construct resists resolution (macro-composed
//! paths, macro-named records, behaviours we cannot enumerate), the rule
//! backs off and says nothing. False negatives are tolerated; false
//! positives are bugs.

pub mod config_options;
pub mod function_args;
pub mod hrl_files;
pub mod macros;
pub mod record_fields;

use crate::engine::{Rule, RuleId};

/// A macro definition or use: `-define(NAME, ...)` has arity `None`,
/// `-define(NAME(A, B), ...)` has arity `Some(2)`. The two are distinct
/// macros in Erlang.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MacroKey {
    pub name: String,
    pub arity: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RecordFieldKey {
    pub record: String,
    pub field: String,
}

/// An argument slot of a function: `index` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ArgPosition {
    pub function: String,
    pub arity: u32,
    pub index: u32,
}

/// All rules, in their canonical order. `extra_config_skips` adds config
/// file basenames the configuration-options rule should leave alone.
pub fn default_rules(extra_config_skips: &[String]) -> Vec<Box<dyn Rule>> {
    vec![
        Box::new(macros::UnusedMacros),
        Box::new(record_fields::UnusedRecordFields),
        Box::new(hrl_files::UnusedHrlFiles),
        Box::new(config_options::UnusedConfigurationOptions::new(extra_config_skips)),
        Box::new(function_args::UnnecessaryFunctionArguments),
    ]
}

pub fn default_rule_ids() -> Vec<RuleId> {
    default_rules(&[]).iter().map(|rule| rule.id()).collect()
}
