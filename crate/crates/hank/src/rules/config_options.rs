//! Rule: configuration options no code ever reads.
//!
//! Keys come from two places: the `env` list of `.app.src` files, and
//! per-application option lists in `.config` files — but only for
//! applications that live in this project (a `sys.config` also carries
//! options for kernel, sasl, and friends, whose readers we cannot see).
//! A key counts as used when its atom appears anywhere in the project's
//! source: `application:get_env` is just one of many ways to read one, so
//! plain atom presence is the only check that cannot false-positive.
//!
//! `rebar.config` and `elvis.config` configure build tooling, not the
//! application, and are skipped; `config_skips` adds more basenames.

use std::collections::BTreeSet;

use crate::engine::{IgnorePattern, Rule, RuleId, RuleResult};
use crate::scanner::{FileKind, ProjectContext};
use crate::syntax::{query_nodes, NodeKind, NodePayload};
use crate::term::TermValue;

const DEFAULT_SKIPS: &[&str] = &["rebar.config", "elvis.config"];

pub struct UnusedConfigurationOptions {
    extra_skips: Vec<String>,
}

impl UnusedConfigurationOptions {
    pub fn new(extra_skips: &[String]) -> Self {
        UnusedConfigurationOptions { extra_skips: extra_skips.to_vec() }
    }

    fn skipped(&self, path: &str) -> bool {
        let base = path.rsplit('/').next().unwrap_or(path);
        DEFAULT_SKIPS.contains(&base) || self.extra_skips.iter().any(|s| s == base)
    }
}

impl Rule for UnusedConfigurationOptions {
    fn id(&self) -> RuleId {
        RuleId::new("unused_configuration_options")
    }

    fn analyze(&self, ctx: &ProjectContext) -> Vec<RuleResult> {
        let mut keys: Vec<(String, String)> = Vec::new();
        let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
        let mut add = |file: &str, key: &str| {
            if seen.insert((file.to_string(), key.to_string())) {
                keys.push((file.to_string(), key.to_string()));
            }
        };

        for (entry, terms) in ctx.term_files(FileKind::AppSrc) {
            for term in terms {
                let Some(parts) = term.as_tuple() else { continue };
                let [head, _name, TermValue::List(props)] = parts else {
                    continue;
                };
                if head.as_atom() != Some("application") {
                    continue;
                }
                for prop in props {
                    let Some(pair) = prop.as_tuple().filter(|p| p.len() == 2) else {
                        continue;
                    };
                    if pair[0].as_atom() != Some("env") {
                        continue;
                    }
                    for key in option_keys(&pair[1]) {
                        add(&entry.path, key);
                    }
                }
            }
        }

        for (entry, terms) in ctx.term_files(FileKind::ConfigTerm) {
            if self.skipped(&entry.path) {
                continue;
            }
            for term in terms {
                let Some(sections) = term.as_list() else { continue };
                for section in sections {
                    let Some(pair) = section.as_tuple().filter(|p| p.len() == 2) else {
                        continue;
                    };
                    let Some(app) = pair[0].as_atom() else { continue };
                    if !ctx.app_names.contains(app) {
                        continue;
                    }
                    for key in option_keys(&pair[1]) {
                        add(&entry.path, key);
                    }
                }
            }
        }

        if keys.is_empty() {
            return Vec::new();
        }

        let mut used: BTreeSet<&str> = BTreeSet::new();
        for (_, forms) in ctx.form_files() {
            for node in query_nodes(forms, NodeKind::Atom) {
                let NodePayload::Atom { value } = &node.payload else { unreachable!() };
                used.insert(value);
            }
        }

        keys.into_iter()
            .filter(|(_, key)| !used.contains(key.as_str()))
            .map(|(file, key)| RuleResult {
                rule: self.id(),
                file,
                line: 0,
                text: format!("{key} is not used anywhere in the code"),
                pattern: IgnorePattern::ConfigKey(key),
            })
            .collect()
    }

    /// Ignore details: the option key as an atom.
    fn ignored(&self, pattern: &IgnorePattern, detail: &TermValue) -> bool {
        let IgnorePattern::ConfigKey(key) = pattern else { return false };
        detail.as_name() == Some(key)
    }
}

/// The option keys of an `[{Key, Value}, ...]` list.
fn option_keys(options: &TermValue) -> Vec<&str> {
    let Some(options) = options.as_list() else { return Vec::new() };
    options
        .iter()
        .filter_map(|option| option.as_tuple())
        .filter(|parts| !parts.is_empty())
        .filter_map(|parts| parts[0].as_atom())
        .collect()
}
