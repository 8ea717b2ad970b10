//! Tool configuration: the `hank` section of a project's `rebar.config`
//! (or a standalone `hank.config`), merged with command-line overrides.
//!
//! A configuration looks like:
//!
//! ```erlang
//! {hank, [{ignore, ["src/generated/**",
//!                   {"src/api.erl", unnecessary_function_arguments},
//!                   {"src/api.erl", unused_macros, ['VERSION']}]},
//!         {rules, [unused_macros, unused_hrl_files]},
//!         {excludes, ["test/fixtures/**"]},
//!         {config_skips, ["dev.config"]},
//!         {format, json}]}.
//! ```
//!
//! Every key and every rule name is validated: a typo in an ignore list
//! must fail the run, not silently drop the ignore.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::engine::RuleId;
use crate::render::OutputFormat;
use crate::term::{read_terms, TermValue};

#[derive(Debug)]
pub struct ConfigError {
    pub file: Option<String>,
    pub line: Option<u32>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError { file: None, line: None, message: message.into() }
    }

    pub fn in_file(file: impl Into<String>, line: Option<u32>, message: impl Into<String>) -> Self {
        ConfigError { file: Some(file.into()), line, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, self.line) {
            (Some(file), Some(line)) => write!(f, "{file}:{line}: {}", self.message),
            (Some(file), None) => write!(f, "{file}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// One ignore directive, from configuration or a `-hank` attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct IgnoreSpec {
    /// Path or glob, relative to the project root, that this directive
    /// covers.
    pub file_scope: String,
    /// `None` silences every rule in scope.
    pub rule: Option<RuleId>,
    /// `None` silences everything the rule reports in scope; otherwise the
    /// rule decides which of its findings the term describes.
    pub detail: Option<TermValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToolConfig {
    pub ignore: Vec<IgnoreSpec>,
    /// `None` means "all default rules".
    pub rules: Option<Vec<RuleId>>,
    /// Globs for files to leave out of the scan entirely.
    pub excludes: Vec<String>,
    /// Extra config file basenames the configuration-options rule skips.
    pub config_skips: Vec<String>,
    pub format: OutputFormat,
}

impl Default for ToolConfig {
    fn default() -> Self {
        ToolConfig {
            ignore: Vec::new(),
            rules: None,
            excludes: Vec::new(),
            config_skips: Vec::new(),
            format: OutputFormat::Text,
        }
    }
}

/// Command-line settings that take precedence over the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub config_file: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub rules: Vec<String>,
    pub excludes: Vec<String>,
}

/// Loads configuration for a project. Files are consulted in order:
/// an explicit `--config` path (an error if missing), then
/// `<root>/rebar.config`, then `<root>/hank.config`; the first file with a
/// `{hank, [...]}` term wins. Command-line `rules` and `format` replace
/// their file counterparts; command-line `excludes` extend them.
pub fn load_config(
    root: &Path,
    overrides: &Overrides,
    known_rules: &BTreeSet<RuleId>,
) -> Result<ToolConfig, ConfigError> {
    let mut cfg = ToolConfig::default();

    if let Some(path) = &overrides.config_file {
        if !path.is_file() {
            return Err(ConfigError::new(format!(
                "config file not found: {}",
                path.display()
            )));
        }
        if let Some(opts) = hank_section(path)? {
            apply_options(&mut cfg, &opts, &path.display().to_string(), known_rules)?;
        }
    } else {
        for candidate in [root.join("rebar.config"), root.join("hank.config")] {
            if !candidate.is_file() {
                continue;
            }
            if let Some(opts) = hank_section(&candidate)? {
                apply_options(&mut cfg, &opts, &candidate.display().to_string(), known_rules)?;
                break;
            }
        }
    }

    if !overrides.rules.is_empty() {
        let mut ids = Vec::new();
        for name in &overrides.rules {
            ids.push(check_rule(name, known_rules, None)?);
        }
        cfg.rules = Some(ids);
    }
    cfg.excludes.extend(overrides.excludes.iter().cloned());
    if let Some(format) = overrides.format {
        cfg.format = format;
    }
    Ok(cfg)
}

/// Reads a config file and extracts the options list of its first
/// `{hank, [...]}` term, if any.
fn hank_section(path: &Path) -> Result<Option<Vec<TermValue>>, ConfigError> {
    let name = path.display().to_string();
    let bytes = fs::read(path)
        .map_err(|e| ConfigError::in_file(name.clone(), None, format!("cannot read: {e}")))?;
    let text = String::from_utf8_lossy(&bytes);
    let terms = read_terms(&text)
        .map_err(|e| ConfigError::in_file(name.clone(), Some(e.line), e.message))?;
    for term in terms {
        if let TermValue::Tuple(parts) = &term {
            if let [head, TermValue::List(opts)] = parts.as_slice() {
                if head.as_atom() == Some("hank") {
                    return Ok(Some(opts.clone()));
                }
            }
        }
    }
    Ok(None)
}

fn apply_options(
    cfg: &mut ToolConfig,
    opts: &[TermValue],
    file: &str,
    known_rules: &BTreeSet<RuleId>,
) -> Result<(), ConfigError> {
    let malformed = |what: &str, value: &TermValue| {
        ConfigError::in_file(file, None, format!("malformed {what}: {value}"))
    };
    for opt in opts {
        let Some(parts) = opt.as_tuple().filter(|p| p.len() == 2) else {
            return Err(ConfigError::in_file(
                file,
                None,
                format!("invalid hank option: {opt}"),
            ));
        };
        let (key, value) = (&parts[0], &parts[1]);
        match key.as_atom() {
            Some("ignore") => {
                let Some(entries) = value.as_list() else {
                    return Err(malformed("ignore list", value));
                };
                for entry in entries {
                    cfg.ignore.extend(ignore_entry_specs(entry, file, known_rules)?);
                }
            }
            Some("rules") => {
                let Some(names) = value.as_list() else {
                    return Err(malformed("rules list", value));
                };
                let mut ids = Vec::new();
                for name in names {
                    let Some(name) = name.as_atom() else {
                        return Err(malformed("rule name", name));
                    };
                    ids.push(check_rule(name, known_rules, Some(file))?);
                }
                cfg.rules = Some(ids);
            }
            Some("excludes") => {
                cfg.excludes.extend(string_list(value).ok_or_else(|| {
                    malformed("excludes list", value)
                })?);
            }
            Some("config_skips") => {
                cfg.config_skips.extend(string_list(value).ok_or_else(|| {
                    malformed("config_skips list", value)
                })?);
            }
            Some("format") => {
                cfg.format = match value.as_atom() {
                    Some("text") => OutputFormat::Text,
                    Some("json") => OutputFormat::Json,
                    _ => return Err(malformed("format", value)),
                };
            }
            _ => {
                return Err(ConfigError::in_file(
                    file,
                    None,
                    format!("unknown hank option: {opt}"),
                ));
            }
        }
    }
    Ok(())
}

/// One entry of the `ignore` option: a path/glob string, `{Path, Rule}`,
/// or `{Path, Rule, [Detail, ...]}`.
fn ignore_entry_specs(
    entry: &TermValue,
    file: &str,
    known_rules: &BTreeSet<RuleId>,
) -> Result<Vec<IgnoreSpec>, ConfigError> {
    let malformed =
        || ConfigError::in_file(file, None, format!("malformed ignore entry: {entry}"));
    match entry {
        TermValue::String(scope) => Ok(vec![IgnoreSpec {
            file_scope: scope.clone(),
            rule: None,
            detail: None,
        }]),
        TermValue::Tuple(parts) => match parts.as_slice() {
            [TermValue::String(scope), TermValue::Atom(rule)] => Ok(vec![IgnoreSpec {
                file_scope: scope.clone(),
                rule: Some(check_rule(rule, known_rules, Some(file))?),
                detail: None,
            }]),
            [TermValue::String(scope), TermValue::Atom(rule), TermValue::List(details)] => {
                let id = check_rule(rule, known_rules, Some(file))?;
                Ok(details
                    .iter()
                    .map(|detail| IgnoreSpec {
                        file_scope: scope.clone(),
                        rule: Some(id.clone()),
                        detail: Some(detail.clone()),
                    })
                    .collect())
            }
            _ => Err(malformed()),
        },
        _ => Err(malformed()),
    }
}

fn check_rule(
    name: &str,
    known_rules: &BTreeSet<RuleId>,
    file: Option<&str>,
) -> Result<RuleId, ConfigError> {
    let id = RuleId::new(name);
    if known_rules.contains(&id) {
        Ok(id)
    } else {
        let message = format!("unknown rule: {name}");
        Err(match file {
            Some(file) => ConfigError::in_file(file, None, message),
            None => ConfigError::new(message),
        })
    }
}

fn string_list(value: &TermValue) -> Option<Vec<String>> {
    value
        .as_list()?
        .iter()
        .map(|item| match item {
            TermValue::String(s) => Some(s.clone()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn known() -> BTreeSet<RuleId> {
        ["unused_macros", "unused_hrl_files", "unnecessary_function_arguments"]
            .into_iter()
            .map(RuleId::new)
            .collect()
    }

    fn write_file(dir: &Path, name: &str, contents: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn defaults_when_no_config_exists() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = load_config(dir.path(), &Overrides::default(), &known()).unwrap();
        assert_eq!(cfg, ToolConfig::default());
    }

    #[test]
    fn reads_hank_section_from_rebar_config() {
        let dir = tempfile::tempdir().unwrap();
        write_file(
            dir.path(),
            "rebar.config",
            r#"
{erl_opts, [debug_info]}.
{hank, [{ignore, ["src/gen/**",
                  {"src/api.erl", unused_macros},
                  {"src/api.erl", unused_macros, ['VERSION', {'DEBUG', 2}]}]},
        {rules, [unused_macros, unused_hrl_files]},
        {excludes, ["test/fixtures/**"]},
        {config_skips, ["dev.config"]},
        {format, json}]}.
"#,
        );
        let cfg = load_config(dir.path(), &Overrides::default(), &known()).unwrap();
        assert_eq!(cfg.ignore.len(), 4);
        assert_eq!(cfg.ignore[0].file_scope, "src/gen/**");
        assert_eq!(cfg.ignore[0].rule, None);
        assert_eq!(cfg.ignore[1].rule, Some(RuleId::new("unused_macros")));
        assert_eq!(cfg.ignore[1].detail, None);
        assert_eq!(cfg.ignore[2].detail, Some(TermValue::Atom("VERSION".into())));
        assert!(matches!(cfg.ignore[3].detail, Some(TermValue::Tuple(_))));
        assert_eq!(
            cfg.rules,
            Some(vec![RuleId::new("unused_macros"), RuleId::new("unused_hrl_files")])
        );
        assert_eq!(cfg.excludes, vec!["test/fixtures/**"]);
        assert_eq!(cfg.config_skips, vec!["dev.config"]);
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn falls_back_to_hank_config() {
        let dir = tempfile::tempdir().unwrap();
        // rebar.config exists but has no hank section.
        write_file(dir.path(), "rebar.config", "{erl_opts, []}.\n");
        write_file(dir.path(), "hank.config", "{hank, [{format, json}]}.\n");
        let cfg = load_config(dir.path(), &Overrides::default(), &known()).unwrap();
        assert_eq!(cfg.format, OutputFormat::Json);
    }

    #[test]
    fn explicit_config_file_wins_and_must_exist() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "rebar.config", "{hank, [{format, json}]}.\n");
        let custom = write_file(dir.path(), "custom.config", "{hank, [{format, text}]}.\n");

        let overrides = Overrides { config_file: Some(custom), ..Default::default() };
        let cfg = load_config(dir.path(), &overrides, &known()).unwrap();
        assert_eq!(cfg.format, OutputFormat::Text);

        let overrides = Overrides {
            config_file: Some(dir.path().join("missing.config")),
            ..Default::default()
        };
        let err = load_config(dir.path(), &overrides, &known()).unwrap_err();
        assert!(err.to_string().contains("missing.config"));
    }

    #[test]
    fn unknown_option_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "rebar.config", "{hank, [{frobnicate, true}]}.\n");
        let err = load_config(dir.path(), &Overrides::default(), &known()).unwrap_err();
        assert!(err.to_string().contains("unknown hank option"));
    }

    #[test]
    fn unknown_rule_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "rebar.config", "{hank, [{rules, [no_such_rule]}]}.\n");
        let err = load_config(dir.path(), &Overrides::default(), &known()).unwrap_err();
        assert!(err.to_string().contains("unknown rule: no_such_rule"));

        let overrides = Overrides { rules: vec!["nope".into()], ..Default::default() };
        let dir2 = tempfile::tempdir().unwrap();
        let err = load_config(dir2.path(), &overrides, &known()).unwrap_err();
        assert!(err.to_string().contains("unknown rule: nope"));
    }

    #[test]
    fn malformed_entries_are_errors() {
        for section in [
            "{hank, [{ignore, [{bad, entry, shape, here}]}]}.",
            "{hank, [{ignore, notalist}]}.",
            "{hank, [{rules, [\"string\"]}]}.",
            "{hank, [{format, yaml}]}.",
            "{hank, [{excludes, [not_a_string]}]}.",
            "{hank, [not_a_pair]}.",
        ] {
            let dir = tempfile::tempdir().unwrap();
            write_file(dir.path(), "rebar.config", section);
            let result = load_config(dir.path(), &Overrides::default(), &known());
            assert!(result.is_err(), "accepted: {section}");
        }
    }

    #[test]
    fn parse_error_reports_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        write_file(dir.path(), "rebar.config", "{erl_opts, []}.\n{hank, [}.\n");
        let err = load_config(dir.path(), &Overrides::default(), &known()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("rebar.config:2"), "got: {msg}");
    }

    #[test]
    fn cli_overrides_replace_rules_and_extend_excludes() {
        let dir = tempfile::tempdir().unwrap();
        write_file(
            dir.path(),
            "rebar.config",
            "{hank, [{rules, [unused_macros]}, {excludes, [\"a/**\"]}, {format, json}]}.\n",
        );
        let overrides = Overrides {
            config_file: None,
            format: Some(OutputFormat::Text),
            rules: vec!["unused_hrl_files".into()],
            excludes: vec!["b/**".into()],
        };
        let cfg = load_config(dir.path(), &overrides, &known()).unwrap();
        assert_eq!(cfg.rules, Some(vec![RuleId::new("unused_hrl_files")]));
        assert_eq!(cfg.excludes, vec!["a/**".to_string(), "b/**".to_string()]);
        assert_eq!(cfg.format, OutputFormat::Text);
    }
}
