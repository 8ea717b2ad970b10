//! Command-line entry point.
//!
//! Exit codes: 0 when the project is clean, 1 when warnings were emitted,
//! 2 when the run itself failed (bad arguments, unreadable root, broken
//! configuration, a crashed rule). Warnings go to stdout; diagnostics go
//! to stderr.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::config::{load_config, ConfigError, Overrides, ToolConfig};
use crate::engine::{self, EngineError, Rule, RuleId};
use crate::render::{render, OutputFormat};
use crate::rules::{default_rule_ids, default_rules};
use crate::scanner::{build_context, discover, ScanError};

/// Finds oxbow code in Erlang projects: macros, record fields, header
/// files, configuration options, and function arguments that once earned
/// their keep and no longer do.
#[derive(Debug, Parser)]
#[command(name = "hank", version, about)]
pub struct Cli {
    /// Project root to analyze.
    #[arg(default_value = ".")]
    root: PathBuf,

    /// Output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Run only this rule (repeatable).
    #[arg(long = "rule", value_name = "NAME")]
    rules: Vec<String>,

    /// Skip files matching this glob, relative to the root (repeatable).
    #[arg(long = "exclude", value_name = "GLOB")]
    excludes: Vec<String>,

    /// Parser worker count; 0 means one per core, 1 disables parallelism.
    #[arg(long, value_name = "N", default_value_t = 0)]
    jobs: usize,

    /// Read configuration from this file instead of the project's
    /// rebar.config / hank.config.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// List the available rules and exit.
    #[arg(long)]
    list_rules: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Error)]
enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Parses arguments and runs. Returns the process exit code; clap handles
/// `--help`/`--version` (exit 0) and usage errors (exit 2) on its own.
pub fn main_impl() -> i32 {
    let cli = Cli::parse();
    if cli.list_rules {
        for id in default_rule_ids() {
            println!("{id}");
        }
        return 0;
    }
    match run(&cli) {
        Ok(0) => 0,
        Ok(_) => 1,
        Err(err) => {
            eprintln!("hank: {err}");
            2
        }
    }
}

/// Runs the analysis and prints the report; returns the warning count.
fn run(cli: &Cli) -> Result<usize, AppError> {
    let known: BTreeSet<RuleId> = default_rule_ids().into_iter().collect();
    let overrides = Overrides {
        config_file: cli.config.clone(),
        format: cli.format.map(OutputFormat::from),
        rules: cli.rules.clone(),
        excludes: cli.excludes.clone(),
    };
    let cfg = load_config(&cli.root, &overrides, &known)?;
    let rules = selected_rules(&cfg);

    let discovered = discover(&cli.root, &cfg.excludes)?;
    for (path, reason) in &discovered.failures {
        eprintln!("hank: warning: {path}: {reason}");
    }
    let ctx = build_context(&cli.root, &discovered, cli.jobs);
    for (path, reason) in &ctx.parse_failures {
        eprintln!("hank: warning: {path}: skipped: {reason}");
    }

    let ignores = engine::gather_ignores(&ctx, &cfg.ignore, &known)?;
    let results = engine::run(&ctx, &rules, &ignores)?;
    print!("{}", render(&results, cfg.format));
    Ok(results.len())
}

/// The default rules, narrowed to the configured selection (if any). The
/// canonical ordering is kept regardless of how the selection was written.
fn selected_rules(cfg: &ToolConfig) -> Vec<Box<dyn Rule>> {
    let all = default_rules(&cfg.config_skips);
    match &cfg.rules {
        None => all,
        Some(ids) => all.into_iter().filter(|rule| ids.contains(&rule.id())).collect(),
    }
}
