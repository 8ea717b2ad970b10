//! hank — a static analyzer that finds *oxbow code* in Erlang projects:
//! elements that were needed once, are referenced by nothing today, and sit
//! in the codebase like the abandoned meanders of a river.
//!
//! Five rules ship by default: unused macros, unused record fields, header
//! files nothing includes, configuration options no code reads, and
//! function arguments no clause looks at. Every rule is engineered for
//! certainty over completeness — when the analysis cannot prove an element
//! unused (macro-hidden syntax, unknown behaviours, unresolvable paths), it
//! stays quiet. A warning is a promise that the cleanup is safe.
//!
//! The pipeline: [`lexer`] turns source into a lossless token stream,
//! [`form`] splits it into dot-terminated forms, [`syntax`] builds a
//! tolerant tree per form (no preprocessing, no expansion), [`scanner`]
//! walks a project directory and assembles the shared [`scanner::ProjectContext`],
//! and [`engine`] runs the [`rules`] over it, applying ignore specs from
//! [`config`] and in-source `-hank` attributes before [`render`] prints
//! the report.

pub mod behaviors;
pub mod cli;
pub mod config;
pub mod engine;
pub mod form;
pub mod glob;
pub mod lexer;
pub mod render;
pub mod rules;
pub mod scanner;
pub mod syntax;
pub mod term;

pub use config::{IgnoreSpec, ToolConfig};
pub use engine::{IgnorePattern, Rule, RuleId, RuleResult};
pub use render::OutputFormat;
pub use scanner::{build_context, discover, ProjectContext};
