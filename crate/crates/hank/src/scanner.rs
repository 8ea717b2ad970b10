//! Walks a project tree, reads the files worth analyzing, and builds the
//! shared context every rule works from.
//!
//! Files are parsed in parallel — parsing is embarrassingly parallel and
//! dominates runtime — but the resulting context is deterministic: entries
//! are ordered by path regardless of worker count.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use crate::behaviors::{self, CallbackSet};
use crate::glob::glob_match;
use crate::lexer::tokenize;
use crate::syntax::{parse_source, query_nodes, NodeKind, NodePayload, SynNode};
use crate::term::{read_terms, TermValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    /// `*.erl`
    ErlModule,
    /// `*.hrl`
    HrlHeader,
    /// `*.app.src`
    AppSrc,
    /// `*.config`
    ConfigTerm,
}

/// What we were able to make of a file. A failed parse is recorded, never
/// fatal: the rules simply see less, which can only suppress warnings.
#[derive(Debug, Clone, PartialEq)]
pub enum FileParse {
    Forms(Vec<SynNode>),
    Terms(Vec<TermValue>),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FileEntry {
    /// Root-relative, `/`-separated.
    pub path: String,
    pub kind: FileKind,
    pub parse: FileParse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectContext {
    pub root: PathBuf,
    /// Sorted by path.
    pub files: Vec<FileEntry>,
    /// Names of the applications this project defines (from `.app.src`
    /// files and the names they declare).
    pub app_names: BTreeSet<String>,
    /// Built-in behaviour callbacks plus `-callback` attributes found in
    /// project modules.
    pub behavior_callbacks: BTreeMap<String, CallbackSet>,
    /// `(path, reason)` for every file we could not read or parse, plus
    /// directory walk errors. Informational; analysis continues without.
    pub parse_failures: Vec<(String, String)>,
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct DiscoveredFiles {
    /// Root-relative analyzable paths, sorted.
    pub paths: Vec<String>,
    /// Walk errors for subtrees that could not be visited.
    pub failures: Vec<(String, String)>,
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("cannot scan {path}: {source}")]
    Root { path: PathBuf, source: io::Error },
}

/// Directories never worth descending into, besides hidden ones.
const SKIP_DIRS: &[&str] = &["_build", "deps", "node_modules"];

fn skip_dir(name: &str) -> bool {
    name.starts_with('.') || SKIP_DIRS.contains(&name)
}

/// Classifies a path by file name. `None` means "not analyzed".
pub fn classify(path: &str) -> Option<FileKind> {
    let name = path.rsplit('/').next().unwrap_or(path);
    if name.ends_with(".app.src") {
        Some(FileKind::AppSrc)
    } else if name.ends_with(".erl") {
        Some(FileKind::ErlModule)
    } else if name.ends_with(".hrl") {
        Some(FileKind::HrlHeader)
    } else if name.ends_with(".config") {
        Some(FileKind::ConfigTerm)
    } else {
        None
    }
}

/// Module name implied by an `.erl` path.
pub fn module_name(path: &str) -> &str {
    let name = path.rsplit('/').next().unwrap_or(path);
    name.strip_suffix(".erl").unwrap_or(name)
}

/// Finds every analyzable file under `root`, skipping `_build`, `deps`,
/// `node_modules`, hidden directories, and anything matching an exclude
/// glob. Symbolic links are not followed.
pub fn discover(root: &Path, excludes: &[String]) -> Result<DiscoveredFiles, ScanError> {
    let meta = fs::metadata(root)
        .map_err(|source| ScanError::Root { path: root.to_path_buf(), source })?;
    if !meta.is_dir() {
        return Err(ScanError::Root {
            path: root.to_path_buf(),
            source: io::Error::new(io::ErrorKind::NotADirectory, "not a directory"),
        });
    }

    let mut discovered = DiscoveredFiles::default();
    let walker = WalkDir::new(root).follow_links(false).into_iter().filter_entry(|e| {
        e.depth() == 0
            || !(e.file_type().is_dir()
                && skip_dir(&e.file_name().to_string_lossy()))
    });
    for entry in walker {
        let entry = match entry {
            Ok(entry) => entry,
            Err(err) => {
                let path = err
                    .path()
                    .map(|p| p.to_string_lossy().into_owned())
                    .unwrap_or_else(|| root.to_string_lossy().into_owned());
                discovered.failures.push((path, err.to_string()));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .to_string_lossy()
            .replace('\\', "/");
        if classify(&rel).is_none() {
            continue;
        }
        if excludes.iter().any(|pat| glob_match(pat, &rel)) {
            continue;
        }
        discovered.paths.push(rel);
    }
    discovered.paths.sort();
    discovered.failures.sort();
    Ok(discovered)
}

/// Reads and parses the discovered files with `jobs` workers (0 = one per
/// core) and assembles the project context.
pub fn build_context(root: &Path, discovered: &DiscoveredFiles, jobs: usize) -> ProjectContext {
    let parse_path = |rel: &String| -> FileEntry {
        let kind = classify(rel).expect("discovered paths are classifiable");
        match fs::read(root.join(rel)) {
            Ok(bytes) => {
                let text = String::from_utf8_lossy(&bytes);
                FileEntry { path: rel.clone(), kind, parse: parse_text(kind, &text) }
            }
            Err(err) => FileEntry {
                path: rel.clone(),
                kind,
                parse: FileParse::Failed(format!("read error: {err}")),
            },
        }
    };

    let entries: Vec<FileEntry> = if jobs == 1 {
        discovered.paths.iter().map(parse_path).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool");
        pool.install(|| discovered.paths.par_iter().map(parse_path).collect())
    };

    assemble(root.to_path_buf(), entries, discovered.failures.clone())
}

impl ProjectContext {
    /// Builds a context from in-memory `(path, source)` pairs: the exact
    /// pipeline of [`build_context`] minus the filesystem. Paths that would
    /// not be discovered on disk are ignored.
    pub fn from_sources<P, S>(sources: impl IntoIterator<Item = (P, S)>) -> ProjectContext
    where
        P: Into<String>,
        S: AsRef<str>,
    {
        let mut entries: Vec<FileEntry> = sources
            .into_iter()
            .filter_map(|(path, text)| {
                let path = path.into();
                let kind = classify(&path)?;
                Some(FileEntry { path, kind, parse: parse_text(kind, text.as_ref()) })
            })
            .collect();
        entries.sort_by(|a, b| a.path.cmp(&b.path));
        assemble(PathBuf::from("."), entries, Vec::new())
    }

    /// Files that parsed to forms, i.e. `.erl` and `.hrl` sources.
    pub fn form_files(&self) -> impl Iterator<Item = (&FileEntry, &[SynNode])> {
        self.files.iter().filter_map(|f| match &f.parse {
            FileParse::Forms(forms) => Some((f, forms.as_slice())),
            _ => None,
        })
    }

    /// Files of `kind` that parsed to terms.
    pub fn term_files(&self, kind: FileKind) -> impl Iterator<Item = (&FileEntry, &[TermValue])> {
        self.files.iter().filter(move |f| f.kind == kind).filter_map(|f| match &f.parse {
            FileParse::Terms(terms) => Some((f, terms.as_slice())),
            _ => None,
        })
    }

    pub fn expected_callbacks(&self, behavior: &str) -> Option<&CallbackSet> {
        self.behavior_callbacks.get(behavior)
    }
}

fn parse_text(kind: FileKind, text: &str) -> FileParse {
    match kind {
        FileKind::ErlModule | FileKind::HrlHeader => match tokenize(text) {
            Ok(tokens) => FileParse::Forms(parse_source(&tokens)),
            Err(err) => FileParse::Failed(err.to_string()),
        },
        FileKind::AppSrc | FileKind::ConfigTerm => match read_terms(text) {
            Ok(terms) => FileParse::Terms(terms),
            Err(err) => FileParse::Failed(err.to_string()),
        },
    }
}

fn assemble(
    root: PathBuf,
    entries: Vec<FileEntry>,
    walk_failures: Vec<(String, String)>,
) -> ProjectContext {
    let mut app_names = BTreeSet::new();
    let mut behavior_callbacks = behaviors::builtin().clone();
    let mut parse_failures = walk_failures;

    for entry in &entries {
        match (&entry.kind, &entry.parse) {
            (FileKind::AppSrc, parse) => {
                let base = entry.path.rsplit('/').next().unwrap_or(&entry.path);
                if let Some(name) = base.strip_suffix(".app.src") {
                    app_names.insert(name.to_string());
                }
                if let FileParse::Terms(terms) = parse {
                    for term in terms {
                        if let Some(name) = declared_app_name(term) {
                            app_names.insert(name.to_string());
                        }
                    }
                }
            }
            (FileKind::ErlModule, FileParse::Forms(forms)) => {
                let callbacks = collect_callbacks(forms);
                if !callbacks.is_empty() {
                    behavior_callbacks
                        .entry(module_name(&entry.path).to_string())
                        .or_default()
                        .merge(&callbacks);
                }
            }
            _ => {}
        }
        if let FileParse::Failed(reason) = &entry.parse {
            parse_failures.push((entry.path.clone(), reason.clone()));
        }
    }

    ProjectContext { root, files: entries, app_names, behavior_callbacks, parse_failures }
}

fn declared_app_name(term: &TermValue) -> Option<&str> {
    let parts = term.as_tuple()?;
    match (parts.first()?.as_atom()?, parts.get(1)?.as_atom()) {
        ("application", Some(name)) => Some(name),
        _ => None,
    }
}

fn collect_callbacks(forms: &[SynNode]) -> CallbackSet {
    let mut set = CallbackSet::default();
    for node in query_nodes(forms, NodeKind::CallbackAttr) {
        if let NodePayload::CallbackAttr { name, arity } = &node.payload {
            set.insert(name.clone(), *arity);
        }
    }
    set
}
