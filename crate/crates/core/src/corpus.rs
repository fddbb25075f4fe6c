//! Corpus loading, the filter cascade, and invocation classification.
//!
//! The cascade applies, in order: random sampling, a maximum-size cut, a
//! multiple-files-per-repository requirement, and an at-least-one-internal-
//! call requirement. A call is internal when its name is declared in a
//! *different* file of the same repository; declarations and invocations in
//! the same file never match each other. Call names that collide with the
//! language's builtin callables are dropped from the analysis entirely.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::AlignedToken;
use crate::loss::InvocationClass;
use crate::span::Span;
use crate::syntax;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}:{line}: {detail}")]
    MalformedLine {
        path: String,
        line: usize,
        detail: String,
    },
    #[error("duplicate corpus entry for {repo_name}/{path}")]
    DuplicateFile { repo_name: String, path: String },
    #[error("sample fraction {0} is outside (0, 1]")]
    InvalidSampleFraction(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One source file of a corpus. `(repo_name, path)` is unique.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFile {
    pub repo_name: String,
    pub path: String,
    pub content: String,
    pub license: String,
}

impl CorpusFile {
    pub fn content_bytes(&self) -> &[u8] {
        self.content.as_bytes()
    }

    /// Stable identifier used in loss records and stream files.
    pub fn doc_id(&self) -> String {
        format!("{}::{}", self.repo_name, self.path)
    }
}

/// Read a JSON Lines corpus; every record needs all four fields.
pub fn load_corpus(path: &Path) -> Result<Vec<CorpusFile>, CorpusError> {
    let file = std::fs::File::open(path)?;
    let display = path.display().to_string();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: CorpusFile =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedLine {
                path: display.clone(),
                line: lineno + 1,
                detail: e.to_string(),
            })?;
        if !seen.insert((record.repo_name.clone(), record.path.clone())) {
            return Err(CorpusError::DuplicateFile {
                repo_name: record.repo_name,
                path: record.path,
            });
        }
        out.push(record);
    }
    Ok(out)
}

pub fn write_corpus(path: &Path, files: &[CorpusFile]) -> Result<(), CorpusError> {
    let mut out = std::fs::File::create(path)?;
    for file in files {
        let line = serde_json::to_string(file).expect("corpus file serializes");
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// The builtin callable names filtered out of invocation analysis.
#[derive(Debug, Clone, Default)]
pub struct BuiltinSet {
    names: HashSet<String>,
}

/// Python 3 builtin callables plus the standard exception names; one name
/// per line, `#` comments allowed.
pub const DEFAULT_BUILTINS: &str = include_str!("../data/builtins.txt");

impl BuiltinSet {
    pub fn from_text(text: &str) -> Self {
        let names = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        BuiltinSet { names }
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn default_set() -> Self {
        Self::from_text(DEFAULT_BUILTINS)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Cascade configuration; stages run in a fixed order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterConfig {
    pub sample_fraction: f64,
    pub seed: u64,
    /// Maximum content size in bytes; `None` disables the stage.
    pub max_chars: Option<usize>,
    pub require_multi_file: bool,
    pub require_internal_call: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            sample_fraction: 1.0,
            seed: 0,
            max_chars: Some(4096),
            require_multi_file: true,
            require_internal_call: true,
        }
    }
}

/// Surviving-file counts per stage; counts never increase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterTrace {
    pub stages: Vec<FilterStage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStage {
    pub name: String,
    pub surviving: u64,
}

impl FilterTrace {
    fn push(&mut self, name: &str, surviving: usize) {
        self.stages.push(FilterStage {
            name: name.to_string(),
            surviving: surviving as u64,
        });
    }

    pub fn is_monotone(&self) -> bool {
        self.stages.windows(2).all(|w| w[0].surviving >= w[1].surviving)
    }
}

/// One call site with its resolved class. Builtin-named sites are kept here
/// with class `None` so token tagging can mask them; reports skip them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifiedInvocation {
    pub name: String,
    pub call_span: Span,
    pub name_span: Span,
    pub args_span: Span,
    pub class: InvocationClass,
}

/// Classification of every file of one repository, keyed by file path.
pub type RepoClassification = BTreeMap<String, Vec<ClassifiedInvocation>>;

/// FNV-1a over `repo_name`, `path`, and the seed. Stable across runs and
/// platforms, unlike the standard library hasher.
pub fn stable_hash64(repo_name: &str, path: &str, seed: u64) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut hash = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(PRIME);
        }
    };
    eat(repo_name.as_bytes());
    eat(&[0x1f]);
    eat(path.as_bytes());
    eat(&[0x1f]);
    eat(&seed.to_le_bytes());
    hash
}

/// Classify every named call site in a repository: internal when declared in
/// another file of the same repository, `None` when the name is a builtin,
/// external otherwise.
pub fn classify_invocations(
    repo_files: &[&CorpusFile],
    builtins: &BuiltinSet,
) -> RepoClassification {
    let parsed: Vec<(&CorpusFile, Vec<syntax::Invocation>, std::collections::BTreeSet<String>)> =
        repo_files
            .iter()
            .map(|file| {
                let doc = file.content_bytes();
                let root = syntax::parse(doc);
                let decls = syntax::extract_declarations(&root, doc);
                let calls = syntax::extract_invocations(&root, doc);
                (*file, calls, decls)
            })
            .collect();
    let mut out = RepoClassification::new();
    for (file, calls, _) in &parsed {
        let foreign_decls: HashSet<&str> = parsed
            .iter()
            .filter(|(other, _, _)| other.path != file.path)
            .flat_map(|(_, _, decls)| decls.iter().map(String::as_str))
            .collect();
        let classified = calls
            .iter()
            .map(|call| {
                let class = if builtins.contains(&call.name) {
                    InvocationClass::None
                } else if foreign_decls.contains(call.name.as_str()) {
                    InvocationClass::Internal
                } else {
                    InvocationClass::External
                };
                ClassifiedInvocation {
                    name: call.name.clone(),
                    call_span: call.call_span,
                    name_span: call.name_span,
                    args_span: call.args_span,
                    class,
                }
            })
            .collect();
        out.insert(file.path.clone(), classified);
    }
    out
}

/// Cascade output: survivors, the trace, and per-repo classifications for
/// the surviving files (computed against the pre-internal-call file set, the
/// same classification the final stage filtered on).
#[derive(Debug)]
pub struct CascadeOutput {
    pub files: Vec<CorpusFile>,
    pub trace: FilterTrace,
    /// `repo_name -> path -> call sites`, surviving files only.
    pub classifications: BTreeMap<String, RepoClassification>,
}

pub fn filter_cascade(
    corpus: Vec<CorpusFile>,
    config: &FilterConfig,
    builtins: &BuiltinSet,
) -> Result<CascadeOutput, CorpusError> {
    if !(config.sample_fraction > 0.0 && config.sample_fraction <= 1.0) {
        return Err(CorpusError::InvalidSampleFraction(config.sample_fraction));
    }
    let mut trace = FilterTrace { stages: Vec::new() };
    trace.push("initial", corpus.len());

    // Hash-based sampling: order-independent and reproducible per seed.
    let threshold = (config.sample_fraction * (u64::MAX as f64)) as u64;
    let mut files: Vec<CorpusFile> = corpus
        .into_iter()
        .filter(|f| {
            config.sample_fraction >= 1.0
                || stable_hash64(&f.repo_name, &f.path, config.seed) < threshold
        })
        .collect();
    trace.push("sample", files.len());

    if let Some(max) = config.max_chars {
        files.retain(|f| f.content_bytes().len() <= max);
    }
    trace.push("max_chars", files.len());

    if config.require_multi_file {
        let mut per_repo: BTreeMap<&str, usize> = BTreeMap::new();
        for f in &files {
            *per_repo.entry(f.repo_name.as_str()).or_insert(0) += 1;
        }
        let multi: HashSet<String> = per_repo
            .into_iter()
            .filter(|(_, n)| *n >= 2)
            .map(|(repo, _)| repo.to_string())
            .collect();
        files.retain(|f| multi.contains(&f.repo_name));
    }
    trace.push("multi_file", files.len());

    // Classify on the current survivor set, then optionally require at
    // least one internal call per file.
    let mut repos: BTreeMap<String, Vec<&CorpusFile>> = BTreeMap::new();
    for f in &files {
        repos.entry(f.repo_name.clone()).or_default().push(f);
    }
    let mut classifications: BTreeMap<String, RepoClassification> = BTreeMap::new();
    for (repo, repo_files) in &repos {
        classifications.insert(repo.clone(), classify_invocations(repo_files, builtins));
    }
    if config.require_internal_call {
        files.retain(|f| {
            classifications
                .get(&f.repo_name)
                .and_then(|repo| repo.get(&f.path))
                .is_some_and(|calls| {
                    calls.iter().any(|c| c.class == InvocationClass::Internal)
                })
        });
    }
    trace.push("internal_call", files.len());

    // Trim classifications down to the surviving files.
    let survivors: HashSet<(String, String)> = files
        .iter()
        .map(|f| (f.repo_name.clone(), f.path.clone()))
        .collect();
    for (repo, repo_class) in classifications.iter_mut() {
        repo_class.retain(|path, _| survivors.contains(&(repo.clone(), path.clone())));
    }
    classifications.retain(|_, repo_class| !repo_class.is_empty());

    Ok(CascadeOutput {
        files,
        trace,
        classifications,
    })
}

/// Invocation class per aligned token, parallel to `aligned`.
///
/// A token is classified when its tag's parent is `call` or `argument_list`
/// and its leaf lies inside a call site's span; the innermost such call wins,
/// so arguments of a nested call belong to the inner call, and tokens of a
/// builtin (dropped) call stay `None`.
pub fn tag_invocation_tokens(
    aligned: &[AlignedToken],
    sites: &[ClassifiedInvocation],
) -> Vec<InvocationClass> {
    aligned
        .iter()
        .map(|token| {
            let Some(tag) = token.tag.as_node() else {
                return InvocationClass::None;
            };
            if tag.parent_type != "call" && tag.parent_type != "argument_list" {
                return InvocationClass::None;
            }
            let Some(leaf) = token.leaf_span else {
                return InvocationClass::None;
            };
            sites
                .iter()
                .filter(|site| site.call_span.contains(&leaf))
                .min_by_key(|site| site.call_span.len())
                .map(|site| site.class)
                .unwrap_or(InvocationClass::None)
        })
        .collect()
}
