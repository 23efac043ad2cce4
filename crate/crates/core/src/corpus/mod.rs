//! Candidate examples: local directory ingestion, filtering and (in
//! [`remote`]) a cached code-search client.

pub mod remote;

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::lexer::TokenKind;
use crate::model::{parse, SourceUnit};
use crate::query::SearchQuery;

pub use remote::{fetch_remote, FetchOutcome, RemoteConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    LocalPath { path: PathBuf },
    Remote { repo: String, path: String, url: String },
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::LocalPath { path } => write!(f, "{}", path.display()),
            Origin::Remote { repo, path, .. } => write!(f, "{repo}/{path}"),
        }
    }
}

/// A candidate example. The parsed unit is computed on first use.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub origin: Origin,
    pub source_text: String,
    #[serde(skip)]
    unit: OnceLock<SourceUnit>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.origin == other.origin && self.source_text == other.source_text
    }
}

pub(crate) fn short_hash(data: &[u8]) -> String {
    let digest = Sha256::digest(data);
    hex::encode(&digest[..8])
}

impl Candidate {
    pub fn new(id: impl Into<String>, origin: Origin, source_text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            origin,
            source_text: source_text.into(),
            unit: OnceLock::new(),
        }
    }

    /// A local file; `rel` is the path below the corpus root.
    pub fn local(rel: &Path, source_text: impl Into<String>) -> Self {
        let rel_str = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let id = short_hash(format!("local:{rel_str}").as_bytes());
        Self::new(id, Origin::LocalPath { path: rel.to_path_buf() }, source_text)
    }

    pub fn remote(repo: &str, path: &str, url: &str, source_text: impl Into<String>) -> Self {
        let id = short_hash(format!("remote:{repo}:{path}").as_bytes());
        let origin = Origin::Remote {
            repo: repo.to_string(),
            path: path.to_string(),
            url: url.to_string(),
        };
        Self::new(id, origin, source_text)
    }

    pub fn unit(&self) -> &SourceUnit {
        self.unit.get_or_init(|| parse(&self.source_text))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusFilter {
    pub require_try_catch: bool,
    pub require_exception_mention: bool,
    pub max_sloc: usize,
    pub min_sloc: usize,
}

impl Default for CorpusFilter {
    fn default() -> Self {
        Self {
            require_try_catch: true,
            require_exception_mention: true,
            max_sloc: 300,
            min_sloc: 3,
        }
    }
}

impl CorpusFilter {
    /// Accepts everything with at least one token.
    pub fn permissive() -> Self {
        Self {
            require_try_catch: false,
            require_exception_mention: false,
            max_sloc: usize::MAX,
            min_sloc: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_sloc > self.max_sloc {
            return Err(Error::InvalidInput(format!(
                "min_sloc {} exceeds max_sloc {}",
                self.min_sloc, self.max_sloc
            )));
        }
        Ok(())
    }

    /// First failed predicate, or `None` when the candidate passes.
    /// The mention check is skipped when no exception is given.
    pub fn check(&self, candidate: &Candidate, exception: Option<&str>) -> Option<ExclusionReason> {
        let unit = candidate.unit();
        if unit.tokens.is_empty() {
            return Some(ExclusionReason::NoTokens);
        }
        let has_kw = |kw: &str| unit.tokens.iter().any(|t| t.is(TokenKind::Keyword, kw));
        if self.require_try_catch && !(has_kw("try") && has_kw("catch")) {
            return Some(ExclusionReason::NoHandler);
        }
        if let (true, Some(exc)) = (self.require_exception_mention, exception) {
            if !unit.tokens.iter().any(|t| t.is(TokenKind::Identifier, exc)) {
                return Some(ExclusionReason::NoExceptionMention);
            }
        }
        if unit.sloc < self.min_sloc {
            return Some(ExclusionReason::TooShort);
        }
        if unit.sloc > self.max_sloc {
            return Some(ExclusionReason::TooLong);
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    NoTokens,
    NoHandler,
    NoExceptionMention,
    TooShort,
    TooLong,
}

impl ExclusionReason {
    pub fn code(&self) -> &'static str {
        match self {
            ExclusionReason::NoTokens => "no_tokens",
            ExclusionReason::NoHandler => "no_handler",
            ExclusionReason::NoExceptionMention => "no_exception_mention",
            ExclusionReason::TooShort => "too_short",
            ExclusionReason::TooLong => "too_long",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub id: String,
    pub origin: Origin,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub kept: Vec<Candidate>,
    pub excluded: Vec<Exclusion>,
}

/// Order-preserving filter that records why each candidate was dropped.
pub fn apply_filter(candidates: Vec<Candidate>, filter: &CorpusFilter, exception: Option<&str>) -> FilterOutcome {
    let mut out = FilterOutcome::default();
    for c in candidates {
        match filter.check(&c, exception) {
            None => out.kept.push(c),
            Some(reason) => {
                log::debug!("excluding {} ({}): {}", c.id, c.origin, reason.code());
                out.excluded.push(Exclusion {
                    id: c.id.clone(),
                    origin: c.origin.clone(),
                    reason,
                });
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct LocalCorpus {
    /// Sorted by id.
    pub candidates: Vec<Candidate>,
    /// Files that could not be read, with the reason.
    pub unreadable: Vec<(PathBuf, String)>,
}

/// Load every `.java` file below `dir`, unfiltered, sorted by id.
pub fn load_local(dir: &Path) -> Result<LocalCorpus> {
    let meta = std::fs::metadata(dir).map_err(|e| Error::io(dir, e))?;
    if !meta.is_dir() {
        return Err(Error::InvalidInput(format!("{} is not a directory", dir.display())));
    }
    let mut corpus = LocalCorpus::default();
    for entry in WalkDir::new(dir).follow_links(true) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| dir.to_path_buf());
                log::warn!("skipping {}: {e}", path.display());
                corpus.unreadable.push((path, e.to_string()));
                continue;
            }
        };
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|x| x != "java") {
            continue;
        }
        match std::fs::read_to_string(path) {
            Ok(text) => {
                let rel = path.strip_prefix(dir).unwrap_or(path);
                corpus.candidates.push(Candidate::local(rel, text));
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                corpus.unreadable.push((path.to_path_buf(), e.to_string()));
            }
        }
    }
    corpus.candidates.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(corpus)
}

/// Load and filter a local corpus for `query`.
pub fn ingest_local(dir: &Path, query: &SearchQuery, filter: &CorpusFilter) -> Result<Vec<Candidate>> {
    filter.validate()?;
    let corpus = load_local(dir)?;
    Ok(apply_filter(corpus.candidates, filter, Some(&query.exception_name)).kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "try {\n  in.read();\n} catch (IOException e) {\n  log(e);\n}\n";

    fn cand(text: &str) -> Candidate {
        Candidate::local(Path::new("x.java"), text)
    }

    #[test]
    fn ids_are_stable_and_distinct() {
        let a = Candidate::local(Path::new("a/b.java"), "x");
        let b = Candidate::local(Path::new("a/b.java"), "y");
        let c = Candidate::local(Path::new("a/c.java"), "x");
        assert_eq!(a.id, b.id);
        assert_ne!(a.id, c.id);
        assert_eq!(a.id.len(), 16);
        assert_ne!(Candidate::remote("o/r", "a/b.java", "", "").id, a.id);
    }

    #[test]
    fn filter_rules() {
        let f = CorpusFilter::default();
        assert_eq!(f.check(&cand(GOOD), Some("IOException")), None);
        assert_eq!(
            f.check(&cand("a();\nb();\nc();\n"), Some("IOException")),
            Some(ExclusionReason::NoHandler)
        );
        assert_eq!(
            f.check(&cand(GOOD), Some("SQLException")),
            Some(ExclusionReason::NoExceptionMention)
        );
        assert_eq!(f.check(&cand(GOOD), None), None);
        let long = format!("{GOOD}{}", "x();\n".repeat(400));
        assert_eq!(f.check(&cand(&long), Some("IOException")), Some(ExclusionReason::TooLong));
        let short = "try { a(); } catch (IOException e) { }";
        assert_eq!(f.check(&cand(short), Some("IOException")), Some(ExclusionReason::TooShort));
        assert_eq!(f.check(&cand(""), None), Some(ExclusionReason::NoTokens));
    }

    #[test]
    fn apply_filter_keeps_order_and_reasons() {
        let cs = vec![
            Candidate::local(Path::new("1.java"), GOOD),
            Candidate::local(Path::new("2.java"), "a();\nb();\nc();\n"),
            Candidate::local(Path::new("3.java"), GOOD),
        ];
        let out = apply_filter(cs, &CorpusFilter::default(), Some("IOException"));
        let kept: Vec<_> = out.kept.iter().map(|c| c.origin.to_string()).collect();
        assert_eq!(kept, ["1.java", "3.java"]);
        assert_eq!(out.excluded[0].reason, ExclusionReason::NoHandler);
    }

    #[test]
    fn bad_bounds_rejected() {
        let f = CorpusFilter {
            min_sloc: 10,
            max_sloc: 5,
            ..CorpusFilter::default()
        };
        assert!(f.validate().is_err());
    }

    #[test]
    fn local_ingestion() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("sub")).unwrap();
        std::fs::write(dir.path().join("sub/A.java"), GOOD).unwrap();
        std::fs::write(dir.path().join("B.java"), "a();\nb();\nc();\n").unwrap();
        std::fs::write(dir.path().join("notes.txt"), GOOD).unwrap();
        let q = SearchQuery::new("IOException", "URL");
        let got = ingest_local(dir.path(), &q, &CorpusFilter::default()).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].origin, Origin::LocalPath { path: PathBuf::from("sub/A.java") });
        let again = ingest_local(dir.path(), &q, &CorpusFilter::default()).unwrap();
        assert_eq!(got, again);

        let empty = tempfile::tempdir().unwrap();
        assert!(ingest_local(empty.path(), &q, &CorpusFilter::default()).unwrap().is_empty());
        assert!(load_local(&dir.path().join("missing")).is_err());
    }

    #[test]
    fn lazy_unit_is_cached() {
        let c = cand(GOOD);
        assert!(std::ptr::eq(c.unit(), c.unit()));
    }
}
