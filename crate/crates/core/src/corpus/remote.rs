//! Code-search client with an on-disk cache.
//!
//! Searches run once per organization with the qualifier string
//! `<exception> <class> language:java org:<org>`. Matching files are
//! downloaded with a bounded number of requests in flight. A fetch that
//! completes without rate limiting is written to the cache; the cache layout
//! is described in `docs/corpus.md`.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{short_hash, Candidate, Origin};
use crate::error::{Error, Result};
use crate::lexer::TokenKind;
use crate::query::SearchQuery;

pub const TOKEN_ENV: &str = "GITHUB_TOKEN";
pub const DEFAULT_API: &str = "https://api.github.com";
pub const DEFAULT_LIMIT: usize = 70;
pub const DEFAULT_ORGS: &[&str] = &["apache", "eclipse", "facebook", "twitter"];

const PER_PAGE_MAX: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
    /// Seconds from a `Retry-After` header.
    pub retry_after: Option<u64>,
}

/// Blocking HTTP GET. Implementations must be shareable across threads.
pub trait Transport: Sync {
    fn get(&self, url: &str, token: &str, accept: &str) -> Result<HttpResponse>;
}

pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new() -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(concat!("exrec/", env!("CARGO_PKG_VERSION")))
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| Error::NetworkFailure(e.to_string()))?;
        Ok(Self { client })
    }
}

impl Transport for ReqwestTransport {
    fn get(&self, url: &str, token: &str, accept: &str) -> Result<HttpResponse> {
        let resp = self
            .client
            .get(url)
            .bearer_auth(token)
            .header("Accept", accept)
            .header("X-GitHub-Api-Version", "2022-11-28")
            .send()
            .map_err(|e| Error::NetworkFailure(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse().ok());
        let body = resp
            .bytes()
            .map_err(|e| Error::NetworkFailure(e.to_string()))?
            .to_vec();
        Ok(HttpResponse {
            status,
            body,
            retry_after,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub api_base: String,
    pub token: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub language: String,
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
    pub concurrency: usize,
}

impl Default for RemoteConfig {
    fn default() -> Self {
        Self {
            api_base: DEFAULT_API.to_string(),
            token: None,
            cache_dir: None,
            language: "java".to_string(),
            max_attempts: 5,
            base_delay: Duration::from_secs(1),
            max_delay: Duration::from_secs(60),
            concurrency: 4,
        }
    }
}

impl RemoteConfig {
    /// Defaults with the token taken from the environment.
    pub fn from_env() -> Self {
        Self {
            token: std::env::var(TOKEN_ENV).ok().filter(|t| !t.trim().is_empty()),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FetchOutcome {
    pub candidates: Vec<Candidate>,
    pub diagnostics: Vec<String>,
    /// False when rate limiting cut the fetch short.
    pub complete: bool,
    pub from_cache: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub repo: String,
    pub path: String,
    pub url: String,
    /// SHA-256 of the file content; the file lives at `objects/<object>.java`.
    pub object: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub query: String,
    pub orgs: Vec<String>,
    pub limit: usize,
    pub entries: Vec<ManifestEntry>,
}

pub fn cache_key(query: &SearchQuery, orgs: &[String], limit: usize) -> String {
    short_hash(format!("{}\0{}\0{limit}", query.rendered, orgs.join(",")).as_bytes())
}

pub fn manifest_path(cache_dir: &Path, key: &str) -> PathBuf {
    cache_dir.join("manifests").join(format!("{key}.json"))
}

pub fn search_qualifier(query: &SearchQuery, language: &str, org: &str) -> String {
    format!("{} language:{language} org:{org}", query.rendered)
}

#[derive(Debug, Deserialize)]
struct SearchPage {
    #[serde(default)]
    items: Vec<SearchItem>,
}

#[derive(Debug, Deserialize)]
struct SearchItem {
    path: String,
    url: String,
    #[serde(default)]
    html_url: String,
    repository: Repository,
}

#[derive(Debug, Deserialize)]
struct Repository {
    full_name: String,
}

enum Fetched {
    Ok(Vec<u8>),
    RateLimited,
}

fn get_with_backoff(
    transport: &dyn Transport,
    cfg: &RemoteConfig,
    url: &str,
    token: &str,
    accept: &str,
) -> Result<Fetched> {
    let mut delay = cfg.base_delay;
    for attempt in 1..=cfg.max_attempts.max(1) {
        let resp = transport.get(url, token, accept)?;
        match resp.status {
            200..=299 => return Ok(Fetched::Ok(resp.body)),
            401 => return Err(Error::NetworkFailure(format!("{url}: 401 unauthorized, check {TOKEN_ENV}"))),
            403 | 429 => {
                if attempt == cfg.max_attempts.max(1) {
                    break;
                }
                let wait = resp
                    .retry_after
                    .map(Duration::from_secs)
                    .unwrap_or(delay)
                    .min(cfg.max_delay);
                log::info!("rate limited on {url}; retry {attempt} in {wait:?}");
                std::thread::sleep(wait);
                delay = (delay * 2).min(cfg.max_delay);
            }
            s => return Err(Error::NetworkFailure(format!("{url}: HTTP {s}"))),
        }
    }
    Ok(Fetched::RateLimited)
}

fn load_cached(cache_dir: &Path, key: &str) -> Result<Option<Vec<Candidate>>> {
    let path = manifest_path(cache_dir, key);
    if !path.is_file() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let mut out = Vec::with_capacity(manifest.entries.len());
    for e in manifest.entries {
        let obj = cache_dir.join("objects").join(format!("{}.java", e.object));
        let text = std::fs::read_to_string(&obj).map_err(|err| Error::io(&obj, err))?;
        let origin = Origin::Remote {
            repo: e.repo,
            path: e.path,
            url: e.url,
        };
        out.push(Candidate::new(e.id, origin, text));
    }
    Ok(Some(out))
}

fn store_cache(cache_dir: &Path, key: &str, manifest: &Manifest, candidates: &[Candidate]) -> Result<()> {
    let objects = cache_dir.join("objects");
    std::fs::create_dir_all(&objects).map_err(|e| Error::io(&objects, e))?;
    for (entry, c) in manifest.entries.iter().zip(candidates) {
        let path = objects.join(format!("{}.java", entry.object));
        std::fs::write(&path, &c.source_text).map_err(|e| Error::io(&path, e))?;
    }
    let path = manifest_path(cache_dir, key);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let json = serde_json::to_string_pretty(manifest)?;
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))
}

fn mentions(text: &str, exception: &str) -> bool {
    crate::lexer::lex(text)
        .iter()
        .any(|t| t.is(TokenKind::Identifier, exception))
}

/// Search `orgs` for `query` and download up to `limit` matching files.
///
/// A warm cache answers without any request and without a token.
pub fn fetch_remote(
    query: &SearchQuery,
    orgs: &[String],
    limit: usize,
    cfg: &RemoteConfig,
    transport: &dyn Transport,
) -> Result<FetchOutcome> {
    if limit == 0 {
        return Ok(FetchOutcome {
            complete: true,
            ..FetchOutcome::default()
        });
    }
    let key = cache_key(query, orgs, limit);
    if let Some(dir) = &cfg.cache_dir {
        if let Some(candidates) = load_cached(dir, &key)? {
            return Ok(FetchOutcome {
                candidates,
                diagnostics: Vec::new(),
                complete: true,
                from_cache: true,
            });
        }
    }
    let token = cfg.token.as_deref().ok_or(Error::AuthMissing(TOKEN_ENV))?;

    let mut outcome = FetchOutcome {
        complete: true,
        ..FetchOutcome::default()
    };
    let mut items: Vec<SearchItem> = Vec::new();
    for org in orgs {
        if items.len() >= limit {
            break;
        }
        let q = search_qualifier(query, &cfg.language, org);
        let per_page = (limit - items.len()).min(PER_PAGE_MAX).to_string();
        let url = url::Url::parse_with_params(
            &format!("{}/search/code", cfg.api_base.trim_end_matches('/')),
            [("q", q.as_str()), ("per_page", per_page.as_str())],
        )
        .map_err(|e| Error::InvalidInput(format!("api base {}: {e}", cfg.api_base)))?;
        match get_with_backoff(transport, cfg, url.as_str(), token, "application/vnd.github+json")? {
            Fetched::Ok(body) => {
                let page: SearchPage = serde_json::from_slice(&body)?;
                let room = limit - items.len();
                items.extend(page.items.into_iter().take(room));
            }
            Fetched::RateLimited => {
                outcome.complete = false;
                outcome
                    .diagnostics
                    .push(format!("search for org {org} still rate limited after {} attempts", cfg.max_attempts));
            }
        }
    }
    if items.is_empty() && !outcome.complete {
        return Err(Error::RateLimited {
            attempts: cfg.max_attempts,
        });
    }

    // Download with a bounded number of requests in flight.
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Result<Fetched>)>> = Mutex::new(Vec::new());
    let workers = cfg.concurrency.max(1).min(items.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(item) = items.get(i) else { break };
                let r = get_with_backoff(transport, cfg, &item.url, token, "application/vnd.github.raw");
                results.lock().unwrap_or_else(|e| e.into_inner()).push((i, r));
            });
        }
    });
    let mut results = results.into_inner().unwrap_or_else(|e| e.into_inner());
    results.sort_by_key(|(i, _)| *i);

    let mut entries = Vec::new();
    for (i, r) in results {
        let item = &items[i];
        let body = match r {
            Ok(Fetched::Ok(body)) => body,
            Ok(Fetched::RateLimited) => {
                outcome.complete = false;
                outcome
                    .diagnostics
                    .push(format!("{}/{}: rate limited, skipped", item.repository.full_name, item.path));
                continue;
            }
            Err(e) => return Err(e),
        };
        let text = String::from_utf8_lossy(&body).into_owned();
        if !mentions(&text, &query.exception_name) {
            outcome.diagnostics.push(format!(
                "{}/{}: does not mention {}, skipped",
                item.repository.full_name, item.path, query.exception_name
            ));
            continue;
        }
        let link = if item.html_url.is_empty() { &item.url } else { &item.html_url };
        let c = Candidate::remote(&item.repository.full_name, &item.path, link, text);
        if outcome.candidates.iter().any(|x: &Candidate| x.id == c.id) {
            continue;
        }
        entries.push(ManifestEntry {
            id: c.id.clone(),
            repo: item.repository.full_name.clone(),
            path: item.path.clone(),
            url: link.clone(),
            object: hex::encode(Sha256::digest(c.source_text.as_bytes())),
        });
        outcome.candidates.push(c);
    }

    if outcome.complete {
        if let Some(dir) = &cfg.cache_dir {
            let manifest = Manifest {
                query: query.rendered.clone(),
                orgs: orgs.to_vec(),
                limit,
                entries,
            };
            store_cache(dir, &key, &manifest, &outcome.candidates)?;
        }
    } else {
        for d in &outcome.diagnostics {
            log::warn!("{d}");
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;

    /// Serves canned responses and counts requests.
    struct Fake {
        calls: AtomicUsize,
        search: Mutex<VecDeque<HttpResponse>>,
        files: Vec<(String, String)>,
    }

    impl Fake {
        fn new(search: Vec<HttpResponse>, files: Vec<(&str, &str)>) -> Self {
            Self {
                calls: AtomicUsize::new(0),
                search: Mutex::new(search.into()),
                files: files.into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            }
        }
    }

    impl Transport for Fake {
        fn get(&self, url: &str, _token: &str, _accept: &str) -> Result<HttpResponse> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            if url.contains("/search/code") {
                return Ok(self.search.lock().unwrap().pop_front().unwrap_or(ok(br#"{"items":[]}"#.to_vec())));
            }
            let body = self
                .files
                .iter()
                .find(|(u, _)| u == url)
                .map(|(_, b)| b.clone())
                .unwrap_or_default();
            Ok(ok(body.into_bytes()))
        }
    }

    fn ok(body: Vec<u8>) -> HttpResponse {
        HttpResponse {
            status: 200,
            body,
            retry_after: None,
        }
    }

    fn limited() -> HttpResponse {
        HttpResponse {
            status: 403,
            body: Vec::new(),
            retry_after: None,
        }
    }

    fn page(n: usize) -> HttpResponse {
        let items: Vec<String> = (0..n)
            .map(|i| {
                format!(
                    r#"{{"path":"src/F{i}.java","url":"https://x/f{i}","html_url":"https://h/f{i}","repository":{{"full_name":"org/repo"}}}}"#
                )
            })
            .collect();
        ok(format!(r#"{{"items":[{}]}}"#, items.join(",")).into_bytes())
    }

    fn files(n: usize) -> Vec<(String, String)> {
        (0..n)
            .map(|i| (format!("https://x/f{i}"), format!("try {{ f{i}(); }} catch (IOException e) {{ }}")))
            .collect()
    }

    fn cfg(cache: Option<&Path>) -> RemoteConfig {
        RemoteConfig {
            token: Some("t".into()),
            cache_dir: cache.map(Path::to_path_buf),
            base_delay: Duration::ZERO,
            ..RemoteConfig::default()
        }
    }

    fn q() -> SearchQuery {
        SearchQuery::new("IOException", "URL")
    }

    #[test]
    fn qualifier_string() {
        assert_eq!(
            search_qualifier(&q(), "java", "apache"),
            "IOException URL language:java org:apache"
        );
    }

    #[test]
    fn limit_zero_is_empty() {
        let fake = Fake::new(vec![], vec![]);
        let out = fetch_remote(&q(), &["a".into()], 0, &cfg(None), &fake).unwrap();
        assert!(out.candidates.is_empty());
        assert_eq!(fake.calls.load(Ordering::SeqCst), 0);
    }

    #[test]
    fn missing_token() {
        let fake = Fake::new(vec![], vec![]);
        let c = RemoteConfig {
            token: None,
            ..cfg(None)
        };
        assert!(matches!(
            fetch_remote(&q(), &["a".into()], 5, &c, &fake),
            Err(Error::AuthMissing(TOKEN_ENV))
        ));
    }

    #[test]
    fn limit_and_cache_replay() {
        let dir = tempfile::tempdir().unwrap();
        let fs = files(6);
        let fake = Fake::new(vec![page(6)], fs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect());
        let orgs = vec!["apache".to_string()];
        let first = fetch_remote(&q(), &orgs, 4, &cfg(Some(dir.path())), &fake).unwrap();
        assert_eq!(first.candidates.len(), 4);
        assert!(first.complete && !first.from_cache);
        assert_eq!(fake.calls.load(Ordering::SeqCst), 5);

        let cold = Fake::new(vec![], vec![]);
        let no_token = RemoteConfig {
            token: None,
            ..cfg(Some(dir.path()))
        };
        let again = fetch_remote(&q(), &orgs, 4, &no_token, &cold).unwrap();
        assert_eq!(cold.calls.load(Ordering::SeqCst), 0);
        assert!(again.from_cache);
        assert_eq!(again.candidates, first.candidates);
        let manifest = std::fs::read(manifest_path(dir.path(), &cache_key(&q(), &orgs, 4))).unwrap();
        let m: Manifest = serde_json::from_slice(&manifest).unwrap();
        assert_eq!(m.entries.len(), 4);
    }

    #[test]
    fn backoff_then_success() {
        let fs = files(1);
        let fake = Fake::new(vec![limited(), limited(), page(1)], fs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect());
        let out = fetch_remote(&q(), &["a".into()], 5, &cfg(None), &fake).unwrap();
        assert!(out.complete);
        assert_eq!(out.candidates.len(), 1);
    }

    #[test]
    fn rate_limit_gives_partial_results() {
        let dir = tempfile::tempdir().unwrap();
        let fs = files(2);
        let mut search = vec![page(2)];
        search.extend(std::iter::repeat_with(limited).take(5));
        let fake = Fake::new(search, fs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect());
        let orgs = vec!["a".to_string(), "b".to_string()];
        let out = fetch_remote(&q(), &orgs, 10, &cfg(Some(dir.path())), &fake).unwrap();
        assert!(!out.complete);
        assert_eq!(out.candidates.len(), 2);
        assert_eq!(out.diagnostics.len(), 1);
        // partial results are not cached
        assert!(!manifest_path(dir.path(), &cache_key(&q(), &orgs, 10)).exists());
    }

    #[test]
    fn rate_limit_with_nothing_is_an_error() {
        let fake = Fake::new(std::iter::repeat_with(limited).take(5).collect(), vec![]);
        assert!(matches!(
            fetch_remote(&q(), &["a".into()], 5, &cfg(None), &fake),
            Err(Error::RateLimited { attempts: 5 })
        ));
    }

    #[test]
    fn files_without_the_exception_are_dropped() {
        let fake = Fake::new(vec![page(1)], vec![("https://x/f0", "class A { }")]);
        let out = fetch_remote(&q(), &["a".into()], 5, &cfg(None), &fake).unwrap();
        assert!(out.candidates.is_empty());
        assert_eq!(out.diagnostics.len(), 1);
    }
}
