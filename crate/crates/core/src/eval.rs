//! Retrieval evaluation against an oracle of relevant candidates: mean
//! precision, mean average precision at K, recall, and the number and share
//! of cases with at least one relevant result.
//!
//! File formats are described in `docs/eval.md`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::remote::Transport;
use crate::corpus::{apply_filter, fetch_remote, load_local, CorpusFilter, RemoteConfig};
use crate::error::{Error, Result};
use crate::model::parse;
use crate::query::{formulate_query, ExceptionKnowledgeBase};
use crate::ranking::{rank, WeightConfig};

pub const DEFAULT_KS: [usize; 3] = [5, 10, 15];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorpusSource {
    Dir { corpus_dir: PathBuf },
    Remote { orgs: Vec<String>, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub case_id: String,
    pub context_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exception_name: Option<String>,
    #[serde(flatten)]
    pub corpus: CorpusSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub cases: Vec<CaseSpec>,
}

impl CaseFile {
    /// Load a case file; relative paths inside it are resolved against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut file: CaseFile = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for c in &mut file.cases {
            c.context_path = base.join(&c.context_path);
            if let CorpusSource::Dir { corpus_dir } = &mut c.corpus {
                *corpus_dir = base.join(&*corpus_dir);
            }
        }
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for c in &self.cases {
            if !seen.insert(c.case_id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate case id {}", c.case_id)));
            }
        }
        Ok(())
    }
}

/// Relevant candidate ids per case.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Oracle {
    pub relevant: BTreeMap<String, BTreeSet<String>>,
}

impl Oracle {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Every oracle entry must name a known case.
    pub fn check_against(&self, cases: &CaseFile) -> Result<()> {
        let known: HashSet<&str> = cases.cases.iter().map(|c| c.case_id.as_str()).collect();
        match self.relevant.keys().find(|k| !known.contains(k.as_str())) {
            Some(k) => Err(Error::InvalidInput(format!("oracle names unknown case {k}"))),
            None => Ok(()),
        }
    }

    pub fn relevant_for(&self, case_id: &str) -> BTreeSet<String> {
        self.relevant.get(case_id).cloned().unwrap_or_default()
    }
}

fn hits_in_top<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, k: usize) -> usize {
    ranked
        .iter()
        .take(k)
        .filter(|id| relevant.contains(id.as_ref()))
        .count()
}

/// `|relevant ∩ top-k| / min(k, len)`; 0 for an empty list.
pub fn precision_at_list<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, k: usize) -> f64 {
    let denom = k.min(ranked.len());
    if denom == 0 {
        return 0.0;
    }
    hits_in_top(ranked, relevant, k) as f64 / denom as f64
}

/// Mean of the precision at each relevant hit within the top `k`; the
/// denominator is the number of such hits.
pub fn average_precision_at_k<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, k: usize) -> f64 {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, id) in ranked.iter().take(k).enumerate() {
        if relevant.contains(id.as_ref()) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    if hits == 0 {
        0.0
    } else {
        sum / hits as f64
    }
}

/// Pooled recall: relevant retrieved over all relevant, across cases.
pub fn recall_overall(retrieved_relevant: &[usize], relevant_sizes: &[usize]) -> f64 {
    let total: usize = relevant_sizes.iter().sum();
    if total == 0 {
        return 0.0;
    }
    retrieved_relevant.iter().sum::<usize>() as f64 / total as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMetrics {
    pub k: usize,
    pub mp: f64,
    pub mapk: f64,
    pub recall: f64,
    /// Cases with at least one relevant result in the top `k`.
    pub teh: usize,
    /// Relevant results retrieved in the top `k`, over all cases.
    pub relevant_retrieved: usize,
    pub peh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    pub ranked: Vec<String>,
    pub relevant: usize,
    /// Average precision for each cutoff, in report order.
    pub average_precision: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalTotals {
    pub cases: usize,
    pub failed_cases: usize,
    /// Size of the benchmark: relevant examples over all cases.
    pub relevant: usize,
    pub candidates_scored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub ks: Vec<usize>,
    pub per_k: Vec<KMetrics>,
    pub cases: Vec<CaseResult>,
    pub totals: EvalTotals,
}

type Row = (&'static str, fn(&KMetrics) -> String);

fn pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// Metrics as rows, cutoffs as columns; TEH reads `handled(retrieved)`.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<6}", "Metric");
        for k in &self.ks {
            let _ = write!(out, "{:>14}", format!("Top {k}"));
        }
        out.push('\n');
        let rows: [Row; 5] = [
            ("MP", |m| pct(m.mp)),
            ("MAPK", |m| pct(m.mapk)),
            ("TEH", |m| format!("{}({})", m.teh, m.relevant_retrieved)),
            ("PEH", |m| pct(m.peh)),
            ("R", |m| pct(m.recall)),
        ];
        for (name, f) in rows {
            let _ = write!(out, "{name:<6}");
            for m in &self.per_k {
                let _ = write!(out, "{:>14}", f(m));
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{} cases ({} failed), {} relevant examples, {} candidates scored",
            self.totals.cases, self.totals.failed_cases, self.totals.relevant, self.totals.candidates_scored
        );
        out
    }

    /// One row per cutoff; `recall, mp` pairs give a precision-recall curve.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,recall,mp,mapk,teh,relevant_retrieved,peh\n");
        for m in &self.per_k {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                m.k, m.recall, m.mp, m.mapk, m.teh, m.relevant_retrieved, m.peh
            );
        }
        out
    }
}

/// Compute the report from per-case rankings.
pub fn metrics_from_ranked(cases: Vec<CaseResult>, oracle: &Oracle, ks: &[usize], candidates_scored: usize) -> EvalReport {
    let mut cases = cases;
    let n = cases.len();
    let relevant: Vec<BTreeSet<String>> = cases.iter().map(|c| oracle.relevant_for(&c.case_id)).collect();
    for (c, rel) in cases.iter_mut().zip(&relevant) {
        c.relevant = rel.len();
        c.average_precision = ks.iter().map(|&k| average_precision_at_k(&c.ranked, rel, k)).collect();
    }
    let per_k = ks
        .iter()
        .enumerate()
        .map(|(ki, &k)| {
            let hits: Vec<usize> = cases
                .iter()
                .zip(&relevant)
                .map(|(c, rel)| hits_in_top(&c.ranked, rel, k))
                .collect();
            let sizes: Vec<usize> = relevant.iter().map(BTreeSet::len).collect();
            let mean = |xs: Vec<f64>| if n == 0 { 0.0 } else { xs.iter().sum::<f64>() / n as f64 };
            let teh = hits.iter().filter(|&&h| h > 0).count();
            KMetrics {
                k,
                mp: mean(
                    cases
                        .iter()
                        .zip(&relevant)
                        .map(|(c, rel)| precision_at_list(&c.ranked, rel, k))
                        .collect(),
                ),
                mapk: mean(cases.iter().map(|c| c.average_precision[ki]).collect()),
                recall: recall_overall(&hits, &sizes),
                teh,
                relevant_retrieved: hits.iter().sum(),
                peh: if n == 0 { 0.0 } else { teh as f64 / n as f64 },
            }
        })
        .collect();
    EvalReport {
        ks: ks.to_vec(),
        per_k,
        totals: EvalTotals {
            cases: n,
            failed_cases: cases.iter().filter(|c| c.error.is_some()).count(),
            relevant: relevant.iter().map(BTreeSet::len).sum(),
            candidates_scored,
        },
        cases,
    }
}

pub struct EvalOptions<'a> {
    pub ks: Vec<usize>,
    pub weights: WeightConfig,
    pub filter: CorpusFilter,
    pub kb: ExceptionKnowledgeBase,
    /// Needed only for cases that search remotely.
    pub remote: Option<(RemoteConfig, &'a dyn Transport)>,
}

impl Default for EvalOptions<'_> {
    fn default() -> Self {
        Self {
            ks: DEFAULT_KS.to_vec(),
            weights: WeightConfig::default(),
            filter: CorpusFilter::default(),
            kb: ExceptionKnowledgeBase::bundled(),
            remote: None,
        }
    }
}

fn run_case(spec: &CaseSpec, opts: &EvalOptions, k: usize) -> Result<(String, Vec<String>, usize)> {
    let text = std::fs::read_to_string(&spec.context_path).map_err(|e| Error::io(&spec.context_path, e))?;
    let context = parse(&text);
    let query = formulate_query(&context, &opts.kb, spec.exception_name.as_deref())?;
    let candidates = match &spec.corpus {
        CorpusSource::Dir { corpus_dir } => load_local(corpus_dir)?.candidates,
        CorpusSource::Remote { orgs, limit } => {
            let (cfg, transport) = opts
                .remote
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("remote case but no remote client configured".into()))?;
            fetch_remote(&query, orgs, *limit, cfg, *transport)?.candidates
        }
    };
    let kept = apply_filter(candidates, &opts.filter, Some(&query.exception_name)).kept;
    if kept.is_empty() {
        return Err(Error::EmptyPool);
    }
    let ranked = rank(&context, &kept, &opts.weights, k)?;
    Ok((
        query.rendered,
        ranked.into_iter().map(|b| b.candidate_id).collect(),
        kept.len(),
    ))
}

/// Run every case through query, corpus and ranking, then score against the
/// oracle. A failing case is recorded with its error and scores zero.
pub fn evaluate(cases: &CaseFile, oracle: &Oracle, opts: &EvalOptions) -> Result<EvalReport> {
    cases.validate()?;
    oracle.check_against(cases)?;
    if opts.ks.is_empty() || opts.ks.contains(&0) {
        return Err(Error::InvalidInput("cutoffs must be non-empty and at least 1".into()));
    }
    let max_k = *opts.ks.iter().max().unwrap_or(&1);
    for c in &cases.cases {
        if oracle.relevant_for(&c.case_id).is_empty() {
            log::warn!("case {} has no relevant examples; it adds nothing to recall", c.case_id);
        }
    }
    let results: Vec<(CaseResult, usize)> = cases
        .cases
        .par_iter()
        .map(|spec| {
            let (query, ranked, scored, error) = match run_case(spec, opts, max_k) {
                Ok((q, r, n)) => (Some(q), r, n, None),
                Err(e) => {
                    log::warn!("case {} failed: {e}", spec.case_id);
                    (None, Vec::new(), 0, Some(e.to_string()))
                }
            };
            let result = CaseResult {
                case_id: spec.case_id.clone(),
                query,
                ranked,
                relevant: 0,
                average_precision: Vec::new(),
                error,
            };
            (result, scored)
        })
        .collect();
    let scored = results.iter().map(|(_, n)| n).sum();
    Ok(metrics_from_ranked(
        results.into_iter().map(|(r, _)| r).collect(),
        oracle,
        &opts.ks,
        scored,
    ))
}
