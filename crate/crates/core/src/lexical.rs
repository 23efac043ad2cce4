//! Lexical relevance: cosine similarity of token vectors plus a
//! longest-common-subsequence clone measure.
//!
//! ```text
//! r_lex = lambda * s_cos + sigma * s_ccm
//! s_ccm = |lcs(context, candidate)| / |context|
//! ```
//!
//! Under the default [`LexicalOptions`] the cosine term vectors split
//! identifiers into lower-cased camelCase/underscore words, and the clone
//! measure compares the sequences of distinct tokens in order of first
//! appearance. [`LexicalOptions::exact`] compares raw token texts instead.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::lexer::{Token, TokenKind};
use crate::model::SourceUnit;

/// Candidate token lists are cut to this length before the LCS.
pub const MAX_LCS_TOKENS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexicalWeights {
    pub lambda: f64,
    pub sigma: f64,
}

impl Default for LexicalWeights {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LexicalOptions {
    /// Keep operator tokens as significant.
    pub keep_operators: bool,
    /// Split identifiers into lower-cased words for the cosine vectors.
    pub split_identifiers: bool,
    /// Run the clone measure over distinct tokens in first-appearance order.
    pub distinct_sequences: bool,
}

impl Default for LexicalOptions {
    fn default() -> Self {
        Self {
            keep_operators: true,
            split_identifiers: true,
            distinct_sequences: true,
        }
    }
}

impl LexicalOptions {
    /// Raw token texts, operators dropped, full token streams.
    pub fn exact() -> Self {
        Self {
            keep_operators: false,
            split_identifiers: false,
            distinct_sequences: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexicalReport {
    pub s_cos: f64,
    pub s_ccm: f64,
    pub lcs_length: usize,
    pub context_token_count: usize,
    pub r_lex_raw: f64,
    /// The candidate sequence was cut to [`MAX_LCS_TOKENS`].
    #[serde(default)]
    pub truncated: bool,
}

/// Tokens that take part in similarity: punctuation never does, operators
/// only when `keep_operators` is set.
pub fn significant_tokens_with(unit: &SourceUnit, opts: &LexicalOptions) -> Vec<Token> {
    unit.tokens
        .iter()
        .filter(|t| match t.kind {
            TokenKind::Punctuation => false,
            TokenKind::Operator => opts.keep_operators,
            _ => true,
        })
        .cloned()
        .collect()
}

pub fn significant_tokens(unit: &SourceUnit) -> Vec<Token> {
    significant_tokens_with(unit, &LexicalOptions::default())
}

/// Split an identifier into lower-cased words: `HttpURLConnection` gives
/// `http`, `url`, `connection`.
pub fn identifier_words(ident: &str) -> Vec<String> {
    let chars: Vec<char> = ident.chars().collect();
    let mut words = Vec::new();
    let mut word = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_ascii_alphanumeric() {
            if !word.is_empty() {
                words.push(std::mem::take(&mut word));
            }
            continue;
        }
        if !word.is_empty() {
            let p = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase());
            let boundary = p.is_ascii_digit() != c.is_ascii_digit()
                || (p.is_ascii_lowercase() && c.is_ascii_uppercase())
                || (p.is_ascii_uppercase() && c.is_ascii_uppercase() && next_lower);
            if boundary {
                words.push(std::mem::take(&mut word));
            }
        }
        word.push(c.to_ascii_lowercase());
    }
    if !word.is_empty() {
        words.push(word);
    }
    if words.is_empty() {
        words.push(ident.to_ascii_lowercase());
    }
    words
}

fn cosine_terms(tokens: &[Token], opts: &LexicalOptions) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    for t in tokens {
        if opts.split_identifiers && t.kind == TokenKind::Identifier {
            out.extend(identifier_words(&t.text));
        } else {
            out.push(t.text.clone());
        }
    }
    out
}

/// Cosine of the term-frequency vectors; 0 when either side is empty.
pub fn cosine_similarity<S: AsRef<str>>(context: &[S], candidate: &[S]) -> f64 {
    fn tf<S: AsRef<str>>(xs: &[S]) -> HashMap<&str, f64> {
        let mut m = HashMap::new();
        for x in xs {
            *m.entry(x.as_ref()).or_insert(0.0) += 1.0;
        }
        m
    }
    if context.is_empty() || candidate.is_empty() {
        return 0.0;
    }
    let (u, v) = (tf(context), tf(candidate));
    let dot = u
        .iter()
        .filter_map(|(k, a)| v.get(k).map(|b| a * b))
        .fold(0.0, |acc, x| acc + x);
    let nu: f64 = u.values().map(|a| a * a).sum();
    let nv: f64 = v.values().map(|b| b * b).sum();
    (dot / (nu * nv).sqrt()).clamp(0.0, 1.0)
}

/// Length of the longest common subsequence, in linear space.
pub fn lcs_length<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut prev = vec![0usize; inner.len() + 1];
    let mut cur = vec![0usize; inner.len() + 1];
    for x in outer {
        for (j, y) in inner.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                prev[j + 1].max(cur[j])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[inner.len()]
}

/// `(|lcs|, |lcs| / |context|)`; the ratio is 0 for an empty context.
pub fn clone_measure<T: PartialEq>(context: &[T], candidate: &[T]) -> (usize, f64) {
    let n = lcs_length(context, candidate);
    let ratio = if context.is_empty() {
        0.0
    } else {
        n as f64 / context.len() as f64
    };
    (n, ratio)
}

fn distinct_in_order(tokens: &[Token]) -> Vec<&str> {
    let mut seen = std::collections::HashSet::new();
    tokens
        .iter()
        .map(|t| t.text.as_str())
        .filter(|t| seen.insert(*t))
        .collect()
}

pub fn lexical_score(context: &SourceUnit, candidate: &SourceUnit, w: &LexicalWeights) -> LexicalReport {
    lexical_score_with(context, candidate, w, &LexicalOptions::default())
}

pub fn lexical_score_with(
    context: &SourceUnit,
    candidate: &SourceUnit,
    w: &LexicalWeights,
    opts: &LexicalOptions,
) -> LexicalReport {
    let ctx = significant_tokens_with(context, opts);
    let cand = significant_tokens_with(candidate, opts);

    let s_cos = cosine_similarity(&cosine_terms(&ctx, opts), &cosine_terms(&cand, opts));

    let (ctx_seq, mut cand_seq): (Vec<&str>, Vec<&str>) = if opts.distinct_sequences {
        (distinct_in_order(&ctx), distinct_in_order(&cand))
    } else {
        (
            ctx.iter().map(|t| t.text.as_str()).collect(),
            cand.iter().map(|t| t.text.as_str()).collect(),
        )
    };
    let truncated = cand_seq.len() > MAX_LCS_TOKENS;
    if truncated {
        log::warn!(
            "candidate has {} tokens; clone measure uses the first {MAX_LCS_TOKENS}",
            cand_seq.len()
        );
        cand_seq.truncate(MAX_LCS_TOKENS);
    }
    let (lcs, s_ccm) = clone_measure(&ctx_seq, &cand_seq);

    LexicalReport {
        s_cos,
        s_ccm,
        lcs_length: lcs,
        context_token_count: ctx_seq.len(),
        r_lex_raw: w.lambda * s_cos + w.sigma * s_ccm,
        truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    const GOLDEN: usize = 16;
    const GOLDEN_EXACT: usize = 14;

    fn texts(ts: &[Token]) -> Vec<&str> {
        ts.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn punctuation_is_dropped() {
        let u = parse("url.openConnection()");
        assert_eq!(texts(&significant_tokens(&u)), ["url", "openConnection"]);
        assert!(significant_tokens(&parse("")).is_empty());
    }

    #[test]
    fn operators_follow_option() {
        let u = parse("a = b + 1;");
        assert_eq!(texts(&significant_tokens(&u)), ["a", "=", "b", "+", "1"]);
        assert_eq!(
            texts(&significant_tokens_with(&u, &LexicalOptions::exact())),
            ["a", "b", "1"]
        );
    }

    #[test]
    fn words() {
        assert_eq!(identifier_words("HttpURLConnection"), ["http", "url", "connection"]);
        assert_eq!(identifier_words("openConnection"), ["open", "connection"]);
        assert_eq!(identifier_words("HTTP_OK"), ["http", "ok"]);
        assert_eq!(identifier_words("URL"), ["url"]);
        assert_eq!(identifier_words("parseUTF8"), ["parse", "utf", "8"]);
        assert_eq!(identifier_words("_"), ["_"]);
    }

    #[test]
    fn cosine_cases() {
        assert_eq!(cosine_similarity(&["a", "b"], &["a", "b"]), 1.0);
        assert_eq!(cosine_similarity(&["a"], &["b"]), 0.0);
        assert!((cosine_similarity(&["a", "b"], &["a"]) - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(cosine_similarity::<&str>(&[], &["a"]), 0.0);
    }

    #[test]
    fn clone_cases() {
        assert_eq!(clone_measure(&["a", "b", "c"], &["a", "c", "d"]), (2, 2.0 / 3.0));
        assert_eq!(clone_measure::<&str>(&[], &["a"]), (0, 0.0));
        // normalised by the context side only
        assert_eq!(clone_measure(&["a", "b"], &["a", "b", "c", "d"]).1, 1.0);
        assert_eq!(clone_measure(&["a", "b", "c", "d"], &["a", "b"]).1, 0.5);
    }

    #[test]
    fn identical_units_score_two() {
        let u = parse("URL u = new URL(s); u.openConnection();");
        let r = lexical_score(&u, &u, &LexicalWeights::default());
        assert_eq!(r.r_lex_raw, 2.0);
        let r = lexical_score_with(&u, &u, &LexicalWeights::default(), &LexicalOptions::exact());
        assert_eq!(r.r_lex_raw, 2.0);
    }

    #[test]
    fn empty_context_scores_zero() {
        let r = lexical_score(&parse(""), &parse("a.b();"), &LexicalWeights::default());
        assert_eq!(r.r_lex_raw, 0.0);
        assert_eq!(r.context_token_count, 0);
    }

    #[test]
    fn long_candidate_is_truncated() {
        let body: String = (0..MAX_LCS_TOKENS + 5).map(|i| format!("t{i} ")).collect();
        let r = lexical_score(&parse("t0 t1"), &parse(&body), &LexicalWeights::default());
        assert!(r.truncated);
        assert_eq!(r.lcs_length, 2);
    }

    #[test]
    fn context_fixture_token_count() {
        let u = parse(include_str!("../fixtures/listings/context.java"));
        assert_eq!(significant_tokens(&u).len(), GOLDEN);
        assert_eq!(significant_tokens_with(&u, &LexicalOptions::exact()).len(), GOLDEN_EXACT);
    }
}
