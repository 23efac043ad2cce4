//! Pool-relative ranking of candidates against a context fragment.
//!
//! Each component score is min-max normalized over the candidate pool and
//! fused as
//!
//! ```text
//! r_total = w_str * r_str_norm + w_lex * r_lex_norm + w_ehc * q_ehc_norm
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Candidate;
use crate::error::{Error, Result};
use crate::lexical::{lexical_score, LexicalReport, LexicalWeights};
use crate::model::SourceUnit;
use crate::quality::{quality_score, QualityReport, QualityWeights};
use crate::structural::{structural_score, MatchReport, StructuralWeights};

pub const DEFAULT_TOP_K: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopLevelWeights {
    pub w_str: f64,
    pub w_lex: f64,
    pub w_ehc: f64,
}

impl Default for TopLevelWeights {
    fn default() -> Self {
        Self {
            w_str: 1.2787,
            w_lex: 1.0152,
            w_ehc: 1.1588,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub structural: StructuralWeights,
    pub lexical: LexicalWeights,
    pub quality: QualityWeights,
    pub top_level: TopLevelWeights,
}

/// Flat on-disk form; missing keys keep their defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightFile {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    delta: Option<f64>,
    lambda: Option<f64>,
    sigma: Option<f64>,
    mu: Option<f64>,
    epsilon: Option<f64>,
    kappa: Option<f64>,
    w_str: Option<f64>,
    w_lex: Option<f64>,
    w_ehc: Option<f64>,
}

impl WeightConfig {
    /// Parse the flat TOML form with keys `alpha beta gamma delta lambda
    /// sigma mu epsilon kappa w_str w_lex w_ehc`.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg_err = |reason: String| Error::Config {
            path: origin.to_path_buf(),
            reason,
        };
        let f: WeightFile = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        let d = Self::default();
        let w = Self {
            structural: StructuralWeights {
                alpha: f.alpha.unwrap_or(d.structural.alpha),
                beta: f.beta.unwrap_or(d.structural.beta),
                gamma: f.gamma.unwrap_or(d.structural.gamma),
                delta: f.delta.unwrap_or(d.structural.delta),
            },
            lexical: LexicalWeights {
                lambda: f.lambda.unwrap_or(d.lexical.lambda),
                sigma: f.sigma.unwrap_or(d.lexical.sigma),
            },
            quality: QualityWeights {
                mu: f.mu.unwrap_or(d.quality.mu),
                epsilon: f.epsilon.unwrap_or(d.quality.epsilon),
                kappa: f.kappa.unwrap_or(d.quality.kappa),
            },
            top_level: TopLevelWeights {
                w_str: f.w_str.unwrap_or(d.top_level.w_str),
                w_lex: f.w_lex.unwrap_or(d.top_level.w_lex),
                w_ehc: f.w_ehc.unwrap_or(d.top_level.w_ehc),
            },
        };
        w.validate().map_err(|e| cfg_err(e.to_string()))?;
        Ok(w)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn named(&self) -> [(&'static str, f64); 12] {
        let (s, l, q, t) = (self.structural, self.lexical, self.quality, self.top_level);
        [
            ("alpha", s.alpha),
            ("beta", s.beta),
            ("gamma", s.gamma),
            ("delta", s.delta),
            ("lambda", l.lambda),
            ("sigma", l.sigma),
            ("mu", q.mu),
            ("epsilon", q.epsilon),
            ("kappa", q.kappa),
            ("w_str", t.w_str),
            ("w_lex", t.w_lex),
            ("w_ehc", t.w_ehc),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!("weight {name} must be a finite value >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Scale the three top-level weights by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut w = *self;
        w.top_level.w_str *= c;
        w.top_level.w_lex *= c;
        w.top_level.w_ehc *= c;
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub candidate_id: String,
    pub origin: String,
    pub rank: usize,
    pub r_str_raw: f64,
    pub r_lex_raw: f64,
    pub q_ehc_raw: f64,
    pub r_str_norm: f64,
    pub r_lex_norm: f64,
    pub q_ehc_norm: f64,
    pub r_total: f64,
    /// The structural component was set to 0 because a side failed to parse.
    pub structure_unavailable: bool,
    /// The quality component was set to 0 because the candidate has no code lines.
    pub quality_unavailable: bool,
    pub structural: MatchReport,
    pub lexical: LexicalReport,
    pub quality: QualityReport,
    pub top_level: TopLevelWeights,
}

/// Min-max normalization; a constant pool maps to 0.5 everywhere.
pub fn normalize_pool(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::EmptyPool);
    }
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return Ok(vec![0.5; raw.len()]);
    }
    Ok(raw.iter().map(|x| ((x - min) / (max - min)).clamp(0.0, 1.0)).collect())
}

struct Raw {
    structural: MatchReport,
    structure_unavailable: bool,
    lexical: LexicalReport,
    quality: QualityReport,
    quality_unavailable: bool,
}

fn score_one(context: &SourceUnit, candidate: &Candidate, w: &WeightConfig) -> Result<Raw> {
    let unit = candidate.unit();
    let (structural, structure_unavailable) = match structural_score(context, unit, &w.structural) {
        Ok(r) => (r, false),
        Err(Error::StructureUnavailable(side)) => {
            log::debug!("{}: structure unavailable ({side})", candidate.id);
            (MatchReport::empty(w.structural), true)
        }
        Err(e) => return Err(e),
    };
    let lexical = lexical_score(context, unit, &w.lexical);
    let (quality, quality_unavailable) = match quality_score(unit, &w.quality) {
        Ok(q) => (q, false),
        Err(Error::EmptyUnit) => (
            QualityReport {
                ra: 0.0,
                aha: 0.0,
                hcr: 0.0,
                q_ehc_raw: 0.0,
            },
            true,
        ),
        Err(e) => return Err(e),
    };
    Ok(Raw {
        structural,
        structure_unavailable,
        lexical,
        quality,
        quality_unavailable,
    })
}

/// Score every candidate, normalize over the pool and return the best
/// `min(k, pool)` entries, highest total first, ties by candidate id.
pub fn rank(context: &SourceUnit, candidates: &[Candidate], weights: &WeightConfig, k: usize) -> Result<Vec<ScoreBreakdown>> {
    if candidates.is_empty() {
        return Err(Error::EmptyPool);
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    weights.validate()?;

    let raws: Vec<Raw> = candidates
        .par_iter()
        .map(|c| score_one(context, c, weights))
        .collect::<Result<_>>()?;

    let str_norm = normalize_pool(&raws.iter().map(|r| r.structural.r_str_raw).collect::<Vec<_>>())?;
    let lex_norm = normalize_pool(&raws.iter().map(|r| r.lexical.r_lex_raw).collect::<Vec<_>>())?;
    let ehc_norm = normalize_pool(&raws.iter().map(|r| r.quality.q_ehc_raw).collect::<Vec<_>>())?;
    let t = weights.top_level;

    let mut out: Vec<ScoreBreakdown> = raws
        .into_iter()
        .zip(candidates)
        .enumerate()
        .map(|(i, (r, c))| ScoreBreakdown {
            candidate_id: c.id.clone(),
            origin: c.origin.to_string(),
            rank: 0,
            r_str_raw: r.structural.r_str_raw,
            r_lex_raw: r.lexical.r_lex_raw,
            q_ehc_raw: r.quality.q_ehc_raw,
            r_str_norm: str_norm[i],
            r_lex_norm: lex_norm[i],
            q_ehc_norm: ehc_norm[i],
            r_total: t.w_str * str_norm[i] + t.w_lex * lex_norm[i] + t.w_ehc * ehc_norm[i],
            structure_unavailable: r.structure_unavailable,
            quality_unavailable: r.quality_unavailable,
            structural: r.structural,
            lexical: r.lexical,
            quality: r.quality,
            top_level: t,
        })
        .collect();
    out.sort_by(|a, b| {
        b.r_total
            .total_cmp(&a.r_total)
            .then_with(|| a.candidate_id.cmp(&b.candidate_id))
    });
    for (i, b) in out.iter_mut().enumerate() {
        b.rank = i + 1;
    }
    out.truncate(k);
    Ok(out)
}

/// Multi-line report with every metric, component and the total.
pub fn explain(b: &ScoreBreakdown) -> String {
    let s = &b.structural;
    let mut out = String::new();
    let _ = writeln!(out, "#{} {} ({})", b.rank, b.candidate_id, b.origin);
    let flag = if b.structure_unavailable { "  [structure unavailable]" } else { "" };
    let _ = writeln!(
        out,
        "  structural  AOM={} FAM={:.4} MIM={:.4} DDM={:.4}  raw={:.4} norm={:.4}{flag}",
        s.n_matched_objects,
        s.fam_sum(),
        s.mim_sum(),
        s.ddm_sum(),
        b.r_str_raw,
        b.r_str_norm
    );
    let _ = writeln!(
        out,
        "  lexical     S_cos={:.4} S_ccm={:.4}  raw={:.4} norm={:.4}",
        b.lexical.s_cos, b.lexical.s_ccm, b.r_lex_raw, b.r_lex_norm
    );
    let flag = if b.quality_unavailable { "  [no code lines]" } else { "" };
    let _ = writeln!(
        out,
        "  quality     RA={:.4} AHA={:.4} HCR={:.4}  raw={:.4} norm={:.4}{flag}",
        b.quality.ra, b.quality.aha, b.quality.hcr, b.q_ehc_raw, b.q_ehc_norm
    );
    let _ = writeln!(out, "  total       {:.4}", b.r_total);
    out
}

/// One aligned line per entry.
pub fn render_table(ranked: &[ScoreBreakdown]) -> String {
    let mut out = format!(
        "{:>4}  {:<16}  {:>7}  {:>7}  {:>7}  {:>7}  {}\n",
        "rank", "id", "str", "lex", "ehc", "total", "origin"
    );
    for b in ranked {
        let _ = writeln!(
            out,
            "{:>4}  {:<16}  {:>7.4}  {:>7.4}  {:>7.4}  {:>7.4}  {}{}",
            b.rank,
            b.candidate_id,
            b.r_str_norm,
            b.r_lex_norm,
            b.q_ehc_norm,
            b.r_total,
            b.origin,
            if b.structure_unavailable { " [structure unavailable]" } else { "" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    #[test]
    fn normalization() {
        assert_eq!(normalize_pool(&[1.0, 3.0, 5.0]).unwrap(), [0.0, 0.5, 1.0]);
        assert_eq!(normalize_pool(&[2.0, 2.0, 2.0]).unwrap(), [0.5, 0.5, 0.5]);
        assert_eq!(normalize_pool(&[0.0, 10.0]).unwrap(), [0.0, 1.0]);
        assert!(matches!(normalize_pool(&[]), Err(Error::EmptyPool)));
    }

    #[test]
    fn weight_file() {
        let w = WeightConfig::from_toml_str("alpha = 2.0\nw_lex = 0.5\n", Path::new("w.toml")).unwrap();
        assert_eq!(w.structural.alpha, 2.0);
        assert_eq!(w.top_level.w_lex, 0.5);
        assert_eq!(w.top_level.w_str, 1.2787);
        assert!(WeightConfig::from_toml_str("alpah = 1.0", Path::new("w.toml")).is_err());
        assert!(WeightConfig::from_toml_str("mu = -1.0", Path::new("w.toml")).is_err());
    }

    fn pool() -> Vec<Candidate> {
        let texts = [
            "try {\n URL u = new URL(s);\n u.openConnection();\n} catch (IOException e) {\n log(e);\n}\n",
            "int x = 1;\nint y = 2;\nint z = x + y;\n",
            "try {\n  a.b();\n} catch (Exception e) {\n}\n",
        ];
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Candidate::local(Path::new(&format!("{i}.java")), *t))
            .collect()
    }

    #[test]
    fn identity_ranks_first() {
        let cs = pool();
        let ctx = cs[0].unit().clone();
        let r = rank(&ctx, &cs, &WeightConfig::default(), 15).unwrap();
        assert_eq!(r[0].candidate_id, cs[0].id);
        let ranks: Vec<_> = r.iter().map(|b| b.rank).collect();
        assert_eq!(ranks, [1, 2, 3]);
    }

    #[test]
    fn total_is_exact_fusion() {
        let cs = pool();
        let ctx = parse("URL u = new URL(s);");
        for b in rank(&ctx, &cs, &WeightConfig::default(), 15).unwrap() {
            let t = b.top_level;
            assert_eq!(b.r_total, t.w_str * b.r_str_norm + t.w_lex * b.r_lex_norm + t.w_ehc * b.q_ehc_norm);
        }
    }

    #[test]
    fn k_truncates() {
        let cs = pool();
        let ctx = parse("URL u = new URL(s);");
        assert_eq!(rank(&ctx, &cs, &WeightConfig::default(), 1).unwrap().len(), 1);
        assert!(rank(&ctx, &cs, &WeightConfig::default(), 0).is_err());
        assert!(matches!(rank(&ctx, &[], &WeightConfig::default(), 5), Err(Error::EmptyPool)));
    }

    #[test]
    fn broken_candidate_stays_in_pool() {
        let mut cs = pool();
        cs.push(Candidate::local(Path::new("broken.java"), "catch ) IOException ( {{ x +"));
        let ctx = parse("URL u = new URL(s);");
        let r = rank(&ctx, &cs, &WeightConfig::default(), 15).unwrap();
        let broken = r.iter().find(|b| b.origin == "broken.java").unwrap();
        assert!(broken.structure_unavailable);
        assert_eq!(broken.r_str_raw, 0.0);
    }

    #[test]
    fn explain_names_every_metric() {
        let cs = pool();
        let r = rank(&parse("URL u = new URL(s);"), &cs, &WeightConfig::default(), 1).unwrap();
        let text = explain(&r[0]);
        for name in ["AOM", "FAM", "MIM", "DDM", "S_cos", "S_ccm", "RA", "AHA", "HCR", "total"] {
            assert!(text.contains(name), "{name} missing");
        }
        let json = serde_json::to_string(&r[0]).unwrap();
        let back: ScoreBreakdown = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r[0]);
    }
}
