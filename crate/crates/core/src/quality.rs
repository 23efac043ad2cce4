//! Exception-handler quality of a candidate:
//! `q_ehc = mu * ra + epsilon * aha + kappa * hcr`.
//!
//! `ra` is a feature-based readability proxy; the transforms are listed in
//! `docs/readability.md`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexer::{tokenize, TokenKind};
use crate::model::{HandlerInfo, SourceUnit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityWeights {
    pub mu: f64,
    pub epsilon: f64,
    pub kappa: f64,
}

impl Default for QualityWeights {
    fn default() -> Self {
        Self {
            mu: 1.0,
            epsilon: 1.0,
            kappa: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub ra: f64,
    pub aha: f64,
    pub hcr: f64,
    pub q_ehc_raw: f64,
}

/// Raw readability features of a fragment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityFeatures {
    pub avg_line_length: f64,
    pub max_line_length: f64,
    pub avg_identifier_length: f64,
    pub comment_density: f64,
    pub paren_density: f64,
    pub blank_density: f64,
}

type Curve = &'static [(f64, f64)];

const AVG_LINE: Curve = &[(40.0, 1.0), (100.0, 0.0)];
const MAX_LINE: Curve = &[(80.0, 1.0), (160.0, 0.0)];
const IDENT_LEN: Curve = &[(1.0, 0.0), (4.0, 1.0), (12.0, 1.0), (30.0, 0.0)];
const COMMENTS: Curve = &[(0.0, 0.0), (0.2, 1.0)];
const PARENS: Curve = &[(0.5, 1.0), (4.0, 0.0)];
const BLANKS: Curve = &[(0.0, 0.5), (0.1, 1.0), (0.3, 1.0), (0.6, 0.0)];

/// Convex feature weights, in [`ReadabilityFeatures`] field order.
const WEIGHTS: [f64; 6] = [0.25, 0.15, 0.15, 0.15, 0.20, 0.10];

/// Piecewise-linear interpolation, constant beyond the end points.
fn piecewise(x: f64, curve: Curve) -> f64 {
    let (first, last) = (curve[0], curve[curve.len() - 1]);
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    for w in curve.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x <= x1 {
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    last.1
}

/// Measure the features; `None` when the text has no non-blank line.
pub fn readability_features(text: &str) -> Option<ReadabilityFeatures> {
    let lines: Vec<&str> = text.lines().collect();
    let lengths: Vec<usize> = lines
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim_end().chars().count())
        .collect();
    if lengths.is_empty() {
        return None;
    }
    let nonblank = lengths.len() as f64;
    let lexed = tokenize(text);
    let idents: Vec<usize> = lexed
        .tokens
        .iter()
        .filter(|t| t.token.kind == TokenKind::Identifier)
        .map(|t| t.token.text.chars().count())
        .collect();
    let parens = lexed
        .tokens
        .iter()
        .filter(|t| t.token.kind == TokenKind::Punctuation && matches!(t.token.text.as_str(), "(" | ")"))
        .count();
    let mut comment_lines = lexed.comment_lines.clone();
    comment_lines.dedup();
    Some(ReadabilityFeatures {
        avg_line_length: lengths.iter().sum::<usize>() as f64 / nonblank,
        max_line_length: *lengths.iter().max().unwrap_or(&0) as f64,
        avg_identifier_length: if idents.is_empty() {
            0.0
        } else {
            idents.iter().sum::<usize>() as f64 / idents.len() as f64
        },
        comment_density: comment_lines.len() as f64 / nonblank,
        paren_density: parens as f64 / nonblank,
        blank_density: (lines.len() as f64 - nonblank) / lines.len() as f64,
    })
}

impl ReadabilityFeatures {
    /// Per-feature scores in [0, 1], in field order.
    pub fn transformed(&self) -> [f64; 6] {
        [
            piecewise(self.avg_line_length, AVG_LINE),
            piecewise(self.max_line_length, MAX_LINE),
            piecewise(self.avg_identifier_length, IDENT_LEN),
            piecewise(self.comment_density, COMMENTS),
            piecewise(self.paren_density, PARENS),
            piecewise(self.blank_density, BLANKS),
        ]
    }

    pub fn score(&self) -> f64 {
        let s: f64 = self.transformed().iter().zip(WEIGHTS).map(|(v, w)| v * w).sum();
        s.clamp(0.0, 1.0)
    }
}

/// Readability proxy in [0, 1]; 0 for an empty fragment.
pub fn readability(unit: &SourceUnit) -> f64 {
    readability_features(&unit.raw_text).map_or(0.0, |f| f.score())
}

/// Mean significant-statement count over catch clauses; 0 without catches.
pub fn average_handler_actions(handlers: &HandlerInfo) -> f64 {
    if handlers.catch_clauses.is_empty() {
        return 0.0;
    }
    let total: usize = handlers.catch_clauses.iter().map(|c| c.significant_count()).sum();
    total as f64 / handlers.catch_clauses.len() as f64
}

/// Fraction of code lines that belong to catch or finally blocks.
pub fn handler_to_code_ratio(unit: &SourceUnit) -> Result<f64> {
    if unit.sloc == 0 {
        return Err(Error::EmptyUnit);
    }
    Ok(unit.handler_lines.len() as f64 / unit.sloc as f64)
}

pub fn quality_score(unit: &SourceUnit, w: &QualityWeights) -> Result<QualityReport> {
    let hcr = handler_to_code_ratio(unit)?;
    let ra = readability(unit);
    let aha = average_handler_actions(&unit.handler_summary());
    Ok(QualityReport {
        ra,
        aha,
        hcr,
        q_ehc_raw: w.mu * ra + w.epsilon * aha + w.kappa * hcr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    #[test]
    fn curve_interpolation() {
        assert_eq!(piecewise(10.0, AVG_LINE), 1.0);
        assert_eq!(piecewise(70.0, AVG_LINE), 0.5);
        assert_eq!(piecewise(500.0, AVG_LINE), 0.0);
        assert_eq!(piecewise(0.05, BLANKS), 0.75);
        assert_eq!(piecewise(8.0, IDENT_LEN), 1.0);
        assert!((WEIGHTS.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(readability(&parse("")), 0.0);
        assert_eq!(readability(&parse("\n  \n")), 0.0);
    }

    #[test]
    fn longer_lines_read_worse() {
        let short = "// fetch\nint count = 0;\nString name = value;\n";
        let long: String = short
            .lines()
            .map(|l| format!("{l} {l} {l}\n"))
            .collect();
        assert!(readability(&parse(short)) > readability(&parse(&long)));
    }

    #[test]
    fn parentheses_read_worse() {
        let plain = "int a = b;\nint c = d;\n";
        let nested = "int a = ((((b))));\nint c = ((((d))));\n";
        assert!(readability(&parse(plain)) > readability(&parse(nested)));
    }

    #[test]
    fn aha_counts_catches_only() {
        let u = parse(
            "try { f(); } catch (A e) { log(e); retry(); close(); } catch (B e) { e.printStackTrace(); warn(); } finally { a(); b(); }",
        );
        assert_eq!(average_handler_actions(&u.handler_summary()), 2.0);
        let empty = parse("try { f(); } catch (Exception e) { }");
        assert_eq!(average_handler_actions(&empty.handler_summary()), 0.0);
    }

    #[test]
    fn hcr_counts_handler_lines() {
        let src = "int a = 1;\nint b = 2;\nint c = 3;\nint d = 4;\ntry {\n  f();\n} catch (IOException e) {\n  log(e);\n} finally {\n  close(); }\n";
        let u = parse(src);
        assert_eq!(u.sloc, 10);
        assert_eq!(handler_to_code_ratio(&u).unwrap(), 0.4);
        assert_eq!(handler_to_code_ratio(&parse("a();")).unwrap(), 0.0);
        assert!(matches!(handler_to_code_ratio(&parse("")), Err(Error::EmptyUnit)));
    }

    #[test]
    fn no_handlers_leaves_readability() {
        let u = parse("URL u = new URL(s);\nu.openConnection();\n");
        let r = quality_score(&u, &QualityWeights::default()).unwrap();
        assert_eq!(r.q_ehc_raw, r.ra);
    }
}
