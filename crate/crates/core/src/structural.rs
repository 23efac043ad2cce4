//! Structural relevance between a context fragment and a candidate example.
//!
//! ```text
//! r_str = alpha * N + beta * sum(FAM_i / FAQ_i) + gamma * sum(MIM_i / MIQ_i) + delta * sum(DMT_j)
//! ```
//!
//! `N` counts paired API objects. For each pairing the field and method
//! fractions compare the candidate object's accesses against the context
//! object's (multiset intersection over the context count). Each matched data
//! dependency contributes 1.0 when the access points agree and 0.5 otherwise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ApiObjectUse, ParseStatus, SourceUnit};

/// Exhaustive pairing search is skipped above this many search nodes.
const EXHAUSTIVE_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructuralWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl Default for StructuralWeights {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub context: usize,
    pub candidate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyMatch {
    pub context_consumer: usize,
    pub context_producer: usize,
    pub context_access_point: String,
    pub candidate_access_point: String,
    pub dmt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub n_matched_objects: usize,
    pub pairings: Vec<Pairing>,
    pub fam_fractions: Vec<f64>,
    pub mim_fractions: Vec<f64>,
    pub dependency_matches: Vec<DependencyMatch>,
    pub weights: StructuralWeights,
    pub r_str_raw: f64,
    /// Set when an exhaustive search found a pairing that scores higher than
    /// the greedy one.
    pub greedy_suboptimal: bool,
}

impl MatchReport {
    pub fn fam_sum(&self) -> f64 {
        total(self.fam_fractions.iter().copied())
    }

    pub fn mim_sum(&self) -> f64 {
        total(self.mim_fractions.iter().copied())
    }

    pub fn ddm_sum(&self) -> f64 {
        total(self.dependency_matches.iter().map(|d| d.dmt))
    }

    /// Recompute the weighted score from the stored components.
    pub fn recompute(&self) -> f64 {
        combine(
            &self.weights,
            self.n_matched_objects,
            self.fam_sum(),
            self.mim_sum(),
            self.ddm_sum(),
        )
    }

    /// Report for a pair where structure is unavailable.
    pub fn empty(weights: StructuralWeights) -> Self {
        Self {
            n_matched_objects: 0,
            pairings: Vec::new(),
            fam_fractions: Vec::new(),
            mim_fractions: Vec::new(),
            dependency_matches: Vec::new(),
            weights,
            r_str_raw: 0.0,
            greedy_suboptimal: false,
        }
    }
}

/// Sum starting from +0.0, so an empty sum prints as `0`.
fn total(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, |a, b| a + b)
}

fn combine(w: &StructuralWeights, n: usize, fam: f64, mim: f64, ddm: f64) -> f64 {
    w.alpha * n as f64 + w.beta * fam + w.gamma * mim + w.delta * ddm
}

/// Type names match exactly, or by simple name when either side is unqualified.
pub fn types_match(a: &str, b: &str) -> bool {
    if a.contains('.') && b.contains('.') {
        a == b
    } else {
        crate::model::simple_name(a) == crate::model::simple_name(b)
    }
}

fn multiset_overlap(context: &BTreeMap<String, usize>, candidate: &BTreeMap<String, usize>) -> usize {
    context
        .iter()
        .map(|(k, &n)| n.min(candidate.get(k).copied().unwrap_or(0)))
        .sum()
}

fn fraction(hit: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hit as f64 / total as f64
    }
}

fn field_fraction(ctx: &ApiObjectUse, cand: &ApiObjectUse) -> f64 {
    fraction(
        multiset_overlap(&ctx.fields_accessed, &cand.fields_accessed),
        ctx.field_access_count(),
    )
}

fn method_fraction(ctx: &ApiObjectUse, cand: &ApiObjectUse) -> f64 {
    fraction(
        multiset_overlap(&ctx.invocations(), &cand.invocations()),
        ctx.invocation_count(),
    )
}

fn member_overlap(ctx: &ApiObjectUse, cand: &ApiObjectUse) -> usize {
    multiset_overlap(&ctx.fields_accessed, &cand.fields_accessed)
        + multiset_overlap(&ctx.invocations(), &cand.invocations())
}

/// Greedy pairing: each context object, in declaration order, takes the
/// unused same-type candidate object with the largest field + method overlap,
/// earliest candidate on ties.
pub fn match_objects(context: &SourceUnit, candidate: &SourceUnit) -> Vec<Pairing> {
    let mut used = vec![false; candidate.objects.len()];
    let mut pairings = Vec::new();
    for (ci, c) in context.objects.iter().enumerate() {
        let best = candidate
            .objects
            .iter()
            .enumerate()
            .filter(|(j, o)| !used[*j] && types_match(&c.type_name, &o.type_name))
            .map(|(j, o)| (member_overlap(c, o), j))
            // max overlap, then smallest index
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        if let Some((_, j)) = best {
            used[j] = true;
            pairings.push(Pairing {
                context: ci,
                candidate: j,
            });
        }
    }
    pairings
}

pub fn field_access_fractions(pairings: &[Pairing], context: &SourceUnit, candidate: &SourceUnit) -> Vec<f64> {
    pairings
        .iter()
        .map(|p| field_fraction(&context.objects[p.context], &candidate.objects[p.candidate]))
        .collect()
}

/// Sum of FAM_i / FAQ_i over the pairings.
pub fn field_access_match(pairings: &[Pairing], context: &SourceUnit, candidate: &SourceUnit) -> f64 {
    total(field_access_fractions(pairings, context, candidate).into_iter())
}

pub fn method_invocation_fractions(
    pairings: &[Pairing],
    context: &SourceUnit,
    candidate: &SourceUnit,
) -> Vec<f64> {
    pairings
        .iter()
        .map(|p| method_fraction(&context.objects[p.context], &candidate.objects[p.candidate]))
        .collect()
}

/// Sum of MIM_i / MIQ_i over the pairings.
pub fn method_invocation_match(pairings: &[Pairing], context: &SourceUnit, candidate: &SourceUnit) -> f64 {
    total(method_invocation_fractions(pairings, context, candidate).into_iter())
}

/// Match context data dependencies against the candidate's. A context edge
/// matches when both endpoints are paired and the candidate has an unused
/// dependency between the paired objects; equal access points score 1.0,
/// different ones 0.5.
pub fn data_dependency_match(
    pairings: &[Pairing],
    context: &SourceUnit,
    candidate: &SourceUnit,
) -> Vec<DependencyMatch> {
    let partner: BTreeMap<usize, usize> = pairings.iter().map(|p| (p.context, p.candidate)).collect();
    let mut used = vec![false; candidate.dependencies.len()];
    let mut out = Vec::new();
    for d in &context.dependencies {
        let (Some(&cons), Some(&prod)) = (partner.get(&d.consumer), partner.get(&d.producer)) else {
            continue;
        };
        let between = |(j, e): &(usize, &crate::model::DependencyUse)| {
            !used[*j] && e.consumer == cons && e.producer == prod
        };
        let exact = candidate
            .dependencies
            .iter()
            .enumerate()
            .filter(between)
            .find(|(_, e)| e.access_point == d.access_point);
        let chosen = exact.or_else(|| candidate.dependencies.iter().enumerate().find(between));
        if let Some((j, e)) = chosen {
            used[j] = true;
            out.push(DependencyMatch {
                context_consumer: d.consumer,
                context_producer: d.producer,
                context_access_point: d.access_point.clone(),
                candidate_access_point: e.access_point.clone(),
                dmt: if e.access_point == d.access_point { 1.0 } else { 0.5 },
            });
        }
    }
    out
}

fn score_pairings(
    pairings: &[Pairing],
    context: &SourceUnit,
    candidate: &SourceUnit,
    w: &StructuralWeights,
) -> f64 {
    let fam = field_access_match(pairings, context, candidate);
    let mim = method_invocation_match(pairings, context, candidate);
    let ddm = total(data_dependency_match(pairings, context, candidate).iter().map(|d| d.dmt));
    combine(w, pairings.len(), fam, mim, ddm)
}

/// Structural relevance of `candidate` for `context`.
pub fn structural_score(
    context: &SourceUnit,
    candidate: &SourceUnit,
    w: &StructuralWeights,
) -> Result<MatchReport> {
    if context.parse_status == ParseStatus::Failed {
        return Err(Error::StructureUnavailable("context"));
    }
    if candidate.parse_status == ParseStatus::Failed {
        return Err(Error::StructureUnavailable("candidate"));
    }
    let pairings = match_objects(context, candidate);
    let fam_fractions = field_access_fractions(&pairings, context, candidate);
    let mim_fractions = method_invocation_fractions(&pairings, context, candidate);
    let dependency_matches = data_dependency_match(&pairings, context, candidate);
    let mut report = MatchReport {
        n_matched_objects: pairings.len(),
        pairings,
        fam_fractions,
        mim_fractions,
        dependency_matches,
        weights: *w,
        r_str_raw: 0.0,
        greedy_suboptimal: false,
    };
    report.r_str_raw = report.recompute();
    if let Some(best) = exhaustive_best(context, candidate, w) {
        report.greedy_suboptimal = best > report.r_str_raw + 1e-12;
    }
    Ok(report)
}

/// Best score over every injective same-type pairing, or `None` when the
/// search would exceed the budget.
fn exhaustive_best(context: &SourceUnit, candidate: &SourceUnit, w: &StructuralWeights) -> Option<f64> {
    let options: Vec<Vec<usize>> = context
        .objects
        .iter()
        .map(|c| {
            candidate
                .objects
                .iter()
                .enumerate()
                .filter(|(_, o)| types_match(&c.type_name, &o.type_name))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let size = options
        .iter()
        .try_fold(1usize, |acc, o| acc.checked_mul(o.len() + 1))?;
    if size > EXHAUSTIVE_BUDGET {
        return None;
    }

    fn walk(
        i: usize,
        options: &[Vec<usize>],
        used: &mut Vec<bool>,
        current: &mut Vec<Pairing>,
        eval: &mut dyn FnMut(&[Pairing]),
    ) {
        if i == options.len() {
            eval(current);
            return;
        }
        walk(i + 1, options, used, current, eval);
        for &j in &options[i] {
            if !used[j] {
                used[j] = true;
                current.push(Pairing {
                    context: i,
                    candidate: j,
                });
                walk(i + 1, options, used, current, eval);
                current.pop();
                used[j] = false;
            }
        }
    }

    let mut best = 0.0f64;
    let mut used = vec![false; candidate.objects.len()];
    walk(0, &options, &mut used, &mut Vec::new(), &mut |p| {
        best = best.max(score_pairings(p, context, candidate, w));
    });
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse;

    const UNIT: StructuralWeights = StructuralWeights {
        alpha: 1.0,
        beta: 1.0,
        gamma: 1.0,
        delta: 1.0,
    };

    #[test]
    fn identity_pairs_every_object() {
        let u = parse("A a = new A(); B b = new B(a); a.x = 1; b.run();");
        let p = match_objects(&u, &u);
        assert_eq!(p.len(), u.objects.len());
        let r = structural_score(&u, &u, &UNIT).unwrap();
        assert_eq!(r.ddm_sum(), 1.0);
        assert!(r.dependency_matches.iter().all(|d| d.dmt == 1.0));
    }

    #[test]
    fn duplicate_types_pair_once_each() {
        // context {A, A, B} vs candidate {A, B, B}
        let ctx = parse("void m(A a1, A a2, B b1) { a1.f(); a2.f(); b1.g(); }");
        let cand = parse("void m(A a1, B b1, B b2) { a1.f(); b1.g(); b2.g(); }");
        let p = match_objects(&ctx, &cand);
        assert_eq!(p.len(), 2);
        assert_eq!(p[0], Pairing { context: 0, candidate: 0 });
        assert_eq!(p[1], Pairing { context: 2, candidate: 1 });
    }

    #[test]
    fn field_fraction_uses_context_multiplicity() {
        let ctx = parse("void m(A a) { u(a.x); u(a.x); u(a.y); }");
        let cand = parse("void m(A a) { u(a.x); u(a.y); u(a.z); }");
        let p = match_objects(&ctx, &cand);
        assert!((field_access_match(&p, &ctx, &cand) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn method_fraction() {
        let ctx = parse("void m(A a) { a.f(); a.g(); }");
        let cand = parse("void m(A a) { a.f(); }");
        let p = match_objects(&ctx, &cand);
        assert_eq!(method_invocation_match(&p, &ctx, &cand), 0.5);
    }

    #[test]
    fn zero_queries_contribute_zero() {
        let ctx = parse("void m(A a, B b) { b.go(a); }");
        let cand = parse("void m(A a, B b) { b.go(a); a.x(); }");
        let r = structural_score(&ctx, &cand, &UNIT).unwrap();
        // a has neither field nor method accesses in the context
        assert_eq!(r.fam_fractions, vec![0.0, 0.0]);
        assert_eq!(r.mim_fractions, vec![0.0, 1.0]);
    }

    #[test]
    fn partial_dependency_match() {
        let ctx = parse("A a = new A(); B b = new B(a.f());");
        let cand = parse("A a = new A(); B b = new B(a.g());");
        let r = structural_score(&ctx, &cand, &UNIT).unwrap();
        assert_eq!(r.dependency_matches.len(), 1);
        assert_eq!(r.dependency_matches[0].dmt, 0.5);
    }

    #[test]
    fn empty_access_point_against_named_is_partial() {
        let ctx = parse("A a = new A(); B b = new B(a);");
        let cand = parse("A a = new A(); B b = new B(a.g());");
        let r = structural_score(&ctx, &cand, &UNIT).unwrap();
        assert_eq!(r.ddm_sum(), 0.5);
    }

    #[test]
    fn candidate_edge_used_once() {
        let ctx = parse("A a = new A(); B b = new B(a.f(), a.g());");
        let cand = parse("A a = new A(); B b = new B(a.f());");
        let r = structural_score(&ctx, &cand, &UNIT).unwrap();
        assert_eq!(r.dependency_matches.len(), 1);
        assert_eq!(r.dependency_matches[0].dmt, 1.0);
    }

    #[test]
    fn empty_candidate_scores_zero() {
        let ctx = parse("A a = new A(); a.f();");
        let r = structural_score(&ctx, &parse(""), &UNIT).unwrap();
        assert_eq!(r.r_str_raw, 0.0);
    }

    #[test]
    fn failed_side_is_unavailable() {
        let ok = parse("A a = new A();");
        assert!(matches!(
            structural_score(&ok, &parse("x +"), &UNIT),
            Err(Error::StructureUnavailable("candidate"))
        ));
        assert!(matches!(
            structural_score(&parse("x +"), &ok, &UNIT),
            Err(Error::StructureUnavailable("context"))
        ));
    }

    #[test]
    fn qualified_and_simple_names() {
        assert!(types_match("java.net.URL", "URL"));
        assert!(types_match("java.net.URL", "java.net.URL"));
        assert!(!types_match("java.net.URL", "com.example.URL"));
        assert!(!types_match("URL", "URI"));
    }

    #[test]
    fn greedy_suboptimal_is_flagged() {
        // a1 ties between both candidates and takes the first, leaving a2
        // with no overlap.
        let ctx = parse("void m(A a1, A a2) { a1.f(); a1.g(); a2.g(); a2.h(); a2.k(); }");
        let cand = parse("void m(A c1, A c2) { c1.g(); c1.h(); c1.k(); c2.f(); }");
        let r = structural_score(&ctx, &cand, &UNIT).unwrap();
        assert_eq!(r.pairings[0], Pairing { context: 0, candidate: 0 });
        assert!(r.greedy_suboptimal);
        assert_eq!(r.mim_sum(), 0.5);
        assert_eq!(exhaustive_best(&ctx, &cand, &UNIT), Some(3.5));
    }
}
