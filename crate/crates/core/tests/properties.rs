//! Property tests over generated Java fragments.

use std::collections::BTreeSet;
use std::path::Path;

use proptest::prelude::*;

use exrec::corpus::{apply_filter, Candidate, CorpusFilter};
use exrec::graph::extract_usage_graph;
use exrec::lexer::{lex, TokenKind};
use exrec::lexical::{clone_measure, cosine_similarity, lexical_score, LexicalWeights};
use exrec::model::{parse, SourceUnit};
use exrec::quality::{average_handler_actions, handler_to_code_ratio, quality_score, QualityWeights};
use exrec::ranking::{normalize_pool, rank, WeightConfig};
use exrec::structural::{
    data_dependency_match, field_access_fractions, method_invocation_fractions, structural_score, types_match, Pairing,
    StructuralWeights,
};

const STATEMENTS: &[&str] = &[
    "URL u = new URL(address);",
    "URLConnection c = u.openConnection();",
    "c.setDoOutput(true);",
    "InputStream in = c.getInputStream();",
    "InputStreamReader isr = new InputStreamReader(in);",
    "BufferedReader r = new BufferedReader(isr);",
    "String line = r.readLine();",
    "r.close();",
    "int len = line.length;",
    "File f = new File(name);",
    "FileReader fr = new FileReader(f);",
    "long size = f.length();",
    "Socket s = new Socket(host, port);",
    "OutputStream out = s.getOutputStream();",
    "out.write(buf);",
];

const HANDLER: &[&str] = &[
    "log.error(\"failed\", e);",
    "e.printStackTrace();",
    "notify(e.getMessage());",
    "return false;",
    "System.err.println(e);",
];

fn statements(max: usize) -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(STATEMENTS), 0..=max)
}

fn fragment() -> impl Strategy<Value = String> {
    (statements(6), prop::collection::vec(prop::sample::select(HANDLER), 0..=3), any::<bool>()).prop_map(
        |(body, handler, wrapped)| {
            if !wrapped {
                return body.join("\n");
            }
            let mut out = vec!["try {".to_string()];
            out.extend(body.iter().map(|s| format!("    {s}")));
            out.push("} catch (IOException e) {".into());
            out.extend(handler.iter().map(|s| format!("    {s}")));
            out.push("}".into());
            out.join("\n")
        },
    )
}

fn combine(w: &StructuralWeights, pairings: &[Pairing], ctx: &SourceUnit, cand: &SourceUnit) -> f64 {
    let sum = |xs: Vec<f64>| xs.into_iter().sum::<f64>();
    w.alpha * pairings.len() as f64
        + w.beta * sum(field_access_fractions(pairings, ctx, cand))
        + w.gamma * sum(method_invocation_fractions(pairings, ctx, cand))
        + w.delta * data_dependency_match(pairings, ctx, cand).iter().map(|d| d.dmt).sum::<f64>()
}

/// Best score over every injective pairing of type-compatible objects.
fn exhaustive(ctx: &SourceUnit, cand: &SourceUnit, w: &StructuralWeights) -> f64 {
    fn go(
        i: usize,
        used: &mut Vec<bool>,
        acc: &mut Vec<Pairing>,
        ctx: &SourceUnit,
        cand: &SourceUnit,
        w: &StructuralWeights,
        best: &mut f64,
    ) {
        if i == ctx.objects.len() {
            *best = best.max(combine(w, acc, ctx, cand));
            return;
        }
        go(i + 1, used, acc, ctx, cand, w, best);
        for j in 0..cand.objects.len() {
            if !used[j] && types_match(&ctx.objects[i].type_name, &cand.objects[j].type_name) {
                used[j] = true;
                acc.push(Pairing { context: i, candidate: j });
                go(i + 1, used, acc, ctx, cand, w, best);
                acc.pop();
                used[j] = false;
            }
        }
    }
    let mut best = 0.0;
    go(0, &mut vec![false; cand.objects.len()], &mut Vec::new(), ctx, cand, w, &mut best);
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parsing_is_deterministic(src in fragment()) {
        prop_assert_eq!(parse(&src), parse(&src));
    }

    #[test]
    fn lexing_never_fails(src in ".{0,200}") {
        let unit = parse(&src);
        prop_assert!(unit.tokens.iter().all(|t| !t.text.is_empty()));
    }

    #[test]
    fn graphs_are_well_formed(src in fragment()) {
        let unit = parse(&src);
        if let Ok(g) = extract_usage_graph(&unit) {
            prop_assert!(g.is_well_formed());
        }
        prop_assert!(unit.dependencies.iter().all(|d| d.consumer != d.producer));
    }

    #[test]
    fn call_counts_are_consistent(src in fragment()) {
        let unit = parse(&src);
        let invoked: usize = unit.objects.iter().map(|o| o.methods_invoked.values().sum::<usize>()).sum();
        prop_assert_eq!(invoked, unit.tracked_call_sites);
    }

    #[test]
    fn handler_lines_within_sloc(src in fragment()) {
        let unit = parse(&src);
        prop_assert!(unit.handler_summary().handler_sloc <= unit.sloc);
    }

    #[test]
    fn structural_identity_is_an_upper_bound(a in fragment(), b in fragment()) {
        let (u, v) = (parse(&a), parse(&b));
        prop_assume!(u.objects.len() <= 5 && v.objects.len() <= 5);
        let w = StructuralWeights::default();
        let own = structural_score(&u, &u, &w).unwrap();
        let other = structural_score(&u, &v, &w).unwrap();
        prop_assert!(own.r_str_raw >= other.r_str_raw, "{} < {}", own.r_str_raw, other.r_str_raw);
    }

    #[test]
    fn structural_score_is_exact(a in fragment(), b in fragment()) {
        let r = structural_score(&parse(&a), &parse(&b), &StructuralWeights::default()).unwrap();
        prop_assert_eq!(r.recompute().to_bits(), r.r_str_raw.to_bits());
    }

    #[test]
    fn greedy_matches_exhaustive_or_flags(a in statements(5), b in statements(5)) {
        let (u, v) = (parse(&a.join("\n")), parse(&b.join("\n")));
        prop_assume!(u.objects.len() <= 4 && v.objects.len() <= 4);
        let w = StructuralWeights::default();
        let r = structural_score(&u, &v, &w).unwrap();
        let best = exhaustive(&u, &v, &w);
        prop_assert!(r.r_str_raw <= best + 1e-9);
        prop_assert!(
            (best - r.r_str_raw).abs() < 1e-9 || r.greedy_suboptimal,
            "greedy {} below best {} without a flag", r.r_str_raw, best
        );
    }

    #[test]
    fn matched_invocation_never_lowers_structure(a in statements(5), b in statements(5)) {
        let ctx = parse(&a.join("\n"));
        let before = parse(&b.join("\n"));
        let w = StructuralWeights::default();
        let base = structural_score(&ctx, &before, &w).unwrap();
        let Some(p) = base.pairings.first() else { return Ok(()); };
        let Some(method) = ctx.objects[p.context].methods_invoked.keys().next() else { return Ok(()); };
        let var = &before.objects[p.candidate].variable_name;
        prop_assume!(!var.is_empty());
        let after = parse(&format!("{}\n{var}.{method}();", b.join("\n")));
        let grown = structural_score(&ctx, &after, &w).unwrap();
        prop_assert!(grown.r_str_raw >= base.r_str_raw);
    }

    #[test]
    fn lexical_bounds(a in fragment(), b in fragment()) {
        let r = lexical_score(&parse(&a), &parse(&b), &LexicalWeights::default());
        prop_assert!((0.0..=1.0).contains(&r.s_cos));
        prop_assert!((0.0..=1.0).contains(&r.s_ccm));
        prop_assert_eq!(r.r_lex_raw, r.s_cos + r.s_ccm);
    }

    #[test]
    fn cosine_is_symmetric(a in prop::collection::vec("[a-d]", 0..20), b in prop::collection::vec("[a-d]", 0..20)) {
        prop_assert_eq!(cosine_similarity(&a, &b), cosine_similarity(&b, &a));
    }

    #[test]
    fn shuffling_keeps_cosine(
        (a, b) in (prop::collection::vec("[a-e]", 1..20), prop::collection::vec("[a-e]", 1..20))
            .prop_flat_map(|(a, b)| (Just(a), Just(b.clone()).prop_shuffle()))
    ) {
        let sorted = { let mut s = b.clone(); s.sort(); s };
        let x = cosine_similarity(&a, &b);
        let y = cosine_similarity(&a, &sorted);
        prop_assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn quality_ranges(src in fragment()) {
        let unit = parse(&src);
        prop_assume!(unit.sloc > 0);
        let q = quality_score(&unit, &QualityWeights::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&q.ra));
        prop_assert!((0.0..=1.0).contains(&q.hcr));
        prop_assert!(q.aha >= 0.0);
    }

    #[test]
    fn stack_traces_do_not_count(body in statements(4), handler in prop::collection::vec(prop::sample::select(HANDLER), 0..3)) {
        let build = |extra: bool| {
            let mut h: Vec<&str> = handler.clone();
            if extra { h.push("e.printStackTrace();"); }
            format!("try {{\n{}\n}} catch (IOException e) {{\n{}\n}}", body.join("\n"), h.join("\n"))
        };
        let before = average_handler_actions(&parse(&build(false)).handler_summary());
        let after = average_handler_actions(&parse(&build(true)).handler_summary());
        prop_assert_eq!(before, after);
    }

    #[test]
    fn handler_share_moves_with_appended_lines(body in statements(4), handler in prop::collection::vec(prop::sample::select(HANDLER), 1..3), extra in 1usize..4) {
        let frag = |body_extra: usize, handler_extra: usize| {
            let mut b = body.clone();
            b.extend(std::iter::repeat_n("count++;", body_extra));
            let mut h = handler.clone();
            h.extend(std::iter::repeat_n("count--;", handler_extra));
            format!("try {{\n{}\n}} catch (IOException e) {{\n{}\n}}", b.join("\n"), h.join("\n"))
        };
        let base = handler_to_code_ratio(&parse(&frag(0, 0))).unwrap();
        let more_code = handler_to_code_ratio(&parse(&frag(extra, 0))).unwrap();
        let more_handler = handler_to_code_ratio(&parse(&frag(0, extra))).unwrap();
        prop_assert!(more_code < base);
        prop_assert!(more_handler > base);
    }

    #[test]
    fn normalization_bounds(raw in prop::collection::vec(-1e6f64..1e6, 1..20)) {
        let n = normalize_pool(&raw).unwrap();
        prop_assert!(n.iter().all(|x| (0.0..=1.0).contains(x)));
        let distinct = raw.iter().any(|x| *x != raw[0]);
        if distinct {
            prop_assert!(n.contains(&0.0));
            prop_assert!(n.contains(&1.0));
        } else {
            prop_assert!(n.iter().all(|x| *x == 0.5));
        }
    }

    #[test]
    fn raising_a_raw_component_never_lowers_it(raw in prop::collection::vec(0.0f64..10.0, 2..10), idx in any::<prop::sample::Index>(), bump in 0.0f64..5.0) {
        let i = idx.index(raw.len());
        let max = raw.iter().copied().fold(f64::MIN, f64::max);
        prop_assume!(raw[i] < max && raw.iter().any(|x| *x != raw[0]));
        let mut raised = raw.clone();
        raised[i] += bump;
        prop_assert!(normalize_pool(&raised).unwrap()[i] >= normalize_pool(&raw).unwrap()[i]);
    }

    #[test]
    fn ranking_is_a_deterministic_permutation(ctx in fragment(), pool in prop::collection::vec(fragment(), 1..6)) {
        let unit = parse(&ctx);
        let candidates: Vec<Candidate> = pool
            .iter()
            .enumerate()
            .map(|(i, s)| Candidate::local(Path::new(&format!("c{i}.java")), s.clone()))
            .collect();
        let w = WeightConfig::default();
        let a = rank(&unit, &candidates, &w, candidates.len()).unwrap();
        let b = rank(&unit, &candidates, &w, candidates.len()).unwrap();
        let ranks: Vec<usize> = a.iter().map(|r| r.rank).collect();
        prop_assert_eq!(ranks, (1..=candidates.len()).collect::<Vec<_>>());
        prop_assert_eq!(a.iter().map(|r| &r.candidate_id).collect::<Vec<_>>(), b.iter().map(|r| &r.candidate_id).collect::<Vec<_>>());
        for r in &a {
            let t = r.top_level;
            prop_assert_eq!(r.r_total, t.w_str * r.r_str_norm + t.w_lex * r.r_lex_norm + t.w_ehc * r.q_ehc_norm);
        }
    }

    #[test]
    fn filter_is_sound(pool in prop::collection::vec(fragment(), 0..8)) {
        let candidates: Vec<Candidate> = pool
            .iter()
            .enumerate()
            .map(|(i, s)| Candidate::local(Path::new(&format!("f{i}.java")), s.clone()))
            .collect();
        let filter = CorpusFilter { min_sloc: 2, max_sloc: 8, ..CorpusFilter::default() };
        let out = apply_filter(candidates.clone(), &filter, Some("IOException"));
        prop_assert_eq!(out.kept.len() + out.excluded.len(), candidates.len());
        for c in &out.kept {
            let tokens = lex(&c.source_text);
            let has = |kind: TokenKind, text: &str| tokens.iter().any(|t| t.is(kind, text));
            prop_assert!(has(TokenKind::Keyword, "try") && has(TokenKind::Keyword, "catch"));
            prop_assert!(has(TokenKind::Identifier, "IOException"));
            let sloc = c.source_text.lines().filter(|l| !l.trim().is_empty()).count();
            prop_assert!((2..=8).contains(&sloc));
        }
        let ids: BTreeSet<&String> = candidates.iter().map(|c| &c.id).collect();
        prop_assert_eq!(ids.len(), candidates.len());
    }
}

#[test]
fn clone_measure_is_asymmetric() {
    let short = ["a", "b"];
    let long = ["a", "x", "b", "y", "z"];
    assert_eq!(clone_measure(&short, &long).1, 1.0);
    assert_eq!(clone_measure(&long, &short).1, 0.4);
}

#[test]
fn shuffling_can_lower_the_clone_measure() {
    let ctx = ["open", "read", "close"];
    let shuffled = ["close", "read", "open"];
    assert_eq!(cosine_similarity(&ctx, &ctx), cosine_similarity(&ctx, &shuffled));
    assert!(clone_measure(&ctx, &shuffled).1 < clone_measure(&ctx, &ctx).1);
}
