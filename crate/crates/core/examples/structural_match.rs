//! Structural relevance between a context and a candidate, term by term.

use exrec::model::parse;
use exrec::structural::{structural_score, StructuralWeights};

const CONTEXT: &str = include_str!("../fixtures/listings/context.java");
const CANDIDATE: &str = include_str!("../fixtures/listings/recommended.java");

fn main() -> exrec::Result<()> {
    let ctx = parse(CONTEXT);
    let cand = parse(CANDIDATE);
    let report = structural_score(&ctx, &cand, &StructuralWeights::default())?;

    for p in &report.pairings {
        println!(
            "{} ~ {}",
            ctx.objects[p.context].type_name, cand.objects[p.candidate].type_name
        );
    }
    println!("AOM {}", report.n_matched_objects);
    println!("FAM {:.4}", report.fam_sum());
    println!("MIM {:.4}", report.mim_sum());
    println!("DDM {:.4}", report.ddm_sum());
    println!("r_str {:.4}", report.r_str_raw);
    if report.greedy_suboptimal {
        println!("note: greedy pairing is below the best possible pairing");
    }
    Ok(())
}
