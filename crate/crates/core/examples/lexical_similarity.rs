//! Lexical similarity in the default and the literal token modes.

use exrec::lexical::{lexical_score_with, LexicalOptions, LexicalWeights};
use exrec::model::parse;

const CONTEXT: &str = include_str!("../fixtures/listings/context.java");
const CANDIDATE: &str = include_str!("../fixtures/listings/recommended.java");

fn main() {
    let ctx = parse(CONTEXT);
    let cand = parse(CANDIDATE);
    let w = LexicalWeights::default();
    for (name, opts) in [("default", LexicalOptions::default()), ("exact", LexicalOptions::exact())] {
        let r = lexical_score_with(&ctx, &cand, &w, &opts);
        println!(
            "{name:8} S_cos {:.4}  S_ccm {:.4}  (LCS {} of {})  r_lex {:.4}",
            r.s_cos, r.s_ccm, r.lcs_length, r.context_token_count, r.r_lex_raw
        );
    }
}
