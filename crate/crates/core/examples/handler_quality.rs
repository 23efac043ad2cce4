//! Handler quality: readability, handler actions and handler share.

use exrec::model::parse;
use exrec::quality::{quality_score, readability_features, QualityWeights};

const CANDIDATE: &str = include_str!("../fixtures/listings/recommended.java");
const EMPTY_CATCH: &str = include_str!("../fixtures/pool/empty_catch.java");

fn main() -> exrec::Result<()> {
    for (name, text) in [("recommended", CANDIDATE), ("empty_catch", EMPTY_CATCH)] {
        let unit = parse(text);
        let q = quality_score(&unit, &QualityWeights::default())?;
        println!("{name}: RA {:.4}  AHA {:.4}  HCR {:.4}  q_ehc {:.4}", q.ra, q.aha, q.hcr, q.q_ehc_raw);
        if let Some(f) = readability_features(text) {
            println!("  features {f:?}");
        }
    }
    Ok(())
}
