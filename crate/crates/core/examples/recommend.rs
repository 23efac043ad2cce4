//! Rank a local corpus for a context fragment.
//!
//! cargo run --example recommend -- [context.java] [corpus_dir]

use std::path::PathBuf;

use exrec::corpus::{ingest_local, CorpusFilter};
use exrec::model::parse;
use exrec::query::{formulate_query, ExceptionKnowledgeBase};
use exrec::ranking::{explain, rank, WeightConfig};

fn main() -> exrec::Result<()> {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut args = std::env::args().skip(1);
    let context = args.next().map(PathBuf::from).unwrap_or(fixtures.join("listings/context.java"));
    let corpus = args.next().map(PathBuf::from).unwrap_or(fixtures.join("pool"));

    let text = std::fs::read_to_string(&context)
        .map_err(|e| exrec::Error::InvalidInput(format!("{}: {e}", context.display())))?;
    let unit = parse(&text);
    let query = formulate_query(&unit, &ExceptionKnowledgeBase::bundled(), None)?;
    println!("query: {query}");

    let candidates = ingest_local(&corpus, &query, &CorpusFilter::default())?;
    let ranked = rank(&unit, &candidates, &WeightConfig::default(), 3)?;
    for r in &ranked {
        println!("{}", explain(r));
    }
    Ok(())
}
