//! Build the API usage graph of a fragment and print it as DOT.
//!
//! cargo run --example analyze_graph -- [file.java]

use exrec::graph::extract_usage_graph;
use exrec::model::parse;

fn main() -> exrec::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/listings/recommended.java").into());
    let text = std::fs::read_to_string(&path).map_err(|e| exrec::Error::InvalidInput(format!("{path}: {e}")))?;
    let unit = parse(&text);
    let graph = extract_usage_graph(&unit)?;

    println!("{} API objects, parse {:?}", graph.object_count(), unit.parse_status);
    for (consumer, producer, via) in graph.dependencies() {
        println!(
            "  {} <- {} via {}",
            graph.object_type(consumer).unwrap_or("?"),
            graph.object_type(producer).unwrap_or("?"),
            if via.is_empty() { "(object)" } else { via }
        );
    }
    println!();
    print!("{}", graph.to_dot());
    Ok(())
}
