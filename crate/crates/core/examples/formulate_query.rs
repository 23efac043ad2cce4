//! Infer the search query for a context fragment.

use exrec::model::parse;
use exrec::query::{dominant_api_class, formulate_query, ExceptionKnowledgeBase};

const CONTEXT: &str = r#"
URL url = new URL(address);
HttpURLConnection conn = (HttpURLConnection) url.openConnection();
conn.setRequestMethod("GET");
BufferedReader in = new BufferedReader(new InputStreamReader(conn.getInputStream()));
String line = in.readLine();
"#;

fn main() -> exrec::Result<()> {
    let unit = parse(CONTEXT);
    let kb = ExceptionKnowledgeBase::bundled();
    println!("knowledge base: {} entries", kb.len());
    println!("dominant class: {}", dominant_api_class(&unit)?);

    let inferred = formulate_query(&unit, &kb, None)?;
    println!("inferred query: {inferred}");

    let explicit = formulate_query(&unit, &kb, Some("ProtocolException"))?;
    println!("explicit query: {explicit}");
    Ok(())
}
