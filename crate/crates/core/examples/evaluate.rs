//! Run the bundled evaluation suite and print the metric table.

use std::path::PathBuf;

use exrec::eval::{evaluate, CaseFile, EvalOptions, Oracle};

fn main() -> exrec::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/eval");
    let cases = CaseFile::load(&dir.join("cases.json"))?;
    let oracle = Oracle::load(&dir.join("oracle.json"))?;
    let opts = EvalOptions {
        ks: vec![1, 3, 5],
        ..EvalOptions::default()
    };
    let report = evaluate(&cases, &oracle, &opts)?;
    print!("{}", report.to_table());
    for case in &report.cases {
        println!(
            "{}  {}  AP@5 {:.3}",
            case.case_id,
            case.query.as_deref().unwrap_or("-"),
            case.average_precision.last().copied().unwrap_or(0.0)
        );
    }
    Ok(())
}
