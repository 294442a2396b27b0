//! Grading a generated bibliography against ground truth with the
//! six-category scheme: PM, WP, NF, IM, IA, CM. The bundled candidate file
//! plants exactly one defect per category.
//!
//! ```text
//! cargo run --example evaluate
//! ```
//!
//! The same report is available from the CLI:
//!
//! ```text
//! mcp-dblp evaluate --truth fixtures/eval/truth.bib \
//!     --candidate fixtures/eval/candidate.bib --format text
//! ```

use std::path::Path;

use mcp_dblp::evaluator::{evaluate_files, render_text};

fn main() -> anyhow::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/eval");
    let report = evaluate_files(&fixtures.join("truth.bib"), &fixtures.join("candidate.bib"))?;
    print!("{}", render_text(&report));
    Ok(())
}
