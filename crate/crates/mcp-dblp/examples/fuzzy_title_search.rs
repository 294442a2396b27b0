//! Finding a paper whose title you only half-remember.
//!
//! ```text
//! cargo run --example fuzzy_title_search
//! ```

use std::path::Path;

use mcp_dblp::query::fuzzy_title_search;
use mcp_dblp::testkit::{serve_fixtures, FixtureScript};
use mcp_dblp::{ClientConfig, DblpClient, SearchFilter, SimilarityScore};

fn main() -> anyhow::Result<()> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifest.json");
    let server = serve_fixtures(FixtureScript::from_manifest(manifest)?, 0)?;
    let client = DblpClient::new(ClientConfig::with_base_url(server.base_url()));

    let remembered = "Attention Is All You Need";
    let filter = SearchFilter {
        year_min: None,
        year_max: None,
        venue: None,
        max_results: 10,
    };

    // A permissive threshold keeps near misses around for inspection.
    for threshold in [0.35, 0.9] {
        let ranked = fuzzy_title_search(
            remembered,
            SimilarityScore::new(threshold)?,
            &filter,
            &client,
        )?;
        println!("threshold {threshold}: {} candidate(s)", ranked.len());
        for (p, score) in &ranked {
            println!("  {:.3}  [{}] {}", score.value(), p.dblp_key, p.title);
        }
    }
    Ok(())
}
