//! Author lookup that tolerates name variants: the query 'don knuth'
//! resolves to DBLP's canonical 'Donald E. Knuth' before publications are
//! collected.
//!
//! ```text
//! cargo run --example author_publications
//! ```

use std::path::Path;

use mcp_dblp::query::get_author_publications;
use mcp_dblp::testkit::{serve_fixtures, FixtureScript};
use mcp_dblp::{ClientConfig, DblpClient, SimilarityScore};

fn main() -> anyhow::Result<()> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifest.json");
    let server = serve_fixtures(FixtureScript::from_manifest(manifest)?, 0)?;
    let client = DblpClient::new(ClientConfig::with_base_url(server.base_url()));

    let publications =
        get_author_publications("don knuth", SimilarityScore::new(0.7)?, 20, &client)?;
    println!("publications for 'don knuth':");
    for p in &publications {
        println!(
            "  [{}] {} ({})",
            p.dblp_key,
            p.title,
            p.year.map_or("?".into(), |y| y.to_string())
        );
    }

    // Phantom co-author hits are filtered out: results whose author list
    // does not actually contain the resolved name never make it through.
    assert!(publications
        .iter()
        .all(|p| p.authors.iter().any(|a| a == "Donald E. Knuth")));
    println!("every hit really lists Donald E. Knuth as an author");
    Ok(())
}
