//! Aggregates over a result set: totals, year range, top authors, top
//! venues. The input is whatever an earlier search returned.
//!
//! ```text
//! cargo run --example statistics
//! ```

use std::path::Path;

use mcp_dblp::query::execute_search;
use mcp_dblp::statistics::calculate_statistics;
use mcp_dblp::testkit::{serve_fixtures, FixtureScript};
use mcp_dblp::{parse_boolean, ClientConfig, DblpClient, SearchFilter};

fn main() -> anyhow::Result<()> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifest.json");
    let server = serve_fixtures(FixtureScript::from_manifest(manifest)?, 0)?;
    let client = DblpClient::new(ClientConfig::with_base_url(server.base_url()));

    let query = parse_boolean("neural attention")?;
    let filter = SearchFilter {
        year_min: None,
        year_max: None,
        venue: None,
        max_results: 20,
    };
    let publications = execute_search(&query, &filter, &client)?;

    let report = calculate_statistics(&publications, 5);
    println!("total: {}", report.total);
    match report.year_range {
        Some((min, max)) => println!("years: {min}-{max}"),
        None => println!("years: none recorded"),
    }
    println!("top authors:");
    for (name, count) in &report.top_authors {
        println!("  {count}x {name}");
    }
    println!("top venues:");
    for (name, count) in &report.top_venues {
        println!("  {count}x {name}");
    }
    Ok(())
}
