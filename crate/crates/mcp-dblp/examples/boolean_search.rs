//! Boolean search with and/or grouping, year windows and venue aliases.
//!
//! Runs entirely against the recorded fixtures:
//!
//! ```text
//! cargo run --example boolean_search
//! ```

use std::path::Path;

use mcp_dblp::query::execute_search;
use mcp_dblp::testkit::{serve_fixtures, FixtureScript};
use mcp_dblp::{parse_boolean, ClientConfig, DblpClient, SearchFilter};

fn main() -> anyhow::Result<()> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifest.json");
    let server = serve_fixtures(FixtureScript::from_manifest(manifest)?, 0)?;
    let client = DblpClient::new(ClientConfig::with_base_url(server.base_url()));

    // 'and' binds terms into one group, 'or' separates alternatives that are
    // queried independently and merged without duplicates.
    let query = parse_boolean("transformer and attention or bert")?;
    println!("groups: {:?}", query.groups);

    let filter = SearchFilter {
        year_min: Some(2015),
        year_max: None,
        venue: None,
        max_results: 20,
    };
    let results = execute_search(&query, &filter, &client)?;
    println!("{} results since 2015:", results.len());
    for p in &results {
        println!(
            "  [{}] {} ({} {})",
            p.dblp_key,
            p.title,
            p.venue.as_deref().unwrap_or("?"),
            p.year.map_or("?".into(), |y| y.to_string()),
        );
    }

    // The venue filter understands colloquial names; 'nips' expands to the
    // NeurIPS/NIPS spellings DBLP actually uses.
    let venue_filter = SearchFilter {
        venue: Some("nips".to_owned()),
        ..filter
    };
    let at_nips = execute_search(&query, &venue_filter, &client)?;
    println!("restricted to nips: {} result(s)", at_nips.len());
    for p in &at_nips {
        println!("  [{}] {}", p.dblp_key, p.title);
    }
    Ok(())
}
