//! Venue resolution: acronym in, canonical DBLP venue record out.
//!
//! ```text
//! cargo run --example venue_info
//! ```

use std::path::Path;

use mcp_dblp::query::get_venue_info;
use mcp_dblp::testkit::{serve_fixtures, FixtureScript};
use mcp_dblp::{ClientConfig, DblpClient};

fn main() -> anyhow::Result<()> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifest.json");
    let server = serve_fixtures(FixtureScript::from_manifest(manifest)?, 0)?;
    let client = DblpClient::new(ClientConfig::with_base_url(server.base_url()));

    match get_venue_info("neurips", &client)? {
        Some(venue) => {
            println!("name:    {}", venue.name);
            println!("acronym: {}", venue.acronym.as_deref().unwrap_or("-"));
            println!("url:     {}", venue.url.as_deref().unwrap_or("-"));
        }
        None => println!("no venue found"),
    }
    Ok(())
}
