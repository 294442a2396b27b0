//! The unmediated export path: records are staged by DBLP key and written
//! to disk byte-for-byte as DBLP serves them. The only thing a caller ever
//! sees is a confirmation string and, at the end, a path.
//!
//! ```text
//! cargo run --example collection_export
//! ```

use std::path::Path;

use mcp_dblp::bibliography::{add_bibtex_entry, export_bibtex, Collection};
use mcp_dblp::testkit::{serve_fixtures, FixtureScript};
use mcp_dblp::{ClientConfig, DblpClient};

fn main() -> anyhow::Result<()> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifest.json");
    let server = serve_fixtures(FixtureScript::from_manifest(manifest)?, 0)?;
    let client = DblpClient::new(ClientConfig::with_base_url(server.base_url()));

    let mut collection = Collection::new();
    for (dblp_key, citation_key) in [
        ("conf/nips/VaswaniSPUJGKP17", "vaswani2017"),
        ("journals/tods/MullerO21", "muller2021"),
        ("conf/ijcai/NguyenT20", "nguyen2020"),
    ] {
        let confirmation = add_bibtex_entry(&mut collection, &client, dblp_key, citation_key)?;
        println!("{confirmation}");
    }

    let target = std::env::temp_dir().join("collection_export_example.bib");
    let (path, count) = export_bibtex(&collection, &target)?;
    println!("wrote {count} entries to {}", path.display());

    // The file carries DBLP's bytes untouched, non-ASCII author names
    // included; only the citation keys were rewritten.
    let written = std::fs::read_to_string(&path)?;
    assert!(written.contains("@inproceedings{vaswani2017,"));
    assert!(written.contains("Søren Østergaard"));
    assert!(written.contains("Nguyễn Văn Thành"));
    println!("\nfirst lines of the export:");
    for line in written.lines().take(6) {
        println!("  {line}");
    }
    std::fs::remove_file(&path).ok();
    Ok(())
}
