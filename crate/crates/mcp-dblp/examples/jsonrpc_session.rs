//! A complete MCP session on the wire: newline-delimited JSON-RPC frames
//! into the server, responses back out, exactly what an MCP client such as
//! Claude Desktop exchanges over stdio. Search, stage two records, export.
//!
//! ```text
//! cargo run --example jsonrpc_session
//! ```

use std::io::Cursor;
use std::path::Path;

use serde_json::json;

use mcp_dblp::testkit::{serve_fixtures, FixtureScript};
use mcp_dblp::tools::{prompts, Toolbox};
use mcp_dblp::{ClientConfig, DblpClient, Server};

fn main() -> anyhow::Result<()> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/manifest.json");
    let fixture = serve_fixtures(FixtureScript::from_manifest(manifest)?, 0)?;
    let client = DblpClient::new(ClientConfig::with_base_url(fixture.base_url()));
    let server = Server::new(Toolbox::new(client)).with_prompts(prompts());

    let bib_path = std::env::temp_dir().join("jsonrpc_session_example.bib");
    let requests = [
        json!({"jsonrpc": "2.0", "id": 1, "method": "initialize",
               "params": {"protocolVersion": "2024-11-05", "capabilities": {},
                          "clientInfo": {"name": "example", "version": "0"}}}),
        json!({"jsonrpc": "2.0", "method": "notifications/initialized"}),
        json!({"jsonrpc": "2.0", "id": 2, "method": "tools/call",
               "params": {"name": "search",
                          "arguments": {"query": "neural attention"}}}),
        json!({"jsonrpc": "2.0", "id": 3, "method": "tools/call",
               "params": {"name": "add_bibtex_entry",
                          "arguments": {"dblp_key": "conf/nips/VaswaniSPUJGKP17",
                                        "citation_key": "vaswani2017"}}}),
        json!({"jsonrpc": "2.0", "id": 4, "method": "tools/call",
               "params": {"name": "add_bibtex_entry",
                          "arguments": {"dblp_key": "conf/naacl/DevlinCLT19",
                                        "citation_key": "devlin2019"}}}),
        json!({"jsonrpc": "2.0", "id": 5, "method": "tools/call",
               "params": {"name": "export_bibtex",
                          "arguments": {"path": bib_path.to_str().unwrap()}}}),
    ];
    let input: String = requests.iter().map(|r| format!("{r}\n")).collect();

    let mut output = Vec::new();
    server.run(Cursor::new(input), &mut output)?;

    for line in String::from_utf8(output)?.lines() {
        let frame: serde_json::Value = serde_json::from_str(line)?;
        match frame["result"]["content"][0]["text"].as_str() {
            Some(text) => {
                println!("<- id {}:", frame["id"]);
                for l in text.lines() {
                    println!("   {l}");
                }
            }
            None => println!("<- {frame}"),
        }
    }

    let exported = std::fs::read_to_string(&bib_path)?;
    println!(
        "\nexported file has {} entries, {} bytes",
        exported.matches('@').count(),
        exported.len()
    );
    std::fs::remove_file(&bib_path).ok();
    Ok(())
}
