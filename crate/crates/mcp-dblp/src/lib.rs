//! DBLP bibliography access for MCP clients, with unmediated BibTeX export.
//!
//! The crate is a library first; the `mcp-dblp` binary is a thin shell that
//! wires [`tools::Toolbox`] into [`transport::Server`] on stdio and adds the
//! `evaluate` subcommand. Start with the runnable examples, every one of
//! them works offline against the recorded fixtures in `fixtures/`:
//!
//! ```text
//! examples/
//! ├── boolean_search.rs       # and/or queries, year windows, venue aliases
//! ├── fuzzy_title_search.rs   # similarity-ranked title matching
//! ├── author_publications.rs  # name-variant tolerant author lookup
//! ├── venue_info.rs           # venue acronym resolution
//! ├── statistics.rs           # totals, year range, top authors/venues
//! ├── similarity.rs           # the gestalt ratio on its own
//! ├── collection_export.rs    # stage records, write a byte-exact .bib
//! ├── evaluate.rs             # grade a bibliography in six categories
//! └── jsonrpc_session.rs      # raw MCP frames over the wire
//! ```
//!
//! ```bash
//! cargo run --example boolean_search
//! cargo run --example collection_export
//! cargo run --example jsonrpc_session
//! ```
//!
//! Module map:
//!
//! - [`client`] speaks DBLP's search and BibTeX endpoints: 10 s timeout,
//!   request spacing, response cache, fixture-friendly base URL override.
//! - [`query`] layers boolean parsing, fuzzy title ranking and author
//!   resolution on top, all built on [`similarity`].
//! - [`statistics`] aggregates result sets.
//! - [`bibliography`] is the collection ("cart") plus the lenient BibTeX
//!   reader; staged entries keep DBLP's bytes, only citation keys change.
//! - [`transport`] is the JSON-RPC 2.0 / MCP stdio server frame.
//! - [`tools`] binds the eight MCP tools to all of the above.
//! - [`evaluator`] compares a generated .bib against ground truth.
//! - [`testkit`] replays recorded HTTP fixtures so tests never leave
//!   localhost.

pub mod bibliography;
pub mod client;
pub mod evaluator;
pub mod query;
pub mod statistics;
pub mod testkit;
pub mod tools;
pub mod transport;

pub use client::{ClientConfig, DblpClient, DblpError, Publication};
pub use query::{parse_boolean, similarity, BooleanQuery, SearchFilter, SimilarityScore};
pub use tools::Toolbox;
pub use transport::{Prompt, Server, ToolDescriptor, ToolHandler, ToolResult};
