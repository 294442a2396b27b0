//! The eight DBLP tools exposed over MCP.
//!
//! Each handler turns validated JSON arguments into calls against the
//! domain modules and renders plain-text results for the LLM client. The
//! one piece of state is the staging collection shared by
//! `add_bibtex_entry` and `export_bibtex`; everything else is stateless.

use std::cell::{Ref, RefCell};
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::bibliography::{self, Collection};
use crate::client::{DblpClient, Publication};
use crate::query::{
    execute_search, fuzzy_title_search, get_author_publications, get_venue_info, parse_boolean,
    SearchFilter, SimilarityScore,
};
use crate::statistics::{calculate_statistics, StatsReport, DEFAULT_TOP_K};
use crate::transport::{Prompt, ToolDescriptor, ToolHandler, ToolResult};

pub const TOOL_NAMES: [&str; 8] = [
    "get_instructions",
    "search",
    "fuzzy_title_search",
    "get_author_publications",
    "get_venue_info",
    "calculate_statistics",
    "add_bibtex_entry",
    "export_bibtex",
];

pub const DEFAULT_MAX_RESULTS: usize = 20;
pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.7;

/// Usage guide returned by `get_instructions` and the `instructions` prompt.
pub const INSTRUCTIONS: &str = "\
This server gives you conversational access to the DBLP computer science
bibliography. Call get_instructions once per session; the other seven tools
do the actual work.

Finding publications:
- search runs boolean queries against DBLP's index. Join terms with 'and'
  for conjunction and 'or' for alternatives ('graph and neural or
  transformer'). Optional filters: max_results, year_min, year_max, and
  venue_filter (colloquial venue names like 'nips' are understood).
- fuzzy_title_search finds a paper whose exact wording you are unsure of.
  It ranks candidates by similarity to your title and drops everything
  below similarity_threshold (0.7 by default; raise it to 0.9 when you
  believe you know the title).
- get_author_publications lists what an author published, resolving name
  variants ('Don Knuth' finds 'Donald E. Knuth'). similarity_threshold
  controls how close a DBLP author name must be to your query.
- get_venue_info resolves a venue name or acronym to what DBLP knows
  about it.
- calculate_statistics computes totals, year range and top author/venue
  rankings over a list of publications you pass back from earlier results.

Result lines look like: 'N. [dblp_key] Title by Authors (Venue Year)'.
The dblp_key in brackets is the handle you need for exporting.

Exporting BibTeX, the part you must not improvise: never write BibTeX
entries yourself and never copy them from memory. Instead:
1. add_bibtex_entry(dblp_key, citation_key) fetches the official record
   from DBLP and stages it server-side under your citation_key. You only
   get a short confirmation back; the BibTeX itself never enters the
   conversation, which is exactly what keeps it uncorrupted.
2. export_bibtex(path) writes every staged record to the given .bib file
   verbatim and reports the absolute path and entry count.

Citation keys must be unique; adding the same key twice is an error. The
collection lives for the whole session, so you can add entries across
several searches, then export once at the end.";

pub struct Toolbox {
    client: DblpClient,
    collection: RefCell<Collection>,
}

impl Toolbox {
    pub fn new(client: DblpClient) -> Self {
        Toolbox {
            client,
            collection: RefCell::new(Collection::new()),
        }
    }

    pub fn from_env() -> Self {
        Self::new(DblpClient::from_env())
    }

    pub fn client(&self) -> &DblpClient {
        &self.client
    }

    pub fn collection(&self) -> Ref<'_, Collection> {
        self.collection.borrow()
    }

    fn tool_search(&self, args: &Map<String, Value>) -> Result<String, String> {
        let query_text = require_str(args, "query")?;
        let query = parse_boolean(query_text).map_err(|e| e.to_string())?;
        let filter = filter_from_args(args)?;
        let publications =
            execute_search(&query, &filter, &self.client).map_err(|e| e.to_string())?;
        Ok(render_publications(&publications))
    }

    fn tool_fuzzy_title_search(&self, args: &Map<String, Value>) -> Result<String, String> {
        let title = require_str(args, "title")?;
        let threshold = threshold_from_args(args)?;
        let filter = filter_from_args(args)?;
        let scored = fuzzy_title_search(title, threshold, &filter, &self.client)
            .map_err(|e| e.to_string())?;
        Ok(render_scored_publications(&scored))
    }

    fn tool_get_author_publications(&self, args: &Map<String, Value>) -> Result<String, String> {
        let author = require_str(args, "author")?;
        let threshold = threshold_from_args(args)?;
        let max_results = max_results_from_args(args)?;
        let publications = get_author_publications(author, threshold, max_results, &self.client)
            .map_err(|e| e.to_string())?;
        Ok(render_publications(&publications))
    }

    fn tool_get_venue_info(&self, args: &Map<String, Value>) -> Result<String, String> {
        let venue = require_str(args, "venue")?;
        match get_venue_info(venue, &self.client).map_err(|e| e.to_string())? {
            Some(hit) => {
                let mut out = format!("venue: {}", hit.name);
                if let Some(acronym) = &hit.acronym {
                    out.push_str(&format!("\nacronym: {acronym}"));
                }
                if let Some(url) = &hit.url {
                    out.push_str(&format!("\nurl: {url}"));
                }
                Ok(out)
            }
            None => Ok(format!("No venue found matching '{venue}'.")),
        }
    }

    fn tool_calculate_statistics(&self, args: &Map<String, Value>) -> Result<String, String> {
        let items = args
            .get("publications")
            .and_then(Value::as_array)
            .ok_or("missing required parameter 'publications'")?;
        let publications: Vec<Publication> =
            serde_json::from_value(Value::Array(items.clone())).map_err(|e| {
                format!("parameter 'publications' must hold publication objects: {e}")
            })?;
        let top_k = match optional_usize(args, "top_k")? {
            Some(0) => return Err("parameter 'top_k' must be at least 1".to_owned()),
            Some(k) => k,
            None => DEFAULT_TOP_K,
        };
        Ok(render_statistics(&calculate_statistics(
            &publications,
            top_k,
        )))
    }

    fn tool_add_bibtex_entry(&self, args: &Map<String, Value>) -> Result<String, String> {
        let dblp_key = require_str(args, "dblp_key")?;
        let citation_key = require_str(args, "citation_key")?;
        let mut collection = self.collection.borrow_mut();
        bibliography::add_bibtex_entry(&mut collection, &self.client, dblp_key, citation_key)
            .map_err(|e| e.to_string())
    }

    fn tool_export_bibtex(&self, args: &Map<String, Value>) -> Result<String, String> {
        let path = require_str(args, "path")?;
        let collection = self.collection.borrow();
        let (absolute, count) =
            bibliography::export_bibtex(&collection, Path::new(path)).map_err(|e| e.to_string())?;
        let noun = if count == 1 { "entry" } else { "entries" };
        Ok(format!("({count} {noun}) {}", absolute.display()))
    }
}

impl ToolHandler for Toolbox {
    fn descriptors(&self) -> Vec<ToolDescriptor> {
        descriptors()
    }

    fn invoke(&self, name: &str, arguments: &Map<String, Value>) -> ToolResult {
        let outcome = match name {
            "get_instructions" => Ok(INSTRUCTIONS.to_owned()),
            "search" => self.tool_search(arguments),
            "fuzzy_title_search" => self.tool_fuzzy_title_search(arguments),
            "get_author_publications" => self.tool_get_author_publications(arguments),
            "get_venue_info" => self.tool_get_venue_info(arguments),
            "calculate_statistics" => self.tool_calculate_statistics(arguments),
            "add_bibtex_entry" => self.tool_add_bibtex_entry(arguments),
            "export_bibtex" => self.tool_export_bibtex(arguments),
            other => Err(format!("unknown tool: {other}")),
        };
        match outcome {
            Ok(text) => ToolResult::ok(text),
            Err(message) => ToolResult::error(message),
        }
    }
}

/// Prompt surface: the same usage guide, reachable via `prompts/get`.
pub fn prompts() -> Vec<Prompt> {
    vec![Prompt {
        name: "instructions".to_owned(),
        description: "How to search DBLP and export uncorrupted BibTeX".to_owned(),
        text: INSTRUCTIONS.to_owned(),
    }]
}

pub fn descriptors() -> Vec<ToolDescriptor> {
    let no_params = json!({"type": "object", "properties": {}, "required": []});
    let year_min = json!({"type": "integer", "description": "Keep publications from this year on"});
    let year_max = json!({"type": "integer", "description": "Keep publications up to this year"});
    let venue_filter = json!({"type": "string", "description": "Venue name, acronym or colloquial alias (e.g. 'nips')"});
    let max_results = json!({"type": "integer", "description": "Result cap, default 20"});
    let similarity_threshold = json!({"type": "number", "description": "Minimum similarity in [0, 1], default 0.7"});
    vec![
        ToolDescriptor::new(
            "get_instructions",
            "Returns usage instructions for this DBLP server. Call this first.",
            no_params.clone(),
        ),
        ToolDescriptor::new(
            "search",
            "Boolean search over DBLP publications ('quantum and computing', 'sat or smt') with optional year and venue filters.",
            json!({
                "type": "object",
                "properties": {
                    "query": {"type": "string", "description": "Terms joined by 'and' / 'or'"},
                    "max_results": max_results,
                    "year_min": year_min,
                    "year_max": year_max,
                    "venue_filter": venue_filter,
                },
                "required": ["query"],
            }),
        ),
        ToolDescriptor::new(
            "fuzzy_title_search",
            "Finds publications whose title approximately matches, ranked by similarity score.",
            json!({
                "type": "object",
                "properties": {
                    "title": {"type": "string", "description": "The title as you remember it"},
                    "similarity_threshold": similarity_threshold.clone(),
                    "max_results": max_results,
                    "year_min": year_min,
                    "year_max": year_max,
                    "venue_filter": venue_filter,
                },
                "required": ["title"],
            }),
        ),
        ToolDescriptor::new(
            "get_author_publications",
            "Lists a researcher's publications, tolerating name variants via fuzzy matching.",
            json!({
                "type": "object",
                "properties": {
                    "author": {"type": "string", "description": "Author name, variants welcome"},
                    "similarity_threshold": similarity_threshold,
                    "max_results": max_results,
                },
                "required": ["author"],
            }),
        ),
        ToolDescriptor::new(
            "get_venue_info",
            "Resolves a venue name or acronym to DBLP's venue record.",
            json!({
                "type": "object",
                "properties": {
                    "venue": {"type": "string", "description": "Venue name or acronym"},
                },
                "required": ["venue"],
            }),
        ),
        ToolDescriptor::new(
            "calculate_statistics",
            "Computes totals, year range and top author/venue rankings over publications from earlier results.",
            json!({
                "type": "object",
                "properties": {
                    "publications": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "properties": {
                                "dblp_key": {"type": "string"},
                                "title": {"type": "string"},
                                "authors": {"type": "array", "items": {"type": "string"}},
                                "venue": {"type": "string"},
                                "year": {"type": "integer"},
                                "doi": {"type": "string"},
                            },
                        },
                        "description": "Publication objects with authors, venue and year",
                    },
                    "top_k": {"type": "integer", "description": "Length of the top lists, default 10"},
                },
                "required": ["publications"],
            }),
        ),
        ToolDescriptor::new(
            "add_bibtex_entry",
            "Fetches the official BibTeX record for a dblp_key and stages it server-side under citation_key. Returns a confirmation, never the record.",
            json!({
                "type": "object",
                "properties": {
                    "dblp_key": {"type": "string", "description": "DBLP key, e.g. conf/nips/VaswaniSPUJGKP17"},
                    "citation_key": {"type": "string", "description": "Key the entry gets in your .bib file"},
                },
                "required": ["dblp_key", "citation_key"],
            }),
        ),
        ToolDescriptor::new(
            "export_bibtex",
            "Writes all staged entries to a .bib file verbatim and reports the absolute path and count.",
            json!({
                "type": "object",
                "properties": {
                    "path": {"type": "string", "description": "Target .bib file path"},
                },
                "required": ["path"],
            }),
        ),
    ]
}

fn require_str<'a>(args: &'a Map<String, Value>, name: &str) -> Result<&'a str, String> {
    match args.get(name) {
        None | Some(Value::Null) => Err(format!("missing required parameter '{name}'")),
        Some(value) => value
            .as_str()
            .ok_or_else(|| format!("parameter '{name}' must be a string")),
    }
}

fn optional_usize(args: &Map<String, Value>, name: &str) -> Result<Option<usize>, String> {
    match args.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(value) => {
            let as_int = value
                .as_i64()
                .or_else(|| value.as_f64().map(|f| f as i64));
            match as_int {
                Some(n) if n >= 0 => Ok(Some(n as usize)),
                _ => Err(format!("parameter '{name}' must be a non-negative integer")),
            }
        }
    }
}

fn optional_i32(args: &Map<String, Value>, name: &str) -> Result<Option<i32>, String> {
    match args.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(value) => value
            .as_i64()
            .or_else(|| value.as_f64().map(|f| f as i64))
            .map(|n| Some(n as i32))
            .ok_or_else(|| format!("parameter '{name}' must be an integer")),
    }
}

fn max_results_from_args(args: &Map<String, Value>) -> Result<usize, String> {
    match optional_usize(args, "max_results")? {
        Some(0) => Err("parameter 'max_results' must be at least 1".to_owned()),
        Some(n) => Ok(n),
        None => Ok(DEFAULT_MAX_RESULTS),
    }
}

fn threshold_from_args(args: &Map<String, Value>) -> Result<SimilarityScore, String> {
    let raw = match args.get("similarity_threshold") {
        None | Some(Value::Null) => DEFAULT_SIMILARITY_THRESHOLD,
        Some(value) => value
            .as_f64()
            .ok_or("parameter 'similarity_threshold' must be a number")?,
    };
    SimilarityScore::new(raw)
        .map_err(|_| format!("parameter 'similarity_threshold' must be within [0, 1], got {raw}"))
}

fn filter_from_args(args: &Map<String, Value>) -> Result<SearchFilter, String> {
    let year_min = optional_i32(args, "year_min")?;
    let year_max = optional_i32(args, "year_max")?;
    if let (Some(min), Some(max)) = (year_min, year_max) {
        if min > max {
            return Err(format!(
                "parameter 'year_min' ({min}) must not exceed 'year_max' ({max})"
            ));
        }
    }
    Ok(SearchFilter {
        year_min,
        year_max,
        venue: args
            .get("venue_filter")
            .and_then(Value::as_str)
            .map(str::to_owned),
        max_results: max_results_from_args(args)?,
    })
}

/// One numbered line per publication; the bracketed dblp_key is what
/// add_bibtex_entry expects back.
pub fn render_publications(publications: &[Publication]) -> String {
    if publications.is_empty() {
        return "No results.".to_owned();
    }
    publications
        .iter()
        .enumerate()
        .map(|(index, p)| format!("{}. {}", index + 1, render_one(p)))
        .collect::<Vec<_>>()
        .join("\n")
}

fn render_scored_publications(scored: &[(Publication, SimilarityScore)]) -> String {
    if scored.is_empty() {
        return "No results.".to_owned();
    }
    scored
        .iter()
        .enumerate()
        .map(|(index, (p, score))| {
            format!("{}. (score {:.2}) {}", index + 1, score.value(), render_one(p))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn render_one(p: &Publication) -> String {
    let mut line = format!("[{}] {}", p.dblp_key, p.title);
    if !p.authors.is_empty() {
        line.push_str(&format!(" by {}", p.authors.join("; ")));
    }
    match (&p.venue, p.year) {
        (Some(venue), Some(year)) => line.push_str(&format!(" ({venue} {year})")),
        (Some(venue), None) => line.push_str(&format!(" ({venue})")),
        (None, Some(year)) => line.push_str(&format!(" ({year})")),
        (None, None) => {}
    }
    if let Some(doi) = &p.doi {
        line.push_str(&format!(" doi:{doi}"));
    }
    line
}

fn render_statistics(report: &StatsReport) -> String {
    let mut out = format!("total publications: {}", report.total);
    match report.year_range {
        Some((min, max)) => out.push_str(&format!("\nyear range: {min}-{max}")),
        None => out.push_str("\nyear range: none"),
    }
    if !report.top_authors.is_empty() {
        out.push_str("\ntop authors:");
        for (index, (name, count)) in report.top_authors.iter().enumerate() {
            out.push_str(&format!("\n  {}. {} ({})", index + 1, name, count));
        }
    }
    if !report.top_venues.is_empty() {
        out.push_str("\ntop venues:");
        for (index, (name, count)) in report.top_venues.iter().enumerate() {
            out.push_str(&format!("\n  {}. {} ({})", index + 1, name, count));
        }
    }
    out
}
