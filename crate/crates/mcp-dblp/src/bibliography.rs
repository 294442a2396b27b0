//! BibTeX staging collection with verbatim export.
//!
//! The whole point of this module is what it does NOT do: fetched records
//! are never reformatted, re-escaped or round-tripped through a parser on
//! their way to disk. The single permitted mutation is splicing a new
//! citation key into the first entry header; every other byte of the DBLP
//! export is preserved. The field parser below exists only for reading
//! (statistics, evaluation), never for writing.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::client::{DblpClient, DblpError};

#[derive(Debug, Error)]
pub enum BibError {
    #[error("malformed BibTeX entry: {0}")]
    MalformedEntry(String),
    #[error("invalid citation key '{key}': keys must be non-empty without whitespace, commas or braces")]
    KeyFormat { key: String },
    #[error("citation key '{key}' is already in the collection")]
    DuplicateKey { key: String },
    #[error("collection is empty, nothing to export")]
    EmptyCollection,
    #[error("could not write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Fetch(#[from] DblpError),
}

/// One staged record. `raw` is the byte-verbatim DBLP export with only the
/// first header key rewritten to `citation_key`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibEntry {
    pub raw: String,
    pub entry_type: String,
    pub citation_key: String,
    /// DBLP key the record was fetched under.
    pub source_key: String,
}

/// Insertion-ordered set of staged entries, keyed by citation key.
#[derive(Debug, Default)]
pub struct Collection {
    entries: Vec<BibEntry>,
    keys: HashSet<String>,
}

impl Collection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_key(&self, citation_key: &str) -> bool {
        self.keys.contains(citation_key)
    }

    pub fn entries(&self) -> &[BibEntry] {
        &self.entries
    }

    pub fn add(&mut self, entry: BibEntry) -> Result<(), BibError> {
        if !self.keys.insert(entry.citation_key.clone()) {
            return Err(BibError::DuplicateKey {
                key: entry.citation_key,
            });
        }
        self.entries.push(entry);
        Ok(())
    }
}

fn header_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // First `@type{key,` header; capture 2 is the key span that gets spliced.
    RE.get_or_init(|| Regex::new(r"@\s*([A-Za-z][A-Za-z0-9]*)\s*\{\s*([^,\s{}]+)\s*,").unwrap())
}

fn validate_citation_key(key: &str) -> Result<(), BibError> {
    let bad = key.is_empty()
        || key.contains(char::is_whitespace)
        || key.contains([',', '{', '}', '\\', '"'])
        || key.contains(char::is_control);
    if bad {
        return Err(BibError::KeyFormat {
            key: key.to_owned(),
        });
    }
    Ok(())
}

/// Replaces the citation key of the FIRST entry header in `raw` and returns
/// the new text. Any trailing entries (DBLP crossref companions such as the
/// `@proceedings` record appended to conference papers) keep their keys.
pub fn replace_key(raw: &str, new_key: &str) -> Result<String, BibError> {
    validate_citation_key(new_key)?;
    let captures = header_regex()
        .captures(raw)
        .ok_or_else(|| BibError::MalformedEntry("no @type{key,...} header found".to_owned()))?;
    let key_span = captures.get(2).expect("regex has two groups");
    let mut out = String::with_capacity(raw.len() + new_key.len());
    out.push_str(&raw[..key_span.start()]);
    out.push_str(new_key);
    out.push_str(&raw[key_span.end()..]);
    Ok(out)
}

/// Entry type (lowercased) and citation key of the first header.
pub fn read_header(raw: &str) -> Result<(String, String), BibError> {
    let captures = header_regex()
        .captures(raw)
        .ok_or_else(|| BibError::MalformedEntry("no @type{key,...} header found".to_owned()))?;
    Ok((
        captures[1].to_lowercase(),
        captures[2].to_owned(),
    ))
}

/// Fetches `dblp_key`, rewrites the key and stages the record. Returns a
/// short confirmation; the record body itself stays out of the return value
/// by design (the caller is an LLM that must never see, and thus never
/// corrupt, the BibTeX bytes).
pub fn add_bibtex_entry(
    collection: &mut Collection,
    client: &DblpClient,
    dblp_key: &str,
    citation_key: &str,
) -> Result<String, BibError> {
    validate_citation_key(citation_key)?;
    if collection.contains_key(citation_key) {
        return Err(BibError::DuplicateKey {
            key: citation_key.to_owned(),
        });
    }
    let fetched = client.fetch_bibtex(dblp_key)?;
    let raw = replace_key(&fetched, citation_key)?;
    let (entry_type, _) = read_header(&raw)?;
    collection.add(BibEntry {
        raw,
        entry_type,
        citation_key: citation_key.to_owned(),
        source_key: dblp_key.to_owned(),
    })?;
    Ok(format!(
        "added {citation_key} from {dblp_key} ({} in collection)",
        count_phrase(collection.len())
    ))
}

fn count_phrase(n: usize) -> String {
    if n == 1 {
        "1 entry".to_owned()
    } else {
        format!("{n} entries")
    }
}

/// Writes all staged entries to `path` in insertion order, separated by
/// exactly one blank line, file newline-terminated. Overwrites an existing
/// file; fails without creating anything when the parent directory is
/// missing. Returns the absolute path and the entry count.
pub fn export_bibtex(
    collection: &Collection,
    path: &Path,
) -> Result<(PathBuf, usize), BibError> {
    if collection.is_empty() {
        return Err(BibError::EmptyCollection);
    }
    let absolute = if path.is_absolute() {
        path.to_path_buf()
    } else {
        match std::env::current_dir() {
            Ok(cwd) => cwd.join(path),
            Err(_) => path.to_path_buf(),
        }
    };
    let mut out = String::new();
    for (index, entry) in collection.entries().iter().enumerate() {
        if index > 0 {
            out.push('\n');
        }
        out.push_str(&entry.raw);
        if !entry.raw.ends_with('\n') {
            out.push('\n');
        }
    }
    std::fs::write(&absolute, out.as_bytes()).map_err(|source| BibError::Io {
        path: absolute.clone(),
        source,
    })?;
    Ok((absolute, collection.len()))
}

/// Top-level fields of the FIRST entry in `raw`: lowercased names paired
/// with verbatim value text. Braced values lose only the outermost braces;
/// quoted values the quotes; bare values are trimmed. Inner braces, LaTeX
/// escapes, newlines and padding survive untouched.
pub fn parse_fields(raw: &str) -> Result<Vec<(String, String)>, BibError> {
    let captures = header_regex()
        .captures(raw)
        .ok_or_else(|| BibError::MalformedEntry("no @type{key,...} header found".to_owned()))?;
    let full = captures.get(0).expect("whole match");
    let bytes = raw.as_bytes();
    let mut i = full.end();
    let mut fields = Vec::new();
    loop {
        i = skip_separators(bytes, i);
        let Some(&c) = bytes.get(i) else {
            return Err(BibError::MalformedEntry(
                "entry ends before its closing brace".to_owned(),
            ));
        };
        if c == b'}' {
            return Ok(fields);
        }
        let name_start = i;
        while bytes
            .get(i)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_' || *b == b'-')
        {
            i += 1;
        }
        if i == name_start {
            return Err(BibError::MalformedEntry(format!(
                "expected field name at byte {i}"
            )));
        }
        let name = raw[name_start..i].to_lowercase();
        i = skip_whitespace(bytes, i);
        if bytes.get(i) != Some(&b'=') {
            return Err(BibError::MalformedEntry(format!(
                "field '{name}' has no '='"
            )));
        }
        i = skip_whitespace(bytes, i + 1);
        let (value, next) = scan_value(raw, i)?;
        fields.push((name, value));
        i = next;
    }
}

fn skip_whitespace(bytes: &[u8], mut i: usize) -> usize {
    while bytes.get(i).is_some_and(|b| b.is_ascii_whitespace()) {
        i += 1;
    }
    i
}

fn skip_separators(bytes: &[u8], mut i: usize) -> usize {
    while bytes
        .get(i)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b',')
    {
        i += 1;
    }
    i
}

/// Scans one field value starting at `i`; returns the verbatim value text
/// and the offset just past it.
fn scan_value(raw: &str, i: usize) -> Result<(String, usize), BibError> {
    let bytes = raw.as_bytes();
    match bytes.get(i) {
        Some(b'{') => {
            let mut depth = 1usize;
            let mut j = i + 1;
            while let Some(&c) = bytes.get(j) {
                match c {
                    b'{' => depth += 1,
                    b'}' => {
                        depth -= 1;
                        if depth == 0 {
                            return Ok((raw[i + 1..j].to_owned(), j + 1));
                        }
                    }
                    _ => {}
                }
                j += 1;
            }
            Err(BibError::MalformedEntry(
                "unbalanced braces in field value".to_owned(),
            ))
        }
        Some(b'"') => {
            let mut depth = 0usize;
            let mut j = i + 1;
            while let Some(&c) = bytes.get(j) {
                match c {
                    b'{' => depth += 1,
                    b'}' => depth = depth.saturating_sub(1),
                    b'"' if depth == 0 => return Ok((raw[i + 1..j].to_owned(), j + 1)),
                    _ => {}
                }
                j += 1;
            }
            Err(BibError::MalformedEntry(
                "unterminated quoted field value".to_owned(),
            ))
        }
        Some(_) => {
            let mut j = i;
            while bytes
                .get(j)
                .is_some_and(|b| *b != b',' && *b != b'}' && *b != b'\n')
            {
                j += 1;
            }
            if j == i {
                return Err(BibError::MalformedEntry(format!(
                    "empty field value at byte {i}"
                )));
            }
            Ok((raw[i..j].trim().to_owned(), j))
        }
        None => Err(BibError::MalformedEntry(
            "entry ends inside a field value".to_owned(),
        )),
    }
}

/// Result of leniently splitting a .bib file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedItem {
    Entry(ParsedEntry),
    /// Segment starting at an `@` that did not scan as a full entry. The key
    /// is recovered from the header when one is present.
    Malformed {
        citation_key: Option<String>,
        error: String,
        raw: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedEntry {
    pub entry_type: String,
    pub citation_key: String,
    pub fields: Vec<(String, String)>,
    pub raw: String,
}

impl ParsedEntry {
    pub fn field(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }
}

/// Splits a file into entries by brace balancing. Text outside entries is
/// ignored (BibTeX comment convention). A segment that fails to scan is
/// returned as `Malformed` and scanning resumes at the next `@`.
pub fn parse_bib_text(text: &str) -> Vec<ParsedItem> {
    let bytes = text.as_bytes();
    let mut items = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'@' {
            i += 1;
            continue;
        }
        match scan_entry(text, i) {
            Ok((entry, end)) => {
                items.push(ParsedItem::Entry(entry));
                i = end;
            }
            Err(error) => {
                let next = bytes[i + 1..]
                    .iter()
                    .position(|&b| b == b'@')
                    .map(|off| i + 1 + off)
                    .unwrap_or(bytes.len());
                let raw = text[i..next].to_owned();
                let citation_key = header_regex()
                    .captures(&raw)
                    .map(|c| c[2].to_owned());
                items.push(ParsedItem::Malformed {
                    citation_key,
                    error: error.to_string(),
                    raw,
                });
                i = next;
            }
        }
    }
    items
}

fn scan_entry(text: &str, start: usize) -> Result<(ParsedEntry, usize), BibError> {
    let slice = &text[start..];
    let captures = header_regex()
        .captures(slice)
        .ok_or_else(|| BibError::MalformedEntry("no @type{key,...} header found".to_owned()))?;
    let full = captures.get(0).expect("whole match");
    if full.start() != 0 {
        return Err(BibError::MalformedEntry(
            "text at @ is not an entry header".to_owned(),
        ));
    }
    // Find the entry's closing brace by balance, starting after the header's
    // opening brace.
    let open = slice.find('{').expect("header matched");
    let bytes = slice.as_bytes();
    let mut depth = 0usize;
    let mut end = None;
    for (j, &c) in bytes.iter().enumerate().skip(open) {
        match c {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    end = Some(j + 1);
                    break;
                }
            }
            _ => {}
        }
    }
    let Some(end) = end else {
        return Err(BibError::MalformedEntry(
            "unbalanced braces in entry".to_owned(),
        ));
    };
    let raw = &slice[..end];
    let fields = parse_fields(raw)?;
    Ok((
        ParsedEntry {
            entry_type: captures[1].to_lowercase(),
            citation_key: captures[2].to_owned(),
            fields,
            raw: raw.to_owned(),
        },
        start + end,
    ))
}
