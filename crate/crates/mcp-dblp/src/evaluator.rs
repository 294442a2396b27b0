//! Citation fidelity evaluation.
//!
//! Compares a candidate bibliography against a ground-truth one, citation
//! key by citation key, and sorts every citation into exactly one of six
//! categories. The ladder is ordered by severity and the first matching
//! rung wins:
//!
//! 1. `NF` not found: the key is missing from the candidate (or the entry
//!    under it cannot be parsed),
//! 2. `WP` wrong paper: the candidate cites a different paper (normalized
//!    title similarity below 0.9, or the year differs),
//! 3. `CM` corrupted metadata: some field that is present on both sides
//!    conflicts (altered author that is not an abbreviation, extra authors,
//!    wrong pages/volume/number/doi, reworded title, wrong venue),
//! 4. `IA` incomplete authors: the candidate's author list is a strict
//!    prefix-length truncation of the truth's,
//! 5. `IM` incomplete metadata: doi, pages or volume present in truth but
//!    absent in the candidate, or an author/venue given in abbreviated form,
//! 6. `PM` perfect match.
//!
//! Each non-PM/NF classification carries `(field, truth, candidate)`
//! evidence triples naming what fired.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use crate::bibliography::{parse_bib_text, ParsedEntry, ParsedItem};
use crate::query::{normalize, similarity};

/// Title similarity below this means the candidate cites a different paper.
pub const IDENTITY_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    PerfectMatch,
    WrongPaper,
    NotFound,
    IncompleteMetadata,
    IncompleteAuthors,
    CorruptedMetadata,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::PerfectMatch,
        Category::WrongPaper,
        Category::NotFound,
        Category::IncompleteMetadata,
        Category::IncompleteAuthors,
        Category::CorruptedMetadata,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Category::PerfectMatch => "PM",
            Category::WrongPaper => "WP",
            Category::NotFound => "NF",
            Category::IncompleteMetadata => "IM",
            Category::IncompleteAuthors => "IA",
            Category::CorruptedMetadata => "CM",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::PerfectMatch => "Perfect Match",
            Category::WrongPaper => "Wrong Paper",
            Category::NotFound => "Not Found",
            Category::IncompleteMetadata => "Incomplete Metadata",
            Category::IncompleteAuthors => "Incomplete Authors",
            Category::CorruptedMetadata => "Corrupted Metadata",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub field: String,
    pub truth: String,
    pub candidate: String,
}

impl Evidence {
    fn new(field: &str, truth: impl Into<String>, candidate: impl Into<String>) -> Self {
        Evidence {
            field: field.to_owned(),
            truth: truth.into(),
            candidate: candidate.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub category: Category,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CitationResult {
    pub key: String,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EvalReport {
    pub citations: Vec<CitationResult>,
}

impl EvalReport {
    pub fn count(&self, category: Category) -> usize {
        self.citations
            .iter()
            .filter(|c| c.classification.category == category)
            .count()
    }

    pub fn percentage(&self, category: Category) -> f64 {
        if self.citations.is_empty() {
            0.0
        } else {
            self.count(category) as f64 * 100.0 / self.citations.len() as f64
        }
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("could not read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("truth file {path} is not usable: {message}")]
    Truth { path: PathBuf, message: String },
}

/// Digested view of an entry; all comparisons go through this.
struct View {
    title: String,
    year: Option<i32>,
    authors: Vec<String>,
    venue: Option<(String, String)>,
}

impl View {
    fn of(entry: &ParsedEntry) -> Self {
        let title = entry.field("title").unwrap_or_default().to_owned();
        let year = entry
            .field("year")
            .and_then(|y| y.trim().parse::<i32>().ok());
        let authors = entry
            .field("author")
            .map(split_authors)
            .unwrap_or_default();
        let venue = ["booktitle", "journal"]
            .iter()
            .find_map(|name| entry.field(name).map(|v| ((*name).to_owned(), v.to_owned())));
        View {
            title,
            year,
            authors,
            venue,
        }
    }
}

/// BibTeX author lists separate names with the word `and`; DBLP wraps long
/// lists across padded continuation lines, so whitespace is collapsed first.
fn split_authors(value: &str) -> Vec<String> {
    let collapsed = value.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed
        .split(" and ")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Field value normalization for equality checks: braces stripped, case
/// folded, whitespace collapsed.
fn norm_value(value: &str) -> String {
    let without_braces: String = value.chars().filter(|c| *c != '{' && *c != '}').collect();
    without_braces
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Pages additionally fold `--` to `-`: `1--10` and `1-10` are the same range.
fn norm_pages(value: &str) -> String {
    let mut out = String::new();
    let mut prev_dash = false;
    for c in norm_value(value).chars() {
        if c == '-' {
            if !prev_dash {
                out.push('-');
            }
            prev_dash = true;
        } else {
            out.push(c);
            prev_dash = false;
        }
    }
    out
}

fn names_equal(a: &str, b: &str) -> bool {
    normalize(a) == normalize(b)
}

/// True when `candidate` is an abbreviated writing of `truth`: tokens are
/// consumed in order, each candidate token either equals a truth token or is
/// a dotted prefix of one (`J.` for `Jane`); dropped middle names are fine
/// but the family name (last token) must line up, and at least one dotted
/// prefix must actually occur.
fn is_abbreviated_name(candidate: &str, truth: &str) -> bool {
    let cand_tokens: Vec<String> = candidate
        .split_whitespace()
        .map(str::to_lowercase)
        .collect();
    let truth_tokens: Vec<String> = truth.split_whitespace().map(str::to_lowercase).collect();
    if cand_tokens.is_empty() || truth_tokens.is_empty() {
        return false;
    }
    let token_core = |t: &str| -> String { t.chars().filter(|c| c.is_alphanumeric()).collect() };
    let mut ti = 0;
    let mut saw_abbreviation = false;
    for (index, cand) in cand_tokens.iter().enumerate() {
        let mut matched = false;
        while ti < truth_tokens.len() {
            let truth_tok = &truth_tokens[ti];
            ti += 1;
            if token_core(cand) == token_core(truth_tok) {
                matched = true;
                break;
            }
            if let Some(stem) = cand.strip_suffix('.') {
                let stem = token_core(stem);
                let full = token_core(truth_tok);
                if !stem.is_empty() && stem.len() < full.len() && full.starts_with(&stem) {
                    matched = true;
                    saw_abbreviation = true;
                    break;
                }
            }
        }
        if !matched {
            return false;
        }
        if index == cand_tokens.len() - 1 && ti != truth_tokens.len() {
            return false;
        }
    }
    saw_abbreviation
}

const VENUE_FUNCTION_WORDS: [&str; 9] = ["of", "the", "on", "in", "and", "for", "a", "an", "et"];

/// True when the candidate venue is an abbreviated form of the truth venue:
/// a normalized substring (`Artificial Intelligence` in the full journal
/// name), an acronym of a contiguous word window (`NIPS`), or an ordered
/// per-token prefix walk (`J. Artif. Intell. Res.`).
fn is_abbreviated_venue(candidate: &str, truth: &str) -> bool {
    let cand = normalize(candidate);
    let truth_norm = normalize(truth);
    if cand.is_empty() || cand == truth_norm {
        return false;
    }
    if truth_norm.contains(&cand) {
        return true;
    }
    let content_words: Vec<&str> = truth_norm
        .split_whitespace()
        .filter(|w| !VENUE_FUNCTION_WORDS.contains(w))
        .collect();
    let compact: String = cand.split_whitespace().collect();
    for start in 0..content_words.len() {
        for end in (start + 2)..=content_words.len() {
            let acronym: String = content_words[start..end]
                .iter()
                .filter_map(|w| w.chars().next())
                .collect();
            if compact == acronym {
                return true;
            }
        }
    }
    // Ordered prefix walk over all truth tokens, function words skippable.
    let truth_tokens: Vec<&str> = truth_norm.split_whitespace().collect();
    let cand_tokens: Vec<&str> = cand.split_whitespace().collect();
    if cand_tokens.is_empty() {
        return false;
    }
    let mut ti = 0;
    for cand_tok in &cand_tokens {
        let mut matched = false;
        while ti < truth_tokens.len() {
            let truth_tok = truth_tokens[ti];
            ti += 1;
            if truth_tok == *cand_tok || truth_tok.starts_with(cand_tok) {
                matched = true;
                break;
            }
            if !VENUE_FUNCTION_WORDS.contains(&truth_tok) {
                return false;
            }
        }
        if !matched {
            return false;
        }
    }
    true
}

/// Classifies one candidate entry against its ground truth. `None` means the
/// citation key was absent from the candidate bibliography.
pub fn classify(truth: &ParsedEntry, candidate: Option<&ParsedEntry>) -> Classification {
    let Some(candidate) = candidate else {
        return Classification {
            category: Category::NotFound,
            evidence: Vec::new(),
        };
    };
    let t = View::of(truth);
    let c = View::of(candidate);

    // Identity gate: is this even the same paper?
    let title_similarity = similarity(&t.title, &c.title).value();
    if title_similarity < IDENTITY_THRESHOLD {
        return Classification {
            category: Category::WrongPaper,
            evidence: vec![Evidence::new("title", &t.title, &c.title)],
        };
    }
    if let (Some(truth_year), Some(cand_year)) = (t.year, c.year) {
        if truth_year != cand_year {
            return Classification {
                category: Category::WrongPaper,
                evidence: vec![Evidence::new(
                    "year",
                    truth_year.to_string(),
                    cand_year.to_string(),
                )],
            };
        }
    }

    // Corruption scan across fields present on both sides. Abbreviations are
    // collected separately: they are incompleteness, not corruption.
    let mut corrupted: Vec<Evidence> = Vec::new();
    let mut abbreviated: Vec<Evidence> = Vec::new();

    if !t.title.is_empty() && !c.title.is_empty() && norm_value(&t.title) != norm_value(&c.title) {
        corrupted.push(Evidence::new("title", &t.title, &c.title));
    }

    let common = t.authors.len().min(c.authors.len());
    for i in 0..common {
        let (truth_author, cand_author) = (&t.authors[i], &c.authors[i]);
        if names_equal(truth_author, cand_author) {
            continue;
        }
        if is_abbreviated_name(cand_author, truth_author) {
            abbreviated.push(Evidence::new("author", truth_author, cand_author));
        } else {
            corrupted.push(Evidence::new("author", truth_author, cand_author));
        }
    }
    if !t.authors.is_empty() && c.authors.len() > t.authors.len() {
        corrupted.push(Evidence::new(
            "author",
            t.authors.join(" and "),
            c.authors.join(" and "),
        ));
    }

    type Normalizer = fn(&str) -> String;
    let scalar_checks: [(&str, Normalizer); 4] = [
        ("pages", norm_pages),
        ("volume", norm_value),
        ("number", norm_value),
        ("doi", norm_value),
    ];
    for (field, norm) in scalar_checks {
        if let (Some(tv), Some(cv)) = (truth.field(field), candidate.field(field)) {
            if norm(tv) != norm(cv) {
                corrupted.push(Evidence::new(field, tv, cv));
            }
        }
    }

    if let (Some((t_field, t_venue)), Some((_, c_venue))) = (&t.venue, &c.venue) {
        if norm_value(t_venue) != norm_value(c_venue) {
            if is_abbreviated_venue(c_venue, t_venue) {
                abbreviated.push(Evidence::new(t_field, t_venue, c_venue));
            } else {
                corrupted.push(Evidence::new(t_field, t_venue, c_venue));
            }
        }
    }

    if !corrupted.is_empty() {
        return Classification {
            category: Category::CorruptedMetadata,
            evidence: corrupted,
        };
    }

    if !t.authors.is_empty() && c.authors.len() < t.authors.len() {
        return Classification {
            category: Category::IncompleteAuthors,
            evidence: vec![Evidence::new(
                "author",
                t.authors.join(" and "),
                c.authors.join(" and "),
            )],
        };
    }

    let mut missing: Vec<Evidence> = Vec::new();
    for field in ["doi", "pages", "volume"] {
        if let Some(tv) = truth.field(field) {
            if candidate.field(field).is_none() {
                missing.push(Evidence::new(field, tv, ""));
            }
        }
    }
    missing.extend(abbreviated);
    if !missing.is_empty() {
        return Classification {
            category: Category::IncompleteMetadata,
            evidence: missing,
        };
    }

    Classification {
        category: Category::PerfectMatch,
        evidence: Vec::new(),
    }
}

fn read_file(path: &Path) -> Result<String, EvalError> {
    std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Evaluates `candidate_path` against `truth_path`, matching entries by
/// citation key. The truth file must parse completely; candidate defects are
/// classifications, not errors. Citation order follows the truth file.
pub fn evaluate_files(truth_path: &Path, candidate_path: &Path) -> Result<EvalReport, EvalError> {
    let truth_text = read_file(truth_path)?;
    let mut truth_entries: Vec<ParsedEntry> = Vec::new();
    for item in parse_bib_text(&truth_text) {
        match item {
            ParsedItem::Entry(entry) => truth_entries.push(entry),
            ParsedItem::Malformed {
                citation_key,
                error,
                ..
            } => {
                let at = citation_key
                    .map(|k| format!(" (entry '{k}')"))
                    .unwrap_or_default();
                return Err(EvalError::Truth {
                    path: truth_path.to_path_buf(),
                    message: format!("malformed entry{at}: {error}"),
                });
            }
        }
    }
    if truth_entries.is_empty() {
        return Err(EvalError::Truth {
            path: truth_path.to_path_buf(),
            message: "contains no BibTeX entries".to_owned(),
        });
    }

    let candidate_text = read_file(candidate_path)?;
    let mut candidates: HashMap<String, ParsedItem> = HashMap::new();
    for item in parse_bib_text(&candidate_text) {
        let key = match &item {
            ParsedItem::Entry(e) => Some(e.citation_key.clone()),
            ParsedItem::Malformed { citation_key, .. } => citation_key.clone(),
        };
        if let Some(key) = key {
            candidates.entry(key).or_insert(item);
        }
    }

    let citations = truth_entries
        .iter()
        .map(|truth| {
            let classification = match candidates.get(&truth.citation_key) {
                None => classify(truth, None),
                Some(ParsedItem::Entry(entry)) => classify(truth, Some(entry)),
                Some(ParsedItem::Malformed { error, .. }) => Classification {
                    category: Category::NotFound,
                    evidence: vec![Evidence::new("parse", "", error.clone())],
                },
            };
            CitationResult {
                key: truth.citation_key.clone(),
                classification,
            }
        })
        .collect();
    Ok(EvalReport { citations })
}

/// Plain-text report: per-category counts with percentages, then one line
/// per citation with its evidence.
pub fn render_text(report: &EvalReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("evaluated {} citations\n", report.citations.len()));
    for category in Category::ALL {
        out.push_str(&format!(
            "  {}  {:<20} {:>3}  {:>5.1}%\n",
            category.code(),
            category.label(),
            report.count(category),
            report.percentage(category),
        ));
    }
    out.push('\n');
    for citation in &report.citations {
        out.push_str(&format!(
            "  {}  {}",
            citation.classification.category.code(),
            citation.key
        ));
        for ev in &citation.classification.evidence {
            out.push_str(&format!(
                "\n        {}: {:?} vs {:?}",
                ev.field, ev.truth, ev.candidate
            ));
        }
        out.push('\n');
    }
    out
}

/// JSON report: `{"citations": [{key, category, evidence[]}], "totals": {...}}`.
pub fn render_json(report: &EvalReport) -> serde_json::Value {
    let citations: Vec<serde_json::Value> = report
        .citations
        .iter()
        .map(|citation| {
            let evidence: Vec<serde_json::Value> = citation
                .classification
                .evidence
                .iter()
                .map(|ev| {
                    json!({
                        "field": ev.field,
                        "truth": ev.truth,
                        "candidate": ev.candidate,
                    })
                })
                .collect();
            json!({
                "key": citation.key,
                "category": citation.classification.category.code(),
                "evidence": evidence,
            })
        })
        .collect();
    let mut totals = serde_json::Map::new();
    for category in Category::ALL {
        totals.insert(category.code().to_owned(), json!(report.count(category)));
    }
    json!({ "citations": citations, "totals": totals })
}
