//! Query parsing, search orchestration and fuzzy matching.
//!
//! DBLP's own query language has no OR and its exact-word index misses
//! near-matches, so this module layers three things on top of the raw API:
//! a small boolean grammar (`parse_boolean` / `execute_search`), title
//! matching by Ratcliff/Obershelp similarity (`similarity`,
//! `fuzzy_title_search`) and author resolution that tolerates name variants
//! (`get_author_publications`).

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use thiserror::Error;

use crate::client::{DblpClient, DblpError, Publication, VenueHit};

const STOPWORDS: &str = include_str!("../data/stopwords.txt");
const VENUE_ALIASES: &str = include_str!("../data/venue_aliases.txt");

/// Disjunction of conjunctions: a publication matches when all terms of at
/// least one group match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanQuery {
    pub groups: Vec<Vec<String>>,
}

/// Post-filters applied locally after the API call.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchFilter {
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    /// Matched case-insensitively as a substring of the venue, after alias
    /// expansion (`nips` also matches `NeurIPS`).
    pub venue: Option<String>,
    pub max_results: usize,
}

impl Default for SearchFilter {
    fn default() -> Self {
        SearchFilter {
            year_min: None,
            year_max: None,
            venue: None,
            max_results: 20,
        }
    }
}

impl SearchFilter {
    /// Publications without a year are dropped whenever a year bound is set;
    /// without a venue they are dropped whenever a venue filter is set.
    pub fn admits(&self, publication: &Publication) -> bool {
        if self.year_min.is_some() || self.year_max.is_some() {
            let Some(year) = publication.year else {
                return false;
            };
            if self.year_min.is_some_and(|min| year < min) {
                return false;
            }
            if self.year_max.is_some_and(|max| year > max) {
                return false;
            }
        }
        if let Some(filter) = &self.venue {
            let Some(venue) = &publication.venue else {
                return false;
            };
            if !venue_matches(filter, venue) {
                return false;
            }
        }
        true
    }
}

/// Ratcliff/Obershelp ratio in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub fn new(value: f64) -> Result<Self, QueryError> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(SimilarityScore(value))
        } else {
            Err(QueryError::Threshold(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("could not parse query: {0}")]
    Parse(String),
    #[error("similarity threshold {0} is outside [0, 1]")]
    Threshold(f64),
}

/// Canonical text form used for all similarity comparisons: Unicode
/// lowercase, letters/digits/spaces only, single spaces, trimmed.
pub fn normalize(text: &str) -> String {
    let lowered = text.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    let mut pending_space = false;
    for c in lowered.chars() {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else if c.is_whitespace() {
            pending_space = true;
        }
    }
    out
}

/// Ratcliff/Obershelp: 2M / (|a| + |b|) over normalized forms, where M sums
/// the longest common block and, recursively, the matches in the unmatched
/// left and right remainders. Two empty strings score 1.0, one empty 0.0.
pub fn similarity(a: &str, b: &str) -> SimilarityScore {
    let na: Vec<char> = normalize(a).chars().collect();
    let nb: Vec<char> = normalize(b).chars().collect();
    if na.is_empty() && nb.is_empty() {
        return SimilarityScore(1.0);
    }
    if na.is_empty() || nb.is_empty() {
        return SimilarityScore(0.0);
    }
    let (s, t) = order_arguments(na, nb);
    let matches = gestalt_matches(&s, &t);
    SimilarityScore(2.0 * matches as f64 / (s.len() + t.len()) as f64)
}

/// The ratio must not depend on argument order, so arguments are put in a
/// canonical order first: shorter string first, ties broken lexicographically.
fn order_arguments(a: Vec<char>, b: Vec<char>) -> (Vec<char>, Vec<char>) {
    let swap = match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => a > b,
    };
    if swap {
        (b, a)
    } else {
        (a, b)
    }
}

fn gestalt_matches(a: &[char], b: &[char]) -> usize {
    let mut total = 0;
    let mut pending = vec![(0, a.len(), 0, b.len())];
    while let Some((alo, ahi, blo, bhi)) = pending.pop() {
        if alo >= ahi || blo >= bhi {
            continue;
        }
        let (ai, bi, len) = longest_block(a, alo, ahi, b, blo, bhi);
        if len == 0 {
            continue;
        }
        total += len;
        pending.push((alo, ai, blo, bi));
        pending.push((ai + len, ahi, bi + len, bhi));
    }
    total
}

/// Longest common contiguous block within the given windows. Ties prefer the
/// smallest start in `a`, then the smallest start in `b`; the strict `>`
/// update together with ascending scan order guarantees exactly that.
// Indices here are positions fed into the run-start arithmetic, not mere
// element accesses; iterator rewrites hide that.
#[allow(clippy::needless_range_loop)]
fn longest_block(
    a: &[char],
    alo: usize,
    ahi: usize,
    b: &[char],
    blo: usize,
    bhi: usize,
) -> (usize, usize, usize) {
    let width = bhi - blo;
    let mut prev = vec![0usize; width + 1];
    let mut cur = vec![0usize; width + 1];
    let (mut best_len, mut best_a, mut best_b) = (0, alo, blo);
    for i in alo..ahi {
        for j in blo..bhi {
            let jj = j - blo + 1;
            let run = if a[i] == b[j] { prev[jj - 1] + 1 } else { 0 };
            cur[jj] = run;
            if run > best_len {
                best_len = run;
                best_a = i + 1 - run;
                best_b = j + 1 - run;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (best_a, best_b, best_len)
}

/// Splits a query on standalone `and` / `or` words (case-insensitive).
/// Without operators the whole query is one group of single-word terms;
/// with operators, `or` separates groups and `and` separates terms, and a
/// term may span several words (`deep learning and graphs`).
pub fn parse_boolean(query: &str) -> Result<BooleanQuery, QueryError> {
    let tokens: Vec<&str> = query.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(QueryError::Parse("query has no terms".to_owned()));
    }
    let is_op = |t: &str, op: &str| t.eq_ignore_ascii_case(op);
    let has_operators = tokens
        .iter()
        .any(|t| is_op(t, "and") || is_op(t, "or"));
    if !has_operators {
        let terms = tokens.iter().map(|t| (*t).to_owned()).collect();
        return Ok(BooleanQuery {
            groups: vec![terms],
        });
    }
    let mut groups = Vec::new();
    for group_tokens in split_on_operator(&tokens, "or") {
        let mut terms = Vec::new();
        for term_tokens in split_on_operator(&group_tokens, "and") {
            if term_tokens.is_empty() {
                return Err(QueryError::Parse(format!(
                    "empty term in '{}'",
                    query.trim()
                )));
            }
            terms.push(term_tokens.join(" "));
        }
        if terms.is_empty() {
            return Err(QueryError::Parse(format!(
                "empty group in '{}'",
                query.trim()
            )));
        }
        groups.push(terms);
    }
    Ok(BooleanQuery { groups })
}

fn split_on_operator<'a>(tokens: &[&'a str], op: &str) -> Vec<Vec<&'a str>> {
    let mut segments = vec![Vec::new()];
    for token in tokens {
        if token.eq_ignore_ascii_case(op) {
            segments.push(Vec::new());
        } else {
            segments.last_mut().unwrap().push(*token);
        }
    }
    segments
}

/// Runs one DBLP search per group (terms joined by spaces), unions the hits
/// by dblp_key in first-seen order, applies the local filters, then truncates
/// to `max_results`. Any group failing fails the whole call.
pub fn execute_search(
    query: &BooleanQuery,
    filter: &SearchFilter,
    client: &DblpClient,
) -> Result<Vec<Publication>, DblpError> {
    let mut seen = HashSet::new();
    let mut merged = Vec::new();
    for group in &query.groups {
        let group_query = group.join(" ");
        for publication in client.search_publications(&group_query, filter.max_results)? {
            if seen.insert(publication.dblp_key.clone()) {
                merged.push(publication);
            }
        }
    }
    merged.retain(|p| filter.admits(p));
    merged.truncate(filter.max_results);
    Ok(merged)
}

/// Similarity-ranked title lookup. The API query is built from the title's
/// informative tokens and the candidate pool is deliberately larger than
/// `max_results` so scoring sees enough near-misses to rank.
pub fn fuzzy_title_search(
    title: &str,
    threshold: SimilarityScore,
    filter: &SearchFilter,
    client: &DblpClient,
) -> Result<Vec<(Publication, SimilarityScore)>, DblpError> {
    let tokens = informative_tokens(title);
    if tokens.is_empty() {
        return Err(DblpError::EmptyQuery);
    }
    let pool_size = filter.max_results.max(30);
    let candidates = client.search_publications(&tokens.join(" "), pool_size)?;
    let mut scored: Vec<(Publication, SimilarityScore)> = candidates
        .into_iter()
        .filter(|p| filter.admits(p))
        .map(|p| {
            let score = similarity(title, &p.title);
            (p, score)
        })
        .filter(|(_, score)| score.value() >= threshold.value())
        .collect();
    scored.sort_by(|(pa, sa), (pb, sb)| {
        sb.value()
            .total_cmp(&sa.value())
            .then_with(|| pa.dblp_key.cmp(&pb.dblp_key))
    });
    scored.truncate(filter.max_results);
    Ok(scored)
}

/// Resolves the queried name against DBLP's author index, keeps every
/// canonical name scoring at least `threshold`, then collects publications
/// that actually list one of those names as an author.
pub fn get_author_publications(
    author: &str,
    threshold: SimilarityScore,
    max_results: usize,
    client: &DblpClient,
) -> Result<Vec<Publication>, DblpError> {
    let hits = client.search_authors(author, 10)?;
    let matched: Vec<String> = hits
        .into_iter()
        .filter(|hit| similarity(author, &hit.name).value() >= threshold.value())
        .map(|hit| hit.name)
        .collect();
    let mut seen = HashSet::new();
    let mut merged = Vec::new();
    for name in &matched {
        let name_lower = name.to_lowercase();
        for publication in client.search_publications(name, max_results)? {
            let listed = publication
                .authors
                .iter()
                .any(|a| a.to_lowercase() == name_lower);
            if listed && seen.insert(publication.dblp_key.clone()) {
                merged.push(publication);
            }
        }
    }
    merged.truncate(max_results);
    Ok(merged)
}

/// First hit of the venue index, if any.
pub fn get_venue_info(venue: &str, client: &DblpClient) -> Result<Option<VenueHit>, DblpError> {
    let mut hits = client.search_venues(venue, 5)?;
    if hits.is_empty() {
        Ok(None)
    } else {
        Ok(Some(hits.remove(0)))
    }
}

/// Normalized title tokens minus stopwords; falls back to all tokens when
/// nothing survives (titles like "All of Us").
pub fn informative_tokens(title: &str) -> Vec<String> {
    let normalized = normalize(title);
    let all: Vec<String> = normalized.split_whitespace().map(str::to_owned).collect();
    let kept: Vec<String> = all
        .iter()
        .filter(|t| !stopwords().contains(t.as_str()))
        .cloned()
        .collect();
    if kept.is_empty() {
        all
    } else {
        kept
    }
}

/// True when the publication venue matches the user's filter text, directly
/// or through the alias table.
pub fn venue_matches(filter: &str, venue: &str) -> bool {
    let venue_lower = venue.to_lowercase();
    let filter_trimmed = filter.trim();
    if filter_trimmed.is_empty() {
        return true;
    }
    let mut needles: Vec<String> = vec![filter_trimmed.to_lowercase()];
    if let Some(expansions) = venue_aliases().get(filter_trimmed.to_lowercase().as_str()) {
        needles.extend(expansions.iter().map(|n| n.to_lowercase()));
    }
    needles.iter().any(|needle| venue_lower.contains(needle))
}

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

fn venue_aliases() -> &'static HashMap<&'static str, Vec<&'static str>> {
    static MAP: OnceLock<HashMap<&'static str, Vec<&'static str>>> = OnceLock::new();
    MAP.get_or_init(|| {
        let mut map = HashMap::new();
        for line in VENUE_ALIASES.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((alias, targets)) = line.split_once('=') else {
                continue;
            };
            let needles: Vec<&'static str> =
                targets.split(',').map(str::trim).filter(|t| !t.is_empty()).collect();
            map.insert(alias.trim(), needles);
        }
        map
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{serve_fixtures, FixtureRoute, FixtureScript};
    use serde_json::json;

    // --- reference implementation, kept deliberately independent of the
    // --- production code: full enumeration instead of DP, different
    // --- normalization mechanics. The acceptance suite reuses it.

    pub fn oracle_normalize(text: &str) -> String {
        let spaced: String = text
            .to_lowercase()
            .chars()
            .map(|c| if c.is_whitespace() { ' ' } else { c })
            .filter(|c| c.is_alphanumeric() || *c == ' ')
            .collect();
        spaced.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    fn oracle_longest(
        a: &[char],
        (alo, ahi): (usize, usize),
        b: &[char],
        (blo, bhi): (usize, usize),
    ) -> (usize, usize, usize) {
        let mut best = (alo, blo, 0usize);
        for i in alo..ahi {
            for j in blo..bhi {
                let mut k = 0;
                while i + k < ahi && j + k < bhi && a[i + k] == b[j + k] {
                    k += 1;
                }
                if k > best.2 {
                    best = (i, j, k);
                }
            }
        }
        best
    }

    fn oracle_matches(a: &[char], aw: (usize, usize), b: &[char], bw: (usize, usize)) -> usize {
        let (ai, bi, len) = oracle_longest(a, aw, b, bw);
        if len == 0 {
            return 0;
        }
        len + oracle_matches(a, (aw.0, ai), b, (bw.0, bi))
            + oracle_matches(a, (ai + len, aw.1), b, (bi + len, bw.1))
    }

    pub fn oracle_similarity(a: &str, b: &str) -> f64 {
        let na: Vec<char> = oracle_normalize(a).chars().collect();
        let nb: Vec<char> = oracle_normalize(b).chars().collect();
        if na.is_empty() && nb.is_empty() {
            return 1.0;
        }
        if na.is_empty() || nb.is_empty() {
            return 0.0;
        }
        let swap = na.len() > nb.len() || (na.len() == nb.len() && na > nb);
        let (s, t) = if swap { (nb, na) } else { (na, nb) };
        let m = oracle_matches(&s, (0, s.len()), &t, (0, t.len()));
        2.0 * m as f64 / (s.len() + t.len()) as f64
    }

    #[test]
    fn normalize_strips_punctuation_and_collapses_space() {
        assert_eq!(normalize("  Hello,   World!  "), "hello world");
        assert_eq!(normalize("Don't-Stop"), "dontstop");
        assert_eq!(normalize("Caf\u{00e9} PROTOCOLS"), "caf\u{00e9} protocols");
        assert_eq!(normalize("..."), "");
    }

    #[test]
    fn similarity_frozen_examples() {
        assert_eq!(similarity("abcd", "bcde").value(), 0.75);
        assert_eq!(similarity("", "").value(), 1.0);
        assert_eq!(similarity("!!", "??").value(), 1.0);
        assert_eq!(similarity("", "x").value(), 0.0);
        assert_eq!(
            similarity("Attention Is All You Need.", "attention is all you need").value(),
            1.0
        );
        assert_eq!(similarity("Don Knuth", "Donald E. Knuth").value(), 18.0 / 23.0);
    }

    #[test]
    fn similarity_is_symmetric_on_asymmetry_prone_pairs() {
        // Naive Ratcliff/Obershelp gives order-dependent results on pairs
        // like these; the canonical argument ordering must hide that.
        for (a, b) in [
            ("GESTALT PATTERN MATCHING", "GESTALT PRACTICE"),
            ("abcbe", "bcbea"),
            ("qabxcd", "abycdf"),
        ] {
            assert_eq!(similarity(a, b).value(), similarity(b, a).value());
        }
    }

    #[test]
    fn similarity_agrees_with_oracle_on_small_random_pairs() {
        let alphabet = ['a', 'b', 'c', 'd'];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..250 {
            let la = (next() % 21) as usize;
            let lb = (next() % 21) as usize;
            let a: String = (0..la).map(|_| alphabet[(next() % 4) as usize]).collect();
            let b: String = (0..lb).map(|_| alphabet[(next() % 4) as usize]).collect();
            let got = similarity(&a, &b).value();
            let want = oracle_similarity(&a, &b);
            assert!(got == want, "mismatch on ({a:?}, {b:?}): {got} vs {want}");
        }
    }

    #[test]
    fn parse_boolean_frozen_examples() {
        assert_eq!(
            parse_boolean("quantum and computing").unwrap().groups,
            vec![vec!["quantum".to_owned(), "computing".to_owned()]]
        );
        assert_eq!(
            parse_boolean("sat or smt").unwrap().groups,
            vec![vec!["sat".to_owned()], vec!["smt".to_owned()]]
        );
        assert_eq!(
            parse_boolean("graph and neural or transformer").unwrap().groups,
            vec![
                vec!["graph".to_owned(), "neural".to_owned()],
                vec!["transformer".to_owned()]
            ]
        );
    }

    #[test]
    fn parse_boolean_without_operators_splits_words() {
        assert_eq!(
            parse_boolean("  quantum   computing ").unwrap().groups,
            vec![vec!["quantum".to_owned(), "computing".to_owned()]]
        );
    }

    #[test]
    fn parse_boolean_keeps_multiword_terms() {
        assert_eq!(
            parse_boolean("deep learning and graph networks or SAT solving").unwrap().groups,
            vec![
                vec!["deep learning".to_owned(), "graph networks".to_owned()],
                vec!["SAT solving".to_owned()]
            ]
        );
    }

    #[test]
    fn parse_boolean_operators_are_case_insensitive() {
        assert_eq!(
            parse_boolean("sat OR smt AND proofs").unwrap().groups,
            vec![
                vec!["sat".to_owned()],
                vec!["smt".to_owned(), "proofs".to_owned()]
            ]
        );
    }

    #[test]
    fn parse_boolean_rejects_degenerate_queries() {
        assert!(parse_boolean("").is_err());
        assert!(parse_boolean("   ").is_err());
        assert!(parse_boolean("and").is_err());
        assert!(parse_boolean("or or").is_err());
        assert!(parse_boolean("quantum and").is_err());
        assert!(parse_boolean("or computing").is_err());
    }

    #[test]
    fn similarity_score_range_is_enforced() {
        assert!(SimilarityScore::new(0.0).is_ok());
        assert!(SimilarityScore::new(1.0).is_ok());
        assert!(SimilarityScore::new(-0.1).is_err());
        assert!(SimilarityScore::new(1.1).is_err());
        assert!(SimilarityScore::new(f64::NAN).is_err());
    }

    // --- fixture-backed orchestration tests ---

    /// `(key, title, authors, venue, year)` as the publication endpoint lists them.
    type HitSpec<'a> = (&'a str, &'a str, &'a [&'a str], Option<&'a str>, Option<i32>);

    fn publ_body(hits: &[HitSpec]) -> String {
        let hit_values: Vec<serde_json::Value> = hits
            .iter()
            .map(|(key, title, authors, venue, year)| {
                let mut info = json!({
                    "key": key,
                    "title": title,
                    "authors": {"author": authors.iter().map(|a| json!({"@pid": "x", "text": a})).collect::<Vec<_>>()},
                });
                if let Some(v) = venue {
                    info["venue"] = json!(v);
                }
                if let Some(y) = year {
                    info["year"] = json!(y.to_string());
                }
                json!({"info": info})
            })
            .collect();
        json!({"result": {"hits": {"@total": hit_values.len().to_string(), "hit": hit_values}}})
            .to_string()
    }

    fn publ_path(q: &str, h: usize) -> String {
        let qs = url::form_urlencoded::Serializer::new(String::new())
            .append_pair("q", q)
            .append_pair("format", "json")
            .append_pair("h", &h.to_string())
            .finish();
        format!("/search/publ/api?{qs}")
    }

    fn fast_client(base_url: String) -> DblpClient {
        DblpClient::new(crate::client::ClientConfig {
            min_request_spacing: std::time::Duration::ZERO,
            ..crate::client::ClientConfig::with_base_url(base_url)
        })
    }

    #[test]
    fn execute_search_unions_groups_in_first_seen_order() {
        let group_a = publ_body(&[
            ("conf/x/A1", "Alpha", &["P Q"], Some("X"), Some(2020)),
            ("conf/x/B2", "Beta", &["P Q"], Some("X"), Some(2021)),
        ]);
        let group_b = publ_body(&[
            ("conf/x/B2", "Beta", &["P Q"], Some("X"), Some(2021)),
            ("conf/x/C3", "Gamma", &["P Q"], Some("X"), Some(2022)),
        ]);
        let script = FixtureScript::new()
            .with(FixtureRoute::ok(publ_path("sat", 20), group_a))
            .with(FixtureRoute::ok(publ_path("smt", 20), group_b));
        let server = serve_fixtures(script, 0).unwrap();
        let client = fast_client(server.base_url());
        let query = parse_boolean("sat or smt").unwrap();
        let found = execute_search(&query, &SearchFilter::default(), &client).unwrap();
        let keys: Vec<&str> = found.iter().map(|p| p.dblp_key.as_str()).collect();
        assert_eq!(keys, vec!["conf/x/A1", "conf/x/B2", "conf/x/C3"]);
    }

    #[test]
    fn execute_search_applies_year_window_locally() {
        let body = publ_body(&[
            ("conf/y/P18", "Old", &["A"], Some("V"), Some(2018)),
            ("conf/y/P21", "Mid", &["A"], Some("V"), Some(2021)),
            ("conf/y/P24", "New", &["A"], Some("V"), Some(2024)),
            ("conf/y/P00", "Undated", &["A"], Some("V"), None),
        ]);
        let script = FixtureScript::new().with(FixtureRoute::ok(publ_path("topic", 20), body));
        let server = serve_fixtures(script, 0).unwrap();
        let client = fast_client(server.base_url());
        let query = parse_boolean("topic").unwrap();
        let filter = SearchFilter {
            year_min: Some(2019),
            year_max: Some(2023),
            ..SearchFilter::default()
        };
        let found = execute_search(&query, &filter, &client).unwrap();
        let keys: Vec<&str> = found.iter().map(|p| p.dblp_key.as_str()).collect();
        assert_eq!(keys, vec!["conf/y/P21"]);
    }

    #[test]
    fn execute_search_expands_venue_aliases() {
        let body = publ_body(&[
            ("conf/nips/A17", "Nets", &["A"], Some("NeurIPS"), Some(2017)),
            ("conf/icml/B17", "Trees", &["A"], Some("ICML"), Some(2017)),
        ]);
        let script = FixtureScript::new().with(FixtureRoute::ok(publ_path("learning", 20), body));
        let server = serve_fixtures(script, 0).unwrap();
        let client = fast_client(server.base_url());
        let query = parse_boolean("learning").unwrap();
        let filter = SearchFilter {
            venue: Some("nips".to_owned()),
            ..SearchFilter::default()
        };
        let found = execute_search(&query, &filter, &client).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].dblp_key, "conf/nips/A17");
    }

    #[test]
    fn execute_search_truncates_after_filtering() {
        let body = publ_body(&[
            ("a/a/K1", "T1", &["A"], Some("V"), Some(2020)),
            ("a/a/K2", "T2", &["A"], Some("V"), Some(2020)),
            ("a/a/K3", "T3", &["A"], Some("V"), Some(2020)),
        ]);
        let script = FixtureScript::new().with(FixtureRoute::ok(publ_path("t", 2), body));
        let server = serve_fixtures(script, 0).unwrap();
        let client = fast_client(server.base_url());
        let query = parse_boolean("t").unwrap();
        let filter = SearchFilter {
            max_results: 2,
            ..SearchFilter::default()
        };
        let found = execute_search(&query, &filter, &client).unwrap();
        assert_eq!(found.len(), 2);
    }

    #[test]
    fn execute_search_fails_whole_call_when_a_group_fails() {
        let body = publ_body(&[("a/a/K1", "T1", &["A"], Some("V"), Some(2020))]);
        // Second group's route is missing: fixture returns 404.
        let script = FixtureScript::new().with(FixtureRoute::ok(publ_path("good", 20), body));
        let server = serve_fixtures(script, 0).unwrap();
        let client = fast_client(server.base_url());
        let query = parse_boolean("good or missing").unwrap();
        let err = execute_search(&query, &SearchFilter::default(), &client).unwrap_err();
        assert!(matches!(err, DblpError::Http { status: 404 }));
    }

    #[test]
    fn fuzzy_search_strips_stopwords_and_ranks_by_score() {
        let pool = publ_body(&[
            ("conf/nips/V17", "Attention Is All you Need.", &["A"], Some("NIPS"), Some(2017)),
            ("conf/x/W20", "Attention Is Not All You Need", &["B"], Some("X"), Some(2020)),
            ("conf/x/Z19", "Unrelated Paper", &["C"], Some("X"), Some(2019)),
        ]);
        // Query tokens survive stopword removal; pool size floor of 30 applies.
        let script = FixtureScript::new()
            .with(FixtureRoute::ok(publ_path("attention all you need", 30), pool));
        let server = serve_fixtures(script, 0).unwrap();
        let client = fast_client(server.base_url());
        let threshold = SimilarityScore::new(0.6).unwrap();
        let found =
            fuzzy_title_search("Attention is all you need", threshold, &SearchFilter::default(), &client)
                .unwrap();
        assert_eq!(found.len(), 2);
        assert_eq!(found[0].0.dblp_key, "conf/nips/V17");
        assert_eq!(found[0].1.value(), 1.0);
        assert!(found[1].1.value() < 1.0);
    }

    #[test]
    fn fuzzy_search_threshold_is_inclusive() {
        let pool = publ_body(&[("a/b/C", "abcd", &["A"], Some("V"), Some(2020))]);
        let script = FixtureScript::new().with(FixtureRoute::ok(publ_path("bcde", 30), pool));
        let server = serve_fixtures(script, 0).unwrap();
        let client = fast_client(server.base_url());
        let exactly = SimilarityScore::new(0.75).unwrap();
        let found = fuzzy_title_search("bcde", exactly, &SearchFilter::default(), &client).unwrap();
        assert_eq!(found.len(), 1, "score 0.75 must pass threshold 0.75");
    }

    fn author_path(q: &str, h: usize) -> String {
        let qs = url::form_urlencoded::Serializer::new(String::new())
            .append_pair("q", q)
            .append_pair("format", "json")
            .append_pair("h", &h.to_string())
            .finish();
        format!("/search/author/api?{qs}")
    }

    #[test]
    fn author_publications_follow_matched_canonical_names() {
        let authors = json!({"result": {"hits": {"@total": "2", "hit": [
            {"info": {"author": "Donald E. Knuth", "url": "https://dblp.org/pid/k/Knuth"}},
            {"info": {"author": "Donatella Knupfer", "url": "https://dblp.org/pid/k/Knupfer"}}
        ]}}})
        .to_string();
        let pubs = publ_body(&[
            ("journals/cacm/Knuth74", "Computer Programming as an Art.", &["Donald E. Knuth"], Some("Commun. ACM"), Some(1974)),
            ("journals/misc/Other99", "Unrelated", &["Someone Else"], Some("Misc"), Some(1999)),
        ]);
        let script = FixtureScript::new()
            .with(FixtureRoute::ok(author_path("Don Knuth", 10), authors))
            .with(FixtureRoute::ok(publ_path("Donald E. Knuth", 20), pubs));
        let server = serve_fixtures(script, 0).unwrap();
        let client = fast_client(server.base_url());
        let threshold = SimilarityScore::new(0.6).unwrap();
        let found = get_author_publications("Don Knuth", threshold, 20, &client).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].dblp_key, "journals/cacm/Knuth74");
        // "Donatella Knupfer" scores below 0.6, so only one publ query went out.
        assert_eq!(server.request_count(), 2);
    }

    #[test]
    fn venue_alias_table_covers_spec_example() {
        assert!(venue_matches("nips", "NeurIPS"));
        assert!(venue_matches("nips", "NIPS"));
        assert!(venue_matches("NeurIPS", "NeurIPS"));
        assert!(!venue_matches("nips", "ICML"));
        assert!(venue_matches("Commun. ACM", "Commun. ACM"));
    }

    #[test]
    fn informative_tokens_fall_back_when_all_stopwords() {
        assert_eq!(
            informative_tokens("What Is This For"),
            vec!["what", "is", "this", "for"]
        );
        assert_eq!(
            informative_tokens("The Art of Computer Programming"),
            vec!["art", "computer", "programming"]
        );
    }
}
