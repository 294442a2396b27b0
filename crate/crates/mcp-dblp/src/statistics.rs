//! Aggregate statistics over a list of publications.
//!
//! Everything here is pure: the publication list the LLM client passes back
//! in is the single source of truth, no network calls are made. Author and
//! venue counts use DBLP's exact name strings as identity; no name merging
//! is attempted.

use std::collections::HashMap;

use crate::client::Publication;

pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsReport {
    pub total: usize,
    /// Min and max over publications that carry a year; `None` when none do.
    pub year_range: Option<(i32, i32)>,
    /// `(name, count)` sorted by count descending, name ascending, at most
    /// `top_k` entries.
    pub top_authors: Vec<(String, usize)>,
    pub top_venues: Vec<(String, usize)>,
}

pub fn calculate_statistics(publications: &[Publication], top_k: usize) -> StatsReport {
    let mut year_range: Option<(i32, i32)> = None;
    let mut author_counts: HashMap<&str, usize> = HashMap::new();
    let mut venue_counts: HashMap<&str, usize> = HashMap::new();
    for publication in publications {
        if let Some(year) = publication.year {
            year_range = Some(match year_range {
                None => (year, year),
                Some((min, max)) => (min.min(year), max.max(year)),
            });
        }
        for author in &publication.authors {
            *author_counts.entry(author).or_default() += 1;
        }
        if let Some(venue) = &publication.venue {
            if !venue.is_empty() {
                *venue_counts.entry(venue).or_default() += 1;
            }
        }
    }
    StatsReport {
        total: publications.len(),
        year_range,
        top_authors: ranked(author_counts, top_k),
        top_venues: ranked(venue_counts, top_k),
    }
}

fn ranked(counts: HashMap<&str, usize>, top_k: usize) -> Vec<(String, usize)> {
    let mut pairs: Vec<(String, usize)> = counts
        .into_iter()
        .map(|(name, count)| (name.to_owned(), count))
        .collect();
    pairs.sort_by(|(na, ca), (nb, cb)| cb.cmp(ca).then_with(|| na.cmp(nb)));
    pairs.truncate(top_k);
    pairs
}
