//! Blocking DBLP API client.
//!
//! Wraps the three search endpoints (`/search/publ/api`, `/search/author/api`,
//! `/search/venue/api`) and the record export endpoint (`/rec/{key}.bib`).
//! All requests share one global timeout, a minimum spacing between outbound
//! requests (politeness towards dblp.org) and a small LRU response cache keyed
//! by full URL. Cache hits skip both the network and the spacing delay.

use std::num::NonZeroUsize;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use lru::LruCache;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Env var that redirects the client at a different host, e.g. a fixture
/// server. Value like `http://127.0.0.1:4217`; a trailing `/` is tolerated.
pub const BASE_URL_ENV: &str = "MCP_DBLP_BASE_URL";

pub const DEFAULT_BASE_URL: &str = "https://dblp.org";

/// One bibliographic record as decoded from a DBLP search hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Publication {
    #[serde(default)]
    pub dblp_key: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(default)]
    pub venue: Option<String>,
    #[serde(default)]
    pub year: Option<i32>,
    #[serde(default)]
    pub pub_type: Option<String>,
    #[serde(default)]
    pub doi: Option<String>,
    #[serde(default)]
    pub url: Option<String>,
}

/// Hit from the author search endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorHit {
    pub name: String,
    pub url: Option<String>,
}

/// Hit from the venue search endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct VenueHit {
    pub name: String,
    pub acronym: Option<String>,
    pub url: Option<String>,
}

#[derive(Debug, Error)]
pub enum DblpError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("request timed out after {elapsed:.1?} (limit {limit:.0?})")]
    Timeout { elapsed: Duration, limit: Duration },
    #[error("DBLP returned HTTP {status}")]
    Http { status: u16 },
    #[error("invalid DBLP key '{key}': no such record")]
    InvalidKey { key: String },
    #[error("could not decode DBLP response: {0}")]
    Decode(String),
    #[error("network error: {0}")]
    Network(String),
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub base_url: String,
    /// Global per-request deadline covering connect, send and body read.
    pub timeout: Duration,
    pub user_agent: String,
    /// 0 disables the cache.
    pub cache_capacity: usize,
    /// Minimum gap between adjacent outbound requests.
    pub min_request_spacing: Duration,
    /// Retry a timed-out request once. Off by default: the sequential tool
    /// loop would otherwise stall for two full timeouts.
    pub retry_on_timeout: bool,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            base_url: DEFAULT_BASE_URL.to_owned(),
            timeout: Duration::from_secs(10),
            user_agent: format!("mcp-dblp/{}", env!("CARGO_PKG_VERSION")),
            cache_capacity: 128,
            min_request_spacing: Duration::from_millis(200),
            retry_on_timeout: false,
        }
    }
}

impl ClientConfig {
    /// Default config with the base URL taken from [`BASE_URL_ENV`] when set.
    pub fn from_env() -> Self {
        let mut config = ClientConfig::default();
        if let Ok(base) = std::env::var(BASE_URL_ENV) {
            if !base.trim().is_empty() {
                config.base_url = base;
            }
        }
        config.normalize();
        config
    }

    pub fn with_base_url(base_url: impl Into<String>) -> Self {
        let mut config = ClientConfig {
            base_url: base_url.into(),
            ..ClientConfig::default()
        };
        config.normalize();
        config
    }

    fn normalize(&mut self) {
        while self.base_url.ends_with('/') {
            self.base_url.pop();
        }
    }
}

pub struct DblpClient {
    agent: ureq::Agent,
    config: ClientConfig,
    cache: Option<Mutex<LruCache<String, Vec<u8>>>>,
    last_request: Mutex<Option<Instant>>,
}

impl DblpClient {
    pub fn new(mut config: ClientConfig) -> Self {
        config.normalize();
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .user_agent(config.user_agent.clone())
            .http_status_as_error(false)
            .build()
            .new_agent();
        let cache = NonZeroUsize::new(config.cache_capacity)
            .map(|cap| Mutex::new(LruCache::new(cap)));
        DblpClient {
            agent,
            config,
            cache,
            last_request: Mutex::new(None),
        }
    }

    pub fn from_env() -> Self {
        Self::new(ClientConfig::from_env())
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    /// Full-text publication search. `max_results` maps to the API's `h`
    /// parameter, so DBLP never sends more hits than requested.
    pub fn search_publications(
        &self,
        query: &str,
        max_results: usize,
    ) -> Result<Vec<Publication>, DblpError> {
        let body = self.search_api("search/publ/api", query, max_results)?;
        let hits = decode_hits(&body)?;
        hits.iter().map(decode_publication).collect()
    }

    pub fn search_authors(
        &self,
        name: &str,
        max_results: usize,
    ) -> Result<Vec<AuthorHit>, DblpError> {
        let body = self.search_api("search/author/api", name, max_results)?;
        let hits = decode_hits(&body)?;
        Ok(hits
            .iter()
            .filter_map(|info| {
                Some(AuthorHit {
                    name: extract_text(info.get("author")?)?,
                    url: info.get("url").and_then(extract_text),
                })
            })
            .collect())
    }

    pub fn search_venues(&self, name: &str, max_results: usize) -> Result<Vec<VenueHit>, DblpError> {
        let body = self.search_api("search/venue/api", name, max_results)?;
        let hits = decode_hits(&body)?;
        Ok(hits
            .iter()
            .filter_map(|info| {
                Some(VenueHit {
                    name: extract_text(info.get("venue")?)?,
                    acronym: info.get("acronym").and_then(extract_text),
                    url: info.get("url").and_then(extract_text),
                })
            })
            .collect())
    }

    /// Fetches the official BibTeX export for a record. The returned string
    /// is byte-for-byte what DBLP served; callers must not reformat it.
    pub fn fetch_bibtex(&self, dblp_key: &str) -> Result<String, DblpError> {
        validate_key_shape(dblp_key)?;
        let url = format!("{}/rec/{}.bib", self.config.base_url, dblp_key);
        let (status, body) = self.get_bytes(&url)?;
        match status {
            200 => String::from_utf8(body)
                .map_err(|_| DblpError::Decode("record is not valid UTF-8".to_owned())),
            404 => Err(DblpError::InvalidKey {
                key: dblp_key.to_owned(),
            }),
            status => Err(DblpError::Http { status }),
        }
    }

    fn search_api(
        &self,
        endpoint: &str,
        query: &str,
        max_results: usize,
    ) -> Result<Vec<u8>, DblpError> {
        if query.trim().is_empty() {
            return Err(DblpError::EmptyQuery);
        }
        let qs = url::form_urlencoded::Serializer::new(String::new())
            .append_pair("q", query.trim())
            .append_pair("format", "json")
            .append_pair("h", &max_results.to_string())
            .finish();
        let url = format!("{}/{}?{}", self.config.base_url, endpoint, qs);
        let (status, body) = self.get_bytes(&url)?;
        if status != 200 {
            return Err(DblpError::Http { status });
        }
        Ok(body)
    }

    /// Cache-aware GET with politeness spacing. Only 200 responses are cached.
    fn get_bytes(&self, url: &str) -> Result<(u16, Vec<u8>), DblpError> {
        if let Some(cache) = &self.cache {
            if let Some(body) = cache.lock().unwrap().get(url) {
                log::debug!("cache hit: {url}");
                return Ok((200, body.clone()));
            }
        }
        let attempts = if self.config.retry_on_timeout { 2 } else { 1 };
        let mut last_err = None;
        for attempt in 0..attempts {
            self.pace();
            let started = Instant::now();
            let outcome = self.send(url);
            *self.last_request.lock().unwrap() = Some(Instant::now());
            match outcome {
                Ok((status, body)) => {
                    log::debug!("GET {url} -> {status} ({} bytes)", body.len());
                    if status == 200 {
                        if let Some(cache) = &self.cache {
                            cache.lock().unwrap().put(url.to_owned(), body.clone());
                        }
                    }
                    return Ok((status, body));
                }
                Err(err) => {
                    let err = self.map_transport_error(err, started.elapsed());
                    let timed_out = matches!(err, DblpError::Timeout { .. });
                    log::warn!("GET {url} failed (attempt {}): {err}", attempt + 1);
                    last_err = Some(err);
                    if !timed_out {
                        break;
                    }
                }
            }
        }
        Err(last_err.expect("at least one attempt"))
    }

    fn send(&self, url: &str) -> Result<(u16, Vec<u8>), ureq::Error> {
        let mut response = self.agent.get(url).call()?;
        let status = response.status().as_u16();
        let body = response.body_mut().read_to_vec()?;
        Ok((status, body))
    }

    fn pace(&self) {
        let spacing = self.config.min_request_spacing;
        if spacing.is_zero() {
            return;
        }
        let last = *self.last_request.lock().unwrap();
        if let Some(last) = last {
            let elapsed = last.elapsed();
            if elapsed < spacing {
                std::thread::sleep(spacing - elapsed);
            }
        }
    }

    fn map_transport_error(&self, err: ureq::Error, elapsed: Duration) -> DblpError {
        let timeout = DblpError::Timeout {
            elapsed,
            limit: self.config.timeout,
        };
        match err {
            ureq::Error::Timeout(_) => timeout,
            ureq::Error::Io(e)
                if matches!(
                    e.kind(),
                    std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
                ) =>
            {
                timeout
            }
            other => DblpError::Network(other.to_string()),
        }
    }
}

/// DBLP keys look like `conf/nips/VaswaniSPUJGKP17`: path-ish, no spaces.
/// A malformed key never reaches the network.
fn validate_key_shape(key: &str) -> Result<(), DblpError> {
    let bad = key.is_empty()
        || !key.contains('/')
        || key.contains(char::is_whitespace)
        || key.contains(['{', '}', ',', '"', '?', '#'])
        || key.contains("..");
    if bad {
        return Err(DblpError::InvalidKey {
            key: key.to_owned(),
        });
    }
    Ok(())
}

/// Pulls `result.hits.hit` out of a search response and normalizes the
/// API's quirks: the `hit` key is absent for zero results and a single hit
/// may arrive as a bare object instead of a one-element array.
fn decode_hits(body: &[u8]) -> Result<Vec<Value>, DblpError> {
    let root: Value =
        serde_json::from_slice(body).map_err(|e| DblpError::Decode(e.to_string()))?;
    let hits = &root["result"]["hits"];
    if hits.is_null() {
        return Err(DblpError::Decode("missing result.hits".to_owned()));
    }
    let infos = match &hits["hit"] {
        Value::Null => Vec::new(),
        Value::Array(items) => items.clone(),
        single @ Value::Object(_) => vec![single.clone()],
        other => {
            return Err(DblpError::Decode(format!(
                "unexpected hit shape: {other}"
            )))
        }
    };
    Ok(infos
        .into_iter()
        .map(|hit| hit.get("info").cloned().unwrap_or(hit))
        .collect())
}

/// Accepts both `"plain string"` and `{"@pid": ..., "text": "..."}` shapes.
fn extract_text(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Object(map) => map.get("text").and_then(Value::as_str).map(str::to_owned),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn decode_publication(info: &Value) -> Result<Publication, DblpError> {
    let dblp_key = info
        .get("key")
        .and_then(Value::as_str)
        .ok_or_else(|| DblpError::Decode("hit without key".to_owned()))?
        .to_owned();
    let title = info
        .get("title")
        .and_then(extract_text)
        .unwrap_or_default();
    let authors = match info.get("authors").map(|a| &a["author"]) {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items.iter().filter_map(extract_text).collect(),
        Some(single) => extract_text(single).into_iter().collect(),
    };
    let venue = match info.get("venue") {
        Some(Value::Array(parts)) => {
            let joined: Vec<String> = parts.iter().filter_map(extract_text).collect();
            (!joined.is_empty()).then(|| joined.join(", "))
        }
        Some(v) => extract_text(v),
        None => None,
    };
    let year = match info.get("year") {
        Some(Value::String(s)) => s.trim().parse().ok(),
        Some(Value::Number(n)) => n.as_i64().map(|y| y as i32),
        _ => None,
    };
    Ok(Publication {
        dblp_key,
        title,
        authors,
        venue,
        year,
        pub_type: info.get("type").and_then(extract_text),
        doi: info.get("doi").and_then(extract_text),
        url: info.get("url").and_then(extract_text),
    })
}
