//! Hermetic HTTP fixture server for offline tests.
//!
//! A [`FixtureScript`] maps `(method, path-and-query)` pairs to canned
//! responses; [`serve_fixtures`] plays the script back on a real loopback
//! socket so the production client code path (TCP, HTTP parsing, timeouts)
//! is exercised without touching dblp.org. Routes match the request target
//! exactly as sent on the wire, so query strings must appear pre-encoded
//! (spaces as `+`).

use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde::Deserialize;

/// One canned response.
#[derive(Debug, Clone)]
pub struct FixtureRoute {
    pub method: String,
    /// Request target matched exactly: path plus query string, already encoded.
    pub path: String,
    pub status: u16,
    /// Applied after the request is read and before any response byte is written.
    pub delay: Duration,
    pub content_type: String,
    pub body: Vec<u8>,
}

impl FixtureRoute {
    pub fn get(path: impl Into<String>, status: u16, body: impl Into<Vec<u8>>) -> Self {
        let path = path.into();
        let content_type = guess_content_type(&path).to_owned();
        FixtureRoute {
            method: "GET".to_owned(),
            path,
            status,
            delay: Duration::ZERO,
            content_type,
            body: body.into(),
        }
    }

    pub fn ok(path: impl Into<String>, body: impl Into<Vec<u8>>) -> Self {
        Self::get(path, 200, body)
    }

    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn with_content_type(mut self, content_type: impl Into<String>) -> Self {
        self.content_type = content_type.into();
        self
    }
}

fn guess_content_type(path: &str) -> &'static str {
    let bare = path.split('?').next().unwrap_or(path);
    if bare.ends_with(".json") || bare.contains("format=json") {
        "application/json"
    } else if bare.ends_with(".bib") {
        "application/x-bibtex"
    } else {
        "text/plain"
    }
}

/// Ordered route table played back by the server.
#[derive(Debug, Default, Clone)]
pub struct FixtureScript {
    routes: Vec<FixtureRoute>,
}

#[derive(Deserialize)]
struct Manifest {
    routes: Vec<ManifestRoute>,
}

#[derive(Deserialize)]
struct ManifestRoute {
    #[serde(default)]
    method: Option<String>,
    path: String,
    #[serde(default)]
    status: Option<u16>,
    #[serde(default)]
    delay_ms: Option<u64>,
    #[serde(default)]
    body: Option<String>,
    #[serde(default)]
    body_file: Option<String>,
    #[serde(default)]
    content_type: Option<String>,
}

impl FixtureScript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, route: FixtureRoute) -> &mut Self {
        self.routes.push(route);
        self
    }

    pub fn with(mut self, route: FixtureRoute) -> Self {
        self.routes.push(route);
        self
    }

    pub fn routes(&self) -> &[FixtureRoute] {
        &self.routes
    }

    /// Loads a JSON manifest: `{"routes":[{"path": "...", "body_file": "...", ...}]}`.
    /// `body_file` is resolved relative to the manifest's directory. Exactly one
    /// of `body` / `body_file` must be present per route.
    pub fn from_manifest(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref();
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let text = std::fs::read_to_string(path)?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{path:?}: {e}")))?;
        let mut script = FixtureScript::new();
        for r in manifest.routes {
            let body = match (r.body, r.body_file) {
                (Some(inline), None) => inline.into_bytes(),
                (None, Some(file)) => std::fs::read(dir.join(&file))?,
                _ => {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("route {}: need exactly one of body/body_file", r.path),
                    ))
                }
            };
            let mut route = FixtureRoute::get(r.path, r.status.unwrap_or(200), body);
            if let Some(method) = r.method {
                route.method = method;
            }
            if let Some(ms) = r.delay_ms {
                route.delay = Duration::from_millis(ms);
            }
            if let Some(ct) = r.content_type {
                route.content_type = ct;
            }
            script.push(route);
        }
        Ok(script)
    }
}

/// Handle to a running fixture server. Shuts down on drop.
pub struct FixtureServer {
    addr: SocketAddr,
    log: Arc<Mutex<Vec<String>>>,
    shutdown: Arc<AtomicBool>,
    thread: Option<thread::JoinHandle<()>>,
}

/// Binds `127.0.0.1:port` (0 picks an ephemeral port) and serves `script`
/// on a background thread. Requests are handled strictly one at a time.
pub fn serve_fixtures(script: FixtureScript, port: u16) -> io::Result<FixtureServer> {
    let listener = TcpListener::bind(("127.0.0.1", port))?;
    let addr = listener.local_addr()?;
    let log = Arc::new(Mutex::new(Vec::new()));
    let shutdown = Arc::new(AtomicBool::new(false));
    let thread = {
        let log = Arc::clone(&log);
        let shutdown = Arc::clone(&shutdown);
        thread::spawn(move || accept_loop(listener, script, log, shutdown))
    };
    Ok(FixtureServer {
        addr,
        log,
        shutdown,
        thread: Some(thread),
    })
}

impl FixtureServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Snapshot of served requests as `"METHOD target"` lines, arrival order.
    pub fn access_log(&self) -> Vec<String> {
        self.log.lock().unwrap().clone()
    }

    pub fn request_count(&self) -> usize {
        self.log.lock().unwrap().len()
    }

    /// Stops accepting. Does not join the worker: a handler may be mid-delay
    /// and the wake connection only unblocks `accept`.
    pub fn shutdown(&mut self) {
        if self.shutdown.swap(true, Ordering::SeqCst) {
            return;
        }
        let _ = TcpStream::connect(self.addr);
        if let Some(thread) = self.thread.take() {
            if thread.is_finished() {
                let _ = thread.join();
            }
        }
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        self.shutdown();
    }
}

fn accept_loop(
    listener: TcpListener,
    script: FixtureScript,
    log: Arc<Mutex<Vec<String>>>,
    shutdown: Arc<AtomicBool>,
) {
    for stream in listener.incoming() {
        if shutdown.load(Ordering::SeqCst) {
            break;
        }
        match stream {
            Ok(stream) => handle_connection(stream, &script, &log),
            Err(_) => break,
        }
    }
}

fn handle_connection(mut stream: TcpStream, script: &FixtureScript, log: &Mutex<Vec<String>>) {
    let _ = stream.set_read_timeout(Some(Duration::from_secs(5)));
    let Some((method, target)) = read_request_head(&mut stream) else {
        return;
    };
    log.lock().unwrap().push(format!("{method} {target}"));
    let route = script
        .routes()
        .iter()
        .find(|r| r.method.eq_ignore_ascii_case(&method) && r.path == target);
    // Client may have timed out and hung up during the delay; write errors
    // are expected there and must not kill the accept loop.
    match route {
        Some(route) => {
            if !route.delay.is_zero() {
                thread::sleep(route.delay);
            }
            let _ = write_response(
                &mut stream,
                route.status,
                &route.content_type,
                &route.body,
            );
        }
        None => {
            let body = format!("fixture-miss: {method} {target}");
            let _ = write_response(&mut stream, 404, "text/plain", body.as_bytes());
        }
    }
}

/// Reads up to the blank line ending the header block and returns
/// `(method, request-target)`. Request bodies are not supported.
fn read_request_head(stream: &mut TcpStream) -> Option<(String, String)> {
    let mut buf = Vec::with_capacity(1024);
    let mut chunk = [0u8; 512];
    while !buf.windows(4).any(|w| w == b"\r\n\r\n") {
        if buf.len() > 16 * 1024 {
            return None;
        }
        match stream.read(&mut chunk) {
            Ok(0) => return None,
            Ok(n) => buf.extend_from_slice(&chunk[..n]),
            Err(_) => return None,
        }
    }
    let head = String::from_utf8_lossy(&buf);
    let request_line = head.lines().next()?;
    let mut parts = request_line.split_whitespace();
    let method = parts.next()?.to_owned();
    let target = parts.next()?.to_owned();
    Some((method, target))
}

fn write_response(
    stream: &mut TcpStream,
    status: u16,
    content_type: &str,
    body: &[u8],
) -> io::Result<()> {
    let reason = match status {
        200 => "OK",
        400 => "Bad Request",
        404 => "Not Found",
        429 => "Too Many Requests",
        500 => "Internal Server Error",
        503 => "Service Unavailable",
        _ => "Status",
    };
    let head = format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: {content_type}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(head.as_bytes())?;
    stream.write_all(body)?;
    stream.flush()
}

/// Convenience for tests that only need literal routes.
pub fn script_from_pairs<I, P, B>(pairs: I) -> FixtureScript
where
    I: IntoIterator<Item = (P, B)>,
    P: Into<String>,
    B: Into<Vec<u8>>,
{
    let mut script = FixtureScript::new();
    for (path, body) in pairs {
        script.push(FixtureRoute::ok(path, body));
    }
    script
}

#[allow(dead_code)]
fn _route_table_is_send() {
    fn assert_send<T: Send>() {}
    assert_send::<FixtureScript>();
    assert_send::<HashMap<String, FixtureRoute>>();
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::BufRead;

    fn raw_get(addr: SocketAddr, target: &str) -> (u16, Vec<u8>) {
        let mut stream = TcpStream::connect(addr).unwrap();
        write!(stream, "GET {target} HTTP/1.1\r\nHost: x\r\n\r\n").unwrap();
        let mut reader = io::BufReader::new(stream);
        let mut status_line = String::new();
        reader.read_line(&mut status_line).unwrap();
        let status: u16 = status_line.split_whitespace().nth(1).unwrap().parse().unwrap();
        let mut line = String::new();
        loop {
            line.clear();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" {
                break;
            }
        }
        let mut body = Vec::new();
        reader.read_to_end(&mut body).unwrap();
        (status, body)
    }

    #[test]
    fn serves_matched_route_and_logs_access() {
        let script = FixtureScript::new().with(FixtureRoute::ok("/rec/a/B.bib", "@article{x,}\n"));
        let mut server = serve_fixtures(script, 0).unwrap();
        let (status, body) = raw_get(server.addr(), "/rec/a/B.bib");
        assert_eq!(status, 200);
        assert_eq!(body, b"@article{x,}\n");
        assert_eq!(server.access_log(), vec!["GET /rec/a/B.bib".to_owned()]);
        server.shutdown();
    }

    #[test]
    fn unmatched_route_gets_distinguishable_404() {
        let server = serve_fixtures(FixtureScript::new(), 0).unwrap();
        let (status, body) = raw_get(server.addr(), "/nope?q=x");
        assert_eq!(status, 404);
        assert_eq!(body, b"fixture-miss: GET /nope?q=x");
    }

    #[test]
    fn delay_is_applied_before_response() {
        let script = FixtureScript::new()
            .with(FixtureRoute::ok("/slow", "late").with_delay(Duration::from_millis(300)));
        let server = serve_fixtures(script, 0).unwrap();
        let start = std::time::Instant::now();
        let (status, body) = raw_get(server.addr(), "/slow");
        assert!(start.elapsed() >= Duration::from_millis(300));
        assert_eq!((status, body.as_slice()), (200, b"late".as_slice()));
    }

    #[test]
    fn occupied_port_is_a_startup_error() {
        let server = serve_fixtures(FixtureScript::new(), 0).unwrap();
        let err = serve_fixtures(FixtureScript::new(), server.addr().port());
        assert!(err.is_err());
    }

    #[test]
    fn abandoned_connection_does_not_kill_the_loop() {
        let script = FixtureScript::new()
            .with(FixtureRoute::ok("/slow", "x").with_delay(Duration::from_millis(200)))
            .with(FixtureRoute::ok("/fast", "y"));
        let server = serve_fixtures(script, 0).unwrap();
        {
            let mut stream = TcpStream::connect(server.addr()).unwrap();
            write!(stream, "GET /slow HTTP/1.1\r\nHost: x\r\n\r\n").unwrap();
            // Hang up immediately; the delayed write must hit a dead socket.
        }
        let (status, body) = raw_get(server.addr(), "/fast");
        assert_eq!((status, body.as_slice()), (200, b"y".as_slice()));
        assert_eq!(server.request_count(), 2);
    }
}
