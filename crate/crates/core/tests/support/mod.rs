//! Minimal in-process chat-completions server for wire tests.
//!
//! Accepts on a loopback port, parses one HTTP request per connection, and
//! answers with whatever the test's responder returns. Requests are logged
//! so tests can assert on the exact bodies sent.

#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

/// One captured request.
#[derive(Debug, Clone)]
pub struct SeenRequest {
    pub path: String,
    pub body: serde_json::Value,
}

impl SeenRequest {
    /// Content of the first user message in the request body.
    pub fn prompt(&self) -> String {
        self.body["messages"][0]["content"]
            .as_str()
            .unwrap_or_default()
            .to_string()
    }
}

/// What the responder wants sent back.
pub struct MockReply {
    pub status: u16,
    pub body: String,
}

impl MockReply {
    /// A successful completion whose text is `content`.
    pub fn content(content: &str) -> Self {
        let body = serde_json::json!({
            "choices": [{"message": {"role": "assistant", "content": content}}]
        });
        MockReply {
            status: 200,
            body: body.to_string(),
        }
    }

    pub fn status(status: u16, body: &str) -> Self {
        MockReply {
            status,
            body: body.to_string(),
        }
    }
}

type Responder = dyn Fn(u64, &SeenRequest) -> MockReply + Send + Sync;

pub struct MockServer {
    addr: std::net::SocketAddr,
    requests: Arc<Mutex<Vec<SeenRequest>>>,
    hits: Arc<AtomicU64>,
    shutdown: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl MockServer {
    /// Starts a server whose responder sees the zero-based hit index and
    /// the parsed request.
    pub fn start(responder: impl Fn(u64, &SeenRequest) -> MockReply + Send + Sync + 'static) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind loopback");
        listener.set_nonblocking(true).expect("nonblocking accept");
        let addr = listener.local_addr().expect("local addr");
        let requests: Arc<Mutex<Vec<SeenRequest>>> = Arc::default();
        let hits = Arc::new(AtomicU64::new(0));
        let shutdown = Arc::new(AtomicBool::new(false));
        let responder: Arc<Responder> = Arc::new(responder);

        let thread_requests = requests.clone();
        let thread_hits = hits.clone();
        let thread_shutdown = shutdown.clone();
        let handle = std::thread::spawn(move || loop {
            match listener.accept() {
                Ok((stream, _)) => {
                    let n = thread_hits.fetch_add(1, Ordering::SeqCst);
                    if let Some(seen) = handle_connection(stream, n, &responder) {
                        thread_requests.lock().expect("request log").push(seen);
                    }
                }
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                    if thread_shutdown.load(Ordering::SeqCst) {
                        break;
                    }
                    std::thread::sleep(Duration::from_millis(2));
                }
                Err(_) => break,
            }
        });

        MockServer {
            addr,
            requests,
            hits,
            shutdown,
            handle: Some(handle),
        }
    }

    /// Base URL for [`decompose_tom::llm::LlmConfig`].
    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Number of HTTP requests served so far.
    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::SeqCst)
    }

    pub fn requests(&self) -> Vec<SeenRequest> {
        self.requests.lock().expect("request log").clone()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(mut stream: TcpStream, n: u64, responder: &Arc<Responder>) -> Option<SeenRequest> {
    stream
        .set_read_timeout(Some(Duration::from_secs(5)))
        .ok()?;
    let mut reader = BufReader::new(stream.try_clone().ok()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line).ok()?;
    let path = request_line.split_whitespace().nth(1)?.to_string();
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).ok()?;
        let line = line.trim();
        if line.is_empty() {
            break;
        }
        if let Some(value) = line.to_ascii_lowercase().strip_prefix("content-length:") {
            content_length = value.trim().parse().unwrap_or(0);
        }
    }
    let mut raw = vec![0u8; content_length];
    reader.read_exact(&mut raw).ok()?;
    let body = serde_json::from_slice(&raw).unwrap_or(serde_json::Value::Null);
    let seen = SeenRequest { path, body };

    let reply = responder(n, &seen);
    let reason = if reply.status == 200 { "OK" } else { "Error" };
    let head = format!(
        "HTTP/1.1 {} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n",
        reply.status,
        reply.body.len()
    );
    stream.write_all(head.as_bytes()).ok()?;
    stream.write_all(reply.body.as_bytes()).ok()?;
    let _ = stream.flush();
    Some(seen)
}
