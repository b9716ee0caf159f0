#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

use serde_json::Value;

/// Minimal HTTP/1.1 server answering every request with `handler(body)`.
pub struct MockServer {
    pub url: String,
    pub hits: Arc<AtomicUsize>,
    pub max_concurrent: Arc<AtomicUsize>,
}

pub type Handler = dyn Fn(usize, &Value) -> (u16, String) + Send + Sync;

impl MockServer {
    pub fn start(handler: Box<Handler>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let hits = Arc::new(AtomicUsize::new(0));
        let active = Arc::new(AtomicUsize::new(0));
        let max_concurrent = Arc::new(AtomicUsize::new(0));
        let handler: Arc<Handler> = Arc::from(handler);
        let (h, a, m) = (hits.clone(), active.clone(), max_concurrent.clone());
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { continue };
                let (handler, h, a, m) = (handler.clone(), h.clone(), a.clone(), m.clone());
                thread::spawn(move || serve(stream, &*handler, &h, &a, &m));
            }
        });
        MockServer { url, hits, max_concurrent }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }
}

fn serve(stream: TcpStream, handler: &Handler, hits: &AtomicUsize, active: &AtomicUsize, max: &AtomicUsize) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
        return;
    }
    let mut length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap();
            }
        }
    }
    let mut body = vec![0u8; length];
    reader.read_exact(&mut body).unwrap();
    let n = hits.fetch_add(1, Ordering::SeqCst);
    let now = active.fetch_add(1, Ordering::SeqCst) + 1;
    max.fetch_max(now, Ordering::SeqCst);
    let json: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
    let (status, payload) = handler(n, &json);
    active.fetch_sub(1, Ordering::SeqCst);
    let mut stream = stream;
    let _ = write!(
        stream,
        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    );
    let _ = stream.flush();
}

/// Replies with `outputs[i] = "out:" + inputs[i]`.
pub fn echo(_: usize, body: &Value) -> (u16, String) {
    let outputs: Vec<String> =
        body["inputs"].as_array().unwrap().iter().map(|v| format!("out:{}", v.as_str().unwrap())).collect();
    (200, serde_json::json!({ "outputs": outputs }).to_string())
}

/// An address nothing listens on.
pub fn dead_endpoint() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    drop(listener);
    url
}
