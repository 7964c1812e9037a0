//! Blocking JSON POST with bounded retries, shared by the remote clients.

use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug)]
pub(crate) enum HttpFailure {
    /// Retries exhausted on transport errors, 429 or 5xx.
    Unavailable { attempts: u32, reason: String },
    /// Non-retryable status or undecodable body.
    Rejected(String),
}

#[derive(Debug, Clone)]
pub(crate) struct HttpSettings {
    pub timeout: Duration,
    pub max_attempts: u32,
    pub backoff: Duration,
}

impl Default for HttpSettings {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(60),
            max_attempts: 3,
            backoff: Duration::from_millis(250),
        }
    }
}

pub(crate) fn agent(settings: &HttpSettings) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(settings.timeout))
        .http_status_as_error(false)
        .build()
        .into()
}

pub(crate) fn post_json<B: Serialize, R: DeserializeOwned>(
    agent: &ureq::Agent,
    settings: &HttpSettings,
    url: &str,
    api_key: Option<&str>,
    body: &B,
) -> Result<R, HttpFailure> {
    let attempts = settings.max_attempts.max(1);
    let mut last = String::new();
    for attempt in 1..=attempts {
        if attempt > 1 {
            std::thread::sleep(settings.backoff * 2u32.pow(attempt - 2));
        }
        let mut req = agent.post(url).header("Content-Type", "application/json");
        if let Some(key) = api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        match req.send_json(body) {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                if status == 429 || status >= 500 {
                    last = format!("HTTP {status}");
                    log::warn!("POST {url}: {last} (attempt {attempt}/{attempts})");
                    continue;
                }
                if !(200..300).contains(&status) {
                    let text = resp.body_mut().read_to_string().unwrap_or_default();
                    return Err(HttpFailure::Rejected(format!("HTTP {status}: {text}")));
                }
                return resp
                    .body_mut()
                    .read_json::<R>()
                    .map_err(|e| HttpFailure::Rejected(format!("bad response body: {e}")));
            }
            Err(e) => {
                last = e.to_string();
                log::warn!("POST {url}: {last} (attempt {attempt}/{attempts})");
            }
        }
    }
    Err(HttpFailure::Unavailable { attempts, reason: last })
}

#[cfg(test)]
pub(crate) mod mock {
    //! Single-threaded HTTP/1.1 responder for exercising the wire formats.

    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::sync::{Arc, Mutex};
    use std::thread::JoinHandle;

    #[derive(Debug, Clone)]
    pub struct Captured {
        pub path: String,
        pub authorization: Option<String>,
        pub body: serde_json::Value,
    }

    pub struct MockServer {
        pub url: String,
        pub requests: Arc<Mutex<Vec<Captured>>>,
        handle: Option<JoinHandle<()>>,
    }

    impl MockServer {
        /// Serves the given `(status, body)` replies in order, one per connection.
        pub fn start(replies: Vec<(u16, String)>) -> Self {
            let listener = TcpListener::bind("127.0.0.1:0").unwrap();
            let url = format!("http://{}", listener.local_addr().unwrap());
            let requests = Arc::new(Mutex::new(Vec::new()));
            let seen = Arc::clone(&requests);
            let handle = std::thread::spawn(move || {
                for (status, body) in replies {
                    let (stream, _) = listener.accept().unwrap();
                    let mut reader = BufReader::new(stream.try_clone().unwrap());
                    let mut request_line = String::new();
                    reader.read_line(&mut request_line).unwrap();
                    let path = request_line.split_whitespace().nth(1).unwrap_or("").to_string();
                    let mut len = 0usize;
                    let mut auth = None;
                    loop {
                        let mut line = String::new();
                        reader.read_line(&mut line).unwrap();
                        let line = line.trim_end();
                        if line.is_empty() {
                            break;
                        }
                        if let Some((k, v)) = line.split_once(':') {
                            match k.to_ascii_lowercase().as_str() {
                                "content-length" => len = v.trim().parse().unwrap(),
                                "authorization" => auth = Some(v.trim().to_string()),
                                _ => {}
                            }
                        }
                    }
                    let mut buf = vec![0u8; len];
                    reader.read_exact(&mut buf).unwrap();
                    seen.lock().unwrap().push(Captured {
                        path,
                        authorization: auth,
                        body: serde_json::from_slice(&buf).unwrap_or(serde_json::Value::Null),
                    });
                    let mut stream = stream;
                    write!(
                        stream,
                        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                        body.len()
                    )
                    .unwrap();
                    stream.flush().unwrap();
                }
            });
            Self {
                url,
                requests,
                handle: Some(handle),
            }
        }

        pub fn finish(mut self) -> Vec<Captured> {
            if let Some(h) = self.handle.take() {
                h.join().unwrap();
            }
            self.requests.lock().unwrap().clone()
        }
    }
}
