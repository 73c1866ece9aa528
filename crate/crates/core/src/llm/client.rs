//! Blocking chat-completions client with caching, retries, and rate
//! limiting.
//!
//! The wire shape is the widely implemented one: POST
//! `{base_url}/chat/completions` with `model`, `messages`, `temperature`,
//! and `max_tokens`; the completion text sits at
//! `choices[0].message.content`. Any endpoint speaking this shape works,
//! including local inference servers.

use super::cache::ResponseCache;
use crate::engine::ReasonerError;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Connection and sampling settings for one endpoint.
#[derive(Debug, Clone)]
pub struct LlmConfig {
    pub base_url: String,
    pub model_name: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub api_key_env: String,
    pub request_timeout: Duration,
    pub max_retries: u32,
    /// Requests per second; zero disables throttling.
    pub rate_limit: f64,
}

impl LlmConfig {
    pub fn new(base_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        LlmConfig {
            base_url: base_url.into(),
            model_name: model_name.into(),
            temperature: 0.0,
            max_output_tokens: 1024,
            api_key_env: "LLM_API_KEY".to_string(),
            request_timeout: Duration::from_secs(60),
            max_retries: 2,
            rate_limit: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: "user".to_string(),
            content: content.into(),
        }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatResponseMessage,
}

#[derive(Deserialize)]
struct ChatResponseMessage {
    content: Option<String>,
}

/// Cache-first client. Identical prompts hit the network at most once per
/// cache directory lifetime; the counter tracks real HTTP requests.
pub struct ChatClient {
    cfg: LlmConfig,
    cache: ResponseCache,
    http: reqwest::blocking::Client,
    net_calls: AtomicU64,
    last_request: Mutex<Option<Instant>>,
}

impl ChatClient {
    pub fn new(cfg: LlmConfig, cache_dir: &Path) -> Result<Self, ReasonerError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(cfg.request_timeout)
            .build()
            .map_err(|e| ReasonerError::Transport(e.to_string()))?;
        Ok(ChatClient {
            cache: ResponseCache::new(cache_dir)?,
            cfg,
            http,
            net_calls: AtomicU64::new(0),
            last_request: Mutex::new(None),
        })
    }

    pub fn config(&self) -> &LlmConfig {
        &self.cfg
    }

    /// Number of HTTP requests actually sent, cache hits excluded.
    pub fn net_calls(&self) -> u64 {
        self.net_calls.load(Ordering::SeqCst)
    }

    fn throttle(&self) {
        if self.cfg.rate_limit <= 0.0 {
            return;
        }
        let min_gap = Duration::from_secs_f64(1.0 / self.cfg.rate_limit);
        let mut last = self.last_request.lock().expect("rate limiter lock");
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < min_gap {
                std::thread::sleep(min_gap - elapsed);
            }
        }
        *last = Some(Instant::now());
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/'))
    }

    /// Completes a single-turn prompt, consulting the cache first.
    pub fn complete(&self, messages: &[ChatMessage]) -> Result<String, ReasonerError> {
        let key = self.cache.key(
            &self.cfg.model_name,
            messages,
            self.cfg.temperature,
            self.cfg.max_output_tokens,
        );
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit);
        }
        let api_key =
            std::env::var(&self.cfg.api_key_env).map_err(|_| ReasonerError::AuthMissing {
                var: self.cfg.api_key_env.clone(),
            })?;
        let body = ChatRequest {
            model: &self.cfg.model_name,
            messages,
            temperature: self.cfg.temperature,
            max_tokens: self.cfg.max_output_tokens,
        };
        let url = self.endpoint();
        let mut attempt = 0;
        let text = loop {
            self.throttle();
            self.net_calls.fetch_add(1, Ordering::SeqCst);
            let sent = self
                .http
                .post(&url)
                .bearer_auth(&api_key)
                .json(&body)
                .send();
            let retryable_failure = match sent {
                Ok(resp) => {
                    let status = resp.status();
                    if status.is_success() {
                        let parsed: ChatResponse = resp.json().map_err(|e| {
                            ReasonerError::MalformedResponse {
                                what: format!("chat completion body: {e}"),
                            }
                        })?;
                        break parsed
                            .choices
                            .into_iter()
                            .next()
                            .and_then(|c| c.message.content)
                            .ok_or_else(|| ReasonerError::MalformedResponse {
                                what: "no choices[0].message.content in completion".to_string(),
                            })?;
                    }
                    let status_code = status.as_u16();
                    let body_text = resp.text().unwrap_or_default();
                    let err = ReasonerError::Http {
                        status: status_code,
                        body: body_text,
                    };
                    if status_code == 429 || status.is_server_error() {
                        Some(err)
                    } else {
                        return Err(err);
                    }
                }
                Err(e) if e.is_timeout() || e.is_connect() || e.is_request() => {
                    Some(ReasonerError::Transport(e.to_string()))
                }
                Err(e) => return Err(ReasonerError::Transport(e.to_string())),
            };
            if let Some(err) = retryable_failure {
                if attempt >= self.cfg.max_retries {
                    return Err(err);
                }
                std::thread::sleep(Duration::from_millis(50 << attempt.min(4)));
                attempt += 1;
            }
        };
        self.cache.put(
            &key,
            &self.cfg.model_name,
            messages,
            self.cfg.temperature,
            self.cfg.max_output_tokens,
            &text,
        )?;
        Ok(text)
    }
}
