//! Content-addressed disk cache for chat completions.
//!
//! The key hashes everything that determines a completion at temperature
//! zero: model name, rendered messages, and sampling parameters. Entries
//! are immutable, so concurrent writers racing on the same key write the
//! same bytes and the race is benign.

use super::client::ChatMessage;
use crate::engine::ReasonerError;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    model: String,
    temperature: f64,
    max_tokens: u32,
    messages: Vec<ChatMessage>,
    response: String,
    created_at: u64,
}

#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, ReasonerError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ResponseCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hex digest over the full request identity.
    pub fn key(
        &self,
        model: &str,
        messages: &[ChatMessage],
        temperature: f64,
        max_tokens: u32,
    ) -> String {
        let payload = serde_json::json!({
            "model": model,
            "messages": messages,
            "temperature": temperature,
            "max_tokens": max_tokens,
        });
        let bytes = serde_json::to_vec(&payload).expect("serializable payload");
        hex::encode(Sha256::digest(&bytes))
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let text = fs::read_to_string(self.path_for(key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        Some(entry.response)
    }

    pub fn put(
        &self,
        key: &str,
        model: &str,
        messages: &[ChatMessage],
        temperature: f64,
        max_tokens: u32,
        response: &str,
    ) -> Result<(), ReasonerError> {
        let entry = CacheEntry {
            key: key.to_string(),
            model: model.to_string(),
            temperature,
            max_tokens,
            messages: messages.to_vec(),
            response: response.to_string(),
            created_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let text = serde_json::to_string_pretty(&entry).expect("serializable entry");
        fs::write(self.path_for(key), text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::client::ChatMessage;

    fn msg(content: &str) -> Vec<ChatMessage> {
        vec![ChatMessage::user(content)]
    }

    #[test]
    fn keys_differ_when_any_ingredient_differs() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path()).unwrap();
        let base = cache.key("m", &msg("hello"), 0.0, 64);
        assert_eq!(base, cache.key("m", &msg("hello"), 0.0, 64));
        assert_ne!(base, cache.key("m2", &msg("hello"), 0.0, 64));
        assert_ne!(base, cache.key("m", &msg("other"), 0.0, 64));
        assert_ne!(base, cache.key("m", &msg("hello"), 0.5, 64));
        assert_ne!(base, cache.key("m", &msg("hello"), 0.0, 65));
    }

    #[test]
    fn entries_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path()).unwrap();
        let messages = msg("hello");
        let key = cache.key("m", &messages, 0.0, 64);
        assert_eq!(cache.get(&key), None);
        cache.put(&key, "m", &messages, 0.0, 64, "world").unwrap();
        assert_eq!(cache.get(&key), Some("world".to_string()));
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
    }
}
