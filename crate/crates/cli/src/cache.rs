//! Content-addressed count cache: one JSON file per entry under a cache
//! directory, keyed by the hash of the exact counting problem. Hits must be
//! indistinguishable from recomputation, so entries store the node count
//! alongside the total and the emitted report is reconstructed bit for bit.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheEntry {
    pub version: u32,
    pub key: String,
    pub total: u64,
    pub nodes: u64,
    pub timestamp_secs: u64,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> anyhow::Result<Cache> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create cache directory {}", dir.display()))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    /// Key of a counting problem: the hash of its canonical JSON rendering.
    /// `serde_json` maps are sorted, so the rendering is canonical.
    pub fn key_for(problem: &serde_json::Value) -> String {
        let canonical = serde_json::to_string(problem).expect("value serializes");
        let mut hasher = Sha256::new();
        hasher.update(CACHE_VERSION.to_le_bytes());
        hasher.update(canonical.as_bytes());
        hex::encode(hasher.finalize())
    }

    fn path_of(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        let text = std::fs::read_to_string(self.path_of(key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        (entry.version == CACHE_VERSION && entry.key == key).then_some(entry)
    }

    pub fn put(&self, key: &str, total: u64, nodes: u64) -> anyhow::Result<()> {
        let entry = CacheEntry {
            version: CACHE_VERSION,
            key: key.to_string(),
            total,
            nodes,
            timestamp_secs: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        };
        let path = self.path_of(key);
        let text = serde_json::to_string_pretty(&entry)?;
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write cache entry {}", path.display()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_key_stability() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let problem = serde_json::json!({"b": 1, "a": [2, 3]});
        let key = Cache::key_for(&problem);
        // key ignores map insertion order
        let reordered = serde_json::json!({"a": [2, 3], "b": 1});
        assert_eq!(key, Cache::key_for(&reordered));
        assert!(cache.get(&key).is_none());
        cache.put(&key, 42, 99).unwrap();
        let entry = cache.get(&key).unwrap();
        assert_eq!(entry.total, 42);
        assert_eq!(entry.nodes, 99);
    }
}
