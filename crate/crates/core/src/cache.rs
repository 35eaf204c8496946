//! On-disk cache of computed forms, one JSON document per `(family, n)`.
//!
//! Documents are written to a temporary file in the cache directory and then
//! renamed into place, so readers never observe a partial write. A cached
//! document is returned byte-for-byte; its `form` member can be checked
//! against a fresh computation with [`FormCache::verify`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::reducer::FamilySpec;
use crate::zeta_form::FormRecord;

pub const CACHE_ENV: &str = "ZETAFORGE_CACHE";
pub const DEFAULT_CACHE_DIR: &str = "zetaforge-cache";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cache entry {path} is not a valid document: {message}")]
    Malformed { path: PathBuf, message: String },
}

/// A cache document: whatever the producer wrote, plus a mandatory `form`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub manifest: Value,
    pub form: FormRecord,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, Value>,
}

/// First point where two byte strings differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ByteDiff {
    pub offset: usize,
    pub cached: String,
    pub fresh: String,
}

impl std::fmt::Display for ByteDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "first difference at byte {}: cached {:?} vs fresh {:?}", self.offset, self.cached, self.fresh)
    }
}

pub fn byte_diff(cached: &[u8], fresh: &[u8]) -> Option<ByteDiff> {
    let offset = cached.iter().zip(fresh).position(|(a, b)| a != b).or_else(|| {
        (cached.len() != fresh.len()).then_some(cached.len().min(fresh.len()))
    })?;
    let window = |s: &[u8]| {
        let end = (offset + 24).min(s.len());
        String::from_utf8_lossy(&s[offset.min(s.len())..end]).into_owned()
    };
    Some(ByteDiff { offset, cached: window(cached), fresh: window(fresh) })
}

/// Canonical bytes of a form record, used for byte-level comparisons.
pub fn canonical_form_bytes(rec: &FormRecord) -> Vec<u8> {
    serde_json::to_vec_pretty(rec).expect("form record serializes")
}

#[derive(Clone, Debug)]
pub struct FormCache {
    dir: PathBuf,
}

impl FormCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FormCache { dir: dir.into() }
    }

    /// Flag, then environment variable, then `./zetaforge-cache`.
    pub fn resolve(flag: Option<&Path>) -> Self {
        let dir = match flag {
            Some(p) => p.to_path_buf(),
            None => std::env::var_os(CACHE_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR)),
        };
        Self::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, spec: FamilySpec) -> PathBuf {
        self.dir.join(format!("{}-n{}.json", spec.family, spec.n))
    }

    /// Raw bytes and parsed entry, or `None` on a miss.
    pub fn load(&self, spec: FamilySpec) -> Result<Option<(Vec<u8>, CacheEntry)>, CacheError> {
        let path = self.path(spec);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let entry: CacheEntry = serde_json::from_slice(&bytes)
            .map_err(|e| CacheError::Malformed { path: path.clone(), message: e.to_string() })?;
        Ok(Some((bytes, entry)))
    }

    pub fn store(&self, spec: FamilySpec, bytes: &[u8]) -> Result<PathBuf, CacheError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| CacheError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let target = self.path(spec);
        let tmp = self.dir.join(format!(".{}-n{}.{}.tmp", spec.family, spec.n, std::process::id()));
        {
            let mut f = fs::File::create(&tmp).map_err(io(&tmp))?;
            f.write_all(bytes).map_err(io(&tmp))?;
            f.sync_all().map_err(io(&tmp))?;
        }
        fs::rename(&tmp, &target).map_err(io(&target))?;
        Ok(target)
    }

    /// Compare the cached form with a fresh record byte for byte.
    pub fn verify(&self, spec: FamilySpec, fresh: &FormRecord) -> Result<Option<ByteDiff>, CacheError> {
        let path = self.path(spec);
        let bytes = fs::read(&path).map_err(|source| CacheError::Io { path: path.clone(), source })?;
        let fresh_bytes = canonical_form_bytes(fresh);
        let cached_form = match serde_json::from_slice::<CacheEntry>(&bytes) {
            Ok(entry) => canonical_form_bytes(&entry.form),
            // an unparseable document is reported against its raw bytes
            Err(_) => bytes,
        };
        Ok(byte_diff(&cached_form, &fresh_bytes))
    }
}
