//! On-disk cache of reference solutions.
//!
//! Each entry is a text file: a magic line with the format version, a line
//! with the SHA-256 of the body, then the JSON body. Entries are written to a
//! temporary file and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{FracError, Result};
use crate::problem::ProblemSpec;
use crate::solver::{OptimalTriple, SolverConfig};

const MAGIC: &str = "FRACCTRL-REFERENCE";
const FORMAT_VERSION: u32 = 1;
const EXTENSION: &str = "ref";
/// Environment variable overriding the cache location.
pub const CACHE_DIR_ENV: &str = "FRACCTRL_CACHE_DIR";
/// Changes whenever solver output for a fixed input may change.
const CODE_TAG: &str = concat!(env!("CARGO_PKG_VERSION"), "+ref2");

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content hash of a problem description.
pub fn spec_digest(spec: &ProblemSpec) -> String {
    sha256_hex(&serde_json::to_vec(spec).expect("problem specs serialize"))
}

#[derive(Serialize)]
struct KeyMaterial<'a> {
    spec: &'a ProblemSpec,
    n_ref: usize,
    config: &'a SolverConfig,
    code: &'a str,
}

/// Cache key of a reference solve: the hash of the problem, the truncation,
/// the solver settings and the code version tag.
pub fn reference_key(spec: &ProblemSpec, n_ref: usize, config: &SolverConfig) -> String {
    let config = SolverConfig {
        n: n_ref,
        ..config.clone()
    };
    let material = KeyMaterial {
        spec,
        n_ref,
        config: &config,
        code: CODE_TAG,
    };
    sha256_hex(&serde_json::to_vec(&material).expect("key material serializes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedReference {
    pub key: String,
    pub spec: ProblemSpec,
    pub n_ref: usize,
    pub triple: OptimalTriple,
}

/// Outcome of checking one cache file.
#[derive(Debug, Clone, PartialEq)]
pub enum EntryStatus {
    Valid,
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryInfo {
    pub path: PathBuf,
    pub key: String,
    pub bytes: u64,
    /// `(alpha, theta, beta, n_ref)` for valid entries.
    pub summary: Option<(f64, f64, f64, usize)>,
    pub status: EntryStatus,
}

#[derive(Debug, Clone)]
pub struct ReferenceCache {
    dir: PathBuf,
}

impl ReferenceCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$FRACCTRL_CACHE_DIR`, else `$XDG_CACHE_HOME/fracctrl`, else
    /// `$HOME/.cache/fracctrl`, else a directory under the system temp dir.
    pub fn from_env() -> Self {
        let var = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        let dir = var(CACHE_DIR_ENV)
            .or_else(|| var("XDG_CACHE_HOME").map(|p| p.join("fracctrl")))
            .or_else(|| var("HOME").map(|p| p.join(".cache").join("fracctrl")))
            .unwrap_or_else(|| std::env::temp_dir().join("fracctrl-cache"));
        Self::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.{EXTENSION}"))
    }

    fn io(context: &str, path: &Path, e: std::io::Error) -> FracError {
        FracError::Cache(format!("{context} {}: {e}", path.display()))
    }

    fn encode(entry: &CachedReference) -> Result<Vec<u8>> {
        let body = serde_json::to_vec(entry).map_err(|e| FracError::Cache(format!("serialize: {e}")))?;
        let mut out = format!("{MAGIC} {FORMAT_VERSION}\nsha256 {}\n", sha256_hex(&body)).into_bytes();
        out.extend_from_slice(&body);
        Ok(out)
    }

    fn decode(bytes: &[u8]) -> std::result::Result<CachedReference, String> {
        let mut lines = bytes.splitn(3, |b| *b == b'\n');
        let magic = lines.next().ok_or("empty file")?;
        if magic != format!("{MAGIC} {FORMAT_VERSION}").as_bytes() {
            return Err("unknown header or format version".into());
        }
        let sum = lines.next().ok_or("missing checksum line")?;
        let sum = std::str::from_utf8(sum)
            .ok()
            .and_then(|s| s.strip_prefix("sha256 "))
            .ok_or("malformed checksum line")?;
        let body = lines.next().ok_or("missing body")?;
        if sha256_hex(body) != sum {
            return Err("checksum mismatch".into());
        }
        serde_json::from_slice(body).map_err(|e| format!("body does not parse: {e}"))
    }

    /// `Ok(None)` when absent; `Err` when present but unreadable or corrupt.
    pub fn load(&self, key: &str) -> Result<Option<CachedReference>> {
        let path = self.path_for(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Self::io("read", &path, e)),
        };
        let entry = Self::decode(&bytes).map_err(|e| FracError::Cache(format!("{}: {e}", path.display())))?;
        if entry.key != key {
            return Err(FracError::Cache(format!("{}: key does not match file name", path.display())));
        }
        Ok(Some(entry))
    }

    pub fn store(&self, entry: &CachedReference) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| Self::io("create", &self.dir, e))?;
        let path = self.path_for(&entry.key);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(|e| Self::io("create temp in", &self.dir, e))?;
        tmp.write_all(&Self::encode(entry)?)
            .map_err(|e| Self::io("write", tmp.path(), e))?;
        tmp.persist(&path).map_err(|e| Self::io("rename to", &path, e.error))?;
        Ok(path)
    }

    /// Returns the cached triple, or computes and stores it. Corrupt entries
    /// are recomputed and overwritten. The flag reports a cache hit.
    pub fn get_or_compute<F>(&self, spec: &ProblemSpec, n_ref: usize, config: &SolverConfig, compute: F) -> Result<(OptimalTriple, bool)>
    where
        F: FnOnce() -> Result<OptimalTriple>,
    {
        let key = reference_key(spec, n_ref, config);
        if let Ok(Some(entry)) = self.load(&key) {
            return Ok((entry.triple, true));
        }
        let triple = compute()?;
        let entry = CachedReference {
            key,
            spec: spec.clone(),
            n_ref,
            triple,
        };
        self.store(&entry)?;
        Ok((entry.triple, false))
    }

    fn entry_paths(&self) -> Result<Vec<PathBuf>> {
        let dir = match fs::read_dir(&self.dir) {
            Ok(d) => d,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Self::io("list", &self.dir, e)),
        };
        let mut paths: Vec<PathBuf> = dir
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == EXTENSION))
            .collect();
        paths.sort();
        Ok(paths)
    }

    fn inspect(path: &Path) -> EntryInfo {
        let key = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let (bytes, decoded) = match fs::read(path) {
            Ok(b) => (b.len() as u64, Self::decode(&b)),
            Err(e) => (0, Err(e.to_string())),
        };
        let decoded = decoded.and_then(|entry| {
            if entry.key == key {
                Ok(entry)
            } else {
                Err("key does not match file name".into())
            }
        });
        match decoded {
            Ok(entry) => EntryInfo {
                path: path.to_path_buf(),
                key,
                bytes,
                summary: Some((entry.spec.alpha, entry.spec.theta, entry.spec.beta, entry.n_ref)),
                status: EntryStatus::Valid,
            },
            Err(e) => EntryInfo {
                path: path.to_path_buf(),
                key,
                bytes,
                summary: None,
                status: EntryStatus::Corrupt(e),
            },
        }
    }

    /// All entries, each with its checksum verified.
    pub fn list(&self) -> Result<Vec<EntryInfo>> {
        Ok(self.entry_paths()?.iter().map(|p| Self::inspect(p)).collect())
    }

    /// Removes every entry and returns how many were deleted.
    pub fn clear(&self) -> Result<usize> {
        let paths = self.entry_paths()?;
        for p in &paths {
            fs::remove_file(p).map_err(|e| Self::io("remove", p, e))?;
        }
        Ok(paths.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Mode;
    use crate::solver::optimize;

    fn small_triple(spec: &ProblemSpec) -> OptimalTriple {
        optimize(spec, &SolverConfig::with_n(8, Mode::Direct)).unwrap()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ReferenceCache::new(dir.path());
        let spec = ProblemSpec::smooth_example(1.4);
        let config = SolverConfig::with_n(8, Mode::Direct);
        let (first, hit) = cache.get_or_compute(&spec, 8, &config, || Ok(small_triple(&spec))).unwrap();
        assert!(!hit);
        let (second, hit) = cache
            .get_or_compute(&spec, 8, &config, || panic!("must come from the cache"))
            .unwrap();
        assert!(hit);
        assert_eq!(first, second);
        let list = cache.list().unwrap();
        assert_eq!(list.len(), 1);
        assert_eq!(list[0].status, EntryStatus::Valid);
    }

    #[test]
    fn corruption_is_detected_and_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ReferenceCache::new(dir.path());
        let spec = ProblemSpec::smooth_example(1.6);
        let config = SolverConfig::with_n(8, Mode::Direct);
        cache.get_or_compute(&spec, 8, &config, || Ok(small_triple(&spec))).unwrap();
        let path = cache.list().unwrap()[0].path.clone();
        let mut bytes = fs::read(&path).unwrap();
        let last = bytes.len() - 2;
        bytes[last] ^= 0x01;
        fs::write(&path, bytes).unwrap();
        assert!(matches!(cache.list().unwrap()[0].status, EntryStatus::Corrupt(_)));
        assert!(cache.load(&reference_key(&spec, 8, &config)).is_err());
        let (_, hit) = cache.get_or_compute(&spec, 8, &config, || Ok(small_triple(&spec))).unwrap();
        assert!(!hit);
        assert_eq!(cache.list().unwrap()[0].status, EntryStatus::Valid);
    }

    #[test]
    fn key_depends_on_inputs() {
        let spec = ProblemSpec::smooth_example(1.4);
        let config = SolverConfig::default();
        let k = reference_key(&spec, 2048, &config);
        assert_eq!(k, reference_key(&spec, 2048, &SolverConfig { n: 17, ..config.clone() }));
        assert_ne!(k, reference_key(&spec, 4096, &config));
        assert_ne!(k, reference_key(&ProblemSpec::smooth_example(1.6), 2048, &config));
        let loose = SolverConfig {
            outer_tol: 1e-8,
            ..config
        };
        assert_ne!(k, reference_key(&spec, 2048, &loose));
    }

    #[test]
    fn empty_and_cleared_cache() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ReferenceCache::new(dir.path().join("missing"));
        assert!(cache.list().unwrap().is_empty());
        let cache = ReferenceCache::new(dir.path());
        let spec = ProblemSpec::smooth_example(1.4);
        let config = SolverConfig::with_n(8, Mode::Direct);
        cache.get_or_compute(&spec, 8, &config, || Ok(small_triple(&spec))).unwrap();
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.list().unwrap().is_empty());
    }
}
