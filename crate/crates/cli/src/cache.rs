//! On-disk cache for the expensive per-mesh fields (Robin coefficients and
//! nodal variances), keyed by a hash of the mesh and the parameters that
//! produced them. Values are stored in shortest round-trip decimal form, so
//! a cache hit is bit-identical to a recomputation.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use grf_core::mesh::{serialize_mesh, Mesh};

pub struct Cache {
    dir: Option<PathBuf>,
}

pub fn mesh_hash(mesh: &Mesh) -> String {
    hex(&Sha256::digest(serialize_mesh(mesh).as_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    fn path(&self, prefix: &str, key: &str) -> Option<PathBuf> {
        let digest = hex(&Sha256::digest(key.as_bytes()));
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{prefix}-{}.txt", &digest[..32])))
    }

    /// Stored vector for `key`, if present and of the expected length.
    pub fn load(&self, prefix: &str, key: &str, len: usize) -> Option<Vec<f64>> {
        let path = self.path(prefix, key)?;
        let text = fs::read_to_string(&path).ok()?;
        let mut lines = text.lines();
        if lines.next()? != key {
            log::warn!("cache file {} has a different key; ignoring", path.display());
            return None;
        }
        let values: Result<Vec<f64>, _> = lines.map(str::parse::<f64>).collect();
        match values {
            Ok(v) if v.len() == len => {
                log::info!("cache hit {}", path.display());
                Some(v)
            }
            _ => {
                log::warn!("cache file {} is damaged; ignoring", path.display());
                None
            }
        }
    }

    pub fn store(&self, prefix: &str, key: &str, values: &[f64]) -> Result<()> {
        let Some(path) = self.path(prefix, key) else {
            return Ok(());
        };
        write_atomic(&path, &render(key, values))
    }
}

fn render(key: &str, values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 20 + key.len() + 1);
    out.push_str(key);
    out.push('\n');
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
