//! On-disk cache of density tables.
//!
//! Tables live as JSON under `$SUBRQA_CACHE_DIR`, or `~/.cache/subrqa` when
//! the variable is unset. The file name encodes the normalized substitution
//! and the estimator scales.

use std::fs;
use std::path::{Path, PathBuf};

use crate::densities::{self, DensityTable, ReconstructionConfig};
use crate::error::Result;
use crate::substitution::Substitution;

pub const CACHE_ENV: &str = "SUBRQA_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CachePolicy {
    /// Read a matching entry if present, write after computing.
    #[default]
    Use,
    /// Never read or write.
    Disabled,
}

pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(dir);
    }
    let home = std::env::var_os("HOME").map_or_else(std::env::temp_dir, PathBuf::from);
    home.join(".cache").join("subrqa")
}

pub fn cache_file(dir: &Path, s: &Substitution, cfg: &ReconstructionConfig) -> PathBuf {
    let norm = s.normalize().0;
    let name: String = norm
        .to_string()
        .chars()
        .filter_map(|c| match c {
            '0' | '1' => Some(c),
            ',' => Some('_'),
            '-' => Some('-'),
            _ => None,
        })
        .collect();
    dir.join(format!(
        "{name}__{}_{}_{}_{}.json",
        cfg.scales.0, cfg.scales.1, cfg.pair_n, cfg.scan_n
    ))
}

fn read(path: &Path, s: &Substitution, cfg: &ReconstructionConfig) -> Option<DensityTable> {
    let text = fs::read_to_string(path).ok()?;
    let table: DensityTable = serde_json::from_str(&text).ok()?;
    (table.subst == s.normalize().0 && &table.config == cfg).then_some(table)
}

/// Load a cached table or reconstruct (and store) it, using `dir`.
pub fn load_or_reconstruct_in(
    dir: &Path,
    s: &Substitution,
    cfg: &ReconstructionConfig,
    policy: CachePolicy,
) -> Result<DensityTable> {
    let path = cache_file(dir, s, cfg);
    if policy == CachePolicy::Use {
        if let Some(t) = read(&path, s, cfg) {
            return Ok(t);
        }
    }
    let table = densities::reconstruct_base_with(s, cfg)?;
    if policy == CachePolicy::Use {
        // a cache that cannot be written is not an error
        if fs::create_dir_all(dir).is_ok() {
            if let Ok(json) = serde_json::to_string_pretty(&table) {
                let tmp = path.with_extension("json.tmp");
                if fs::write(&tmp, json).is_ok() {
                    let _ = fs::rename(&tmp, &path);
                }
            }
        }
    }
    Ok(table)
}

pub fn load_or_reconstruct(
    s: &Substitution,
    cfg: &ReconstructionConfig,
    policy: CachePolicy,
) -> Result<DensityTable> {
    load_or_reconstruct_in(&cache_dir(), s, cfg, policy)
}
