//! On-disk cache of level reports keyed by level and configuration hash.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use super::{Config, LevelReport, PipelineError};

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

pub fn cache_path(dir: &Path, level: i64, config: &Config) -> PathBuf {
    dir.join(format!("level-{level}-{}.json", config.hash()))
}

/// Write the report atomically: temp file in the same directory, then rename.
pub fn cache_put(dir: &Path, report: &LevelReport, config: &Config) -> Result<PathBuf, PipelineError> {
    fs::create_dir_all(dir)?;
    let path = cache_path(dir, report.level, config);
    let tmp = dir.join(format!(
        ".level-{}-{}.{}.{}.tmp",
        report.level,
        config.hash(),
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let body = serde_json::to_vec_pretty(report).map_err(|e| PipelineError::Internal(e.to_string()))?;
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&body)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// `Ok(None)` on a miss; an unreadable or mismatched entry is an error, never a silent miss.
pub fn cache_get(dir: &Path, level: i64, config: &Config) -> Result<Option<LevelReport>, PipelineError> {
    let path = cache_path(dir, level, config);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let corrupt = || PipelineError::CacheCorrupt { path: path.clone() };
    let report: LevelReport = serde_json::from_slice(&bytes).map_err(|_| corrupt())?;
    if report.level != level || report.config != config.key() || report.schema != super::SCHEMA_VERSION {
        return Err(corrupt());
    }
    Ok(Some(report))
}
