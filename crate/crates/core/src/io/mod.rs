//! File formats: CSV tables for edges, nodes, circulation, scores, activity
//! and the merged analysis table; newline-delimited JSON for posts; and the
//! seeded synthetic corpus generator.
//!
//! All files are UTF-8 with LF line endings and exact header rows. Parsers
//! reject malformed rows and report the 1-based line number.

pub mod synth;
mod tables;
mod tweets;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use tables::{
    merge, parse_activity, parse_circulation, parse_edges, parse_merged, parse_nodes, parse_scores,
    write_activity, write_circulation, write_edges, write_merged, write_nodes, write_scores,
    CirculationRow, MergeOutcome, MergedRow, ScoreRow, ACTIVITY_HEADER, CIRCULATION_HEADER,
    EDGES_HEADER, MERGED_COLUMNS, MERGED_HEADER, NODES_HEADER, SCORES_HEADER,
};
pub use tweets::{parse_tweets, parse_tweets_str, write_tweets, TweetLine};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}:{line}: duplicate edge {src} -> {dst}")]
    DuplicateEdge {
        path: String,
        line: u64,
        src: String,
        dst: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl DataError {
    pub(crate) fn parse(path: &str, line: u64, message: impl Into<String>) -> Self {
        DataError::Parse {
            path: path.to_owned(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Line number for parse-type errors.
    pub fn line(&self) -> Option<u64> {
        match self {
            DataError::Parse { line, .. } | DataError::DuplicateEdge { line, .. } => Some(*line),
            DataError::Io { .. } => None,
        }
    }
}

/// Decimal rendering with 17 significant digits, which round-trips every
/// finite `f64`. Zero is written as `0`.
pub fn format_full(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .expect("scientific format has an exponent");
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, DataError> {
    std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))
}

pub(crate) fn write_string(path: &Path, contents: &str) -> Result<(), DataError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| DataError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| DataError::io(path, e))
}

/// Set of input paths for one analysis run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IngestManifest {
    pub edges_path: PathBuf,
    pub nodes_path: PathBuf,
    pub tweets_path: PathBuf,
    pub circulation_path: PathBuf,
    pub window_start: Option<chrono::DateTime<chrono::Utc>>,
    pub window_end: Option<chrono::DateTime<chrono::Utc>>,
}

impl IngestManifest {
    /// Checks that every input is a readable file and the window is ordered.
    pub fn validate(&self) -> Result<(), String> {
        for (role, p) in [
            ("edges", &self.edges_path),
            ("nodes", &self.nodes_path),
            ("tweets", &self.tweets_path),
            ("circulation", &self.circulation_path),
        ] {
            if let Err(e) = std::fs::File::open(p) {
                return Err(format!("{role} file {}: {e}", p.display()));
            }
        }
        if let (Some(s), Some(e)) = (self.window_start, self.window_end) {
            if s >= e {
                return Err(format!("window start {s} is not before window end {e}"));
            }
        }
        Ok(())
    }
}
