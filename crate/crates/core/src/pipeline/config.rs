//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! input.edges = edges.csv
//! input.nodes = nodes.csv
//! input.tweets = tweets.jsonl
//! input.circulation = circulation.csv
//! window.start = 2018-03-23T00:00:00Z      # optional
//! window.end = 2018-04-06T00:00:00Z        # optional
//! tsm.involvement = 1.0
//! tsm.max_iters = 100
//! tsm.delta = 1e-6
//! tsm.aggregate_followers = true
//! stepwise.p_enter = 0.05
//! stepwise.p_remove = 0.10
//! regress.dvs = avg_likes,avg_retweets,avg_replies
//! regress.blocks = circulation;trustworthiness;quantity_of_tweets,skillfulness
//! output.dir = out
//! ```
//!
//! Relative paths resolve against the directory holding the config file.
//! Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Serialize;

use crate::io::IngestManifest;
use crate::regression::StepwiseConfig;
use crate::tsm::TsmConfig;

pub const DEFAULT_DVS: [&str; 3] = ["avg_likes", "avg_retweets", "avg_replies"];

pub fn default_blocks() -> Vec<Vec<String>> {
    vec![
        vec!["circulation".into()],
        vec!["trustworthiness".into()],
        vec!["quantity_of_tweets".into(), "skillfulness".into()],
    ]
}

/// `a;b,c` -> `[[a], [b, c]]`.
pub fn parse_blocks(s: &str) -> Result<Vec<Vec<String>>, String> {
    let blocks: Vec<Vec<String>> = s
        .split(';')
        .map(|b| {
            b.split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(String::from)
                .collect()
        })
        .collect();
    if blocks.iter().any(Vec::is_empty) {
        return Err(format!("blocks {s:?} contain an empty block"));
    }
    Ok(blocks)
}

pub fn parse_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect()
}

pub fn parse_time(s: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| format!("bad timestamp {s:?}: {e}"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub manifest: IngestManifest,
    pub tsm: TsmConfig,
    pub aggregate_followers: bool,
    pub stepwise: StepwiseConfig,
    pub dvs: Vec<String>,
    pub blocks: Vec<Vec<String>>,
    pub output_dir: PathBuf,
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| format!("config {}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base).map_err(|e| format!("config {}: {e}", path.display()))
    }

    /// Parses config text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, String> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let k = k.trim().to_owned();
            if kv.insert(k.clone(), v.trim().to_owned()).is_some() {
                return Err(format!("line {}: duplicate key {k}", i + 1));
            }
        }

        let mut take = |k: &str| kv.remove(k);
        let path = |k: &str, v: Option<String>| -> Result<PathBuf, String> {
            let v = v.ok_or_else(|| format!("missing key {k}"))?;
            Ok(base.join(v))
        };
        let num = |k: &str, v: Option<String>, d: f64| -> Result<f64, String> {
            v.map_or(Ok(d), |s| s.parse().map_err(|e| format!("{k}: {e}")))
        };

        let manifest = IngestManifest {
            edges_path: path("input.edges", take("input.edges"))?,
            nodes_path: path("input.nodes", take("input.nodes"))?,
            tweets_path: path("input.tweets", take("input.tweets"))?,
            circulation_path: path("input.circulation", take("input.circulation"))?,
            window_start: take("window.start").map(|s| parse_time(&s)).transpose()?,
            window_end: take("window.end").map(|s| parse_time(&s)).transpose()?,
        };
        let d = TsmConfig::default();
        let max_iters = match take("tsm.max_iters") {
            Some(s) => s.parse().map_err(|e| format!("tsm.max_iters: {e}"))?,
            None => d.max_iters,
        };
        let tsm = TsmConfig {
            involvement: num("tsm.involvement", take("tsm.involvement"), d.involvement)?,
            max_iters,
            delta: num("tsm.delta", take("tsm.delta"), d.delta)?,
        };
        tsm.validate().map_err(|e| e.to_string())?;
        let aggregate_followers = match take("tsm.aggregate_followers").as_deref() {
            None | Some("false") => false,
            Some("true") => true,
            Some(other) => {
                return Err(format!(
                    "tsm.aggregate_followers: expected true or false, got {other:?}"
                ))
            }
        };
        let sd = StepwiseConfig::default();
        let stepwise = StepwiseConfig {
            p_enter: num("stepwise.p_enter", take("stepwise.p_enter"), sd.p_enter)?,
            p_remove: num("stepwise.p_remove", take("stepwise.p_remove"), sd.p_remove)?,
        };
        stepwise.validate().map_err(|e| e.to_string())?;
        let dvs = take("regress.dvs")
            .map(|s| parse_list(&s))
            .unwrap_or_else(|| DEFAULT_DVS.iter().map(|s| s.to_string()).collect());
        if dvs.is_empty() {
            return Err("regress.dvs is empty".into());
        }
        let blocks = match take("regress.blocks") {
            Some(s) => parse_blocks(&s)?,
            None => default_blocks(),
        };
        let output_dir = base.join(take("output.dir").unwrap_or_else(|| "out".into()));

        if let Some(k) = kv.keys().next() {
            return Err(format!("unknown key {k}"));
        }
        Ok(Self {
            manifest,
            tsm,
            aggregate_followers,
            stepwise,
            dvs,
            blocks,
            output_dir,
        })
    }
}
