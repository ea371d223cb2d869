//! Batch stages behind the command-line tool: score, metrics, merge,
//! regress, the full pipeline, and synthetic corpus generation.
//!
//! Each `cmd_*` function reads its inputs, writes its outputs and returns
//! the in-memory result. Errors map onto process exit codes through
//! [`PipelineError::exit_code`]: 2 for usage and input problems, 3 when the
//! data make a computation undefined.

mod config;

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{
    default_blocks, parse_blocks, parse_list, parse_time, PipelineConfig, DEFAULT_DVS,
};

use crate::activity::{
    compute_activity, corpus_summary, ActivityTable, CorpusSummary, TweetRecord, Window,
};
use crate::graph::{GraphError, TrustGraph};
use crate::io::synth::{synth_corpus, write_corpus, CorpusFiles, SynthParams};
use crate::io::{
    merge, parse_activity, parse_circulation, parse_edges, parse_merged, parse_nodes, parse_scores,
    parse_tweets, write_activity, write_merged, write_scores, write_string, DataError,
    MergeOutcome, MergedRow, ScoreRow,
};
use crate::regression::{
    blockwise_stepwise, RegressionError, RegressionReport, ReportFormat, StepwiseConfig,
};
use crate::tsm::{aggregated_initialization, run_tsm, TrustScores, TsmConfig, TsmError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tsm(#[from] TsmError),
    #[error(transparent)]
    Activity(#[from] crate::activity::ActivityError),
    #[error("regression for {dv}: {source}")]
    Regression {
        dv: String,
        #[source]
        source: RegressionError,
    },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Tsm(TsmError::DegenerateGraph | TsmError::MissingFollowerCount(_)) => 3,
            PipelineError::Regression {
                source:
                    RegressionError::Collinear { .. }
                    | RegressionError::ZeroVariance(_)
                    | RegressionError::BadStatistic(_),
                ..
            } => 3,
            _ => 2,
        }
    }
}

fn regression_error(dv: &str, source: RegressionError) -> PipelineError {
    PipelineError::Regression {
        dv: dv.to_owned(),
        source,
    }
}

/// Builds the graph and runs the iteration, optionally seeding news
/// organizations with `1 / follower_count`.
pub fn score_graph(
    graph: &TrustGraph,
    cfg: &TsmConfig,
    aggregate_followers: bool,
) -> Result<TrustScores, PipelineError> {
    cfg.validate()?;
    let init = if aggregate_followers {
        Some(aggregated_initialization(graph)?)
    } else {
        None
    };
    let scores = run_tsm(graph, cfg, init.as_ref())?;
    if !scores.converged {
        log::warn!(
            "TSM stopped after {} iterations without converging (last change {:e})",
            scores.iterations_run,
            scores.final_delta
        );
    }
    Ok(scores)
}

#[derive(Debug, Clone)]
pub struct TsmArgs {
    pub edges: PathBuf,
    pub nodes: PathBuf,
    pub out: PathBuf,
    pub config: TsmConfig,
    pub aggregate_followers: bool,
}

pub fn cmd_tsm(args: &TsmArgs) -> Result<TrustScores, PipelineError> {
    args.config.validate()?;
    let edges = parse_edges(&args.edges)?;
    let nodes = parse_nodes(&args.nodes)?;
    let graph = TrustGraph::build(&edges, &nodes)?;
    let scores = score_graph(&graph, &args.config, args.aggregate_followers)?;
    write_scores(&args.out, &scores)?;
    log::info!(
        "scored {} nodes in {} iterations",
        scores.len(),
        scores.iterations_run
    );
    Ok(scores)
}

/// Observation window from optional bounds. A missing end defaults to the
/// latest post; a missing start to two weeks before the end.
pub fn resolve_window(
    tweets: &[TweetRecord],
    start: Option<DateTime<Utc>>,
    end: Option<DateTime<Utc>>,
) -> Result<Window, PipelineError> {
    let latest = tweets.iter().map(|t| t.timestamp).max();
    let window = match (start, end.or(latest)) {
        (Some(s), Some(e)) => Window::new(s, e)?,
        (None, Some(e)) => Window::two_weeks_ending(e),
        (Some(s), None) => Window::new(s, DateTime::<Utc>::MAX_UTC)?,
        (None, None) => Window::unbounded(),
    };
    Ok(window)
}

#[derive(Debug, Clone)]
pub struct MetricsArgs {
    pub tweets: PathBuf,
    pub out: PathBuf,
    pub window_start: Option<DateTime<Utc>>,
    pub window_end: Option<DateTime<Utc>>,
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<ActivityTable, PipelineError> {
    let tweets = parse_tweets(&args.tweets)?;
    if tweets.is_empty() {
        log::warn!("{} contains no tweets", args.tweets.display());
    }
    let window = resolve_window(&tweets, args.window_start, args.window_end)?;
    let table = compute_activity(&tweets, &window);
    write_activity(&args.out, &table.rows)?;
    log::info!(
        "wrote activity for {} organizations ({} dropped)",
        table.rows.len(),
        table.dropped.len()
    );
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct MergeArgs {
    pub scores: PathBuf,
    pub activity: PathBuf,
    pub circulation: PathBuf,
    pub out: PathBuf,
}

pub fn cmd_merge(args: &MergeArgs) -> Result<MergeOutcome, PipelineError> {
    let scores = parse_scores(&args.scores)?;
    let activity = parse_activity(&args.activity)?;
    let circulation = parse_circulation(&args.circulation)?;
    let outcome = merge(&scores, &activity, &circulation);
    write_merged(&args.out, &outcome.rows)?;
    log::info!(
        "merged {} organizations ({} dropped)",
        outcome.rows.len(),
        outcome.dropped()
    );
    Ok(outcome)
}

/// Runs one blockwise stepwise regression per dependent variable, in
/// parallel. Results come back in `dvs` order.
pub fn regress_rows(
    rows: &[MergedRow],
    dvs: &[String],
    blocks: &[Vec<String>],
    cfg: &StepwiseConfig,
) -> Result<Vec<RegressionReport>, PipelineError> {
    cfg.validate()
        .map_err(|e| PipelineError::Usage(e.to_string()))?;
    if dvs.is_empty() {
        return Err(PipelineError::Usage("no dependent variables given".into()));
    }
    let data = MergedRow::to_dataset(rows);
    dvs.par_iter()
        .map(|dv| blockwise_stepwise(&data, dv, blocks, cfg).map_err(|e| regression_error(dv, e)))
        .collect()
}

pub fn report_paths(dir: &Path, dv: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("regression_{dv}.txt")),
        dir.join(format!("regression_{dv}.json")),
    )
}

fn write_reports(dir: &Path, reports: &[RegressionReport]) -> Result<Vec<PathBuf>, PipelineError> {
    let mut written = Vec::new();
    for r in reports {
        let (txt, json) = report_paths(dir, &r.dv_name);
        write_string(&txt, &r.render(ReportFormat::Text))?;
        write_string(&json, &(r.render(ReportFormat::Json) + "\n"))?;
        written.push(txt);
        written.push(json);
    }
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct RegressArgs {
    pub merged: PathBuf,
    pub out_dir: PathBuf,
    pub dvs: Vec<String>,
    pub blocks: Vec<Vec<String>>,
    pub stepwise: StepwiseConfig,
}

pub fn cmd_regress(args: &RegressArgs) -> Result<Vec<RegressionReport>, PipelineError> {
    let rows = parse_merged(&args.merged)?;
    let reports = regress_rows(&rows, &args.dvs, &args.blocks, &args.stepwise)?;
    write_reports(&args.out_dir, &reports)?;
    Ok(reports)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
}

fn digest(role: &str, path: &Path) -> Result<InputDigest, PipelineError> {
    let bytes = std::fs::read(path).map_err(|e| DataError::io(path, e))?;
    Ok(InputDigest {
        role: role.to_owned(),
        path: path.to_owned(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TsmSummary {
    pub iterations_run: usize,
    pub converged: bool,
    pub final_delta: f64,
}

/// Everything needed to repeat a pipeline run. Contains no wall-clock data,
/// so identical inputs give an identical manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config: PipelineConfig,
    pub inputs: Vec<InputDigest>,
    pub window: Window,
    pub tsm: TsmSummary,
    pub corpus: CorpusSummary,
    pub activity_dropped: Vec<String>,
    pub merge_missing_score: Vec<String>,
    pub merge_missing_activity: Vec<String>,
    pub merge_missing_circulation: Vec<String>,
    pub analysis_rows: usize,
    pub outputs: Vec<PathBuf>,
}

pub const MANIFEST_FILE: &str = "run_manifest.json";

/// Result of [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub manifest: RunManifest,
    pub scores: TrustScores,
    pub merged: Vec<MergedRow>,
    pub reports: Vec<RegressionReport>,
}

/// All stages for a parsed config. Inputs are checked before any work.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    cfg.manifest.validate().map_err(PipelineError::Usage)?;
    cfg.tsm.validate()?;
    cfg.stepwise
        .validate()
        .map_err(|e| PipelineError::Usage(e.to_string()))?;
    let m = &cfg.manifest;
    let inputs = vec![
        digest("edges", &m.edges_path)?,
        digest("nodes", &m.nodes_path)?,
        digest("tweets", &m.tweets_path)?,
        digest("circulation", &m.circulation_path)?,
    ];

    let edges = parse_edges(&m.edges_path)?;
    let nodes = parse_nodes(&m.nodes_path)?;
    let tweets = parse_tweets(&m.tweets_path)?;
    let circulation = parse_circulation(&m.circulation_path)?;
    let graph = TrustGraph::build(&edges, &nodes)?;
    let window = resolve_window(&tweets, m.window_start, m.window_end)?;

    let scores = score_graph(&graph, &cfg.tsm, cfg.aggregate_followers)?;
    let activity = compute_activity(&tweets, &window);
    let outcome = merge(
        &ScoreRow::from_scores(&scores),
        &activity.rows,
        &circulation,
    );
    if outcome.dropped() > 0 {
        log::warn!("{} organizations dropped while merging", outcome.dropped());
    }
    let reports = regress_rows(&outcome.rows, &cfg.dvs, &cfg.blocks, &cfg.stepwise)?;

    let dir = &cfg.output_dir;
    let mut outputs = vec![
        dir.join("scores.csv"),
        dir.join("activity.csv"),
        dir.join("merged.csv"),
    ];
    write_scores(&outputs[0], &scores)?;
    write_activity(&outputs[1], &activity.rows)?;
    write_merged(&outputs[2], &outcome.rows)?;
    outputs.extend(write_reports(dir, &reports)?);

    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        inputs,
        window,
        tsm: TsmSummary {
            iterations_run: scores.iterations_run,
            converged: scores.converged,
            final_delta: scores.final_delta,
        },
        corpus: corpus_summary(&tweets, &window),
        activity_dropped: activity.dropped.iter().map(ToString::to_string).collect(),
        merge_missing_score: outcome.missing_score.clone(),
        merge_missing_activity: outcome.missing_activity.clone(),
        merge_missing_circulation: outcome.missing_circulation.clone(),
        analysis_rows: outcome.rows.len(),
        outputs,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_string(&dir.join(MANIFEST_FILE), &text)?;
    Ok(PipelineRun {
        manifest,
        scores,
        merged: outcome.rows,
        reports,
    })
}

pub fn cmd_pipeline(config_path: &Path) -> Result<PipelineRun, PipelineError> {
    let cfg = PipelineConfig::from_file(config_path).map_err(PipelineError::Usage)?;
    run_pipeline(&cfg)
}

pub fn cmd_synth(params: &SynthParams, out_dir: &Path) -> Result<CorpusFiles, PipelineError> {
    params.validate().map_err(PipelineError::Usage)?;
    let corpus = synth_corpus(params);
    Ok(write_corpus(&corpus, out_dir)?)
}
