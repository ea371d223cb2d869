use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use newstrust::io::synth::SynthParams;
use newstrust::pipeline::{
    self, parse_blocks, parse_list, parse_time, MergeArgs, MetricsArgs, PipelineError, RegressArgs,
    TsmArgs,
};
use newstrust::regression::StepwiseConfig;
use newstrust::tsm::TsmConfig;

/// Trust scores, activity metrics and stepwise regression for news accounts.
#[derive(Parser)]
#[command(name = "newstrust", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a follower graph: writes node_id,trustingness,trustworthiness.
    Tsm(TsmCmd),
    /// Per-organization activity and engagement from a JSONL post stream.
    Metrics(MetricsCmd),
    /// Join scores, activity and circulation on organization id.
    Merge(MergeCmd),
    /// Blockwise stepwise regression per dependent variable.
    Regress(RegressCmd),
    /// Run every stage from a key=value config file.
    Pipeline { config: PathBuf },
    /// Write a seeded synthetic corpus and a matching pipeline config.
    Synth(SynthCmd),
}

#[derive(Args)]
struct TsmCmd {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    involvement: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    /// Start news organizations at 1/follower_count trustingness.
    #[arg(long)]
    aggregate_followers: bool,
}

#[derive(Args)]
struct MetricsCmd {
    #[arg(long)]
    tweets: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// RFC 3339; defaults to two weeks before the end.
    #[arg(long, value_parser = parse_time)]
    window_start: Option<chrono::DateTime<chrono::Utc>>,
    /// RFC 3339; defaults to the latest post.
    #[arg(long, value_parser = parse_time)]
    window_end: Option<chrono::DateTime<chrono::Utc>>,
}

#[derive(Args)]
struct MergeCmd {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    activity: PathBuf,
    #[arg(long)]
    circulation: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RegressCmd {
    #[arg(long)]
    merged: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Comma-separated dependent variables.
    #[arg(long, default_value = "avg_likes,avg_retweets,avg_replies")]
    dvs: String,
    /// Blocks separated by ';', variables within a block by ','.
    #[arg(
        long,
        default_value = "circulation;trustworthiness;quantity_of_tweets,skillfulness"
    )]
    blocks: String,
    #[arg(long, default_value_t = 0.05)]
    p_enter: f64,
    #[arg(long, default_value_t = 0.10)]
    p_remove: f64,
}

#[derive(Args)]
struct SynthCmd {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    n_orgs: usize,
    #[arg(long, default_value_t = 400)]
    n_users: usize,
    #[arg(long, default_value_t = 0.1)]
    follow_prob: f64,
    /// Coefficients on circulation, trustworthiness, QT, STU.
    #[arg(long, default_value = "0,5,0,0")]
    planted: String,
    #[arg(long, default_value_t = 1.0)]
    noise_sd: f64,
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Tsm(c) => {
            let config = TsmConfig {
                involvement: c.involvement,
                max_iters: c.max_iters,
                delta: c.delta,
            };
            pipeline::cmd_tsm(&TsmArgs {
                edges: c.edges,
                nodes: c.nodes,
                out: c.out,
                config,
                aggregate_followers: c.aggregate_followers,
            })?;
        }
        Command::Metrics(c) => {
            pipeline::cmd_metrics(&MetricsArgs {
                tweets: c.tweets,
                out: c.out,
                window_start: c.window_start,
                window_end: c.window_end,
            })?;
        }
        Command::Merge(c) => {
            pipeline::cmd_merge(&MergeArgs {
                scores: c.scores,
                activity: c.activity,
                circulation: c.circulation,
                out: c.out,
            })?;
        }
        Command::Regress(c) => {
            let blocks = parse_blocks(&c.blocks).map_err(PipelineError::Usage)?;
            pipeline::cmd_regress(&RegressArgs {
                merged: c.merged,
                out_dir: c.out_dir,
                dvs: parse_list(&c.dvs),
                blocks,
                stepwise: StepwiseConfig {
                    p_enter: c.p_enter,
                    p_remove: c.p_remove,
                },
            })?;
        }
        Command::Pipeline { config } => {
            pipeline::cmd_pipeline(&config)?;
        }
        Command::Synth(c) => {
            let coefs: Vec<f64> = parse_list(&c.planted)
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| PipelineError::Usage(format!("--planted: {e}")))?;
            let planted: [f64; 4] = coefs
                .try_into()
                .map_err(|_| PipelineError::Usage("--planted needs four numbers".into()))?;
            let params = SynthParams {
                seed: c.seed,
                n_orgs: c.n_orgs,
                n_users: c.n_users,
                follow_prob: c.follow_prob,
                planted,
                noise_sd: c.noise_sd,
                ..SynthParams::default()
            };
            pipeline::cmd_synth(&params, &c.out_dir)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
