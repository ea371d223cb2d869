//! Reads edge, node, post and circulation files, scores the graph, and
//! joins everything into the analysis table. Shows how malformed rows are
//! reported.

use newstrust::activity::{compute_activity, Window};
use newstrust::graph::TrustGraph;
use newstrust::io::{
    merge, parse_circulation, parse_edges, parse_nodes, parse_tweets, write_merged, ScoreRow,
};
use newstrust::tsm::{aggregated_initialization, run_tsm, TsmConfig};

const EDGES: &str =
    "src,dst,weight\nann,daily,1\nbob,daily,1\nbob,weekly,0.5\ndaily,ann,1\nweekly,bob,1\n";
const NODES: &str = "node_id,follower_count,is_news_org\ndaily,250000,true\nweekly,1200,true\nann,,false\nbob,,false\n";
const CIRCULATION: &str = "org_id,circulation\ndaily,180000\nweekly,9000\nmonthly,400\n";
const TWEETS: &str = r#"{"org_id":"daily","tweet_id":"1","is_retweet":false,"like_count":30,"retweet_count":4,"reply_count":2,"timestamp":"2018-04-01T08:00:00-04:00","text":"Council vote tonight #local"}
{"org_id":"daily","tweet_id":"2","is_retweet":true,"like_count":900,"retweet_count":80,"reply_count":9,"timestamp":"2018-04-02T08:00:00Z","text":"RT @wire: markets open"}
{"org_id":"weekly","tweet_id":"3","is_retweet":false,"like_count":5,"retweet_count":1,"reply_count":0,"timestamp":"2018-04-03T12:00:00Z","has_mention":true,"has_hashtag":false}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile_dir()?;
    let path = |name: &str| dir.join(name);
    for (name, body) in [
        ("edges.csv", EDGES),
        ("nodes.csv", NODES),
        ("circulation.csv", CIRCULATION),
        ("tweets.jsonl", TWEETS),
    ] {
        std::fs::write(path(name), body)?;
    }

    let graph = TrustGraph::build(
        &parse_edges(&path("edges.csv"))?,
        &parse_nodes(&path("nodes.csv"))?,
    )?;
    let init = aggregated_initialization(&graph)?;
    let scores = run_tsm(&graph, &TsmConfig::default(), Some(&init))?;

    let tweets = parse_tweets(&path("tweets.jsonl"))?;
    let activity = compute_activity(&tweets, &Window::unbounded());
    let outcome = merge(
        &ScoreRow::from_scores(&scores),
        &activity.rows,
        &parse_circulation(&path("circulation.csv"))?,
    );
    write_merged(&path("merged.csv"), &outcome.rows)?;
    print!("{}", std::fs::read_to_string(path("merged.csv"))?);
    println!("dropped without activity: {:?}", outcome.missing_activity);

    std::fs::write(
        path("bad.csv"),
        "src,dst,weight\nann,daily,1\nann,daily,2\n",
    )?;
    match parse_edges(&path("bad.csv")) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("duplicate edge accepted"),
    }
    Ok(())
}

fn tempfile_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("newstrust-ingest-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
