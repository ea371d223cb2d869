//! Seeded synthetic corpus: follower graph, node metadata, circulation and
//! posts for a population of news organizations and ordinary users.
//!
//! Every random draw comes from one `Pcg64` stream (the 128-bit-state
//! permuted congruential generator, XSL-RR output) seeded with
//! `SynthParams::seed`, consumed in a fixed order, so a seed pins the output
//! byte for byte.
//!
//! Each organization has a latent appeal `a ∈ [0, 1)`. Users follow an
//! organization with probability `follow_prob · (0.25 + 1.5·a)`, so the
//! trust the network places in it tracks `a`. Circulation also grows with
//! `a`. Engagement is planted: the expected per-post count of each metric is
//!
//! ```text
//! base · (1 + effect_scale · (c·z(circulation) + t·z(a) + q·z(QT) + s·z(STU) + noise_sd·ε))
//! ```
//!
//! where `z` standardizes across organizations and `(c, t, q, s)` is
//! `planted`. Counts on original posts are Poisson with that mean; retweets
//! get unrelated counts.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::index;
use rand::{RngExt, SeedableRng};
use rand_distr::{Binomial, Distribution, Normal, Poisson};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use super::tables::{write_circulation, write_edges, write_nodes, CirculationRow};
use super::tweets::{write_tweets, TweetLine};
use super::{format_full, write_string, DataError};
use crate::activity::TweetRecord;
use crate::graph::{EdgeSpec, NodeAttrs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_orgs: usize,
    pub n_users: usize,
    pub follow_prob: f64,
    /// Inclusive range of posts per organization.
    pub tweets_per_org: (u32, u32),
    pub retweet_prob: f64,
    pub mention_rate: (f64, f64),
    pub hashtag_rate: (f64, f64),
    /// Baseline mean likes / retweets / replies per original post.
    pub base_engagement: [f64; 3],
    pub effect_scale: f64,
    /// Coefficients on (circulation, latent trust, QT, STU).
    pub planted: [f64; 4],
    pub noise_sd: f64,
    pub seed: u64,
    pub window_end: DateTime<Utc>,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            n_orgs: 50,
            n_users: 400,
            follow_prob: 0.1,
            tweets_per_org: (20, 60),
            retweet_prob: 0.15,
            mention_rate: (0.05, 0.5),
            hashtag_rate: (0.0, 0.3),
            base_engagement: [40.0, 20.0, 10.0],
            effect_scale: 0.1,
            planted: [0.0, 5.0, 0.0, 0.0],
            noise_sd: 1.0,
            seed: 1,
            window_end: Utc.with_ymd_and_hms(2018, 4, 6, 0, 0, 0).unwrap(),
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_orgs == 0 || self.n_users == 0 {
            return Err("n_orgs and n_users must be positive".into());
        }
        if !(self.follow_prob > 0.0 && self.follow_prob <= 1.0) {
            return Err(format!(
                "follow_prob must be in (0, 1], got {}",
                self.follow_prob
            ));
        }
        let (lo, hi) = self.tweets_per_org;
        if lo == 0 || lo > hi {
            return Err(format!("tweets_per_org range {lo}..={hi} is empty or zero"));
        }
        let rate_ok = |(a, b): (f64, f64)| (0.0..=1.0).contains(&a) && a <= b && b <= 1.0;
        if !(rate_ok(self.mention_rate) && rate_ok(self.hashtag_rate)) {
            return Err("feature rate ranges must lie within [0, 1]".into());
        }
        if !(0.0..1.0).contains(&self.retweet_prob) {
            return Err("retweet_prob must be in [0, 1)".into());
        }
        if self.base_engagement.iter().any(|b| !(*b > 0.0))
            || !(self.effect_scale >= 0.0)
            || !(self.noise_sd >= 0.0)
            || self.planted.iter().any(|c| !c.is_finite())
        {
            return Err("engagement parameters must be non-negative and finite".into());
        }
        Ok(())
    }

    pub fn window_start(&self) -> DateTime<Utc> {
        self.window_end - Duration::days(14)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrgTruth {
    pub org_id: String,
    pub latent_trust: f64,
    /// Expected likes, retweets, replies per original post.
    pub expected_engagement: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub params: SynthParams,
    pub nodes: Vec<NodeAttrs>,
    pub edges: Vec<EdgeSpec>,
    pub tweets: Vec<TweetLine>,
    pub records: Vec<TweetRecord>,
    pub circulation: Vec<CirculationRow>,
    pub truth: Vec<OrgTruth>,
}

pub fn org_id(i: usize) -> String {
    format!("org{i:04}")
}

pub fn user_id(i: usize) -> String {
    format!("user{i:05}")
}

fn zscores(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    if sd > 0.0 {
        v.iter().map(|x| (x - m) / sd).collect()
    } else {
        vec![0.0; v.len()]
    }
}

// `k` distinct indices from `0..n`, in increasing order.
fn pick(rng: &mut Pcg64, n: usize, p: f64) -> Vec<usize> {
    if n == 0 || p <= 0.0 {
        return Vec::new();
    }
    let k = Binomial::new(n as u64, p.min(1.0))
        .expect("valid binomial")
        .sample(rng) as usize;
    let mut v = index::sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

/// Generates a corpus. Panics if `params` is invalid; call
/// [`SynthParams::validate`] first for user-supplied values.
pub fn synth_corpus(params: &SynthParams) -> SynthCorpus {
    params.validate().expect("valid synthetic parameters");
    let p = params;
    let mut rng = Pcg64::seed_from_u64(p.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");

    let latent: Vec<f64> = (0..p.n_orgs).map(|_| rng.random::<f64>()).collect();

    // follower graph
    let mut edges = Vec::new();
    let mut user_in = vec![0u64; p.n_orgs];
    for (o, a) in latent.iter().enumerate() {
        for u in pick(&mut rng, p.n_users, p.follow_prob * (0.25 + 1.5 * a)) {
            edges.push(EdgeSpec::new(user_id(u), org_id(o)));
            user_in[o] += 1;
        }
    }
    for o in 0..p.n_orgs {
        for u in pick(&mut rng, p.n_users, p.follow_prob * 0.5) {
            edges.push(EdgeSpec::new(org_id(o), user_id(u)));
        }
        for other in pick(&mut rng, p.n_orgs, p.follow_prob * 0.5) {
            if other != o {
                edges.push(EdgeSpec::new(org_id(o), org_id(other)));
                user_in[other] += 1;
            }
        }
    }
    for u in 0..p.n_users {
        for v in pick(&mut rng, p.n_users, p.follow_prob * 0.2) {
            if v != u {
                edges.push(EdgeSpec::new(user_id(u), user_id(v)));
            }
        }
    }

    // metadata: observed followers plus an aggregated audience
    let mut nodes = Vec::with_capacity(p.n_orgs + p.n_users);
    let mut circulation = Vec::with_capacity(p.n_orgs);
    let mut log_circ = Vec::with_capacity(p.n_orgs);
    for (o, a) in latent.iter().enumerate() {
        let hidden = 10f64
            .powf(3.0 + 3.0 * a + 0.25 * std_normal.sample(&mut rng))
            .round() as u64;
        nodes.push(NodeAttrs::news_org(org_id(o), user_in[o] + hidden.max(1)));
        let lc = 4.0 + 1.5 * a + 0.4 * std_normal.sample(&mut rng);
        log_circ.push(lc);
        circulation.push(CirculationRow {
            org_id: org_id(o),
            circulation: 10f64.powf(lc).round(),
        });
    }
    nodes.extend((0..p.n_users).map(|u| NodeAttrs {
        id: user_id(u),
        follower_count: None,
        is_news_org: false,
    }));

    // posts
    let window_secs = (p.window_end - p.window_start()).num_seconds();
    let mut plans = Vec::with_capacity(p.n_orgs);
    for o in 0..p.n_orgs {
        let count = rng.random_range(p.tweets_per_org.0..=p.tweets_per_org.1);
        let m_rate = rng.random_range(p.mention_rate.0..=p.mention_rate.1);
        let h_rate = rng.random_range(p.hashtag_rate.0..=p.hashtag_rate.1);
        let mut posts = Vec::with_capacity(count as usize);
        for k in 0..count {
            let is_retweet = rng.random_bool(p.retweet_prob);
            let mention = rng.random_bool(m_rate);
            let hashtag = rng.random_bool(h_rate);
            let offset = rng.random_range(0..=window_secs);
            let mention_target = rng.random_range(0..p.n_users);
            posts.push((k, is_retweet, mention, hashtag, offset, mention_target));
        }
        plans.push((o, posts));
    }

    let qt: Vec<f64> = plans.iter().map(|(_, v)| v.len() as f64).collect();
    let stu: Vec<f64> = plans
        .iter()
        .map(|(_, v)| {
            let s: u32 = v
                .iter()
                .map(|t| u32::from(t.1 || t.2) + u32::from(t.3))
                .sum();
            f64::from(s) / v.len() as f64
        })
        .collect();
    let z = [
        zscores(&log_circ),
        zscores(&latent),
        zscores(&qt),
        zscores(&stu),
    ];

    let mut truth = Vec::with_capacity(p.n_orgs);
    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (o, posts) in &plans {
        let signal: f64 = (0..4).map(|j| p.planted[j] * z[j][*o]).sum();
        let mut expected = [0.0; 3];
        for (m, e) in expected.iter_mut().enumerate() {
            let noise = p.noise_sd * std_normal.sample(&mut rng);
            *e = (p.base_engagement[m] * (1.0 + p.effect_scale * (signal + noise))).max(0.05);
        }
        truth.push(OrgTruth {
            org_id: org_id(*o),
            latent_trust: latent[*o],
            expected_engagement: expected,
        });
        for &(k, is_retweet, mention, hashtag, offset, target) in posts {
            let mut counts = [0u64; 3];
            for m in 0..3 {
                let mean = if is_retweet {
                    p.base_engagement[m] * 5.0
                } else {
                    expected[m]
                };
                counts[m] = Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64;
            }
            // a retweet names its source account, so it always carries an '@'
            let mention = mention || is_retweet;
            let mut text = if is_retweet {
                format!("RT @{}: story {k} from the wire", user_id(target))
            } else {
                format!("Story {k}: read more")
            };
            if mention && !is_retweet {
                text.push_str(&format!(" @{}", user_id(target)));
            }
            if hashtag {
                text.push_str(" #news");
            }
            let rec = TweetRecord {
                org_id: org_id(*o),
                tweet_id: format!("{}-{k:04}", org_id(*o)),
                is_retweet,
                has_mention: mention,
                has_hashtag: hashtag,
                like_count: counts[0],
                retweet_count: counts[1],
                reply_count: counts[2],
                timestamp: p.window_start() + Duration::seconds(offset),
            };
            lines.push(TweetLine::with_text(&rec, text));
            records.push(rec);
        }
    }

    SynthCorpus {
        params: p.clone(),
        nodes,
        edges,
        tweets: lines,
        records,
        circulation,
        truth,
    }
}

/// Paths written by [`write_corpus`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusFiles {
    pub edges: PathBuf,
    pub nodes: PathBuf,
    pub tweets: PathBuf,
    pub circulation: PathBuf,
    pub truth: PathBuf,
    pub params: PathBuf,
    pub config: PathBuf,
}

/// Writes the corpus plus a ready-to-run pipeline config into `dir`.
pub fn write_corpus(corpus: &SynthCorpus, dir: &Path) -> Result<CorpusFiles, DataError> {
    std::fs::create_dir_all(dir).map_err(|e| DataError::io(dir, e))?;
    let files = CorpusFiles {
        edges: dir.join("edges.csv"),
        nodes: dir.join("nodes.csv"),
        tweets: dir.join("tweets.jsonl"),
        circulation: dir.join("circulation.csv"),
        truth: dir.join("truth.csv"),
        params: dir.join("synth_params.json"),
        config: dir.join("pipeline.conf"),
    };
    write_edges(&files.edges, &corpus.edges)?;
    write_nodes(&files.nodes, &corpus.nodes)?;
    write_tweets(&files.tweets, &corpus.tweets)?;
    write_circulation(&files.circulation, &corpus.circulation)?;

    let mut truth =
        String::from("org_id,latent_trust,expected_likes,expected_retweets,expected_replies\n");
    for t in &corpus.truth {
        truth.push_str(&format!(
            "{},{},{},{},{}\n",
            t.org_id,
            format_full(t.latent_trust),
            format_full(t.expected_engagement[0]),
            format_full(t.expected_engagement[1]),
            format_full(t.expected_engagement[2]),
        ));
    }
    write_string(&files.truth, &truth)?;
    let params = serde_json::to_string_pretty(&corpus.params).expect("params serialize") + "\n";
    write_string(&files.params, &params)?;

    let p = &corpus.params;
    let conf = format!(
        "# generated by synth (seed {seed})\n\
         input.edges = edges.csv\n\
         input.nodes = nodes.csv\n\
         input.tweets = tweets.jsonl\n\
         input.circulation = circulation.csv\n\
         window.start = {start}\n\
         window.end = {end}\n\
         tsm.aggregate_followers = true\n\
         output.dir = out\n",
        seed = p.seed,
        start = p
            .window_start()
            .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        end = p
            .window_end
            .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    );
    write_string(&files.config, &conf)?;
    Ok(files)
}
