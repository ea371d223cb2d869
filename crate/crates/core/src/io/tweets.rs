use std::collections::HashSet;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{read_to_string, write_string, DataError};
use crate::activity::{detect_features, TweetRecord};

#[derive(Deserialize)]
struct RawTweet {
    org_id: Option<String>,
    tweet_id: Option<Value>,
    is_retweet: Option<bool>,
    like_count: Option<i64>,
    retweet_count: Option<i64>,
    reply_count: Option<i64>,
    timestamp: Option<String>,
    text: Option<String>,
    has_mention: Option<bool>,
    has_hashtag: Option<bool>,
}

/// One output line: a record plus optional post text. When text is written
/// the feature flags are omitted and recovered from the text on reading.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TweetLine {
    pub org_id: String,
    pub tweet_id: String,
    pub is_retweet: bool,
    pub like_count: u64,
    pub retweet_count: u64,
    pub reply_count: u64,
    pub timestamp: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub has_mention: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub has_hashtag: Option<bool>,
}

impl TweetLine {
    pub fn with_flags(t: &TweetRecord) -> Self {
        Self::base(t, None)
    }

    pub fn with_text(t: &TweetRecord, text: String) -> Self {
        Self::base(t, Some(text))
    }

    fn base(t: &TweetRecord, text: Option<String>) -> Self {
        let flags = text.is_none();
        Self {
            org_id: t.org_id.clone(),
            tweet_id: t.tweet_id.clone(),
            is_retweet: t.is_retweet,
            like_count: t.like_count,
            retweet_count: t.retweet_count,
            reply_count: t.reply_count,
            timestamp: t.timestamp.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            text,
            has_mention: flags.then_some(t.has_mention),
            has_hashtag: flags.then_some(t.has_hashtag),
        }
    }
}

fn required<T>(source: &str, line: u64, field: &str, v: Option<T>) -> Result<T, DataError> {
    v.ok_or_else(|| DataError::parse(source, line, format!("missing field {field}")))
}

fn count(source: &str, line: u64, field: &str, v: Option<i64>) -> Result<u64, DataError> {
    let v = required(source, line, field, v)?;
    u64::try_from(v)
        .map_err(|_| DataError::parse(source, line, format!("{field} must be >= 0, got {v}")))
}

/// Parses newline-delimited JSON post records. Blank lines are skipped.
///
/// Feature flags come from `has_mention`/`has_hashtag` when present and
/// otherwise from `text`; an explicit flag wins over the text.
pub fn parse_tweets_str(source: &str, text: &str) -> Result<Vec<TweetRecord>, DataError> {
    let mut out = Vec::new();
    let mut ids: HashSet<(String, String)> = HashSet::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i as u64 + 1;
        if raw_line.trim().is_empty() {
            continue;
        }
        let raw: RawTweet = serde_json::from_str(raw_line)
            .map_err(|e| DataError::parse(source, line, e.to_string()))?;

        let org_id = required(source, line, "org_id", raw.org_id)?;
        let tweet_id = match required(source, line, "tweet_id", raw.tweet_id)? {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            other => {
                return Err(DataError::parse(
                    source,
                    line,
                    format!("tweet_id must be a string or number, got {other}"),
                ))
            }
        };
        let ts_raw = required(source, line, "timestamp", raw.timestamp)?;
        let timestamp = DateTime::parse_from_rfc3339(&ts_raw)
            .map_err(|e| DataError::parse(source, line, format!("timestamp {ts_raw:?}: {e}")))?
            .with_timezone(&Utc);

        let from_text = raw.text.as_deref().map(detect_features);
        let has_mention = raw
            .has_mention
            .or(from_text.map(|f| f.0))
            .ok_or_else(|| DataError::parse(source, line, "missing field has_mention (or text)"))?;
        let has_hashtag = raw
            .has_hashtag
            .or(from_text.map(|f| f.1))
            .ok_or_else(|| DataError::parse(source, line, "missing field has_hashtag (or text)"))?;

        let rec = TweetRecord {
            is_retweet: required(source, line, "is_retweet", raw.is_retweet)?,
            like_count: count(source, line, "like_count", raw.like_count)?,
            retweet_count: count(source, line, "retweet_count", raw.retweet_count)?,
            reply_count: count(source, line, "reply_count", raw.reply_count)?,
            has_mention,
            has_hashtag,
            timestamp,
            org_id,
            tweet_id,
        };
        if !ids.insert((rec.org_id.clone(), rec.tweet_id.clone())) {
            return Err(DataError::parse(
                source,
                line,
                format!("duplicate tweet_id {} for {}", rec.tweet_id, rec.org_id),
            ));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn parse_tweets(path: &Path) -> Result<Vec<TweetRecord>, DataError> {
    parse_tweets_str(&path.display().to_string(), &read_to_string(path)?)
}

pub fn write_tweets(path: &Path, lines: &[TweetLine]) -> Result<(), DataError> {
    let mut s = String::new();
    for l in lines {
        s.push_str(&serde_json::to_string(l).expect("tweet line serializes"));
        s.push('\n');
    }
    write_string(path, &s)
}
