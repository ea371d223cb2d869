//! Posting-activity and audience-engagement variables per organization.
//!
//! Quantity of tweets and skillfulness count every post in the window,
//! retweets included. The three engagement averages use original posts
//! only: a retweet's like/retweet/reply counts belong to someone else's
//! audience.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActivityError {
    #[error("organization {0} has no tweets in the window")]
    NoTweets(String),
    #[error("organization {0} has no original (non-retweet) tweets in the window")]
    NoOriginalTweets(String),
    #[error("window start {start} is after window end {end}")]
    BadWindow {
        start: DateTime<Utc>,
        end: DateTime<Utc>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub org_id: String,
    pub tweet_id: String,
    pub is_retweet: bool,
    pub has_mention: bool,
    pub has_hashtag: bool,
    pub like_count: u64,
    pub retweet_count: u64,
    pub reply_count: u64,
    pub timestamp: DateTime<Utc>,
}

/// Closed time interval `[start, end]` in UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl Window {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self, ActivityError> {
        if start > end {
            return Err(ActivityError::BadWindow { start, end });
        }
        Ok(Self { start, end })
    }

    /// The default observation period: the two weeks ending at `end`.
    pub fn two_weeks_ending(end: DateTime<Utc>) -> Self {
        Self {
            start: end - Duration::days(14),
            end,
        }
    }

    /// A window that admits every timestamp.
    pub fn unbounded() -> Self {
        Self {
            start: DateTime::<Utc>::MIN_UTC,
            end: DateTime::<Utc>::MAX_UTC,
        }
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.start <= t && t <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrgActivity {
    pub org_id: String,
    pub quantity_of_tweets: u64,
    pub skillfulness: f64,
    pub avg_likes: f64,
    pub avg_retweets: f64,
    pub avg_replies: f64,
    pub original_tweet_count: u64,
}

/// Connectivity features read from post text.
///
/// A mention is a whitespace-delimited token starting with `@` whose next
/// character is alphanumeric or `_`; hashtags likewise with `#`.
pub fn detect_features(text: &str) -> (bool, bool) {
    let marked = |tok: &str, sigil: char| {
        let mut chars = tok.chars();
        chars.next() == Some(sigil)
            && chars
                .next()
                .is_some_and(|c| c.is_alphanumeric() || c == '_')
    };
    let mut mention = false;
    let mut hashtag = false;
    for tok in text.split_whitespace() {
        mention |= marked(tok, '@');
        hashtag |= marked(tok, '#');
    }
    (mention, hashtag)
}

/// 0, 1 or 2: one point per connectivity feature present.
pub fn connectivity_feature_score(t: &TweetRecord) -> u8 {
    u8::from(t.has_mention) + u8::from(t.has_hashtag)
}

fn in_window<'a>(
    tweets: &'a [TweetRecord],
    window: &'a Window,
) -> impl Iterator<Item = &'a TweetRecord> + 'a {
    tweets.iter().filter(move |t| window.contains(t.timestamp))
}

/// Number of posts in the window, retweets included.
pub fn quantity_of_tweets(tweets: &[TweetRecord], window: &Window) -> u64 {
    in_window(tweets, window).count() as u64
}

/// Mean connectivity-feature score over every post in the window.
pub fn skillfulness(tweets: &[TweetRecord], window: &Window) -> Result<f64, ActivityError> {
    let (count, total) = in_window(tweets, window).fold((0u64, 0u64), |(c, s), t| {
        (c + 1, s + u64::from(connectivity_feature_score(t)))
    });
    if count == 0 {
        return Err(ActivityError::NoTweets(org_of(tweets)));
    }
    Ok(total as f64 / count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngagementProfile {
    pub avg_likes: f64,
    pub avg_retweets: f64,
    pub avg_replies: f64,
    pub original_tweet_count: u64,
}

/// Per-post engagement averages over original posts in the window.
pub fn engagement_profile(
    tweets: &[TweetRecord],
    window: &Window,
) -> Result<EngagementProfile, ActivityError> {
    let mut n = 0u64;
    let (mut likes, mut retweets, mut replies) = (0u64, 0u64, 0u64);
    for t in in_window(tweets, window).filter(|t| !t.is_retweet) {
        n += 1;
        likes += t.like_count;
        retweets += t.retweet_count;
        replies += t.reply_count;
    }
    if n == 0 {
        return Err(ActivityError::NoOriginalTweets(org_of(tweets)));
    }
    let d = n as f64;
    Ok(EngagementProfile {
        avg_likes: likes as f64 / d,
        avg_retweets: retweets as f64 / d,
        avg_replies: replies as f64 / d,
        original_tweet_count: n,
    })
}

fn org_of(tweets: &[TweetRecord]) -> String {
    tweets.first().map(|t| t.org_id.clone()).unwrap_or_default()
}

/// All activity variables for one organization's posts.
pub fn org_activity(
    org_id: &str,
    tweets: &[TweetRecord],
    window: &Window,
) -> Result<OrgActivity, ActivityError> {
    let quantity = quantity_of_tweets(tweets, window);
    if quantity == 0 {
        return Err(ActivityError::NoTweets(org_id.to_owned()));
    }
    let skill = skillfulness(tweets, window)?;
    let eng = engagement_profile(tweets, window)
        .map_err(|_| ActivityError::NoOriginalTweets(org_id.to_owned()))?;
    Ok(OrgActivity {
        org_id: org_id.to_owned(),
        quantity_of_tweets: quantity,
        skillfulness: skill,
        avg_likes: eng.avg_likes,
        avg_retweets: eng.avg_retweets,
        avg_replies: eng.avg_replies,
        original_tweet_count: eng.original_tweet_count,
    })
}

/// Activity rows sorted by org id, plus the organizations that were dropped
/// and why.
#[derive(Debug, Clone, Default)]
pub struct ActivityTable {
    pub rows: Vec<OrgActivity>,
    pub dropped: Vec<ActivityError>,
}

pub fn compute_activity(tweets: &[TweetRecord], window: &Window) -> ActivityTable {
    let mut by_org: BTreeMap<&str, Vec<TweetRecord>> = BTreeMap::new();
    for t in tweets {
        by_org.entry(t.org_id.as_str()).or_default().push(t.clone());
    }
    let mut table = ActivityTable::default();
    for (org, recs) in by_org {
        match org_activity(org, &recs, window) {
            Ok(row) => table.rows.push(row),
            Err(e) => {
                log::warn!("dropping {org}: {e}");
                table.dropped.push(e);
            }
        }
    }
    table
}

/// Corpus-level counts of posts and connectivity features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub organizations: u64,
    pub total_tweets: u64,
    pub original_tweets: u64,
    pub tweets_with_mention: u64,
    pub tweets_with_hashtag: u64,
}

pub fn corpus_summary(tweets: &[TweetRecord], window: &Window) -> CorpusSummary {
    let mut orgs = std::collections::BTreeSet::new();
    let mut s = CorpusSummary::default();
    for t in in_window(tweets, window) {
        orgs.insert(t.org_id.as_str());
        s.total_tweets += 1;
        s.original_tweets += u64::from(!t.is_retweet);
        s.tweets_with_mention += u64::from(t.has_mention);
        s.tweets_with_hashtag += u64::from(t.has_hashtag);
    }
    s.organizations = orgs.len() as u64;
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use proptest::prelude::*;

    fn ts(day: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2018, 3, day, 12, 0, 0).unwrap()
    }

    fn window() -> Window {
        Window::new(ts(23), ts(31)).unwrap()
    }

    fn tweet(id: usize, rt: bool, m: bool, h: bool, counts: (u64, u64, u64)) -> TweetRecord {
        TweetRecord {
            org_id: "org".into(),
            tweet_id: id.to_string(),
            is_retweet: rt,
            has_mention: m,
            has_hashtag: h,
            like_count: counts.0,
            retweet_count: counts.1,
            reply_count: counts.2,
            timestamp: ts(25),
        }
    }

    #[test]
    fn quantity_counts_retweets_and_filters_window() {
        assert_eq!(quantity_of_tweets(&[], &window()), 0);
        let mut v: Vec<_> = (0..3)
            .map(|i| tweet(i, false, false, false, (0, 0, 0)))
            .collect();
        v.extend((3..5).map(|i| tweet(i, true, false, false, (0, 0, 0))));
        assert_eq!(quantity_of_tweets(&v, &window()), 5);

        let mut w: Vec<_> = (0..4)
            .map(|i| tweet(i, false, false, false, (0, 0, 0)))
            .collect();
        for (i, day) in [(4, 1), (5, 2)] {
            let mut t = tweet(i, false, false, false, (0, 0, 0));
            t.timestamp = Utc.with_ymd_and_hms(2018, 4, day, 0, 0, 0).unwrap();
            w.push(t);
        }
        assert_eq!(quantity_of_tweets(&w, &window()), 4);
    }

    #[test]
    fn window_is_closed() {
        let w = window();
        assert!(w.contains(w.start) && w.contains(w.end));
        assert!(!w.contains(w.end + Duration::nanoseconds(1)));
        assert!(Window::new(ts(25), ts(24)).is_err());
        assert_eq!(
            Window::two_weeks_ending(ts(31)).start,
            Utc.with_ymd_and_hms(2018, 3, 17, 12, 0, 0).unwrap()
        );
    }

    #[test]
    fn feature_scores() {
        assert_eq!(
            connectivity_feature_score(&tweet(0, false, true, true, (0, 0, 0))),
            2
        );
        assert_eq!(
            connectivity_feature_score(&tweet(0, false, false, false, (0, 0, 0))),
            0
        );
        assert_eq!(
            connectivity_feature_score(&tweet(0, false, true, false, (0, 0, 0))),
            1
        );
        assert_eq!(
            connectivity_feature_score(&tweet(0, false, false, true, (0, 0, 0))),
            1
        );
    }

    #[test]
    fn text_features() {
        assert_eq!(detect_features("Go @city #now"), (true, true));
        assert_eq!(detect_features("email me at a@b.com"), (false, false));
        assert_eq!(detect_features("@ # lonely sigils"), (false, false));
        assert_eq!(detect_features("#_tag"), (false, true));
        assert_eq!(detect_features("@über"), (true, false));
        assert_eq!(detect_features(""), (false, false));
    }

    #[test]
    fn skillfulness_quotients() {
        let w = window();
        let mk = |flags: &[(bool, bool)]| -> Vec<TweetRecord> {
            flags
                .iter()
                .enumerate()
                .map(|(i, (m, h))| tweet(i, false, *m, *h, (0, 0, 0)))
                .collect()
        };
        assert_eq!(
            skillfulness(&mk(&[(true, true), (false, false), (true, false)]), &w),
            Ok(1.0)
        );
        assert_eq!(skillfulness(&mk(&[(true, true); 4]), &w), Ok(2.0));
        assert_eq!(
            skillfulness(
                &mk(&[
                    (false, false),
                    (false, false),
                    (false, false),
                    (false, true)
                ]),
                &w
            ),
            Ok(0.25)
        );
        assert!(matches!(
            skillfulness(&[], &w),
            Err(ActivityError::NoTweets(_))
        ));
    }

    #[test]
    fn skillfulness_includes_retweets() {
        let v = vec![
            tweet(0, false, false, false, (0, 0, 0)),
            tweet(1, true, true, true, (0, 0, 0)),
        ];
        assert_eq!(skillfulness(&v, &window()), Ok(1.0));
    }

    #[test]
    fn engagement_excludes_retweets() {
        let w = window();
        let v = vec![
            tweet(0, false, false, false, (3, 0, 0)),
            tweet(1, false, false, false, (1, 0, 0)),
            tweet(2, true, false, false, (100, 0, 0)),
        ];
        assert_eq!(engagement_profile(&v, &w).unwrap().avg_likes, 2.0);

        let one = engagement_profile(&[tweet(0, false, false, false, (0, 0, 0))], &w).unwrap();
        assert_eq!(
            (one.avg_likes, one.avg_retweets, one.avg_replies),
            (0.0, 0.0, 0.0)
        );

        let r: Vec<_> = [2, 4, 6]
            .iter()
            .enumerate()
            .map(|(i, &k)| tweet(i, false, false, false, (0, 0, k)))
            .collect();
        assert_eq!(engagement_profile(&r, &w).unwrap().avg_replies, 4.0);

        let only_rt = [tweet(0, true, false, false, (5, 5, 5))];
        assert!(matches!(
            engagement_profile(&only_rt, &w),
            Err(ActivityError::NoOriginalTweets(_))
        ));
    }

    #[test]
    fn compute_activity_drops_inactive() {
        let mut v = vec![tweet(0, false, true, false, (4, 2, 1))];
        let mut rt = tweet(1, true, false, false, (9, 9, 9));
        rt.org_id = "rt_only".into();
        v.push(rt);
        let table = compute_activity(&v, &window());
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].org_id, "org");
        assert_eq!(
            table.dropped,
            vec![ActivityError::NoOriginalTweets("rt_only".into())]
        );
        let s = corpus_summary(&v, &window());
        assert_eq!(s.total_tweets, 2);
        assert_eq!(s.original_tweets, 1);
        assert_eq!(s.tweets_with_mention, 1);
        assert_eq!(s.tweets_with_hashtag, 0);
        assert_eq!(s.organizations, 2);
    }

    fn arb_tweets() -> impl Strategy<Value = Vec<TweetRecord>> {
        prop::collection::vec(
            (
                any::<bool>(),
                any::<bool>(),
                any::<bool>(),
                0u64..1000,
                0u64..1000,
                0u64..1000,
            ),
            1..40,
        )
        .prop_map(|v| {
            let mut out: Vec<_> = v
                .into_iter()
                .enumerate()
                .map(|(i, (rt, m, h, a, b, c))| tweet(i, rt, m, h, (a, b, c)))
                .collect();
            out[0].is_retweet = false;
            out
        })
    }

    proptest! {
        #[test]
        fn skillfulness_bounds(v in arb_tweets()) {
            let s = skillfulness(&v, &window()).unwrap();
            prop_assert!((0.0..=2.0).contains(&s));
            let any_feature = v.iter().any(|t| t.has_mention || t.has_hashtag);
            prop_assert_eq!(s == 0.0, !any_feature);
        }

        #[test]
        fn engagement_permutation_invariant(v in arb_tweets(), seed in any::<u64>()) {
            let mut shuffled = v.clone();
            let len = shuffled.len();
            shuffled.rotate_left((seed % len as u64) as usize);
            shuffled.reverse();
            prop_assert_eq!(engagement_profile(&v, &window()), engagement_profile(&shuffled, &window()));
        }

        #[test]
        fn adding_retweet(v in arb_tweets(), likes in 0u64..10_000) {
            let w = window();
            let before = org_activity("org", &v, &w).unwrap();
            let mut more = v.clone();
            more.push(tweet(999, true, true, false, (likes, likes, likes)));
            let after = org_activity("org", &more, &w).unwrap();
            prop_assert_eq!(after.quantity_of_tweets, before.quantity_of_tweets + 1);
            prop_assert_eq!(after.avg_likes, before.avg_likes);
            prop_assert_eq!(after.avg_retweets, before.avg_retweets);
            prop_assert_eq!(after.avg_replies, before.avg_replies);
        }

        #[test]
        fn scaling_likes(v in arb_tweets(), c in 0u64..50) {
            let w = window();
            let mut scaled = v.clone();
            scaled.iter_mut().for_each(|t| t.like_count *= c);
            let a = engagement_profile(&v, &w).unwrap();
            let b = engagement_profile(&scaled, &w).unwrap();
            let n = a.original_tweet_count as f64;
            let total: u64 = v.iter().filter(|t| !t.is_retweet).map(|t| t.like_count).sum();
            prop_assert_eq!(b.avg_likes, (total * c) as f64 / n);
            prop_assert!((b.avg_likes - c as f64 * a.avg_likes).abs() <= 1e-12 * b.avg_likes.max(1.0));
        }
    }
}
