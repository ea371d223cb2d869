//! Activity and engagement variables for two organizations over a
//! two-week window.

use chrono::{TimeZone, Utc};
use newstrust::activity::{compute_activity, corpus_summary, detect_features, TweetRecord, Window};

fn post(org: &str, id: u32, text: &str, retweet: bool, likes: u64, day: u32) -> TweetRecord {
    let (has_mention, has_hashtag) = detect_features(text);
    TweetRecord {
        org_id: org.into(),
        tweet_id: id.to_string(),
        is_retweet: retweet,
        has_mention,
        has_hashtag,
        like_count: likes,
        retweet_count: likes / 4,
        reply_count: likes / 10,
        timestamp: Utc.with_ymd_and_hms(2018, 3, day, 9, 30, 0).unwrap(),
    }
}

fn main() {
    let tweets = vec![
        post("courier", 1, "Budget passes #politics", false, 120, 25),
        post(
            "courier",
            2,
            "Interview with @mayor on #transit",
            false,
            340,
            27,
        ),
        post("courier", 3, "RT @wire: storm warning", true, 5000, 28),
        post("courier", 4, "Old story", false, 10, 1), // outside the window
        post("herald", 5, "Morning briefing", false, 40, 30),
        post("herald", 6, "Morning briefing, part two", false, 60, 31),
    ];
    let window = Window::two_weeks_ending(Utc.with_ymd_and_hms(2018, 4, 6, 0, 0, 0).unwrap());

    let table = compute_activity(&tweets, &window);
    println!("org      QT  skill  likes  retweets  replies  originals");
    for a in &table.rows {
        println!(
            "{:<8} {:>2}  {:>5.3}  {:>5.1}  {:>8.1}  {:>7.1}  {:>9}",
            a.org_id,
            a.quantity_of_tweets,
            a.skillfulness,
            a.avg_likes,
            a.avg_retweets,
            a.avg_replies,
            a.original_tweet_count
        );
    }
    println!("{:?}", corpus_summary(&tweets, &window));
}
