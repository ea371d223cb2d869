use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Terminator, WriterBuilder};
use serde::{Deserialize, Serialize};

use super::{format_full, read_to_string, write_string, DataError};
use crate::activity::OrgActivity;
use crate::graph::{EdgeSpec, NodeAttrs};
use crate::regression::Dataset;
use crate::tsm::TrustScores;

pub const EDGES_HEADER: &str = "src,dst,weight";
pub const NODES_HEADER: &str = "node_id,follower_count,is_news_org";
pub const CIRCULATION_HEADER: &str = "org_id,circulation";
pub const SCORES_HEADER: &str = "node_id,trustingness,trustworthiness";
pub const ACTIVITY_HEADER: &str =
    "org_id,quantity_of_tweets,skillfulness,avg_likes,avg_retweets,avg_replies,original_tweet_count";
pub const MERGED_HEADER: &str =
    "org_id,circulation,trustworthiness,quantity_of_tweets,skillfulness,avg_likes,avg_retweets,avg_replies";
/// Numeric columns of the merged table, in file order.
pub const MERGED_COLUMNS: [&str; 7] = [
    "circulation",
    "trustworthiness",
    "quantity_of_tweets",
    "skillfulness",
    "avg_likes",
    "avg_retweets",
    "avg_replies",
];

struct Table {
    header: Vec<String>,
    rows: Vec<(u64, StringRecord)>,
}

/// Reads a CSV document, checking the header against `accepted` and every
/// row's width against the header.
fn read_table(source: &str, text: &str, accepted: &[&str]) -> Result<Table, DataError> {
    let mut rdr = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(DataError::parse(source, 1, e.to_string())),
        None => return Err(DataError::parse(source, 1, "missing header row")),
    };
    let header_line = header.position().map_or(1, |p| p.line());
    let header_text = header.iter().collect::<Vec<_>>().join(",");
    if !accepted.contains(&header_text.as_str()) {
        return Err(DataError::parse(
            source,
            header_line,
            format!(
                "unexpected header {header_text:?}, expected {}",
                accepted.join(" or ")
            ),
        ));
    }
    let width = header.len();
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            DataError::parse(source, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(DataError::parse(
                source,
                line,
                format!("expected {width} columns, found {}", rec.len()),
            ));
        }
        rows.push((line, rec));
    }
    Ok(Table {
        header: header.iter().map(str::to_owned).collect(),
        rows,
    })
}

fn parse_f64(source: &str, line: u64, field: &str, raw: &str) -> Result<f64, DataError> {
    raw.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| {
            DataError::parse(
                source,
                line,
                format!("{field}: not a finite number: {raw:?}"),
            )
        })
}

fn parse_u64(source: &str, line: u64, field: &str, raw: &str) -> Result<u64, DataError> {
    raw.parse::<u64>().map_err(|_| {
        DataError::parse(
            source,
            line,
            format!("{field}: not a non-negative integer: {raw:?}"),
        )
    })
}

fn parse_bool(source: &str, line: u64, field: &str, raw: &str) -> Result<bool, DataError> {
    match raw {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(DataError::parse(
            source,
            line,
            format!("{field}: expected true or false, got {raw:?}"),
        )),
    }
}

fn non_empty<'a>(source: &str, line: u64, field: &str, raw: &'a str) -> Result<&'a str, DataError> {
    if raw.is_empty() {
        Err(DataError::parse(source, line, format!("{field} is empty")))
    } else {
        Ok(raw)
    }
}

fn render_csv<I, R>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header.split(',')).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

// ---- edges ---------------------------------------------------------------

pub(crate) fn edges_from_str(source: &str, text: &str) -> Result<Vec<EdgeSpec>, DataError> {
    let table = read_table(source, text, &["src,dst", EDGES_HEADER])?;
    let has_weight = table.header.len() == 3;
    let mut seen: HashMap<(String, String), u64> = HashMap::new();
    let mut edges = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let src = non_empty(source, *line, "src", &rec[0])?;
        let dst = non_empty(source, *line, "dst", &rec[1])?;
        let weight = if has_weight && !rec[2].is_empty() {
            let w = parse_f64(source, *line, "weight", &rec[2])?;
            if w <= 0.0 {
                return Err(DataError::parse(
                    source,
                    *line,
                    format!("weight must be > 0, got {w}"),
                ));
            }
            Some(w)
        } else {
            None
        };
        if seen
            .insert((src.to_owned(), dst.to_owned()), *line)
            .is_some()
        {
            return Err(DataError::DuplicateEdge {
                path: source.to_owned(),
                line: *line,
                src: src.to_owned(),
                dst: dst.to_owned(),
            });
        }
        edges.push(EdgeSpec {
            src: src.to_owned(),
            dst: dst.to_owned(),
            weight,
        });
    }
    Ok(edges)
}

/// Reads a `src,dst[,weight]` edge list in file order.
pub fn parse_edges(path: &Path) -> Result<Vec<EdgeSpec>, DataError> {
    edges_from_str(&path.display().to_string(), &read_to_string(path)?)
}

pub fn write_edges(path: &Path, edges: &[EdgeSpec]) -> Result<(), DataError> {
    let rows = edges.iter().map(|e| {
        vec![
            e.src.clone(),
            e.dst.clone(),
            e.weight.map(format_full).unwrap_or_default(),
        ]
    });
    write_string(path, &render_csv(EDGES_HEADER, rows))
}

// ---- nodes ---------------------------------------------------------------

pub(crate) fn nodes_from_str(source: &str, text: &str) -> Result<Vec<NodeAttrs>, DataError> {
    let table = read_table(source, text, &[NODES_HEADER])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let id = non_empty(source, *line, "node_id", &rec[0])?;
        if !seen.insert(id.to_owned()) {
            return Err(DataError::parse(
                source,
                *line,
                format!("duplicate node_id {id}"),
            ));
        }
        let follower_count = if rec[1].is_empty() {
            None
        } else {
            Some(parse_u64(source, *line, "follower_count", &rec[1])?)
        };
        out.push(NodeAttrs {
            id: id.to_owned(),
            follower_count,
            is_news_org: parse_bool(source, *line, "is_news_org", &rec[2])?,
        });
    }
    Ok(out)
}

/// Reads `node_id,follower_count,is_news_org`; an empty follower count means unknown.
pub fn parse_nodes(path: &Path) -> Result<Vec<NodeAttrs>, DataError> {
    nodes_from_str(&path.display().to_string(), &read_to_string(path)?)
}

pub fn write_nodes(path: &Path, nodes: &[NodeAttrs]) -> Result<(), DataError> {
    let mut sorted: Vec<&NodeAttrs> = nodes.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let rows = sorted.into_iter().map(|n| {
        vec![
            n.id.clone(),
            n.follower_count.map(|c| c.to_string()).unwrap_or_default(),
            n.is_news_org.to_string(),
        ]
    });
    write_string(path, &render_csv(NODES_HEADER, rows))
}

// ---- circulation ---------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculationRow {
    pub org_id: String,
    pub circulation: f64,
}

pub(crate) fn circulation_from_str(
    source: &str,
    text: &str,
) -> Result<Vec<CirculationRow>, DataError> {
    let table = read_table(source, text, &[CIRCULATION_HEADER])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let id = non_empty(source, *line, "org_id", &rec[0])?;
        if !seen.insert(id.to_owned()) {
            return Err(DataError::parse(
                source,
                *line,
                format!("duplicate org_id {id}"),
            ));
        }
        let c = parse_f64(source, *line, "circulation", &rec[1])?;
        if c < 0.0 {
            return Err(DataError::parse(source, *line, "circulation must be >= 0"));
        }
        out.push(CirculationRow {
            org_id: id.to_owned(),
            circulation: c,
        });
    }
    Ok(out)
}

pub fn parse_circulation(path: &Path) -> Result<Vec<CirculationRow>, DataError> {
    circulation_from_str(&path.display().to_string(), &read_to_string(path)?)
}

pub fn write_circulation(path: &Path, rows: &[CirculationRow]) -> Result<(), DataError> {
    let mut sorted: Vec<&CirculationRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.org_id.cmp(&b.org_id));
    let rows = sorted
        .into_iter()
        .map(|r| vec![r.org_id.clone(), format_full(r.circulation)]);
    write_string(path, &render_csv(CIRCULATION_HEADER, rows))
}

// ---- scores --------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub node_id: String,
    pub trustingness: f64,
    pub trustworthiness: f64,
}

pub(crate) fn scores_from_str(source: &str, text: &str) -> Result<Vec<ScoreRow>, DataError> {
    let table = read_table(source, text, &[SCORES_HEADER])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let id = non_empty(source, *line, "node_id", &rec[0])?;
        if !seen.insert(id.to_owned()) {
            return Err(DataError::parse(
                source,
                *line,
                format!("duplicate node_id {id}"),
            ));
        }
        out.push(ScoreRow {
            node_id: id.to_owned(),
            trustingness: parse_f64(source, *line, "trustingness", &rec[1])?,
            trustworthiness: parse_f64(source, *line, "trustworthiness", &rec[2])?,
        });
    }
    Ok(out)
}

pub fn parse_scores(path: &Path) -> Result<Vec<ScoreRow>, DataError> {
    scores_from_str(&path.display().to_string(), &read_to_string(path)?)
}

pub(crate) fn scores_to_string(scores: &TrustScores) -> String {
    // node ids are already sorted
    let rows = scores
        .rows()
        .map(|(id, ti, tw)| vec![id.to_owned(), format_full(ti), format_full(tw)]);
    render_csv(SCORES_HEADER, rows)
}

pub fn write_scores(path: &Path, scores: &TrustScores) -> Result<(), DataError> {
    write_string(path, &scores_to_string(scores))
}

impl ScoreRow {
    pub fn from_scores(scores: &TrustScores) -> Vec<ScoreRow> {
        scores
            .rows()
            .map(|(id, ti, tw)| ScoreRow {
                node_id: id.to_owned(),
                trustingness: ti,
                trustworthiness: tw,
            })
            .collect()
    }
}

// ---- activity ------------------------------------------------------------

pub(crate) fn activity_from_str(source: &str, text: &str) -> Result<Vec<OrgActivity>, DataError> {
    let table = read_table(source, text, &[ACTIVITY_HEADER])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let l = *line;
        let id = non_empty(source, l, "org_id", &rec[0])?;
        if !seen.insert(id.to_owned()) {
            return Err(DataError::parse(
                source,
                l,
                format!("duplicate org_id {id}"),
            ));
        }
        out.push(OrgActivity {
            org_id: id.to_owned(),
            quantity_of_tweets: parse_u64(source, l, "quantity_of_tweets", &rec[1])?,
            skillfulness: parse_f64(source, l, "skillfulness", &rec[2])?,
            avg_likes: parse_f64(source, l, "avg_likes", &rec[3])?,
            avg_retweets: parse_f64(source, l, "avg_retweets", &rec[4])?,
            avg_replies: parse_f64(source, l, "avg_replies", &rec[5])?,
            original_tweet_count: parse_u64(source, l, "original_tweet_count", &rec[6])?,
        });
    }
    Ok(out)
}

pub fn parse_activity(path: &Path) -> Result<Vec<OrgActivity>, DataError> {
    activity_from_str(&path.display().to_string(), &read_to_string(path)?)
}

pub(crate) fn activity_to_string(rows: &[OrgActivity]) -> String {
    let mut sorted: Vec<&OrgActivity> = rows.iter().collect();
    sorted.sort_by(|a, b| a.org_id.cmp(&b.org_id));
    let rows = sorted.into_iter().map(|a| {
        vec![
            a.org_id.clone(),
            a.quantity_of_tweets.to_string(),
            format_full(a.skillfulness),
            format_full(a.avg_likes),
            format_full(a.avg_retweets),
            format_full(a.avg_replies),
            a.original_tweet_count.to_string(),
        ]
    });
    render_csv(ACTIVITY_HEADER, rows)
}

pub fn write_activity(path: &Path, rows: &[OrgActivity]) -> Result<(), DataError> {
    write_string(path, &activity_to_string(rows))
}

// ---- merged --------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedRow {
    pub org_id: String,
    pub circulation: f64,
    pub trustworthiness: f64,
    pub quantity_of_tweets: f64,
    pub skillfulness: f64,
    pub avg_likes: f64,
    pub avg_retweets: f64,
    pub avg_replies: f64,
}

impl MergedRow {
    fn values(&self) -> [f64; 7] {
        [
            self.circulation,
            self.trustworthiness,
            self.quantity_of_tweets,
            self.skillfulness,
            self.avg_likes,
            self.avg_retweets,
            self.avg_replies,
        ]
    }

    /// Column-oriented view for regression.
    pub fn to_dataset(rows: &[MergedRow]) -> Dataset {
        let columns = (0..MERGED_COLUMNS.len())
            .map(|j| rows.iter().map(|r| r.values()[j]).collect())
            .collect();
        Dataset::new(
            rows.iter().map(|r| r.org_id.clone()).collect(),
            MERGED_COLUMNS.iter().map(|s| (*s).to_owned()).collect(),
            columns,
        )
        .expect("merged rows hold finite values")
    }
}

pub(crate) fn merged_from_str(source: &str, text: &str) -> Result<Vec<MergedRow>, DataError> {
    let table = read_table(source, text, &[MERGED_HEADER])?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let l = *line;
        let id = non_empty(source, l, "org_id", &rec[0])?;
        if !seen.insert(id.to_owned()) {
            return Err(DataError::parse(
                source,
                l,
                format!("duplicate org_id {id}"),
            ));
        }
        let mut v = [0.0; 7];
        for (j, name) in MERGED_COLUMNS.iter().enumerate() {
            v[j] = parse_f64(source, l, name, &rec[j + 1])?;
        }
        out.push(MergedRow {
            org_id: id.to_owned(),
            circulation: v[0],
            trustworthiness: v[1],
            quantity_of_tweets: v[2],
            skillfulness: v[3],
            avg_likes: v[4],
            avg_retweets: v[5],
            avg_replies: v[6],
        });
    }
    Ok(out)
}

pub fn parse_merged(path: &Path) -> Result<Vec<MergedRow>, DataError> {
    merged_from_str(&path.display().to_string(), &read_to_string(path)?)
}

pub(crate) fn merged_to_string(rows: &[MergedRow]) -> String {
    let mut sorted: Vec<&MergedRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.org_id.cmp(&b.org_id));
    let rows = sorted.into_iter().map(|r| {
        std::iter::once(r.org_id.clone())
            .chain(r.values().iter().map(|x| format_full(*x)))
            .collect::<Vec<_>>()
    });
    render_csv(MERGED_HEADER, rows)
}

pub fn write_merged(path: &Path, rows: &[MergedRow]) -> Result<(), DataError> {
    write_string(path, &merged_to_string(rows))
}

/// Result of joining scores, activity and circulation on organization id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MergeOutcome {
    pub rows: Vec<MergedRow>,
    /// Organizations (present in activity or circulation) without a score.
    pub missing_score: Vec<String>,
    pub missing_activity: Vec<String>,
    pub missing_circulation: Vec<String>,
}

impl MergeOutcome {
    pub fn dropped(&self) -> usize {
        let all: BTreeSet<&String> = self
            .missing_score
            .iter()
            .chain(&self.missing_activity)
            .chain(&self.missing_circulation)
            .collect();
        all.len()
    }
}

/// Inner join on organization id. The universe of organizations is the
/// union of activity and circulation ids; score rows for other nodes are
/// ignored.
pub fn merge(
    scores: &[ScoreRow],
    activity: &[OrgActivity],
    circulation: &[CirculationRow],
) -> MergeOutcome {
    let score: HashMap<&str, f64> = scores
        .iter()
        .map(|s| (s.node_id.as_str(), s.trustworthiness))
        .collect();
    let act: BTreeMap<&str, &OrgActivity> =
        activity.iter().map(|a| (a.org_id.as_str(), a)).collect();
    let circ: BTreeMap<&str, f64> = circulation
        .iter()
        .map(|c| (c.org_id.as_str(), c.circulation))
        .collect();
    let orgs: BTreeSet<&str> = act.keys().chain(circ.keys()).copied().collect();

    let mut out = MergeOutcome::default();
    for org in orgs {
        let (s, a, c) = (score.get(org), act.get(org), circ.get(org));
        if s.is_none() {
            out.missing_score.push(org.to_owned());
        }
        if a.is_none() {
            out.missing_activity.push(org.to_owned());
        }
        if c.is_none() {
            out.missing_circulation.push(org.to_owned());
        }
        match (s, a, c) {
            (Some(&tw), Some(a), Some(&circulation)) => out.rows.push(MergedRow {
                org_id: org.to_owned(),
                circulation,
                trustworthiness: tw,
                quantity_of_tweets: a.quantity_of_tweets as f64,
                skillfulness: a.skillfulness,
                avg_likes: a.avg_likes,
                avg_retweets: a.avg_retweets,
                avg_replies: a.avg_replies,
            }),
            _ => log::warn!(
                "dropping {org} from merged table (score: {}, activity: {}, circulation: {})",
                s.is_some(),
                a.is_some(),
                c.is_some()
            ),
        }
    }
    out
}
