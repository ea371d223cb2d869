//! Text and JSON renderings of a [`RegressionReport`].
//!
//! The text form is a compact model table: one section per model with the
//! standardized coefficient of every included variable, followed by a
//! `df=..., F=..., P=..., Adjusted R²=...` line. Values are rounded to three
//! decimals and proportions drop the leading zero (`.407`, `-.228`, `.000`).

use std::fmt::Write as _;

use super::stepwise::RegressionReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Human-readable label for the standard analysis columns.
pub fn display_label(column: &str) -> &str {
    match column {
        "circulation" => "Circulation",
        "trustworthiness" => "Trustworthiness",
        "quantity_of_tweets" => "Quantity of tweets",
        "skillfulness" => "Skillfulness of Twitter use",
        "avg_likes" => "Avg. number of likes",
        "avg_retweets" => "Avg. number of retweets",
        "avg_replies" => "Avg. number of replies",
        other => other,
    }
}

fn three(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

// `0.407` -> `.407`, `-0.228` -> `-.228`
fn frac(x: f64) -> String {
    let s = three(x);
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

pub fn render_text(report: &RegressionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Dependent variable: {} (n = {})",
        display_label(&report.dv_name),
        report.n_obs
    );
    let width = report
        .blocks
        .iter()
        .flatten()
        .map(|v| display_label(v).chars().count())
        .max()
        .unwrap_or(0)
        .max("Independent Variables".len());
    let _ = writeln!(
        out,
        "\n         {:<width$}  Beta (β)",
        "Independent Variables"
    );

    for m in report
        .models
        .iter()
        .filter(|m| !m.fit.included_vars.is_empty())
    {
        let mut first = true;
        for c in &m.fit.coefficients {
            let head = if first {
                format!("Model {}", m.model)
            } else {
                String::new()
            };
            first = false;
            let beta = c.beta.map_or_else(|| "-".to_owned(), frac);
            let _ = writeln!(
                out,
                "{head:<9}{:<width$}  {beta:>7}",
                display_label(&c.name)
            );
        }
        let f = &m.fit;
        let _ = writeln!(
            out,
            "         df={}, {}, F={}, P={}, Adjusted R²={}, R² change={}",
            f.df_model,
            f.df_resid,
            three(f.f_stat),
            frac(f.p_value_f),
            frac(f.adjusted_r_squared),
            frac(m.r_squared_change),
        );
        out.push('\n');
    }
    if report.models.is_empty() {
        out.push_str("No variable entered the model.\n\n");
    }

    if !report.excluded.is_empty() {
        let _ = writeln!(out, "Excluded variables");
        for e in &report.excluded {
            let beta = e.beta_in.map_or_else(|| "-".to_owned(), frac);
            let t = e.t.map_or_else(|| "-".to_owned(), three);
            let p = e.p.map_or_else(|| "-".to_owned(), frac);
            let flag = if e.not_significant { ", n.s." } else { "" };
            let _ = writeln!(
                out,
                "         {:<width$}  Beta In={beta}, t={t}, P={p}{flag}",
                display_label(&e.name)
            );
        }
    }
    out
}

pub fn render_json(report: &RegressionReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn parse_report_json(s: &str) -> Result<RegressionReport, serde_json::Error> {
    serde_json::from_str(s)
}

impl RegressionReport {
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Text => render_text(self),
            ReportFormat::Json => render_json(self),
        }
    }
}
