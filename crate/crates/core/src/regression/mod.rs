//! Least-squares fitting, p-values, and blockwise stepwise variable entry.

mod dataset;
pub mod dist;
mod ols;
mod report;
mod stepwise;

use thiserror::Error;

pub use dataset::Dataset;
pub use dist::{f_upper_p, t_two_sided_p};
pub use ols::{ols_fit, standardized_betas, Coefficient, ModelFit, COLLINEARITY_LIMIT};
pub use report::{display_label, parse_report_json, render_json, render_text, ReportFormat};
pub use stepwise::{
    blockwise_stepwise, ExcludedVar, ModelSnapshot, RegressionReport, StepwiseConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressionError {
    #[error("predictors are collinear (condition number {condition:.3e} exceeds {limit:.0e})")]
    Collinear { condition: f64, limit: f64 },
    #[error("too few rows: {rows} observations for {predictors} predictors plus intercept")]
    TooFewRows { rows: usize, predictors: usize },
    #[error("column {0} has zero variance")]
    ZeroVariance(String),
    #[error("bad statistic: {0}")]
    BadStatistic(String),
    #[error("no variable blocks given")]
    NoBlocks,
    #[error("unknown column {0}")]
    UnknownColumn(String),
    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),
    #[error("model has no predictors")]
    EmptyModel,
    #[error("column {name} has {len} values, expected {expected}")]
    LengthMismatch {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("column {0} contains a non-finite value")]
    NonFinite(String),
    #[error("invalid stepwise thresholds: {0}")]
    BadThresholds(String),
}

/// Serde adapter writing non-finite floats as the strings `"inf"`, `"-inf"`,
/// `"NaN"` so JSON output stays valid and lossless.
pub(crate) mod nonfinite {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("NaN")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "NaN" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("bad float {other:?}"))),
            },
        }
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => super::serialize(v, s),
                None => s.serialize_none(),
            }
        }

        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}
