//! Hierarchical (blockwise) stepwise regression.
//!
//! Blocks are processed in order. Inside a block, candidates enter one at a
//! time, always the one with the smallest entry p-value, while that p-value
//! is below `p_enter`; after every entry, variables that entered in the same
//! block are dropped again while their p-value exceeds `p_remove`. Variables
//! carried over from earlier blocks are controls and are never removed.
//!
//! A model snapshot is recorded after each block that changed the variable
//! set. Variables absent from the final model are reported with the t they
//! would have had if added to it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ols::{ols_fit, ModelFit};
use super::{nonfinite, Dataset, RegressionError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepwiseConfig {
    pub p_enter: f64,
    pub p_remove: f64,
}

impl Default for StepwiseConfig {
    fn default() -> Self {
        Self {
            p_enter: 0.05,
            p_remove: 0.10,
        }
    }
}

impl StepwiseConfig {
    pub fn new(p_enter: f64, p_remove: f64) -> Result<Self, RegressionError> {
        let cfg = Self { p_enter, p_remove };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RegressionError> {
        let ok = |p: f64| p > 0.0 && p < 1.0;
        if !(ok(self.p_enter) && ok(self.p_remove)) {
            return Err(RegressionError::BadThresholds(format!(
                "thresholds must lie in (0, 1), got enter={} remove={}",
                self.p_enter, self.p_remove
            )));
        }
        if self.p_enter >= self.p_remove {
            return Err(RegressionError::BadThresholds(format!(
                "p_enter ({}) must be below p_remove ({})",
                self.p_enter, self.p_remove
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSnapshot {
    /// 1-based model number.
    pub model: usize,
    /// 1-based block that produced this model.
    pub block: usize,
    pub fit: ModelFit,
    pub r_squared_change: f64,
    /// p-value of the F test for the R² increment, when the model grew.
    pub p_change: Option<f64>,
    pub entered: Vec<String>,
    pub removed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedVar {
    pub name: String,
    pub block: usize,
    /// Standardized coefficient the variable would get in the final model.
    #[serde(with = "nonfinite::option")]
    pub beta_in: Option<f64>,
    #[serde(with = "nonfinite::option")]
    pub t: Option<f64>,
    pub p: Option<f64>,
    /// Not significant at the entry threshold (or not estimable).
    pub not_significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub dv_name: String,
    pub n_obs: usize,
    pub blocks: Vec<Vec<String>>,
    pub config: StepwiseConfig,
    pub models: Vec<ModelSnapshot>,
    pub excluded: Vec<ExcludedVar>,
}

impl RegressionReport {
    pub fn final_model(&self) -> Option<&ModelSnapshot> {
        self.models.last()
    }

    pub fn excluded_var(&self, name: &str) -> Option<&ExcludedVar> {
        self.excluded.iter().find(|e| e.name == name)
    }

    /// Whether `name` is part of the final model.
    pub fn entered(&self, name: &str) -> bool {
        self.final_model()
            .is_some_and(|m| m.fit.included_vars.iter().any(|v| v == name))
    }
}

fn fit_vars(data: &Dataset, dv: &[f64], vars: &[String]) -> Result<ModelFit, RegressionError> {
    ols_fit(&data.design(vars)?, dv)
}

// Entry p-value of `cand` when added to `current`; None if not estimable.
fn entry_p(
    data: &Dataset,
    y: &[f64],
    current: &[String],
    cand: &str,
) -> Result<Option<f64>, RegressionError> {
    let mut vars = current.to_vec();
    vars.push(cand.to_owned());
    match fit_vars(data, y, &vars) {
        Ok(fit) => Ok(fit.coefficient(cand).map(|c| c.p)),
        Err(RegressionError::Collinear { .. } | RegressionError::ZeroVariance(_)) => {
            log::debug!("{cand} cannot enter: not estimable alongside {current:?}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn validate_blocks(
    data: &Dataset,
    dv: &str,
    blocks: &[Vec<String>],
) -> Result<(), RegressionError> {
    if blocks.is_empty() {
        return Err(RegressionError::NoBlocks);
    }
    data.column(dv)?;
    let mut seen = BTreeSet::new();
    for (i, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(RegressionError::InvalidBlocks(format!(
                "block {} is empty",
                i + 1
            )));
        }
        for v in block {
            data.column(v)?;
            if v == dv {
                return Err(RegressionError::InvalidBlocks(format!(
                    "dependent variable {dv} listed as a predictor"
                )));
            }
            if !seen.insert(v.as_str()) {
                return Err(RegressionError::InvalidBlocks(format!(
                    "{v} appears in more than one block"
                )));
            }
        }
    }
    Ok(())
}

/// Runs the blockwise stepwise procedure for one dependent variable.
pub fn blockwise_stepwise(
    data: &Dataset,
    dv: &str,
    blocks: &[Vec<String>],
    cfg: &StepwiseConfig,
) -> Result<RegressionReport, RegressionError> {
    cfg.validate()?;
    validate_blocks(data, dv, blocks)?;
    let y = data.column(dv)?;
    if y.len() < 2 || super::ols::sample_sd(y) == 0.0 {
        return Err(RegressionError::ZeroVariance(dv.to_owned()));
    }
    // Every model up to the full one must be estimable.
    let max_predictors: usize = blocks.iter().map(Vec::len).sum();
    if data.n_rows() < max_predictors + 2 {
        return Err(RegressionError::TooFewRows {
            rows: data.n_rows(),
            predictors: max_predictors,
        });
    }

    let mut current: Vec<String> = Vec::new();
    let mut models: Vec<ModelSnapshot> = Vec::new();

    for (bi, block) in blocks.iter().enumerate() {
        let forced = current.len();
        let start: Vec<String> = current.clone();
        let mut entered = Vec::new();
        let mut removed = Vec::new();
        // caps add/remove cycling
        let max_steps = 4 * block.len() + 4;

        for _ in 0..max_steps {
            let mut best: Option<(f64, &String)> = None;
            for cand in block.iter().filter(|c| !current.contains(c)) {
                if let Some(p) = entry_p(data, y, &current, cand)? {
                    if best.is_none_or(|(bp, _)| p < bp) {
                        best = Some((p, cand));
                    }
                }
            }
            match best {
                Some((p, cand)) if p < cfg.p_enter => {
                    current.push(cand.clone());
                    entered.push(cand.clone());
                }
                _ => break,
            }

            loop {
                let fit = fit_vars(data, y, &current)?;
                let worst = fit.coefficients[forced..]
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.p.total_cmp(&b.1.p));
                match worst {
                    Some((k, c)) if c.p > cfg.p_remove => {
                        removed.push(c.name.clone());
                        current.remove(forced + k);
                    }
                    _ => break,
                }
            }
        }

        if current != start && !current.is_empty() {
            let fit = fit_vars(data, y, &current)?;
            let prev = models.last().map(|m| &m.fit);
            let prev_r2 = prev.map_or(0.0, |f| f.r_squared);
            let prev_p = prev.map_or(0, |f| f.df_model);
            let r_squared_change = fit.r_squared - prev_r2;
            let p_change = if fit.df_model > prev_p && fit.r_squared < 1.0 {
                let q = (fit.df_model - prev_p) as f64;
                let f_change =
                    (r_squared_change.max(0.0) / q) / ((1.0 - fit.r_squared) / fit.df_resid as f64);
                Some(super::f_upper_p(f_change, q, fit.df_resid as f64)?)
            } else if fit.df_model > prev_p {
                Some(0.0)
            } else {
                None
            };
            models.push(ModelSnapshot {
                model: models.len() + 1,
                block: bi + 1,
                fit,
                r_squared_change,
                p_change,
                entered,
                removed,
            });
        }
    }

    let final_vars: Vec<String> = models
        .last()
        .map(|m| m.fit.included_vars.clone())
        .unwrap_or_default();
    let mut excluded = Vec::new();
    for (bi, block) in blocks.iter().enumerate() {
        for v in block.iter().filter(|v| !final_vars.contains(v)) {
            let mut vars = final_vars.clone();
            vars.push(v.clone());
            let (beta_in, t, p) = match fit_vars(data, y, &vars) {
                Ok(fit) => {
                    let c = fit.coefficient(v).expect("candidate is in the fit");
                    (c.beta, Some(c.t), Some(c.p))
                }
                Err(RegressionError::Collinear { .. } | RegressionError::ZeroVariance(_)) => {
                    (None, None, None)
                }
                Err(e) => return Err(e),
            };
            excluded.push(ExcludedVar {
                name: v.clone(),
                block: bi + 1,
                beta_in,
                t,
                p,
                not_significant: p.is_none_or(|p| p >= cfg.p_enter),
            });
        }
    }

    Ok(RegressionReport {
        dv_name: dv.to_owned(),
        n_obs: data.n_rows(),
        blocks: blocks.to_vec(),
        config: *cfg,
        models,
        excluded,
    })
}
