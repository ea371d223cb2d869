//! Ordinary least squares with intercept.
//!
//! Predictors are centered and scaled to unit length before a Householder
//! QR factorization, so the triangular factor is that of the correlation
//! matrix. The same scaled matrix gives the condition number used for the
//! collinearity guard.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::dist::{f_upper_p, t_two_sided_p};
use super::{nonfinite, RegressionError};

/// Largest admissible condition number of the centered, scaled cross-product.
pub const COLLINEARITY_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    /// Unstandardized coefficient.
    pub b: f64,
    pub std_error: f64,
    #[serde(with = "nonfinite")]
    pub t: f64,
    pub p: f64,
    /// Standardized coefficient; `None` for the intercept.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub included_vars: Vec<String>,
    pub n_obs: usize,
    pub intercept: Coefficient,
    /// One entry per included variable, same order.
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    #[serde(with = "nonfinite")]
    pub f_stat: f64,
    pub df_model: usize,
    pub df_resid: usize,
    pub p_value_f: f64,
    pub residual_sum_squares: f64,
    pub total_sum_squares: f64,
    pub condition_number: f64,
}

impl ModelFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn unstandardized(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.b).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .map(|c| c.beta.unwrap_or(f64::NAN))
            .collect()
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn centered_ss(v: &[f64], m: f64) -> f64 {
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Sample standard deviation (n - 1 denominator).
pub(crate) fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (centered_ss(v, m) / (v.len() as f64 - 1.0)).sqrt()
}

// Infinite when the estimate is exact and nonzero, 0 when both vanish.
fn t_ratio(b: f64, se: f64) -> f64 {
    if se > 0.0 {
        b / se
    } else if b == 0.0 {
        0.0
    } else {
        b.signum() * f64::INFINITY
    }
}

fn t_p(t: f64, df: usize) -> Result<f64, RegressionError> {
    if t.is_infinite() {
        Ok(0.0)
    } else {
        t_two_sided_p(t, df as f64)
    }
}

/// Fits `y = b0 + Σ b_j x_j` by least squares.
pub fn ols_fit(x: &[(&str, &[f64])], y: &[f64]) -> Result<ModelFit, RegressionError> {
    let p = x.len();
    let n = y.len();
    if p == 0 {
        return Err(RegressionError::EmptyModel);
    }
    for (name, col) in x {
        if col.len() != n {
            return Err(RegressionError::LengthMismatch {
                name: (*name).to_owned(),
                len: col.len(),
                expected: n,
            });
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(RegressionError::NonFinite((*name).to_owned()));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(RegressionError::NonFinite("response".into()));
    }
    if n <= p + 1 {
        return Err(RegressionError::TooFewRows {
            rows: n,
            predictors: p,
        });
    }

    let y_mean = mean(y);
    let sst = centered_ss(y, y_mean);
    if sst == 0.0 {
        return Err(RegressionError::ZeroVariance("response".into()));
    }

    let means: Vec<f64> = x.iter().map(|(_, c)| mean(c)).collect();
    let mut norms = Vec::with_capacity(p);
    for ((name, col), m) in x.iter().zip(&means) {
        let ss = centered_ss(col, *m);
        if ss == 0.0 {
            return Err(RegressionError::ZeroVariance((*name).to_owned()));
        }
        norms.push(ss.sqrt());
    }

    let z = DMatrix::from_fn(n, p, |i, j| (x[j].1[i] - means[j]) / norms[j]);
    let yc = DVector::from_fn(n, |i, _| y[i] - y_mean);

    let sv = z.clone().singular_values();
    let (smax, smin) = sv
        .iter()
        .fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    let condition = if smin > 0.0 {
        (smax / smin).powi(2)
    } else {
        f64::INFINITY
    };
    if !(condition <= COLLINEARITY_LIMIT) {
        return Err(RegressionError::Collinear {
            condition,
            limit: COLLINEARITY_LIMIT,
        });
    }

    let qr = z.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qty = q.transpose() * &yc;
    let coef_z = r
        .solve_upper_triangular(&qty)
        .ok_or(RegressionError::Collinear {
            condition,
            limit: COLLINEARITY_LIMIT,
        })?;
    let r_inv =
        r.solve_upper_triangular(&DMatrix::identity(p, p))
            .ok_or(RegressionError::Collinear {
                condition,
                limit: COLLINEARITY_LIMIT,
            })?;
    // (ZᵀZ)⁻¹
    let cov_z = &r_inv * r_inv.transpose();

    let resid = &yc - &z * &coef_z;
    let sse = resid.norm_squared();
    let df_resid = n - p - 1;
    let sigma2 = sse / df_resid as f64;

    let b: Vec<f64> = (0..p).map(|j| coef_z[j] / norms[j]).collect();
    let se: Vec<f64> = (0..p)
        .map(|j| (sigma2 * cov_z[(j, j)]).max(0.0).sqrt() / norms[j])
        .collect();

    let b0 = y_mean - b.iter().zip(&means).map(|(bj, mj)| bj * mj).sum::<f64>();
    // x̄ᵀ (XcᵀXc)⁻¹ x̄ with (XcᵀXc)⁻¹ = D⁻¹ (ZᵀZ)⁻¹ D⁻¹
    let mut quad = 0.0;
    for i in 0..p {
        for j in 0..p {
            quad += means[i] / norms[i] * cov_z[(i, j)] * means[j] / norms[j];
        }
    }
    let se0 = (sigma2 * (1.0 / n as f64 + quad)).max(0.0).sqrt();

    let r2 = (1.0 - sse / sst).clamp(0.0, 1.0);
    let dfr = df_resid as f64;
    let adj = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / dfr;
    let f_stat = if r2 < 1.0 {
        (r2 / p as f64) / ((1.0 - r2) / dfr)
    } else {
        f64::INFINITY
    };
    let p_f = if f_stat.is_finite() {
        f_upper_p(f_stat, p as f64, dfr)?
    } else {
        0.0
    };

    let sd_y = (sst / (n as f64 - 1.0)).sqrt();
    let mut coefficients = Vec::with_capacity(p);
    for j in 0..p {
        let t = t_ratio(b[j], se[j]);
        let sd_x = norms[j] / (n as f64 - 1.0).sqrt();
        coefficients.push(Coefficient {
            name: x[j].0.to_owned(),
            b: b[j],
            std_error: se[j],
            t,
            p: t_p(t, df_resid)?,
            beta: Some(b[j] * sd_x / sd_y),
        });
    }
    let t0 = t_ratio(b0, se0);
    let intercept = Coefficient {
        name: "(intercept)".into(),
        b: b0,
        std_error: se0,
        t: t0,
        p: t_p(t0, df_resid)?,
        beta: None,
    };

    let fit = ModelFit {
        included_vars: x.iter().map(|(n, _)| (*n).to_owned()).collect(),
        n_obs: n,
        intercept,
        coefficients,
        r_squared: r2,
        adjusted_r_squared: adj,
        f_stat,
        df_model: p,
        df_resid,
        p_value_f: p_f,
        residual_sum_squares: sse,
        total_sum_squares: sst,
        condition_number: condition,
    };
    if fit
        .coefficients
        .iter()
        .chain(std::iter::once(&fit.intercept))
        .any(|c| !c.b.is_finite() || !c.std_error.is_finite() || c.t.is_nan())
    {
        return Err(RegressionError::NonFinite("coefficient estimate".into()));
    }
    Ok(fit)
}

/// `β_j = b_j · sd(x_j) / sd(y)` with sample standard deviations.
pub fn standardized_betas(
    fit: &ModelFit,
    x: &[(&str, &[f64])],
    y: &[f64],
) -> Result<Vec<f64>, RegressionError> {
    if x.len() != fit.coefficients.len() {
        return Err(RegressionError::LengthMismatch {
            name: "design".into(),
            len: x.len(),
            expected: fit.coefficients.len(),
        });
    }
    let sd_y = sample_sd(y);
    if !(sd_y > 0.0) {
        return Err(RegressionError::ZeroVariance("response".into()));
    }
    x.iter()
        .zip(&fit.coefficients)
        .map(|((name, col), c)| {
            let sd_x = sample_sd(col);
            if !(sd_x > 0.0) {
                return Err(RegressionError::ZeroVariance((*name).to_owned()));
            }
            Ok(c.b * sd_x / sd_y)
        })
        .collect()
}
