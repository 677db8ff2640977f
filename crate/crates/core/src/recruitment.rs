//! Accrual models converting a delay length into an expected pipeline count.
//!
//! Both patterns are fitted to the unrounded planning total `n_init` over a
//! fixed horizon. Pipeline counts stay real-valued (expected counts);
//! integerization happens only at data generation in the engine.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Recruitment pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Uniform,
    Linear,
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Pattern::Uniform => "uniform",
            Pattern::Linear => "linear",
        })
    }
}

/// How the stage-1 accrual time `t1` is fitted under linear recruitment.
///
/// The published linear-recruitment pipeline columns are reproduced only
/// when `t1` solves `gamma t1 (t1 + 1) / 2 = n1 / 2`; the text's formula
/// fits all of `n1`. Both behaviours ship, with `TableCompatible` the
/// default for table reproduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum T1Mode {
    #[default]
    TableCompatible,
    PaperText,
}

impl std::str::FromStr for T1Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "table-compatible" => Ok(T1Mode::TableCompatible),
            "paper-text" => Ok(T1Mode::PaperText),
            other => Err(format!(
                "unknown t1 mode `{other}` (expected `table-compatible` or `paper-text`)"
            )),
        }
    }
}

/// Constant accrual rate when `n_init` participants arrive over
/// `horizon_t` months.
pub fn uniform_rate(n_init: f64, horizon_t: f64) -> f64 {
    debug_assert!(n_init > 0.0 && horizon_t > 0.0);
    n_init / horizon_t
}

/// Expected pipeline count after `m` months at a constant rate.
pub fn pipeline_uniform(m: f64, rate: f64) -> f64 {
    debug_assert!(m >= 0.0);
    m * rate
}

/// Slope of the linearly increasing monthly rate: `2 n_init / (t (t + 1))`.
pub fn linear_gamma(n_init: f64, horizon_t: f64) -> f64 {
    debug_assert!(n_init > 0.0 && horizon_t > 0.0);
    2.0 * n_init / (horizon_t * (horizon_t + 1.0))
}

/// Months to accrue `n1_fit` participants at slope `gamma`: the positive
/// root of `gamma t1 (t1 + 1) / 2 = n1_fit`.
pub fn linear_t1(n1_fit: f64, gamma: f64) -> f64 {
    debug_assert!(n1_fit >= 0.0 && gamma > 0.0);
    -0.5 + 0.5 * (1.0 + 8.0 * n1_fit / gamma).sqrt()
}

/// Expected pipeline count over the `m` months after `t1` under linear
/// recruitment: `gamma m t1 + gamma m (m + 1) / 2` (the monthly sum from
/// `t1 + 1` to `t1 + m`).
pub fn pipeline_linear(m: f64, gamma: f64, t1: f64) -> f64 {
    debug_assert!(m >= 0.0 && gamma > 0.0 && t1 >= 0.0);
    gamma * m * t1 + gamma * m * (m + 1.0) / 2.0
}

/// A recruitment plan fitted to a design's planning total.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "pattern", rename_all = "lowercase")]
pub enum RecruitmentPlan {
    Uniform {
        rate: f64,
        horizon_t: f64,
    },
    Linear {
        gamma: f64,
        t1: f64,
        horizon_t: f64,
        t1_mode: T1Mode,
    },
}

impl RecruitmentPlan {
    /// Uniform plan recruiting `n_init` over `horizon_t` months.
    pub fn uniform(n_init: f64, horizon_t: f64) -> Result<Self> {
        validate_positive("n_init", n_init)?;
        validate_positive("horizon_t", horizon_t)?;
        Ok(RecruitmentPlan::Uniform {
            rate: uniform_rate(n_init, horizon_t),
            horizon_t,
        })
    }

    /// Linear plan recruiting `n_init` over `horizon_t` months, with `t1`
    /// fitted to the stage-1 cohort per `t1_mode`.
    pub fn linear(n_init: f64, horizon_t: f64, n1: u32, t1_mode: T1Mode) -> Result<Self> {
        validate_positive("n_init", n_init)?;
        validate_positive("horizon_t", horizon_t)?;
        if n1 == 0 {
            return Err(Error::domain("n1", "must be positive"));
        }
        let gamma = linear_gamma(n_init, horizon_t);
        let n1_fit = match t1_mode {
            T1Mode::PaperText => f64::from(n1),
            T1Mode::TableCompatible => f64::from(n1) / 2.0,
        };
        Ok(RecruitmentPlan::Linear {
            gamma,
            t1: linear_t1(n1_fit, gamma),
            horizon_t,
            t1_mode,
        })
    }

    pub fn pattern(&self) -> Pattern {
        match self {
            RecruitmentPlan::Uniform { .. } => Pattern::Uniform,
            RecruitmentPlan::Linear { .. } => Pattern::Linear,
        }
    }

    /// Expected pipeline participants accrued during a delay of `m` months.
    pub fn expected_pipeline(&self, m: f64) -> f64 {
        match *self {
            RecruitmentPlan::Uniform { rate, .. } => pipeline_uniform(m, rate),
            RecruitmentPlan::Linear { gamma, t1, .. } => pipeline_linear(m, gamma, t1),
        }
    }
}

fn validate_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0) {
        return Err(Error::domain(name, format!("{value} is not positive")));
    }
    Ok(())
}
