//! Planning-stage and re-estimation sample-size calculators.
//!
//! All quantities are totals across both arms and stay unrounded; rounding
//! to an even integer happens only where data are generated. Scenario
//! parameters labelled "sigma^2 = 8, 10, 12" in the reference tables enter
//! the calculators as standard deviations, the only reading that reproduces
//! the published planning sizes (129.20 / 201.88 / 290.71).

use serde::{Deserialize, Serialize};

use crate::statdist::std_normal_quantile_unchecked;
use crate::{Error, Result};

/// Endpoint family of a trial design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Continuous,
    Binary,
}

/// `(z_{1-alpha} + z_{1-beta})^2`, the shared quantile constant of every
/// calculator. Computed at run time, never hard-coded.
fn quantile_constant(alpha: f64, beta: f64) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    debug_assert!(beta > 0.0 && beta < 1.0);
    let z = std_normal_quantile_unchecked(1.0 - alpha) + std_normal_quantile_unchecked(1.0 - beta);
    z * z
}

/// Total sample size for the continuous endpoint: `4 sd^2 C / delta^2`
/// with `C = (z_{1-alpha} + z_{1-beta})^2`. Unrounded.
pub fn required_n_continuous(sd: f64, delta: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::domain("delta", format!("{delta} is not positive")));
    }
    if !(sd >= 0.0) {
        return Err(Error::domain("sd", format!("{sd} is negative")));
    }
    Ok(4.0 * sd * sd * quantile_constant(alpha, beta) / (delta * delta))
}

/// Total sample size for the binary endpoint with planning rates `p1` and
/// `p2`: pooled-null and alternative variance terms, unrounded.
pub fn required_n_binary(p1: f64, p2: f64, alpha: f64, beta: f64) -> Result<f64> {
    for (name, p) in [("p1", p1), ("p2", p2)] {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(
                name,
                format!("{p} is outside the open interval (0, 1)"),
            ));
        }
    }
    if p1 == p2 {
        return Err(Error::domain("p2", "planning rates must differ"));
    }
    let pbar = 0.5 * (p1 + p2);
    let z_a = std_normal_quantile_unchecked(1.0 - alpha);
    let z_b = std_normal_quantile_unchecked(1.0 - beta);
    let term =
        z_a * (2.0 * pbar * (1.0 - pbar)).sqrt() + z_b * (p1 * (1.0 - p1) + p2 * (1.0 - p2)).sqrt();
    Ok(2.0 * term * term / ((p2 - p1) * (p2 - p1)))
}

/// Re-estimated total size from a blinded SD estimate; the planning formula
/// applied to `sd_est`.
pub fn reestimate_n_continuous(sd_est: f64, delta: f64, alpha: f64, beta: f64) -> f64 {
    debug_assert!(sd_est >= 0.0);
    debug_assert!(delta > 0.0);
    4.0 * sd_est * sd_est * quantile_constant(alpha, beta) / (delta * delta)
}

/// Re-estimated total size from a blinded pooled success rate:
/// `2 C / delta1^2 * 2 p (1 - p)`.
pub fn reestimate_n_binary(p_pooled: f64, delta1: f64, alpha: f64, beta: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p_pooled));
    debug_assert!(delta1 > 0.0);
    // p(1-p) is formed first so the result is exactly symmetric in
    // p <-> 1-p.
    let pq = p_pooled * (1.0 - p_pooled);
    2.0 * quantile_constant(alpha, beta) / (delta1 * delta1) * 2.0 * pq
}

/// Smallest even integer >= x, for equal allocation across two arms.
pub fn ceil_to_even(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    if x <= 0.0 {
        return 0;
    }
    2 * (x / 2.0).ceil() as u64
}

/// Planning-stage configuration of a trial.
#[derive(Debug, Clone, Serialize)]
pub struct DesignSpec {
    pub endpoint: Endpoint,
    /// One-sided significance level.
    pub alpha: f64,
    /// Type-II error rate.
    pub beta: f64,
    /// Target effect: mean difference, or p2 - p1.
    pub delta1: f64,
    /// Planning SD (continuous only).
    pub sd_init: Option<f64>,
    /// Planning success rates (binary only).
    pub p1_init: Option<f64>,
    pub p2_init: Option<f64>,
    /// Stage-1 total across both arms.
    pub n1: u32,
    /// Unrounded planning total from the applicable calculator.
    n_init: f64,
}

fn validate_error_rates(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(
            "alpha",
            format!("{alpha} is outside the open interval (0, 1)"),
        ));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::domain(
            "beta",
            format!("{beta} is outside the open interval (0, 1)"),
        ));
    }
    Ok(())
}

fn validate_n1(n1: u32) -> Result<()> {
    if n1 < 4 || !n1.is_multiple_of(2) {
        return Err(Error::domain(
            "n1",
            format!("{n1} must be an even total of at least 4"),
        ));
    }
    Ok(())
}

impl DesignSpec {
    /// Continuous-endpoint design.
    pub fn continuous(alpha: f64, beta: f64, delta1: f64, sd_init: f64, n1: u32) -> Result<Self> {
        validate_error_rates(alpha, beta)?;
        validate_n1(n1)?;
        if !(delta1 > 0.0) {
            return Err(Error::domain("delta1", format!("{delta1} is not positive")));
        }
        if !(sd_init > 0.0) {
            return Err(Error::domain(
                "sd_init",
                format!("{sd_init} is not positive"),
            ));
        }
        let n_init = required_n_continuous(sd_init, delta1, alpha, beta)?;
        Ok(DesignSpec {
            endpoint: Endpoint::Continuous,
            alpha,
            beta,
            delta1,
            sd_init: Some(sd_init),
            p1_init: None,
            p2_init: None,
            n1,
            n_init,
        })
    }

    /// Binary-endpoint design; the target effect is `p2_init - p1_init`.
    pub fn binary(alpha: f64, beta: f64, p1_init: f64, p2_init: f64, n1: u32) -> Result<Self> {
        validate_error_rates(alpha, beta)?;
        validate_n1(n1)?;
        let delta1 = p2_init - p1_init;
        if !(delta1 > 0.0) {
            return Err(Error::domain(
                "p2_init",
                format!("planning rates must satisfy p2_init > p1_init (got {p1_init}, {p2_init})"),
            ));
        }
        let n_init = required_n_binary(p1_init, p2_init, alpha, beta)?;
        Ok(DesignSpec {
            endpoint: Endpoint::Binary,
            alpha,
            beta,
            delta1,
            sd_init: None,
            p1_init: Some(p1_init),
            p2_init: Some(p2_init),
            n1,
            n_init,
        })
    }

    /// Unrounded planning total across both arms.
    pub fn n_init(&self) -> f64 {
        self.n_init
    }
}
