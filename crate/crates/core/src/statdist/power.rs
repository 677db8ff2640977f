//! Power approximations for the two-sample tests.

use super::normal::{std_normal_cdf, std_normal_quantile_unchecked};
use super::student::central_t_quantile;

/// Which critical value feeds the shifted-normal power approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerMode {
    /// Normal critical value Phi^-1(1 - alpha) (the default).
    #[default]
    Normal,
    /// Central-t critical value with df = n_total - 2.
    #[serde(alias = "t")]
    TAdjusted,
}

impl std::str::FromStr for PowerMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "normal" => Ok(PowerMode::Normal),
            "t" | "t-adjusted" => Ok(PowerMode::TAdjusted),
            other => Err(format!(
                "unknown power mode `{other}` (expected `normal` or `t`)"
            )),
        }
    }
}

/// Power of the one-sided two-sample test for a mean difference `delta`
/// with common standard deviation `sd` and total sample size `n_total`
/// split equally across arms.
///
/// `Phi(delta / (sd * sqrt(4/n)) - crit)` where `crit` is the normal or
/// central-t critical value depending on `mode`.
pub fn power_continuous(n_total: f64, delta: f64, sd: f64, alpha: f64, mode: PowerMode) -> f64 {
    debug_assert!(n_total > 0.0);
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    debug_assert!(sd >= 0.0);
    let crit = match mode {
        PowerMode::Normal => std_normal_quantile_unchecked(1.0 - alpha),
        PowerMode::TAdjusted => {
            let df = n_total - 2.0;
            if df <= 0.0 {
                return 0.0;
            }
            central_t_quantile(1.0 - alpha, df).expect("validated arguments")
        }
    };
    let se = sd * (4.0 / n_total).sqrt();
    let shift = if se == 0.0 {
        match delta.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => f64::INFINITY,
            Some(std::cmp::Ordering::Less) => f64::NEG_INFINITY,
            _ => 0.0,
        }
    } else {
        delta / se
    };
    std_normal_cdf(shift - crit)
}

/// Power of the one-sided two-proportion test at true rates `p1` (control)
/// and `p2` (treatment) with total sample size `n_total` split equally.
///
/// Normal approximation with pooled-null variance in the rejection
/// threshold and the alternative variance in the sampling distribution of
/// the rate difference.
pub fn power_binary(n_total: f64, p1: f64, p2: f64, alpha: f64) -> f64 {
    debug_assert!(n_total > 0.0);
    debug_assert!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0);
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let delta = p2 - p1;
    let pbar = 0.5 * (p1 + p2);
    let z = std_normal_quantile_unchecked(1.0 - alpha);
    let threshold = z * (pbar * (1.0 - pbar)).sqrt() / (n_total / 4.0).sqrt();
    let alt_se = ((p1 * (1.0 - p1) + p2 * (1.0 - p2)) * 2.0 / n_total).sqrt();
    std_normal_cdf((delta - threshold) / alt_se)
}
