//! One-sided two-sample pooled-variance t-test.

use std::cell::RefCell;
use std::collections::HashMap;

use super::student::central_t_quantile;
use crate::{Error, Result};

/// Critical value `t_{1-alpha, df}`, memoized per thread since the engine
/// requests the same (alpha, df) pairs millions of times.
fn critical_t(alpha: f64, df: f64) -> Result<f64> {
    thread_local! {
        static CACHE: RefCell<HashMap<(u64, u64), f64>> = RefCell::new(HashMap::new());
    }
    let key = (alpha.to_bits(), df.to_bits());
    if let Some(hit) = CACHE.with(|c| c.borrow().get(&key).copied()) {
        return Ok(hit);
    }
    let value = central_t_quantile(1.0 - alpha, df)?;
    CACHE.with(|c| c.borrow_mut().insert(key, value));
    Ok(value)
}

fn mean_and_ss(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, ss)
}

/// Independent two-sample t-test of H1: mean(E) > mean(C) at level `alpha`.
///
/// Returns the statistic and the rejection decision against the central-t
/// critical value with `n_E + n_C - 2` degrees of freedom. Degenerate data
/// with zero pooled variance follow the infinite-statistic convention: the
/// statistic is 0 (no rejection) for equal means and +/-inf by the sign of
/// the difference otherwise, so only a positive difference rejects.
pub fn two_sample_t_test(ys_e: &[f64], ys_c: &[f64], alpha: f64) -> Result<(f64, bool)> {
    if ys_e.len() < 2 {
        return Err(Error::domain("ys_E", "needs at least 2 observations"));
    }
    if ys_c.len() < 2 {
        return Err(Error::domain("ys_C", "needs at least 2 observations"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(
            "alpha",
            format!("{alpha} is outside the open interval (0, 1)"),
        ));
    }
    let (n_e, n_c) = (ys_e.len() as f64, ys_c.len() as f64);
    let (mean_e, ss_e) = mean_and_ss(ys_e);
    let (mean_c, ss_c) = mean_and_ss(ys_c);
    let df = n_e + n_c - 2.0;
    let pooled_var = (ss_e + ss_c) / df;
    let diff = mean_e - mean_c;

    if pooled_var == 0.0 {
        if diff == 0.0 {
            return Ok((0.0, false));
        }
        let t = if diff > 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        return Ok((t, diff > 0.0));
    }

    let t = diff / (pooled_var.sqrt() * (1.0 / n_e + 1.0 / n_c).sqrt());
    let crit = critical_t(alpha, df)?;
    Ok((t, t >= crit))
}
