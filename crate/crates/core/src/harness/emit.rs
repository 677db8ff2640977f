//! CSV and JSON emission.
//!
//! CSV is the canonical output: comma-separated, '.' decimal, six
//! significant digits, fixed header. The JSON mirror carries full double
//! precision plus per-metric Monte Carlo standard errors.

use serde::Serialize;

use crate::design::Endpoint;
use crate::metrics::ScenarioSummary;
use crate::recruitment::T1Mode;
use crate::statdist::PowerMode;

/// Formats with six significant digits; integral values print without a
/// fractional part so coordinates like `m` stay readable.
pub fn fmt_sig(v: f64) -> String {
    const SIG: i32 = 6;
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    if v.fract() == 0.0 && v.abs() < 1e15 {
        return format!("{}", v as i64);
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (SIG - 1 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Header for the summary CSV; the blinded-estimate column is named by
/// endpoint.
pub fn summary_header(endpoint: Endpoint) -> String {
    let blinded = match endpoint {
        Endpoint::Continuous => "avg_blinded_sd",
        Endpoint::Binary => "avg_p",
    };
    format!(
        "truth_param,empirical_power,m,n_oracle,avg_N_star,n_delay,{blinded},\
         mse_single,mse_ssr,cost_single,cost_ssr,delay_impact"
    )
}

fn summary_row(s: &ScenarioSummary) -> String {
    [
        fmt_sig(s.truth_param),
        fmt_sig(s.empirical_power),
        fmt_sig(s.m),
        fmt_sig(s.n_oracle),
        fmt_sig(s.avg_n_final),
        fmt_sig(s.n_delay),
        fmt_sig(s.avg_blinded_estimate),
        fmt_sig(s.mse_single),
        fmt_sig(s.mse_ssr),
        fmt_sig(s.cost_single),
        fmt_sig(s.cost_ssr),
        fmt_sig(s.delay_impact),
    ]
    .join(",")
}

/// Renders scenario summaries as the canonical CSV document.
pub fn summaries_to_csv(rows: &[ScenarioSummary], endpoint: Endpoint) -> String {
    let mut out = summary_header(endpoint);
    out.push('\n');
    for row in rows {
        out.push_str(&summary_row(row));
        out.push('\n');
    }
    out
}

/// Run metadata plus full-precision rows, for the JSON mirror.
#[derive(Debug, Serialize)]
pub struct SummaryDocument<'a> {
    pub endpoint: Endpoint,
    pub base_seed: u64,
    pub replicates: usize,
    pub t1_mode: T1Mode,
    pub power_mode: PowerMode,
    pub rows: &'a [ScenarioSummary],
}

/// Renders the JSON mirror of a summary run.
pub fn summaries_to_json(doc: &SummaryDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("summaries serialize");
    text.push('\n');
    text
}
