//! Self-contained statistical primitives: normal and central-t distribution
//! functions, two-sample power approximations, and reproducible sampling.

mod normal;
mod power;
mod rng;
mod student;
mod ttest;

pub use normal::{erf, erfc, std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub use power::{power_binary, power_continuous, PowerMode};
pub use rng::RngStream;
pub use student::{central_t_quantile, inc_beta, inv_inc_beta, ln_gamma};
pub use ttest::two_sample_t_test;

pub(crate) use normal::std_normal_quantile_unchecked;
