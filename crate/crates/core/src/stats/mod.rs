//! High-frequency statistics: local-time and occupation sums, one-sided and
//! quadratic-variation sums, the mean-absolute-displacement statistic, and
//! speed-measure integrals.

mod ghat;
mod ks;
mod testfn;
mod trace;

pub use ghat::{
    g_hat_n, g_hat_reference, gamma_audit_constant, speed_measure_abs_moment,
    speed_measure_integral, verify_prop_5_7, GHatTable, Prop57Report, Prop57Row,
};
pub use ks::{ks_statistic, ks_statistic_mixed, ks_threshold, mean_se, median, quartiles};
pub use testfn::{NormalizingSequence, TestFunction, TransformFunction};
pub use trace::{
    local_time_statistic, occupation_statistic, one_sided_sums, quadratic_variation_sums,
    transformed_statistic, Interval, Trace,
};
