//! Quantitative inequality chains and measured constants behind the
//! composition results, evaluated at finite range.
//!
//! Every runner returns either a [`ChainReport`](crate::ChainReport) whose rows
//! re-verify from their stored factors, or a small report of measured
//! constants with trend flags.

mod bounded;
mod compactness;
mod growth;
mod negative;
mod sufficient;
mod sums;

pub use bounded::{bounded_derivative_chain, derivative_witness};
pub use compactness::compactness_blowup;
pub use growth::{cauchy_derivative_bound, necessary_growth, NecessaryReport};
pub use negative::{block_schedule, gevrey_stationary_point, negative_chain, BlockSchedule};
pub use sufficient::{
    composed_seminorm_bound, sufficient_condition_check, SufficientReport, SufficientRow,
};
pub use sums::{equicontinuity_constant, nuclearity_sum};

/// Relative growth above which a measured constant counts as increasing.
pub const TREND_TOL: f64 = 1e-9;

/// `log(1 + e^l)` without overflow.
pub(crate) fn log1p_exp(l: f64) -> f64 {
    if l > 0.0 {
        l + (-l).exp().ln_1p()
    } else {
        l.exp().ln_1p()
    }
}

/// Relative tolerance scaled to the magnitude of a log-domain quantity.
pub(crate) fn tol_for(v: f64) -> f64 {
    crate::report::CHAIN_TOL * v.abs().max(1.0)
}

/// Whether `new` exceeds `old` beyond [`TREND_TOL`] relative.
pub(crate) fn grows(new: f64, old: f64) -> bool {
    if old == f64::NEG_INFINITY {
        return new > f64::NEG_INFINITY;
    }
    new - old > TREND_TOL * old.abs().max(1.0)
}
