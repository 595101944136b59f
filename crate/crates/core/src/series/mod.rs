//! Block partition of the positive integers and the two-variable series built
//! on it, evaluated in base-2 logarithms with outward rounding so that block
//! endpoints like 2^{q s³} stay exact.

mod blocks;
mod ival;
mod lemmas;
mod log_scalar;
mod oracle;
mod scheme;

pub use blocks::{block_sums, block_sums_nearest, series_totals, BlockSums, DecayRate, SeriesTotals};
pub use lemmas::{verify_appendix_lemmas, LemmaCheck, LemmaReport, ENDPOINT_CHECK_MAX_S};
pub use log_scalar::{LogEnclosure, LogScalar, Rounding};
pub use oracle::{brute_force_oracle, OracleSum};
pub use scheme::{
    block_counters, lambda_of_s, offset_for, partition_endpoints, Counters, Endpoints, PartitionScheme,
    MAX_BLOCK_EXPONENT, MAX_EXACT_BITS,
};
