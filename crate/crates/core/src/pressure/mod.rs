//! First return and first landing branches to the central piece V, their
//! partition functions and pressure, preimage-tree pressure, the postcritical
//! series and Gibbs weight reports.

mod branches;
mod gibbs;
mod partition;
mod postcritical;
mod preimage;

pub use branches::{
    central_piece, diameter_decay, enumerate_landing_branches, enumerate_landing_branches_with, enumerate_return_branches,
    enumerate_return_branches_with, Branch, BranchInventory, BranchKind, DecayFit, AMBIGUITY_TOLERANCE, MAX_TIME_CAP,
    NODE_BUDGET,
};
pub use gibbs::{gibbs_mass_report, GibbsMassReport};
pub use partition::{
    bowen_pressure, level_sums, log_partition, partition_function, peierls_margin, DerivativeBound, PressureBracket,
};
pub use postcritical::{postcritical_bracket, postcritical_series, SeriesEstimate, TermBracket, CERTIFIED_RATIO};
pub use preimage::{preimage_pressure, real_preimage_pressure, MAX_PREIMAGE_DEPTH};
