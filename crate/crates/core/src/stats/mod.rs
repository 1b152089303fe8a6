//! Rank statistics on MOS data.

mod dataset;
mod estimate;
mod gaps;
pub mod missed_tie;
mod rank;

pub use dataset::Dataset;
pub use estimate::{compute_mos_estimate, CiMethod, MosEstimate, OpinionVotes, Scale};
pub use gaps::{gap_analysis, GapPair, GapReport};
pub use missed_tie::{delta_rho_missed_tie, max_delta_rho};
pub use rank::{fractional_ranks, pearson, rank_difference_coefficient, srcc, RankVector};

/// Absolute slack applied to MOS comparisons, so that decimal inputs such
/// as `4.4 - 4.3 <= 0.1` compare the way they are written.
pub const MOS_EPSILON: f64 = 1e-9;
