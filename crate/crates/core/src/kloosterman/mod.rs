//! Kloosterman sums, Heath-Brown's identities, the Type I/II split and
//! empirical measurement of the bilinear and trilinear sum bounds.

pub mod heath_brown;
pub mod measure;
pub mod split;
pub mod sums;

pub use heath_brown::{heath_brown_lambda, heath_brown_mu, HeathBrown};
pub use measure::{
    bilinear_campaign, bilinear_sum_measure, rows_to_csv, trilinear_campaign, trilinear_sum_measure, MeasurementRow,
    RatioReport,
};
pub use split::{type_split, RangeSplit, SplitKind};
pub use sums::{
    complete_kloosterman, incomplete_kloosterman, weil_bound, weil_campaign, IncompleteSum, KloostermanRecord,
    KloostermanTable, WeilSummary,
};
