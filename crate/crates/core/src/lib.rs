//! Mollified twisted second moments of the Riemann zeta function.

pub mod arith;
pub mod error;
pub mod kloosterman;
pub mod mollifier;
pub mod moments;
pub mod series;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
pub use mollifier::CoefficientTable;
pub use moments::MomentReport;
pub use special::ShiftPair;
