//! Main terms of the mollified twisted second moment, the quadrature oracle
//! and the zero-proportion estimate built on them.

mod jet;
mod kappa;
mod main_term;
mod quadrature;
mod report;

pub use jet::BivariateJet;
pub use kappa::{apply_q_operator, contract_q, kappa_csv, kappa_lower_bound, KappaConfig, KappaEstimate, TwoPieceSpec};
pub use main_term::{
    main_term_i, main_term_j, main_term_jet, main_term_limit, main_term_limit_upsilon, main_term_naive,
    main_term_upsilon, EvalMode, MainTermOptions, DEFAULT_JET_ORDER, DEFAULT_PAIR_BUDGET, MAX_JET_ORDER, MIN_HEIGHT,
};
pub use quadrature::{quadrature_i, QuadratureControl, MAX_QUADRATURE_HEIGHT, MAX_QUADRATURE_LEN};
pub use report::{Method, MomentReport};
