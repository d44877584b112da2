//! Derived quantities of the linear competition process, boundary-behaviour
//! classification, hitting statistics, the auxiliary urn and the rate series.

mod classify;
mod hitting;
mod linear;
mod lln;
mod series;
mod urn;

use thiserror::Error;

use crate::rates::{RateError, State};
use crate::sim::SimError;

pub use classify::{classify, kappa_expected, ClassificationResult, MIN_POST_BURN_IN};
pub use hitting::{hitting_stats, HitStats};
pub use linear::{
    functionals, linear_diagnostics, s_drift, symmetric_step, un_squared_one_step, DriftCheck,
    Functionals, LinearDiagnostics, Regime, UnStep,
};
pub use lln::{lamperti_exponent, lln_check, LlnReport, MIN_LLN_SEGMENT};
pub use series::{reuter_series, RateSequences, SeriesReport, SeriesSummary, TildeSeries, Verdict};
pub use urn::{
    friedman_correspondence, urn_endpoints, urn_factor, urn_martingale_defect,
    urn_moment_recursion, urn_simulate, FriedmanCheck, UrnDiagnostics, UrnMoments, MAX_RECURSION,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("state {0} is not interior")]
    NonInterior(State),
    #[error("model parameters are not symmetric")]
    NotSymmetric,
    #[error("trajectory too short: need {needed} events after burn-in, have {got}")]
    TooShort { needed: u64, got: u64 },
    #[error("{0}")]
    Unsupported(String),
    #[error("urn cannot start at (0,0)")]
    UrnOrigin,
    #[error("urn normalizer a_{0}(1) vanishes")]
    UrnNormalizerVanishes(u64),
    #[error("series input invalid: {0}")]
    Series(String),
}
