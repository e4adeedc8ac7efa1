//! Monte-Carlo estimates over the amplitude field θ.

mod estimates;
mod evc;
mod plan;
mod rcm;

pub use estimates::{
    replay, sep_l0_estimate, theta_bad_measure, wegner_estimate, BadMeasureReport, ReplayOutcome, SepL0Report, WegnerPoint, WegnerReport,
};
pub use evc::{evc_pair_bound_check, EvcReport};
pub use plan::{McPlan, OmegaRule, Scenario, TrialFailure, TrialKind};
pub use rcm::{binning_check, conditional_concentration, rcm_check, BinningCheck, RcmCell, RcmConfig, RcmReport};
