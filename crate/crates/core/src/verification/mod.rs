//! Numerical checks of the overlap estimate, the inductive inequality
//! `E_k ≤ E_{k-1} - c·E_{k-1}²`, θ-invariance, and the `C/n` decay law.

mod decay;
mod induction;
mod overlap;
mod theta;

pub use decay::{
    fit_decay, fit_decay_series, mattila_ratio, spread, DecayFit, LinearFit, MattilaReport,
    ScaleFit,
};
pub use induction::{
    induction_constant, pair_overlap_constant, verify_induction, verify_induction_series,
    InductionReport, InductionRow, PAIR_BOUND_MAX_DEGREE, QUARTER_MODEL_CONSTANT,
};
pub use overlap::{full_interval_closed_form, overlap_integral, theta_star, OverlapReport};
pub use theta::{verify_theta_invariance, ThetaInvarianceReport, ThetaPair};
