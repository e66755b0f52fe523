//! Numerical verification of the photon-statistics identities, report
//! writers, and the command-line front end.

pub mod claims;
pub mod cli;
pub mod report;

pub use claims::{
    registry, run_claims, Claim, ClaimResult, Context, Outcome, Status, VerifyConfig,
};
pub use report::{Format, Report};
