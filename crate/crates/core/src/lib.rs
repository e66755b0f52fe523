//! Truncated single-mode Fock-space states, photon-number statistics,
//! ladder and phase operators, generating-function families, and a harness
//! that checks known photon-statistics identities numerically.

// `!(x > y)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod fock;
pub mod genfun;
pub mod harness;
pub mod operators;
pub mod statistics;

pub use error::{FockError, Result, StepError};
pub use families::{FamilyKind, FamilySpec, Relations};
pub use fock::{
    distribution_of, fidelity, inner_product, CutoffPolicy, FockState, PhotonDistribution,
};
pub use num_complex::Complex64;
pub use operators::{apply, apply_chain, iterate, Applied, OperatorKind, Step};
pub use statistics::{check_hyper, predictions, stats, StatsClass, StatsReport};
