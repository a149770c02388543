//! Dynamic-regret online convex optimisation.
//!
//! The crate provides feasible domains with exact projections, counted loss
//! oracles, optimistic mirror descent, the full-information learners (OGD,
//! Ader, OEGD, Sword, Sword++), the two-point bandit learner, regret metrics
//! and the synthetic environments used by the `dynreg` benchmark binary.

pub mod bandit;
pub mod domain;
pub mod envs;
pub mod experiment;
pub mod error;
pub mod learners;
pub mod metrics;
pub mod omd;
pub mod oracle;
pub mod vector;

pub use domain::FeasibleDomain;
pub use error::{Error, Result};
pub use oracle::SmoothConvexOracle;
pub use vector::DecisionVector;
