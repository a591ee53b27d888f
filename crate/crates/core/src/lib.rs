//! Differentially private optimistic value iteration for episodic tabular MDPs.
//!
//! The layers, bottom up:
//!
//! - [`mdp`]: the model, the RiverSwim builder, exact planning and episode sampling.
//! - [`stats`]: true visitation and reward counters.
//! - [`mechanisms`]: Laplace noise and the Binary Mechanism continual counter.
//! - [`projection`]: the min-max consistency projection applied to noisy counts.
//! - [`privatizer`]: none / central (JDP) / local (LDP) privatizers.
//! - [`planner`]: private estimates, the Bernstein bonus and the episode loop.
//! - [`harness`]: multi-seed experiments with CSV and SVG output.
//!
//! Every capability has a runnable example under `examples/`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod harness;
pub mod mdp;
pub mod mechanisms;
pub mod planner;
pub mod privatizer;
pub mod projection;
pub mod stats;

pub use error::{Error, Result};
pub use harness::{run_experiment, ArmSpec, ExperimentSpec};
pub use mdp::{
    build_riverswim, exact_value_iteration, policy_evaluation, Policy, RiverSwimParams, TabularMdp,
};
pub use planner::{dp_ucbvi_run, ucbvi_hoeffding_baseline, RegretRecord, RunConfig};
pub use privatizer::{
    build_privatizer, PrivateCounts, Privatizer, PrivatizerConfig, PrivatizerKind,
};
