//! Maximum-likelihood estimation of hidden Markov model parameters.
//!
//! The crate is `no_std` (it needs `alloc`) and carries the numerical core:
//!
//! - [`forward`]: the conditional-probability forward pass (forecast α,
//!   filtering β, partial log-likelihoods γ), a log-space joint-probability
//!   forward used as a cross-check, and forward-mode gradients.
//! - [`backward`]: smoothing (δ) and marginal (φ) posteriors.
//! - [`autodiff`]: fixed-width dual numbers.
//! - [`optim`]: Baum-Welch, SQUAREM, projected BFGS and the hybrid QNEM,
//!   all sharing one stopping rule and one set of step counters.
//! - [`models`]: the umbrella, geyser (dichotomised and Gaussian) and
//!   homozygosity-by-descent models.
//! - [`sim`] and [`data`]: seed-deterministic simulators and sequence
//!   transforms.
//! - [`bench`]: pure aggregation for multi-start benchmarks.
//!
//! IO, bundled datasets, parallel benchmark execution and the CLI live in
//! the `hmmfit` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod autodiff;
pub mod backward;
pub mod bench;
pub mod data;
mod error;
pub mod forward;
pub mod math;
pub mod model;
pub mod models;
pub mod optim;
pub mod params;
pub mod sequence;
pub mod sim;

pub use autodiff::{Dual, Scalar, MAX_PARAMS};
pub use backward::{backward, PosteriorSet};
pub use error::HmmError;
pub use forward::{forward_conditional, forward_joint_log, loglik_with_gradient, ForwardResult};
pub use model::{expected_complete_loglik, BoxKind, HmmModel};
pub use models::{AnyModel, GeyserCont, GeyserDisc, Hbd, ModelKind, Umbrella};
pub use optim::{Optimizer, OptimizerConfig, RunRecord, StopCriterion, StopReason};
pub use params::{Bounds, ParamVector};
pub use sequence::{ObsSequence, Observations, MISSING};
