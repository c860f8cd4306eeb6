//! The four estimators and what they share: stopping rule, configuration,
//! run records and call counting.

mod baum_welch;
mod bfgs;
mod eval;
mod qn_box;
mod qnem;
mod squarem;

use alloc::vec::Vec;
use core::str::FromStr;

pub use bfgs::{update_inverse_hessian, InverseUpdate};

use crate::error::HmmError;
use crate::model::{BoxKind, HmmModel};
use crate::sequence::ObsSequence;

/// Relative-change stopping rule on the log-likelihood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopCriterion {
    reltol: f64,
}

impl StopCriterion {
    pub const DEFAULT_RELTOL: f64 = 1.49e-8;

    pub fn new(reltol: f64) -> Result<Self, HmmError> {
        if !(reltol > 0.0) || !reltol.is_finite() {
            return Err(HmmError::Model(alloc::format!("reltol must be positive, got {reltol}")));
        }
        Ok(StopCriterion { reltol })
    }

    pub fn reltol(&self) -> f64 {
        self.reltol
    }

    pub fn should_stop(&self, ll_prev: f64, ll_curr: f64) -> bool {
        should_stop(ll_prev, ll_curr, self.reltol)
    }
}

impl Default for StopCriterion {
    fn default() -> Self {
        StopCriterion { reltol: Self::DEFAULT_RELTOL }
    }
}

/// `|ll_prev − ll_curr| / (|ll_prev| + reltol) < reltol`. False when either
/// value is not finite.
pub fn should_stop(ll_prev: f64, ll_curr: f64, reltol: f64) -> bool {
    ll_prev.is_finite() && ll_curr.is_finite() && (ll_prev - ll_curr).abs() / (ll_prev.abs() + reltol) < reltol
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub reltol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo_c: f64,
    /// Step shrink factor per backtracking halving.
    pub backtrack_factor: f64,
    pub max_halvings: usize,
    pub squarem_max_halvings: usize,
    pub inverse_update: InverseUpdate,
    /// Overrides the per-model default box, see [`Optimizer::box_kind`].
    pub box_kind: Option<BoxKind>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            reltol: StopCriterion::DEFAULT_RELTOL,
            max_iter: 500,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            max_halvings: 30,
            squarem_max_halvings: 5,
            inverse_update: InverseUpdate::Bfgs,
            box_kind: None,
        }
    }
}

impl OptimizerConfig {
    pub fn stop(&self) -> Result<StopCriterion, HmmError> {
        StopCriterion::new(self.reltol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Optimizer {
    BaumWelch,
    Squarem,
    QnBox,
    Qnem,
}

impl Optimizer {
    pub const ALL: [Optimizer; 4] = [Optimizer::BaumWelch, Optimizer::Squarem, Optimizer::QnBox, Optimizer::Qnem];

    pub fn name(self) -> &'static str {
        match self {
            Optimizer::BaumWelch => "baum-welch",
            Optimizer::Squarem => "squarem",
            Optimizer::QnBox => "qn-box",
            Optimizer::Qnem => "qnem",
        }
    }

    /// True for the optimizers that take quasi-Newton steps.
    pub fn uses_gradient(self) -> bool {
        matches!(self, Optimizer::QnBox | Optimizer::Qnem)
    }

    /// The box this optimizer runs in: the configured one, else the
    /// natural box for the EM family and the model's gradient box for the
    /// quasi-Newton family.
    pub fn box_kind<M: HmmModel>(self, model: &M, cfg: &OptimizerConfig) -> BoxKind {
        match cfg.box_kind {
            Some(kind) => kind,
            None if self.uses_gradient() => model.gradient_box(),
            None => BoxKind::Natural,
        }
    }

    /// Runs the optimizer from `theta0`, which must lie in the configured
    /// box. Numerical trouble ends the run with a [`StopReason`]; only
    /// invalid input and model errors are returned as `Err`.
    pub fn run<M: HmmModel>(
        self,
        model: &M,
        seq: &ObsSequence,
        theta0: &[f64],
        cfg: &OptimizerConfig,
    ) -> Result<RunRecord, HmmError> {
        let stop = cfg.stop()?;
        if theta0.len() != model.param_dim() {
            return Err(HmmError::DimensionMismatch { expected: model.param_dim(), actual: theta0.len() });
        }
        model.validate(seq)?;
        let kind = self.box_kind(model, cfg);
        model.bounds(kind).check(theta0)?;
        let mut ev = eval::Evaluator::new(model, seq, kind);
        let out = match self {
            Optimizer::BaumWelch => baum_welch::run(&mut ev, theta0, stop, cfg)?,
            Optimizer::Squarem => squarem::run(&mut ev, theta0, stop, cfg)?,
            Optimizer::QnBox => qn_box::run(&mut ev, theta0, stop, cfg)?,
            Optimizer::Qnem => qnem::run(&mut ev, theta0, stop, cfg)?,
        };
        Ok(RunRecord {
            optimizer: self,
            final_theta: out.theta,
            final_loglik: out.loglik,
            iterations: out.iterations,
            n_forward: ev.n_forward,
            n_backward: ev.n_backward,
            wall_time_s: 0.0,
            converged: out.reason == StopReason::Converged,
            stop_reason: out.reason,
            mode_trace: out.modes,
            loglik_trace: out.trace,
        })
    }
}

impl FromStr for Optimizer {
    type Err = HmmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Optimizer::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| HmmError::Model(alloc::format!("unknown optimizer `{s}`")))
    }
}

/// Step type of a QNEM iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Em,
    Qn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    /// No Armijo point within the allowed halvings.
    LineSearchFailure,
    /// The log-likelihood was not finite where the optimizer needed it.
    NonFiniteLoglik,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::MaxIterations => "max-iterations",
            StopReason::LineSearchFailure => "line-search-failure",
            StopReason::NonFiniteLoglik => "non-finite-loglik",
        }
    }
}

/// Outcome of one optimizer run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub optimizer: Optimizer,
    pub final_theta: Vec<f64>,
    pub final_loglik: f64,
    pub iterations: usize,
    /// Forward passes actually executed, line-search trials included.
    pub n_forward: usize,
    pub n_backward: usize,
    /// Filled in by callers with a clock; always 0 here.
    pub wall_time_s: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// One entry per QNEM iteration; empty for the other optimizers.
    pub mode_trace: Vec<Mode>,
    /// Log-likelihood at the start and after every iteration.
    pub loglik_trace: Vec<f64>,
}

impl RunRecord {
    pub fn nll(&self) -> f64 {
        -self.final_loglik
    }
}

pub(crate) struct Outcome {
    pub theta: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
    pub reason: StopReason,
    pub modes: Vec<Mode>,
    pub trace: Vec<f64>,
}

#[cfg(test)]
mod tests;
