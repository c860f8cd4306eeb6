use alloc::vec;
use alloc::vec::Vec;

use super::eval::Evaluator;
use super::{Outcome, OptimizerConfig, StopCriterion, StopReason};
use crate::error::HmmError;
use crate::model::HmmModel;

/// Each iteration is one forward pass, one backward pass and one M-step.
/// The stop test compares the log-likelihood at the iterate just evaluated
/// with the previous one; the run returns the evaluated iterate, so the
/// final M-step output is discarded.
pub(crate) fn run<M: HmmModel>(
    ev: &mut Evaluator<'_, M>,
    theta0: &[f64],
    stop: StopCriterion,
    cfg: &OptimizerConfig,
) -> Result<Outcome, HmmError> {
    let mut theta = theta0.to_vec();
    let mut trace: Vec<f64> = Vec::new();
    let mut last: Option<(Vec<f64>, f64)> = None;
    for it in 1..=cfg.max_iter {
        let Some(fw) = ev.forward(&theta)? else {
            return Ok(fail(last, theta0, it - 1, trace));
        };
        let ll = fw.loglik;
        trace.push(ll);
        let Some(next) = ev.em_step(&theta, &fw)? else {
            return Ok(fail(Some((theta, ll)), theta0, it, trace));
        };
        if let Some((_, prev)) = last {
            if stop.should_stop(prev, ll) {
                return Ok(Outcome { theta, loglik: ll, iterations: it, reason: StopReason::Converged, modes: vec![], trace });
            }
        }
        last = Some((core::mem::replace(&mut theta, next), ll));
    }
    let (theta, loglik) = last.unwrap_or((theta, f64::NEG_INFINITY));
    Ok(Outcome { theta, loglik, iterations: cfg.max_iter, reason: StopReason::MaxIterations, modes: vec![], trace })
}

fn fail(last: Option<(Vec<f64>, f64)>, theta0: &[f64], iterations: usize, trace: Vec<f64>) -> Outcome {
    let (theta, loglik) = last.unwrap_or_else(|| (theta0.to_vec(), f64::NEG_INFINITY));
    Outcome { theta, loglik, iterations, reason: StopReason::NonFiniteLoglik, modes: vec![], trace }
}
