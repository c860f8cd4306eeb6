use alloc::vec;
use alloc::vec::Vec;

use super::bfgs::{armijo, diff, neg, negligible, InverseHessian};
use super::eval::Evaluator;
use super::{Outcome, OptimizerConfig, StopCriterion, StopReason};
use crate::error::HmmError;
use crate::math::dot;
use crate::model::HmmModel;

/// Projected BFGS on the negative log-likelihood. A failed line search
/// first retries with `H = I`; a direction whose predicted decrease is
/// below rounding level counts as convergence.
pub(crate) fn run<M: HmmModel>(
    ev: &mut Evaluator<'_, M>,
    theta0: &[f64],
    stop: StopCriterion,
    cfg: &OptimizerConfig,
) -> Result<Outcome, HmmError> {
    let n = theta0.len();
    let mut theta = theta0.to_vec();
    let Some(first) = ev.gradient(&theta)? else {
        return Ok(done(theta, f64::NEG_INFINITY, 0, StopReason::NonFiniteLoglik, vec![]));
    };
    let mut ll = first.loglik;
    let mut g = neg(&first.gradient);
    let mut h = InverseHessian::new(n);
    let mut trace = vec![ll];
    for it in 1..=cfg.max_iter {
        let mut p = h.direction(&g, &theta, &ev.bounds);
        if negligible(&g, &p, ll) {
            return Ok(done(theta, ll, it, StopReason::Converged, trace));
        }
        let mut accepted = None;
        if dot(&g, &p) < 0.0 {
            accepted = armijo(ev, &theta, -ll, &g, &p, cfg)?;
        }
        if accepted.is_none() && !h.is_fresh() {
            h.reset();
            p = h.direction(&g, &theta, &ev.bounds);
            accepted = armijo(ev, &theta, -ll, &g, &p, cfg)?;
        }
        let Some(step) = accepted else {
            return Ok(done(theta, ll, it, StopReason::LineSearchFailure, trace));
        };
        let g_new = neg(&step.grad.gradient);
        let s = diff(&step.theta, &theta);
        let y = diff(&g_new, &g);
        if !h.update(&s, &y, cfg.inverse_update) {
            h.reset();
        }
        let ll_prev = ll;
        theta = step.theta;
        ll = step.grad.loglik;
        g = g_new;
        trace.push(ll);
        if stop.should_stop(ll_prev, ll) {
            return Ok(done(theta, ll, it, StopReason::Converged, trace));
        }
    }
    Ok(done(theta, ll, cfg.max_iter, StopReason::MaxIterations, trace))
}

fn done(theta: Vec<f64>, loglik: f64, iterations: usize, reason: StopReason, trace: Vec<f64>) -> Outcome {
    Outcome { theta, loglik, iterations, reason, modes: vec![], trace }
}
