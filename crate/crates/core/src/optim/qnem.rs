use alloc::vec;
use alloc::vec::Vec;

use super::bfgs::{armijo, diff, neg, negligible, InverseHessian};
use super::eval::Evaluator;
use super::{Mode, Outcome, OptimizerConfig, StopCriterion, StopReason};
use crate::error::HmmError;
use crate::forward::GradientResult;
use crate::math::dot;
use crate::model::HmmModel;

/// Hybrid of EM and BFGS steps. The run starts in EM mode; every EM step
/// runs its forward pass with derivatives so the secant pair `(s, y)` is
/// available, and a positive `s'y` updates `H` and switches to
/// quasi-Newton steps. A quasi-Newton step whose curvature test fails
/// resets `H = I` and returns to EM mode; one whose line search fails does
/// an EM step instead within the same iteration.
pub(crate) fn run<M: HmmModel>(
    ev: &mut Evaluator<'_, M>,
    theta0: &[f64],
    stop: StopCriterion,
    cfg: &OptimizerConfig,
) -> Result<Outcome, HmmError> {
    let n = theta0.len();
    let mut theta = theta0.to_vec();
    let Some(mut cur) = ev.gradient(&theta)? else {
        return Ok(done(theta, f64::NEG_INFINITY, 0, StopReason::NonFiniteLoglik, vec![], vec![]));
    };
    let mut h = InverseHessian::new(n);
    let mut mode = Mode::Em;
    let mut modes = Vec::new();
    let mut trace = vec![cur.loglik];

    for it in 1..=cfg.max_iter {
        let g = neg(&cur.gradient);
        let mut next: Option<(Vec<f64>, GradientResult)> = None;
        let mut taken = Mode::Em;

        if mode == Mode::Qn {
            let p = h.direction(&g, &theta, &ev.bounds);
            if negligible(&g, &p, cur.loglik) {
                modes.push(Mode::Qn);
                trace.push(cur.loglik);
                return Ok(done(theta, cur.loglik, it, StopReason::Converged, modes, trace));
            }
            if dot(&g, &p) < 0.0 {
                if let Some(step) = armijo(ev, &theta, -cur.loglik, &g, &p, cfg)? {
                    next = Some((step.theta, step.grad));
                    taken = Mode::Qn;
                }
            }
            if next.is_none() {
                h.reset();
                mode = Mode::Em;
            }
        }

        if next.is_none() {
            let Some(em) = ev.em_step(&theta, &cur.forward)? else {
                return Ok(done(theta, cur.loglik, it, StopReason::NonFiniteLoglik, modes, trace));
            };
            let Some(gr) = ev.gradient(&em)? else {
                return Ok(done(theta, cur.loglik, it, StopReason::NonFiniteLoglik, modes, trace));
            };
            next = Some((em, gr));
        }

        let (theta_new, gr_new) = next.expect("step taken");
        let s = diff(&theta_new, &theta);
        let y = diff(&neg(&gr_new.gradient), &g);
        if h.update(&s, &y, cfg.inverse_update) {
            mode = Mode::Qn;
        } else if taken == Mode::Qn {
            h.reset();
            mode = Mode::Em;
        }
        modes.push(taken);

        let ll_prev = cur.loglik;
        theta = theta_new;
        cur = gr_new;
        trace.push(cur.loglik);
        if stop.should_stop(ll_prev, cur.loglik) {
            return Ok(done(theta, cur.loglik, it, StopReason::Converged, modes, trace));
        }
    }
    Ok(done(theta, cur.loglik, cfg.max_iter, StopReason::MaxIterations, modes, trace))
}

fn done(theta: Vec<f64>, loglik: f64, iterations: usize, reason: StopReason, modes: Vec<Mode>, trace: Vec<f64>) -> Outcome {
    Outcome { theta, loglik, iterations, reason, modes, trace }
}
