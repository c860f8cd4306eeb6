use alloc::vec;
use alloc::vec::Vec;

use super::bfgs::diff;
use super::eval::Evaluator;
use super::{Outcome, OptimizerConfig, StopCriterion, StopReason};
use crate::error::HmmError;
use crate::forward::ForwardResult;
use crate::math::{dot, sqrt};
use crate::model::HmmModel;

/// One iteration is one cycle: two EM steps θ0 → θ1 → θ2, an extrapolated
/// candidate with steplength `s = −√(r·r / v·v)` backed off toward −1 while
/// it is worse than θ2, and a stabilising EM step after an accepted
/// candidate. Forward passes are reused wherever θ has not changed.
pub(crate) fn run<M: HmmModel>(
    ev: &mut Evaluator<'_, M>,
    theta0: &[f64],
    stop: StopCriterion,
    cfg: &OptimizerConfig,
) -> Result<Outcome, HmmError> {
    let mut theta = theta0.to_vec();
    let Some(mut fw) = ev.forward(&theta)? else {
        return Ok(done(theta, f64::NEG_INFINITY, 0, StopReason::NonFiniteLoglik, vec![]));
    };
    let mut trace = vec![fw.loglik];
    for it in 1..=cfg.max_iter {
        let ll0 = fw.loglik;
        match cycle(ev, &theta, &fw, cfg)? {
            Some((next, next_fw)) => {
                theta = next;
                fw = next_fw;
            }
            None => return Ok(done(theta, ll0, it, StopReason::NonFiniteLoglik, trace)),
        }
        trace.push(fw.loglik);
        if stop.should_stop(ll0, fw.loglik) {
            return Ok(done(theta, fw.loglik, it, StopReason::Converged, trace));
        }
    }
    Ok(done(theta, fw.loglik, cfg.max_iter, StopReason::MaxIterations, trace))
}

fn done(theta: Vec<f64>, loglik: f64, iterations: usize, reason: StopReason, trace: Vec<f64>) -> Outcome {
    Outcome { theta, loglik, iterations, reason, modes: vec![], trace }
}

fn em<M: HmmModel>(
    ev: &mut Evaluator<'_, M>,
    theta: &[f64],
    fw: &ForwardResult,
) -> Result<Option<(Vec<f64>, ForwardResult)>, HmmError> {
    let Some(next) = ev.em_step(theta, fw)? else { return Ok(None) };
    Ok(ev.forward(&next)?.map(|f| (next, f)))
}

fn cycle<M: HmmModel>(
    ev: &mut Evaluator<'_, M>,
    theta0: &[f64],
    fw0: &ForwardResult,
    cfg: &OptimizerConfig,
) -> Result<Option<(Vec<f64>, ForwardResult)>, HmmError> {
    let Some((theta1, fw1)) = em(ev, theta0, fw0)? else { return Ok(None) };
    let Some((theta2, fw2)) = em(ev, &theta1, &fw1)? else { return Ok(Some((theta1, fw1))) };
    let r = diff(&theta1, theta0);
    let v: Vec<f64> = diff(&diff(&theta2, &theta1), &r);
    let (rr, vv) = (dot(&r, &r), dot(&v, &v));
    if !(vv > 0.0) || !rr.is_finite() {
        return Ok(Some((theta2, fw2)));
    }
    let mut s = -sqrt(rr / vv);
    for _ in 0..=cfg.squarem_max_halvings {
        let mut cand: Vec<f64> = (0..r.len()).map(|j| theta0[j] - 2.0 * s * r[j] + s * s * v[j]).collect();
        ev.bounds.clip(&mut cand);
        if let Some(fw_c) = ev.forward(&cand)? {
            if fw_c.loglik >= fw2.loglik {
                return match em(ev, &cand, &fw_c)? {
                    Some((stab, fw_s)) if fw_s.loglik >= fw_c.loglik => Ok(Some((stab, fw_s))),
                    _ => Ok(Some((cand, fw_c))),
                };
            }
        }
        s = 0.5 * (s - 1.0);
    }
    Ok(Some((theta2, fw2)))
}
