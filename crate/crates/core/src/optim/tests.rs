use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::*;
use crate::autodiff::Scalar;
use crate::backward::PosteriorSet;
use crate::models::{GeyserDisc, Umbrella};
use crate::params::Bounds;

/// One hidden state emitting `1` with probability `p`.
struct Coin;

impl HmmModel for Coin {
    fn name(&self) -> &'static str {
        "coin"
    }
    fn n_states(&self) -> usize {
        1
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["p"]
    }
    fn state_names(&self) -> &'static [&'static str] {
        &["only"]
    }
    fn alphabet(&self) -> Option<&'static [&'static str]> {
        Some(&["0", "1"])
    }
    fn bounds(&self, _kind: BoxKind) -> Bounds {
        Bounds::new(vec![0.0], vec![1.0]).unwrap()
    }
    fn validate(&self, _seq: &ObsSequence) -> Result<(), HmmError> {
        Ok(())
    }
    fn initial<S: Scalar>(&self, _theta: &[S], out: &mut [S]) {
        out[0] = S::constant(1.0);
    }
    fn transition<S: Scalar>(&self, _theta: &[S], _seq: &ObsSequence, _step: usize, out: &mut [S]) {
        out[0] = S::constant(1.0);
    }
    fn emission<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]) {
        out[0] = if seq.code(pos) == 1 { theta[0] } else { S::constant(1.0) - theta[0] };
    }
    fn m_step(&self, seq: &ObsSequence, _post: &PosteriorSet, _theta: &[f64], _bounds: &Bounds) -> Result<Vec<f64>, HmmError> {
        let codes = seq.discrete_codes().unwrap();
        Ok(vec![codes.iter().filter(|&&c| c == 1).count() as f64 / codes.len() as f64])
    }
    fn sample_start(&self, _rng: &mut dyn RngCore) -> Vec<f64> {
        vec![0.5]
    }
}

/// One hidden state with a Gaussian emission, θ = (μ, σ).
struct Normal;

impl HmmModel for Normal {
    fn name(&self) -> &'static str {
        "normal"
    }
    fn n_states(&self) -> usize {
        1
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["mu", "sigma"]
    }
    fn state_names(&self) -> &'static [&'static str] {
        &["only"]
    }
    fn alphabet(&self) -> Option<&'static [&'static str]> {
        None
    }
    fn bounds(&self, _kind: BoxKind) -> Bounds {
        Bounds::new(vec![-10.0, 0.01], vec![10.0, 10.0]).unwrap()
    }
    fn validate(&self, _seq: &ObsSequence) -> Result<(), HmmError> {
        Ok(())
    }
    fn initial<S: Scalar>(&self, _theta: &[S], out: &mut [S]) {
        out[0] = S::constant(1.0);
    }
    fn transition<S: Scalar>(&self, _theta: &[S], _seq: &ObsSequence, _step: usize, out: &mut [S]) {
        out[0] = S::constant(1.0);
    }
    fn emission<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]) {
        out[0] = S::gaussian_pdf(seq.value(pos), theta[0], theta[1]);
    }
    fn m_step(&self, _seq: &ObsSequence, _post: &PosteriorSet, theta: &[f64], _bounds: &Bounds) -> Result<Vec<f64>, HmmError> {
        Ok(theta.to_vec())
    }
    fn sample_start(&self, _rng: &mut dyn RngCore) -> Vec<f64> {
        vec![0.0, 1.0]
    }
}

fn umbrella_days() -> ObsSequence {
    let codes = [1, 1, 0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 1, 1, 1, 1, 0, 0, 0, 1, 0, 0, 1, 1, 0, 0];
    ObsSequence::discrete(codes.to_vec()).unwrap()
}

#[test]
fn stop_rule_examples() {
    let tol = StopCriterion::DEFAULT_RELTOL;
    assert!(should_stop(-100.0, -100.0, tol));
    assert!(!should_stop(-100.0, -99.0, tol));
    assert!(should_stop(-100.0, -100.0 + 1e-7, tol));
    assert!(!should_stop(f64::NEG_INFINITY, -3.0, tol));
    assert!(StopCriterion::new(0.0).is_err());
}

#[test]
fn baum_welch_from_a_fixed_point() {
    let seq = ObsSequence::discrete(vec![1, 0, 1, 1, 0, 1, 1, 1]).unwrap();
    let rec = Optimizer::BaumWelch.run(&Coin, &seq, &[0.75], &OptimizerConfig::default()).unwrap();
    assert!(rec.converged);
    // the first iteration establishes ll, the second confirms it did not move
    assert_eq!(rec.iterations, 2);
    assert!((rec.final_theta[0] - 0.75).abs() < 1e-12);
    assert_eq!((rec.n_forward, rec.n_backward), (2, 2));
}

#[test]
fn qnem_on_a_concave_problem_switches_once() {
    let seq = ObsSequence::discrete(vec![1, 0, 1, 1, 0, 1, 1, 1, 0, 1]).unwrap();
    let rec = Optimizer::Qnem.run(&Coin, &seq, &[0.2], &OptimizerConfig::default()).unwrap();
    assert!(rec.converged, "{rec:?}");
    assert_eq!(rec.mode_trace[0], Mode::Em);
    assert!(rec.mode_trace.len() >= 2);
    assert!(rec.mode_trace[1..].iter().all(|&m| m == Mode::Qn), "{:?}", rec.mode_trace);
    assert!((rec.final_theta[0] - 0.7).abs() < 1e-6);
}

#[test]
fn qn_box_recovers_gaussian_mle() {
    let xs = vec![1.2, 0.4, 2.2, 1.9, 0.7, 1.5, 2.8, 1.1];
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = crate::math::sqrt(xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n);
    let seq = ObsSequence::continuous(xs).unwrap();
    let cfg = OptimizerConfig { reltol: 1e-14, ..OptimizerConfig::default() };
    let rec = Optimizer::QnBox.run(&Normal, &seq, &[0.0, 2.0], &cfg).unwrap();
    assert!(rec.converged, "{rec:?}");
    assert!((rec.final_theta[0] - mean).abs() < 1e-6);
    assert!((rec.final_theta[1] - sd).abs() < 1e-6);
    assert_eq!(rec.n_backward, 0);
    assert!(rec.n_forward >= rec.iterations);
}

#[test]
fn every_iterate_stays_in_the_box() {
    let seq = umbrella_days();
    for opt in Optimizer::ALL {
        let rec = opt.run(&Umbrella, &seq, &[0.9, 0.05], &OptimizerConfig::default()).unwrap();
        assert!(Umbrella.bounds(BoxKind::Natural).contains(&rec.final_theta), "{opt:?}");
    }
}

#[test]
fn baum_welch_counts_match_iterations() {
    let seq = umbrella_days();
    let rec = Optimizer::BaumWelch.run(&Umbrella, &seq, &[0.4, 0.3], &OptimizerConfig::default()).unwrap();
    assert_eq!(rec.n_forward, rec.iterations);
    assert_eq!(rec.n_backward, rec.iterations);
    assert!(rec.loglik_trace.windows(2).all(|w| w[1] >= w[0] - 1e-10 * w[0].abs()));
}

#[test]
fn squarem_cycles_never_end_below_their_em_steps() {
    let seq = umbrella_days();
    let cfg = OptimizerConfig::default();
    let rec = Optimizer::Squarem.run(&Umbrella, &seq, &[0.6, 0.4], &cfg).unwrap();
    assert!(rec.converged);
    assert!(rec.n_backward <= rec.n_forward && rec.n_forward <= 2 * rec.n_backward + 2, "{rec:?}");
    let bw = Optimizer::BaumWelch.run(&Umbrella, &seq, &[0.6, 0.4], &cfg).unwrap();
    assert!(rec.final_loglik >= bw.final_loglik - 1e-6);
}

#[test]
fn squarem_at_a_fixed_point_keeps_the_em_result() {
    // r = v = 0, so there is nothing to extrapolate
    let seq = ObsSequence::discrete(vec![1, 0, 1, 1]).unwrap();
    let rec = Optimizer::Squarem.run(&Coin, &seq, &[0.75], &OptimizerConfig::default()).unwrap();
    assert!(rec.converged);
    assert_eq!(rec.final_theta, vec![0.75]);
    assert_eq!(rec.iterations, 1);
}

#[test]
fn impossible_start_is_reported_not_raised() {
    // c = 0 forbids long eruptions in S, d = 0 forbids them in L, e = 0 in Sl
    let seq = ObsSequence::discrete(vec![1, 1, 0]).unwrap();
    for opt in Optimizer::ALL {
        let rec = opt.run(&GeyserDisc, &seq, &[0.5, 0.5, 0.0, 0.0, 0.0], &OptimizerConfig::default()).unwrap();
        assert_eq!(rec.stop_reason, StopReason::NonFiniteLoglik, "{opt:?}");
        assert!(!rec.converged);
    }
}

#[test]
fn invalid_input_is_an_error() {
    let seq = umbrella_days();
    let cfg = OptimizerConfig::default();
    assert!(Optimizer::Qnem.run(&Umbrella, &seq, &[0.5], &cfg).is_err());
    assert!(Optimizer::Qnem.run(&Umbrella, &seq, &[1.5, 0.2], &cfg).is_err());
    let cont = ObsSequence::continuous(vec![1.0, 2.0]).unwrap();
    assert!(Optimizer::Qnem.run(&Umbrella, &cont, &[0.5, 0.2], &cfg).is_err());
}

#[test]
fn optimizer_names_round_trip() {
    for o in Optimizer::ALL {
        assert_eq!(o.name().parse::<Optimizer>().unwrap(), o);
    }
    assert!("lbfgs".parse::<Optimizer>().is_err());
}
