//! The model abstraction every optimizer works against.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::autodiff::Scalar;
use crate::backward::PosteriorSet;
use crate::error::HmmError;
use crate::math::xlogy;
use crate::params::Bounds;
use crate::sequence::ObsSequence;

/// Which parameter box an optimizer runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoxKind {
    /// The model's natural space, e.g. `[0, 1]` for probabilities.
    Natural,
    /// Probabilities narrowed to `[0.01, 0.99]` and rates/sds floored at
    /// `0.01`, the box classically required by off-the-shelf L-BFGS-B.
    Narrow,
}

impl BoxKind {
    pub fn name(self) -> &'static str {
        match self {
            BoxKind::Natural => "natural",
            BoxKind::Narrow => "narrow",
        }
    }
}

/// A parametric HMM: initial distribution, transition matrix and emission
/// weights as functions of θ, plus its M-step.
///
/// The three probability functions are generic over [`Scalar`] so that the
/// same definition yields plain values and forward-mode gradients.
pub trait HmmModel: Sync {
    fn name(&self) -> &'static str;
    fn n_states(&self) -> usize;
    fn param_dim(&self) -> usize;
    fn param_names(&self) -> &'static [&'static str];
    fn state_names(&self) -> &'static [&'static str];
    /// Observation alphabet for discrete models, `None` for continuous ones.
    fn alphabet(&self) -> Option<&'static [&'static str]>;
    fn bounds(&self, kind: BoxKind) -> Bounds;

    /// Box the gradient-based optimizers use when none is configured.
    fn gradient_box(&self) -> BoxKind {
        BoxKind::Natural
    }

    /// Checks the sequence has the observation kind, codes and side data
    /// (positions, allele frequencies) the model needs.
    fn validate(&self, seq: &ObsSequence) -> Result<(), HmmError>;

    /// True when the transition matrix does not depend on the step index.
    fn is_homogeneous(&self) -> bool {
        true
    }

    fn initial<S: Scalar>(&self, theta: &[S], out: &mut [S]);

    /// Row-major `n × n` matrix for the transition from position
    /// `step - 1` to `step` (`1 ≤ step < L`).
    fn transition<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, step: usize, out: &mut [S]);

    /// Emission weight of the (non-missing) observation at `pos` for every
    /// state: a probability mass for discrete models, a density otherwise.
    fn emission<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]);

    /// Re-estimates θ from the posteriors computed at `theta`. The result
    /// must lie in `bounds` and must not decrease the expected
    /// complete-data log-likelihood relative to `theta`.
    fn m_step(
        &self,
        seq: &ObsSequence,
        post: &PosteriorSet,
        theta: &[f64],
        bounds: &Bounds,
    ) -> Result<Vec<f64>, HmmError>;

    /// Draws a random starting point for multi-start runs.
    fn sample_start(&self, rng: &mut dyn RngCore) -> Vec<f64>;

    /// Maps θ to a representative of its symmetry class (used when
    /// clustering convergence points). Identity by default.
    fn canonicalize(&self, _theta: &mut [f64]) {}
}

/// Expected complete-data log-likelihood `Q(θ; θ_k)` given posteriors
/// computed at `θ_k`. Terms with zero posterior weight contribute 0.
pub fn expected_complete_loglik<M: HmmModel>(
    model: &M,
    seq: &ObsSequence,
    post: &PosteriorSet,
    theta: &[f64],
) -> f64 {
    let n = model.n_states();
    let mut pi = vec![0.0; n];
    model.initial(theta, &mut pi);
    let mut q: f64 = post.phi(0).iter().zip(&pi).map(|(&w, &p)| xlogy(w, p)).sum();

    let mut trans = vec![0.0; n * n];
    for step in 1..seq.len() {
        if step == 1 || !model.is_homogeneous() {
            model.transition(theta, seq, step, &mut trans);
        }
        q += post.delta(step - 1).iter().zip(&trans).map(|(&w, &t)| xlogy(w, t)).sum::<f64>();
    }

    let mut em = vec![0.0; n];
    for pos in 0..seq.len() {
        if seq.is_missing(pos) {
            continue;
        }
        model.emission(theta, seq, pos, &mut em);
        q += post.phi(pos).iter().zip(&em).map(|(&w, &e)| xlogy(w, e)).sum::<f64>();
    }
    q
}
