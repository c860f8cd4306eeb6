use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::{clamp_to, transition_counts, uniform, validate_discrete};
use crate::autodiff::Scalar;
use crate::backward::PosteriorSet;
use crate::error::HmmError;
use crate::model::{BoxKind, HmmModel};
use crate::params::Bounds;
use crate::sequence::ObsSequence;

/// Two weather states (dry, rainy) observed through an umbrella.
///
/// θ = `(a, b)`: `a` is the probability the weather changes between days,
/// `b` the probability the umbrella disagrees with the weather.
///
/// | transition | D     | R     |
/// |------------|-------|-------|
/// | D          | 1 − a | a     |
/// | R          | a     | 1 − a |
///
/// | emission | D     | R     |
/// |----------|-------|-------|
/// | N        | 1 − b | b     |
/// | U        | b     | 1 − b |
///
/// Initial distribution is uniform. Swapping `b ↔ 1 − b` relabels the
/// states and leaves the likelihood unchanged.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Umbrella;

impl Umbrella {
    pub const DRY: usize = 0;
    pub const RAINY: usize = 1;
    pub const NO_UMBRELLA: u8 = 0;
    pub const UMBRELLA: u8 = 1;
}

impl HmmModel for Umbrella {
    fn name(&self) -> &'static str {
        "umbrella"
    }
    fn n_states(&self) -> usize {
        2
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a", "b"]
    }
    fn state_names(&self) -> &'static [&'static str] {
        &["D", "R"]
    }
    fn alphabet(&self) -> Option<&'static [&'static str]> {
        Some(&["N", "U"])
    }

    fn bounds(&self, kind: BoxKind) -> Bounds {
        let (lo, hi) = match kind {
            BoxKind::Natural => (0.0, 1.0),
            BoxKind::Narrow => (0.01, 0.99),
        };
        Bounds::new(vec![lo; 2], vec![hi; 2]).expect("static bounds")
    }

    fn validate(&self, seq: &ObsSequence) -> Result<(), HmmError> {
        validate_discrete(seq, 2)
    }

    fn initial<S: Scalar>(&self, _theta: &[S], out: &mut [S]) {
        out[0] = S::constant(0.5);
        out[1] = S::constant(0.5);
    }

    fn transition<S: Scalar>(&self, theta: &[S], _seq: &ObsSequence, _step: usize, out: &mut [S]) {
        let a = theta[0];
        let stay = S::constant(1.0) - a;
        out.copy_from_slice(&[stay, a, a, stay]);
    }

    fn emission<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]) {
        let b = theta[1];
        let agree = S::constant(1.0) - b;
        if seq.code(pos) == Self::NO_UMBRELLA {
            out[Self::DRY] = agree;
            out[Self::RAINY] = b;
        } else {
            out[Self::DRY] = b;
            out[Self::RAINY] = agree;
        }
    }

    /// `a` = expected number of weather changes / (L − 1);
    /// `b` = expected number of mismatching days / (number observed).
    fn m_step(&self, seq: &ObsSequence, post: &PosteriorSet, theta: &[f64], bounds: &Bounds) -> Result<Vec<f64>, HmmError> {
        let counts = transition_counts(post);
        let total: f64 = counts.iter().sum();
        let a = if total > 0.0 { (counts[1] + counts[2]) / total } else { theta[0] };
        // P(U | D) is the mismatch rate in the dry state, P(N | R) in the rainy one;
        // pool them by posterior weight.
        let mut mismatch = 0.0;
        let mut observed = 0.0;
        for i in 0..seq.len() {
            if seq.is_missing(i) {
                continue;
            }
            let phi = post.phi(i);
            mismatch += if seq.code(i) == Self::UMBRELLA { phi[Self::DRY] } else { phi[Self::RAINY] };
            observed += phi[0] + phi[1];
        }
        let b = if observed > 0.0 { mismatch / observed } else { theta[1] };
        Ok(vec![clamp_to(bounds, 0, a), clamp_to(bounds, 1, b)])
    }

    fn sample_start(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![uniform(rng, 0.01, 0.99), uniform(rng, 0.01, 0.99)]
    }

    fn canonicalize(&self, theta: &mut [f64]) {
        if theta[1] > 0.5 {
            theta[1] = 1.0 - theta[1];
        }
    }
}
