//! Backward smoothing pass.
//!
//! Starting from `φ_L = β_L`, for `i = L, …, 2`:
//!
//! ```text
//! δ_i(s, t)   = T(s, t) · β_{i-1}(s) · φ_i(t) / α_i(t)
//! φ_{i-1}(s)  = Σ_t δ_i(s, t)
//! ```
//!
//! `δ_i` couples `(S_{i-1}, S_i)`. With zero-based storage,
//! [`PosteriorSet::delta`]`(k)` holds the joint posterior of
//! `(S_k, S_{k+1})`, i.e. the transition into position `k + 1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::HmmError;
use crate::forward::ForwardResult;
use crate::model::HmmModel;
use crate::sequence::ObsSequence;

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSet {
    n_states: usize,
    delta: Vec<f64>,
    phi: Vec<f64>,
}

impl PosteriorSet {
    /// Builds a posterior set from raw row-major arrays (`(L-1)·n·n` and
    /// `L·n`). Mostly useful for tests of M-steps.
    pub fn from_parts(n_states: usize, delta: Vec<f64>, phi: Vec<f64>) -> Result<Self, HmmError> {
        let len = phi.len() / n_states;
        if phi.len() != len * n_states || len == 0 {
            return Err(HmmError::DimensionMismatch { expected: n_states, actual: phi.len() });
        }
        if delta.len() != (len - 1) * n_states * n_states {
            return Err(HmmError::DimensionMismatch { expected: (len - 1) * n_states * n_states, actual: delta.len() });
        }
        Ok(Self { n_states, delta, phi })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn len(&self) -> usize {
        self.phi.len() / self.n_states
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// Marginal posterior `P(S_i = · | X)` at zero-based position `i`.
    pub fn phi(&self, i: usize) -> &[f64] {
        &self.phi[i * self.n_states..(i + 1) * self.n_states]
    }

    /// Row-major `n × n` joint posterior of `(S_k, S_{k+1})`.
    pub fn delta(&self, k: usize) -> &[f64] {
        let nn = self.n_states * self.n_states;
        &self.delta[k * nn..(k + 1) * nn]
    }
}

/// Smoothing pass over a forward result computed with the same
/// `(model, theta, seq)`.
pub fn backward<M: HmmModel>(
    model: &M,
    theta: &[f64],
    seq: &ObsSequence,
    fw: &ForwardResult,
) -> Result<PosteriorSet, HmmError> {
    let n = model.n_states();
    let len = seq.len();
    if fw.len() != len || fw.n_states() != n {
        return Err(HmmError::DimensionMismatch { expected: len, actual: fw.len() });
    }
    let nn = n * n;
    let mut phi = vec![0.0; len * n];
    let mut delta = vec![0.0; (len - 1) * nn];
    phi[(len - 1) * n..].copy_from_slice(fw.beta(len - 1));

    let mut trans = vec![0.0; nn];
    for i in (1..len).rev() {
        if i == len - 1 || !model.is_homogeneous() {
            model.transition(theta, seq, i, &mut trans);
        }
        let alpha = fw.alpha(i);
        let beta_prev = fw.beta(i - 1);
        let (head, tail) = phi.split_at_mut(i * n);
        let phi_i = &tail[..n];
        let phi_prev = &mut head[(i - 1) * n..];
        let d = &mut delta[(i - 1) * nn..i * nn];
        for s in 0..n {
            let mut acc = 0.0;
            for t in 0..n {
                let num = trans[s * n + t] * beta_prev[s] * phi_i[t];
                let v = if alpha[t] > 0.0 {
                    num / alpha[t]
                } else if num > 0.0 {
                    return Err(HmmError::DegeneratePosterior { position: i });
                } else {
                    0.0
                };
                d[s * n + t] = v;
                acc += v;
            }
            phi_prev[s] = acc;
        }
    }
    Ok(PosteriorSet { n_states: n, delta, phi })
}
