//! Forward recursions.
//!
//! [`forward_conditional`] propagates the forecast probabilities
//! `α_i(s) = P(S_i = s | X_1..X_{i-1})` and filtering probabilities
//! `β_i(s) = P(S_i = s | X_1..X_i)` in linear scale and accumulates
//! `γ_i = log P(X_1..X_i)`; the log-likelihood is `γ_L`.
//!
//! [`forward_joint_log`] runs the joint-probability recursion
//! `a_i(s) = P(S_i = s, X_1..X_{i-1})`, `b_i(s) = P(S_i = s, X_1..X_i)`
//! entirely in log space and returns `log Σ_s b_L(s)`. It shares no code
//! with the conditional pass and serves as a cross-check.

use alloc::vec;
use alloc::vec::Vec;

use crate::autodiff::{seed, Dual, Scalar, MAX_PARAMS};
use crate::error::HmmError;
use crate::math::{log, log_sum_exp};
use crate::model::HmmModel;
use crate::sequence::ObsSequence;

/// Forecast (α) and filtering (β) probabilities, stored row-major `L × n`,
/// with the partial log-likelihoods γ.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardResult {
    n_states: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    pub loglik: f64,
}

impl ForwardResult {
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn alpha(&self, i: usize) -> &[f64] {
        &self.alpha[i * self.n_states..(i + 1) * self.n_states]
    }

    pub fn beta(&self, i: usize) -> &[f64] {
        &self.beta[i * self.n_states..(i + 1) * self.n_states]
    }

    /// `γ_i` for every position.
    pub fn gamma_trace(&self) -> &[f64] {
        &self.gamma
    }
}

fn check_dims<M: HmmModel>(model: &M, theta_len: usize) -> Result<(), HmmError> {
    if theta_len != model.param_dim() {
        return Err(HmmError::DimensionMismatch { expected: model.param_dim(), actual: theta_len });
    }
    Ok(())
}

fn forward_generic<S: Scalar, M: HmmModel>(
    model: &M,
    theta: &[S],
    seq: &ObsSequence,
) -> Result<(ForwardResult, S), HmmError> {
    let n = model.n_states();
    let len = seq.len();
    let mut alpha_out = Vec::with_capacity(len * n);
    let mut beta_out = Vec::with_capacity(len * n);
    let mut gamma_out = Vec::with_capacity(len);

    let zero = S::constant(0.0);
    let mut alpha = vec![zero; n];
    let mut beta = vec![zero; n];
    let mut weights = vec![zero; n];
    let mut trans = vec![zero; n * n];
    let mut gamma = zero;

    model.initial(theta, &mut alpha);
    for i in 0..len {
        if i > 0 {
            if i == 1 || !model.is_homogeneous() {
                model.transition(theta, seq, i, &mut trans);
            }
            for s in 0..n {
                let mut acc = zero;
                for t in 0..n {
                    acc = acc + trans[t * n + s] * beta[t];
                }
                alpha[s] = acc;
            }
        }
        if seq.is_missing(i) {
            // Weight 1 in every state: β_i = α_i and γ is unchanged.
            beta.copy_from_slice(&alpha);
        } else {
            model.emission(theta, seq, i, &mut weights);
            let mut total = zero;
            for s in 0..n {
                weights[s] = weights[s] * alpha[s];
                total = total + weights[s];
            }
            let tv = total.value();
            if !(tv > 0.0) || !tv.is_finite() {
                return Err(HmmError::NumericalUnderflow { position: i });
            }
            for s in 0..n {
                beta[s] = weights[s] / total;
            }
            gamma = if i == 0 { total.ln() } else { gamma + total.ln() };
        }
        alpha_out.extend(alpha.iter().map(Scalar::value));
        beta_out.extend(beta.iter().map(Scalar::value));
        gamma_out.push(gamma.value());
    }
    let result = ForwardResult {
        n_states: n,
        alpha: alpha_out,
        beta: beta_out,
        gamma: gamma_out,
        loglik: gamma.value(),
    };
    Ok((result, gamma))
}

/// Conditional-probability forward pass.
///
/// Fails with [`HmmError::NumericalUnderflow`] when an observation has
/// probability zero under θ; callers treat that as a log-likelihood of
/// `-inf`.
pub fn forward_conditional<M: HmmModel>(
    model: &M,
    theta: &[f64],
    seq: &ObsSequence,
) -> Result<ForwardResult, HmmError> {
    check_dims(model, theta.len())?;
    model.validate(seq)?;
    forward_generic(model, theta, seq).map(|(r, _)| r)
}

/// Log-likelihood, its gradient with respect to θ, and the forward
/// quantities (which the backward pass can reuse).
#[derive(Clone, Debug)]
pub struct GradientResult {
    pub loglik: f64,
    pub gradient: Vec<f64>,
    pub forward: ForwardResult,
}

/// Forward pass over dual numbers. The value part is bit-identical to
/// [`forward_conditional`].
pub fn loglik_with_gradient<M: HmmModel>(
    model: &M,
    theta: &[f64],
    seq: &ObsSequence,
) -> Result<GradientResult, HmmError> {
    check_dims(model, theta.len())?;
    if theta.len() > MAX_PARAMS {
        return Err(HmmError::DimensionMismatch { expected: MAX_PARAMS, actual: theta.len() });
    }
    model.validate(seq)?;
    let duals: Vec<Dual> = seed(theta);
    let (forward, gamma) = forward_generic(model, &duals, seq)?;
    Ok(GradientResult {
        loglik: gamma.value,
        gradient: gamma.partials[..theta.len()].to_vec(),
        forward,
    })
}

/// Joint-probability forward pass in log space. Returns `-inf` for a
/// sequence of probability zero.
pub fn forward_joint_log<M: HmmModel>(model: &M, theta: &[f64], seq: &ObsSequence) -> Result<f64, HmmError> {
    check_dims(model, theta.len())?;
    model.validate(seq)?;
    let n = model.n_states();
    let mut pi = vec![0.0; n];
    model.initial(theta, &mut pi);
    let mut log_a: Vec<f64> = pi.iter().map(|&p| log(p)).collect();
    let mut log_b = vec![0.0; n];
    let mut trans = vec![0.0; n * n];
    let mut em = vec![0.0; n];
    let mut terms = vec![0.0; n];
    for i in 0..seq.len() {
        if i > 0 {
            model.transition(theta, seq, i, &mut trans);
            for s in 0..n {
                for t in 0..n {
                    terms[t] = log_b[t] + log(trans[t * n + s]);
                }
                log_a[s] = log_sum_exp(&terms);
            }
        }
        if seq.is_missing(i) {
            log_b.copy_from_slice(&log_a);
        } else {
            model.emission(theta, seq, i, &mut em);
            for s in 0..n {
                log_b[s] = log_a[s] + log(em[s]);
            }
        }
    }
    Ok(log_sum_exp(&log_b))
}
