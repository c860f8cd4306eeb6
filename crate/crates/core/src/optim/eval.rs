use alloc::vec::Vec;

use crate::backward::{backward, PosteriorSet};
use crate::error::HmmError;
use crate::forward::{forward_conditional, loglik_with_gradient, ForwardResult, GradientResult};
use crate::model::{BoxKind, HmmModel};
use crate::params::Bounds;
use crate::sequence::ObsSequence;

/// Wraps a model and a sequence and counts every pass it runs. An
/// impossible sequence under θ comes back as `None` rather than an error.
pub(crate) struct Evaluator<'a, M> {
    pub model: &'a M,
    pub seq: &'a ObsSequence,
    pub bounds: Bounds,
    pub n_forward: usize,
    pub n_backward: usize,
}

fn numeric<T>(r: Result<T, HmmError>) -> Result<Option<T>, HmmError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(HmmError::NumericalUnderflow { .. } | HmmError::DegeneratePosterior { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

impl<'a, M: HmmModel> Evaluator<'a, M> {
    pub fn new(model: &'a M, seq: &'a ObsSequence, kind: BoxKind) -> Self {
        Evaluator { model, seq, bounds: model.bounds(kind), n_forward: 0, n_backward: 0 }
    }

    pub fn forward(&mut self, theta: &[f64]) -> Result<Option<ForwardResult>, HmmError> {
        self.n_forward += 1;
        numeric(forward_conditional(self.model, theta, self.seq))
    }

    pub fn gradient(&mut self, theta: &[f64]) -> Result<Option<GradientResult>, HmmError> {
        self.n_forward += 1;
        let r = numeric(loglik_with_gradient(self.model, theta, self.seq))?;
        Ok(r.filter(|g| g.loglik.is_finite() && g.gradient.iter().all(|x| x.is_finite())))
    }

    pub fn backward(&mut self, theta: &[f64], fw: &ForwardResult) -> Result<Option<PosteriorSet>, HmmError> {
        self.n_backward += 1;
        numeric(backward(self.model, theta, self.seq, fw))
    }

    /// M-step with a feasibility check on its output.
    pub fn m_step(&self, post: &PosteriorSet, theta: &[f64]) -> Result<Vec<f64>, HmmError> {
        let next = self.model.m_step(self.seq, post, theta, &self.bounds)?;
        if next.len() != theta.len() || !self.bounds.contains(&next) {
            return Err(HmmError::Model(alloc::format!(
                "{} m-step left the parameter box: {next:?}",
                self.model.name()
            )));
        }
        Ok(next)
    }

    /// One EM update from θ with a forward pass already computed at θ.
    /// `None` when the backward pass is degenerate.
    pub fn em_step(&mut self, theta: &[f64], fw: &ForwardResult) -> Result<Option<Vec<f64>>, HmmError> {
        match self.backward(theta, fw)? {
            Some(post) => self.m_step(&post, theta).map(Some),
            None => Ok(None),
        }
    }
}
