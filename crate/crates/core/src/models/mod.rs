//! The concrete models and a name-keyed registry.

mod geyser;
mod hbd;
mod umbrella;

use alloc::string::ToString;
use alloc::vec::Vec;
use core::str::FromStr;

use rand::{Rng, RngCore};

pub use geyser::{geyser_stationary, GeyserCont, GeyserDisc};
pub use hbd::{hbd_emission, Hbd, DEFAULT_EPSILON, HET, HOM_ALT, HOM_REF};
pub use umbrella::Umbrella;

use crate::autodiff::Scalar;
use crate::backward::PosteriorSet;
use crate::error::HmmError;
use crate::model::{BoxKind, HmmModel};
use crate::params::Bounds;
use crate::sequence::{ObsSequence, Observations, MISSING};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Umbrella,
    GeyserDisc,
    GeyserCont,
    Hbd,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Umbrella, ModelKind::GeyserDisc, ModelKind::GeyserCont, ModelKind::Hbd];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Umbrella => "umbrella",
            ModelKind::GeyserDisc => "geyser-disc",
            ModelKind::GeyserCont => "geyser-cont",
            ModelKind::Hbd => "hbd",
        }
    }

    pub fn build(self) -> AnyModel {
        match self {
            ModelKind::Umbrella => AnyModel::Umbrella(Umbrella),
            ModelKind::GeyserDisc => AnyModel::GeyserDisc(GeyserDisc),
            ModelKind::GeyserCont => AnyModel::GeyserCont(GeyserCont),
            ModelKind::Hbd => AnyModel::Hbd(Hbd::default()),
        }
    }
}

impl FromStr for ModelKind {
    type Err = HmmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HmmError::UnknownModel(s.to_string()))
    }
}

/// Any registered model; dispatches every [`HmmModel`] method.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyModel {
    Umbrella(Umbrella),
    GeyserDisc(GeyserDisc),
    GeyserCont(GeyserCont),
    Hbd(Hbd),
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            AnyModel::Umbrella($m) => $e,
            AnyModel::GeyserDisc($m) => $e,
            AnyModel::GeyserCont($m) => $e,
            AnyModel::Hbd($m) => $e,
        }
    };
}

impl AnyModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::Umbrella(_) => ModelKind::Umbrella,
            AnyModel::GeyserDisc(_) => ModelKind::GeyserDisc,
            AnyModel::GeyserCont(_) => ModelKind::GeyserCont,
            AnyModel::Hbd(_) => ModelKind::Hbd,
        }
    }
}

impl HmmModel for AnyModel {
    fn name(&self) -> &'static str {
        dispatch!(self, m => m.name())
    }
    fn n_states(&self) -> usize {
        dispatch!(self, m => m.n_states())
    }
    fn param_dim(&self) -> usize {
        dispatch!(self, m => m.param_dim())
    }
    fn param_names(&self) -> &'static [&'static str] {
        dispatch!(self, m => m.param_names())
    }
    fn state_names(&self) -> &'static [&'static str] {
        dispatch!(self, m => m.state_names())
    }
    fn alphabet(&self) -> Option<&'static [&'static str]> {
        dispatch!(self, m => m.alphabet())
    }
    fn bounds(&self, kind: BoxKind) -> Bounds {
        dispatch!(self, m => m.bounds(kind))
    }
    fn gradient_box(&self) -> BoxKind {
        dispatch!(self, m => m.gradient_box())
    }
    fn validate(&self, seq: &ObsSequence) -> Result<(), HmmError> {
        dispatch!(self, m => m.validate(seq))
    }
    fn is_homogeneous(&self) -> bool {
        dispatch!(self, m => m.is_homogeneous())
    }
    fn initial<S: Scalar>(&self, theta: &[S], out: &mut [S]) {
        dispatch!(self, m => m.initial(theta, out))
    }
    fn transition<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, step: usize, out: &mut [S]) {
        dispatch!(self, m => m.transition(theta, seq, step, out))
    }
    fn emission<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]) {
        dispatch!(self, m => m.emission(theta, seq, pos, out))
    }
    fn m_step(&self, seq: &ObsSequence, post: &PosteriorSet, theta: &[f64], bounds: &Bounds) -> Result<Vec<f64>, HmmError> {
        dispatch!(self, m => m.m_step(seq, post, theta, bounds))
    }
    fn sample_start(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        dispatch!(self, m => m.sample_start(rng))
    }
    fn canonicalize(&self, theta: &mut [f64]) {
        dispatch!(self, m => m.canonicalize(theta))
    }
}

pub(crate) fn uniform(rng: &mut dyn RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.gen::<f64>()
}

pub(crate) fn validate_discrete(seq: &ObsSequence, alphabet_len: usize) -> Result<(), HmmError> {
    match seq.observations() {
        Observations::Discrete(codes) => {
            if let Some(&c) = codes.iter().find(|&&c| c != MISSING && usize::from(c) >= alphabet_len) {
                return Err(HmmError::InvalidSequence(alloc::format!("observation code {c} outside the alphabet")));
            }
            Ok(())
        }
        Observations::Continuous(_) => Err(HmmError::ObservationKind("expected discrete observations")),
    }
}

/// Expected transition counts `Σ_k δ_k(s, t)`, row-major.
pub(crate) fn transition_counts(post: &PosteriorSet) -> Vec<f64> {
    let n = post.n_states();
    let mut counts = alloc::vec![0.0; n * n];
    for k in 0..post.len().saturating_sub(1) {
        for (c, d) in counts.iter_mut().zip(post.delta(k)) {
            *c += d;
        }
    }
    counts
}

/// Posterior-weighted frequency of `code` in each state over non-missing
/// positions; `None` for states with zero total weight.
pub(crate) fn emission_frequency(seq: &ObsSequence, post: &PosteriorSet, code: u8) -> Vec<Option<f64>> {
    let n = post.n_states();
    let mut hit = alloc::vec![0.0; n];
    let mut total = alloc::vec![0.0; n];
    for i in 0..seq.len() {
        if seq.is_missing(i) {
            continue;
        }
        let x = seq.code(i);
        for (s, &w) in post.phi(i).iter().enumerate() {
            total[s] += w;
            if x == code {
                hit[s] += w;
            }
        }
    }
    hit.iter().zip(&total).map(|(&h, &t)| if t > 0.0 { Some(h / t) } else { None }).collect()
}

pub(crate) fn clamp_to(bounds: &Bounds, j: usize, v: f64) -> f64 {
    v.clamp(bounds.lower()[j], bounds.upper()[j])
}
