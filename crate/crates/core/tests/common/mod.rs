#![allow(dead_code)]

pub mod oracle;

use hmmfit_core::backward::PosteriorSet;
use hmmfit_core::sim::{simulate_hbd, HbdSimConfig};
use hmmfit_core::{
    AnyModel, Bounds, BoxKind, GeyserCont, GeyserDisc, Hbd, HmmError, HmmModel, ModelKind, ObsSequence,
    Observations, Scalar, Umbrella, MISSING,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Arbitrary discrete HMM whose θ is the flattened `(π, T, E)` tables.
/// Only used for likelihood checks; it has no M-step.
#[derive(Clone, Debug)]
pub struct Tabular {
    pub n: usize,
    pub k: usize,
}

impl Tabular {
    pub fn random_theta(&self, rng: &mut impl Rng) -> Vec<f64> {
        let mut theta = random_simplex(rng, self.n);
        for _ in 0..self.n {
            theta.extend(random_simplex(rng, self.n));
        }
        for _ in 0..self.n {
            theta.extend(random_simplex(rng, self.k));
        }
        theta
    }
}

fn random_simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

impl HmmModel for Tabular {
    fn name(&self) -> &'static str {
        "tabular"
    }
    fn n_states(&self) -> usize {
        self.n
    }
    fn param_dim(&self) -> usize {
        self.n + self.n * self.n + self.n * self.k
    }
    fn param_names(&self) -> &'static [&'static str] {
        &[]
    }
    fn state_names(&self) -> &'static [&'static str] {
        &[]
    }
    fn alphabet(&self) -> Option<&'static [&'static str]> {
        None
    }
    fn bounds(&self, _kind: BoxKind) -> Bounds {
        let d = self.param_dim();
        Bounds::new(vec![0.0; d], vec![1.0; d]).unwrap()
    }
    fn validate(&self, seq: &ObsSequence) -> Result<(), HmmError> {
        match seq.observations() {
            Observations::Discrete(c) if c.iter().all(|&x| x == MISSING || usize::from(x) < self.k) => Ok(()),
            _ => Err(HmmError::InvalidSequence("tabular".into())),
        }
    }
    fn initial<S: Scalar>(&self, theta: &[S], out: &mut [S]) {
        out.copy_from_slice(&theta[..self.n]);
    }
    fn transition<S: Scalar>(&self, theta: &[S], _seq: &ObsSequence, _step: usize, out: &mut [S]) {
        out.copy_from_slice(&theta[self.n..self.n + self.n * self.n]);
    }
    fn emission<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]) {
        let base = self.n + self.n * self.n;
        let c = usize::from(seq.code(pos));
        for s in 0..self.n {
            out[s] = theta[base + s * self.k + c];
        }
    }
    fn m_step(&self, _: &ObsSequence, _: &PosteriorSet, theta: &[f64], _: &Bounds) -> Result<Vec<f64>, HmmError> {
        Ok(theta.to_vec())
    }
    fn sample_start(&self, _rng: &mut dyn RngCore) -> Vec<f64> {
        unimplemented!()
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_codes(rng: &mut impl Rng, len: usize, k: u8, p_missing: f64) -> Vec<u8> {
    (0..len).map(|_| if rng.gen_bool(p_missing) { MISSING } else { rng.gen_range(0..k) }).collect()
}

/// A random sequence the model accepts: codes or geyser-like durations
/// with some missing entries, and random marker positions and allele
/// frequencies for HBD.
pub fn random_sequence(kind: ModelKind, rng: &mut impl Rng, len: usize) -> ObsSequence {
    match kind {
        ModelKind::Umbrella | ModelKind::GeyserDisc => ObsSequence::discrete(random_codes(rng, len, 2, 0.15)).unwrap(),
        ModelKind::GeyserCont => ObsSequence::continuous(
            (0..len).map(|_| if rng.gen_bool(0.15) { f64::NAN } else { rng.gen_range(1.5..5.2) }).collect(),
        )
        .unwrap(),
        ModelKind::Hbd => {
            let mut pos = 0.0;
            let positions = (0..len)
                .map(|_| {
                    pos += rng.gen_range(0.05..3.0);
                    pos
                })
                .collect();
            let freq = (0..len).map(|_| rng.gen_range(0.1..0.9)).collect();
            ObsSequence::new(Observations::Discrete(random_codes(rng, len, 3, 0.15)), Some(positions), Some(freq))
                .unwrap()
        }
    }
}

/// A random θ away from the boundary, where every likelihood is smooth.
pub fn interior_theta(kind: ModelKind, rng: &mut impl Rng) -> Vec<f64> {
    let mut p = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    match kind {
        ModelKind::Umbrella => vec![p(0.05, 0.95), p(0.05, 0.95)],
        ModelKind::GeyserDisc => (0..5).map(|_| p(0.05, 0.95)).collect(),
        ModelKind::GeyserCont => {
            vec![p(0.05, 0.95), p(0.05, 0.95), p(1.5, 5.0), p(1.5, 5.0), p(1.5, 5.0), p(0.2, 1.5), p(0.2, 1.5), p(0.2, 1.5)]
        }
        ModelKind::Hbd => vec![p(0.05, 0.95), p(0.01, 1.0)],
    }
}

/// Sequences of a few hundred observations for gradient and EM checks.
pub fn realistic_sequence(kind: ModelKind, seed: u64) -> ObsSequence {
    let mut r = rng(seed);
    match kind {
        ModelKind::Umbrella => {
            hmmfit_core::sim::simulate_discrete(&Umbrella, &[0.3, 0.2], 120, seed).unwrap().sequence
        }
        ModelKind::GeyserDisc => {
            hmmfit_core::sim::simulate_discrete(&GeyserDisc, &[0.8, 0.6, 0.1, 0.9, 0.9], 200, seed).unwrap().sequence
        }
        ModelKind::GeyserCont => random_sequence(ModelKind::GeyserCont, &mut r, 200),
        ModelKind::Hbd => {
            simulate_hbd(&HbdSimConfig { f: 0.2, a: 0.1, length: 400, seed, ..Default::default() }).unwrap().sequence
        }
    }
}

pub fn models() -> Vec<AnyModel> {
    ModelKind::ALL.iter().map(|k| k.build()).collect()
}

pub fn geyser_cont() -> GeyserCont {
    GeyserCont
}

pub fn hbd() -> Hbd {
    Hbd::default()
}
