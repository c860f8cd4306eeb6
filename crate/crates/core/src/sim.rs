//! Seed-deterministic simulators.
//!
//! All draws come from `ChaCha8Rng::seed_from_u64(seed)`, a counter-based
//! generator whose output is identical across platforms. Uniform variates
//! are `rng.gen::<f64>()`; categorical draws invert the cumulative sum.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::HmmError;
use crate::model::{BoxKind, HmmModel};
use crate::models::{hbd_emission, Hbd};
use crate::sequence::{ObsSequence, Observations};

/// A simulated sequence together with the hidden path that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct Simulated {
    pub sequence: ObsSequence,
    pub hidden: Vec<usize>,
}

fn categorical(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // u landed in rounding slack above the total; take the last positive entry
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn check_theta<M: HmmModel>(model: &M, theta: &[f64]) -> Result<(), HmmError> {
    if theta.len() != model.param_dim() {
        return Err(HmmError::DimensionMismatch { expected: model.param_dim(), actual: theta.len() });
    }
    model.bounds(BoxKind::Natural).check(theta)
}

/// Samples `length` steps from a homogeneous discrete-observation model.
/// Per step the hidden state is drawn first, then the observation.
pub fn simulate_discrete<M: HmmModel>(model: &M, theta: &[f64], length: usize, seed: u64) -> Result<Simulated, HmmError> {
    let alphabet = model
        .alphabet()
        .ok_or(HmmError::ObservationKind("simulate_discrete needs a discrete model"))?;
    if !model.is_homogeneous() {
        return Err(HmmError::Model(alloc::format!("{} has position-dependent transitions", model.name())));
    }
    if length == 0 {
        return Err(HmmError::InvalidSequence("length must be positive".into()));
    }
    check_theta(model, theta)?;
    let n = model.n_states();
    let k = alphabet.len();

    // Evaluate the model on a probe sequence listing every symbol once.
    let probe = ObsSequence::discrete((0..k as u8).collect())?;
    let mut emis = vec![vec![0.0; k]; n];
    let mut col = vec![0.0; n];
    for code in 0..k {
        model.emission(theta, &probe, code, &mut col);
        for s in 0..n {
            emis[s][code] = col[s];
        }
    }
    let mut pi = vec![0.0; n];
    model.initial(theta, &mut pi);
    let mut trans = vec![0.0; n * n];
    let two = ObsSequence::discrete(vec![0, 0])?;
    model.transition(theta, &two, 1, &mut trans);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hidden = Vec::with_capacity(length);
    let mut codes = Vec::with_capacity(length);
    let mut state = 0;
    for i in 0..length {
        state = if i == 0 { categorical(&mut rng, &pi) } else { categorical(&mut rng, &trans[state * n..(state + 1) * n]) };
        hidden.push(state);
        codes.push(categorical(&mut rng, &emis[state]) as u8);
    }
    Ok(Simulated { sequence: ObsSequence::discrete(codes)?, hidden })
}

/// Settings for [`simulate_hbd`].
#[derive(Clone, Debug, PartialEq)]
pub struct HbdSimConfig {
    pub f: f64,
    pub a: f64,
    pub length: usize,
    /// Distance between consecutive markers, cM.
    pub spacing_cm: f64,
    pub epsilon: f64,
    /// Reference-allele frequencies are drawn uniformly from this range.
    pub allele_freq_range: (f64, f64),
    pub seed: u64,
}

impl Default for HbdSimConfig {
    fn default() -> Self {
        HbdSimConfig {
            f: 0.0625,
            a: 0.064,
            length: 1050,
            spacing_cm: 0.1,
            epsilon: crate::models::DEFAULT_EPSILON,
            allele_freq_range: (0.1, 0.9),
            seed: 0,
        }
    }
}

/// Samples a genome directly from the HBD model with markers every
/// `spacing_cm`. Per marker the draws are: allele frequency, hidden state,
/// genotype.
pub fn simulate_hbd(cfg: &HbdSimConfig) -> Result<Simulated, HmmError> {
    let model = Hbd::new(cfg.epsilon);
    check_theta(&model, &[cfg.f, cfg.a])?;
    let (lo, hi) = cfg.allele_freq_range;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(HmmError::Model(alloc::format!("invalid allele frequency range ({lo}, {hi})")));
    }
    if !(cfg.spacing_cm > 0.0) || cfg.length == 0 {
        return Err(HmmError::InvalidSequence("spacing and length must be positive".into()));
    }
    if !(0.0..=1.0).contains(&cfg.epsilon) {
        return Err(HmmError::Model(alloc::format!("epsilon {} outside [0, 1]", cfg.epsilon)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let keep = crate::math::exp(-cfg.a * cfg.spacing_cm);
    let pi = [1.0 - cfg.f, cfg.f];
    let mut positions = Vec::with_capacity(cfg.length);
    let mut freqs = Vec::with_capacity(cfg.length);
    let mut hidden = Vec::with_capacity(cfg.length);
    let mut codes = Vec::with_capacity(cfg.length);
    let mut state = 0;
    for i in 0..cfg.length {
        let p = lo + (hi - lo) * rng.gen::<f64>();
        state = if i == 0 {
            categorical(&mut rng, &pi)
        } else {
            let mut row = [(1.0 - keep) * pi[0], (1.0 - keep) * pi[1]];
            row[state] += keep;
            categorical(&mut rng, &row)
        };
        let e = hbd_emission(0, p, cfg.epsilon);
        let het = hbd_emission(1, p, cfg.epsilon);
        let alt = hbd_emission(2, p, cfg.epsilon);
        let code = categorical(&mut rng, &[e[state], het[state], alt[state]]) as u8;
        positions.push(i as f64 * cfg.spacing_cm);
        freqs.push(p);
        hidden.push(state);
        codes.push(code);
    }
    let sequence = ObsSequence::new(Observations::Discrete(codes), Some(positions), Some(freqs))?;
    Ok(Simulated { sequence, hidden })
}
