//! Old Faithful eruption models with three hidden states: short (S),
//! long (L) and steady long (Sl).
//!
//! | transition | S     | L     | Sl |
//! |------------|-------|-------|----|
//! | S          | 0     | 1 − a | a  |
//! | L          | 1     | 0     | 0  |
//! | Sl         | 1 − b | 0     | b  |
//!
//! The initial distribution is the stationary law of this chain,
//! `π ∝ (1 − b, (1 − a)(1 − b), a)`, which is unique everywhere except the
//! corner `a = 0, b = 1`; there it falls back to uniform.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::{clamp_to, emission_frequency, transition_counts, uniform, validate_discrete};
use crate::autodiff::Scalar;
use crate::backward::PosteriorSet;
use crate::error::HmmError;
use crate::math::{golden_section_max, sqrt, xlogy};
use crate::model::{BoxKind, HmmModel};
use crate::params::Bounds;
use crate::sequence::{ObsSequence, Observations};

const N: usize = 3;
const STATE_NAMES: &[&str] = &["S", "L", "Sl"];

/// Stationary distribution of the geyser chain.
pub fn geyser_stationary<S: Scalar>(a: S, b: S) -> [S; 3] {
    let one = S::constant(1.0);
    let stay_off = one - b;
    let w = [stay_off, (one - a) * stay_off, a];
    let total = w[0] + w[1] + w[2];
    if total.value() == 0.0 {
        return [S::constant(1.0 / 3.0); 3];
    }
    [w[0] / total, w[1] / total, w[2] / total]
}

/// States the chain never visits under θ: those with zero stationary
/// mass. Their emission parameters, and the transition parameter leaving
/// them (`a` for S, `b` for Sl), do not affect the likelihood and are
/// replaced by NaN when canonicalizing.
fn unvisited(theta: &mut [f64]) -> Vec<usize> {
    let pi = geyser_stationary(theta[0], theta[1]);
    let gone: Vec<usize> = (0..N).filter(|&s| pi[s] == 0.0).collect();
    for &s in &gone {
        match s {
            0 => theta[0] = f64::NAN,
            2 => theta[1] = f64::NAN,
            _ => {}
        }
    }
    gone
}

fn transition<S: Scalar>(a: S, b: S, out: &mut [S]) {
    let zero = S::constant(0.0);
    let one = S::constant(1.0);
    out.copy_from_slice(&[zero, one - a, a, one, zero, zero, one - b, zero, b]);
}

/// The `(a, b)` part of Q: initial-state and transition terms.
fn q_transition(counts: &[f64], phi0: &[f64], a: f64, b: f64) -> f64 {
    let pi = geyser_stationary(a, b);
    let mut q: f64 = phi0.iter().zip(&pi).map(|(&w, &p)| xlogy(w, p)).sum();
    q += xlogy(counts[1], 1.0 - a) + xlogy(counts[2], a);
    q += xlogy(counts[6], 1.0 - b) + xlogy(counts[8], b);
    q
}

/// Maximises the `(a, b)` part of Q on the box. Starts from the better of
/// the expected-count ratios and the current value, then runs coordinate
/// golden-section sweeps that only accept improvements, so the result is
/// never worse than the current value.
fn m_step_transition(post: &PosteriorSet, theta: &[f64], bounds: &Bounds) -> (f64, f64) {
    let counts = transition_counts(post);
    let phi0 = post.phi(0);
    let ratio = |num: f64, other: f64, old: f64| if num + other > 0.0 { num / (num + other) } else { old };
    let a0 = clamp_to(bounds, 0, ratio(counts[2], counts[1], theta[0]));
    let b0 = clamp_to(bounds, 1, ratio(counts[8], counts[6], theta[1]));

    let q = |a: f64, b: f64| q_transition(&counts, phi0, a, b);
    let (mut a, mut b) = (theta[0], theta[1]);
    let mut best = q(a, b);
    let q_ratio = q(a0, b0);
    if q_ratio >= best || best.is_nan() {
        a = a0;
        b = b0;
        best = q_ratio;
    }
    let (la, ua) = (bounds.lower()[0], bounds.upper()[0]);
    let (lb, ub) = (bounds.lower()[1], bounds.upper()[1]);
    for _ in 0..20 {
        let start = best;
        let (xa, qa) = golden_section_max(|x| q(x, b), la, ua, 1e-12);
        if qa > best {
            a = xa;
            best = qa;
        }
        let (xb, qb) = golden_section_max(|x| q(a, x), lb, ub, 1e-12);
        if qb > best {
            b = xb;
            best = qb;
        }
        if best - start <= 1e-14 * (1.0 + best.abs()) {
            break;
        }
    }
    (a, b)
}

fn geyser_bounds(kind: BoxKind, extra: &[(f64, f64)]) -> Bounds {
    let p = match kind {
        BoxKind::Natural => (0.0, 1.0),
        BoxKind::Narrow => (0.01, 0.99),
    };
    let mut lower = vec![p.0; 2];
    let mut upper = vec![p.1; 2];
    for &(l, u) in extra {
        lower.push(l);
        upper.push(u);
    }
    Bounds::new(lower, upper).expect("static bounds")
}

/// Durations dichotomised at three minutes: code 0 = `Dinf3`, 1 = `Dsup3`.
///
/// θ = `(a, b, c, d, e)` where `c`, `d`, `e` are the probabilities of a
/// long eruption (`Dsup3`) in states S, L and Sl.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GeyserDisc;

impl GeyserDisc {
    pub const SHORT: u8 = 0;
    pub const LONG: u8 = 1;
}

impl HmmModel for GeyserDisc {
    fn name(&self) -> &'static str {
        "geyser-disc"
    }
    fn n_states(&self) -> usize {
        N
    }
    fn param_dim(&self) -> usize {
        5
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a", "b", "c", "d", "e"]
    }
    fn state_names(&self) -> &'static [&'static str] {
        STATE_NAMES
    }
    fn alphabet(&self) -> Option<&'static [&'static str]> {
        Some(&["Dinf3", "Dsup3"])
    }

    fn bounds(&self, kind: BoxKind) -> Bounds {
        let p = match kind {
            BoxKind::Natural => (0.0, 1.0),
            BoxKind::Narrow => (0.01, 0.99),
        };
        geyser_bounds(kind, &[p; 3])
    }

    fn validate(&self, seq: &ObsSequence) -> Result<(), HmmError> {
        validate_discrete(seq, 2)
    }

    fn initial<S: Scalar>(&self, theta: &[S], out: &mut [S]) {
        out.copy_from_slice(&geyser_stationary(theta[0], theta[1]));
    }

    fn transition<S: Scalar>(&self, theta: &[S], _seq: &ObsSequence, _step: usize, out: &mut [S]) {
        transition(theta[0], theta[1], out);
    }

    fn emission<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]) {
        let long = seq.code(pos) == Self::LONG;
        for s in 0..N {
            let p = theta[2 + s];
            out[s] = if long { p } else { S::constant(1.0) - p };
        }
    }

    fn m_step(&self, seq: &ObsSequence, post: &PosteriorSet, theta: &[f64], bounds: &Bounds) -> Result<Vec<f64>, HmmError> {
        let (a, b) = m_step_transition(post, theta, bounds);
        let mut out = vec![a, b];
        for (s, freq) in emission_frequency(seq, post, Self::LONG).into_iter().enumerate() {
            out.push(clamp_to(bounds, 2 + s, freq.unwrap_or(theta[2 + s])));
        }
        Ok(out)
    }

    fn sample_start(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..5).map(|_| uniform(rng, 0.01, 0.99)).collect()
    }

    fn canonicalize(&self, theta: &mut [f64]) {
        for s in unvisited(theta) {
            theta[2 + s] = f64::NAN;
        }
    }
}

/// Raw durations with a Gaussian emission per state.
///
/// θ = `(a, b, μ_s, μ_l, μ_sl, σ_s, σ_l, σ_sl)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GeyserCont;

impl GeyserCont {
    pub const SD_FLOOR: f64 = 0.01;
}

impl HmmModel for GeyserCont {
    fn name(&self) -> &'static str {
        "geyser-cont"
    }
    fn n_states(&self) -> usize {
        N
    }
    fn param_dim(&self) -> usize {
        8
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["a", "b", "mu_s", "mu_l", "mu_sl", "sigma_s", "sigma_l", "sigma_sl"]
    }
    fn state_names(&self) -> &'static [&'static str] {
        STATE_NAMES
    }
    fn alphabet(&self) -> Option<&'static [&'static str]> {
        None
    }

    fn bounds(&self, kind: BoxKind) -> Bounds {
        let mean = (f64::NEG_INFINITY, f64::INFINITY);
        let sd = (Self::SD_FLOOR, f64::INFINITY);
        geyser_bounds(kind, &[mean, mean, mean, sd, sd, sd])
    }

    fn validate(&self, seq: &ObsSequence) -> Result<(), HmmError> {
        match seq.observations() {
            Observations::Continuous(_) => Ok(()),
            Observations::Discrete(_) => Err(HmmError::ObservationKind("expected continuous observations")),
        }
    }

    fn initial<S: Scalar>(&self, theta: &[S], out: &mut [S]) {
        out.copy_from_slice(&geyser_stationary(theta[0], theta[1]));
    }

    fn transition<S: Scalar>(&self, theta: &[S], _seq: &ObsSequence, _step: usize, out: &mut [S]) {
        transition(theta[0], theta[1], out);
    }

    fn emission<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]) {
        let x = seq.value(pos);
        for s in 0..N {
            out[s] = S::gaussian_pdf(x, theta[2 + s], theta[5 + s]);
        }
    }

    /// Means and sds are posterior-weighted moments (sd floored by the
    /// box); `(a, b)` as for the dichotomised model.
    fn m_step(&self, seq: &ObsSequence, post: &PosteriorSet, theta: &[f64], bounds: &Bounds) -> Result<Vec<f64>, HmmError> {
        let (a, b) = m_step_transition(post, theta, bounds);
        let mut w = [0.0; N];
        let mut sum = [0.0; N];
        for i in 0..seq.len() {
            if seq.is_missing(i) {
                continue;
            }
            let x = seq.value(i);
            for (s, &p) in post.phi(i).iter().enumerate() {
                w[s] += p;
                sum[s] += p * x;
            }
        }
        let mut mu = [0.0; N];
        let mut var = [0.0; N];
        for s in 0..N {
            mu[s] = if w[s] > 0.0 { sum[s] / w[s] } else { theta[2 + s] };
        }
        for i in 0..seq.len() {
            if seq.is_missing(i) {
                continue;
            }
            let x = seq.value(i);
            for (s, &p) in post.phi(i).iter().enumerate() {
                var[s] += p * (x - mu[s]) * (x - mu[s]);
            }
        }
        let mut out = vec![a, b];
        for s in 0..N {
            out.push(clamp_to(bounds, 2 + s, mu[s]));
        }
        for s in 0..N {
            let sd = if w[s] > 0.0 { sqrt(var[s] / w[s]) } else { theta[5 + s] };
            out.push(clamp_to(bounds, 5 + s, sd));
        }
        Ok(out)
    }

    fn sample_start(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut v = vec![uniform(rng, 0.01, 0.99), uniform(rng, 0.01, 0.99)];
        v.extend((0..3).map(|_| uniform(rng, 1.0, 5.5)));
        v.extend((0..3).map(|_| uniform(rng, 0.01, 2.0)));
        v
    }

    fn canonicalize(&self, theta: &mut [f64]) {
        for s in unvisited(theta) {
            theta[2 + s] = f64::NAN;
            theta[5 + s] = f64::NAN;
        }
    }
}
