//! Two-state model of homozygous-by-descent (HBD) segments along a genome.
//!
//! With `e_i = exp(-a·d_i)` for the map distance `d_i` (cM) between
//! consecutive markers, the chain either keeps its state (probability
//! `e_i`) or redraws it from `(1 − f, f)`:
//!
//! | transition | nHBD                | HBD             |
//! |------------|---------------------|-----------------|
//! | nHBD       | (1 − e)(1 − f) + e  | (1 − e) f       |
//! | HBD        | (1 − e)(1 − f)      | (1 − e) f + e   |
//!
//! Genotype emissions depend on the per-marker reference-allele frequency
//! `pA` (`pa = 1 − pA`) and a genotyping error rate `ε`:
//!
//! | genotype | nHBD      | HBD                 |
//! |----------|-----------|---------------------|
//! | AA       | pA²       | (1 − ε) pA + ε pA²  |
//! | Aa       | 2 pA pa   | 2 ε pA pa           |
//! | aa       | pa²       | (1 − ε) pa + ε pa²  |

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::{uniform, validate_discrete};
use crate::autodiff::Scalar;
use crate::backward::PosteriorSet;
use crate::error::HmmError;
use crate::math::{golden_section_max, xlogy};
use crate::model::{BoxKind, HmmModel};
use crate::params::Bounds;
use crate::sequence::ObsSequence;

pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Genotype codes.
pub const HOM_REF: u8 = 0;
pub const HET: u8 = 1;
pub const HOM_ALT: u8 = 2;

/// Emission probabilities `(nHBD, HBD)` of genotype `code`.
pub fn hbd_emission(code: u8, p_ref: f64, epsilon: f64) -> [f64; 2] {
    let p_alt = 1.0 - p_ref;
    match code {
        HOM_REF => [p_ref * p_ref, (1.0 - epsilon) * p_ref + epsilon * p_ref * p_ref],
        HET => [2.0 * p_ref * p_alt, 2.0 * epsilon * p_ref * p_alt],
        _ => [p_alt * p_alt, (1.0 - epsilon) * p_alt + epsilon * p_alt * p_alt],
    }
}

/// θ = `(f, a)`: `f` is the consanguinity coefficient and `a` the rate
/// (per cM) at which the chain redraws its state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hbd {
    pub epsilon: f64,
}

impl Default for Hbd {
    fn default() -> Self {
        Hbd { epsilon: DEFAULT_EPSILON }
    }
}

impl Hbd {
    pub const NON_HBD: usize = 0;
    pub const HBD: usize = 1;

    pub fn new(epsilon: f64) -> Self {
        Hbd { epsilon }
    }
}

fn hbd_transition<S: Scalar>(f: S, a: S, d: f64, out: &mut [S]) {
    let one = S::constant(1.0);
    let e = (a.scale(-d)).exp();
    let jump = one - e;
    let to_hbd = jump * f;
    let to_non = jump * (one - f);
    out[0] = to_non + e;
    out[1] = to_hbd;
    out[2] = to_non;
    out[3] = to_hbd + e;
}

/// Expected transition counts grouped by distinct inter-marker distance.
fn counts_by_distance(seq: &ObsSequence, post: &PosteriorSet) -> Vec<(f64, [f64; 4])> {
    let mut groups: Vec<(f64, [f64; 4])> = Vec::new();
    for step in 1..seq.len() {
        let d = seq.distance(step).unwrap_or(0.0);
        let idx = match groups.iter().position(|g| g.0 == d) {
            Some(i) => i,
            None => {
                groups.push((d, [0.0; 4]));
                groups.len() - 1
            }
        };
        for (c, &w) in groups[idx].1.iter_mut().zip(post.delta(step - 1)) {
            *c += w;
        }
    }
    groups
}

fn q_transition(groups: &[(f64, [f64; 4])], phi0: &[f64], f: f64, a: f64) -> f64 {
    let mut q = xlogy(phi0[0], 1.0 - f) + xlogy(phi0[1], f);
    let mut t = [0.0; 4];
    for (d, counts) in groups {
        hbd_transition(f, a, *d, &mut t);
        q += counts.iter().zip(&t).map(|(&c, &p)| xlogy(c, p)).sum::<f64>();
    }
    q
}

impl HmmModel for Hbd {
    fn name(&self) -> &'static str {
        "hbd"
    }
    fn n_states(&self) -> usize {
        2
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn param_names(&self) -> &'static [&'static str] {
        &["f", "a"]
    }
    fn state_names(&self) -> &'static [&'static str] {
        &["nHBD", "HBD"]
    }
    fn alphabet(&self) -> Option<&'static [&'static str]> {
        Some(&["AA", "Aa", "aa"])
    }

    fn bounds(&self, kind: BoxKind) -> Bounds {
        let (lo, hi) = match kind {
            BoxKind::Natural => (0.0, 1.0),
            BoxKind::Narrow => (0.01, 0.99),
        };
        Bounds::new(vec![lo, lo], vec![hi, f64::INFINITY]).expect("static bounds")
    }

    /// Off the `f = 0` face the log-likelihood rises almost vertically,
    /// which projected line searches cannot follow.
    fn gradient_box(&self) -> BoxKind {
        BoxKind::Narrow
    }

    fn validate(&self, seq: &ObsSequence) -> Result<(), HmmError> {
        validate_discrete(seq, 3)?;
        if seq.positions().is_none() {
            return Err(HmmError::MissingPositions);
        }
        if seq.allele_freq().is_none() {
            return Err(HmmError::Model("the hbd model needs per-marker allele frequencies".into()));
        }
        Ok(())
    }

    fn is_homogeneous(&self) -> bool {
        false
    }

    fn initial<S: Scalar>(&self, theta: &[S], out: &mut [S]) {
        out[0] = S::constant(1.0) - theta[0];
        out[1] = theta[0];
    }

    fn transition<S: Scalar>(&self, theta: &[S], seq: &ObsSequence, step: usize, out: &mut [S]) {
        let d = seq.distance(step).unwrap_or(0.0);
        hbd_transition(theta[0], theta[1], d, out);
    }

    fn emission<S: Scalar>(&self, _theta: &[S], seq: &ObsSequence, pos: usize, out: &mut [S]) {
        let p = seq.allele_freq().map_or(0.5, |q| q[pos]);
        let e = hbd_emission(seq.code(pos), p, self.epsilon);
        out[0] = S::constant(e[0]);
        out[1] = S::constant(e[1]);
    }

    /// Generalised EM step: emissions do not depend on θ, and `(f, a)` has
    /// no closed form, so three coordinate sweeps of golden-section search
    /// on Q start from the current value and keep only improvements.
    fn m_step(&self, seq: &ObsSequence, post: &PosteriorSet, theta: &[f64], bounds: &Bounds) -> Result<Vec<f64>, HmmError> {
        let groups = counts_by_distance(seq, post);
        let phi0 = post.phi(0);
        let q = |f: f64, a: f64| q_transition(&groups, phi0, f, a);
        let (lo, hi) = (bounds.lower(), bounds.upper());
        let (mut f, mut a) = (theta[0].clamp(lo[0], hi[0]), theta[1].clamp(lo[1], hi[1]));
        let mut best = q(f, a);
        for _ in 0..3 {
            let (xf, qf) = golden_section_max(|x| q(x, a), lo[0], hi[0], 1e-12);
            if qf > best || best.is_nan() {
                f = xf;
                best = qf;
            }
            // Grow the bracket for a while the maximiser sits at its top.
            let mut top = (4.0 * a).max(1.0).min(hi[1]);
            let (xa, qa) = loop {
                let (x, qx) = golden_section_max(|x| q(f, x), lo[1], top, 1e-12 * top);
                if x < 0.9 * top || top >= hi[1] || top > 1e12 {
                    break (x, qx);
                }
                top = (top * 4.0).min(hi[1]);
            };
            if qa > best {
                a = xa;
                best = qa;
            }
        }
        Ok(vec![f, a])
    }

    fn sample_start(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        vec![uniform(rng, 0.01, 0.99), uniform(rng, 0.01, 1.0)]
    }
}
