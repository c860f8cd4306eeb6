//! Test-side reference computations that share nothing with the library's
//! forward/backward code beyond the model's own π, T and E.

use hmmfit_core::{HmmModel, ObsSequence};

/// Exact posteriors by summing over every hidden path.
pub struct Enumerated {
    pub loglik: f64,
    /// `phi[i][s]`
    pub phi: Vec<Vec<f64>>,
    /// `delta[k][s * n + t]`
    pub delta: Vec<Vec<f64>>,
}

fn emissions<M: HmmModel>(model: &M, theta: &[f64], seq: &ObsSequence) -> Vec<Vec<f64>> {
    let n = model.n_states();
    (0..seq.len())
        .map(|i| {
            let mut e = vec![1.0; n];
            if !seq.is_missing(i) {
                model.emission(theta, seq, i, &mut e);
            }
            e
        })
        .collect()
}

fn transitions<M: HmmModel>(model: &M, theta: &[f64], seq: &ObsSequence) -> Vec<Vec<f64>> {
    let n = model.n_states();
    (1..seq.len())
        .map(|step| {
            let mut t = vec![0.0; n * n];
            model.transition(theta, seq, step, &mut t);
            t
        })
        .collect()
}

/// Enumerates all `n^L` paths. Keep `n^L` small.
pub fn enumerate_paths<M: HmmModel>(model: &M, theta: &[f64], seq: &ObsSequence) -> Enumerated {
    let n = model.n_states();
    let len = seq.len();
    let mut pi = vec![0.0; n];
    model.initial(theta, &mut pi);
    let em = emissions(model, theta, seq);
    let tr = transitions(model, theta, seq);

    let mut total = 0.0;
    let mut phi = vec![vec![0.0; n]; len];
    let mut delta = vec![vec![0.0; n * n]; len.saturating_sub(1)];
    let mut path = vec![0usize; len];
    let count = n.pow(len as u32);
    for code in 0..count {
        let mut c = code;
        for s in path.iter_mut() {
            *s = c % n;
            c /= n;
        }
        let mut w = pi[path[0]] * em[0][path[0]];
        for i in 1..len {
            w *= tr[i - 1][path[i - 1] * n + path[i]] * em[i][path[i]];
        }
        total += w;
        for i in 0..len {
            phi[i][path[i]] += w;
        }
        for k in 0..len.saturating_sub(1) {
            delta[k][path[k] * n + path[k + 1]] += w;
        }
    }
    for row in phi.iter_mut().chain(delta.iter_mut()) {
        row.iter_mut().for_each(|x| *x /= total);
    }
    Enumerated { loglik: total.ln(), phi, delta }
}

/// Joint probability forward recursion in plain (unscaled) arithmetic.
/// Only meaningful for short sequences.
pub fn naive_forward<M: HmmModel>(model: &M, theta: &[f64], seq: &ObsSequence) -> f64 {
    let n = model.n_states();
    let mut a = vec![0.0; n];
    model.initial(theta, &mut a);
    let em = emissions(model, theta, seq);
    let tr = transitions(model, theta, seq);
    for s in 0..n {
        a[s] *= em[0][s];
    }
    for i in 1..seq.len() {
        a = (0..n).map(|t| (0..n).map(|s| a[s] * tr[i - 1][s * n + t]).sum::<f64>() * em[i][t]).collect();
    }
    a.iter().sum::<f64>().ln()
}

/// Central differences with one Richardson extrapolation, accurate to
/// `O(h^4)`.
pub fn finite_difference<F: Fn(&[f64]) -> f64>(f: F, theta: &[f64], rel_step: f64) -> Vec<f64> {
    let central = |j: usize, h: f64| {
        let mut up = theta.to_vec();
        let mut down = theta.to_vec();
        up[j] += h;
        down[j] -= h;
        (f(&up) - f(&down)) / (2.0 * h)
    };
    (0..theta.len())
        .map(|j| {
            let h = rel_step * theta[j].abs().max(1e-2);
            (4.0 * central(j, h / 2.0) - central(j, h)) / 3.0
        })
        .collect()
}

/// `|x - y| / max(|y|, floor)`.
pub fn rel_err(x: f64, y: f64, floor: f64) -> f64 {
    (x - y).abs() / y.abs().max(floor)
}
