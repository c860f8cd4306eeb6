//! Inverse-Hessian updates and the projected Armijo line search shared by
//! the quasi-Newton optimizers. Everything here works on `f = −loglik`.

use alloc::vec;
use alloc::vec::Vec;

use super::eval::Evaluator;
use super::OptimizerConfig;
use crate::error::HmmError;
use crate::forward::GradientResult;
use crate::math::dot;
use crate::model::HmmModel;
use crate::params::Bounds;

/// Which secant update maintains the inverse-Hessian approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseUpdate {
    /// `H⁺ = (I − ρsy')H(I − ρys') + ρss'` with `ρ = 1/(y's)`.
    Bfgs,
    /// `H⁺ = H − Hyy'H/(y'Hy) + ss'/(y's)`.
    Dfp,
}

impl InverseUpdate {
    pub fn name(self) -> &'static str {
        match self {
            InverseUpdate::Bfgs => "bfgs",
            InverseUpdate::Dfp => "dfp",
        }
    }
}

pub(crate) fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec(h: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| dot(&h[i * n..(i + 1) * n], x)).collect()
}

/// Updates the row-major `n × n` matrix `h` in place. The caller must have
/// checked `s'y > 0`. The result is symmetrised.
pub fn update_inverse_hessian(h: &mut [f64], s: &[f64], y: &[f64], kind: InverseUpdate) {
    let n = s.len();
    let sy = dot(s, y);
    let hy = mat_vec(h, y);
    match kind {
        InverseUpdate::Bfgs => {
            let rho = 1.0 / sy;
            let yhy = dot(y, &hy);
            // Expanded form of (I − ρsy')H(I − ρys') + ρss' for symmetric H.
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        InverseUpdate::Dfp => {
            let yhy = dot(y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -hy[i] * hy[j] / yhy + s[i] * s[j] / sy;
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (h[i * n + j] + h[j * n + i]);
            h[i * n + j] = m;
            h[j * n + i] = m;
        }
    }
}

/// Inverse-Hessian approximation for `f` with the bookkeeping the box
/// needs.
#[derive(Clone, Debug)]
pub(crate) struct InverseHessian {
    h: Vec<f64>,
    n: usize,
    /// True while `h` is the identity.
    fresh: bool,
}

impl InverseHessian {
    pub fn new(n: usize) -> Self {
        InverseHessian { h: identity(n), n, fresh: true }
    }

    pub fn reset(&mut self) {
        *self = InverseHessian::new(self.n);
    }

    pub fn is_fresh(&self) -> bool {
        self.fresh
    }

    /// Projected quasi-Newton direction. With an unscaled `H` the step is
    /// capped at unit Euclidean length, as L-BFGS-B does on its first
    /// iteration.
    pub fn direction(&self, g: &[f64], theta: &[f64], bounds: &Bounds) -> Vec<f64> {
        let mut p = projected_direction(&self.h, g, theta, bounds);
        if self.fresh {
            let norm = libm::sqrt(dot(&p, &p));
            if norm > 1.0 {
                p.iter_mut().for_each(|pj| *pj /= norm);
            }
        }
        p
    }

    /// Applies the secant update when `s'y > 0` and reports whether it did.
    /// Coordinates that did not move (held at a bound) are dropped from `y`
    /// so they do not leak into the free block. An identity `H` is first
    /// rescaled to `(s'y / y'y) I`.
    pub fn update(&mut self, s: &[f64], y: &[f64], kind: InverseUpdate) -> bool {
        let y: Vec<f64> = y.iter().zip(s).map(|(&yj, &sj)| if sj == 0.0 { 0.0 } else { yj }).collect();
        let sy = dot(s, &y);
        if !(sy > 0.0) || !sy.is_finite() {
            return false;
        }
        if self.fresh {
            let scale = sy / dot(&y, &y);
            for i in 0..self.n {
                self.h[i * self.n + i] = scale;
            }
        }
        update_inverse_hessian(&mut self.h, s, &y, kind);
        self.fresh = false;
        true
    }
}

/// Search direction `−H g̃` where `g̃` is `g` with the components that push
/// through an active bound zeroed; those components of the direction are
/// zeroed too.
pub(crate) fn projected_direction(h: &[f64], g: &[f64], theta: &[f64], bounds: &Bounds) -> Vec<f64> {
    let active: Vec<bool> = (0..g.len())
        .map(|j| (theta[j] <= bounds.lower()[j] && g[j] > 0.0) || (theta[j] >= bounds.upper()[j] && g[j] < 0.0))
        .collect();
    let g_free: Vec<f64> = g.iter().zip(&active).map(|(&x, &a)| if a { 0.0 } else { x }).collect();
    let mut p = mat_vec(h, &g_free);
    for (pj, &a) in p.iter_mut().zip(&active) {
        *pj = if a { 0.0 } else { -*pj };
    }
    p
}

pub(crate) struct Accepted {
    pub theta: Vec<f64>,
    pub grad: GradientResult,
}

/// Backtracking along the projected path `clip(θ + αp)`, accepting the
/// first α with `f(θ(α)) ≤ f(θ) + c·g'(θ(α) − θ)` and a strictly negative
/// predicted change. Non-finite trials count as rejections.
pub(crate) fn armijo<M: HmmModel>(
    ev: &mut Evaluator<'_, M>,
    theta: &[f64],
    f: f64,
    g: &[f64],
    p: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Option<Accepted>, HmmError> {
    let mut alpha = 1.0;
    for _ in 0..=cfg.max_halvings {
        let mut cand: Vec<f64> = theta.iter().zip(p).map(|(&t, &d)| t + alpha * d).collect();
        ev.bounds.clip(&mut cand);
        let step: Vec<f64> = cand.iter().zip(theta).map(|(&c, &t)| c - t).collect();
        let predicted = dot(g, &step);
        if predicted < 0.0 {
            if let Some(grad) = ev.gradient(&cand)? {
                if -grad.loglik <= f + cfg.armijo_c * predicted {
                    return Ok(Some(Accepted { theta: cand, grad }));
                }
            }
        } else if step.iter().all(|&d| d == 0.0) {
            return Ok(None);
        }
        alpha *= cfg.backtrack_factor;
    }
    Ok(None)
}

/// True when moving along `p` cannot change `f` by more than rounding.
pub(crate) fn negligible(g: &[f64], p: &[f64], loglik: f64) -> bool {
    dot(g, p).abs() <= 4.0 * f64::EPSILON * loglik.abs() || p.iter().all(|&x| x == 0.0)
}

/// Gradient of `f = −loglik`.
pub(crate) fn neg(g: &[f64]) -> Vec<f64> {
    g.iter().map(|x| -x).collect()
}

pub(crate) fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quad_form(h: &[f64], z: &[f64]) -> f64 {
        dot(z, &mat_vec(h, z))
    }

    #[test]
    fn bfgs_satisfies_secant_equation() {
        let mut h = identity(3);
        let s = [0.3, -0.1, 0.2];
        let y = [0.5, 0.1, 0.4];
        update_inverse_hessian(&mut h, &s, &y, InverseUpdate::Bfgs);
        let hy = mat_vec(&h, &y);
        for i in 0..3 {
            assert!((hy[i] - s[i]).abs() < 1e-14);
        }
        let mut d = identity(3);
        update_inverse_hessian(&mut d, &s, &y, InverseUpdate::Dfp);
        let dy = mat_vec(&d, &y);
        for i in 0..3 {
            assert!((dy[i] - s[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn direction_respects_active_bounds() {
        let bounds = Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let h = identity(2);
        // f increases into the lower bound of the first coordinate
        let p = projected_direction(&h, &[2.0, -1.0], &[0.0, 0.5], &bounds);
        assert_eq!(p, vec![0.0, 1.0]);
        let p = projected_direction(&h, &[-2.0, 1.0], &[0.0, 1.0], &bounds);
        assert_eq!(p, vec![2.0, -1.0]);
    }

    proptest! {
        #[test]
        fn update_keeps_h_symmetric_positive_definite(
            steps in proptest::collection::vec((proptest::collection::vec(-1.0f64..1.0, 4), proptest::collection::vec(-1.0f64..1.0, 4)), 1..6),
            zs in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 4), 10),
            dfp in any::<bool>(),
        ) {
            let kind = if dfp { InverseUpdate::Dfp } else { InverseUpdate::Bfgs };
            let mut h = identity(4);
            for (s, y) in &steps {
                if dot(s, y) > 1e-3 {
                    update_inverse_hessian(&mut h, s, y, kind);
                }
            }
            for i in 0..4 {
                for j in 0..4 {
                    prop_assert!((h[i * 4 + j] - h[j * 4 + i]).abs() <= 1e-12);
                }
            }
            for z in &zs {
                if dot(z, z) > 1e-12 {
                    prop_assert!(quad_form(&h, z) > 0.0);
                }
            }
        }
    }
}
