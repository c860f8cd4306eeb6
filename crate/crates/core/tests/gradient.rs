mod common;

use common::oracle::{finite_difference, rel_err};
use common::{interior_theta, random_sequence, realistic_sequence, rng};
use hmmfit_core::autodiff::seed;
use hmmfit_core::{forward_conditional, loglik_with_gradient, Dual, HmmModel, ModelKind, Scalar};
use proptest::prelude::*;

fn max_gradient_error(kind: ModelKind, points: usize, seed_: u64) -> f64 {
    let model = kind.build();
    let seq = realistic_sequence(kind, seed_);
    let mut r = rng(seed_ + 1);
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let theta = interior_theta(kind, &mut r);
        let ad = loglik_with_gradient(&model, &theta, &seq).unwrap();
        let fd = finite_difference(|t| forward_conditional(&model, t, &seq).unwrap().loglik, &theta, 1e-4);
        for (g, h) in ad.gradient.iter().zip(&fd) {
            worst = worst.max(rel_err(*g, *h, 1.0));
        }
    }
    worst
}

#[test]
fn gradients_match_finite_differences() {
    for (i, kind) in ModelKind::ALL.into_iter().enumerate() {
        let err = max_gradient_error(kind, 20, 40 + i as u64);
        assert!(err < 1e-6, "{kind:?}: {err:e}");
    }
}

#[test]
fn dual_value_equals_plain_forward_bitwise() {
    let mut r = rng(3);
    for kind in ModelKind::ALL {
        let model = kind.build();
        let seq = random_sequence(kind, &mut r, 300);
        for _ in 0..10 {
            let theta = interior_theta(kind, &mut r);
            let plain = forward_conditional(&model, &theta, &seq).unwrap();
            let dual = loglik_with_gradient(&model, &theta, &seq).unwrap();
            assert_eq!(plain.loglik.to_bits(), dual.loglik.to_bits(), "{kind:?}");
            assert_eq!(plain, dual.forward);
        }
    }
}

#[test]
fn model_tables_agree_between_scalar_types() {
    let mut r = rng(8);
    for kind in ModelKind::ALL {
        let model = kind.build();
        let n = model.n_states();
        let seq = random_sequence(kind, &mut r, 20);
        let theta = interior_theta(kind, &mut r);
        let duals: Vec<Dual> = seed(&theta);
        let (mut p, mut pd) = (vec![0.0; n], vec![Dual::constant(0.0); n]);
        model.initial(&theta, &mut p);
        model.initial(&duals, &mut pd);
        assert!(p.iter().zip(&pd).all(|(a, b)| *a == b.value()));
        let (mut t, mut td) = (vec![0.0; n * n], vec![Dual::constant(0.0); n * n]);
        let (mut e, mut ed) = (vec![0.0; n], vec![Dual::constant(0.0); n]);
        for i in 0..seq.len() {
            if i > 0 {
                model.transition(&theta, &seq, i, &mut t);
                model.transition(&duals, &seq, i, &mut td);
                assert!(t.iter().zip(&td).all(|(a, b)| *a == b.value()));
            }
            if !seq.is_missing(i) {
                model.emission(&theta, &seq, i, &mut e);
                model.emission(&duals, &seq, i, &mut ed);
                assert!(e.iter().zip(&ed).all(|(a, b)| *a == b.value()));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gradient_matches_finite_differences_on_random_data(s in any::<u64>(), kind_idx in 0usize..4, len in 2usize..60) {
        let kind = ModelKind::ALL[kind_idx];
        let model = kind.build();
        let mut r = rng(s);
        let theta = interior_theta(kind, &mut r);
        let seq = random_sequence(kind, &mut r, len);
        let ad = loglik_with_gradient(&model, &theta, &seq).unwrap();
        let fd = finite_difference(|t| forward_conditional(&model, t, &seq).unwrap().loglik, &theta, 1e-4);
        for (g, h) in ad.gradient.iter().zip(&fd) {
            prop_assert!(rel_err(*g, *h, 1.0) < 1e-6, "{:?}: {} vs {}", kind, g, h);
        }
    }
}
