mod common;

use common::{interior_theta, random_sequence, realistic_sequence, rng};
use hmmfit_core::{
    backward, expected_complete_loglik, forward_conditional, BoxKind, HmmModel, ModelKind, ObsSequence,
    Observations, Optimizer, OptimizerConfig, Umbrella,
};
use proptest::prelude::*;
use rand::Rng;

fn posteriors(model: &impl HmmModel, theta: &[f64], seq: &ObsSequence) -> hmmfit_core::PosteriorSet {
    let fw = forward_conditional(model, theta, seq).unwrap();
    backward(model, theta, seq, &fw).unwrap()
}

#[test]
fn m_step_beats_random_parameters() {
    // closed-form (or one-dimensional exact) M-steps maximise Q globally
    for kind in [ModelKind::Umbrella, ModelKind::GeyserDisc, ModelKind::GeyserCont] {
        let model = kind.build();
        let seq = realistic_sequence(kind, 21);
        let bounds = model.bounds(BoxKind::Natural);
        let mut r = rng(22);
        for _ in 0..5 {
            let theta = interior_theta(kind, &mut r);
            let post = posteriors(&model, &theta, &seq);
            let next = model.m_step(&seq, &post, &theta, &bounds).unwrap();
            let q_next = expected_complete_loglik(&model, &seq, &post, &next);
            for _ in 0..200 {
                let other = model.sample_start(&mut r);
                let q_other = expected_complete_loglik(&model, &seq, &post, &other);
                assert!(q_next >= q_other - 1e-9 * q_next.abs(), "{kind:?}: Q {q_next} < {q_other} at {other:?}");
            }
        }
    }
}

#[test]
fn hbd_generalized_m_step_increases_q() {
    let model = ModelKind::Hbd.build();
    let seq = realistic_sequence(ModelKind::Hbd, 23);
    let bounds = model.bounds(BoxKind::Natural);
    let mut r = rng(24);
    for _ in 0..20 {
        let theta = interior_theta(ModelKind::Hbd, &mut r);
        let post = posteriors(&model, &theta, &seq);
        let next = model.m_step(&seq, &post, &theta, &bounds).unwrap();
        let q_old = expected_complete_loglik(&model, &seq, &post, &theta);
        let q_new = expected_complete_loglik(&model, &seq, &post, &next);
        assert!(q_new >= q_old, "{q_new} < {q_old}");
        assert!(bounds.contains(&next));
    }
}

#[test]
fn baum_welch_never_decreases_the_likelihood() {
    let cfg = OptimizerConfig { max_iter: 60, ..OptimizerConfig::default() };
    for kind in ModelKind::ALL {
        let model = kind.build();
        let seq = realistic_sequence(kind, 31);
        let mut r = rng(32);
        for _ in 0..10 {
            let start = model.sample_start(&mut r);
            let rec = Optimizer::BaumWelch.run(&model, &seq, &start, &cfg).unwrap();
            for w in rec.loglik_trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-10 * w[0].abs(), "{kind:?}: {} -> {}", w[0], w[1]);
            }
        }
    }
}

#[test]
fn transition_rows_and_initial_laws_sum_to_one() {
    let mut r = rng(41);
    for kind in ModelKind::ALL {
        let model = kind.build();
        let n = model.n_states();
        let seq = random_sequence(kind, &mut r, 30);
        for _ in 0..50 {
            let theta = model.sample_start(&mut r);
            let mut pi = vec![0.0; n];
            model.initial(&theta, &mut pi);
            assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{kind:?}");
            assert!(pi.iter().all(|&p| p >= 0.0));
            let mut t = vec![0.0; n * n];
            for step in 1..seq.len() {
                model.transition(&theta, &seq, step, &mut t);
                for row in t.chunks(n) {
                    assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{kind:?}");
                    assert!(row.iter().all(|&p| p >= 0.0));
                }
            }
        }
    }
}

#[test]
fn discrete_emissions_sum_to_one_over_the_alphabet() {
    let mut r = rng(42);
    for kind in [ModelKind::Umbrella, ModelKind::GeyserDisc, ModelKind::Hbd] {
        let model = kind.build();
        let n = model.n_states();
        let k = model.alphabet().unwrap().len();
        let base = random_sequence(kind, &mut r, 10);
        for _ in 0..50 {
            let theta = model.sample_start(&mut r);
            let mut total = vec![vec![0.0; n]; base.len()];
            for code in 0..k as u8 {
                let seq = ObsSequence::new(
                    Observations::Discrete(vec![code; base.len()]),
                    base.positions().map(<[f64]>::to_vec),
                    base.allele_freq().map(<[f64]>::to_vec),
                )
                .unwrap();
                let mut e = vec![0.0; n];
                for (i, acc) in total.iter_mut().enumerate() {
                    model.emission(&theta, &seq, i, &mut e);
                    acc.iter_mut().zip(&e).for_each(|(a, x)| *a += x);
                }
            }
            for acc in total {
                assert!(acc.iter().all(|s| (s - 1.0).abs() < 1e-12), "{kind:?}: {acc:?}");
            }
        }
    }
}

#[test]
fn gaussian_emissions_integrate_to_one() {
    let model = ModelKind::GeyserCont.build();
    let mut r = rng(43);
    let theta = interior_theta(ModelKind::GeyserCont, &mut r);
    let (lo, hi, steps) = (-20.0, 30.0, 200_000);
    let h = (hi - lo) / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * h).collect();
    let seq = ObsSequence::continuous(grid).unwrap();
    let mut total = [0.0; 3];
    let mut e = [0.0; 3];
    for i in 0..seq.len() {
        model.emission(&theta, &seq, i, &mut e);
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        total.iter_mut().zip(&e).for_each(|(t, x)| *t += w * h * x);
    }
    assert!(total.iter().all(|t| (t - 1.0).abs() < 1e-9), "{total:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn umbrella_is_symmetric_under_label_swap(s in any::<u64>(), a in 0.0f64..=1.0, b in 0.0f64..=1.0, len in 1usize..200) {
        let mut r = rng(s);
        let seq = random_sequence(ModelKind::Umbrella, &mut r, len);
        let ll = forward_conditional(&Umbrella, &[a, b], &seq).map(|f| f.loglik);
        let swapped = forward_conditional(&Umbrella, &[a, 1.0 - b], &seq).map(|f| f.loglik);
        match (ll, swapped) {
            (Ok(x), Ok(y)) => prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{} vs {}", x, y),
            (x, y) => prop_assert_eq!(x.is_err(), y.is_err()),
        }
    }

    #[test]
    fn one_em_step_does_not_decrease_the_likelihood(s in any::<u64>(), kind_idx in 0usize..4) {
        let kind = ModelKind::ALL[kind_idx];
        let model = kind.build();
        let mut r = rng(s);
        let len = r.gen_range(2..150);
        let seq = random_sequence(kind, &mut r, len);
        let theta = interior_theta(kind, &mut r);
        let fw = forward_conditional(&model, &theta, &seq).unwrap();
        let post = backward(&model, &theta, &seq, &fw).unwrap();
        let next = model.m_step(&seq, &post, &theta, &model.bounds(BoxKind::Natural)).unwrap();
        if let Ok(after) = forward_conditional(&model, &next, &seq) {
            prop_assert!(after.loglik >= fw.loglik - 1e-10 * fw.loglik.abs(), "{} -> {}", fw.loglik, after.loglik);
        }
    }
}
