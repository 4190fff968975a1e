use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsvf_core::hilbert::{Observable, StateVector};
use tsvf_core::measurement::{
    born_prob, post_selected_frequencies, run_trials, MeasurementChain, ProjectiveMeasurement,
};
use tsvf_core::random::{random_hermitian, random_measurement, random_state};
use tsvf_core::scenarios::binomial_tolerance;
use tsvf_core::tsvf::{
    abl_distribution, decomposition_check, time_reverse, weak_value, TwoStateVector,
};

/// A random instance drawn from one seed: dimension, two states, a measurement, two observables.
#[derive(Debug)]
struct Instance {
    pre: StateVector,
    post: StateVector,
    m: ProjectiveMeasurement,
    a: Observable,
    b: Observable,
}

fn instance(seed: u64, dim: usize, levels: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Instance {
        pre: random_state(&mut rng, dim),
        post: random_state(&mut rng, dim),
        m: random_measurement(&mut rng, "m", dim, levels),
        a: random_hermitian(&mut rng, dim),
        b: random_hermitian(&mut rng, dim),
    }
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 2usize..=4)
        .prop_flat_map(|(seed, dim)| (Just(seed), Just(dim), 1usize..=dim))
        .prop_map(|(seed, dim, levels)| instance(seed, dim, levels))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repeated_measurement_repeats(inst in arb_instance(), seed in any::<u64>()) {
        let chain = MeasurementChain::new(inst.pre, vec![inst.m.clone(), inst.m]).unwrap();
        for r in run_trials(&chain, seed, 200).unwrap() {
            prop_assert_eq!(&r.outcomes[0], &r.outcomes[1]);
        }
    }

    #[test]
    fn trials_are_deterministic(inst in arb_instance(), seed in any::<u64>()) {
        let chain = MeasurementChain::new(inst.pre, vec![inst.m]).unwrap();
        prop_assert_eq!(run_trials(&chain, seed, 300).unwrap(), run_trials(&chain, seed, 300).unwrap());
    }

    #[test]
    fn born_probabilities_sum_to_one(inst in arb_instance()) {
        let total: f64 = inst.m.outcomes().iter().map(|o| born_prob(&inst.pre, &o.projector).unwrap()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn abl_is_a_distribution(inst in arb_instance()) {
        let tsv = TwoStateVector::new(inst.pre, inst.post).unwrap();
        let p = abl_distribution(&tsv, &inst.m).unwrap();
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn swap_symmetry(inst in arb_instance()) {
        let tsv = TwoStateVector::new(inst.pre, inst.post).unwrap();
        let rev = time_reverse(&tsv);
        for (p, q) in abl_distribution(&tsv, &inst.m).unwrap().iter().zip(abl_distribution(&rev, &inst.m).unwrap()) {
            assert_abs_diff_eq!(*p, q, epsilon = 1e-12);
        }
        let w = weak_value(&tsv, &inst.a).unwrap().value();
        let wr = weak_value(&rev, &inst.a).unwrap().value();
        prop_assert!((w - wr.conj()).norm() <= 1e-12 * w.norm().max(1.0));
    }

    #[test]
    fn weak_value_linearity(inst in arb_instance(), s in -3.0f64..3.0) {
        let tsv = TwoStateVector::new(inst.pre, inst.post).unwrap();
        let combo = &inst.a + &inst.b.scale(s);
        let lhs = weak_value(&tsv, &combo).unwrap().value();
        let rhs = weak_value(&tsv, &inst.a).unwrap().value() + weak_value(&tsv, &inst.b).unwrap().value() * s;
        prop_assert!((lhs - rhs).norm() <= 1e-11 * lhs.norm().max(1.0));
    }

    #[test]
    fn decomposition_identity(seed in any::<u64>(), dim in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pre = random_state(&mut rng, dim);
        let mid = random_measurement(&mut rng, "mid", dim, dim);
        let fin = random_measurement(&mut rng, "fin", dim, 2);
        for o in mid.outcomes() {
            let d = decomposition_check(&pre, &mid, &fin, &o.label).unwrap();
            assert_abs_diff_eq!(d.lhs, d.rhs, epsilon = 1e-10);
        }
    }

    /// Pre-selecting an eigenvector of `A` makes the corresponding outcome
    /// certain, and then the weak value of `A` is that eigenvalue.
    #[test]
    fn certainty_theorem(inst in arb_instance(), pick in any::<prop::sample::Index>()) {
        let m = ProjectiveMeasurement::from_observable("a", &inst.a).unwrap();
        let outcome = &m.outcomes()[pick.index(m.outcomes().len())];
        let image = outcome.projector.apply(inst.post.amplitudes());
        prop_assume!(image.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let pre = StateVector::new(image).unwrap();
        let tsv = TwoStateVector::new(pre, inst.post).unwrap();
        prop_assume!(tsv.overlap().norm() > 1e-3);
        let i = m.index_of(&outcome.label).unwrap();
        assert_abs_diff_eq!(abl_distribution(&tsv, &m).unwrap()[i], 1.0, epsilon = 1e-12);
        let w = weak_value(&tsv, &inst.a).unwrap().value();
        prop_assert!((w - Complex64::new(outcome.eigenvalue, 0.0)).norm() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// ABL probabilities against post-selected Monte Carlo frequencies.
    #[test]
    fn oracle_consistency(inst in arb_instance(), seed in any::<u64>()) {
        let tsv = TwoStateVector::new(inst.pre.clone(), inst.post.clone()).unwrap();
        let p = abl_distribution(&tsv, &inst.m).unwrap();
        let fin = ProjectiveMeasurement::onto_state("post", &inst.post, "yes", "no").unwrap();
        let chain = MeasurementChain::new(inst.pre, vec![inst.m.clone(), fin]).unwrap();
        let records = run_trials(&chain, seed, 20_000).unwrap();
        let f = post_selected_frequencies(&records, 1, "yes", 0).unwrap();
        for (o, &pi) in inst.m.outcomes().iter().zip(&p) {
            // 5 sigma keeps the false-alarm rate negligible over many generated cases
            let tol = binomial_tolerance(pi, f.retained, 5.0);
            prop_assert!((f.frequency(&o.label) - pi).abs() <= tol, "{} vs {} (n={})", f.frequency(&o.label), pi, f.retained);
        }
    }
}
