use fyseq::entmax::{entmax15, entmax_bisect, sparsemax, transform, AlphaParam, LogitVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHAS: [f64; 5] = [1.0, 1.3, 1.5, 2.0, 4.0];

fn logits() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 2..=64)
}

fn alpha() -> impl Strategy<Value = f64> {
    prop::sample::select(ALPHAS.to_vec())
}

fn lv(v: &[f64]) -> LogitVector {
    LogitVector::new(v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn output_is_on_the_simplex(z in logits(), a in alpha()) {
        let p = transform(&lv(&z), AlphaParam::new(a).unwrap());
        let sum: f64 = p.probabilities().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-9);
        prop_assert!(p.probabilities().iter().all(|&x| x >= 0.0));
        let support: Vec<usize> = (0..z.len()).filter(|&i| p.get(i) > 0.0).collect();
        prop_assert_eq!(p.support(), support.as_slice());
    }

    #[test]
    fn translation_invariance(z in logits(), a in alpha(), c in -100.0..100.0f64) {
        let a = AlphaParam::new(a).unwrap();
        let p = transform(&lv(&z), a);
        let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
        let q = transform(&lv(&shifted), a);
        for (x, y) in p.probabilities().iter().zip(q.probabilities()) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn permutation_equivariance(z in logits(), a in alpha(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let a = AlphaParam::new(a).unwrap();
        let mut perm: Vec<usize> = (0..z.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let permuted: Vec<f64> = perm.iter().map(|&i| z[i]).collect();
        let p = transform(&lv(&z), a);
        let q = transform(&lv(&permuted), a);
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((q.get(k) - p.get(i)).abs() <= 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_bisection(z in logits()) {
        let z = lv(&z);
        let s = sparsemax(&z);
        let sb = entmax_bisect(&z, AlphaParam::SPARSEMAX, 1e-12, 100).unwrap();
        let e = entmax15(&z);
        let eb = entmax_bisect(&z, AlphaParam::ENTMAX15, 1e-12, 100).unwrap();
        for i in 0..z.len() {
            prop_assert!((s.get(i) - sb.get(i)).abs() <= 1e-6);
            prop_assert!((e.get(i) - eb.get(i)).abs() <= 1e-6);
        }
    }

    #[test]
    fn dominant_entry_gives_exact_zeros(z in logits(), a in prop::sample::select(vec![1.3, 1.5, 2.0, 4.0])) {
        let mut z = z;
        let n = z.len();
        let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // A gap of 1/(α−1) is exactly enough to zero every other entry.
        z[0] = top + 1.0 / (a - 1.0) + 0.1;
        let p = transform(&lv(&z), AlphaParam::new(a).unwrap());
        prop_assert!(p.support().len() < n);
        prop_assert!((1..n).all(|i| p.get(i) == 0.0));
    }

    #[test]
    fn softmax_has_full_support(z in logits()) {
        let p = transform(&lv(&z), AlphaParam::SOFTMAX);
        prop_assert_eq!(p.support().len(), z.len());
    }

    #[test]
    fn argmax_is_preserved(z in logits(), a in alpha()) {
        let p = transform(&lv(&z), AlphaParam::new(a).unwrap());
        let best = p.argmax();
        let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(z[best], top);
    }

    #[test]
    fn bisection_never_hits_iteration_limit(z in logits(), a in 1.01..6.0f64) {
        prop_assert!(entmax_bisect(&lv(&z), AlphaParam::new(a).unwrap(), 1e-12, 100).is_ok());
    }
}

#[test]
fn larger_alpha_is_sparser_on_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws: Vec<Vec<f64>> = (0..1000)
        .map(|_| {
            let n = rng.gen_range(2..=64);
            (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect()
        })
        .collect();
    let mean_support = |a: f64| {
        let a = AlphaParam::new(a).unwrap();
        draws.iter().map(|z| transform(&lv(z), a).support().len() as f64).sum::<f64>() / draws.len() as f64
    };
    let means: Vec<f64> = ALPHAS.iter().map(|&a| mean_support(a)).collect();
    for w in means.windows(2) {
        assert!(w[1] <= w[0], "{means:?}");
    }
}
