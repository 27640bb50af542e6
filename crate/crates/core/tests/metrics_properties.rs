use fyseq::metrics::{
    forced_predictions, levenshtein, support_density, CalibrationBin, CalibrationReport, DensityReport, Prediction,
};
use fyseq::model::SequencePair;
use fyseq::tables::TableModel;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_strings(alphabet: usize, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s: &Vec<u8>| (0..alphabet as u8).map(move |c| [s.clone(), vec![c]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Textbook recursion, no memoization.
fn recursive_distance(a: &[u8], b: &[u8]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let substitute = recursive_distance(ra, rb) + usize::from(x != y);
            let delete = recursive_distance(ra, b) + 1;
            let insert = recursive_distance(a, rb) + 1;
            substitute.min(delete).min(insert)
        }
    }
}

#[test]
fn levenshtein_matches_recursive_oracle() {
    let strings = all_strings(3, 4);
    assert_eq!(strings.len(), 121);
    for a in &strings {
        for b in &strings {
            assert_eq!(levenshtein(a, b), recursive_distance(a, b), "{a:?} {b:?}");
        }
    }
}

#[test]
fn levenshtein_is_a_metric() {
    let strings = all_strings(3, 5);
    for a in &strings {
        assert_eq!(levenshtein(a, a), 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200_000 {
        let a = strings.choose(&mut rng).unwrap();
        let b = strings.choose(&mut rng).unwrap();
        let c = strings.choose(&mut rng).unwrap();
        let ab = levenshtein(a, b);
        assert_eq!(ab, levenshtein(b, a));
        assert_eq!(ab == 0, a == b);
        assert!(levenshtein(a, c) <= ab + levenshtein(b, c));
    }
}

fn predictions() -> impl Strategy<Value = Vec<Prediction>> {
    prop::collection::vec(
        (0.0..=1.0f64, any::<bool>()).prop_map(|(confidence, correct)| Prediction { confidence, correct }),
        1..200,
    )
}

proptest! {
    #[test]
    fn ece_ignores_order(preds in predictions(), seed in any::<u64>(), bins in 1usize..20) {
        let mut shuffled = preds.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = CalibrationReport::from_predictions(&preds, bins).unwrap();
        let b = CalibrationReport::from_predictions(&shuffled, bins).unwrap();
        prop_assert!((a.ece - b.ece).abs() <= 1e-12);
        prop_assert!((a.recompute() - a.ece).abs() <= 1e-12);
        prop_assert_eq!(a.total(), preds.len());
    }

    #[test]
    fn merged_ece_lies_between_bin_bounds(a in predictions(), b in predictions()) {
        let bins = 10;
        let ra = CalibrationReport::from_predictions(&a, bins).unwrap();
        let rb = CalibrationReport::from_predictions(&b, bins).unwrap();
        let merged: Vec<Prediction> = a.iter().chain(&b).copied().collect();
        let rm = CalibrationReport::from_predictions(&merged, bins).unwrap();

        // Rebuild the merged bins from the parts.
        let n = (a.len() + b.len()) as f64;
        let mut lower = 0.0;
        for ((x, y), m) in ra.bins.iter().zip(&rb.bins).zip(&rm.bins) {
            prop_assert_eq!(m.count, x.count + y.count);
            if m.count == 0 {
                continue;
            }
            let weighted = |f: fn(&CalibrationBin) -> f64| {
                (x.count as f64 * f(x) + y.count as f64 * f(y)) / m.count as f64
            };
            prop_assert!((m.mean_confidence - weighted(|c| c.mean_confidence)).abs() <= 1e-12);
            prop_assert!((m.accuracy - weighted(|c| c.accuracy)).abs() <= 1e-12);
            let gap_x = x.count as f64 * (x.accuracy - x.mean_confidence).abs();
            let gap_y = y.count as f64 * (y.accuracy - y.mean_confidence).abs();
            lower += (gap_x - gap_y).abs() / n;
        }
        let upper = (a.len() as f64 * ra.ece + b.len() as f64 * rb.ece) / n;
        prop_assert!(rm.ece <= upper + 1e-12);
        prop_assert!(rm.ece >= lower - 1e-12);
    }
}

#[test]
fn ece_recompute_is_exact_on_random_reports() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..1000 {
        let n = rng.gen_range(1..500);
        let preds: Vec<Prediction> = (0..n)
            .map(|_| Prediction {
                confidence: rng.gen_range(0.0..=1.0),
                correct: rng.gen_bool(0.6),
            })
            .collect();
        let r = CalibrationReport::from_predictions(&preds, 10).unwrap();
        assert!((r.recompute() - r.ece).abs() <= 1e-12);
    }
}

fn pairs(targets: &[&[usize]]) -> Vec<SequencePair> {
    targets
        .iter()
        .map(|t| SequencePair::from_unterminated(vec![3], t.to_vec()).unwrap())
        .collect()
}

#[test]
fn density_examples() {
    // Supports of size 2 and 3 over ten entries.
    let r = DensityReport::from_support_sizes(vec![vec![2, 3]], 10).unwrap();
    assert_eq!(r.mean_support_percentage, 25.0);

    let mut sparse = TableModel::uniform(10, 2.0);
    let mut wide = vec![-50.0; 10];
    wide[2] = 1.0;
    wide[5] = 1.0;
    wide[6] = 1.0;
    let mut narrow = vec![-50.0; 10];
    narrow[5] = 1.0;
    narrow[6] = 1.0;
    sparse.set_default(wide).set(&[], narrow);
    let data = pairs(&[&[5]]);
    let r = support_density(&sparse, &data).unwrap();
    assert_eq!(r.support_sizes, vec![vec![2, 3]]);
    assert_eq!(r.mean_support_percentage, 25.0);

    let doubled: Vec<SequencePair> = data.iter().chain(&data).cloned().collect();
    assert_eq!(support_density(&sparse, &doubled).unwrap().mean_support_percentage, 25.0);

    let dense = TableModel::uniform(10, 1.0);
    assert_eq!(support_density(&dense, &data).unwrap().mean_support_percentage, 100.0);
}

#[test]
fn argmax_ties_resolve_to_lowest_index() {
    let mut t = TableModel::uniform(6, 1.0);
    t.set(&[], vec![0.0, 0.0, 0.0, 2.0, 2.0, 0.0]);
    t.set(&[4], vec![0.0, 0.0, 5.0, 0.0, 0.0, 0.0]);
    let preds = forced_predictions(&t, &pairs(&[&[4]])).unwrap();
    assert!(!preds[0].correct, "tie goes to token 3, gold is 4");
    assert!(preds[1].correct);
    let preds = forced_predictions(&t, &pairs(&[&[3]])).unwrap();
    assert!(preds[0].correct);
}
