use fyseq::decoding::{
    beam_search, cat_got_tongue_rate, empty_string_log_prob, exact_search, exact_search_with, ExactOptions,
};
use fyseq::model::{sequence_log_prob_of, ScoreModel, SequencePair, EOS};
use fyseq::tables::TableModel;
use fyseq::Error;
use proptest::prelude::*;

const V: usize = 6;
/// Logit that keeps PAD and BOS out of every sparse support.
const NEVER: f64 = -100.0;

/// Every complete sequence reachable with nonzero probability, by depth-first
/// enumeration of the support tree.
fn enumerate<M: ScoreModel>(model: &M, source: &[usize], max_len: usize) -> Vec<(Vec<usize>, f64)> {
    fn walk<M: ScoreModel>(
        model: &M,
        source: &[usize],
        prefix: &mut Vec<usize>,
        log_prob: f64,
        max_len: usize,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if prefix.len() == max_len {
            return;
        }
        let dist = model.distribution(source, prefix).unwrap();
        for t in 0..dist.len() {
            let p = dist.get(t);
            if p == 0.0 {
                continue;
            }
            prefix.push(t);
            if t == EOS {
                out.push((prefix.clone(), log_prob + p.ln()));
            } else {
                walk(model, source, prefix, log_prob + p.ln(), max_len, out);
            }
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    walk(model, source, &mut Vec::new(), 0.0, max_len, &mut out);
    out
}

fn oracle_best(all: &[(Vec<usize>, f64)]) -> (Vec<usize>, f64) {
    all.iter()
        .cloned()
        .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .unwrap()
}

fn row(eos: f64, rest: [f64; 3]) -> Vec<f64> {
    vec![NEVER, NEVER, eos, rest[0], rest[1], rest[2]]
}

/// Sparsemax table whose support tree has exactly seven complete hypotheses:
/// [3 3 EOS], [3 4 EOS], [3 EOS], [4 3 EOS], [4 4 EOS], [4 EOS], [EOS].
fn seven_leaf_table() -> TableModel {
    let mut t = TableModel::uniform(V, 2.0);
    t.set_default(row(10.0, [0.0, 0.0, 0.0]));
    t.set(&[], row(0.3, [0.6, 0.5, -5.0]));
    t.set(&[3], row(0.2, [0.7, 0.4, -5.0]));
    t.set(&[4], row(0.5, [0.4, 0.45, -5.0]));
    t
}

#[test]
fn seven_leaf_tree_is_fully_enumerated() {
    let t = seven_leaf_table();
    let oracle = enumerate(&t, &[], 10);
    assert_eq!(oracle.len(), 7);
    let result = exact_search(&t, &[], 10, 0.0).unwrap();
    assert_eq!(result.hypotheses.len(), 7);
    assert!((result.covered_mass.unwrap() - 1.0).abs() <= 1e-9);
    assert!(result.open_mass.unwrap().abs() <= 1e-9);
    assert!(!result.truncated);
    for h in &result.hypotheses {
        let (_, lp) = oracle.iter().find(|(seq, _)| seq == &h.tokens).expect("hypothesis in oracle");
        assert!((lp - h.log_prob).abs() <= 1e-12);
    }
    for w in result.hypotheses.windows(2) {
        assert!(w[0].log_prob >= w[1].log_prob);
    }
}

#[test]
fn greedy_follows_the_argmax_path() {
    let mut t = TableModel::uniform(V, 1.0);
    t.set_default(row(5.0, [0.0, 0.0, 0.0]));
    t.set(&[], row(0.0, [0.1, 2.0, 0.3]));
    t.set(&[4], row(0.0, [3.0, 0.2, 0.1]));
    t.set(&[4, 3], row(0.0, [0.0, 0.0, 1.5]));
    t.set(&[4, 3, 5], row(4.0, [0.0, 0.0, 0.0]));
    let mut prefix = Vec::new();
    loop {
        let d = t.distribution(&[], &prefix).unwrap();
        let next = d.argmax();
        prefix.push(next);
        if next == EOS {
            break;
        }
    }
    let greedy = beam_search(&t, &[], 1, 10).unwrap();
    assert_eq!(greedy.best().unwrap().tokens, prefix);
    assert_eq!(prefix, vec![4, 3, 5, EOS]);
}

#[test]
fn small_budget_on_softmax_truncates() {
    let t = TableModel::uniform(V, 1.0);
    let opts = ExactOptions { node_budget: 5, ..ExactOptions::new(20, 0.0) };
    match exact_search_with(&t, &[], opts) {
        Ok(r) => assert!(r.truncated),
        Err(e) => assert!(matches!(e, Error::BudgetExceeded(5))),
    }
}

#[test]
fn empty_string_rate_examples() {
    let sources: Vec<Vec<usize>> = vec![vec![3], vec![4], vec![5], vec![3, 4]];
    let dataset: Vec<SequencePair> = sources
        .iter()
        .map(|s| SequencePair::from_unterminated(s.clone(), vec![3]).unwrap())
        .collect();

    // First-step EOS is outside the sparse support everywhere.
    let mut never = TableModel::uniform(V, 2.0);
    never.set_default(row(10.0, [0.0, 0.0, 0.0]));
    never.set(&[], row(-5.0, [1.0, 0.0, 0.0]));
    assert_eq!(empty_string_log_prob(&never, &[3]).unwrap(), f64::NEG_INFINITY);
    assert_eq!(cat_got_tongue_rate(&never, &dataset, 5).unwrap(), 0.0);

    // A beam that keeps [EOS] can never be beaten by it, so these cases use
    // width 1 and a first-step lure.
    let mut always = TableModel::uniform(V, 1.0);
    always.set_default(row(0.0, [0.0, 0.0, 0.0]));
    always.set(&[], row(1.0, [1.2, -9.0, -9.0]));
    always.set(&[3], row(-9.0, [-9.0, 0.0, 0.0]));
    assert_eq!(cat_got_tongue_rate(&always, &dataset, 1).unwrap(), 100.0);

    // One offending source out of four.
    let mut mixed = never.clone();
    mixed.set_for_source(&[5], &[], row(1.0, [1.2, -5.0, -5.0]));
    mixed.set_for_source(&[5], &[3], row(0.0, [0.3, 0.3, 0.3]));
    mixed.set_for_source(&[5], &[3, 3], row(0.0, [0.3, 0.3, 0.3]));
    let offender = empty_string_log_prob(&mixed, &[5]).unwrap();
    let beam = beam_search(&mixed, &[5], 1, 10).unwrap();
    assert!(offender > beam.best().unwrap().log_prob);
    assert_eq!(cat_got_tongue_rate(&mixed, &dataset, 1).unwrap(), 25.0);
}

#[test]
fn hand_table_empty_string_probability() {
    // Softmax over [EOS, 3, 4, 5] with equal logits and PAD/BOS excluded: 1/4.
    let mut t = TableModel::uniform(V, 1.0);
    t.set_default(row(0.0, [0.0, 0.0, 0.0]).iter().map(|&v| if v == NEVER { f64::MIN / 4.0 } else { v }).collect());
    assert!((empty_string_log_prob(&t, &[3]).unwrap() - 0.25f64.ln()).abs() <= 1e-12);
}

/// Random sparse tables over prefixes up to length 2, EOS-only afterwards.
fn random_table() -> impl Strategy<Value = TableModel> {
    (prop::sample::select(vec![1.5, 2.0]), prop::collection::vec(-1.5..1.5f64, 4 * 13)).prop_map(|(alpha, vals)| {
        let mut t = TableModel::uniform(V, alpha);
        t.set_default(row(10.0, [0.0, 0.0, 0.0]));
        let mut prefixes: Vec<Vec<usize>> = vec![vec![]];
        for len in 1..=2 {
            let next: Vec<Vec<usize>> = prefixes
                .iter()
                .filter(|p| p.len() == len - 1)
                .flat_map(|p| (3..6).map(move |tok| [p.clone(), vec![tok]].concat()))
                .collect();
            prefixes.extend(next);
        }
        for (i, p) in prefixes.iter().enumerate() {
            let v = &vals[4 * i..4 * i + 4];
            t.set(p, row(v[0], [v[1], v[2], v[3]]));
        }
        t
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn exact_search_matches_enumeration(t in random_table()) {
        let oracle = enumerate(&t, &[], 8);
        let result = exact_search(&t, &[], 8, 0.0).unwrap();
        prop_assert_eq!(result.hypotheses.len(), oracle.len());
        prop_assert!((result.covered_mass.unwrap() - 1.0).abs() <= 1e-9);
        prop_assert!((result.covered_mass.unwrap() + result.open_mass.unwrap() - 1.0).abs() <= 1e-6);
        let (best, best_lp) = oracle_best(&oracle);
        prop_assert_eq!(&result.best().unwrap().tokens, &best);
        prop_assert!((result.best().unwrap().log_prob - best_lp).abs() <= 1e-12);
    }

    #[test]
    fn wide_beam_equals_exact_argmax(t in random_table()) {
        let oracle = enumerate(&t, &[], 8);
        let exact = exact_search(&t, &[], 8, 0.0).unwrap();
        let beam = beam_search(&t, &[], oracle.len(), 8).unwrap();
        prop_assert_eq!(&beam.best().unwrap().tokens, &exact.best().unwrap().tokens);
    }

    #[test]
    fn exact_dominates_every_beam(t in random_table(), width in 1usize..6) {
        let exact = exact_search(&t, &[], 8, 0.0).unwrap();
        let beam = beam_search(&t, &[], width, 8).unwrap();
        prop_assert!(exact.best().unwrap().log_prob >= beam.best().unwrap().log_prob - 1e-12);
    }

    #[test]
    fn stored_scores_are_recomputable(t in random_table(), width in 1usize..6) {
        let beam = beam_search(&t, &[], width, 8).unwrap();
        let exact = exact_search(&t, &[], 8, 0.0).unwrap();
        for h in beam.hypotheses.iter().chain(&exact.hypotheses) {
            prop_assert!(h.complete && h.tokens.last() == Some(&EOS));
            prop_assert!(h.log_prob <= 1e-12 && h.log_prob.is_finite());
            let again = sequence_log_prob_of(&t, &[], &h.tokens).unwrap();
            prop_assert!((again - h.log_prob).abs() <= 1e-9);
        }
    }
}

/// Like [`random_table`] one level deeper.
fn deep_table() -> impl Strategy<Value = TableModel> {
    (prop::sample::select(vec![1.5, 2.0]), prop::collection::vec(-2.0..2.0f64, 4 * 40)).prop_map(|(alpha, vals)| {
        let mut t = TableModel::uniform(V, alpha);
        t.set_default(row(10.0, [0.0, 0.0, 0.0]));
        let mut prefixes: Vec<Vec<usize>> = vec![vec![]];
        for len in 1..=3 {
            let next: Vec<Vec<usize>> = prefixes
                .iter()
                .filter(|p| p.len() == len - 1)
                .flat_map(|p| (3..6).map(move |tok| [p.clone(), vec![tok]].concat()))
                .collect();
            prefixes.extend(next);
        }
        for (i, p) in prefixes.iter().enumerate() {
            let v = &vals[4 * i..4 * i + 4];
            t.set(p, row(v[0], [v[1], v[2], v[3]]));
        }
        t
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn widening_the_beam_on_random_tables(t in deep_table(), width in 1usize..5) {
        let narrow = beam_search(&t, &[], width, 8).unwrap();
        let wide = beam_search(&t, &[], width + 1, 8).unwrap();
        prop_assert!(wide.best().unwrap().log_prob >= narrow.best().unwrap().log_prob - 1e-12);
    }
}

/// Monotonicity in the width is not a theorem: a wider beam can be pulled into a
/// branch whose continuations all spread their mass.
#[test]
fn widening_the_beam_can_lower_the_score() {
    let ln = f64::ln;
    let mut t = TableModel::uniform(V, 1.0);
    t.set_default(row(10.0, [NEVER, NEVER, NEVER]));
    t.set(&[], row(ln(0.05), [ln(0.5), ln(0.45), NEVER]));
    t.set(&[3], row(NEVER, [0.0, 0.0, 0.0]));
    t.set(&[4], row(NEVER, [ln(0.51), ln(0.49), NEVER]));
    for p in [[4, 3], [4, 4]] {
        t.set(&p, row(NEVER, [0.0, 0.0, 0.0]));
    }
    let greedy = beam_search(&t, &[], 1, 8).unwrap();
    let wide = beam_search(&t, &[], 2, 8).unwrap();
    assert_eq!(greedy.best().unwrap().tokens, vec![3, 3, EOS]);
    assert!((greedy.best().unwrap().log_prob - ln(0.5 / 3.0)).abs() < 1e-6);
    assert_eq!(wide.best().unwrap().tokens.len(), 4);
    assert!(wide.best().unwrap().log_prob < greedy.best().unwrap().log_prob);
    // The exact search still finds the greedy path.
    let exact = exact_search(&t, &[], 8, 0.0).unwrap();
    assert_eq!(exact.best().unwrap().tokens, vec![3, 3, EOS]);
}
