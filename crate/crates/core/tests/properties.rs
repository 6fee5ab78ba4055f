use corrkit_core::tagger::repair_labels;
use corrkit_core::validate::validate_labels;
use corrkit_core::{extract_pairs, join, merge, tokenize, LabelTag, TaggedPair};
use proptest::prelude::*;

use LabelTag::*;

fn any_label() -> impl Strategy<Value = LabelTag> {
    prop::sample::select(LabelTag::ALL.to_vec())
}

/// Random labels with a boundary inside the sequence.
fn any_sequence() -> impl Strategy<Value = (Vec<LabelTag>, usize)> {
    (1usize..10, 0usize..10)
        .prop_flat_map(|(req, corr)| (prop::collection::vec(any_label(), req + corr), Just(req)))
}

/// A label sequence that satisfies every rule, built from random choices.
fn valid_sequence() -> impl Strategy<Value = (Vec<LabelTag>, usize)> {
    (
        0usize..=2,
        prop::collection::vec(0usize..4, 8),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(slots, n, s2_first, all_d)| {
            let mut request = vec![C; n[0]];
            for k in 0..slots {
                request.extend(vec![LabelTag::reparandum(k as u8 + 1); n[1 + k] + 1]);
                request.extend(vec![C; n[3 + k]]);
            }
            if request.is_empty() {
                request.push(C);
            }
            let mut correction = Vec::new();
            if slots == 0 {
                let fill = if all_d { D } else { C };
                correction.extend(vec![fill; n[5]]);
            } else {
                let mut order: Vec<u8> = (1..=slots as u8).collect();
                if s2_first {
                    order.reverse();
                }
                correction.extend(vec![D; n[5]]);
                for (i, k) in order.into_iter().enumerate() {
                    correction.extend(vec![LabelTag::repair(k); n[6 + i % 2] % 3 + 1]);
                    correction.extend(vec![D; n[7 - i % 2] % 2]);
                }
            }
            let boundary = request.len();
            request.extend(correction);
            (request, boundary)
        })
}

fn words(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn repair_output_validates((labels, boundary) in any_sequence()) {
        let fixed = repair_labels(&labels, boundary);
        prop_assert_eq!(fixed.len(), labels.len());
        let report = validate_labels(&fixed, boundary);
        prop_assert!(report.ok(), "{:?} -> {:?}: {:?}", labels, fixed, report);
    }

    #[test]
    fn repair_is_idempotent((labels, boundary) in any_sequence()) {
        let once = repair_labels(&labels, boundary);
        prop_assert_eq!(repair_labels(&once, boundary), once);
    }

    #[test]
    fn valid_sequences_are_fixpoints((labels, boundary) in valid_sequence()) {
        prop_assert!(validate_labels(&labels, boundary).ok(), "{:?}", labels);
        prop_assert_eq!(repair_labels(&labels, boundary), labels);
    }

    #[test]
    fn merge_conserves_tokens((labels, boundary) in valid_sequence()) {
        let w = words(labels.len());
        let pair = TaggedPair::new(&w[..boundary], &w[boundary..], labels.clone()).unwrap();
        let out = merge(&pair).unwrap();
        let kept = labels[..boundary].iter().filter(|l| **l == C).count();
        let repairs = labels[boundary..].iter().filter(|l| l.is_repair()).count();
        prop_assert_eq!(out.corrected_tokens.len(), kept + repairs);
        let slots = labels.iter().filter(|l| l.is_reparandum()).map(|l| l.slot()).collect::<std::collections::BTreeSet<_>>();
        prop_assert_eq!(out.pairs.len(), slots.len());
        prop_assert_eq!(extract_pairs(&pair).unwrap(), out.pairs.clone());
        for (i, t) in out.corrected_tokens.iter().enumerate() {
            prop_assert_eq!(t.index, i);
        }
    }

    #[test]
    fn merge_without_entities_is_deletion(
        request in prop::collection::vec(prop::sample::select(vec![C, D]), 1..8),
        fill in prop::sample::select(vec![C, D]),
        corr_len in 0usize..5,
    ) {
        let boundary = request.len();
        let mut labels = request;
        labels.extend(vec![fill; corr_len]);
        let w = words(labels.len());
        let pair = TaggedPair::new(&w[..boundary], &w[boundary..], labels.clone()).unwrap();
        let expected: Vec<&str> = w[..boundary]
            .iter()
            .zip(&labels)
            .filter(|(_, l)| **l == C)
            .map(|(w, _)| w.as_str())
            .collect();
        prop_assert_eq!(merge(&pair).unwrap().corrected_text(), expected.join(" "));
        prop_assert!(merge(&pair).unwrap().pairs.is_empty());
    }

    #[test]
    fn tokenize_is_idempotent(text in "[a-zA-Z ,.?!']{0,40}", lower in any::<bool>()) {
        let once = tokenize(&text, lower);
        let twice = tokenize(&join(&once), lower);
        prop_assert_eq!(twice, once);
    }
}

#[test]
fn ten_thousand_random_sequences_repair_cleanly() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::{Config, TestRunner};
    let mut runner = TestRunner::new_with_rng(
        Config::default(),
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    );
    let strategy = any_sequence();
    for _ in 0..10_000 {
        let (labels, boundary) = strategy.new_tree(&mut runner).unwrap().current();
        let fixed = repair_labels(&labels, boundary);
        assert!(validate_labels(&fixed, boundary).ok(), "{labels:?}");
        assert_eq!(repair_labels(&fixed, boundary), fixed);
    }
}

#[test]
fn empty_correction_boundary_at_end() {
    let labels = [C, R1, C];
    assert_eq!(repair_labels(&labels, 3), vec![C, C, C]);
    assert!(validate_labels(&[C, C, C], 3).ok());
}
