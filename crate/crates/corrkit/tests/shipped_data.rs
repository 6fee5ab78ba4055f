use std::collections::BTreeSet;

use corrkit::data::{default_lexicon, default_templates};
use corrkit_core::datagen::{
    combination_count, instantiate, Binding, GenerationConfig, SlotName, Split, Task, Tier,
};
use corrkit_core::merge;

#[test]
fn seen_space_exceeds_training_size() {
    let set = default_templates();
    let lex = default_lexicon();
    let seen = combination_count(&set.train, &lex, Tier::Train, false);
    assert!(
        seen >= GenerationConfig::DEFAULT_TRAIN_SIZE as u64 + 10_000,
        "{seen}"
    );
}

#[test]
fn evaluation_spaces_cover_requested_sizes() {
    let set = default_templates();
    let lex = default_lexicon();
    let cfg = GenerationConfig::default();
    let both: Vec<_> = set.unknown.clone();
    let spaces = [
        (
            Split::TestUnknownEntities,
            combination_count(&set.train, &lex, Tier::Unknown, false),
        ),
        (
            Split::TestUnknownTemplates,
            combination_count(&set.unknown, &lex, Tier::Train, false),
        ),
        (
            Split::TestUnknownBoth,
            combination_count(&both, &lex, Tier::Unknown, false),
        ),
        (
            Split::TestOod,
            combination_count(&set.ood, &lex, Tier::Ood, false),
        ),
    ];
    for (i, (split, n)) in spaces.into_iter().enumerate() {
        let need = cfg.test_sizes[i] + cfg.val_sizes[i];
        assert!(
            n as usize >= need * 2,
            "{split}: {n} combinations for {need} records"
        );
    }
}

#[test]
fn correction_varieties_are_covered() {
    let set = default_templates();
    let corrections: Vec<_> = set
        .train
        .iter()
        .filter(|t| !t.corrected_slots.is_empty())
        .collect();
    let kinds: BTreeSet<Vec<SlotName>> = corrections
        .iter()
        .map(|t| t.corrected_slots.clone())
        .collect();
    for want in [
        vec![SlotName::Object],
        vec![SlotName::Location],
        vec![SlotName::Object, SlotName::Location],
        vec![SlotName::Recipe],
    ] {
        assert!(kinds.contains(&want), "no correction of {want:?}");
    }
    let openers: BTreeSet<&str> = corrections
        .iter()
        .filter_map(|t| t.interregnum_tokens().first().copied())
        .collect();
    assert!(openers.len() >= 6, "{openers:?}");
    let ood_tasks: BTreeSet<Task> = set.ood.iter().map(|t| t.task).collect();
    assert_eq!(ood_tasks, BTreeSet::from([Task::Buy, Task::Attach]));
}

#[test]
fn every_template_pair_instantiates_and_merges() {
    let set = default_templates();
    let lex = default_lexicon();
    for (group, tier) in [
        (&set.train, Tier::Train),
        (&set.unknown, Tier::Unknown),
        (&set.ood, Tier::Ood),
    ] {
        let requests: Vec<_> = group
            .iter()
            .filter(|t| t.corrected_slots.is_empty())
            .collect();
        let corrections: Vec<_> = group
            .iter()
            .filter(|t| !t.corrected_slots.is_empty())
            .collect();
        let mut used = 0;
        for r in &requests {
            for c in corrections.iter().filter(|c| c.task == r.task) {
                let slots = r.placeholders();
                if !c.corrected_slots.iter().all(|s| slots.contains(s)) {
                    continue;
                }
                let bindings = slots
                    .iter()
                    .map(|s| {
                        let pool = lex.entities(*s, tier);
                        let b = if c.corrected_slots.contains(s) {
                            Binding::replaced(pool[0].clone(), pool[1].clone())
                        } else {
                            Binding::kept(pool[0].clone())
                        };
                        (*s, b)
                    })
                    .collect();
                let rec = instantiate(r, c, &bindings, false, "x".into(), Split::Train).unwrap();
                assert!(rec.gold_round_trips().unwrap(), "{} + {}", r.id, c.id);
                let out = merge(&rec.tagged).unwrap();
                assert_eq!(out.pairs.len(), c.corrected_slots.len());
                used += 1;
            }
        }
        assert!(used > 0);
    }
}

#[test]
fn train_entities_never_reappear_in_other_tiers() {
    let lex = default_lexicon();
    let surfaces = |tier| -> BTreeSet<String> {
        SlotName::ALL
            .iter()
            .flat_map(|&slot| lex.entities(slot, tier))
            .map(|e| e.join(" "))
            .collect()
    };
    let train = surfaces(Tier::Train);
    for tier in [Tier::Unknown, Tier::Ood] {
        let shared: Vec<_> = surfaces(tier).intersection(&train).cloned().collect();
        assert!(shared.is_empty(), "{tier}: {shared:?}");
    }
}
