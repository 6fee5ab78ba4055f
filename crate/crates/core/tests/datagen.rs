use corrkit_core::datagen::{
    combination_count, generate, verify_disjointness, Condition, DatasetRecord, GenerateError,
    GenerationConfig, LeakKind, Lexicon, Partition, SlotName, Split, Task, Template, TemplateKind,
    TemplateSet, Tier,
};
use corrkit_core::eval::{evaluate, GoldLabels};
use rand::seq::SliceRandom;
use rand::SeedableRng;

use SlotName::*;
use TemplateKind::*;

fn t(id: &str, kind: TemplateKind, task: Task, pattern: &str, slots: &[SlotName]) -> Template {
    Template::new(id, kind, task, pattern, slots.to_vec()).unwrap()
}

fn corpus() -> (TemplateSet, Lexicon) {
    let train = vec![
        t(
            "r1",
            Request,
            Task::Bring,
            "put the {object} into the {location}",
            &[],
        ),
        t(
            "r2",
            Request,
            Task::Bring,
            "the {location} is where the {object} goes",
            &[],
        ),
        t("r3", Request, Task::Cook, "cook {recipe} for me", &[]),
        t("c1", Correction, Task::Bring, "no the {object}", &[Object]),
        t(
            "c2",
            Correction,
            Task::Bring,
            "sorry into the {location}",
            &[Location],
        ),
        t(
            "c3",
            Correction,
            Task::Bring,
            "no the {object} into the {location}",
            &[Object, Location],
        ),
        t("c4", Correction, Task::Cook, "no {recipe}", &[Recipe]),
    ];
    let unknown = vec![
        t(
            "u1",
            Request,
            Task::Bring,
            "please bring the {object} to the {location}",
            &[],
        ),
        t(
            "u2",
            Correction,
            Task::Bring,
            "i meant the {object}",
            &[Object],
        ),
        t(
            "u3",
            Correction,
            Task::Bring,
            "wrong place the {location}",
            &[Location],
        ),
    ];
    let ood = vec![
        t("o1", Request, Task::Buy, "buy some {product} please", &[]),
        t(
            "o2",
            Correction,
            Task::Buy,
            "no make that {product}",
            &[Product],
        ),
        t(
            "o3",
            Request,
            Task::Attach,
            "stick the {attach_object} on the {attach_location}",
            &[],
        ),
        t(
            "o4",
            Correction,
            Task::Attach,
            "no the {attach_object}",
            &[AttachObject],
        ),
    ];
    let mut lex = Lexicon::new();
    lex.extend(
        Object,
        Tier::Train,
        ["knives", "forks", "cutting board", "cups", "plates"],
    )
    .unwrap();
    lex.extend(Object, Tier::Unknown, ["whisk", "ladle", "egg cups"])
        .unwrap();
    lex.extend(
        Location,
        Tier::Train,
        ["drawer", "sink", "top shelf", "table"],
    )
    .unwrap();
    lex.extend(
        Location,
        Tier::Unknown,
        ["pantry", "serving cart", "island"],
    )
    .unwrap();
    lex.extend(Recipe, Tier::Train, ["rice", "curry rice", "pasta"])
        .unwrap();
    lex.extend(Recipe, Tier::Unknown, ["risotto", "ramen"])
        .unwrap();
    lex.extend(
        Product,
        Tier::Ood,
        ["milk", "bread", "oat milk", "eggs", "cheese"],
    )
    .unwrap();
    lex.extend(AttachObject, Tier::Ood, ["poster", "note"])
        .unwrap();
    lex.extend(AttachLocation, Tier::Ood, ["wall", "fridge door"])
        .unwrap();
    (TemplateSet::new(train, unknown, ood).unwrap(), lex)
}

fn config() -> GenerationConfig {
    GenerationConfig {
        seed: 11,
        train_size: 150,
        val_sizes: [5, 5, 5, 5],
        test_sizes: [10, 10, 8, 8],
        dedup: true,
        allow_identity: false,
    }
}

fn dataset() -> Vec<DatasetRecord> {
    let (set, lex) = corpus();
    generate(&set, &lex, &config()).unwrap()
}

#[test]
fn counts_order_and_ids() {
    let records = dataset();
    let cfg = config();
    for split in Split::ALL {
        let n = records.iter().filter(|r| r.split == split).count();
        assert_eq!(n, cfg.size_of(split), "{split}");
    }
    let partitions: Vec<Partition> = records.iter().map(|r| r.split.partition()).collect();
    let mut sorted = partitions.clone();
    sorted.sort();
    assert_eq!(partitions, sorted, "train, then validation, then test");
    let first = &records[0];
    assert_eq!(first.id, "train-000000");
    let mut ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), records.len());
}

#[test]
fn every_record_round_trips_and_deduplicates() {
    let records = dataset();
    let mut texts = std::collections::HashSet::new();
    for r in &records {
        assert!(r.gold_round_trips().unwrap(), "{}", r.id);
        assert!(
            texts.insert(r.tagged.words().join(" ")),
            "duplicate {}",
            r.id
        );
    }
}

#[test]
fn splits_are_disjoint() {
    let records = dataset();
    let report = verify_disjointness(&records);
    assert!(report.ok(), "{:?}", report.leaks);
    assert_eq!(report.checked, records.len() - config().train_size);
    for r in records
        .iter()
        .filter(|r| r.split.condition() == Some(Condition::OutOfDomain))
    {
        assert!(r.meta.task.is_out_of_domain());
    }
}

#[test]
fn corruptions_are_caught() {
    let mut records = dataset();
    let train_entity = records[0].meta.bindings[0].original.clone();
    let train_template = records[0].meta.request_template_id.clone();

    let ue = records
        .iter()
        .position(|r| r.split == Split::TestUnknownEntities)
        .unwrap();
    records[ue].meta.bindings[0].original = train_entity;
    let ut = records
        .iter()
        .position(|r| r.split == Split::ValUnknownTemplates)
        .unwrap();
    records[ut].meta.correction_template_id = train_template;
    let ood = records
        .iter()
        .position(|r| r.split == Split::TestOod)
        .unwrap();
    records[ood].meta.task = Task::Cook;

    let report = verify_disjointness(&records);
    let kinds: Vec<(String, LeakKind)> = report
        .leaks
        .iter()
        .map(|l| (l.record_id.clone(), l.kind))
        .collect();
    assert_eq!(
        kinds,
        vec![
            (records[ut].id.clone(), LeakKind::SeenTemplate),
            (records[ue].id.clone(), LeakKind::SeenEntity),
            (records[ood].id.clone(), LeakKind::InDomainTask),
        ]
    );
}

#[test]
fn ood_records_with_seen_entities_are_caught() {
    let mut records = dataset();
    let train_entity = records[0].meta.bindings[0].original.clone();
    let ood = records
        .iter()
        .position(|r| r.split == Split::ValOod)
        .unwrap();
    records[ood].meta.bindings[0].original = train_entity;
    let report = verify_disjointness(&records);
    assert_eq!(report.leaks.len(), 1);
    assert_eq!(report.leaks[0].record_id, records[ood].id);
    assert_eq!(report.leaks[0].kind, LeakKind::SeenEntity);
}

#[test]
fn generation_is_deterministic_and_seed_sensitive() {
    let (set, lex) = corpus();
    let a = generate(&set, &lex, &config()).unwrap();
    let b = generate(&set, &lex, &config()).unwrap();
    assert_eq!(a, b);
    let c = generate(
        &set,
        &lex,
        &GenerationConfig {
            seed: 12,
            ..config()
        },
    )
    .unwrap();
    assert_ne!(a, c);
}

#[test]
fn oversized_request_is_refused() {
    let (set, lex) = corpus();
    let available = combination_count(&set.ood, &lex, Tier::Ood, false) as usize;
    let cfg = GenerationConfig {
        test_sizes: [10, 10, 8, available + 1],
        ..config()
    };
    match generate(&set, &lex, &cfg) {
        Err(GenerateError::InsufficientCombinations {
            split, requested, ..
        }) => {
            assert_eq!(split, Split::TestOod);
            assert_eq!(requested, available + 1);
        }
        other => panic!("expected InsufficientCombinations, got {other:?}"),
    }
}

#[test]
fn scoring_ignores_record_order() {
    let records = dataset();
    let before = evaluate(&records, GoldLabels, false).unwrap();
    let mut shuffled = records.clone();
    shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(5));
    let after = evaluate(&shuffled, GoldLabels, false).unwrap();
    assert_eq!(before.splits, after.splits);
    assert_eq!(before.overall(), after.overall());
    assert_eq!(before.overall().accuracy(), Some(1.0));
}
