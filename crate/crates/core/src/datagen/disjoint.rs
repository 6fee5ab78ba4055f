use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use hashbrown::HashSet;

use super::record::{Condition, DatasetRecord, Split};
use crate::token::join;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeakKind {
    /// An unknown-entity or out-of-domain record uses an entity seen in training.
    SeenEntity,
    /// An unknown-template or out-of-domain record uses a template seen in training.
    SeenTemplate,
    /// An out-of-domain record uses an in-domain task.
    InDomainTask,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leak {
    pub record_id: String,
    pub split: Split,
    pub kind: LeakKind,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DisjointnessReport {
    pub checked: usize,
    pub leaks: Vec<Leak>,
}

impl DisjointnessReport {
    pub fn ok(&self) -> bool {
        self.leaks.is_empty()
    }
}

/// Scans evaluation records against the training records' bindings and
/// template ids. Independent of how the records were generated.
pub fn verify_disjointness(records: &[DatasetRecord]) -> DisjointnessReport {
    let mut train_entities: HashSet<String> = HashSet::new();
    let mut train_templates: HashSet<&str> = HashSet::new();
    for r in records.iter().filter(|r| r.split == Split::Train) {
        train_templates.insert(&r.meta.request_template_id);
        train_templates.insert(&r.meta.correction_template_id);
        for b in &r.meta.bindings {
            train_entities.insert(join(&b.original));
            if let Some(rep) = &b.replacement {
                train_entities.insert(join(rep));
            }
        }
    }

    let mut report = DisjointnessReport::default();
    for r in records.iter().filter(|r| r.split != Split::Train) {
        report.checked += 1;
        let mut leak = |kind, detail: String| {
            report.leaks.push(Leak {
                record_id: r.id.clone(),
                split: r.split,
                kind,
                detail,
            })
        };
        let ood = r.split.condition() == Some(Condition::OutOfDomain);
        if r.split.uses_unknown_entities() || ood {
            for b in &r.meta.bindings {
                for e in core::iter::once(&b.original).chain(&b.replacement) {
                    let surface = join(e);
                    if train_entities.contains(&surface) {
                        leak(LeakKind::SeenEntity, format!("{}: {surface}", b.slot));
                    }
                }
            }
        }
        if r.split.uses_unknown_templates() || ood {
            for id in [&r.meta.request_template_id, &r.meta.correction_template_id] {
                if train_templates.contains(id.as_str()) {
                    leak(LeakKind::SeenTemplate, id.clone());
                }
            }
        }
        if ood && !r.meta.task.is_out_of_domain() {
            leak(LeakKind::InDomainTask, String::from(r.meta.task.as_str()));
        }
    }
    report
}
