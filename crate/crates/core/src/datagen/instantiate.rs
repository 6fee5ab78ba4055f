use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::lexicon::Entity;
use super::record::{DatasetRecord, RecordMeta, SlotBinding, Split};
use super::template::{PatternPart, SlotName, Task, Template, TemplateKind};
use crate::label::LabelTag;
use crate::merge::{merge, MergeError};
use crate::pair::{PairError, TaggedPair};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub original: Entity,
    pub replacement: Option<Entity>,
}

impl Binding {
    pub fn kept(original: Entity) -> Self {
        Binding {
            original,
            replacement: None,
        }
    }

    pub fn replaced(original: Entity, replacement: Entity) -> Self {
        Binding {
            original,
            replacement: Some(replacement),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InstantiateError {
    #[error("template {0} has the wrong kind")]
    WrongKind(String),
    #[error("request task {request} does not match correction task {correction}")]
    TaskMismatch { request: Task, correction: Task },
    #[error("correction corrects {0}, which the request does not contain")]
    SlotMismatch(SlotName),
    #[error("no binding for slot {0}")]
    MissingBinding(SlotName),
    #[error("no replacement for corrected slot {0}")]
    MissingReplacement(SlotName),
    #[error("empty entity for slot {0}")]
    EmptyEntity(SlotName),
    #[error("replacement for {0} equals the original")]
    IdentityReplacement(SlotName),
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Merge(#[from] MergeError),
}

/// Fills a request/correction template pair and derives the gold labels:
/// request literals and uncorrected slots get `C`, corrected originals get
/// `R1`/`R2` in request order, correction literals get `D` and each
/// replacement gets the `S` label of its slot. Both gold targets come from
/// merging those labels.
pub fn instantiate(
    request: &Template,
    correction: &Template,
    bindings: &BTreeMap<SlotName, Binding>,
    allow_identity: bool,
    id: String,
    split: Split,
) -> Result<DatasetRecord, InstantiateError> {
    if request.kind != TemplateKind::Request {
        return Err(InstantiateError::WrongKind(request.id.clone()));
    }
    if correction.kind != TemplateKind::Correction {
        return Err(InstantiateError::WrongKind(correction.id.clone()));
    }
    if request.task != correction.task {
        return Err(InstantiateError::TaskMismatch {
            request: request.task,
            correction: correction.task,
        });
    }
    let request_slots = request.placeholders();
    if let Some(s) = correction
        .corrected_slots
        .iter()
        .find(|s| !request_slots.contains(s))
    {
        return Err(InstantiateError::SlotMismatch(*s));
    }

    // slot numbers follow the request order of the corrected slots
    let mut slot_number: BTreeMap<SlotName, u8> = BTreeMap::new();
    for s in &request_slots {
        if correction.corrected_slots.contains(s) {
            let n = slot_number.len() as u8 + 1;
            slot_number.insert(*s, n);
        }
    }

    let mut meta_bindings = Vec::with_capacity(request_slots.len());
    for s in &request_slots {
        let b = bindings
            .get(s)
            .ok_or(InstantiateError::MissingBinding(*s))?;
        if b.original.is_empty() {
            return Err(InstantiateError::EmptyEntity(*s));
        }
        let replacement = if slot_number.contains_key(s) {
            let r = b
                .replacement
                .as_ref()
                .ok_or(InstantiateError::MissingReplacement(*s))?;
            if r.is_empty() {
                return Err(InstantiateError::EmptyEntity(*s));
            }
            if !allow_identity && *r == b.original {
                return Err(InstantiateError::IdentityReplacement(*s));
            }
            Some(r.clone())
        } else {
            None
        };
        meta_bindings.push(SlotBinding {
            slot: *s,
            original: b.original.clone(),
            replacement,
        });
    }
    let binding_of = |s: SlotName| meta_bindings.iter().find(|b| b.slot == s);

    let mut req_words: Vec<&str> = Vec::new();
    let mut labels: Vec<LabelTag> = Vec::new();
    for part in &request.parts {
        match part {
            PatternPart::Literal(w) => {
                req_words.push(w);
                labels.push(LabelTag::C);
            }
            PatternPart::Slot(s) => {
                let b = binding_of(*s).ok_or(InstantiateError::MissingBinding(*s))?;
                let label = slot_number
                    .get(s)
                    .map_or(LabelTag::C, |&k| LabelTag::reparandum(k));
                for w in &b.original {
                    req_words.push(w);
                    labels.push(label);
                }
            }
        }
    }
    let mut corr_words: Vec<&str> = Vec::new();
    for part in &correction.parts {
        match part {
            PatternPart::Literal(w) => {
                corr_words.push(w);
                labels.push(LabelTag::D);
            }
            PatternPart::Slot(s) => {
                let b = binding_of(*s).ok_or(InstantiateError::MissingBinding(*s))?;
                let label = LabelTag::repair(slot_number[s]);
                for w in b.replacement.iter().flatten() {
                    corr_words.push(w);
                    labels.push(label);
                }
            }
        }
    }

    let tagged = TaggedPair::new(&req_words, &corr_words, labels)?;
    let gold = merge(&tagged)?;
    Ok(DatasetRecord {
        id,
        split,
        tagged,
        gold_corrected: gold.corrected_tokens,
        gold_pairs: gold.pairs,
        meta: RecordMeta {
            task: request.task,
            request_template_id: request.id.clone(),
            correction_template_id: correction.id.clone(),
            bindings: meta_bindings,
        },
    })
}
