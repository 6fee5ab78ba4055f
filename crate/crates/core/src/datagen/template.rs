use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use hashbrown::HashSet;

use crate::token::tokenize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotName {
    Object,
    Location,
    Recipe,
    Product,
    AttachObject,
    AttachLocation,
}

impl SlotName {
    pub const ALL: [SlotName; 6] = [
        SlotName::Object,
        SlotName::Location,
        SlotName::Recipe,
        SlotName::Product,
        SlotName::AttachObject,
        SlotName::AttachLocation,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            SlotName::Object => "object",
            SlotName::Location => "location",
            SlotName::Recipe => "recipe",
            SlotName::Product => "product",
            SlotName::AttachObject => "attach_object",
            SlotName::AttachLocation => "attach_location",
        }
    }

    pub const fn task(self) -> Task {
        match self {
            SlotName::Object | SlotName::Location => Task::Bring,
            SlotName::Recipe => Task::Cook,
            SlotName::Product => Task::Buy,
            SlotName::AttachObject | SlotName::AttachLocation => Task::Attach,
        }
    }
}

impl fmt::Display for SlotName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlotName {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SlotName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| SchemaError::UnknownSlot(s.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    Bring,
    Cook,
    Buy,
    Attach,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Bring, Task::Cook, Task::Buy, Task::Attach];

    pub const fn as_str(self) -> &'static str {
        match self {
            Task::Bring => "bring",
            Task::Cook => "cook",
            Task::Buy => "buy",
            Task::Attach => "attach",
        }
    }

    /// Tasks held out of training entirely.
    pub const fn is_out_of_domain(self) -> bool {
        matches!(self, Task::Buy | Task::Attach)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| SchemaError::UnknownTask(s.into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TemplateKind {
    Request,
    Correction,
}

impl TemplateKind {
    pub const fn as_str(self) -> &'static str {
        match self {
            TemplateKind::Request => "request",
            TemplateKind::Correction => "correction",
        }
    }
}

impl FromStr for TemplateKind {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "request" => Ok(TemplateKind::Request),
            "correction" => Ok(TemplateKind::Correction),
            _ => Err(SchemaError::UnknownKind(s.into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("unknown slot {0:?}")]
    UnknownSlot(String),
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("unknown template kind {0:?}")]
    UnknownKind(String),
    #[error("unknown lexicon tier {0:?}")]
    UnknownTier(String),
    #[error("duplicate template id {0:?}")]
    DuplicateId(String),
    #[error("template {id}: malformed placeholder {token:?}")]
    MalformedPlaceholder { id: String, token: String },
    #[error("template {0}: pattern has no words")]
    EmptyPattern(String),
    #[error("template {0}: request template without placeholders")]
    NoPlaceholder(String),
    #[error("template {id}: placeholder {slot} used twice")]
    RepeatedPlaceholder { id: String, slot: SlotName },
    #[error("template {0}: request templates cannot list corrected slots")]
    RequestWithCorrectedSlots(String),
    #[error("template {id}: correction templates correct 1 or 2 slots, found {count}")]
    CorrectedSlotCount { id: String, count: usize },
    #[error("template {0}: placeholders do not match corrected_slots")]
    CorrectedSlotsMismatch(String),
    #[error("template {id}: slot {slot} does not belong to task {task}")]
    SlotOutsideTask {
        id: String,
        slot: SlotName,
        task: Task,
    },
    #[error("{slot}: empty entity surface form")]
    EmptyEntity { slot: SlotName },
    #[error("{slot}: entity {entity:?} listed twice")]
    DuplicateEntity { slot: SlotName, entity: String },
    #[error("{slot}: entity {entity:?} appears in more than one tier")]
    OverlappingTiers { slot: SlotName, entity: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternPart {
    Literal(String),
    Slot(SlotName),
}

/// An utterance pattern with `{slot}` placeholders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub id: String,
    pub kind: TemplateKind,
    pub task: Task,
    pub parts: Vec<PatternPart>,
    /// Empty for request templates.
    pub corrected_slots: Vec<SlotName>,
}

impl Template {
    /// Parses `pattern` and checks the template invariants. Literal words
    /// go through the same edge-punctuation stripping as user input.
    pub fn new(
        id: &str,
        kind: TemplateKind,
        task: Task,
        pattern: &str,
        corrected_slots: Vec<SlotName>,
    ) -> Result<Self, SchemaError> {
        let mut parts = Vec::new();
        let mut seen = HashSet::new();
        for word in pattern.split_whitespace() {
            if word.contains('{') || word.contains('}') {
                let name = word
                    .strip_prefix('{')
                    .and_then(|w| w.strip_suffix('}'))
                    .filter(|n| !n.contains(['{', '}']))
                    .ok_or_else(|| SchemaError::MalformedPlaceholder {
                        id: id.into(),
                        token: word.into(),
                    })?;
                let slot: SlotName = name.parse()?;
                if slot.task() != task {
                    return Err(SchemaError::SlotOutsideTask {
                        id: id.into(),
                        slot,
                        task,
                    });
                }
                if !seen.insert(slot) {
                    return Err(SchemaError::RepeatedPlaceholder {
                        id: id.into(),
                        slot,
                    });
                }
                parts.push(PatternPart::Slot(slot));
            } else {
                parts.extend(
                    tokenize(word, false)
                        .into_iter()
                        .map(|t| PatternPart::Literal(t.text)),
                );
            }
        }
        if parts.is_empty() {
            return Err(SchemaError::EmptyPattern(id.into()));
        }
        let template = Template {
            id: id.to_string(),
            kind,
            task,
            parts,
            corrected_slots,
        };
        let placeholders = template.placeholders();
        match kind {
            TemplateKind::Request => {
                if placeholders.is_empty() {
                    return Err(SchemaError::NoPlaceholder(id.into()));
                }
                if !template.corrected_slots.is_empty() {
                    return Err(SchemaError::RequestWithCorrectedSlots(id.into()));
                }
            }
            TemplateKind::Correction => {
                let count = placeholders.len().max(template.corrected_slots.len());
                if !(1..=2).contains(&count) {
                    return Err(SchemaError::CorrectedSlotCount {
                        id: id.into(),
                        count,
                    });
                }
                let same = placeholders.len() == template.corrected_slots.len()
                    && placeholders
                        .iter()
                        .all(|p| template.corrected_slots.contains(p));
                if !same {
                    return Err(SchemaError::CorrectedSlotsMismatch(id.into()));
                }
            }
        }
        Ok(template)
    }

    /// Slots in pattern order.
    pub fn placeholders(&self) -> Vec<SlotName> {
        self.parts
            .iter()
            .filter_map(|p| match p {
                PatternPart::Slot(s) => Some(*s),
                PatternPart::Literal(_) => None,
            })
            .collect()
    }

    /// The literal words; in a correction template these are labeled `D`.
    pub fn interregnum_tokens(&self) -> Vec<&str> {
        self.parts
            .iter()
            .filter_map(|p| match p {
                PatternPart::Literal(w) => Some(w.as_str()),
                PatternPart::Slot(_) => None,
            })
            .collect()
    }
}

/// Rejects repeated template ids.
pub fn check_unique_ids<'a, I>(templates: I) -> Result<(), SchemaError>
where
    I: IntoIterator<Item = &'a Template>,
{
    let mut seen = HashSet::new();
    for t in templates {
        if !seen.insert(t.id.as_str()) {
            return Err(SchemaError::DuplicateId(t.id.clone()));
        }
    }
    Ok(())
}

/// Templates grouped by the tier they are drawn from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TemplateSet {
    pub train: Vec<Template>,
    pub unknown: Vec<Template>,
    pub ood: Vec<Template>,
}

impl TemplateSet {
    /// Ids must be unique across all three groups.
    pub fn new(
        train: Vec<Template>,
        unknown: Vec<Template>,
        ood: Vec<Template>,
    ) -> Result<Self, SchemaError> {
        check_unique_ids(train.iter().chain(&unknown).chain(&ood))?;
        Ok(TemplateSet {
            train,
            unknown,
            ood,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn request_template() {
        let t = Template::new(
            "r1",
            TemplateKind::Request,
            Task::Bring,
            "can you put the {object} into the {location}",
            vec![],
        )
        .unwrap();
        assert_eq!(t.placeholders(), vec![SlotName::Object, SlotName::Location]);
        assert_eq!(
            t.interregnum_tokens(),
            vec!["can", "you", "put", "the", "into", "the"]
        );
    }

    #[test]
    fn correction_template() {
        let t = Template::new(
            "c1",
            TemplateKind::Correction,
            Task::Bring,
            "i meant the {location}",
            vec![SlotName::Location],
        )
        .unwrap();
        assert_eq!(t.corrected_slots, vec![SlotName::Location]);
        assert_eq!(t.interregnum_tokens(), vec!["i", "meant", "the"]);
    }

    #[test]
    fn schema_errors() {
        let three = Template::new(
            "c",
            TemplateKind::Correction,
            Task::Attach,
            "no {attach_object} {attach_location} {object}",
            vec![SlotName::AttachObject, SlotName::AttachLocation],
        );
        assert!(matches!(three, Err(SchemaError::SlotOutsideTask { .. })));
        let cook_three = Template::new(
            "c",
            TemplateKind::Correction,
            Task::Bring,
            "{object} {location} {object}",
            vec![SlotName::Object, SlotName::Location],
        );
        assert!(matches!(
            cook_three,
            Err(SchemaError::RepeatedPlaceholder { .. })
        ));
        assert!(matches!(
            Template::new(
                "x",
                TemplateKind::Request,
                Task::Bring,
                "put the {thing}",
                vec![]
            ),
            Err(SchemaError::UnknownSlot(_))
        ));
        assert!(matches!(
            Template::new(
                "x",
                TemplateKind::Request,
                Task::Bring,
                "put the {object",
                vec![]
            ),
            Err(SchemaError::MalformedPlaceholder { .. })
        ));
        assert!(matches!(
            Template::new(
                "x",
                TemplateKind::Request,
                Task::Bring,
                "put it away",
                vec![]
            ),
            Err(SchemaError::NoPlaceholder(_))
        ));
        assert!(matches!(
            Template::new("x", TemplateKind::Correction, Task::Bring, "no", vec![]),
            Err(SchemaError::CorrectedSlotCount { count: 0, .. })
        ));
        assert!(matches!(
            Template::new(
                "x",
                TemplateKind::Correction,
                Task::Bring,
                "no the {object}",
                vec![SlotName::Location]
            ),
            Err(SchemaError::CorrectedSlotsMismatch(_))
        ));
    }

    #[test]
    fn duplicate_ids_across_groups() {
        let t = Template::new(
            "a",
            TemplateKind::Request,
            Task::Cook,
            "cook {recipe}",
            vec![],
        )
        .unwrap();
        assert_eq!(
            TemplateSet::new(vec![t.clone()], vec![], vec![t]),
            Err(SchemaError::DuplicateId("a".into()))
        );
    }
}
