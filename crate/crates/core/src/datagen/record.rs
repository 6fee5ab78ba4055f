use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::lexicon::Entity;
use super::template::{SlotName, Task};
use crate::merge::{merge, MergeError};
use crate::pair::{EntityPair, TaggedPair};
use crate::token::Token;

/// The generalization axis an evaluation split probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    UnknownEntities,
    UnknownTemplates,
    UnknownBoth,
    OutOfDomain,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::UnknownEntities,
        Condition::UnknownTemplates,
        Condition::UnknownBoth,
        Condition::OutOfDomain,
    ];

    /// Row title in reports.
    pub const fn title(self) -> &'static str {
        match self {
            Condition::UnknownEntities => "unknown entities",
            Condition::UnknownTemplates => "unknown templates",
            Condition::UnknownBoth => "unknown entities and templates",
            Condition::OutOfDomain => "out-of-domain entities and templates",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    ValUnknownEntities,
    ValUnknownTemplates,
    ValUnknownBoth,
    ValOod,
    TestUnknownEntities,
    TestUnknownTemplates,
    TestUnknownBoth,
    TestOod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Partition {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 9] = [
        Split::Train,
        Split::ValUnknownEntities,
        Split::ValUnknownTemplates,
        Split::ValUnknownBoth,
        Split::ValOod,
        Split::TestUnknownEntities,
        Split::TestUnknownTemplates,
        Split::TestUnknownBoth,
        Split::TestOod,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::ValUnknownEntities => "val_unknown_entities",
            Split::ValUnknownTemplates => "val_unknown_templates",
            Split::ValUnknownBoth => "val_unknown_both",
            Split::ValOod => "val_ood",
            Split::TestUnknownEntities => "test_unknown_entities",
            Split::TestUnknownTemplates => "test_unknown_templates",
            Split::TestUnknownBoth => "test_unknown_both",
            Split::TestOod => "test_ood",
        }
    }

    pub fn new(partition: Partition, condition: Condition) -> Option<Split> {
        use Condition::*;
        Some(match (partition, condition) {
            (Partition::Train, _) => return None,
            (Partition::Validation, UnknownEntities) => Split::ValUnknownEntities,
            (Partition::Validation, UnknownTemplates) => Split::ValUnknownTemplates,
            (Partition::Validation, UnknownBoth) => Split::ValUnknownBoth,
            (Partition::Validation, OutOfDomain) => Split::ValOod,
            (Partition::Test, UnknownEntities) => Split::TestUnknownEntities,
            (Partition::Test, UnknownTemplates) => Split::TestUnknownTemplates,
            (Partition::Test, UnknownBoth) => Split::TestUnknownBoth,
            (Partition::Test, OutOfDomain) => Split::TestOod,
        })
    }

    pub const fn partition(self) -> Partition {
        match self {
            Split::Train => Partition::Train,
            Split::ValUnknownEntities
            | Split::ValUnknownTemplates
            | Split::ValUnknownBoth
            | Split::ValOod => Partition::Validation,
            _ => Partition::Test,
        }
    }

    /// `None` for the training split.
    pub const fn condition(self) -> Option<Condition> {
        match self {
            Split::Train => None,
            Split::ValUnknownEntities | Split::TestUnknownEntities => {
                Some(Condition::UnknownEntities)
            }
            Split::ValUnknownTemplates | Split::TestUnknownTemplates => {
                Some(Condition::UnknownTemplates)
            }
            Split::ValUnknownBoth | Split::TestUnknownBoth => Some(Condition::UnknownBoth),
            Split::ValOod | Split::TestOod => Some(Condition::OutOfDomain),
        }
    }

    pub fn uses_unknown_entities(self) -> bool {
        matches!(
            self.condition(),
            Some(Condition::UnknownEntities | Condition::UnknownBoth)
        )
    }

    pub fn uses_unknown_templates(self) -> bool {
        matches!(
            self.condition(),
            Some(Condition::UnknownTemplates | Condition::UnknownBoth)
        )
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown split {0:?}")]
pub struct ParseSplitError(pub String);

impl FromStr for Split {
    type Err = ParseSplitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| ParseSplitError(s.into()))
    }
}

/// The entity a request slot was filled with and, for corrected slots, its
/// replacement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotBinding {
    pub slot: SlotName,
    pub original: Entity,
    pub replacement: Option<Entity>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordMeta {
    pub task: Task,
    pub request_template_id: String,
    pub correction_template_id: String,
    /// In request order.
    pub bindings: Vec<SlotBinding>,
}

/// One labeled example with both gold targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetRecord {
    pub id: String,
    pub split: Split,
    pub tagged: TaggedPair,
    pub gold_corrected: Vec<Token>,
    pub gold_pairs: Vec<EntityPair>,
    pub meta: RecordMeta,
}

impl DatasetRecord {
    /// Whether merging the gold labels reproduces both gold targets.
    pub fn gold_round_trips(&self) -> Result<bool, MergeError> {
        let out = merge(&self.tagged)?;
        Ok(out.corrected_tokens == self.gold_corrected && out.pairs == self.gold_pairs)
    }
}
