use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::template::{SchemaError, SlotName};
use crate::token::{join, tokenize};

/// An entity surface form, already split into words.
pub type Entity = Vec<String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tier {
    Train,
    Unknown,
    Ood,
}

impl Tier {
    pub const fn as_str(self) -> &'static str {
        match self {
            Tier::Train => "train",
            Tier::Unknown => "unknown",
            Tier::Ood => "ood",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tier {
    type Err = SchemaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Tier::Train),
            "unknown" => Ok(Tier::Unknown),
            "ood" => Ok(Tier::Ood),
            _ => Err(SchemaError::UnknownTier(s.into())),
        }
    }
}

/// Entity inventories per slot and tier. A surface form belongs to at most
/// one tier of its slot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<(SlotName, Tier), Vec<Entity>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn add(&mut self, slot: SlotName, tier: Tier, surface: &str) -> Result<(), SchemaError> {
        let entity: Entity = tokenize(surface, false)
            .into_iter()
            .map(|t| t.text)
            .collect();
        if entity.is_empty() {
            return Err(SchemaError::EmptyEntity { slot });
        }
        for ((s, t), list) in &self.entries {
            if *s == slot && list.contains(&entity) {
                let entity = join(&entity);
                return Err(if *t == tier {
                    SchemaError::DuplicateEntity { slot, entity }
                } else {
                    SchemaError::OverlappingTiers { slot, entity }
                });
            }
        }
        self.entries.entry((slot, tier)).or_default().push(entity);
        Ok(())
    }

    pub fn extend<'a, I>(
        &mut self,
        slot: SlotName,
        tier: Tier,
        surfaces: I,
    ) -> Result<(), SchemaError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        surfaces
            .into_iter()
            .try_for_each(|s| self.add(slot, tier, s))
    }

    pub fn entities(&self, slot: SlotName, tier: Tier) -> &[Entity] {
        self.entries.get(&(slot, tier)).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
