use core::fmt;
use core::str::FromStr;

/// Per-word label.
///
/// `C` copies a request word, `D` deletes a word, `R1`/`R2` mark the request
/// entities that get replaced and `S1`/`S2` the correction entities that
/// replace them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelTag {
    C,
    D,
    R1,
    R2,
    S1,
    S2,
}

impl LabelTag {
    /// Fixed order; also the argmax tie-break order of the tagger.
    pub const ALL: [LabelTag; 6] = [
        LabelTag::C,
        LabelTag::D,
        LabelTag::R1,
        LabelTag::R2,
        LabelTag::S1,
        LabelTag::S2,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            LabelTag::C => "C",
            LabelTag::D => "D",
            LabelTag::R1 => "R1",
            LabelTag::R2 => "R2",
            LabelTag::S1 => "S1",
            LabelTag::S2 => "S2",
        }
    }

    /// Position in [`LabelTag::ALL`].
    pub const fn ordinal(self) -> usize {
        self as usize
    }

    pub const fn is_reparandum(self) -> bool {
        matches!(self, LabelTag::R1 | LabelTag::R2)
    }

    pub const fn is_repair(self) -> bool {
        matches!(self, LabelTag::S1 | LabelTag::S2)
    }

    /// Slot number (1 or 2) for R/S labels.
    pub const fn slot(self) -> Option<u8> {
        match self {
            LabelTag::R1 | LabelTag::S1 => Some(1),
            LabelTag::R2 | LabelTag::S2 => Some(2),
            _ => None,
        }
    }

    pub const fn reparandum(slot: u8) -> LabelTag {
        if slot == 1 {
            LabelTag::R1
        } else {
            LabelTag::R2
        }
    }

    pub const fn repair(slot: u8) -> LabelTag {
        if slot == 1 {
            LabelTag::S1
        } else {
            LabelTag::S2
        }
    }
}

impl fmt::Display for LabelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown label {0:?}")]
pub struct ParseLabelError(pub alloc::string::String);

impl FromStr for LabelTag {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LabelTag::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| ParseLabelError(s.into()))
    }
}
