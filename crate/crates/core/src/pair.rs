use alloc::vec::Vec;

use crate::label::LabelTag;
use crate::token::{self, Token};

/// Slot number of an entity pair; only 1 and 2 exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotIndex(u8);

impl SlotIndex {
    pub const FIRST: SlotIndex = SlotIndex(1);
    pub const SECOND: SlotIndex = SlotIndex(2);

    pub fn new(slot: u8) -> Option<Self> {
        matches!(slot, 1 | 2).then_some(SlotIndex(slot))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PairError {
    #[error("request segment is empty")]
    EmptyRequest,
    #[error("expected {expected} labels, got {actual}")]
    LabelCount { expected: usize, actual: usize },
    #[error("token {0:?} is empty or contains whitespace")]
    BadToken(alloc::string::String),
    #[error("slot index must be 1 or 2, got {0}")]
    BadSlot(u8),
    #[error("entity spans must be non-empty")]
    EmptyEntity,
}

/// A request and a correction with one label per word of the concatenation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedPair {
    request: Vec<Token>,
    correction: Vec<Token>,
    labels: Vec<LabelTag>,
}

impl TaggedPair {
    /// Builds a pair from word lists. Tokens are renumbered from 0 per segment.
    pub fn new<S: AsRef<str>>(
        request: &[S],
        correction: &[S],
        labels: Vec<LabelTag>,
    ) -> Result<Self, PairError> {
        if request.is_empty() {
            return Err(PairError::EmptyRequest);
        }
        for w in request.iter().chain(correction) {
            let w = w.as_ref();
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(PairError::BadToken(w.into()));
            }
        }
        let expected = request.len() + correction.len();
        if labels.len() != expected {
            return Err(PairError::LabelCount {
                expected,
                actual: labels.len(),
            });
        }
        Ok(TaggedPair {
            request: token::from_words(request),
            correction: token::from_words(correction),
            labels,
        })
    }

    pub fn request_tokens(&self) -> &[Token] {
        &self.request
    }

    pub fn correction_tokens(&self) -> &[Token] {
        &self.correction
    }

    pub fn labels(&self) -> &[LabelTag] {
        &self.labels
    }

    /// Index of the first correction word in the concatenated sequence.
    pub fn boundary(&self) -> usize {
        self.request.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Token at a position of the concatenated sequence.
    pub fn token(&self, position: usize) -> &Token {
        if position < self.request.len() {
            &self.request[position]
        } else {
            &self.correction[position - self.request.len()]
        }
    }

    /// All words, request first.
    pub fn words(&self) -> Vec<&str> {
        self.request
            .iter()
            .chain(&self.correction)
            .map(Token::as_str)
            .collect()
    }

    /// Same words, different labels.
    pub fn with_labels(&self, labels: Vec<LabelTag>) -> Result<Self, PairError> {
        if labels.len() != self.labels.len() {
            return Err(PairError::LabelCount {
                expected: self.labels.len(),
                actual: labels.len(),
            });
        }
        Ok(TaggedPair {
            request: self.request.clone(),
            correction: self.correction.clone(),
            labels,
        })
    }
}

/// One (reparandum, repair) pair. Token indices count from 0 within each span.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityPair {
    pub slot: SlotIndex,
    pub reparandum: Vec<Token>,
    pub repair: Vec<Token>,
}

impl EntityPair {
    pub fn new<S: AsRef<str>>(slot: u8, reparandum: &[S], repair: &[S]) -> Result<Self, PairError> {
        let slot = SlotIndex::new(slot).ok_or(PairError::BadSlot(slot))?;
        if reparandum.is_empty() || repair.is_empty() {
            return Err(PairError::EmptyEntity);
        }
        Ok(EntityPair {
            slot,
            reparandum: token::from_words(reparandum),
            repair: token::from_words(repair),
        })
    }
}
