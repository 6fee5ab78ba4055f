//! Core of the correction resolution toolkit.
//!
//! A user request and a correction utterance are concatenated into one word
//! sequence and every word receives one of six labels (see [`LabelTag`]).
//! [`merge`] turns a labeled sequence into the corrected request and the
//! list of (reparandum, repair) entity pairs.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the external
//! tagger client and the command line live in the `corrkit` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod datagen;
pub mod eval;
pub mod label;
pub mod merge;
pub mod pair;
pub mod tagger;
pub mod token;
pub mod validate;

pub use label::{LabelTag, ParseLabelError};
pub use merge::{extract_pairs, merge, CorrectionResult, MergeError};
pub use pair::{EntityPair, PairError, SlotIndex, TaggedPair};
pub use token::{join, tokenize, Token};
pub use validate::{validate, ValidationReport, Violation, ViolationCode};
