//! Well-formedness rules for label sequences.
//!
//! | code | rule |
//! |------|------|
//! | V1 | `R1`/`R2` only in the request segment |
//! | V2 | `S1`/`S2` only in the correction segment |
//! | V3 | every R/S label forms a single contiguous run |
//! | V4 | `Rk` present iff `Sk` present |
//! | V5 | `R2` requires `R1` |
//! | V6 | the correction segment is either all `C` (no-op) or has no `C` |
//! | V7 | the `R1` run precedes the `R2` run |

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::label::LabelTag;
use crate::pair::TaggedPair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    V1,
    V2,
    V3,
    V4,
    V5,
    V6,
    V7,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub token_index: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} at {}: {}", v.code, v.token_index, v.message)?;
        }
        Ok(())
    }
}

/// Maximal runs of `tag` as index ranges, in order.
pub(crate) fn runs(labels: &[LabelTag], tag: LabelTag) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        if labels[i] == tag {
            let start = i;
            while i < labels.len() && labels[i] == tag {
                i += 1;
            }
            out.push(start..i);
        } else {
            i += 1;
        }
    }
    out
}

fn first(labels: &[LabelTag], tag: LabelTag) -> Option<usize> {
    labels.iter().position(|&l| l == tag)
}

pub fn validate(pair: &TaggedPair) -> ValidationReport {
    validate_labels(pair.labels(), pair.boundary())
}

/// Same as [`validate`] on a bare label slice.
pub fn validate_labels(labels: &[LabelTag], boundary: usize) -> ValidationReport {
    use LabelTag::*;
    let mut violations = Vec::new();
    let mut push = |code, token_index, message: &str| {
        violations.push(Violation {
            code,
            token_index,
            message: message.into(),
        })
    };
    let boundary = boundary.min(labels.len());
    let (request, correction) = labels.split_at(boundary);

    if let Some(i) = correction.iter().position(|l| l.is_reparandum()) {
        push(
            ViolationCode::V1,
            boundary + i,
            "reparandum label in the correction segment",
        );
    }
    if let Some(i) = request.iter().position(|l| l.is_repair()) {
        push(ViolationCode::V2, i, "repair label in the request segment");
    }
    for tag in [R1, R2, S1, S2] {
        let r = runs(labels, tag);
        if r.len() > 1 {
            push(
                ViolationCode::V3,
                r[1].start,
                "entity span is not contiguous",
            );
            break;
        }
    }
    for (rep, fix) in [(R1, S1), (R2, S2)] {
        match (first(labels, rep), first(labels, fix)) {
            (Some(i), None) => {
                push(ViolationCode::V4, i, "reparandum without matching repair");
                break;
            }
            (None, Some(i)) => {
                push(ViolationCode::V4, i, "repair without matching reparandum");
                break;
            }
            _ => {}
        }
    }
    if let (None, Some(i)) = (first(labels, R1), first(labels, R2)) {
        push(ViolationCode::V5, i, "slot 2 used without slot 1");
    }
    let has_change = correction.iter().any(|&l| l == D || l.is_repair());
    if has_change {
        if let Some(i) = correction.iter().position(|&l| l == C) {
            push(
                ViolationCode::V6,
                boundary + i,
                "copy label in a correction segment that carries a correction",
            );
        }
    }
    if let (Some(r1), Some(r2)) = (first(labels, R1), first(labels, R2)) {
        if r2 < r1 {
            push(
                ViolationCode::V7,
                r2,
                "slot 2 precedes slot 1 in the request",
            );
        }
    }
    ValidationReport { violations }
}
