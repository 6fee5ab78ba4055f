use alloc::vec::Vec;

use crate::label::LabelTag;
use crate::pair::{EntityPair, SlotIndex, TaggedPair};
use crate::token::{self, Token};
use crate::validate::{runs, validate, ValidationReport};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MergeError {
    #[error("label sequence is not well-formed: {0}")]
    ValidationFailed(ValidationReport),
}

/// The corrected request and the extracted entity pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionResult {
    pub corrected_tokens: Vec<Token>,
    /// Ordered by slot.
    pub pairs: Vec<EntityPair>,
}

impl CorrectionResult {
    pub fn corrected_text(&self) -> alloc::string::String {
        token::join(&self.corrected_tokens)
    }
}

fn ensure_valid(pair: &TaggedPair) -> Result<(), MergeError> {
    let report = validate(pair);
    if report.ok() {
        Ok(())
    } else {
        Err(MergeError::ValidationFailed(report))
    }
}

fn span(pair: &TaggedPair, tag: LabelTag) -> Option<core::ops::Range<usize>> {
    runs(pair.labels(), tag).into_iter().next()
}

/// Scans the request segment: `C` is copied, `D` dropped, and the first word
/// of an `Rk` run is replaced by the whole `Sk` run. Correction words are
/// only ever emitted as repairs.
pub fn merge(pair: &TaggedPair) -> Result<CorrectionResult, MergeError> {
    ensure_valid(pair)?;
    let labels = pair.labels();
    let repairs = [span(pair, LabelTag::S1), span(pair, LabelTag::S2)];
    let mut corrected = Vec::with_capacity(pair.len());
    let mut prev = None;
    for (i, tok) in pair.request_tokens().iter().enumerate() {
        let label = labels[i];
        match label {
            LabelTag::C => corrected.push(tok),
            LabelTag::R1 | LabelTag::R2 if prev != Some(label) => {
                let slot = label.slot().unwrap_or(1) as usize - 1;
                if let Some(r) = &repairs[slot] {
                    corrected.extend(r.clone().map(|p| pair.token(p)));
                }
            }
            _ => {}
        }
        prev = Some(label);
    }
    Ok(CorrectionResult {
        corrected_tokens: token::renumber(corrected),
        pairs: collect_pairs(pair),
    })
}

/// One pair per slot present: the `Rk` run and the `Sk` run.
pub fn extract_pairs(pair: &TaggedPair) -> Result<Vec<EntityPair>, MergeError> {
    ensure_valid(pair)?;
    Ok(collect_pairs(pair))
}

fn collect_pairs(pair: &TaggedPair) -> Vec<EntityPair> {
    let mut out = Vec::new();
    for (slot, rep, fix) in [
        (SlotIndex::FIRST, LabelTag::R1, LabelTag::S1),
        (SlotIndex::SECOND, LabelTag::R2, LabelTag::S2),
    ] {
        if let (Some(r), Some(s)) = (span(pair, rep), span(pair, fix)) {
            out.push(EntityPair {
                slot,
                reparandum: token::renumber(r.map(|p| pair.token(p))),
                repair: token::renumber(s.map(|p| pair.token(p))),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::ViolationCode;
    use alloc::string::String;
    use alloc::vec;
    use LabelTag::*;

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    fn pair(req: &str, corr: &str, labels: Vec<LabelTag>) -> TaggedPair {
        TaggedPair::new(&words(req), &words(corr), labels).unwrap()
    }

    fn pair_texts(p: &EntityPair) -> (u8, String, String) {
        (
            p.slot.get(),
            token::join(&p.reparandum),
            token::join(&p.repair),
        )
    }

    #[test]
    fn worked_example() {
        let p = pair(
            "cook rice for me",
            "no curry rice",
            vec![C, R1, C, C, D, S1, S1],
        );
        let out = merge(&p).unwrap();
        assert_eq!(out.corrected_text(), "cook curry rice for me");
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(
            pair_texts(&out.pairs[0]),
            (1, "rice".into(), "curry rice".into())
        );
        let idx: Vec<usize> = out.corrected_tokens.iter().map(|t| t.index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn cutlery_drawer_example() {
        let p = pair(
            "put the cleaned knives into the cutlery drawer",
            "no into the drawer right of the sink",
            vec![C, C, C, C, C, C, R1, R1, D, D, D, S1, S1, S1, S1, S1],
        );
        let out = merge(&p).unwrap();
        assert_eq!(
            out.corrected_text(),
            "put the cleaned knives into the drawer right of the sink"
        );
        assert_eq!(
            out.pairs.iter().map(pair_texts).collect::<Vec<_>>(),
            vec![(
                1,
                "cutlery drawer".into(),
                "drawer right of the sink".into()
            )]
        );
    }

    #[test]
    fn identity() {
        let empty: [&str; 0] = [];
        let p = TaggedPair::new(&words("cook rice for me"), &empty, vec![C; 4]).unwrap();
        let out = merge(&p).unwrap();
        assert_eq!(out.corrected_text(), "cook rice for me");
        assert!(out.pairs.is_empty());
        assert!(extract_pairs(&p).unwrap().is_empty());
    }

    #[test]
    fn two_slots() {
        let p = pair(
            "put the knives into the drawer",
            "no the forks into the sink",
            vec![C, C, R1, C, C, R2, D, D, S1, D, D, S2],
        );
        let out = merge(&p).unwrap();
        assert_eq!(out.corrected_text(), "put the forks into the sink");
        assert_eq!(
            extract_pairs(&p)
                .unwrap()
                .iter()
                .map(pair_texts)
                .collect::<Vec<_>>(),
            vec![
                (1, "knives".into(), "forks".into()),
                (2, "drawer".into(), "sink".into())
            ]
        );
    }

    #[test]
    fn copy_delete_only_is_disfluency_removal() {
        let p = pair("knives in the drawer uh sink", "", vec![C, C, C, D, D, C]);
        assert_eq!(merge(&p).unwrap().corrected_text(), "knives in the sink");
    }

    #[test]
    fn rejects_invalid() {
        let p = pair(
            "cook rice for me",
            "no curry rice",
            vec![C, C, C, C, D, S1, S1],
        );
        match merge(&p) {
            Err(MergeError::ValidationFailed(r)) => assert_eq!(r.codes(), vec![ViolationCode::V4]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(extract_pairs(&p).is_err());
    }
}
