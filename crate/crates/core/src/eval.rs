//! Dual-target exact-match scoring.
//!
//! A record counts as correct only when the corrected request AND the full
//! set of entity pairs equal their references.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::convert::Infallible;
use core::fmt::Write;

use crate::datagen::{Condition, DatasetRecord, Partition, Split};
use crate::label::LabelTag;
use crate::merge::merge;
use crate::pair::EntityPair;
use crate::tagger::{repair_labels, TaggerModel};
use crate::token::Token;
use crate::validate::validate;

/// Anything that can label a record's words.
pub trait LabelSource {
    type Error;

    fn labels(&mut self, record: &DatasetRecord) -> Result<Vec<LabelTag>, Self::Error>;
}

/// Returns the record's own gold labels.
#[derive(Clone, Copy, Debug, Default)]
pub struct GoldLabels;

impl LabelSource for GoldLabels {
    type Error = Infallible;

    fn labels(&mut self, record: &DatasetRecord) -> Result<Vec<LabelTag>, Infallible> {
        Ok(record.tagged.labels().to_vec())
    }
}

impl LabelSource for &TaggerModel {
    type Error = Infallible;

    fn labels(&mut self, record: &DatasetRecord) -> Result<Vec<LabelTag>, Infallible> {
        Ok(self.predict(&record.tagged.words(), record.tagged.boundary()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordOutcome {
    pub id: String,
    pub split: Split,
    pub dual_correct: bool,
    pub corrected_correct: bool,
    pub pairs_correct: bool,
    pub validation_failed: bool,
    /// Labels were changed by the repair pass.
    pub repaired: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SplitStats {
    pub n: usize,
    pub dual: usize,
    pub corrected: usize,
    pub pairs: usize,
    pub validation_failures: usize,
}

impl SplitStats {
    pub fn add(&mut self, r: &RecordOutcome) {
        self.n += 1;
        self.dual += r.dual_correct as usize;
        self.corrected += r.corrected_correct as usize;
        self.pairs += r.pairs_correct as usize;
        self.validation_failures += r.validation_failed as usize;
    }

    pub fn combine(&mut self, other: &SplitStats) {
        self.n += other.n;
        self.dual += other.dual;
        self.corrected += other.corrected;
        self.pairs += other.pairs;
        self.validation_failures += other.validation_failures;
    }

    /// Dual-target accuracy; `None` when the split is empty.
    pub fn accuracy(&self) -> Option<f64> {
        (self.n > 0).then(|| self.dual as f64 / self.n as f64)
    }

    /// Corrected request right, pairs wrong.
    pub fn corrected_only(&self) -> usize {
        self.corrected - self.dual
    }

    /// Pairs right, corrected request wrong.
    pub fn pairs_only(&self) -> usize {
        self.pairs - self.dual
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct EvalOutcome {
    pub records: Vec<RecordOutcome>,
    pub splits: BTreeMap<Split, SplitStats>,
    pub lenient_repair: bool,
}

impl EvalOutcome {
    pub fn from_records(records: Vec<RecordOutcome>, lenient_repair: bool) -> Self {
        let mut splits: BTreeMap<Split, SplitStats> = BTreeMap::new();
        for r in &records {
            splits.entry(r.split).or_default().add(r);
        }
        EvalOutcome {
            records,
            splits,
            lenient_repair,
        }
    }

    pub fn split(&self, split: Split) -> SplitStats {
        self.splits.get(&split).copied().unwrap_or_default()
    }

    pub fn partition(&self, partition: Partition) -> SplitStats {
        let mut total = SplitStats::default();
        for (_, s) in self
            .splits
            .iter()
            .filter(|(k, _)| k.partition() == partition)
        {
            total.combine(s);
        }
        total
    }

    pub fn overall(&self) -> SplitStats {
        let mut total = SplitStats::default();
        for s in self.splits.values() {
            total.combine(s);
        }
        total
    }

    pub fn has_partition(&self, partition: Partition) -> bool {
        self.splits.keys().any(|k| k.partition() == partition)
    }
}

fn pair_key(p: &EntityPair) -> (u8, Vec<&str>, Vec<&str>) {
    (
        p.slot.get(),
        p.reparandum.iter().map(Token::as_str).collect(),
        p.repair.iter().map(Token::as_str).collect(),
    )
}

fn same_pairs(a: &[EntityPair], b: &[EntityPair]) -> bool {
    let mut a: Vec<_> = a.iter().map(pair_key).collect();
    let mut b: Vec<_> = b.iter().map(pair_key).collect();
    a.sort();
    b.sort();
    a == b
}

fn same_tokens(a: &[Token], b: &[Token]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.text == y.text)
}

/// Scores one prediction against the record's references.
pub fn score_record(
    record: &DatasetRecord,
    predicted: &[LabelTag],
    lenient_repair: bool,
) -> RecordOutcome {
    let mut outcome = RecordOutcome {
        id: record.id.clone(),
        split: record.split,
        dual_correct: false,
        corrected_correct: false,
        pairs_correct: false,
        validation_failed: false,
        repaired: false,
    };
    let labels = if lenient_repair {
        let fixed = repair_labels(predicted, record.tagged.boundary());
        outcome.repaired = fixed != predicted;
        fixed
    } else {
        predicted.to_vec()
    };
    let Ok(pair) = record.tagged.with_labels(labels) else {
        outcome.validation_failed = true;
        return outcome;
    };
    if !validate(&pair).ok() {
        outcome.validation_failed = true;
        return outcome;
    }
    let Ok(result) = merge(&pair) else {
        outcome.validation_failed = true;
        return outcome;
    };
    outcome.corrected_correct = same_tokens(&result.corrected_tokens, &record.gold_corrected);
    outcome.pairs_correct = same_pairs(&result.pairs, &record.gold_pairs);
    outcome.dual_correct = outcome.corrected_correct && outcome.pairs_correct;
    outcome
}

/// Labels every record with `source` and scores it. Bad predictions are
/// scored, only source failures are returned as errors.
pub fn evaluate<S: LabelSource>(
    records: &[DatasetRecord],
    mut source: S,
    lenient_repair: bool,
) -> Result<EvalOutcome, S::Error> {
    let mut outcomes = Vec::with_capacity(records.len());
    for r in records {
        let predicted = source.labels(r)?;
        outcomes.push(score_record(r, &predicted, lenient_repair));
    }
    Ok(EvalOutcome::from_records(outcomes, lenient_repair))
}

fn cell(stats: SplitStats) -> String {
    match stats.accuracy() {
        Some(a) => format!("{:.2} %", a * 100.0),
        None => String::from("n/a"),
    }
}

const ROW_WIDTH: usize = 38;
const COL_WIDTH: usize = 12;

/// Text table: one row per condition plus "all together", one column per
/// partition present in the outcome.
pub fn format_report(outcome: &EvalOutcome) -> String {
    let mut columns = Vec::new();
    if outcome.has_partition(Partition::Validation) {
        columns.push((Partition::Validation, "validation"));
    }
    if outcome.has_partition(Partition::Test) {
        columns.push((Partition::Test, "test"));
    }

    let mut out = String::new();
    let mode = if outcome.lenient_repair {
        "labels repaired before merge"
    } else {
        "strict, invalid labels count as wrong"
    };
    let _ = writeln!(out, "accuracy, both targets correct ({mode})");
    if !columns.is_empty() {
        let _ = write!(out, "{:<ROW_WIDTH$}", "");
        for (_, title) in &columns {
            let _ = write!(out, " | {title:>COL_WIDTH$}");
        }
        out.push('\n');
        let rule_len = ROW_WIDTH + columns.len() * (COL_WIDTH + 3);
        let rule = "-".repeat(rule_len);
        let _ = writeln!(out, "{rule}");
        for condition in Condition::ALL {
            let _ = write!(out, "{:<ROW_WIDTH$}", condition.title());
            for (partition, _) in &columns {
                let stats = Split::new(*partition, condition)
                    .map(|s| outcome.split(s))
                    .unwrap_or_default();
                let _ = write!(out, " | {:>COL_WIDTH$}", cell(stats));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "{rule}");
        let _ = write!(out, "{:<ROW_WIDTH$}", "all together");
        for (partition, _) in &columns {
            let _ = write!(
                out,
                " | {:>COL_WIDTH$}",
                cell(outcome.partition(*partition))
            );
        }
        out.push('\n');
    }
    if outcome.has_partition(Partition::Train) {
        let _ = writeln!(
            out,
            "{:<ROW_WIDTH$} | {:>COL_WIDTH$}",
            "train split",
            cell(outcome.split(Split::Train))
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn stats(n: usize, dual: usize) -> SplitStats {
        SplitStats {
            n,
            dual,
            corrected: dual,
            pairs: dual,
            validation_failures: 0,
        }
    }

    fn outcome(values: &[(Split, SplitStats)]) -> EvalOutcome {
        EvalOutcome {
            records: vec![],
            splits: values.iter().copied().collect(),
            lenient_repair: false,
        }
    }

    #[test]
    fn perfect_scores_render_as_hundred() {
        let o = outcome(
            &Split::ALL[1..]
                .iter()
                .map(|&s| (s, stats(10, 10)))
                .collect::<Vec<_>>(),
        );
        let text = format_report(&o);
        assert_eq!(text.matches("100.00 %").count(), 10);
        assert!(!text.contains("n/a"));
    }

    #[test]
    fn published_layout() {
        use Split::*;
        let o = outcome(&[
            (ValUnknownEntities, stats(100, 100)),
            (ValUnknownTemplates, stats(100, 97)),
            (ValUnknownBoth, stats(100, 91)),
            (ValOod, stats(100, 82)),
            (TestUnknownEntities, stats(10000, 9854)),
            (TestUnknownTemplates, stats(10000, 9703)),
            (TestUnknownBoth, stats(10000, 9024)),
            (TestOod, stats(10000, 8855)),
        ]);
        let text = format_report(&o);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[1].contains("validation") && lines[1].contains("test"));
        let row = |title: &str| {
            lines
                .iter()
                .find(|l| l.starts_with(title))
                .copied()
                .unwrap_or_default()
        };
        assert!(row("unknown entities ").contains("100.00 %"));
        assert!(row("unknown entities ").contains("98.54 %"));
        assert!(row("unknown templates").contains("97.03 %"));
        assert!(row("unknown entities and templates").contains("90.24 %"));
        assert!(row("out-of-domain entities and templates").contains("88.55 %"));
        assert!(row("out-of-domain entities and templates").contains("82.00 %"));
        assert!(row("all together").contains("92.50 %"));
    }

    #[test]
    fn empty_split_is_not_available() {
        let o = outcome(&[(Split::TestUnknownEntities, stats(5, 5))]);
        assert_eq!(o.split(Split::TestOod).n, 0);
        let text = format_report(&o);
        assert!(!text.contains("validation"));
        assert!(text
            .lines()
            .any(|l| l.starts_with("out-of-domain") && l.ends_with("n/a")));
    }

    #[test]
    fn overall_is_weighted() {
        let o = outcome(&[
            (Split::TestUnknownEntities, stats(10, 10)),
            (Split::TestOod, stats(30, 0)),
        ]);
        assert_eq!(o.overall().accuracy(), Some(0.25));
    }
}
