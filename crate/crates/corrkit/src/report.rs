//! Machine-readable evaluation report.

use std::collections::BTreeMap;

use corrkit_core::datagen::Partition;
use corrkit_core::eval::{EvalOutcome, SplitStats};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsJson {
    pub n: usize,
    pub dual: usize,
    pub corrected_only: usize,
    pub pairs_only: usize,
    pub validation_failures: usize,
    pub accuracy: Option<f64>,
}

impl From<SplitStats> for StatsJson {
    fn from(s: SplitStats) -> Self {
        StatsJson {
            n: s.n,
            dual: s.dual,
            corrected_only: s.corrected_only(),
            pairs_only: s.pairs_only(),
            validation_failures: s.validation_failures,
            accuracy: s.accuracy(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportJson {
    pub lenient_repair: bool,
    pub splits: BTreeMap<String, StatsJson>,
    pub validation: StatsJson,
    pub test: StatsJson,
    pub overall: StatsJson,
}

impl From<&EvalOutcome> for ReportJson {
    fn from(o: &EvalOutcome) -> Self {
        ReportJson {
            lenient_repair: o.lenient_repair,
            splits: o
                .splits
                .iter()
                .map(|(k, v)| (k.as_str().to_string(), (*v).into()))
                .collect(),
            validation: o.partition(Partition::Validation).into(),
            test: o.partition(Partition::Test).into(),
            overall: o.overall().into(),
        }
    }
}
