//! Template-driven synthesis of labeled request/correction records and the
//! construction of the training and evaluation splits.

mod disjoint;
mod generate;
mod instantiate;
mod lexicon;
mod record;
mod template;

pub use disjoint::{verify_disjointness, DisjointnessReport, Leak, LeakKind};
pub use generate::{combination_count, generate, GenerateError, GenerationConfig, Generator};
pub use instantiate::{instantiate, Binding, InstantiateError};
pub use lexicon::{Entity, Lexicon, Tier};
pub use record::{
    Condition, DatasetRecord, ParseSplitError, Partition, RecordMeta, SlotBinding, Split,
};
pub use template::{
    check_unique_ids, PatternPart, SchemaError, SlotName, Task, Template, TemplateKind, TemplateSet,
};
