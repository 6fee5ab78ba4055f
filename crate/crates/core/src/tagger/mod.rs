//! Baseline sequence labeler: greedy left-to-right averaged perceptron over
//! sparse string features, plus the constraint repair pass applied to its
//! (or any external tagger's) output.

mod features;
mod model;
mod repair;

pub use features::{featurize, SequenceContext};
pub use model::{train, LabelWeights, TaggerModel, TrainConfig, TrainError, TrainingMeta};
pub use repair::repair_labels;
