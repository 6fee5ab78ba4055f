//! File formats, the external tagger client and the `corrkit` command line
//! around `corrkit-core`.

pub mod adapter;
pub mod cli;
pub mod data;
pub mod dataset;
pub mod manifest;
pub mod mock;
pub mod model_file;
pub mod report;

pub use corrkit_core as core;
